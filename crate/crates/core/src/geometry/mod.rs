//! Foundational geometry: meshes, point clouds, rigid transforms,
//! correspondence search and OBJ/PLY file I/O.
//!
//! Everything downstream (morphable model fitting, non-rigid ICP, the
//! per-frame blendshape solve) is built on these types. All coordinates are
//! millimeters. Types are immutable after construction and safe to share
//! across threads.

mod align;
mod correspond;
mod io;
mod kdtree;
mod mesh;
mod transform;

pub use align::rigid_align;
pub use correspond::{find_correspondences, CorrGates, Correspondence, CorrespondenceSet};
pub use io::{load_cloud, load_mesh, save_cloud, save_mesh};
pub use kdtree::KdTree;
pub use mesh::{compute_vertex_normals, PointCloud, TriMesh};
pub use transform::RigidTransform;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum GeometryError {
    #[error("mesh has no faces")]
    NoFaces,
    #[error("face {face} references vertex {index} but mesh has {count} vertices")]
    FaceIndexOutOfRange {
        face: usize,
        index: usize,
        count: usize,
    },
    #[error("normal {index} has length {length}, expected unit length")]
    NonUnitNormal { index: usize, length: f64 },
    #[error("normal count {normals} does not match vertex/point count {points}")]
    NormalCountMismatch { normals: usize, points: usize },
    #[error("point cloud is empty")]
    EmptyCloud,
    #[error("source mesh has no vertex normals; compute them before correspondence search")]
    MissingSourceNormals,
    #[error("need at least {needed} points for alignment, got {got}")]
    TooFewPoints { needed: usize, got: usize },
    #[error("point counts differ: {source} source vs {target} target")]
    PointCountMismatch { source: usize, target: usize },
    #[error("degenerate point configuration: {0}")]
    DegenerateConfiguration(String),
    #[error("rotation matrix is not orthonormal (deviation {0:.3e})")]
    NotARotation(f64),
    #[error("{path}:{line}: {message}")]
    Parse {
        path: String,
        line: usize,
        message: String,
    },
    #[error("io error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}
