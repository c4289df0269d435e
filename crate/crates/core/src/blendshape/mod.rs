//! Per-frame blendshape weight solving.
//!
//! A rig is a neutral mesh plus a 3V x K delta matrix (column k = blendshape
//! k minus neutral). Each frame solves a box-constrained least-squares
//! problem over the weights: dense correspondences, landmark residuals, a
//! second-difference temporal smoother and an L2 pull toward neutral. The
//! face is partitioned into regions and each region is solved independently.

mod qp;
mod rig;
mod rig_io;
mod solve;

pub use qp::{solve_box_qp, BoxQpSolution};
pub use rig::{
    build_select_matrices, evaluate_rig, partition_regions, BlendshapeRig, Region,
    RegionPartition, SelectMatrix, ARKIT_NAMES,
};
pub use rig_io::{load_rig, save_rig};
pub use solve::{
    solve_frame, solve_sequence, FrameObservation, FrameSolveOutput, FrameWeights, SolveEnergies,
    SolveParams, SolverHistory,
};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum RigError {
    #[error("rig has {got} names, expected {expected}")]
    NameCount { expected: usize, got: usize },
    #[error("duplicate blendshape name `{0}`")]
    DuplicateName(String),
    #[error("delta matrix is {rows}x{cols}, expected {expected_rows}x{expected_cols}")]
    DeltaShape {
        rows: usize,
        cols: usize,
        expected_rows: usize,
        expected_cols: usize,
    },
    #[error("blendshape {index} (`{name}`) has support outside its region {region:?} at vertex {vertex}")]
    SupportOutsideRegion {
        index: usize,
        name: String,
        region: Region,
        vertex: usize,
    },
    #[error("region {0:?} declares vertices but owns no blendshape")]
    EmptyRegion(Region),
    #[error("region vertex sets overlap at vertex {0}")]
    OverlappingRegions(usize),
    #[error("region vertex index {vertex} out of range (V = {count})")]
    VertexOutOfRange { vertex: usize, count: usize },
    #[error("weight vector has length {got}, rig has {expected} blendshapes")]
    WeightLength { expected: usize, got: usize },
    #[error("weight {index} = {value} outside [0, 1]")]
    WeightOutOfRange { index: usize, value: f64 },
    #[error("landmark select ({landmarks} vertices) must be smaller than dense select ({dense} vertices)")]
    LandmarkNotSmaller { landmarks: usize, dense: usize },
    #[error("select index {vertex} out of range (V = {count})")]
    SelectOutOfRange { vertex: usize, count: usize },
}

#[derive(Debug, Error)]
pub enum SolveError {
    #[error(transparent)]
    Rig(#[from] RigError),
    #[error(transparent)]
    Geometry(#[from] crate::geometry::GeometryError),
    #[error("frame {got} arrived after frame {prev}; frames must be strictly increasing")]
    OutOfOrderFrame { prev: usize, got: usize },
    #[error("history frames {prev2}, {prev} are not consecutive with current frame {current}")]
    HistoryNotConsecutive {
        prev2: usize,
        prev: usize,
        current: usize,
    },
    #[error("landmark vertex {vertex} out of range (V = {count})")]
    LandmarkOutOfRange { vertex: usize, count: usize },
}
