use nalgebra::Vector3;

use super::kdtree::KdTree;
use super::{GeometryError, PointCloud, TriMesh};

/// One template-vertex-to-scan pairing. `valid` is false whenever the match
/// was rejected by the distance or normal-angle gate.
#[derive(Debug, Clone)]
pub struct Correspondence {
    pub source_index: usize,
    pub target_index: usize,
    pub target_point: Vector3<f64>,
    pub target_normal: Vector3<f64>,
    pub distance: f64,
    pub valid: bool,
}

/// Rejection gates for correspondence search. The defaults are conventional
/// ICP values; both are configurable.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct CorrGates {
    /// Maximum source-to-target distance in mm.
    pub max_dist: f64,
    /// Maximum angle between source and target normals, radians.
    pub max_normal_angle: f64,
}

impl Default for CorrGates {
    fn default() -> Self {
        Self {
            max_dist: 10.0,
            max_normal_angle: 60f64.to_radians(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct CorrespondenceSet {
    pub items: Vec<Correspondence>,
    /// False when the target cloud carried no normals and the normal gate was
    /// skipped.
    pub normal_gate_applied: bool,
}

impl CorrespondenceSet {
    pub fn valid_count(&self) -> usize {
        self.items.iter().filter(|c| c.valid).count()
    }

    pub fn valid(&self) -> impl Iterator<Item = &Correspondence> {
        self.items.iter().filter(|c| c.valid)
    }
}

/// For each source vertex, the exact nearest target point, gated by distance
/// and normal agreement. Results are identical to a brute-force scan.
pub fn find_correspondences(
    source: &TriMesh,
    target: &PointCloud,
    gates: CorrGates,
) -> Result<CorrespondenceSet, GeometryError> {
    if target.is_empty() {
        return Err(GeometryError::EmptyCloud);
    }
    let source_normals = source
        .normals
        .as_ref()
        .ok_or(GeometryError::MissingSourceNormals)?;
    let tree = KdTree::build(&target.points);
    let cos_gate = gates.max_normal_angle.cos();
    let items = source
        .vertices
        .iter()
        .zip(source_normals)
        .enumerate()
        .map(|(i, (v, n))| {
            let (ti, dist) = tree.nearest(v).expect("non-empty target");
            let target_normal = target
                .normals
                .as_ref()
                .map(|ns| ns[ti])
                .unwrap_or(Vector3::new(0.0, 0.0, 1.0));
            let mut valid = dist <= gates.max_dist;
            if valid && target.normals.is_some() {
                valid = n.dot(&target_normal) >= cos_gate;
            }
            Correspondence {
                source_index: i,
                target_index: ti,
                target_point: target.points[ti],
                target_normal,
                distance: dist,
                valid,
            }
        })
        .collect();
    Ok(CorrespondenceSet {
        items,
        normal_gate_applied: target.normals.is_some(),
    })
}
