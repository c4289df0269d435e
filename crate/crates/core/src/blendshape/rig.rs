use std::collections::BTreeMap;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::geometry::TriMesh;

use super::RigError;

/// The 51 ARKit blendshape names used by the rig (tongue excluded), in the
/// fixed order every weight vector follows.
pub const ARKIT_NAMES: [&str; 51] = [
    "eyeBlinkLeft",
    "eyeLookDownLeft",
    "eyeLookInLeft",
    "eyeLookOutLeft",
    "eyeLookUpLeft",
    "eyeSquintLeft",
    "eyeWideLeft",
    "eyeBlinkRight",
    "eyeLookDownRight",
    "eyeLookInRight",
    "eyeLookOutRight",
    "eyeLookUpRight",
    "eyeSquintRight",
    "eyeWideRight",
    "jawForward",
    "jawLeft",
    "jawRight",
    "jawOpen",
    "mouthClose",
    "mouthFunnel",
    "mouthPucker",
    "mouthLeft",
    "mouthRight",
    "mouthSmileLeft",
    "mouthSmileRight",
    "mouthFrownLeft",
    "mouthFrownRight",
    "mouthDimpleLeft",
    "mouthDimpleRight",
    "mouthStretchLeft",
    "mouthStretchRight",
    "mouthRollLower",
    "mouthRollUpper",
    "mouthShrugLower",
    "mouthShrugUpper",
    "mouthPressLeft",
    "mouthPressRight",
    "mouthLowerDownLeft",
    "mouthLowerDownRight",
    "mouthUpperUpLeft",
    "mouthUpperUpRight",
    "browDownLeft",
    "browDownRight",
    "browInnerUp",
    "browOuterUpLeft",
    "browOuterUpRight",
    "cheekPuff",
    "cheekSquintLeft",
    "cheekSquintRight",
    "noseSneerLeft",
    "noseSneerRight",
];

/// Face regions for the partitioned per-frame solve.
#[derive(
    Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize,
)]
pub enum Region {
    BrowLeft,
    BrowRight,
    EyeLeft,
    EyeRight,
    Nose,
    Mouth,
    Jaw,
    CheekLeft,
    CheekRight,
}

impl Region {
    pub const ALL: [Region; 9] = [
        Region::BrowLeft,
        Region::BrowRight,
        Region::EyeLeft,
        Region::EyeRight,
        Region::Nose,
        Region::Mouth,
        Region::Jaw,
        Region::CheekLeft,
        Region::CheekRight,
    ];
}

/// Region each ARKit blendshape belongs to, index-aligned with
/// [`ARKIT_NAMES`].
pub fn arkit_region_table() -> Vec<Region> {
    use Region::*;
    ARKIT_NAMES
        .iter()
        .map(|name| match *name {
            n if n.starts_with("eye") && n.ends_with("Left") => EyeLeft,
            n if n.starts_with("eye") && n.ends_with("Right") => EyeRight,
            n if n.starts_with("jaw") => Jaw,
            n if n.starts_with("mouth") => Mouth,
            "browDownLeft" | "browOuterUpLeft" | "browInnerUp" => BrowLeft,
            "browDownRight" | "browOuterUpRight" => BrowRight,
            "cheekPuff" | "cheekSquintLeft" => CheekLeft,
            "cheekSquintRight" => CheekRight,
            n if n.starts_with("nose") => Nose,
            other => unreachable!("unmapped blendshape {other}"),
        })
        .collect()
}

/// Neutral mesh plus the residual delta matrix and the region bookkeeping
/// needed for the partitioned solve.
#[derive(Debug, Clone)]
pub struct BlendshapeRig {
    pub neutral: TriMesh,
    /// 3V x K; column k is blendshape k minus the neutral.
    pub deltas: DMatrix<f64>,
    pub names: Vec<String>,
    /// Region of each blendshape, index-aligned with `names`.
    pub regions: Vec<Region>,
    /// Vertices owned by each region; disjoint across regions.
    pub region_vertex_sets: BTreeMap<Region, Vec<usize>>,
}

impl BlendshapeRig {
    pub fn shape_count(&self) -> usize {
        self.names.len()
    }

    pub fn vertex_count(&self) -> usize {
        self.neutral.vertex_count()
    }

    /// Structural validation: shape/name bookkeeping consistent, region
    /// vertex sets disjoint and in range, every delta supported strictly
    /// inside its region, and no region left without blendshapes.
    pub fn validate(&self) -> Result<(), RigError> {
        let v = self.vertex_count();
        let k = self.names.len();
        if self.regions.len() != k {
            return Err(RigError::NameCount {
                expected: k,
                got: self.regions.len(),
            });
        }
        if self.deltas.nrows() != 3 * v || self.deltas.ncols() != k {
            return Err(RigError::DeltaShape {
                rows: self.deltas.nrows(),
                cols: self.deltas.ncols(),
                expected_rows: 3 * v,
                expected_cols: k,
            });
        }
        let mut seen = std::collections::HashSet::new();
        for name in &self.names {
            if !seen.insert(name) {
                return Err(RigError::DuplicateName(name.clone()));
            }
        }
        let mut owner = vec![None::<Region>; v];
        for (&region, verts) in &self.region_vertex_sets {
            for &vi in verts {
                if vi >= v {
                    return Err(RigError::VertexOutOfRange {
                        vertex: vi,
                        count: v,
                    });
                }
                if owner[vi].is_some() {
                    return Err(RigError::OverlappingRegions(vi));
                }
                owner[vi] = Some(region);
            }
        }
        for (idx, (&region, name)) in self.regions.iter().zip(&self.names).enumerate() {
            let col = self.deltas.column(idx);
            for vi in 0..v {
                let nonzero = col[3 * vi] != 0.0 || col[3 * vi + 1] != 0.0 || col[3 * vi + 2] != 0.0;
                if nonzero && owner[vi] != Some(region) {
                    return Err(RigError::SupportOutsideRegion {
                        index: idx,
                        name: name.clone(),
                        region,
                        vertex: vi,
                    });
                }
            }
        }
        for (&region, verts) in &self.region_vertex_sets {
            if !verts.is_empty() && !self.regions.contains(&region) {
                return Err(RigError::EmptyRegion(region));
            }
        }
        Ok(())
    }
}

/// `neutral + B w`, the rig evaluated at a weight vector.
pub fn evaluate_rig(rig: &BlendshapeRig, weights: &DVector<f64>) -> Result<TriMesh, RigError> {
    if weights.len() != rig.shape_count() {
        return Err(RigError::WeightLength {
            expected: rig.shape_count(),
            got: weights.len(),
        });
    }
    let stacked = rig.neutral.stacked_vertices() + &rig.deltas * weights;
    Ok(rig.neutral.with_stacked_vertices(&stacked))
}

/// Binary row selector picking the three coordinate rows of each listed
/// vertex from a stacked 3V vector. Rows appear in listed vertex order.
#[derive(Debug, Clone, PartialEq)]
pub struct SelectMatrix {
    pub vertex_indices: Vec<usize>,
    vertex_count: usize,
}

impl SelectMatrix {
    pub fn new(vertex_indices: Vec<usize>, vertex_count: usize) -> Result<Self, RigError> {
        for &vi in &vertex_indices {
            if vi >= vertex_count {
                return Err(RigError::SelectOutOfRange {
                    vertex: vi,
                    count: vertex_count,
                });
            }
        }
        Ok(Self {
            vertex_indices,
            vertex_count,
        })
    }

    pub fn row_count(&self) -> usize {
        3 * self.vertex_indices.len()
    }

    pub fn apply(&self, stacked: &DVector<f64>) -> DVector<f64> {
        assert_eq!(stacked.len(), 3 * self.vertex_count);
        let mut out = DVector::zeros(self.row_count());
        for (r, &vi) in self.vertex_indices.iter().enumerate() {
            out[3 * r] = stacked[3 * vi];
            out[3 * r + 1] = stacked[3 * vi + 1];
            out[3 * r + 2] = stacked[3 * vi + 2];
        }
        out
    }

    /// Selected rows of a 3V x K matrix.
    pub fn apply_to_matrix(&self, m: &DMatrix<f64>) -> DMatrix<f64> {
        assert_eq!(m.nrows(), 3 * self.vertex_count);
        let mut out = DMatrix::zeros(self.row_count(), m.ncols());
        for (r, &vi) in self.vertex_indices.iter().enumerate() {
            for c in 0..m.ncols() {
                out[(3 * r, c)] = m[(3 * vi, c)];
                out[(3 * r + 1, c)] = m[(3 * vi + 1, c)];
                out[(3 * r + 2, c)] = m[(3 * vi + 2, c)];
            }
        }
        out
    }

    /// The explicit 0/1 operator, for tests and documentation.
    pub fn to_dense(&self) -> DMatrix<f64> {
        let mut m = DMatrix::zeros(self.row_count(), 3 * self.vertex_count);
        for (r, &vi) in self.vertex_indices.iter().enumerate() {
            m[(3 * r, 3 * vi)] = 1.0;
            m[(3 * r + 1, 3 * vi + 1)] = 1.0;
            m[(3 * r + 2, 3 * vi + 2)] = 1.0;
        }
        m
    }
}

/// Dense and landmark select matrices. The landmark selector must pick
/// strictly fewer vertices than the dense one.
pub fn build_select_matrices(
    rig: &BlendshapeRig,
    dense_indices: &[usize],
    landmark_indices: &[usize],
) -> Result<(SelectMatrix, SelectMatrix), RigError> {
    if landmark_indices.len() >= dense_indices.len() {
        return Err(RigError::LandmarkNotSmaller {
            landmarks: landmark_indices.len(),
            dense: dense_indices.len(),
        });
    }
    let dense = SelectMatrix::new(dense_indices.to_vec(), rig.vertex_count())?;
    let marks = SelectMatrix::new(landmark_indices.to_vec(), rig.vertex_count())?;
    Ok((dense, marks))
}

/// One region's independent subproblem: its blendshape columns and vertex
/// rows. Blendshape indices across all partitions are disjoint and cover
/// every shape.
#[derive(Debug, Clone)]
pub struct RegionPartition {
    pub region: Region,
    pub blendshape_indices: Vec<usize>,
    pub vertex_indices: Vec<usize>,
}

pub fn partition_regions(rig: &BlendshapeRig) -> Result<Vec<RegionPartition>, RigError> {
    rig.validate()?;
    let mut partitions = Vec::new();
    let mut regions: Vec<Region> = rig.region_vertex_sets.keys().copied().collect();
    for &r in &rig.regions {
        if !regions.contains(&r) {
            regions.push(r);
        }
    }
    for region in regions {
        let blendshape_indices: Vec<usize> = rig
            .regions
            .iter()
            .enumerate()
            .filter(|(_, &r)| r == region)
            .map(|(i, _)| i)
            .collect();
        if blendshape_indices.is_empty() {
            return Err(RigError::EmptyRegion(region));
        }
        partitions.push(RegionPartition {
            region,
            blendshape_indices,
            vertex_indices: rig
                .region_vertex_sets
                .get(&region)
                .cloned()
                .unwrap_or_default(),
        });
    }
    Ok(partitions)
}
