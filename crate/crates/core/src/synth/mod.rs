//! Procedural ground-truth generators: head families, a virtual depth
//! camera, synthetic blendshape rigs and eye models.
//!
//! These stand in for physical capture. Realism is not the point; exact,
//! reproducible ground truth for every downstream solver is.

mod camera;
mod eye_gen;
mod head;
mod regions;
mod rig_gen;

pub use camera::{render_depth_scan, DepthScan, VirtualCamera};
pub use eye_gen::{synth_eye_model, synth_eye_observation, EYE_CENTER_LEFT, EYE_CENTER_RIGHT};
pub use head::{
    head_template, landmark_vertices, make_head_family, synthesize_head, ModeField,
    SynthHeadParams, HEAD_SEMI_AXES,
};
pub use regions::{region_of_direction, unit_direction, REGION_TABLE};
pub use rig_gen::make_rig_from_head;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum SynthError {
    #[error("family size {count} must be at least num_modes + 1 = {min}")]
    FamilyTooSmall { count: usize, min: usize },
    #[error("camera intrinsics invalid: {0}")]
    BadCamera(String),
    #[error("expression coefficient {index} = {value} outside [0, 1]")]
    ExpressionOutOfRange { index: usize, value: f64 },
    #[error("region {0} owns no vertices at this mesh resolution; use a finer template")]
    RegionWithoutVertices(String),
    #[error(transparent)]
    Geometry(#[from] crate::geometry::GeometryError),
    #[error(transparent)]
    Rig(#[from] crate::blendshape::RigError),
}
