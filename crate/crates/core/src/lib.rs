//! Desk-scale facial capture math stack.
//!
//! The crate covers the full offline-to-online path of a consumer depth
//! camera capture rig:
//!
//! - [`geometry`]: meshes, clouds, rigid alignment, correspondence search, I/O
//! - [`synth`]: procedural ground-truth heads and a virtual depth camera,
//!   replacing physical capture so every solver has known-answer inputs
//! - [`morphable`]: PCA head model construction and identity fitting
//! - [`nicp`]: ARAP-regularized non-rigid ICP registration
//! - [`blendshape`]: per-frame blendshape weight solving with region
//!   partitioning and temporal smoothing
//! - [`filter`]: residual feed-forward weights filter plus its trainer
//! - [`gaze`]: eyeball rotation from iris center and pupil-contour overlap
//! - [`pipeline`]: configuration, offline rig building, the realtime loop,
//!   and report aggregation

pub mod blendshape;
pub mod filter;
pub mod gaze;
pub mod geometry;
pub mod morphable;
pub mod nicp;
pub mod pipeline;
pub mod synth;
