//! Eyeball rotation from a projected iris center and pupil-contour overlap.
//!
//! The rotation is parametrized as yaw-pitch about the eyeball center (2
//! degrees of freedom; a 2D pupil observation cannot constrain torsion). The
//! energy combines the iris-center reprojection distance, the pupil
//! contour overlap ratio and a second-difference temporal smoother, and is
//! minimized by a coarse grid seed plus Nelder-Mead refinement.

mod energy;
mod model;
mod polygon;
mod solve;

pub use energy::{center_dis_gradient, eye_energy, overlap_ratio, EyeEnergy};
pub use model::{project, EyeModel, EyeObservation, EyeRotation, GIMBAL_LIMIT};
pub use polygon::{clip_convex, is_convex, polygon_area, signed_area};
pub use solve::{solve_gaze, GazeParams};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum GazeError {
    #[error("point projects with homogeneous w = {0}, too close to the camera plane")]
    BehindCamera(f64),
    #[error("projected pupil polygon is degenerate (area {0} px^2)")]
    DegeneratePolygon(f64),
    #[error("pupil polygon must be convex and simple with at least 3 vertices")]
    NotConvex,
    #[error("pupil contour point {index} is {distance} mm from the eye center, expected {radius}")]
    ContourOffSphere {
        index: usize,
        distance: f64,
        radius: f64,
    },
    #[error("pupil contour needs at least 8 points, got {0}")]
    ContourTooSmall(usize),
    #[error("rotation ({yaw}, {pitch}) outside the gimbal box +/-{limit} rad")]
    OutsideGimbal { yaw: f64, pitch: f64, limit: f64 },
    #[error("no feasible grid seed: the contour projects behind the camera everywhere")]
    NoFeasibleSeed,
}
