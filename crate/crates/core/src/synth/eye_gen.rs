use nalgebra::{Matrix3x4, Vector3};

use crate::gaze::{project, EyeModel, EyeObservation, EyeRotation, GazeError};

/// Eyeball pivot positions in head coordinates, mm, sitting behind the eye
/// regions of the template.
pub const EYE_CENTER_LEFT: [f64; 3] = [20.5, 21.0, 61.0];
pub const EYE_CENTER_RIGHT: [f64; 3] = [-20.5, 21.0, 61.0];

const EYE_RADIUS: f64 = 12.0;
const PUPIL_RADIUS: f64 = 3.5;
const CONTOUR_POINTS: usize = 16;

/// A 12 mm eyeball looking toward +z at rest, with a 16-point pupil ring of
/// radius 3.5 mm on the sphere surface.
pub fn synth_eye_model(center: [f64; 3]) -> EyeModel {
    let center = Vector3::new(center[0], center[1], center[2]);
    let beta = (PUPIL_RADIUS / EYE_RADIUS).asin();
    let ring_z = EYE_RADIUS * beta.cos();
    let ring_r = EYE_RADIUS * beta.sin();
    let pupil_contour_rest = (0..CONTOUR_POINTS)
        .map(|i| {
            let phi = std::f64::consts::TAU * i as f64 / CONTOUR_POINTS as f64;
            center + Vector3::new(ring_r * phi.cos(), ring_r * phi.sin(), ring_z)
        })
        .collect();
    EyeModel {
        center,
        iris_center_rest: center + Vector3::new(0.0, 0.0, EYE_RADIUS),
        pupil_contour_rest,
        radius: EYE_RADIUS,
    }
}

/// Noiseless observation of the eye under a known rotation: the projected
/// iris center and the projected pupil ring.
pub fn synth_eye_observation(
    p_matrix: &Matrix3x4<f64>,
    eye: &EyeModel,
    rot: &EyeRotation,
) -> Result<EyeObservation, GazeError> {
    let iris_center_2d = project(p_matrix, &rot.apply(eye, &eye.iris_center_rest))?;
    let pupil_polygon_2d = eye
        .pupil_contour_rest
        .iter()
        .map(|p| project(p_matrix, &rot.apply(eye, p)))
        .collect::<Result<Vec<_>, _>>()?;
    let obs = EyeObservation {
        iris_center_2d,
        pupil_polygon_2d,
    };
    obs.validate()?;
    Ok(obs)
}
