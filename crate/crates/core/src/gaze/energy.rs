use nalgebra::{Matrix3x4, Vector2, Vector4};

use super::model::{drot_x, drot_y, rot_x, rot_y, EyeModel, EyeObservation, EyeRotation};
use super::polygon::{clip_convex, polygon_area};
use super::{project, GazeError};

/// S_overlap / S_pupil: the intersection area of the projected model pupil
/// and the detected pupil polygon, normalized by the projected model pupil
/// area (so perfect alignment scores exactly 1).
pub fn overlap_ratio(
    p_matrix: &Matrix3x4<f64>,
    eye: &EyeModel,
    rot: &EyeRotation,
    obs: &EyeObservation,
) -> Result<f64, GazeError> {
    let projected: Result<Vec<Vector2<f64>>, GazeError> = eye
        .pupil_contour_rest
        .iter()
        .map(|p| project(p_matrix, &rot.apply(eye, p)))
        .collect();
    let projected = projected?;
    let s_pupil = polygon_area(&projected);
    if s_pupil < 1e-9 {
        return Err(GazeError::DegeneratePolygon(s_pupil));
    }
    let s_overlap = polygon_area(&clip_convex(&projected, &obs.pupil_polygon_2d));
    Ok((s_overlap / s_pupil).clamp(0.0, 1.0))
}

/// Energy breakdown for one rotation hypothesis.
#[derive(Debug, Clone, Copy)]
pub struct EyeEnergy {
    /// Iris-center reprojection plus weighted overlap deficit.
    pub dis: f64,
    /// Second-difference smoothness on (yaw, pitch).
    pub smooth: f64,
    pub total: f64,
    pub overlap: f64,
}

/// dis = ||project(R c_rest) - c_2d||^2 + alpha_dis (1 - overlap)^2,
/// smooth = ||r - 2 r_prev + r_prev2||^2, total = dis + alpha_smooth * smooth.
#[allow(clippy::too_many_arguments)]
pub fn eye_energy(
    p_matrix: &Matrix3x4<f64>,
    eye: &EyeModel,
    rot: &EyeRotation,
    obs: &EyeObservation,
    prev: &EyeRotation,
    prev2: &EyeRotation,
    alpha_dis: f64,
    alpha_smooth: f64,
) -> Result<EyeEnergy, GazeError> {
    let projected_center = project(p_matrix, &rot.apply(eye, &eye.iris_center_rest))?;
    let center_term = (projected_center - obs.iris_center_2d).norm_squared();
    let overlap = overlap_ratio(p_matrix, eye, rot, obs)?;
    let dis = center_term + alpha_dis * (1.0 - overlap).powi(2);
    let dy = rot.yaw - 2.0 * prev.yaw + prev2.yaw;
    let dp = rot.pitch - 2.0 * prev.pitch + prev2.pitch;
    let smooth = dy * dy + dp * dp;
    Ok(EyeEnergy {
        dis,
        smooth,
        total: dis + alpha_smooth * smooth,
        overlap,
    })
}

/// Analytic gradient of the smooth part of the dis term,
/// ||project(P, R(c_rest - center) + center) - c_2d||^2, with respect to
/// (yaw, pitch). The overlap term is piecewise-smooth and excluded.
pub fn center_dis_gradient(
    p_matrix: &Matrix3x4<f64>,
    eye: &EyeModel,
    rot: &EyeRotation,
    obs: &EyeObservation,
) -> Result<[f64; 2], GazeError> {
    let r0 = eye.iris_center_rest - eye.center;
    let ry = rot_y(rot.yaw);
    let rx = rot_x(rot.pitch);
    let c = eye.center + ry * rx * r0;
    let q = p_matrix * Vector4::new(c.x, c.y, c.z, 1.0);
    if q.z.abs() < 1e-12 {
        return Err(GazeError::BehindCamera(q.z));
    }
    let uv = Vector2::new(q.x / q.z, q.y / q.z);
    let resid = uv - obs.iris_center_2d;
    let a = p_matrix.fixed_view::<3, 3>(0, 0);

    let dc_dyaw = drot_y(rot.yaw) * rx * r0;
    let dc_dpitch = ry * drot_x(rot.pitch) * r0;
    let mut grad = [0.0f64; 2];
    for (slot, dc) in [dc_dyaw, dc_dpitch].iter().enumerate() {
        let dq = a * dc;
        let du = Vector2::new(
            dq.x / q.z - q.x * dq.z / (q.z * q.z),
            dq.y / q.z - q.y * dq.z / (q.z * q.z),
        );
        grad[slot] = 2.0 * resid.dot(&du);
    }
    Ok(grad)
}
