use nalgebra::{Matrix3, Matrix3x4, Vector2, Vector3, Vector4};
use serde::{Deserialize, Serialize};

use super::polygon::is_convex;
use super::GazeError;

/// Anatomical gimbal box: |yaw| and |pitch| stay within 0.9 rad.
pub const GIMBAL_LIMIT: f64 = 0.9;

/// Rigid eyeball model in head coordinates (mm). The pupil contour is an
/// ordered convex ring on the eyeball sphere.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EyeModel {
    /// Rotation pivot.
    pub center: Vector3<f64>,
    /// Iris center at rest, on the sphere surface.
    pub iris_center_rest: Vector3<f64>,
    pub pupil_contour_rest: Vec<Vector3<f64>>,
    pub radius: f64,
}

impl EyeModel {
    pub fn validate(&self) -> Result<(), GazeError> {
        if self.pupil_contour_rest.len() < 8 {
            return Err(GazeError::ContourTooSmall(self.pupil_contour_rest.len()));
        }
        for (index, p) in self.pupil_contour_rest.iter().enumerate() {
            let distance = (p - self.center).norm();
            if (distance - self.radius).abs() > 1e-6 {
                return Err(GazeError::ContourOffSphere {
                    index,
                    distance,
                    radius: self.radius,
                });
            }
        }
        Ok(())
    }
}

/// Detected iris center and pupil polygon in pixel coordinates. Detection
/// itself is out of scope; observations arrive ready-made.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EyeObservation {
    pub iris_center_2d: Vector2<f64>,
    pub pupil_polygon_2d: Vec<Vector2<f64>>,
}

impl EyeObservation {
    pub fn validate(&self) -> Result<(), GazeError> {
        if self.pupil_polygon_2d.len() < 3 || !is_convex(&self.pupil_polygon_2d) {
            return Err(GazeError::NotConvex);
        }
        Ok(())
    }
}

/// Yaw-pitch eyeball rotation, radians, about the eye center.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EyeRotation {
    pub yaw: f64,
    pub pitch: f64,
}

impl EyeRotation {
    pub fn new(yaw: f64, pitch: f64) -> Result<Self, GazeError> {
        if yaw.abs() > GIMBAL_LIMIT || pitch.abs() > GIMBAL_LIMIT {
            return Err(GazeError::OutsideGimbal {
                yaw,
                pitch,
                limit: GIMBAL_LIMIT,
            });
        }
        Ok(Self { yaw, pitch })
    }

    pub fn rest() -> Self {
        Self {
            yaw: 0.0,
            pitch: 0.0,
        }
    }

    pub fn clamped(yaw: f64, pitch: f64) -> Self {
        Self {
            yaw: yaw.clamp(-GIMBAL_LIMIT, GIMBAL_LIMIT),
            pitch: pitch.clamp(-GIMBAL_LIMIT, GIMBAL_LIMIT),
        }
    }

    /// R = R_y(yaw) * R_x(pitch).
    pub fn matrix(&self) -> Matrix3<f64> {
        rot_y(self.yaw) * rot_x(self.pitch)
    }

    /// Rotates a model point about the eye center.
    pub fn apply(&self, eye: &EyeModel, p: &Vector3<f64>) -> Vector3<f64> {
        eye.center + self.matrix() * (p - eye.center)
    }
}

pub(crate) fn rot_x(a: f64) -> Matrix3<f64> {
    let (s, c) = a.sin_cos();
    Matrix3::new(1.0, 0.0, 0.0, 0.0, c, -s, 0.0, s, c)
}

pub(crate) fn rot_y(a: f64) -> Matrix3<f64> {
    let (s, c) = a.sin_cos();
    Matrix3::new(c, 0.0, s, 0.0, 1.0, 0.0, -s, 0.0, c)
}

pub(crate) fn drot_x(a: f64) -> Matrix3<f64> {
    let (s, c) = a.sin_cos();
    Matrix3::new(0.0, 0.0, 0.0, 0.0, -s, -c, 0.0, c, -s)
}

pub(crate) fn drot_y(a: f64) -> Matrix3<f64> {
    let (s, c) = a.sin_cos();
    Matrix3::new(-s, 0.0, c, 0.0, 0.0, 0.0, -c, 0.0, -s)
}

/// Perspective projection of a 3D point by a 3x4 matrix, with the usual
/// homogeneous division.
pub fn project(p_matrix: &Matrix3x4<f64>, point: &Vector3<f64>) -> Result<Vector2<f64>, GazeError> {
    let q = p_matrix * Vector4::new(point.x, point.y, point.z, 1.0);
    if q.z.abs() < 1e-12 {
        return Err(GazeError::BehindCamera(q.z));
    }
    Ok(Vector2::new(q.x / q.z, q.y / q.z))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn pinhole(fx: f64, fy: f64, cx: f64, cy: f64) -> Matrix3x4<f64> {
        let mut p = Matrix3x4::zeros();
        p[(0, 0)] = fx;
        p[(1, 1)] = fy;
        p[(0, 2)] = cx;
        p[(1, 2)] = cy;
        p[(2, 2)] = 1.0;
        p
    }

    #[test]
    fn on_axis_point_lands_on_principal_point() {
        let p = pinhole(1.0, 1.0, 320.0, 240.0);
        let uv = project(&p, &Vector3::new(0.0, 0.0, 1.0)).unwrap();
        assert_relative_eq!(uv, Vector2::new(320.0, 240.0), epsilon = 1e-12);
    }

    #[test]
    fn doubling_depth_halves_the_offset() {
        let p = pinhole(500.0, 500.0, 0.0, 0.0);
        let near = project(&p, &Vector3::new(10.0, -4.0, 100.0)).unwrap();
        let far = project(&p, &Vector3::new(10.0, -4.0, 200.0)).unwrap();
        assert_relative_eq!(far, near / 2.0, epsilon = 1e-12);
    }

    #[test]
    fn backprojection_round_trip() {
        let (fx, fy, cx, cy) = (525.0, 525.0, 319.5, 239.5);
        let p = pinhole(fx, fy, cx, cy);
        let uv = Vector2::new(123.25, 401.75);
        let depth = 537.0;
        let point = Vector3::new(
            (uv.x - cx) / fx * depth,
            (uv.y - cy) / fy * depth,
            depth,
        );
        assert_relative_eq!(project(&p, &point).unwrap(), uv, epsilon = 1e-9);
    }

    #[test]
    fn zero_w_is_an_error() {
        let p = pinhole(1.0, 1.0, 0.0, 0.0);
        assert!(matches!(
            project(&p, &Vector3::new(1.0, 1.0, 0.0)),
            Err(GazeError::BehindCamera(_))
        ));
    }

    #[test]
    fn rotation_matrices_are_orthonormal() {
        let r = EyeRotation::new(0.4, -0.3).unwrap().matrix();
        assert_relative_eq!(
            r * r.transpose(),
            Matrix3::identity(),
            epsilon = 1e-12
        );
        assert_relative_eq!(r.determinant(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn gimbal_box_is_enforced() {
        assert!(EyeRotation::new(1.0, 0.0).is_err());
        let c = EyeRotation::clamped(2.0, -3.0);
        assert_eq!(c.yaw, GIMBAL_LIMIT);
        assert_eq!(c.pitch, -GIMBAL_LIMIT);
    }

    #[test]
    fn derivative_matrices_match_finite_differences() {
        let h = 1e-6;
        for a in [-0.5, 0.0, 0.3, 0.8] {
            let fd_x = (rot_x(a + h) - rot_x(a - h)) / (2.0 * h);
            assert_relative_eq!(drot_x(a), fd_x, epsilon = 1e-9);
            let fd_y = (rot_y(a + h) - rot_y(a - h)) / (2.0 * h);
            assert_relative_eq!(drot_y(a), fd_y, epsilon = 1e-9);
        }
    }
}
