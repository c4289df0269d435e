use nalgebra::{Matrix3, Vector3};

use super::{GeometryError, RigidTransform};

/// Closed-form least-squares rigid alignment (cross-covariance SVD) that maps
/// `source` onto `target`, minimizing Σ‖R·s_i + t − t_i‖². Reflections are
/// excluded by the usual determinant sign correction.
pub fn rigid_align(
    source: &[Vector3<f64>],
    target: &[Vector3<f64>],
) -> Result<RigidTransform, GeometryError> {
    if source.len() != target.len() {
        return Err(GeometryError::PointCountMismatch {
            source: source.len(),
            target: target.len(),
        });
    }
    if source.len() < 3 {
        return Err(GeometryError::TooFewPoints {
            needed: 3,
            got: source.len(),
        });
    }
    let n = source.len() as f64;
    let sc = source.iter().sum::<Vector3<f64>>() / n;
    let tc = target.iter().sum::<Vector3<f64>>() / n;

    let mut cov = Matrix3::zeros();
    for (s, t) in source.iter().zip(target) {
        cov += (t - tc) * (s - sc).transpose();
    }
    let svd = cov.svd(true, true);
    let u = svd.u.expect("svd with u");
    let v_t = svd.v_t.expect("svd with v_t");
    // Collinear sources leave the rotation about the line undetermined.
    let scale = svd.singular_values[0];
    if scale <= 0.0 || svd.singular_values[1] <= 1e-12 * scale {
        return Err(GeometryError::DegenerateConfiguration(
            "points are collinear or coincident".into(),
        ));
    }
    let mut d = Matrix3::identity();
    if (u * v_t).determinant() < 0.0 {
        d[(2, 2)] = -1.0;
    }
    let rotation = u * d * v_t;
    let translation = tc - rotation * sc;
    RigidTransform::new(rotation, translation)
}
