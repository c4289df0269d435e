//! Fixed face-region table. Each of the 51 blendshape names belongs to
//! exactly one region; each template vertex belongs to at most one. The
//! per-frame weight solve runs independently per region.

use nalgebra::Vector3;

use crate::blendshape::Region;

use super::head::HEAD_SEMI_AXES;

/// Region center directions (unit-sphere coordinates of the template) and
/// angular radii in radians. Centers are chosen so the nearest-center
/// assignment keeps the nine vertex sets disjoint and non-empty at desk-scale
/// template resolutions.
pub const REGION_TABLE: [(Region, [f64; 3], f64); 9] = [
    (Region::BrowLeft, [0.32, 0.50, 0.80], 0.20),
    (Region::BrowRight, [-0.32, 0.50, 0.80], 0.20),
    (Region::EyeLeft, [0.35, 0.25, 0.90], 0.18),
    (Region::EyeRight, [-0.35, 0.25, 0.90], 0.18),
    (Region::Nose, [0.0, 0.0, 1.0], 0.17),
    (Region::Mouth, [0.0, -0.42, 0.88], 0.24),
    (Region::Jaw, [0.0, -0.78, 0.60], 0.30),
    (Region::CheekLeft, [0.62, -0.15, 0.75], 0.18),
    (Region::CheekRight, [-0.62, -0.15, 0.75], 0.18),
];

/// Unit-sphere direction of a template-space position: undo the ellipsoid
/// scaling, then normalize. Region membership is defined on these directions
/// so it is stable under the family's small identity deformations.
pub fn unit_direction(p: &Vector3<f64>) -> Vector3<f64> {
    let [ax, ay, az] = HEAD_SEMI_AXES;
    Vector3::new(p.x / ax, p.y / ay, p.z / az).normalize()
}

/// The region owning this direction: nearest region center, provided the
/// angle to it is within that region's radius. Returns `None` for scalp and
/// back-of-head directions.
pub fn region_of_direction(dir: &Vector3<f64>) -> Option<Region> {
    let mut best: Option<(Region, f64)> = None;
    for (region, center, radius) in REGION_TABLE {
        let c = Vector3::new(center[0], center[1], center[2]).normalize();
        let angle = dir.dot(&c).clamp(-1.0, 1.0).acos();
        if angle <= radius {
            match best {
                Some((_, a)) if a <= angle => {}
                _ => best = Some((region, angle)),
            }
        }
    }
    best.map(|(r, _)| r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::synth::head_template;

    #[test]
    fn every_region_owns_vertices_at_rig_resolution() {
        let mesh = head_template(47, 64);
        let mut counts = std::collections::BTreeMap::new();
        for p in &mesh.vertices {
            if let Some(r) = region_of_direction(&unit_direction(p)) {
                *counts.entry(r).or_insert(0usize) += 1;
            }
        }
        for (region, _, _) in REGION_TABLE {
            assert!(
                counts.get(&region).copied().unwrap_or(0) >= 4,
                "{region:?} owns too few vertices: {:?}",
                counts.get(&region)
            );
        }
    }

    #[test]
    fn assignment_is_disjoint_by_construction() {
        // nearest-center with radius gate: a direction maps to at most one
        // region, so the sets are disjoint. Sanity-check determinism instead.
        let d = Vector3::new(0.1, -0.4, 0.9).normalize();
        assert_eq!(region_of_direction(&d), region_of_direction(&d));
    }

    #[test]
    fn back_of_head_is_unassigned() {
        assert_eq!(region_of_direction(&Vector3::new(0.0, 0.0, -1.0)), None);
        assert_eq!(region_of_direction(&Vector3::new(0.0, 1.0, 0.0)), None);
    }
}
