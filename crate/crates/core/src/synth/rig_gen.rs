use std::collections::BTreeMap;

use nalgebra::{DMatrix, Vector3};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;

use crate::blendshape::{arkit_region_table, BlendshapeRig, Region, ARKIT_NAMES};
use crate::geometry::TriMesh;

use super::regions::{region_of_direction, unit_direction};
use super::SynthError;

/// Builds a 51-shape ARKit-named rig for a head. Each delta is a smooth
/// displacement bump centered on a seeded vertex of its region and is
/// exactly zero outside that region's vertex set, so the region-partitioned
/// solve is exact.
pub fn make_rig_from_head(head: &TriMesh, seed: u64) -> Result<BlendshapeRig, SynthError> {
    let v = head.vertex_count();
    let mut region_vertex_sets: BTreeMap<Region, Vec<usize>> = BTreeMap::new();
    let mut directions = Vec::with_capacity(v);
    for (i, p) in head.vertices.iter().enumerate() {
        let dir = unit_direction(p);
        directions.push(dir);
        if let Some(r) = region_of_direction(&dir) {
            region_vertex_sets.entry(r).or_default().push(i);
        }
    }

    let regions = arkit_region_table();
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let mut deltas = DMatrix::zeros(3 * v, ARKIT_NAMES.len());
    for (k, &region) in regions.iter().enumerate() {
        let members = region_vertex_sets
            .get(&region)
            .filter(|m| !m.is_empty())
            .ok_or_else(|| SynthError::RegionWithoutVertices(format!("{region:?}")))?;
        let center = directions[members[rng.gen_range(0..members.len())]];
        let radius: f64 = rng.gen_range(0.10..0.25);
        let amplitude: f64 = rng.gen_range(1.5..4.0);
        let push = Vector3::new(
            rng.gen_range(-1.0..1.0),
            rng.gen_range(-1.0..1.0),
            rng.gen_range(-1.0..1.0f64),
        )
        .normalize();
        for &vi in members {
            let angle = directions[vi].dot(&center).clamp(-1.0, 1.0).acos();
            if angle < radius {
                let falloff = (std::f64::consts::FRAC_PI_2 * angle / radius).cos().powi(2);
                let d = push * (amplitude * falloff);
                deltas[(3 * vi, k)] = d.x;
                deltas[(3 * vi + 1, k)] = d.y;
                deltas[(3 * vi + 2, k)] = d.z;
            }
        }
    }

    let rig = BlendshapeRig {
        neutral: head.clone(),
        deltas,
        names: ARKIT_NAMES.iter().map(|s| s.to_string()).collect(),
        regions,
        region_vertex_sets,
    };
    rig.validate()?;
    Ok(rig)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::blendshape::evaluate_rig;
    use crate::synth::head_template;
    use nalgebra::DVector;

    #[test]
    fn deltas_vanish_outside_their_region() {
        let head = head_template(24, 32);
        let rig = make_rig_from_head(&head, 5).unwrap();
        for (k, &region) in rig.regions.iter().enumerate() {
            let members = &rig.region_vertex_sets[&region];
            let col = rig.deltas.column(k);
            for vi in 0..rig.vertex_count() {
                if !members.contains(&vi) {
                    assert_eq!(col[3 * vi], 0.0);
                    assert_eq!(col[3 * vi + 1], 0.0);
                    assert_eq!(col[3 * vi + 2], 0.0);
                }
            }
            assert!(col.amax() > 0.0, "delta {k} is identically zero");
        }
    }

    #[test]
    fn zero_weights_evaluate_to_neutral() {
        let head = head_template(24, 32);
        let rig = make_rig_from_head(&head, 5).unwrap();
        let mesh = evaluate_rig(&rig, &DVector::zeros(rig.shape_count())).unwrap();
        assert_eq!(mesh.vertices, head.vertices);
    }

    #[test]
    fn seeds_change_deltas_but_not_names_or_regions() {
        let head = head_template(24, 32);
        let a = make_rig_from_head(&head, 1).unwrap();
        let b = make_rig_from_head(&head, 2).unwrap();
        assert_eq!(a.names, b.names);
        assert_eq!(a.regions, b.regions);
        assert_eq!(a.region_vertex_sets, b.region_vertex_sets);
        assert_ne!(a.deltas, b.deltas);
        let a2 = make_rig_from_head(&head, 1).unwrap();
        assert_eq!(a.deltas, a2.deltas);
    }
}
