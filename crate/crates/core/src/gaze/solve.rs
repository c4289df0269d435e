use nalgebra::Matrix3x4;

use super::energy::{eye_energy, EyeEnergy};
use super::model::{EyeModel, EyeObservation, EyeRotation, GIMBAL_LIMIT};
use super::GazeError;

#[derive(Debug, Clone, Copy)]
pub struct GazeParams {
    pub alpha_dis: f64,
    pub alpha_smooth: f64,
    /// Coarse seeding lattice spacing, radians.
    pub grid_step: f64,
    /// Nelder-Mead termination: simplex diameter in radians.
    pub refine_tol: f64,
}

impl Default for GazeParams {
    fn default() -> Self {
        Self {
            alpha_dis: 1.0,
            alpha_smooth: 0.5,
            grid_step: 5f64.to_radians(),
            refine_tol: 1e-4,
        }
    }
}

/// Minimizes the gaze energy over (yaw, pitch): a coarse lattice over the
/// gimbal box picks the basin, Nelder-Mead refines it. The overlap term is
/// piecewise-smooth under polygon clipping, so a derivative-free refiner is
/// used on purpose. The result never scores worse than the best lattice seed.
pub fn solve_gaze(
    p_matrix: &Matrix3x4<f64>,
    eye: &EyeModel,
    obs: &EyeObservation,
    prev: &EyeRotation,
    prev2: &EyeRotation,
    params: &GazeParams,
) -> Result<(EyeRotation, EyeEnergy), GazeError> {
    eye.validate()?;
    obs.validate()?;

    let energy_at = |yaw: f64, pitch: f64| -> Option<(EyeRotation, EyeEnergy)> {
        let rot = EyeRotation::clamped(yaw, pitch);
        eye_energy(
            p_matrix, eye, &rot, obs, prev, prev2, params.alpha_dis, params.alpha_smooth,
        )
        .ok()
        .map(|e| (rot, e))
    };

    // Coarse lattice over the gimbal box.
    let mut best: Option<(EyeRotation, EyeEnergy)> = None;
    let steps = (2.0 * GIMBAL_LIMIT / params.grid_step).ceil() as i64;
    for i in 0..=steps {
        for j in 0..=steps {
            let yaw = -GIMBAL_LIMIT + 2.0 * GIMBAL_LIMIT * i as f64 / steps as f64;
            let pitch = -GIMBAL_LIMIT + 2.0 * GIMBAL_LIMIT * j as f64 / steps as f64;
            if let Some((rot, e)) = energy_at(yaw, pitch) {
                if best.as_ref().map_or(true, |(_, b)| e.total < b.total) {
                    best = Some((rot, e));
                }
            }
        }
    }
    let (seed, seed_energy) = best.ok_or(GazeError::NoFeasibleSeed)?;

    // Nelder-Mead on f(yaw, pitch); out-of-box evaluations are clamped plus
    // penalized so the simplex stays near the box. Infeasible points are +inf.
    let mut track_best = (seed, seed_energy);
    let mut f = |yaw: f64, pitch: f64| -> f64 {
        let cy = yaw.clamp(-GIMBAL_LIMIT, GIMBAL_LIMIT);
        let cp = pitch.clamp(-GIMBAL_LIMIT, GIMBAL_LIMIT);
        let penalty = 1e3 * ((yaw - cy).powi(2) + (pitch - cp).powi(2));
        match energy_at(cy, cp) {
            Some((rot, e)) => {
                if e.total < track_best.1.total {
                    track_best = (rot, e);
                }
                e.total + penalty
            }
            None => f64::INFINITY,
        }
    };

    let h = params.grid_step / 2.0;
    let mut simplex = [
        [seed.yaw, seed.pitch],
        [seed.yaw + h, seed.pitch],
        [seed.yaw, seed.pitch + h],
    ];
    let mut values = simplex.map(|[y, p]| f(y, p));
    for _ in 0..200 {
        // Order: best, middle, worst.
        let mut order = [0usize, 1, 2];
        order.sort_by(|&a, &b| values[a].partial_cmp(&values[b]).unwrap());
        simplex = [simplex[order[0]], simplex[order[1]], simplex[order[2]]];
        values = [values[order[0]], values[order[1]], values[order[2]]];

        let spread = simplex
            .iter()
            .skip(1)
            .map(|v| {
                ((v[0] - simplex[0][0]).powi(2) + (v[1] - simplex[0][1]).powi(2)).sqrt()
            })
            .fold(0.0, f64::max);
        if spread < params.refine_tol {
            break;
        }

        let centroid = [
            (simplex[0][0] + simplex[1][0]) / 2.0,
            (simplex[0][1] + simplex[1][1]) / 2.0,
        ];
        let reflect = [
            centroid[0] + (centroid[0] - simplex[2][0]),
            centroid[1] + (centroid[1] - simplex[2][1]),
        ];
        let fr = f(reflect[0], reflect[1]);
        if fr < values[0] {
            let expand = [
                centroid[0] + 2.0 * (centroid[0] - simplex[2][0]),
                centroid[1] + 2.0 * (centroid[1] - simplex[2][1]),
            ];
            let fe = f(expand[0], expand[1]);
            if fe < fr {
                simplex[2] = expand;
                values[2] = fe;
            } else {
                simplex[2] = reflect;
                values[2] = fr;
            }
        } else if fr < values[1] {
            simplex[2] = reflect;
            values[2] = fr;
        } else {
            let contract = [
                centroid[0] + 0.5 * (simplex[2][0] - centroid[0]),
                centroid[1] + 0.5 * (simplex[2][1] - centroid[1]),
            ];
            let fc = f(contract[0], contract[1]);
            if fc < values[2] {
                simplex[2] = contract;
                values[2] = fc;
            } else {
                // Shrink toward the best vertex.
                for k in 1..3 {
                    simplex[k] = [
                        simplex[0][0] + 0.5 * (simplex[k][0] - simplex[0][0]),
                        simplex[0][1] + 0.5 * (simplex[k][1] - simplex[0][1]),
                    ];
                    values[k] = f(simplex[k][0], simplex[k][1]);
                }
            }
        }
    }

    Ok(track_best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::synth::{synth_eye_model, synth_eye_observation, EYE_CENTER_LEFT};
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn setup() -> (Matrix3x4<f64>, EyeModel) {
        let p = crate::synth::VirtualCamera::default_desk(0.0).projection_matrix();
        (p, synth_eye_model(EYE_CENTER_LEFT))
    }

    #[test]
    fn recovers_known_rotation_without_noise() {
        let (p, eye) = setup();
        let rest = EyeRotation::rest();
        let mut rng = ChaCha8Rng::seed_from_u64(20);
        for _ in 0..5 {
            let truth = EyeRotation::new(
                rng.gen_range(-0.6..0.6),
                rng.gen_range(-0.6..0.6),
            )
            .unwrap();
            let obs = synth_eye_observation(&p, &eye, &truth).unwrap();
            let (sol, _) = solve_gaze(&p, &eye, &obs, &rest, &rest, &GazeParams::default()).unwrap();
            let tol = 0.2f64.to_radians();
            assert!(
                (sol.yaw - truth.yaw).abs() < tol,
                "yaw {} vs {}",
                sol.yaw,
                truth.yaw
            );
            assert!(
                (sol.pitch - truth.pitch).abs() < tol,
                "pitch {} vs {}",
                sol.pitch,
                truth.pitch
            );
        }
    }

    #[test]
    fn rest_observation_returns_rest() {
        let (p, eye) = setup();
        let rest = EyeRotation::rest();
        let obs = synth_eye_observation(&p, &eye, &rest).unwrap();
        let (sol, _) = solve_gaze(&p, &eye, &obs, &rest, &rest, &GazeParams::default()).unwrap();
        assert!(sol.yaw.abs() < 1e-3 && sol.pitch.abs() < 1e-3);
    }

    #[test]
    fn huge_smoothing_pins_the_solution_to_history() {
        let (p, eye) = setup();
        let hist = EyeRotation::new(0.3, -0.2).unwrap();
        let obs = synth_eye_observation(&p, &eye, &EyeRotation::new(-0.4, 0.5).unwrap()).unwrap();
        let params = GazeParams {
            alpha_smooth: 1e6,
            ..GazeParams::default()
        };
        let (sol, _) = solve_gaze(&p, &eye, &obs, &hist, &hist, &params).unwrap();
        assert!((sol.yaw - hist.yaw).abs() < 1e-3, "yaw {}", sol.yaw);
        assert!((sol.pitch - hist.pitch).abs() < 1e-3, "pitch {}", sol.pitch);
    }

    #[test]
    fn solution_beats_every_grid_seed() {
        let (p, eye) = setup();
        let rest = EyeRotation::rest();
        let truth = EyeRotation::new(0.25, 0.35).unwrap();
        let obs = synth_eye_observation(&p, &eye, &truth).unwrap();
        let params = GazeParams::default();
        let (_, e) = solve_gaze(&p, &eye, &obs, &rest, &rest, &params).unwrap();
        let steps = (2.0 * GIMBAL_LIMIT / params.grid_step).ceil() as i64;
        for i in 0..=steps {
            for j in 0..=steps {
                let yaw = -GIMBAL_LIMIT + 2.0 * GIMBAL_LIMIT * i as f64 / steps as f64;
                let pitch = -GIMBAL_LIMIT + 2.0 * GIMBAL_LIMIT * j as f64 / steps as f64;
                if let Ok(seed_e) = eye_energy(
                    &p,
                    &eye,
                    &EyeRotation::clamped(yaw, pitch),
                    &obs,
                    &rest,
                    &rest,
                    params.alpha_dis,
                    params.alpha_smooth,
                ) {
                    assert!(e.total <= seed_e.total + 1e-12);
                }
            }
        }
    }
}
