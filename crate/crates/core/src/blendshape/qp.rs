//! Dense box-constrained quadratic programming for the per-region weight
//! solve: minimize 1/2 w' H w + c' w subject to 0 <= w <= 1, with H symmetric
//! positive definite. Projected Newton over the free set is exact at K <= 51.

use nalgebra::{DMatrix, DVector};

#[derive(Debug, Clone)]
pub struct BoxQpSolution {
    pub weights: DVector<f64>,
    /// Gradient H w + c at the solution.
    pub gradient: DVector<f64>,
    pub iterations: usize,
    /// Largest KKT violation: |g_i| on the free set, max(0, -g_i) at the
    /// lower bound, max(0, g_i) at the upper bound.
    pub kkt_residual: f64,
}

const KKT_TOL: f64 = 1e-9;
const MAX_ITERS: usize = 200;

fn kkt_residual(w: &DVector<f64>, g: &DVector<f64>) -> f64 {
    let mut worst = 0.0f64;
    for i in 0..w.len() {
        let v = if w[i] <= 0.0 {
            (-g[i]).max(0.0)
        } else if w[i] >= 1.0 {
            g[i].max(0.0)
        } else {
            g[i].abs()
        };
        worst = worst.max(v);
    }
    worst
}

/// Solves the box QP. `H` must be symmetric positive definite; a vanishing
/// ridge is added to the free-set subsystem only, so reported gradients and
/// energies always refer to the caller's exact objective.
pub fn solve_box_qp(h: &DMatrix<f64>, c: &DVector<f64>) -> BoxQpSolution {
    let n = c.len();
    assert_eq!(h.nrows(), n);
    assert_eq!(h.ncols(), n);
    let mut w = DVector::from_element(n, 0.5);
    let mut g = h * &w + c;
    let objective = |w: &DVector<f64>, g: &DVector<f64>| 0.5 * (g + c).dot(w);

    let mut iterations = 0;
    for iter in 0..MAX_ITERS {
        iterations = iter + 1;
        // Free set: coordinates not pinned at a bound by their gradient sign.
        let free: Vec<usize> = (0..n)
            .filter(|&i| {
                !((w[i] <= 0.0 && g[i] > 0.0) || (w[i] >= 1.0 && g[i] < 0.0))
            })
            .collect();
        if free.is_empty() {
            break;
        }
        let m = free.len();
        let mut h_ff = DMatrix::zeros(m, m);
        let mut g_f = DVector::zeros(m);
        for (a, &i) in free.iter().enumerate() {
            g_f[a] = g[i];
            for (b, &j) in free.iter().enumerate() {
                h_ff[(a, b)] = h[(i, j)];
            }
        }
        // Newton step on the free coordinates.
        let ridge = 1e-12 * (h_ff.diagonal().amax()).max(1.0);
        for a in 0..m {
            h_ff[(a, a)] += ridge;
        }
        let chol = h_ff
            .clone()
            .cholesky()
            .expect("free-set Hessian is positive definite up to the ridge");
        let d_f = chol.solve(&(-&g_f));

        // Longest step inside the box along the Newton direction; the
        // objective is a convex parabola minimized at t = 1, so any clipped
        // t in (0, 1] still decreases it.
        let mut t = 1.0f64;
        for (a, &i) in free.iter().enumerate() {
            if d_f[a] > 0.0 {
                t = t.min((1.0 - w[i]) / d_f[a]);
            } else if d_f[a] < 0.0 {
                t = t.min((0.0 - w[i]) / d_f[a]);
            }
        }
        t = t.clamp(0.0, 1.0);
        if t <= 0.0 {
            break;
        }
        let before = objective(&w, &g);
        for (a, &i) in free.iter().enumerate() {
            w[i] = (w[i] + t * d_f[a]).clamp(0.0, 1.0);
        }
        g = h * &w + c;
        let after = objective(&w, &g);

        if kkt_residual(&w, &g) < KKT_TOL {
            break;
        }
        // Full in-box Newton step that failed the KKT check can only be
        // numerical noise; stop rather than loop.
        if t >= 1.0 && after >= before - 1e-15 * before.abs().max(1.0) {
            break;
        }
    }
    let kkt = kkt_residual(&w, &g);
    BoxQpSolution {
        weights: w,
        gradient: g,
        iterations,
        kkt_residual: kkt,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn random_spd(rng: &mut ChaCha8Rng, n: usize) -> DMatrix<f64> {
        let a = DMatrix::from_fn(n, n, |_, _| rng.gen_range(-1.0..1.0));
        &a * a.transpose() + DMatrix::identity(n, n) * 0.1
    }

    #[test]
    fn unconstrained_minimum_inside_box_is_found_exactly() {
        let h = DMatrix::from_diagonal(&DVector::from_vec(vec![2.0, 4.0]));
        // Minimizer of 1/2 w'Hw + c'w is -H^{-1} c = (0.25, 0.5).
        let c = DVector::from_vec(vec![-0.5, -2.0]);
        let sol = solve_box_qp(&h, &c);
        assert!((sol.weights[0] - 0.25).abs() < 1e-12);
        assert!((sol.weights[1] - 0.5).abs() < 1e-12);
        assert!(sol.kkt_residual < 1e-9);
    }

    #[test]
    fn active_bounds_satisfy_kkt_signs() {
        let mut rng = ChaCha8Rng::seed_from_u64(77);
        for _ in 0..50 {
            let n = rng.gen_range(1..12);
            let h = random_spd(&mut rng, n);
            let c = DVector::from_fn(n, |_, _| rng.gen_range(-3.0..3.0));
            let sol = solve_box_qp(&h, &c);
            assert!(
                sol.kkt_residual < 1e-7,
                "kkt residual {} at n={n}",
                sol.kkt_residual
            );
            for i in 0..n {
                assert!((0.0..=1.0).contains(&sol.weights[i]));
                if sol.weights[i] > 0.0 && sol.weights[i] < 1.0 {
                    assert!(sol.gradient[i].abs() < 1e-7);
                } else if sol.weights[i] == 0.0 {
                    assert!(sol.gradient[i] > -1e-7);
                } else {
                    assert!(sol.gradient[i] < 1e-7);
                }
            }
        }
    }

    #[test]
    fn matches_grid_search_on_two_dims() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..10 {
            let h = random_spd(&mut rng, 2);
            let c = DVector::from_fn(2, |_, _| rng.gen_range(-2.0..2.0));
            let sol = solve_box_qp(&h, &c);
            let f = |w0: f64, w1: f64| {
                let w = DVector::from_vec(vec![w0, w1]);
                0.5 * (&h * &w).dot(&w) + c.dot(&w)
            };
            let mut best = (0.0, 0.0, f64::INFINITY);
            let steps = 1000;
            for i in 0..=steps {
                for j in 0..=steps {
                    let w0 = i as f64 / steps as f64;
                    let w1 = j as f64 / steps as f64;
                    let v = f(w0, w1);
                    if v < best.2 {
                        best = (w0, w1, v);
                    }
                }
            }
            assert!(
                (sol.weights[0] - best.0).abs() <= 2e-3 && (sol.weights[1] - best.1).abs() <= 2e-3,
                "qp ({}, {}) vs grid ({}, {})",
                sol.weights[0],
                sol.weights[1],
                best.0,
                best.1
            );
        }
    }
}
