//! Iterative shrinkage-thresholding with Barzilai-Borwein curvature (SpaRSA style):
//!
//! ```text
//! r ← soft(r − Dᵀ(Dr − w)/α, λ/α),     α = ‖DΔr‖²/‖Δr‖²  clipped to [1e-30, 1e30]
//! ```

use super::{lambda_schedule, phase_budget, RevResult, SolverParams};
use crate::error::Result;
use crate::linalg::{dot, norm1, soft};
use crate::reduction::ReducedSystem;

const ALPHA_MIN: f64 = 1e-30;
const ALPHA_MAX: f64 = 1e30;
const SIGMA: f64 = 1e-5;
const ETA: f64 = 2.0;
const MAX_ACCEPT_TRIES: usize = 200;

pub fn rev_ist(rs: &ReducedSystem, params: &SolverParams) -> Result<RevResult> {
    rev_ist_traced(rs, params).map(|(res, _)| res)
}

/// Like [`rev_ist`], also returning the objective (at the target λ) after
/// every iteration; the first entry is the value at `r = 0`.
pub fn rev_ist_traced(rs: &ReducedSystem, params: &SolverParams) -> Result<(RevResult, Vec<f64>)> {
    params.require_positive_lambda("IST")?;
    let m = rs.m();
    let target = params.lambda;
    let mut r = vec![0.0; m];
    let mut s: Vec<f64> = rs.w.iter().map(|w| -w).collect();
    let mut trace = vec![0.5 * dot(&s, &s)];
    let mut iter = 0;
    let mut converged = false;
    let schedule = lambda_schedule(rs, params);
    for (k, &lambda) in schedule.iter().enumerate() {
        let budget = phase_budget(params.maxiter, iter, k, schedule.len());
        if budget == 0 {
            converged = false;
            break;
        }
        let (used, conv) = ist_phase(rs, lambda, params.epsilon, budget, &mut r, &mut s, |s, r| {
            trace.push(0.5 * dot(s, s) + target * norm1(r))
        });
        iter += used;
        converged = conv;
    }
    Ok((RevResult::new(rs, r, iter, converged), trace))
}

/// One SpaRSA run at fixed λ from `r`, keeping `s = Dr − w` in step.
fn ist_phase(
    rs: &ReducedSystem,
    lambda: f64,
    eps: f64,
    maxiter: usize,
    r: &mut [f64],
    s: &mut [f64],
    mut record: impl FnMut(&[f64], &[f64]),
) -> (usize, bool) {
    let d = &rs.d;
    let m = rs.m();
    let objective = |s: &[f64], r: &[f64]| 0.5 * dot(s, s) + lambda * norm1(r);
    let mut alpha = 1.0;
    let mut f = objective(s, r);
    let mut iter = 0;

    while iter < maxiter {
        iter += 1;
        let grad = d.tr_mul_vec(s);
        let r_prev = r.to_vec();
        let f_prev = f;
        // SpaRSA acceptance: grow α until the objective decreases enough
        let (mut dr, mut z);
        let mut tries = 0;
        loop {
            let thresh = lambda / alpha;
            for i in 0..m {
                r[i] = soft(r_prev[i] - grad[i] / alpha, thresh);
            }
            dr = r.iter().zip(&r_prev).map(|(a, b)| a - b).collect::<Vec<_>>();
            z = d.mul_vec(&dr);
            let s_new: Vec<f64> = s.iter().zip(&z).map(|(a, b)| a + b).collect();
            f = objective(&s_new, r);
            tries += 1;
            if f <= f_prev - 0.5 * SIGMA * alpha * dot(&dr, &dr) || tries >= MAX_ACCEPT_TRIES {
                break;
            }
            alpha = (alpha * ETA).min(ALPHA_MAX);
        }
        for (si, zi) in s.iter_mut().zip(&z) {
            *si += zi;
        }
        record(s, r);

        let delta = dot(&dr, &dr);
        if delta == 0.0 {
            // fixed point of the shrinkage map
            return (iter, true);
        }
        let gamma = dot(&z, &z);
        alpha = (gamma / delta).clamp(ALPHA_MIN, ALPHA_MAX);

        if (f - f_prev).abs() <= eps * f_prev {
            return (iter, true);
        }
    }
    (iter, false)
}

#[cfg(test)]
mod tests {
    use super::super::test_support::*;
    use super::*;
    use crate::linalg::norm_inf;

    #[test]
    fn zero_rhs_stops_after_first_shrink() {
        let res = rev_ist(&zero_rhs(), &SolverParams::default()).unwrap();
        assert_eq!(res.r, vec![0.0; 3]);
        assert_eq!(res.iterations, 1);
        assert!(res.converged);
    }

    #[test]
    fn two_vertex_system() {
        let (res, trace) = rev_ist_traced(&two_vertex(), &SolverParams::default()).unwrap();
        assert!((res.r[0] - 1.0).abs() <= 1e-4, "{:?}", res.r);
        assert!(res.r[1].abs() <= 1e-4, "{:?}", res.r);
        assert!(trace.last().unwrap() <= &trace[0]);
        assert!(norm_inf(&res.r) < 2.0);
    }
}
