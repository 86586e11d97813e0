//! Gradient projection with Barzilai-Borwein steps on the split form of (QPλ):
//!
//! ```text
//! min_{u,v ⪰ 0}  ½‖D(u − v) − w‖₂² + λ𝟙ᵀ(u + v),     r = u − v
//! ```
//!
//! The full BB step is taken whenever the objective stays below the largest of
//! the last [`MEMORY`] values; otherwise the step is cut back by exact line
//! search. A purely monotone rule zigzags across narrow valleys.

use super::{lambda_schedule, phase_budget, RevResult, SolverParams};
use crate::error::Result;
use crate::linalg::{dot, norm2};
use crate::reduction::ReducedSystem;

const ALPHA_MIN: f64 = 1e-30;
const ALPHA_MAX: f64 = 1e30;
const MEMORY: usize = 8;

pub fn rev_gpsr(rs: &ReducedSystem, params: &SolverParams) -> Result<RevResult> {
    params.require_positive_lambda("GPSR")?;
    let m = rs.m();
    let mut r = vec![0.0; m];
    let mut iter = 0;
    let mut converged = false;
    let schedule = lambda_schedule(rs, params);
    for (k, &lambda) in schedule.iter().enumerate() {
        let budget = phase_budget(params.maxiter, iter, k, schedule.len());
        if budget == 0 {
            converged = false;
            break;
        }
        let (used, conv) = gpsr_phase(rs, lambda, params.epsilon, budget, &mut r);
        iter += used;
        converged = conv;
    }
    Ok(RevResult::new(rs, r, iter, converged))
}

/// One GPSR-BB run at fixed λ, warm-started from `r`.
fn gpsr_phase(rs: &ReducedSystem, lambda: f64, eps: f64, maxiter: usize, r: &mut [f64]) -> (usize, bool) {
    let d = &rs.d;
    let m = rs.m();
    let mut alpha = 1.0;
    let mut u: Vec<f64> = r.iter().map(|x| x.max(0.0)).collect();
    let mut v: Vec<f64> = r.iter().map(|x| (-x).max(0.0)).collect();
    let mut du = vec![0.0; m];
    let mut dv = vec![0.0; m];
    let mut iter = 0;
    let objective = |resid: &[f64], u: &[f64], v: &[f64]| {
        0.5 * dot(resid, resid) + lambda * (u.iter().sum::<f64>() + v.iter().sum::<f64>())
    };
    let mut resid: Vec<f64> = d.mul_vec(r).iter().zip(&rs.w).map(|(a, b)| a - b).collect();
    let mut recent = std::collections::VecDeque::from([objective(&resid, &u, &v)]);

    while iter < maxiter {
        iter += 1;
        let corr = d.tr_mul_vec(&resid);
        let grad_u: Vec<f64> = corr.iter().map(|c| c + lambda).collect();
        let grad_v: Vec<f64> = grad_u.iter().map(|g| -g + 2.0 * lambda).collect();

        for i in 0..m {
            du[i] = (u[i] - alpha * grad_u[i]).max(0.0) - u[i];
            dv[i] = (v[i] - alpha * grad_v[i]).max(0.0) - v[i];
        }
        let step_r: Vec<f64> = du.iter().zip(&dv).map(|(a, b)| a - b).collect();
        let d_step = d.mul_vec(&step_r);
        let gamma = dot(&d_step, &d_step);
        let slope = dot(&grad_u, &du) + dot(&grad_v, &dv);
        let full: Vec<f64> = resid.iter().zip(&d_step).map(|(a, b)| a + b).collect();
        let ceiling = recent.iter().fold(f64::NEG_INFINITY, |a, &b| a.max(b));
        let trial_u: Vec<f64> = u.iter().zip(&du).map(|(a, b)| a + b).collect();
        let trial_v: Vec<f64> = v.iter().zip(&dv).map(|(a, b)| a + b).collect();
        let beta = if gamma <= 0.0 || objective(&full, &trial_u, &trial_v) <= ceiling {
            1.0
        } else {
            (-slope / gamma).min(1.0)
        };

        for i in 0..m {
            let ui = u[i] + beta * du[i];
            let vi = v[i] + beta * dv[i];
            let y = ui.min(vi);
            u[i] = ui - y;
            v[i] = vi - y;
            r[i] = u[i] - v[i];
        }
        for (ri, ds) in resid.iter_mut().zip(&d_step) {
            *ri += beta * ds;
        }
        if recent.len() == MEMORY {
            recent.pop_front();
        }
        recent.push_back(objective(&resid, &u, &v));

        let delta = dot(&du, &du) + dot(&dv, &dv);
        if gamma > 0.0 {
            alpha = (delta / gamma).clamp(ALPHA_MIN, ALPHA_MAX);
        }

        let step_norm = norm2(&step_r);
        if step_norm == 0.0 || step_norm <= eps * norm2(r) {
            return (iter, true);
        }
    }
    (iter, false)
}
