//! Proximity-operator method for (BPε) written as
//! `min ‖r‖₁ + ι_{‖·‖₂ ≤ ε}(Dr − w)`, with the auxiliary variable eliminated.
//!
//! Like linearized Bregman, the iteration can stagnate: `r` stays put while the
//! dual variable grows by the same increment each step until another component
//! clears the threshold. Such runs are skipped in one "kick" that advances the
//! dual to just before the first crossing.

use super::{RevResult, SolverParams};
use crate::error::{Error, Result};
use crate::linalg::{norm2, soft, spectral_norm, Matrix};
use crate::reduction::ReducedSystem;

pub const DEFAULT_TAU: f64 = 0.02;

/// Relative change between iterates that ends the iteration.
const INNER_STOP: f64 = 1e-6;
/// Relative change of `r` treated as stagnation (roundoff level).
const STALL: f64 = 1e-10;
/// Constraint slack on top of ε that a stopping iterate may carry.
const FEAS_SLACK: f64 = 1e-6;

/// `(τ, μ)` after applying the defaults `τ = 0.02`, `μ = 0.999τ/‖D‖₂²`.
pub fn pob_defaults(rs: &ReducedSystem, params: &SolverParams) -> (f64, f64) {
    let tau = params.tau.unwrap_or(DEFAULT_TAU);
    let mu = params.mu.unwrap_or_else(|| {
        let dn = spectral_norm(&rs.d);
        0.999 * tau / (dn * dn)
    });
    (tau, mu)
}

pub fn rev_pob(rs: &ReducedSystem, params: &SolverParams) -> Result<RevResult> {
    let d = &rs.d;
    let w = &rs.w;
    let m = rs.m();
    let eps = params.epsilon;
    let (tau, mu) = pob_defaults(rs, params);
    let dn = spectral_norm(d);
    if !(mu > 0.0 && tau > mu * dn * dn) {
        return Err(Error::InvalidParameter(format!(
            "POB needs tau > mu·‖D‖₂² > 0, got tau = {tau}, mu = {mu}, ‖D‖₂ = {dn}"
        )));
    }
    if w.iter().all(|&x| x == 0.0) && eps >= 0.0 {
        return Ok(RevResult::zero(rs));
    }

    let mut y = vec![0.0; w.len()];
    let mut r = vec![0.0; m];
    // z = y − (Dr − w)
    let mut z: Vec<f64> = w.clone();
    let feas_gate = (eps + FEAS_SLACK).min(eps.max(FEAS_SLACK * (1.0 + norm2(w))));
    let step = mu / tau;
    let thresh = 1.0 / tau;
    let mut iter = 0;
    let mut converged = false;

    while iter < params.maxiter {
        iter += 1;
        let s = r.clone();
        let dual: Vec<f64> = y.iter().zip(&z).map(|(yi, zi)| 2.0 * yi - zi).collect();
        let g = d.tr_mul_vec(&dual);
        for i in 0..m {
            r[i] = soft(s[i] - step * g[i], thresh);
        }
        let change = norm2(&r.iter().zip(&s).map(|(a, b)| a - b).collect::<Vec<_>>());
        let dr = d.mul_vec(&r);
        // r stalls while the dual builds up, so a small change alone is not enough
        let mut stalled = false;
        if change < INNER_STOP * norm2(&s) {
            let feas = norm2(&dr.iter().zip(w).map(|(a, b)| a - b).collect::<Vec<_>>());
            if feas <= feas_gate {
                converged = true;
                break;
            }
            stalled = change <= STALL * norm2(&s);
        }
        z.clone_from(&y);
        let t: Vec<f64> = (0..w.len()).map(|i| dr[i] + z[i] - w[i]).collect();
        let tn = norm2(&t);
        if tn <= eps {
            y.iter_mut().for_each(|v| *v = 0.0);
        } else {
            let f = 1.0 - eps / tn;
            for (yi, ti) in y.iter_mut().zip(&t) {
                *yi = f * ti;
            }
        }
        if stalled {
            kick(d, &r, &mut y, &mut z, thresh / step);
        }
    }
    Ok(RevResult::new(rs, r, iter, converged))
}

/// Advances `y` and `z` by whole multiples of the last dual increment `y − z`
/// while every zero entry of `r` would stay zero. The next iteration's
/// argument `Dᵀ(2y − z)` moves by `Dᵀ(y − z)` per step; a zero entry turns
/// nonzero once its magnitude exceeds `limit`.
fn kick(d: &Matrix, r: &[f64], y: &mut [f64], z: &mut [f64], limit: f64) {
    let inc: Vec<f64> = y.iter().zip(z.iter()).map(|(a, b)| a - b).collect();
    let next: Vec<f64> = y.iter().zip(z.iter()).map(|(a, b)| 2.0 * a - b).collect();
    let g0 = d.tr_mul_vec(&next);
    let h = d.tr_mul_vec(&inc);
    let mut steps = f64::INFINITY;
    for i in (0..r.len()).filter(|&i| r[i] == 0.0) {
        if h[i] != 0.0 {
            // smallest n >= 0 with |g0 + n·h| > limit
            let room = (limit - g0[i] * h[i].signum()) / h[i].abs();
            steps = steps.min(room.max(0.0).floor() + 1.0);
        }
    }
    // stop one step short so the crossing itself happens in a regular iteration
    let k = steps - 2.0;
    if k.is_finite() && k >= 1.0 {
        for ((yi, zi), di) in y.iter_mut().zip(z.iter_mut()).zip(&inc) {
            *yi += k * di;
            *zi += k * di;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::super::test_support::*;
    use super::*;

    #[test]
    fn zero_rhs_with_zero_epsilon() {
        let p = SolverParams {
            epsilon: 0.0,
            ..Default::default()
        };
        let res = rev_pob(&zero_rhs(), &p).unwrap();
        assert_eq!(res.r, vec![0.0; 3]);
    }

    #[test]
    fn two_vertex_system() {
        let res = rev_pob(&two_vertex(), &SolverParams::default()).unwrap();
        assert!((res.r[0] - 1.0).abs() <= 1e-4, "{:?}", res.r);
        assert!(res.r[1].abs() <= 1e-4, "{:?}", res.r);
    }

    #[test]
    fn kick_stops_one_step_before_a_zero_entry_activates() {
        let d = Matrix::identity(2);
        let (mut y, mut z) = (vec![0.1, 0.1], vec![0.0, 0.0]);
        kick(&d, &[1.0, 0.0], &mut y, &mut z, 1.0);
        // the argument 2y − z grows by 0.1 per step and first exceeds 1 at 1.1
        assert!((y[1] - 0.8).abs() < 1e-12 && (z[1] - 0.7).abs() < 1e-12, "{y:?} {z:?}");
        let before = (y.clone(), z.clone());
        kick(&d, &[1.0, 0.0], &mut y, &mut z, 1.0);
        assert_eq!((y, z), before, "too close to the crossing to skip ahead");
    }

    #[test]
    fn rejects_step_violating_precondition() {
        let p = SolverParams {
            tau: Some(0.02),
            mu: Some(1.0),
            ..Default::default()
        };
        assert!(matches!(rev_pob(&two_vertex(), &p), Err(Error::InvalidParameter(_))));
    }
}
