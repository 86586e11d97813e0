//! Dual alternating-direction method for basis pursuit with an inexact
//! (single steepest-descent step) dual update.

use super::{RevResult, SolverParams};
use crate::error::{Error, Result};
use crate::linalg::{dot, norm1, norm2};
use crate::reduction::ReducedSystem;

/// Relative primal–dual gap `|‖r‖₁ − wᵀy| / ‖r‖₁` required on top of
/// feasibility; feasibility alone is often reached well before optimality.
pub const GAP_TOL: f64 = 1e-6;

pub fn rev_adm(rs: &ReducedSystem, params: &SolverParams) -> Result<RevResult> {
    let d = &rs.d;
    let w = &rs.w;
    let m = rs.m();
    let k = w.len();
    let w_norm = norm2(w);
    if w_norm == 0.0 {
        return Ok(RevResult::zero(rs));
    }
    let zeta = params.zeta;
    let mu = params.mu.unwrap_or(norm1(w) / k as f64);
    if !(mu > 0.0) {
        return Err(Error::InvalidParameter(format!("ADM penalty mu = {mu} must be > 0")));
    }

    let mut r = d.tr_mul_vec(w);
    let mut z = vec![0.0; m];
    let mut y = vec![0.0; k];
    let mut g = vec![0.0; m];

    let dual_gradient = |g: &[f64], z: &[f64], r: &[f64]| -> Vec<f64> {
        let inner: Vec<f64> = (0..m).map(|i| g[i] - z[i] + r[i] / mu).collect();
        d.mul_vec(&inner).iter().zip(w).map(|(a, b)| a - b / mu).collect()
    };
    // exact line-search length for the quadratic dual subproblem along s
    let step_length = |s: &[f64]| -> f64 {
        let dts = d.tr_mul_vec(s);
        let den = dot(&dts, &dts);
        if den > 0.0 {
            dot(s, s) / den
        } else {
            0.0
        }
    };

    let mut alpha = step_length(&dual_gradient(&g, &z, &r));
    let mut iter = 0;
    let mut converged = false;
    while iter < params.maxiter {
        iter += 1;
        let s = dual_gradient(&g, &z, &r);
        if params.adm_refresh_step {
            alpha = step_length(&s);
        }
        for (yi, si) in y.iter_mut().zip(&s) {
            *yi -= alpha * si;
        }
        g = d.tr_mul_vec(&y);
        for i in 0..m {
            z[i] = (g[i] + r[i] / mu).clamp(-1.0, 1.0);
        }
        let next: Vec<f64> = (0..m).map(|i| r[i] + zeta * mu * (g[i] - z[i])).collect();
        if !next.iter().all(|v| v.is_finite()) {
            // the fixed step can diverge; keep the last finite iterate
            break;
        }
        r = next;
        let dr = d.mul_vec(&r);
        let feas = norm2(&dr.iter().zip(w).map(|(a, b)| a - b).collect::<Vec<_>>());
        let primal = norm1(&r);
        let gap = (primal - dot(w, &y)).abs();
        if feas / w_norm <= params.epsilon && gap <= GAP_TOL * primal.max(f64::MIN_POSITIVE) {
            converged = true;
            break;
        }
    }
    Ok(RevResult::new(rs, r, iter, converged))
}

#[cfg(test)]
mod tests {
    use super::super::test_support::*;
    use super::*;

    #[test]
    fn zero_rhs_is_special_cased() {
        let res = rev_adm(&zero_rhs(), &SolverParams::default()).unwrap();
        assert_eq!(res.r, vec![0.0; 3]);
        assert_eq!(res.iterations, 0);
    }

    #[test]
    fn two_vertex_system() {
        let p = SolverParams::default();
        let res = rev_adm(&two_vertex(), &p).unwrap();
        assert!(res.converged);
        assert!((res.r[0] - 1.0).abs() <= 1e-4, "{:?}", res.r);
        assert!(res.r[1].abs() <= 1e-4, "{:?}", res.r);
        assert!(res.feasibility <= p.epsilon * 1.0);
    }
}
