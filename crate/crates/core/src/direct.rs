//! Baselines that work on `(A, b)` directly, without the residual reduction:
//! the split-variable linear program and the perturbation (descent along
//! kernel directions) method.

use std::time::Instant;

use crate::error::{Error, Result};
use crate::linalg::{
    default_nullspace_tol, default_rank_tol, norm1, norm_inf, nullspace_basis, pinv, sign_vector, Matrix,
};
use crate::lp::{lp_solve, LpStandardForm, DEFAULT_FEAS_TOL};
use crate::problem::{Method, MlmProblem, SolveReport};
use crate::reduction::{split_residual_vector, ResidualSplit, DEFAULT_ZERO_TOL};

/// `min 𝟙ᵀ(r⁺ + r⁻)  s.t.  −r⁺ + r⁻ + A(x⁺ − x⁻) = b`, all variables ⪰ 0.
pub fn l1_approx_linprog(p: &MlmProblem) -> Result<SolveReport> {
    let start = Instant::now();
    let (m, n) = (p.m(), p.n());
    let a = p.a();
    let eq = Matrix::from_fn(m, 2 * m + 2 * n, |i, j| {
        if j < m {
            if i == j {
                -1.0
            } else {
                0.0
            }
        } else if j < 2 * m {
            if i == j - m {
                1.0
            } else {
                0.0
            }
        } else if j < 2 * m + n {
            a[(i, j - 2 * m)]
        } else {
            -a[(i, j - 2 * m - n)]
        }
    });
    let mut cost = vec![1.0; 2 * m];
    cost.extend(std::iter::repeat_n(0.0, 2 * n));
    let lp = LpStandardForm::new(cost, eq, p.b().to_vec())?;
    let sol = lp_solve(&lp, DEFAULT_FEAS_TOL, lp.default_maxiter())
        .and_then(|s| s.require_optimal())
        .map_err(|e| e.in_stage("linprog"))?;
    let y = &sol.point;
    let x = (0..n).map(|j| y[2 * m + j] - y[2 * m + n + j]).collect();
    SolveReport::from_x(p, Method::Lp.label(), x, sol.iterations, true, start.elapsed())
}

#[derive(Debug, Clone, PartialEq)]
pub struct PertOptions {
    /// Step length of the correction move.
    pub c: f64,
    /// Outer (correction) iterations.
    pub maxiter: usize,
    /// Residuals with `|rᵢ| ≤ zero_tol·(1 + ‖r‖∞)` count as zero.
    pub zero_tol: f64,
}

impl Default for PertOptions {
    fn default() -> Self {
        PertOptions {
            c: 1.0,
            maxiter: 15,
            zero_tol: DEFAULT_ZERO_TOL,
        }
    }
}

/// Cost and zero-set size around one inner perturbation step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PertStep {
    pub cost_before: f64,
    pub cost_after: f64,
    pub zeros_before: usize,
    pub zeros_after: usize,
}

pub fn l1_approx_pert_cbs(p: &MlmProblem, opts: &PertOptions) -> Result<SolveReport> {
    l1_approx_pert_cbs_traced(p, opts).map(|(rep, _)| rep)
}

/// One kernel-direction step: moves along `d ∈ Ker(A_z)` to the breakpoint of
/// `‖r_* + γA_*d‖₁` with the smallest objective (ties: smallest `|γ|`).
fn perturb_step(p: &MlmProblem, x: &mut [f64], split: &ResidualSplit) -> Result<()> {
    let n = p.n();
    let d = if split.m0 == 0 {
        let mut e = vec![0.0; n];
        e[0] = 1.0;
        e
    } else {
        let kernel = nullspace_basis(&split.a_z, default_nullspace_tol(&split.a_z));
        if kernel.cols() == 0 {
            return Err(Error::EmptyKernel { zeros: split.m0, n });
        }
        kernel.col(0)
    };
    let ad = split.a_star.mul_vec(&d);
    let r_star = &split.r_star;
    let mut best: Option<(f64, f64)> = None;
    for k in 0..ad.len() {
        if ad[k] == 0.0 {
            continue;
        }
        let gamma = -r_star[k] / ad[k];
        let f: f64 = r_star.iter().zip(&ad).map(|(r, a)| (r + gamma * a).abs()).sum();
        let better = match best {
            None => true,
            Some((bf, bg)) => f < bf || (f == bf && gamma.abs() < bg.abs()),
        };
        if better {
            best = Some((f, gamma));
        }
    }
    let (_, gamma) = best.ok_or_else(|| {
        Error::InvalidProblem("perturbation direction leaves every residual unchanged (A rank-deficient?)".into())
    })?;
    for (xi, di) in x.iter_mut().zip(&d) {
        *xi += gamma * di;
    }
    Ok(())
}

/// Like [`l1_approx_pert_cbs`], also returning every inner step.
pub fn l1_approx_pert_cbs_traced(p: &MlmProblem, opts: &PertOptions) -> Result<(SolveReport, Vec<PertStep>)> {
    if !(opts.c > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "perturbation step c = {} must be > 0",
            opts.c
        )));
    }
    if opts.maxiter == 0 {
        return Err(Error::InvalidParameter("maxiter must be >= 1".into()));
    }
    let start = Instant::now();
    let n = p.n();
    let mut x = vec![0.0; n];
    let mut trace = Vec::new();
    let mut converged = false;
    let mut iter = 0;

    while iter < opts.maxiter {
        iter += 1;
        let mut r = p.residual(&x)?;
        let mut split = split_residual_vector(p, &r, opts.zero_tol);
        // every step zeroes one more residual, so this runs at most n times
        let mut guard = 0;
        while split.m0 < n {
            guard += 1;
            if guard > p.m() {
                return Err(Error::InvalidProblem(
                    "perturbation steps failed to grow the zero set".into(),
                ));
            }
            let (cost_before, zeros_before) = (norm1(&r), split.m0);
            perturb_step(p, &mut x, &split)?;
            r = p.residual(&x)?;
            split = split_residual_vector(p, &r, opts.zero_tol);
            trace.push(PertStep {
                cost_before,
                cost_after: norm1(&r),
                zeros_before,
                zeros_after: split.m0,
            });
        }
        if split.nonzero_set.is_empty() {
            converged = true;
            break;
        }
        // decision vector s = (A_zᵀ)† A_*ᵀ sign(r_*)
        let g = split.a_star.tr_mul_vec(&sign_vector(&split.r_star));
        let a_zt = split.a_z.transpose();
        let s = pinv(&a_zt, default_rank_tol(&a_zt)).mul_vec(&g);
        if norm_inf(&s) <= 1.0 {
            converged = true;
            break;
        }
        let u: Vec<f64> = s.iter().map(|v| if v.abs() > 1.0 { 1.0 } else { 0.0 }).collect();
        let step = pinv(&split.a_z, default_rank_tol(&split.a_z)).mul_vec(&u);
        for (xi, si) in x.iter_mut().zip(&step) {
            *xi += opts.c * si;
        }
    }
    let report = SolveReport::from_x(p, Method::Ptb.label(), x, iter, converged, start.elapsed())?;
    Ok((report, trace))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::oracle_solve_default;

    fn prob(rows: &[&[f64]], b: &[f64]) -> MlmProblem {
        MlmProblem::new(Matrix::from_rows(rows).unwrap(), b.to_vec()).unwrap()
    }

    fn sample() -> MlmProblem {
        prob(
            &[&[1.0, 0.3], &[-0.5, 2.0], &[0.7, -1.1], &[1.9, 0.4], &[-1.2, -0.8]],
            &[0.4, 1.7, -2.2, 0.9, 0.3],
        )
    }

    #[test]
    fn linprog_consistent_system_has_zero_cost() {
        let p = prob(&[&[1.0, 2.0], &[3.0, -1.0], &[0.5, 0.5]], &[5.0, 1.0, 1.5]);
        let rep = l1_approx_linprog(&p).unwrap();
        assert!(rep.objective <= 1e-10);
        assert_eq!(rep.label, "L1-LP");
    }

    #[test]
    fn linprog_matches_oracle() {
        let p = sample();
        let lp = l1_approx_linprog(&p).unwrap();
        let or = oracle_solve_default(&p).unwrap();
        assert!((lp.objective - or.objective).abs() <= 1e-9 * or.objective.max(1.0));
    }

    #[test]
    fn one_extra_row_leaves_one_nonzero_residual() {
        let p = prob(&[&[1.0, 0.2], &[0.4, 1.0], &[1.0, 1.0]], &[1.0, 2.0, 0.5]);
        let rep = l1_approx_linprog(&p).unwrap();
        let nonzero = rep.r.iter().filter(|r| r.abs() > 1e-9).count();
        assert!(nonzero <= 1, "{:?}", rep.r);
    }

    #[test]
    fn zero_entry_of_b_is_zero_from_the_start() {
        let p = prob(&[&[1.0, 0.0], &[0.0, 1.0], &[1.0, 1.0]], &[0.0, 1.0, 3.0]);
        let (_, trace) = l1_approx_pert_cbs_traced(&p, &PertOptions::default()).unwrap();
        assert_eq!(trace[0].zeros_before, 1);
        assert_eq!(trace[0].zeros_after, 2);
    }

    #[test]
    fn perturbation_descends_and_lands_near_oracle() {
        let p = sample();
        let (rep, trace) = l1_approx_pert_cbs_traced(&p, &PertOptions::default()).unwrap();
        for st in &trace {
            assert!(st.cost_after <= st.cost_before + 1e-12, "{st:?}");
            assert!(st.zeros_after > st.zeros_before, "{st:?}");
        }
        let or = oracle_solve_default(&p).unwrap();
        assert!(
            rep.objective <= 1.05 * or.objective,
            "{} vs {}",
            rep.objective,
            or.objective
        );
        let zeros = rep
            .r
            .iter()
            .filter(|r| r.abs() <= 1e-8 * (1.0 + norm_inf(&rep.r)))
            .count();
        assert!(zeros >= 2);
    }

    #[test]
    fn rejects_non_positive_step() {
        let opts = PertOptions {
            c: 0.0,
            ..Default::default()
        };
        assert!(l1_approx_pert_cbs(&sample(), &opts).is_err());
    }
}
