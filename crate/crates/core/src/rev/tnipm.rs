//! Truncated-Newton interior-point method for (QPλ) in the bound form
//! `min ½‖Dr − w‖² + λ𝟙ᵀu  s.t. −u ⪯ r ⪯ u`, using a log barrier and
//! Newton directions from preconditioned conjugate gradients.

use super::{RevResult, SolverParams};
use crate::error::Result;
use crate::linalg::{dot, norm1, norm2, norm_inf, pcg_with, LinearOperator, Matrix, Preconditioner};
use crate::reduction::ReducedSystem;

const MU: f64 = 2.0;
const ALPHA: f64 = 0.01;
const BETA: f64 = 0.5;
const MAX_HALVINGS: usize = 100;
const PCG_MAXITER: usize = 5000;

/// Barrier Hessian `[[DᵀD + B₁, B₂], [B₂, B₁]]` with diagonal `B₁`, `B₂`.
struct NewtonSystem<'a> {
    d: &'a Matrix,
    b1: Vec<f64>,
    b2: Vec<f64>,
}

impl LinearOperator for NewtonSystem<'_> {
    fn dim(&self) -> usize {
        2 * self.b1.len()
    }

    fn apply(&self, x: &[f64], out: &mut [f64]) {
        let m = self.b1.len();
        let (xr, xu) = x.split_at(m);
        let dtd = self.d.tr_mul_vec(&self.d.mul_vec(xr));
        for i in 0..m {
            out[i] = dtd[i] + self.b1[i] * xr[i] + self.b2[i] * xu[i];
            out[m + i] = self.b2[i] * xr[i] + self.b1[i] * xu[i];
        }
    }
}

/// `[[I + B₁, B₂], [B₂, B₁]]`, inverted as independent 2×2 blocks.
struct BlockPreconditioner {
    b1: Vec<f64>,
    b2: Vec<f64>,
}

impl Preconditioner for BlockPreconditioner {
    fn apply_inv(&self, r: &[f64], out: &mut [f64]) {
        let m = self.b1.len();
        for i in 0..m {
            let (a, b, c) = (1.0 + self.b1[i], self.b2[i], self.b1[i]);
            let det = a * c - b * b;
            out[i] = (c * r[i] - b * r[m + i]) / det;
            out[m + i] = (-b * r[i] + a * r[m + i]) / det;
        }
    }
}

fn barrier_objective(z: &[f64], lambda: f64, u: &[f64], f: &[f64], t: f64) -> f64 {
    0.5 * dot(z, z) + lambda * u.iter().sum::<f64>() - f.iter().map(|x| x.ln()).sum::<f64>() / t
}

pub fn rev_tnipm(rs: &ReducedSystem, params: &SolverParams) -> Result<RevResult> {
    params.require_positive_lambda("TNIPM")?;
    let d = &rs.d;
    let w = &rs.w;
    let m = rs.m();
    let lambda = params.lambda;
    let eps = params.epsilon;

    let mut r = vec![0.0; m];
    let mut u = vec![1.0; m];
    let mut f: Vec<f64> = u
        .iter()
        .zip(&r)
        .map(|(a, b)| a - b)
        .chain(u.iter().zip(&r).map(|(a, b)| a + b))
        .collect();
    let mut df = vec![0.0; 2 * m];
    let mut s = f64::INFINITY;
    let mut d_obj = f64::NEG_INFINITY;
    let mut t = (1.0f64 / lambda).max(1.0).min(2.0 * m as f64 / eps);

    let mut iter = 0;
    while iter < params.maxiter {
        iter += 1;
        let z: Vec<f64> = d.mul_vec(&r).iter().zip(w).map(|(a, b)| a - b).collect();
        let mut nu = z.clone();
        let dt_nu = norm_inf(&d.tr_mul_vec(&nu));
        if dt_nu > lambda {
            let k = lambda / dt_nu;
            nu.iter_mut().for_each(|x| *x *= k);
        }
        let p_obj = 0.5 * dot(&z, &z) + lambda * norm1(&r);
        d_obj = (-0.5 * dot(&nu, &nu) - dot(&nu, w)).max(d_obj);
        let eta = p_obj - d_obj;
        if eta <= 0.0 || (d_obj > 0.0 && eta / d_obj < eps) {
            return Ok(RevResult::new(rs, r, iter, true));
        }

        if s >= 0.5 {
            t = (MU * (2.0 * m as f64 / eta).min(t)).max(t);
        }

        let q1: Vec<f64> = u.iter().zip(&r).map(|(a, b)| 1.0 / (a + b)).collect();
        let q2: Vec<f64> = u.iter().zip(&r).map(|(a, b)| 1.0 / (a - b)).collect();
        let dtz = d.tr_mul_vec(&z);
        let mut grad = vec![0.0; 2 * m];
        for i in 0..m {
            grad[i] = dtz[i] - (q1[i] - q2[i]) / t;
            grad[m + i] = lambda - (q1[i] + q2[i]) / t;
        }
        let b1: Vec<f64> = (0..m).map(|i| (q1[i] * q1[i] + q2[i] * q2[i]) / t).collect();
        let b2: Vec<f64> = (0..m).map(|i| (q1[i] * q1[i] - q2[i] * q2[i]) / t).collect();
        let hess = NewtonSystem {
            d,
            b1: b1.clone(),
            b2: b2.clone(),
        };
        let precond = BlockPreconditioner { b1, b2 };
        let grad_norm = norm2(&grad);
        let pcg_tol = (eps * eta / grad_norm.min(1.0)).min(0.1);
        let neg_grad: Vec<f64> = grad.iter().map(|g| -g).collect();
        df = pcg_with(&hess, &neg_grad, &precond, &df, pcg_tol, PCG_MAXITER).x;

        let (dr, du) = df.split_at(m);
        let phi = barrier_objective(&z, lambda, &u, &f, t);
        let slope = dot(&grad, &df);
        s = 1.0;
        let mut accepted = None;
        for _ in 0..MAX_HALVINGS {
            let r_new: Vec<f64> = (0..m).map(|i| r[i] + s * dr[i]).collect();
            let u_new: Vec<f64> = (0..m).map(|i| u[i] + s * du[i]).collect();
            let f_new: Vec<f64> = (0..m)
                .map(|i| u_new[i] - r_new[i])
                .chain((0..m).map(|i| u_new[i] + r_new[i]))
                .collect();
            if f_new.iter().all(|&x| x > 0.0) {
                let z_new: Vec<f64> = d.mul_vec(&r_new).iter().zip(w).map(|(a, b)| a - b).collect();
                let phi_new = barrier_objective(&z_new, lambda, &u_new, &f_new, t);
                if phi_new - phi <= ALPHA * s * slope {
                    accepted = Some((r_new, u_new, f_new));
                    break;
                }
            }
            s *= BETA;
        }
        match accepted {
            Some((r_new, u_new, f_new)) => {
                r = r_new;
                u = u_new;
                f = f_new;
            }
            None => return Ok(RevResult::new(rs, r, iter, false)),
        }
    }
    Ok(RevResult::new(rs, r, iter, false))
}
