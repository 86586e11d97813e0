//! Preconditioned conjugate gradients.

use super::matrix::Matrix;
use super::solve::Cholesky;
use super::vector::{axpy, dot, norm2};
use crate::error::{Error, Result};

/// Symmetric positive-definite operator `x ↦ Hx`.
pub trait LinearOperator {
    fn dim(&self) -> usize;
    fn apply(&self, x: &[f64], out: &mut [f64]);
}

/// Approximate inverse `r ↦ P⁻¹r`.
pub trait Preconditioner {
    fn apply_inv(&self, r: &[f64], out: &mut [f64]);
}

impl LinearOperator for Matrix {
    fn dim(&self) -> usize {
        self.rows()
    }

    fn apply(&self, x: &[f64], out: &mut [f64]) {
        for (i, o) in out.iter_mut().enumerate() {
            *o = dot(self.row(i), x);
        }
    }
}

impl Preconditioner for Cholesky {
    fn apply_inv(&self, r: &[f64], out: &mut [f64]) {
        out.copy_from_slice(&self.solve(r));
    }
}

/// No preconditioning.
pub struct Identity;

impl Preconditioner for Identity {
    fn apply_inv(&self, r: &[f64], out: &mut [f64]) {
        out.copy_from_slice(r);
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PcgResult {
    pub x: Vec<f64>,
    pub iterations: usize,
    pub converged: bool,
    /// `‖Hx − g‖₂` at the returned iterate.
    pub residual_norm: f64,
}

/// Relative asymmetry allowed before `pcg` rejects a matrix.
pub const SYMMETRY_TOL: f64 = 1e-10;

/// Solves `Hx = g` for dense symmetric positive-definite `H` with preconditioner `P`.
///
/// Stops once `‖Hx − g‖₂ <= tol·‖g‖₂` or after `maxiter` iterations, returning the
/// iterate with the smallest residual seen.
pub fn pcg(h: &Matrix, g: &[f64], p: &Matrix, x0: &[f64], tol: f64, maxiter: usize) -> Result<PcgResult> {
    let n = h.rows();
    for (name, m) in [("H", h), ("P", p)] {
        if m.rows() != n || m.cols() != n {
            return Err(Error::dims(
                "pcg",
                format!("{name} is {:?}, expected {n}x{n}", m.shape()),
            ));
        }
        let asym = m.asymmetry();
        if asym > SYMMETRY_TOL * m.max_abs().max(1.0) {
            return Err(Error::NotSymmetric(asym));
        }
    }
    if g.len() != n || x0.len() != n {
        return Err(Error::dims(
            "pcg",
            format!("rhs {} and start {} for dimension {n}", g.len(), x0.len()),
        ));
    }
    let chol = Cholesky::new(p)?;
    Ok(pcg_with(h, g, &chol, x0, tol, maxiter))
}

/// Matrix-free variant of [`pcg`]; the caller is responsible for symmetry.
pub fn pcg_with<H: LinearOperator + ?Sized, P: Preconditioner + ?Sized>(
    h: &H,
    g: &[f64],
    p: &P,
    x0: &[f64],
    tol: f64,
    maxiter: usize,
) -> PcgResult {
    let n = h.dim();
    let mut x = x0.to_vec();
    let mut q = vec![0.0; n];
    h.apply(&x, &mut q);
    let mut r: Vec<f64> = g.iter().zip(&q).map(|(gi, qi)| gi - qi).collect();
    let target = tol * norm2(g);
    let mut r_norm = norm2(&r);
    let mut best = (r_norm, x.clone());
    if r_norm <= target {
        return PcgResult {
            x,
            iterations: 0,
            converged: true,
            residual_norm: r_norm,
        };
    }
    let mut z = vec![0.0; n];
    p.apply_inv(&r, &mut z);
    let mut dir = z.clone();
    let mut rz = dot(&r, &z);
    let mut iterations = 0;
    while iterations < maxiter {
        iterations += 1;
        h.apply(&dir, &mut q);
        let curv = dot(&dir, &q);
        if !(curv > 0.0) {
            break;
        }
        let alpha = rz / curv;
        axpy(alpha, &dir, &mut x);
        axpy(-alpha, &q, &mut r);
        r_norm = norm2(&r);
        if r_norm < best.0 {
            best = (r_norm, x.clone());
        }
        if r_norm <= target {
            return PcgResult {
                x,
                iterations,
                converged: true,
                residual_norm: r_norm,
            };
        }
        p.apply_inv(&r, &mut z);
        let rz_new = dot(&r, &z);
        let beta = rz_new / rz;
        rz = rz_new;
        for (d, zi) in dir.iter_mut().zip(&z) {
            *d = zi + beta * *d;
        }
    }
    PcgResult {
        x: best.1,
        iterations,
        converged: false,
        residual_norm: best.0,
    }
}
