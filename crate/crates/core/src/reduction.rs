//! Reduction of `Ax = b` to basis pursuit on the residual vector, and the way back.
//!
//! With `A₁` the top `n×n` block and `A₂` the remaining rows, every residual
//! `r = Ax − b` satisfies `Dr = w` for
//!
//! ```text
//! D = [−A₂A₁†, I_{m−n}],    w = A₂A₁†b(0..n) − b(n..m)
//! ```
//!
//! and the minimizer is recovered as `x = A†(b + r)`.

use crate::error::{Error, Result};
use crate::linalg::{default_nullspace_tol, default_rank_tol, norm2, norm_inf, pinv, rank, Cholesky, IndexSet, Matrix};
use crate::problem::MlmProblem;

/// Default relative threshold below which a residual component counts as zero.
pub const DEFAULT_ZERO_TOL: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq)]
pub struct ReducedSystem {
    pub d: Matrix,
    pub w: Vec<f64>,
    pub a1: Matrix,
    pub a2: Matrix,
    pub a1_pinv: Matrix,
    pub a_pinv: Matrix,
    /// Diagnostics such as a rank-deficient `A₁`.
    pub warnings: Vec<String>,
}

impl ReducedSystem {
    /// Same constraint set rewritten as `(L⁻¹D, L⁻¹w)` with `LLᵀ = DDᵀ`, so the
    /// rows of the new `D` are orthonormal. `None` if `DDᵀ` is not numerically
    /// positive definite.
    pub fn with_orthonormal_rows(&self) -> Option<ReducedSystem> {
        // a second pass restores orthogonality lost to an ill-conditioned D
        let (d, w) = orthonormalize_rows(&self.d, &self.w)?;
        let (d, w) = orthonormalize_rows(&d, &w)?;
        Some(ReducedSystem { d, w, ..self.clone() })
    }

    /// Length of the residual vector (`m`).
    pub fn m(&self) -> usize {
        self.d.cols()
    }

    /// `‖Dr − w‖₂`.
    pub fn constraint_residual(&self, r: &[f64]) -> Result<f64> {
        let dr = self.d.matvec(r)?;
        Ok(norm2(&dr.iter().zip(&self.w).map(|(a, b)| a - b).collect::<Vec<_>>()))
    }
}

/// `(L⁻¹D, L⁻¹w)` with `LLᵀ = DDᵀ`.
fn orthonormalize_rows(d: &Matrix, w: &[f64]) -> Option<(Matrix, Vec<f64>)> {
    let chol = Cholesky::new(&d.matmul(&d.transpose()).ok()?).ok()?;
    let mut q = Matrix::zeros(d.rows(), d.cols());
    for j in 0..d.cols() {
        q.set_col(j, &chol.solve_lower(&d.col(j)));
    }
    let w = chol.solve_lower(w);
    (q.is_finite() && w.iter().all(|v| v.is_finite())).then_some((q, w))
}

pub fn reduce(p: &MlmProblem) -> ReducedSystem {
    let (m, n) = (p.m(), p.n());
    let a = p.a();
    let a1 = a.row_block(0, n);
    let a2 = a.row_block(n, m);
    let a1_pinv = pinv(&a1, default_rank_tol(&a1));
    let mut warnings = Vec::new();
    let r1 = rank(&a1, default_nullspace_tol(&a1));
    if r1 < n {
        warnings.push(format!(
            "top block A1 has numerical rank {r1} < n = {n}; the reduction may lose solutions"
        ));
    }
    // C = A₂A₁†
    let c = a2.matmul(&a1_pinv).expect("block shapes agree");
    let mut d = Matrix::zeros(m - n, m);
    for i in 0..(m - n) {
        let row = d.row_mut(i);
        for (x, cij) in row[..n].iter_mut().zip(c.row(i)) {
            *x = -cij;
        }
        row[n + i] = 1.0;
    }
    let b = p.b();
    let cb = c.mul_vec(&b[..n]);
    let w = cb.iter().zip(&b[n..]).map(|(x, y)| x - y).collect();
    let a_pinv = pinv(a, default_rank_tol(a));
    ReducedSystem {
        d,
        w,
        a1,
        a2,
        a1_pinv,
        a_pinv,
        warnings,
    }
}

/// `x = A†(b + r)`.
pub fn recover(p: &MlmProblem, rs: &ReducedSystem, r_opt: &[f64]) -> Result<Vec<f64>> {
    if r_opt.len() != p.m() {
        return Err(Error::dims(
            "recover",
            format!("residual of length {} for m = {}", r_opt.len(), p.m()),
        ));
    }
    let rhs: Vec<f64> = p.b().iter().zip(r_opt).map(|(b, r)| b + r).collect();
    rs.a_pinv.matvec(&rhs)
}

/// Rows of `(A, b, r)` split by whether the residual vanishes.
#[derive(Debug, Clone, PartialEq)]
pub struct ResidualSplit {
    pub zero_set: IndexSet,
    pub nonzero_set: IndexSet,
    pub a_z: Matrix,
    pub a_star: Matrix,
    pub b_z: Vec<f64>,
    pub b_star: Vec<f64>,
    pub r_z: Vec<f64>,
    pub r_star: Vec<f64>,
    /// `|zero_set|`.
    pub m0: usize,
}

/// Classifies residual components with `|r_i| <= zero_tol·(1 + ‖r‖∞)` as zero.
pub fn split_by_residual(p: &MlmProblem, x: &[f64], zero_tol: f64) -> Result<ResidualSplit> {
    let r = p.residual(x)?;
    Ok(split_residual_vector(p, &r, zero_tol))
}

pub(crate) fn split_residual_vector(p: &MlmProblem, r: &[f64], zero_tol: f64) -> ResidualSplit {
    let thresh = zero_tol * (1.0 + norm_inf(r));
    let zero_set = IndexSet::new((0..r.len()).filter(|&i| r[i].abs() <= thresh).collect());
    let nonzero_set = zero_set.complement(r.len());
    let pick = |v: &[f64], s: &IndexSet| s.as_slice().iter().map(|&i| v[i]).collect::<Vec<_>>();
    ResidualSplit {
        a_z: p.a().select_rows(zero_set.as_slice()),
        a_star: p.a().select_rows(nonzero_set.as_slice()),
        b_z: pick(p.b(), &zero_set),
        b_star: pick(p.b(), &nonzero_set),
        r_z: pick(r, &zero_set),
        r_star: pick(r, &nonzero_set),
        m0: zero_set.len(),
        zero_set,
        nonzero_set,
    }
}
