//! Dense linear algebra: matrices, element-wise vector operations,
//! Moore-Penrose inverse, kernel bases, and preconditioned conjugate gradients.

mod matrix;
mod nullspace;
mod pcg;
mod pinv;
mod solve;
pub mod vector;

pub use matrix::{IndexSet, Matrix};
pub use nullspace::{default_nullspace_tol, nullspace_basis, rank, rref};
pub use pcg::{pcg, pcg_with, Identity, LinearOperator, PcgResult, Preconditioner, SYMMETRY_TOL};
pub use pinv::{default_rank_tol, pinv};
pub use solve::{solve, Cholesky, Lu};
pub use vector::*;

/// Spectral norm `‖D‖₂` by power iteration on `DᵀD`.
///
/// Runs at most 100 iterations, stopping early once the estimate changes by
/// less than `1e-12` relative.
pub fn spectral_norm(d: &Matrix) -> f64 {
    let n = d.cols();
    if n == 0 || d.rows() == 0 || d.max_abs() == 0.0 {
        return 0.0;
    }
    let mut v = vec![1.0 / (n as f64).sqrt(); n];
    let mut sigma2 = 0.0;
    for _ in 0..100 {
        let w = d.tr_mul_vec(&d.mul_vec(&v));
        let nw = norm2(&w);
        if nw == 0.0 {
            // start vector in the kernel; restart from a non-symmetric vector
            v = (0..n).map(|i| 1.0 + i as f64).collect();
            let nv = norm2(&v);
            v.iter_mut().for_each(|x| *x /= nv);
            continue;
        }
        let prev = sigma2;
        sigma2 = nw;
        v = w.into_iter().map(|x| x / nw).collect();
        if (sigma2 - prev).abs() <= 1e-12 * sigma2 {
            break;
        }
    }
    sigma2.sqrt()
}
