//! Moore-Penrose inverse by Greville's column recursion.
//!
//! With `A_k = [A_{k-1}, a_k]` and `d = A_{k-1}† a_k`, `c = a_k − A_{k-1} d`:
//!
//! ```text
//! bᵀ = c† = cᵀ / (cᵀc)                      if ‖c‖₂ > rank_tol
//! bᵀ = dᵀ A_{k-1}† / (1 + dᵀd)              otherwise
//! A_k† = [A_{k-1}† − d bᵀ ; bᵀ]
//! ```
//!
//! The recursion loses accuracy on ill-conditioned input, so its result `G` is
//! polished with Newton–Schulz steps `G ← 2G − GAG`, which keep the range
//! spaces and square the error in `GAG − G`; polishing stops as soon as a step
//! fails to reduce that error.

use super::matrix::Matrix;
use super::nullspace::rank;
use super::vector::{dot, norm2};

/// `ε · max(m, n) · max|a_ij|`.
pub fn default_rank_tol(a: &Matrix) -> f64 {
    f64::EPSILON * a.rows().max(a.cols()) as f64 * a.max_abs()
}

/// Moore-Penrose inverse (`n×m` for an `m×n` input).
///
/// A column whose component orthogonal to the span of the previous columns has
/// Euclidean norm `<= rank_tol` is treated as linearly dependent, as is every
/// column once the numerical rank (row reduction at `rank_tol`) is reached;
/// without that cap a roundoff-sized `c` would be inverted.
pub fn pinv(a: &Matrix, rank_tol: f64) -> Matrix {
    let (m, n) = a.shape();
    let max_independent = rank(a, rank_tol);
    let mut independent = 0;
    // rows of the running pseudo-inverse; row k belongs to column k of `a`
    let mut g: Vec<Vec<f64>> = Vec::with_capacity(n);
    let mut d = Vec::with_capacity(n);
    let mut c = vec![0.0; m];
    for k in 0..n {
        let a_k = a.col(k);
        d.clear();
        d.extend(g.iter().map(|row| dot(row, &a_k)));
        // c = a_k − A_{k-1} d
        for (i, ci) in c.iter_mut().enumerate() {
            let row = &a.row(i)[..k];
            *ci = a_k[i] - dot(row, &d);
        }
        let c_norm = norm2(&c);
        let b: Vec<f64> = if c_norm > rank_tol && independent < max_independent {
            independent += 1;
            let cc = c_norm * c_norm;
            c.iter().map(|x| x / cc).collect()
        } else {
            let denom = 1.0 + dot(&d, &d);
            let mut b = vec![0.0; m];
            for (row, &dj) in g.iter().zip(&d) {
                for (bi, r) in b.iter_mut().zip(row) {
                    *bi += dj * r;
                }
            }
            b.iter_mut().for_each(|x| *x /= denom);
            b
        };
        for (row, &dj) in g.iter_mut().zip(&d) {
            if dj != 0.0 {
                for (r, bi) in row.iter_mut().zip(&b) {
                    *r -= dj * bi;
                }
            }
        }
        g.push(b);
    }
    let mut out = Matrix::zeros(n, m);
    for (k, row) in g.iter().enumerate() {
        out.row_mut(k).copy_from_slice(row);
    }
    if max_independent == 0 {
        return out;
    }
    let gag = |g: &Matrix| {
        g.matmul(a)
            .and_then(|ga| ga.matmul(g))
            .expect("conformable by construction")
    };
    let mut prod = gag(&out);
    let mut err = prod.sub(&out).expect("same shape").max_abs();
    for _ in 0..POLISH_STEPS {
        let next = out.scale(2.0).sub(&prod).expect("same shape");
        let next_prod = gag(&next);
        let next_err = next_prod.sub(&next).expect("same shape").max_abs();
        if !(next_err < err) {
            break;
        }
        (out, prod, err) = (next, next_prod, next_err);
    }
    out
}

/// Upper bound on Newton–Schulz polishing steps; each must reduce `‖GAG − G‖`.
const POLISH_STEPS: usize = 4;
