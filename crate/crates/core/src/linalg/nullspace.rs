use super::matrix::Matrix;
use super::vector::{dot, norm2};

/// `1e-10 · max(1, max|a_ij|)`.
pub fn default_nullspace_tol(a: &Matrix) -> f64 {
    1e-10 * a.max_abs().max(1.0)
}

/// Reduced row-echelon form with partial pivoting.
///
/// Returns the reduced matrix and the pivot column of each nonzero row.
/// Candidate pivots with magnitude `<= pivot_tol` are treated as zero.
pub fn rref(a: &Matrix, pivot_tol: f64) -> (Matrix, Vec<usize>) {
    let (m, n) = a.shape();
    let mut r = a.clone();
    let mut pivots = Vec::new();
    let mut row = 0;
    for col in 0..n {
        if row == m {
            break;
        }
        let (p, pmax) = (row..m)
            .map(|i| (i, r[(i, col)].abs()))
            .fold((row, -1.0), |best, c| if c.1 > best.1 { c } else { best });
        if pmax <= pivot_tol {
            for i in row..m {
                r[(i, col)] = 0.0;
            }
            continue;
        }
        if p != row {
            for j in 0..n {
                let tmp = r[(row, j)];
                r[(row, j)] = r[(p, j)];
                r[(p, j)] = tmp;
            }
        }
        let pv = r[(row, col)];
        for j in col..n {
            r[(row, j)] /= pv;
        }
        for i in 0..m {
            if i == row {
                continue;
            }
            let f = r[(i, col)];
            if f != 0.0 {
                for j in col..n {
                    r[(i, j)] -= f * r[(row, j)];
                }
            }
        }
        pivots.push(col);
        row += 1;
    }
    (r, pivots)
}

/// Orthonormal basis of `{p : A p = 0}` as the columns of an `n×k` matrix.
///
/// The kernel vectors read off the reduced row-echelon form are orthonormalized
/// by modified Gram-Schmidt with one re-orthogonalization pass.
pub fn nullspace_basis(a: &Matrix, rank_tol: f64) -> Matrix {
    let n = a.cols();
    let (r, pivots) = rref(a, rank_tol);
    let free: Vec<usize> = (0..n).filter(|j| !pivots.contains(j)).collect();
    let mut basis: Vec<Vec<f64>> = Vec::with_capacity(free.len());
    for &f in &free {
        let mut v = vec![0.0; n];
        v[f] = 1.0;
        for (i, &pc) in pivots.iter().enumerate() {
            v[pc] = -r[(i, f)];
        }
        for _ in 0..2 {
            for q in &basis {
                let proj = dot(q, &v);
                for (vi, qi) in v.iter_mut().zip(q) {
                    *vi -= proj * qi;
                }
            }
        }
        let nv = norm2(&v);
        v.iter_mut().for_each(|x| *x /= nv);
        basis.push(v);
    }
    let mut out = Matrix::zeros(n, basis.len());
    for (j, v) in basis.iter().enumerate() {
        out.set_col(j, v);
    }
    out
}

/// Numerical rank as the number of pivots in the reduced row-echelon form.
pub fn rank(a: &Matrix, rank_tol: f64) -> usize {
    rref(a, rank_tol).1.len()
}
