//! Exhaustive minimum-ℓ1 solver for small instances.
//!
//! An optimal ℓ1 fit interpolates at least `n` rows when the data are in
//! general position, so enumerating every `n`-row subset, solving the square
//! system exactly, and keeping the cheapest candidate finds the global optimum.

use std::time::Instant;

use crate::error::{Error, Result};
use crate::linalg::{norm2, Lu};
use crate::problem::{MlmProblem, SolveReport};

pub const DEFAULT_MAX_M: usize = 14;
pub const DEFAULT_MAX_N: usize = 4;
/// Subsets with `|det| ≤ SINGULAR_TOL · Π‖rowᵢ‖₂` are skipped.
pub const SINGULAR_TOL: f64 = 1e-12;

pub const LABEL: &str = "ORACLE";

/// Lexicographic `k`-subsets of `0..m`.
struct Combinations {
    idx: Vec<usize>,
    m: usize,
    done: bool,
}

impl Combinations {
    fn new(m: usize, k: usize) -> Self {
        Combinations {
            idx: (0..k).collect(),
            m,
            done: k > m,
        }
    }
}

impl Iterator for Combinations {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        if self.done {
            return None;
        }
        let out = self.idx.clone();
        let k = self.idx.len();
        let mut i = k;
        loop {
            if i == 0 {
                self.done = true;
                break;
            }
            i -= 1;
            if self.idx[i] < self.m - k + i {
                self.idx[i] += 1;
                for j in i + 1..k {
                    self.idx[j] = self.idx[j - 1] + 1;
                }
                break;
            }
        }
        Some(out)
    }
}

/// Minimum of `‖Ax − b‖₁` over all interpolating solutions; `max_m`/`max_n`
/// guard against combinatorial blow-up.
pub fn oracle_solve(p: &MlmProblem, max_m: usize, max_n: usize) -> Result<SolveReport> {
    let (m, n) = (p.m(), p.n());
    if m > max_m || n > max_n {
        return Err(Error::TooLarge { m, n, max_m, max_n });
    }
    let start = Instant::now();
    let a = p.a();
    let b = p.b();
    let mut best: Option<(f64, Vec<f64>)> = None;
    let mut evaluated = 0;
    for subset in Combinations::new(m, n) {
        let sub = a.select_rows(&subset);
        let scale: f64 = subset.iter().map(|&i| norm2(a.row(i))).product();
        let Ok(lu) = Lu::new(&sub, 0.0) else { continue };
        if lu.det().abs() <= SINGULAR_TOL * scale {
            continue;
        }
        let rhs: Vec<f64> = subset.iter().map(|&i| b[i]).collect();
        let x = lu.solve(&rhs);
        let cost = p.cost(&x)?;
        evaluated += 1;
        // strict comparison keeps the lexicographically first minimizer
        if best.as_ref().is_none_or(|(c, _)| cost < *c) {
            best = Some((cost, x));
        }
    }
    let (_, x) = best.ok_or(Error::AllSubsetsSingular)?;
    SolveReport::from_x(p, LABEL, x, evaluated, true, start.elapsed())
}

/// [`oracle_solve`] with the default size limits.
pub fn oracle_solve_default(p: &MlmProblem) -> Result<SolveReport> {
    oracle_solve(p, DEFAULT_MAX_M, DEFAULT_MAX_N)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::Matrix;

    fn prob(rows: &[&[f64]], b: &[f64]) -> MlmProblem {
        MlmProblem::new(Matrix::from_rows(rows).unwrap(), b.to_vec()).unwrap()
    }

    #[test]
    fn combinations_are_lexicographic() {
        let all: Vec<_> = Combinations::new(4, 2).collect();
        assert_eq!(
            all,
            vec![vec![0, 1], vec![0, 2], vec![0, 3], vec![1, 2], vec![1, 3], vec![2, 3]]
        );
        assert_eq!(Combinations::new(3, 3).count(), 1);
        assert_eq!(Combinations::new(14, 4).count(), 1001);
    }

    #[test]
    fn square_system_is_exact() {
        let p = prob(&[&[2.0, 1.0], &[1.0, 3.0]], &[3.0, 5.0]);
        let rep = oracle_solve_default(&p).unwrap();
        assert!(rep.objective <= 1e-14);
        assert!((rep.x[0] - 0.8).abs() < 1e-14 && (rep.x[1] - 1.4).abs() < 1e-14);
    }

    #[test]
    fn scalar_fit_is_median() {
        let p = prob(&[&[1.0], &[1.0], &[1.0]], &[1.0, 2.0, 10.0]);
        let rep = oracle_solve_default(&p).unwrap();
        assert_eq!(rep.x, vec![2.0]);
        assert_eq!(rep.objective, 9.0);
    }

    #[test]
    fn even_count_tie_takes_first_subset() {
        // both middle values are optimal; row 1 comes first lexicographically
        let p = prob(&[&[1.0], &[1.0], &[1.0], &[1.0]], &[0.0, 1.0, 3.0, 10.0]);
        let rep = oracle_solve_default(&p).unwrap();
        assert_eq!(rep.x, vec![1.0]);
    }

    #[test]
    fn too_large_is_rejected() {
        let a = Matrix::from_fn(15, 2, |i, j| (i + j) as f64);
        let p = MlmProblem::new(a, vec![0.0; 15]).unwrap();
        assert!(matches!(oracle_solve_default(&p), Err(Error::TooLarge { .. })));
    }

    #[test]
    fn all_singular_is_an_error() {
        let p = prob(&[&[1.0, 2.0], &[2.0, 4.0], &[3.0, 6.0]], &[1.0, 2.0, 3.0]);
        assert_eq!(oracle_solve_default(&p).unwrap_err(), Error::AllSubsetsSingular);
    }
}
