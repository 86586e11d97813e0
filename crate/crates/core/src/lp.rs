//! Dense two-phase primal simplex for standard-form linear programs
//!
//! ```text
//! min cᵀy  s.t.  A y = b,  y ⪰ 0
//! ```
//!
//! Pricing is Dantzig's (most negative reduced cost, lowest index on ties);
//! after [`DEGENERATE_RUN`] consecutive degenerate pivots it switches to Bland's
//! rule (lowest-index improving column) until the objective moves again, which
//! rules out cycling. Ratio-test ties leave by lowest basic-variable index. The optimal basis is
//! re-solved from the original data with a fresh LU factorization so the
//! returned vertex does not carry accumulated tableau round-off.

use crate::error::{Error, Result};
use crate::linalg::{norm_inf, Lu, Matrix};

pub const DEFAULT_FEAS_TOL: f64 = 1e-9;
/// Consecutive zero-step pivots tolerated before Bland's rule takes over.
pub const DEGENERATE_RUN: usize = 50;

#[derive(Debug, Clone, PartialEq)]
pub struct LpStandardForm {
    pub cost: Vec<f64>,
    pub eq_matrix: Matrix,
    pub eq_rhs: Vec<f64>,
}

impl LpStandardForm {
    pub fn new(cost: Vec<f64>, eq_matrix: Matrix, eq_rhs: Vec<f64>) -> Result<Self> {
        if eq_matrix.rows() != eq_rhs.len() || eq_matrix.cols() != cost.len() {
            return Err(Error::dims(
                "LpStandardForm",
                format!(
                    "matrix {:?}, rhs {}, cost {}",
                    eq_matrix.shape(),
                    eq_rhs.len(),
                    cost.len()
                ),
            ));
        }
        Ok(LpStandardForm {
            cost,
            eq_matrix,
            eq_rhs,
        })
    }

    pub fn dimension(&self) -> usize {
        self.cost.len()
    }

    /// `50 · (rows + cols)`.
    pub fn default_maxiter(&self) -> usize {
        50 * (self.eq_matrix.rows() + self.eq_matrix.cols())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
    IterationLimit,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LpSolution {
    pub point: Vec<f64>,
    pub objective: f64,
    pub status: LpStatus,
    /// Pivots performed across both phases.
    pub iterations: usize,
}

impl LpSolution {
    /// Turns any non-optimal status into an [`Error::LpFailure`].
    pub fn require_optimal(self) -> Result<LpSolution> {
        let why = match self.status {
            LpStatus::Optimal => return Ok(self),
            LpStatus::Infeasible => "infeasible".to_string(),
            LpStatus::Unbounded => "unbounded".to_string(),
            LpStatus::IterationLimit => format!("iteration limit after {} pivots", self.iterations),
        };
        Err(Error::LpFailure(why))
    }
}

struct Tableau {
    /// `rows` constraint rows followed by one objective row; last column is the rhs.
    t: Matrix,
    basis: Vec<usize>,
    rows: usize,
}

enum Outcome {
    Optimal,
    Unbounded,
    IterationLimit,
}

impl Tableau {
    fn rhs_col(&self) -> usize {
        self.t.cols() - 1
    }

    fn pivot(&mut self, row: usize, col: usize) {
        let width = self.t.cols();
        let pv = self.t[(row, col)];
        for j in 0..width {
            self.t[(row, j)] /= pv;
        }
        let pivot_row = self.t.row(row).to_vec();
        for i in 0..=self.rows {
            if i == row {
                continue;
            }
            let f = self.t[(i, col)];
            if f != 0.0 {
                let r = self.t.row_mut(i);
                for (x, p) in r.iter_mut().zip(&pivot_row) {
                    *x -= f * p;
                }
                r[col] = 0.0;
            }
        }
        self.basis[row] = col;
    }

    /// Simplex over the columns `0..ncols`.
    fn run(&mut self, ncols: usize, tol: f64, iters: &mut usize, maxiter: usize) -> Outcome {
        let obj = self.rows;
        let rhs = self.rhs_col();
        let mut degenerate = 0;
        loop {
            let entering = if degenerate >= DEGENERATE_RUN {
                (0..ncols).find(|&j| self.t[(obj, j)] < -tol)
            } else {
                let mut best: Option<(usize, f64)> = None;
                for j in 0..ncols {
                    let d = self.t[(obj, j)];
                    if d < -tol && best.is_none_or(|(_, bd)| d < bd) {
                        best = Some((j, d));
                    }
                }
                best.map(|(j, _)| j)
            };
            let Some(col) = entering else {
                return Outcome::Optimal;
            };
            let mut leave: Option<(usize, f64)> = None;
            for i in 0..self.rows {
                let a = self.t[(i, col)];
                if a > tol {
                    let ratio = self.t[(i, rhs)].max(0.0) / a;
                    leave = match leave {
                        None => Some((i, ratio)),
                        Some((li, lr)) => {
                            if ratio < lr || (ratio == lr && self.basis[i] < self.basis[li]) {
                                Some((i, ratio))
                            } else {
                                Some((li, lr))
                            }
                        }
                    };
                }
            }
            let Some((row, ratio)) = leave else {
                return Outcome::Unbounded;
            };
            if ratio == 0.0 {
                degenerate += 1;
            } else {
                degenerate = 0;
            }
            if *iters >= maxiter {
                return Outcome::IterationLimit;
            }
            *iters += 1;
            self.pivot(row, col);
        }
    }
}

/// Solves a standard-form LP. Infeasibility, unboundedness, and the iteration
/// limit are reported through [`LpStatus`]; only non-finite input is an error.
pub fn lp_solve(p: &LpStandardForm, feas_tol: f64, maxiter: usize) -> Result<LpSolution> {
    if !p.eq_matrix.is_finite() {
        return Err(Error::NonFinite("LP constraint matrix"));
    }
    if !p.eq_rhs.iter().chain(&p.cost).all(|x| x.is_finite()) {
        return Err(Error::NonFinite("LP cost or rhs"));
    }
    let (m, n) = p.eq_matrix.shape();
    let b_scale = 1.0 + norm_inf(&p.eq_rhs);
    let piv_tol = feas_tol * 1e-3;

    // phase 1 tableau: [A | I_art | b], objective = sum of artificials
    let width = n + m + 1;
    let mut t = Matrix::zeros(m + 1, width);
    for i in 0..m {
        let flip = if p.eq_rhs[i] < 0.0 { -1.0 } else { 1.0 };
        let row = t.row_mut(i);
        for (x, a) in row[..n].iter_mut().zip(p.eq_matrix.row(i)) {
            *x = flip * a;
        }
        row[n + i] = 1.0;
        row[width - 1] = flip * p.eq_rhs[i];
    }
    for i in 0..m {
        for j in 0..n {
            t[(m, j)] -= t[(i, j)];
        }
        t[(m, width - 1)] -= t[(i, width - 1)];
    }
    let mut tab = Tableau {
        t,
        basis: (n..n + m).collect(),
        rows: m,
    };
    let mut iters = 0;
    let outcome = tab.run(n + m, piv_tol, &mut iters, maxiter);
    let limited = |iters| LpSolution {
        point: vec![0.0; n],
        objective: f64::NAN,
        status: LpStatus::IterationLimit,
        iterations: iters,
    };
    if let Outcome::IterationLimit = outcome {
        return Ok(limited(iters));
    }
    let infeasibility = -tab.t[(m, width - 1)];
    if infeasibility > feas_tol * b_scale {
        return Ok(LpSolution {
            point: vec![0.0; n],
            objective: f64::NAN,
            status: LpStatus::Infeasible,
            iterations: iters,
        });
    }

    // drive artificials out of the basis; rows where that is impossible are redundant
    let mut keep = vec![true; m];
    for i in 0..m {
        if tab.basis[i] < n {
            continue;
        }
        let col = (0..n)
            .filter(|&j| tab.t[(i, j)].abs() > piv_tol)
            .max_by(|&a, &b| tab.t[(i, a)].abs().total_cmp(&tab.t[(i, b)].abs()));
        match col {
            Some(j) => tab.pivot(i, j),
            None => keep[i] = false,
        }
    }
    let kept: Vec<usize> = (0..m).filter(|&i| keep[i]).collect();
    let mut t2 = Matrix::zeros(kept.len() + 1, n + 1);
    let mut basis = Vec::with_capacity(kept.len());
    for (r, &i) in kept.iter().enumerate() {
        let src = tab.t.row(i);
        let dst = t2.row_mut(r);
        dst[..n].copy_from_slice(&src[..n]);
        dst[n] = src[width - 1];
        basis.push(tab.basis[i]);
    }
    let rows = kept.len();
    // phase 2 objective row: reduced costs c_j − c_Bᵀ B⁻¹ a_j
    {
        let obj = t2.row_mut(rows);
        obj[..n].copy_from_slice(&p.cost);
        obj[n] = 0.0;
    }
    for r in 0..rows {
        let cb = p.cost[basis[r]];
        if cb != 0.0 {
            for j in 0..=n {
                let v = t2[(r, j)];
                t2[(rows, j)] -= cb * v;
            }
        }
    }
    let mut tab = Tableau { t: t2, basis, rows };
    let cost_tol = piv_tol * (1.0 + norm_inf(&p.cost));
    let outcome = tab.run(n, cost_tol, &mut iters, maxiter);
    match outcome {
        Outcome::IterationLimit => return Ok(limited(iters)),
        Outcome::Unbounded => {
            return Ok(LpSolution {
                point: vec![0.0; n],
                objective: f64::NEG_INFINITY,
                status: LpStatus::Unbounded,
                iterations: iters,
            })
        }
        Outcome::Optimal => {}
    }

    let mut point = vec![0.0; n];
    for r in 0..rows {
        point[tab.basis[r]] = tab.t[(r, n)];
    }
    if let Some(refined) = refine_basic_solution(p, &kept, &tab.basis) {
        let residual = |y: &[f64]| {
            let ay = p.eq_matrix.mul_vec(y);
            ay.iter().zip(&p.eq_rhs).fold(0.0f64, |m, (a, b)| m.max((a - b).abs()))
        };
        if residual(&refined) <= residual(&point) {
            point = refined;
        }
    }
    let objective = point.iter().zip(&p.cost).map(|(y, c)| y * c).sum();
    Ok(LpSolution {
        point,
        objective,
        status: LpStatus::Optimal,
        iterations: iters,
    })
}

/// Re-solves `B y_B = b` on the kept rows with a fresh LU factorization.
fn refine_basic_solution(p: &LpStandardForm, kept: &[usize], basis: &[usize]) -> Option<Vec<f64>> {
    let k = kept.len();
    let bmat = Matrix::from_fn(k, k, |r, c| p.eq_matrix[(kept[r], basis[c])]);
    let rhs: Vec<f64> = kept.iter().map(|&i| p.eq_rhs[i]).collect();
    let lu = Lu::new(&bmat, 0.0).ok()?;
    let yb = lu.solve(&rhs);
    if !yb.iter().all(|x| x.is_finite()) {
        return None;
    }
    let mut point = vec![0.0; p.dimension()];
    for (c, &j) in basis.iter().enumerate() {
        point[j] = yb[c];
    }
    Some(point)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lp(cost: &[f64], rows: &[&[f64]], rhs: &[f64]) -> LpStandardForm {
        LpStandardForm::new(cost.to_vec(), Matrix::from_rows(rows).unwrap(), rhs.to_vec()).unwrap()
    }

    fn solve(p: &LpStandardForm) -> LpSolution {
        lp_solve(p, DEFAULT_FEAS_TOL, p.default_maxiter()).unwrap()
    }

    #[test]
    fn single_variable() {
        let s = solve(&lp(&[1.0], &[&[1.0]], &[1.0]));
        assert_eq!(s.status, LpStatus::Optimal);
        assert_eq!(s.point, vec![1.0]);
        assert_eq!(s.objective, 1.0);
    }

    #[test]
    fn degenerate_tie_returns_vertex() {
        let s = solve(&lp(&[1.0, 1.0], &[&[1.0, 1.0]], &[1.0]));
        assert_eq!(s.status, LpStatus::Optimal);
        assert!((s.objective - 1.0).abs() < 1e-15);
        assert!(s.point == vec![1.0, 0.0] || s.point == vec![0.0, 1.0]);
    }

    #[test]
    fn infeasible() {
        let s = solve(&lp(&[1.0], &[&[1.0]], &[-1.0]));
        assert_eq!(s.status, LpStatus::Infeasible);
    }

    #[test]
    fn unbounded() {
        // min −y1 s.t. y1 − y2 = 0
        let s = solve(&lp(&[-1.0, 0.0], &[&[1.0, -1.0]], &[0.0]));
        assert_eq!(s.status, LpStatus::Unbounded);
    }

    #[test]
    fn redundant_rows_are_dropped() {
        let s = solve(&lp(
            &[1.0, 2.0, 0.0],
            &[&[1.0, 1.0, 1.0], &[2.0, 2.0, 2.0]],
            &[1.0, 2.0],
        ));
        assert_eq!(s.status, LpStatus::Optimal);
        assert!(s.objective.abs() < 1e-15);
        assert!((s.point[2] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn iteration_limit() {
        let p = lp(&[1.0, 1.0], &[&[1.0, 2.0], &[3.0, 1.0]], &[4.0, 5.0]);
        let s = lp_solve(&p, DEFAULT_FEAS_TOL, 0).unwrap();
        assert_eq!(s.status, LpStatus::IterationLimit);
    }

    #[test]
    fn nan_is_an_error() {
        let p = lp(&[f64::NAN], &[&[1.0]], &[1.0]);
        assert!(lp_solve(&p, DEFAULT_FEAS_TOL, 10).is_err());
    }

    #[test]
    fn textbook_problem() {
        // min −3x −5y, x + s1 = 4, 2y + s2 = 12, 3x + 2y + s3 = 18 → (2, 6), −36
        let s = solve(&lp(
            &[-3.0, -5.0, 0.0, 0.0, 0.0],
            &[
                &[1.0, 0.0, 1.0, 0.0, 0.0],
                &[0.0, 2.0, 0.0, 1.0, 0.0],
                &[3.0, 2.0, 0.0, 0.0, 1.0],
            ],
            &[4.0, 12.0, 18.0],
        ));
        assert_eq!(s.status, LpStatus::Optimal);
        assert!((s.objective + 36.0).abs() < 1e-12);
        assert!((s.point[0] - 2.0).abs() < 1e-12 && (s.point[1] - 6.0).abs() < 1e-12);
    }
}
