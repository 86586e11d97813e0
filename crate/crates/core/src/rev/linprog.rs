//! Basis pursuit as the linear program `min 𝟙ᵀβ s.t. [D, −D]β = w, β ⪰ 0`.

use super::{RevResult, SolverParams};
use crate::error::Result;
use crate::linalg::Matrix;
use crate::lp::{lp_solve, LpStandardForm, DEFAULT_FEAS_TOL};
use crate::reduction::ReducedSystem;

pub fn rev_linprog(rs: &ReducedSystem, _params: &SolverParams) -> Result<RevResult> {
    let m = rs.m();
    let neg_d = rs.d.scale(-1.0);
    let phi = Matrix::hstack(&[&rs.d, &neg_d])?;
    let lp = LpStandardForm::new(vec![1.0; 2 * m], phi, rs.w.clone())?;
    let sol = lp_solve(&lp, DEFAULT_FEAS_TOL, lp.default_maxiter())?.require_optimal()?;
    let r = (0..m).map(|i| sol.point[i] - sol.point[m + i]).collect();
    Ok(RevResult::new(rs, r, sol.iterations, true))
}

#[cfg(test)]
mod tests {
    use super::super::test_support::*;
    use super::*;

    #[test]
    fn zero_rhs_gives_zero() {
        let res = rev_linprog(&zero_rhs(), &SolverParams::default()).unwrap();
        assert_eq!(res.r, vec![0.0; 3]);
    }

    #[test]
    fn picks_cheaper_vertex() {
        let res = rev_linprog(&two_vertex(), &SolverParams::default()).unwrap();
        assert_eq!(res.r, vec![1.0, 0.0]);
        assert_eq!(res.objective, 1.0);
    }

    #[test]
    fn identity_block_carries_w() {
        let d = Matrix::from_rows(&[[0.0, 0.0, 1.0, 0.0], [0.0, 0.0, 0.0, 1.0]]).unwrap();
        let res = rev_linprog(&system(d, vec![-3.0, 4.0]), &SolverParams::default()).unwrap();
        assert_eq!(res.r, vec![0.0, 0.0, -3.0, 4.0]);
        assert_eq!(res.objective, 7.0);
    }
}
