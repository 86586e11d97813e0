//! Solvers for the minimum ℓ1-norm residual vector
//!
//! ```text
//! (BP)   min ‖r‖₁  s.t.  Dr = w
//! (BPε)  min ‖r‖₁  s.t.  ‖Dr − w‖₂ ≤ ε
//! (QPλ)  min ½‖Dr − w‖₂² + λ‖r‖₁
//! ```
//!
//! and the driver that wraps reduction, solve, and recovery.

mod adm;
mod gpsr;
mod homotopy;
mod ist;
mod linprog;
mod pob;
mod tnipm;

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

pub use adm::rev_adm;
pub use gpsr::rev_gpsr;
pub use homotopy::{rev_homotopy, rev_homotopy_traced};
pub use ist::{rev_ist, rev_ist_traced};
pub use linprog::rev_linprog;
pub use pob::{pob_defaults, rev_pob};
pub use tnipm::rev_tnipm;

use crate::error::{Error, Result};
use crate::linalg::{norm1, norm2, norm_inf};
use crate::problem::{Method, MlmProblem, SolveReport};
use crate::reduction::{recover, reduce, ReducedSystem, DEFAULT_ZERO_TOL};

#[derive(Debug, Clone, PartialEq)]
pub struct SolverParams {
    /// Stopping / constraint tolerance ε.
    pub epsilon: f64,
    /// Penalty weight λ of (QPλ) for GPSR, TNIPM and IST; the homotopy path
    /// ends at `λ = epsilon` instead.
    pub lambda: f64,
    pub maxiter: usize,
    /// POB proximal parameter; `None` means 0.02.
    pub tau: Option<f64>,
    /// POB or ADM penalty; `None` means `0.999τ/‖D‖₂²` (POB) or `mean|wᵢ|` (ADM).
    pub mu: Option<f64>,
    /// ADM dual step relaxation.
    pub zeta: f64,
    pub zero_tol: f64,
    /// Recompute the ADM dual step length every iteration instead of once.
    pub adm_refresh_step: bool,
    /// Run the first-order solvers (GPSR, IST, ADM, POB) on the equivalent
    /// system `L⁻¹D r = L⁻¹w` with `LLᵀ = DDᵀ`, whose rows are orthonormal.
    /// An ill-conditioned `D` otherwise slows them by orders of magnitude.
    pub orthonormalize_rows: bool,
    /// Warm-started λ-continuation for GPSR and IST; without it both stall
    /// near the minimum-ℓ2 point when λ is tiny.
    pub continuation: bool,
}

impl Default for SolverParams {
    fn default() -> Self {
        SolverParams {
            epsilon: 1e-8,
            lambda: 1e-8,
            maxiter: 10_000,
            tau: None,
            mu: None,
            zeta: 1.618,
            zero_tol: DEFAULT_ZERO_TOL,
            adm_refresh_step: false,
            orthonormalize_rows: true,
            continuation: true,
        }
    }
}

impl SolverParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.epsilon >= 0.0) {
            return Err(Error::InvalidParameter(format!(
                "epsilon = {} must be >= 0",
                self.epsilon
            )));
        }
        if !(self.lambda >= 0.0) {
            return Err(Error::InvalidParameter(format!(
                "lambda = {} must be >= 0",
                self.lambda
            )));
        }
        if self.maxiter == 0 {
            return Err(Error::InvalidParameter("maxiter must be >= 1".into()));
        }
        Ok(())
    }

    fn require_positive_lambda(&self, solver: &str) -> Result<()> {
        if !(self.lambda > 0.0) {
            return Err(Error::InvalidParameter(format!("{solver} requires lambda > 0")));
        }
        Ok(())
    }
}

/// Relative slack on `‖w‖₂` allowed in `‖Dr − w‖₂` on top of ε.
pub const FEAS_REL_SLACK: f64 = 1e-6;

/// Acceptable constraint violation `max(ε, 1e-6·(1 + ‖w‖₂))` for a returned residual.
pub fn feasibility_bound(eps: f64, w_norm: f64) -> f64 {
    eps.max(FEAS_REL_SLACK * (1.0 + w_norm))
}

/// Decreasing λ schedule ending at `lambda`: starts at `‖Dᵀw‖∞/2` and shrinks
/// tenfold per phase. A single phase when continuation is off.
pub(crate) fn lambda_schedule(rs: &ReducedSystem, params: &SolverParams) -> Vec<f64> {
    let lambda = params.lambda;
    if !params.continuation {
        return vec![lambda];
    }
    let mut lam = 0.5 * norm_inf(&rs.d.tr_mul_vec(&rs.w));
    let mut out = Vec::new();
    while lam > lambda {
        out.push(lam);
        lam *= 0.1;
    }
    out.push(lambda);
    out
}

/// Iterations available to continuation phase `k` of `phases` after `used`.
/// Intermediate phases only provide a warm start, so each is capped at
/// `maxiter / (2·phases)`; the final phase gets whatever remains.
pub(crate) fn phase_budget(maxiter: usize, used: usize, k: usize, phases: usize) -> usize {
    let left = maxiter.saturating_sub(used);
    if k + 1 == phases {
        left
    } else {
        left.min((maxiter / (2 * phases)).max(1))
    }
}

/// Minimum-ℓ1 residual vector returned by one REV solver.
#[derive(Debug, Clone, PartialEq)]
pub struct RevResult {
    pub r: Vec<f64>,
    pub iterations: usize,
    pub converged: bool,
    /// `‖r‖₁`.
    pub objective: f64,
    /// `‖Dr − w‖₂`.
    pub feasibility: f64,
}

impl RevResult {
    pub(crate) fn new(rs: &ReducedSystem, r: Vec<f64>, iterations: usize, converged: bool) -> Self {
        let feasibility = rs.constraint_residual(&r).expect("solver output has length m");
        RevResult {
            objective: norm1(&r),
            r,
            iterations,
            converged,
            feasibility,
        }
    }

    pub(crate) fn zero(rs: &ReducedSystem) -> Self {
        RevResult::new(rs, vec![0.0; rs.m()], 0, true)
    }
}

/// REV solver selector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RevMethod {
    LinProg,
    Gpsr,
    Tnipm,
    Homotopy,
    Ist,
    Adm,
    Pob,
}

impl RevMethod {
    pub const ALL: [RevMethod; 7] = [
        RevMethod::LinProg,
        RevMethod::Gpsr,
        RevMethod::Tnipm,
        RevMethod::Homotopy,
        RevMethod::Ist,
        RevMethod::Adm,
        RevMethod::Pob,
    ];

    pub fn name(self) -> &'static str {
        match self {
            RevMethod::LinProg => "linprog",
            RevMethod::Gpsr => "gpsr",
            RevMethod::Tnipm => "tnipm",
            RevMethod::Homotopy => "homotopy",
            RevMethod::Ist => "ist",
            RevMethod::Adm => "adm",
            RevMethod::Pob => "pob",
        }
    }

    pub fn method(self) -> Method {
        match self {
            RevMethod::LinProg => Method::Res,
            RevMethod::Gpsr => Method::Gpsr,
            RevMethod::Tnipm => Method::Tnipm,
            RevMethod::Homotopy => Method::Hp,
            RevMethod::Ist => Method::Ist,
            RevMethod::Adm => Method::Adm,
            RevMethod::Pob => Method::Pob,
        }
    }

    pub fn label(self) -> &'static str {
        self.method().label()
    }

    pub fn from_method(m: Method) -> Option<RevMethod> {
        RevMethod::ALL.into_iter().find(|r| r.method() == m)
    }

    pub fn solve(self, rs: &ReducedSystem, params: &SolverParams) -> Result<RevResult> {
        params.validate()?;
        if rs.w.is_empty() {
            return Ok(RevResult::zero(rs));
        }
        let first_order = matches!(
            self,
            RevMethod::Gpsr | RevMethod::Tnipm | RevMethod::Ist | RevMethod::Adm | RevMethod::Pob
        );
        if first_order && params.orthonormalize_rows {
            if let Some(work) = rs.with_orthonormal_rows() {
                let res = self.solve_on(&work, params)?;
                // report feasibility against the original constraints
                return Ok(RevResult::new(rs, res.r, res.iterations, res.converged));
            }
        }
        self.solve_on(rs, params)
    }

    fn solve_on(self, rs: &ReducedSystem, params: &SolverParams) -> Result<RevResult> {
        match self {
            RevMethod::LinProg => rev_linprog(rs, params),
            RevMethod::Gpsr => rev_gpsr(rs, params),
            RevMethod::Tnipm => rev_tnipm(rs, params),
            RevMethod::Homotopy => rev_homotopy(rs, params),
            RevMethod::Ist => rev_ist(rs, params),
            RevMethod::Adm => rev_adm(rs, params),
            RevMethod::Pob => rev_pob(rs, params),
        }
    }
}

impl fmt::Display for RevMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for RevMethod {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let key = s.trim().to_ascii_lowercase();
        if key == "sparsa" {
            return Ok(RevMethod::Ist);
        }
        if let Some(m) = RevMethod::ALL.into_iter().find(|m| m.name() == key) {
            return Ok(m);
        }
        // accept the report labels as well
        key.parse::<Method>()
            .ok()
            .and_then(RevMethod::from_method)
            .ok_or_else(|| Error::UnknownMethod {
                given: s.to_string(),
                valid: RevMethod::ALL.iter().map(|m| m.name()).collect::<Vec<_>>().join(", "),
            })
    }
}

/// Reduce `(A, b)` to `(D, w)`, solve for the minimum-ℓ1 residual, and recover `x = A†(b + r)`.
pub fn l1_approx_via_min_rev(p: &MlmProblem, method: RevMethod, params: &SolverParams) -> Result<SolveReport> {
    let start = Instant::now();
    let rs = reduce(p);
    let rev = method.solve(&rs, params).map_err(|e| e.in_stage(method.name()))?;
    let x = recover(p, &rs, &rev.r).map_err(|e| e.in_stage("recover"))?;
    let runtime = start.elapsed();
    let mut report = SolveReport::from_x(p, method.label(), x, rev.iterations, rev.converged, runtime)?;
    report.rev_feasibility = Some(rev.feasibility);
    report.rev_rhs_norm = Some(norm2(&rs.w));
    report.warnings = rs.warnings;
    Ok(report)
}

#[cfg(test)]
pub(crate) mod test_support {
    use super::*;
    use crate::linalg::Matrix;

    /// Reduced system with the given `D` and `w` (other blocks are placeholders).
    pub fn system(d: Matrix, w: Vec<f64>) -> ReducedSystem {
        ReducedSystem {
            a1: Matrix::zeros(0, 0),
            a2: Matrix::zeros(0, 0),
            a1_pinv: Matrix::zeros(0, 0),
            a_pinv: Matrix::zeros(0, 0),
            d,
            w,
            warnings: Vec::new(),
        }
    }

    /// `D = [1, 0.5]`, `w = [1]`; the vertices are `(1, 0)` and `(0, 2)`.
    pub fn two_vertex() -> ReducedSystem {
        system(Matrix::from_rows(&[[1.0, 0.5]]).unwrap(), vec![1.0])
    }

    pub fn zero_rhs() -> ReducedSystem {
        system(
            Matrix::from_rows(&[[1.0, 0.5, -2.0], [0.3, 1.0, 0.7]]).unwrap(),
            vec![0.0, 0.0],
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rev_method_names() {
        for m in RevMethod::ALL {
            assert_eq!(m.name().parse::<RevMethod>().unwrap(), m);
            assert_eq!(m.label().parse::<RevMethod>().unwrap(), m);
        }
        assert!("simplex".parse::<RevMethod>().is_err());
        assert_eq!("linprog".parse::<RevMethod>().unwrap().label(), "L1-RES");
    }

    #[test]
    fn parameter_validation() {
        let p = SolverParams {
            maxiter: 0,
            ..Default::default()
        };
        assert!(p.validate().is_err());
        let p = SolverParams {
            lambda: -1.0,
            ..Default::default()
        };
        assert!(p.validate().is_err());
    }

    #[test]
    fn intermediate_phases_leave_budget_for_the_last() {
        assert_eq!(phase_budget(1000, 0, 0, 5), 100);
        assert_eq!(phase_budget(1000, 400, 4, 5), 600);
        assert_eq!(phase_budget(1000, 990, 1, 5), 10);
        assert_eq!(phase_budget(3, 0, 0, 4), 1);
    }
}
