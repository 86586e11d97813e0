use std::fmt;
use std::str::FromStr;
use std::time::Duration;

use crate::error::{Error, Result};
use crate::linalg::{norm1, Matrix};

/// Overdetermined linear model `Ax = b`.
#[derive(Debug, Clone, PartialEq)]
pub struct MlmProblem {
    a: Matrix,
    b: Vec<f64>,
}

impl MlmProblem {
    /// Accepts any `m ≥ n ≥ 1` with finite entries. The experiment generators
    /// and the CLI data generator additionally insist on `m > n ≥ 2`.
    pub fn new(a: Matrix, b: Vec<f64>) -> Result<Self> {
        let (m, n) = a.shape();
        if b.len() != m {
            return Err(Error::dims("MlmProblem", format!("A is {m}x{n} but b has {}", b.len())));
        }
        if n == 0 || m < n {
            return Err(Error::InvalidProblem(format!("need m >= n >= 1, got m = {m}, n = {n}")));
        }
        if !a.is_finite() || !b.iter().all(|x| x.is_finite()) {
            return Err(Error::NonFinite("problem data"));
        }
        Ok(MlmProblem { a, b })
    }

    pub fn a(&self) -> &Matrix {
        &self.a
    }

    pub fn b(&self) -> &[f64] {
        &self.b
    }

    pub fn m(&self) -> usize {
        self.a.rows()
    }

    pub fn n(&self) -> usize {
        self.a.cols()
    }

    /// Residual error vector `Ax − b`.
    pub fn residual(&self, x: &[f64]) -> Result<Vec<f64>> {
        let ax = self.a.matvec(x)?;
        Ok(ax.iter().zip(&self.b).map(|(p, q)| p - q).collect())
    }

    /// Cost `C₁(x) = ‖Ax − b‖₁`.
    pub fn cost(&self, x: &[f64]) -> Result<f64> {
        Ok(norm1(&self.residual(x)?))
    }
}

/// Every solver reachable from the front ends, named by its report label.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Method {
    /// Perturbation method working on `(A, b)` directly.
    Ptb,
    /// Linear program on `(A, b)` directly.
    Lp,
    Res,
    Gpsr,
    Tnipm,
    Hp,
    Ist,
    Adm,
    Pob,
    Oracle,
}

impl Method {
    pub const ALL: [Method; 10] = [
        Method::Ptb,
        Method::Lp,
        Method::Res,
        Method::Gpsr,
        Method::Tnipm,
        Method::Hp,
        Method::Ist,
        Method::Adm,
        Method::Pob,
        Method::Oracle,
    ];

    /// The methods that go through the residual-vector reduction.
    pub const REV: [Method; 7] = [
        Method::Res,
        Method::Gpsr,
        Method::Tnipm,
        Method::Hp,
        Method::Ist,
        Method::Adm,
        Method::Pob,
    ];

    pub fn label(self) -> &'static str {
        match self {
            Method::Ptb => "L1-PTB",
            Method::Lp => "L1-LP",
            Method::Res => "L1-RES",
            Method::Gpsr => "L1-GPSR",
            Method::Tnipm => "L1-TNIPM",
            Method::Hp => "L1-HP",
            Method::Ist => "L1-IST",
            Method::Adm => "L1-ADM",
            Method::Pob => "L1-POB",
            Method::Oracle => "ORACLE",
        }
    }

    /// Lower-case command-line spelling.
    pub fn cli_name(self) -> &'static str {
        match self {
            Method::Oracle => "oracle",
            Method::Ptb => "l1-ptb",
            Method::Lp => "l1-lp",
            Method::Res => "l1-res",
            Method::Gpsr => "l1-gpsr",
            Method::Tnipm => "l1-tnipm",
            Method::Hp => "l1-hp",
            Method::Ist => "l1-ist",
            Method::Adm => "l1-adm",
            Method::Pob => "l1-pob",
        }
    }

    pub fn is_rev(self) -> bool {
        Method::REV.contains(&self)
    }

    pub fn valid_names() -> String {
        Method::ALL.iter().map(|m| m.cli_name()).collect::<Vec<_>>().join(", ")
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let key = s.trim().to_ascii_lowercase();
        if key == "l1-sparsa" {
            return Ok(Method::Ist);
        }
        Method::ALL
            .iter()
            .copied()
            .find(|m| m.cli_name() == key)
            .ok_or_else(|| Error::UnknownMethod {
                given: s.to_string(),
                valid: Method::valid_names(),
            })
    }
}

/// Outcome of one solve.
#[derive(Debug, Clone, PartialEq)]
pub struct SolveReport {
    pub label: &'static str,
    pub x: Vec<f64>,
    /// Residual `Ax − b` at `x`.
    pub r: Vec<f64>,
    /// `C₁(x) = ‖Ax − b‖₁`.
    pub objective: f64,
    pub iterations: usize,
    pub converged: bool,
    pub runtime: Duration,
    /// `‖Dr − w‖₂` of the reduced-problem solution, for REV methods.
    pub rev_feasibility: Option<f64>,
    /// `‖w‖₂` of the reduced problem, for REV methods.
    pub rev_rhs_norm: Option<f64>,
    pub warnings: Vec<String>,
}

impl SolveReport {
    pub(crate) fn from_x(
        p: &MlmProblem,
        label: &'static str,
        x: Vec<f64>,
        iterations: usize,
        converged: bool,
        runtime: Duration,
    ) -> Result<SolveReport> {
        let r = p.residual(&x)?;
        Ok(SolveReport {
            label,
            objective: norm1(&r),
            x,
            r,
            iterations,
            converged,
            runtime,
            rev_feasibility: None,
            rev_rhs_norm: None,
            warnings: Vec::new(),
        })
    }

    /// `‖Dr − w‖₂ / feasibility_bound(eps, ‖w‖₂)` for REV methods; `≤ 1` is feasible.
    pub fn feasibility_ratio(&self, eps: f64) -> Option<f64> {
        Some(self.rev_feasibility? / crate::rev::feasibility_bound(eps, self.rev_rhs_norm?))
    }
}
