use crate::direct::{l1_approx_linprog, l1_approx_pert_cbs, PertOptions};
use crate::error::{Error, Result};
use crate::oracle::oracle_solve_default;
use crate::problem::{Method, MlmProblem, SolveReport};
use crate::rev::{l1_approx_via_min_rev, RevMethod, SolverParams};

/// Settings for every method reachable through [`solve`].
#[derive(Debug, Clone, Default, PartialEq)]
pub struct SolveOptions {
    pub rev: SolverParams,
    pub pert: PertOptions,
}

/// Runs `method` on `p`.
pub fn solve(p: &MlmProblem, method: Method, opts: &SolveOptions) -> Result<SolveReport> {
    match method {
        Method::Lp => l1_approx_linprog(p),
        Method::Ptb => l1_approx_pert_cbs(p, &opts.pert),
        Method::Oracle => oracle_solve_default(p),
        m => {
            let rev = RevMethod::from_method(m).ok_or_else(|| Error::UnknownMethod {
                given: m.label().into(),
                valid: Method::valid_names(),
            })?;
            l1_approx_via_min_rev(p, rev, &opts.rev)
        }
    }
}
