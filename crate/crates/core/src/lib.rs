//! Minimum ℓ1-norm solutions of overdetermined linear systems `Ax = b`.
//!
//! The main route reduces the problem to basis pursuit on the residual error
//! vector `r = Ax − b`: with `A = [A₁; A₂]` split after the first `n` rows,
//!
//! ```text
//! D = [−A₂A₁†, I],   w = A₂A₁†b₁ − b₂,   r_opt = argmin ‖r‖₁ s.t. Dr = w,
//! x_opt = A†(b + r_opt)
//! ```
//!
//! Seven interchangeable solvers for the reduced problem live in [`rev`];
//! [`direct`] holds the two baselines that work on `(A, b)` directly and
//! [`oracle`] an exhaustive reference solver for small instances.

// `!(x <= tol)` is deliberate throughout: a NaN must fail the check
#![allow(clippy::neg_cmp_op_on_partial_ord)]
// index loops read better than iterator chains in the dense kernels
#![allow(clippy::needless_range_loop)]

pub mod bench;
pub mod direct;
mod dispatch;
mod error;
pub mod linalg;
pub mod lp;
pub mod oracle;
mod problem;
pub mod reduction;
pub mod rev;
pub mod rng;

pub use dispatch::{solve, SolveOptions};
pub use error::{Error, Result};
pub use problem::{Method, MlmProblem, SolveReport};
