#![allow(dead_code)]

use l1rev_core::bench::{add_sparse_noise, gen_instance};
use l1rev_core::linalg::Matrix;
use l1rev_core::rng::SplitMix64;
use l1rev_core::MlmProblem;

/// Gaussian instance with dense `N(0, 1)` noise on every entry of `b`.
pub fn noisy_instance(m: usize, n: usize, seed: u64) -> MlmProblem {
    let (p, _) = gen_instance(m, n, seed).unwrap();
    let b = add_sparse_noise(p.b(), 1.0, 1.0, seed ^ 0xA5A5_A5A5).unwrap();
    MlmProblem::new(p.a().clone(), b).unwrap()
}

pub fn gaussian_matrix(rows: usize, cols: usize, rng: &mut SplitMix64) -> Matrix {
    Matrix::from_fn(rows, cols, |_, _| rng.normal())
}

pub fn rel_diff(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)
}
