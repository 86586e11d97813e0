//! Element-wise vector operations on `&[f64]`.

use crate::error::{Error, Result};

fn check_len(op: &'static str, a: &[f64], b: &[f64]) -> Result<()> {
    if a.len() != b.len() {
        return Err(Error::dims(op, format!("lengths {} and {}", a.len(), b.len())));
    }
    Ok(())
}

pub fn norm1(v: &[f64]) -> f64 {
    v.iter().map(|x| x.abs()).sum()
}

pub fn norm2(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

pub fn norm_inf(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Component-wise product `a ⊙ b`.
pub fn hadamard(a: &[f64], b: &[f64]) -> Result<Vec<f64>> {
    check_len("hadamard", a, b)?;
    Ok(a.iter().zip(b).map(|(x, y)| x * y).collect())
}

/// Component-wise quotient `a ⊘ b`.
pub fn elemdiv(a: &[f64], b: &[f64]) -> Result<Vec<f64>> {
    check_len("elemdiv", a, b)?;
    a.iter()
        .zip(b)
        .enumerate()
        .map(|(i, (x, y))| {
            if *y == 0.0 {
                Err(Error::DivisionByZero(i))
            } else {
                Ok(x / y)
            }
        })
        .collect()
}

/// `v⁺ = max(v, 0)`.
pub fn positive_part(v: &[f64]) -> Vec<f64> {
    v.iter().map(|&x| x.max(0.0)).collect()
}

/// `v⁻ = max(−v, 0)`, so that `v = v⁺ − v⁻`.
pub fn negative_part(v: &[f64]) -> Vec<f64> {
    v.iter().map(|&x| (-x).max(0.0)).collect()
}

/// Sign with `sign(0) = 0`.
#[inline]
pub fn sign(x: f64) -> f64 {
    if x > 0.0 {
        1.0
    } else if x < 0.0 {
        -1.0
    } else {
        0.0
    }
}

pub fn sign_vector(v: &[f64]) -> Vec<f64> {
    v.iter().map(|&x| sign(x)).collect()
}

/// Shrinkage `sign(u)·max(|u| − a, 0)`.
#[inline]
pub fn soft(u: f64, a: f64) -> f64 {
    sign(u) * (u.abs() - a).max(0.0)
}

pub fn soft_vec(u: &[f64], a: f64) -> Vec<f64> {
    u.iter().map(|&x| soft(x, a)).collect()
}

pub fn add(a: &[f64], b: &[f64]) -> Result<Vec<f64>> {
    check_len("add", a, b)?;
    Ok(a.iter().zip(b).map(|(x, y)| x + y).collect())
}

pub fn sub(a: &[f64], b: &[f64]) -> Result<Vec<f64>> {
    check_len("sub", a, b)?;
    Ok(a.iter().zip(b).map(|(x, y)| x - y).collect())
}

pub fn scale(a: &[f64], s: f64) -> Vec<f64> {
    a.iter().map(|x| x * s).collect()
}

/// `y ← y + alpha·x`.
#[inline]
pub fn axpy(alpha: f64, x: &[f64], y: &mut [f64]) {
    debug_assert_eq!(x.len(), y.len());
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}
