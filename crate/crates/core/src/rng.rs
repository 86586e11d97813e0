//! Seeded random numbers with a fixed, documented algorithm so that instances
//! can be regenerated bit-for-bit from a seed in any language.
//!
//! * Generator: SplitMix64. The state starts at `seed`; each draw adds
//!   `0x9E3779B97F4A7C15` (wrapping) and returns the 64-bit finalizer
//!   `z ^= z >> 30; z *= 0xBF58476D1CE4E5B9; z ^= z >> 27; z *= 0x94D049BB133111EB; z ^= z >> 31`.
//! * Uniform `(0, 1]`: `((u >> 11) + 1) · 2⁻⁵³`.
//! * Standard normal: Box–Muller on two consecutive uniforms `u₁, u₂`,
//!   `ρ = sqrt(−2 ln u₁)`, yielding `ρ cos(2πu₂)` first and `ρ sin(2πu₂)` on the
//!   next call.
//! * Integer in `0..k`: `(u · k) >> 64` computed in 128 bits.
//! * Sampling without replacement: partial Fisher–Yates over `0..m`; step `i`
//!   swaps position `i` with `i + below(m − i)`; the first `k` positions,
//!   sorted ascending, are the sample.

use std::f64::consts::TAU;

#[derive(Debug, Clone)]
pub struct SplitMix64 {
    state: u64,
    spare_normal: Option<f64>,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        SplitMix64 {
            state: seed,
            spare_normal: None,
        }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9E37_79B9_7F4A_7C15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }

    /// Uniform on `(0, 1]`.
    pub fn uniform(&mut self) -> f64 {
        ((self.next_u64() >> 11) + 1) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    pub fn normal(&mut self) -> f64 {
        if let Some(z) = self.spare_normal.take() {
            return z;
        }
        let u1 = self.uniform();
        let u2 = self.uniform();
        let rho = (-2.0 * u1.ln()).sqrt();
        self.spare_normal = Some(rho * (TAU * u2).sin());
        rho * (TAU * u2).cos()
    }

    /// Integer in `0..k`; `k` must be positive.
    pub fn below(&mut self, k: usize) -> usize {
        ((self.next_u64() as u128 * k as u128) >> 64) as usize
    }

    /// `k` distinct positions from `0..m`, ascending.
    pub fn sample_indices(&mut self, m: usize, k: usize) -> Vec<usize> {
        let k = k.min(m);
        let mut pool: Vec<usize> = (0..m).collect();
        for i in 0..k {
            let j = i + self.below(m - i);
            pool.swap(i, j);
        }
        let mut out = pool[..k].to_vec();
        out.sort_unstable();
        out
    }
}
