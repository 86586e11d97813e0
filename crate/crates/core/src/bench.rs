//! Experiment harness: seeded instance generation, sparse outlier noise,
//! repeated solves, and CSV summaries of the mean relative error
//! `η = ‖x̂ − p‖₂ / ‖p‖₂` and wall time.
//!
//! Repetition `k` of a configuration uses seed `seed + k` for the instance
//! and `seed + k + NOISE_SEED_OFFSET` (wrapping) for the noise, so every
//! method sees the same data.

use std::io::{self, Write};
use std::thread;
use std::time::Instant;

use crate::dispatch::{solve, SolveOptions};
use crate::error::{Error, Result};
use crate::linalg::{norm2, Matrix};
use crate::problem::{Method, MlmProblem};
use crate::rng::SplitMix64;

pub const NOISE_SEED_OFFSET: u64 = 0x9E37_79B9_7F4A_7C15;
pub const DEFAULT_DRL_GRID: [f64; 7] = [1.25, 1.5, 2.0, 3.0, 4.0, 6.0, 8.0];
pub const DEFAULT_SPARSITY_RATIOS: [f64; 3] = [0.25, 0.5, 0.75];
pub const DEFAULT_NOISE_VARIANCE: f64 = 0.25;
pub const THREADS_ENV: &str = "L1REV_THREADS";
pub const CSV_HEADER: &str = "method,m,n,sparsity,drl,mean_rel_err,mean_runtime_s,repeats,errors";

/// Gaussian `A` (`m × n`, filled row by row) and `p` (drawn after `A`), with `b = Ap`.
pub fn gen_instance(m: usize, n: usize, seed: u64) -> Result<(MlmProblem, Vec<f64>)> {
    if !(m > n && n >= 2) {
        return Err(Error::InvalidParameter(format!(
            "need m > n >= 2, got m = {m}, n = {n}"
        )));
    }
    let mut rng = SplitMix64::new(seed);
    let a = Matrix::from_fn(m, n, |_, _| rng.normal());
    let p: Vec<f64> = (0..n).map(|_| rng.normal()).collect();
    let b = a.mul_vec(&p);
    Ok((MlmProblem::new(a, b)?, p))
}

/// How the noise level argument is read.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum NoiseScale {
    #[default]
    Variance,
    StdDev,
}

/// `b + q` where `q` has `round(γ·m)` nonzero `N(0, variance)` entries at
/// positions drawn uniformly without replacement.
pub fn add_sparse_noise(b: &[f64], gamma: f64, variance: f64, seed: u64) -> Result<Vec<f64>> {
    add_sparse_noise_with(b, gamma, variance, NoiseScale::Variance, seed)
}

pub fn add_sparse_noise_with(b: &[f64], gamma: f64, level: f64, scale: NoiseScale, seed: u64) -> Result<Vec<f64>> {
    if !(0.0..=1.0).contains(&gamma) {
        return Err(Error::InvalidParameter(format!(
            "sparsity ratio {gamma} outside [0, 1]"
        )));
    }
    if !(level >= 0.0 && level.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "noise level {level} must be finite and >= 0"
        )));
    }
    let std = match scale {
        NoiseScale::Variance => level.sqrt(),
        NoiseScale::StdDev => level,
    };
    let k = (gamma * b.len() as f64).round() as usize;
    let mut rng = SplitMix64::new(seed);
    let idx = rng.sample_indices(b.len(), k);
    let mut out = b.to_vec();
    for i in idx {
        out[i] += std * rng.normal();
    }
    Ok(out)
}

/// `‖x̂ − p‖₂ / ‖p‖₂`.
pub fn relative_error(x_hat: &[f64], p: &[f64]) -> f64 {
    let diff: Vec<f64> = x_hat.iter().zip(p).map(|(a, b)| a - b).collect();
    norm2(&diff) / norm2(p)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExperimentKind {
    NoiseFree,
    SparseNoise,
    DrlSweep,
}

impl ExperimentKind {
    pub fn name(self) -> &'static str {
        match self {
            ExperimentKind::NoiseFree => "noise-free",
            ExperimentKind::SparseNoise => "sparse-noise",
            ExperimentKind::DrlSweep => "drl",
        }
    }
}

impl std::str::FromStr for ExperimentKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().replace('_', "-").as_str() {
            "noise-free" => Ok(ExperimentKind::NoiseFree),
            "sparse-noise" => Ok(ExperimentKind::SparseNoise),
            "drl" | "drl-sweep" => Ok(ExperimentKind::DrlSweep),
            _ => Err(Error::InvalidParameter(format!(
                "unknown experiment '{s}' (valid: noise-free, sparse-noise, drl)"
            ))),
        }
    }
}

/// Data-generation recipe for one experiment.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentSpec {
    pub kind: ExperimentKind,
    /// Row count; ignored by DRL sweeps, which use `round(drl · n)`.
    pub m: usize,
    pub n: usize,
    pub repeats: usize,
    pub seed: u64,
    pub sparsity_ratios: Vec<f64>,
    pub noise_variance: f64,
    pub noise_scale: NoiseScale,
    pub drl_values: Vec<f64>,
    pub methods: Vec<Method>,
    pub options: SolveOptions,
    /// Worker threads across repetitions.
    pub threads: usize,
}

/// One `(m, n, γ)` cell of an experiment.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Configuration {
    pub m: usize,
    pub n: usize,
    pub sparsity: f64,
    pub drl: f64,
}

/// Every method except the exhaustive oracle.
pub fn default_methods() -> Vec<Method> {
    Method::ALL.into_iter().filter(|&m| m != Method::Oracle).collect()
}

impl ExperimentSpec {
    fn base(kind: ExperimentKind, m: usize, n: usize, repeats: usize, seed: u64) -> Self {
        ExperimentSpec {
            kind,
            m,
            n,
            repeats,
            seed,
            sparsity_ratios: Vec::new(),
            noise_variance: DEFAULT_NOISE_VARIANCE,
            noise_scale: NoiseScale::Variance,
            drl_values: Vec::new(),
            methods: default_methods(),
            options: SolveOptions::default(),
            threads: 1,
        }
    }

    pub fn noise_free(m: usize, n: usize, repeats: usize, seed: u64) -> Self {
        Self::base(ExperimentKind::NoiseFree, m, n, repeats, seed)
    }

    pub fn sparse_noise(m: usize, n: usize, repeats: usize, seed: u64, ratios: &[f64]) -> Self {
        ExperimentSpec {
            sparsity_ratios: ratios.to_vec(),
            ..Self::base(ExperimentKind::SparseNoise, m, n, repeats, seed)
        }
    }

    /// Sweep over `m = round(drl · n)` with sparse noise at ratio 0.25.
    pub fn drl_sweep(n: usize, repeats: usize, seed: u64, drl_values: &[f64]) -> Self {
        ExperimentSpec {
            sparsity_ratios: vec![0.25],
            drl_values: drl_values.to_vec(),
            ..Self::base(ExperimentKind::DrlSweep, 0, n, repeats, seed)
        }
    }

    pub fn with_methods(mut self, methods: &[Method]) -> Self {
        self.methods = methods.to_vec();
        self
    }

    pub fn configurations(&self) -> Vec<Configuration> {
        let n = self.n;
        let cell = |m: usize, sparsity: f64| Configuration {
            m,
            n,
            sparsity,
            drl: m as f64 / n as f64,
        };
        match self.kind {
            ExperimentKind::NoiseFree => vec![cell(self.m, 0.0)],
            ExperimentKind::SparseNoise => self.sparsity_ratios.iter().map(|&g| cell(self.m, g)).collect(),
            ExperimentKind::DrlSweep => self
                .drl_values
                .iter()
                .flat_map(|&d| {
                    let m = (d * n as f64).round() as usize;
                    self.sparsity_ratios.iter().map(move |&g| Configuration {
                        m,
                        n,
                        sparsity: g,
                        drl: d,
                    })
                })
                .collect(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidParameter(msg));
        if self.repeats == 0 {
            return bad("repeats must be >= 1".into());
        }
        if self.n < 2 {
            return bad(format!("n = {} must be >= 2", self.n));
        }
        if self.methods.is_empty() {
            return bad("no methods selected".into());
        }
        if self.threads == 0 {
            return bad("thread count must be >= 1".into());
        }
        if self.sparsity_ratios.iter().any(|g| !(0.0..=1.0).contains(g)) {
            return bad(format!("sparsity ratios {:?} must lie in [0, 1]", self.sparsity_ratios));
        }
        if self.drl_values.iter().any(|&d| !(d >= 1.0)) {
            return bad(format!("DRL values {:?} must be >= 1", self.drl_values));
        }
        match self.kind {
            ExperimentKind::SparseNoise if self.sparsity_ratios.is_empty() => {
                return bad("sparse-noise experiment needs at least one sparsity ratio".into())
            }
            ExperimentKind::DrlSweep if self.drl_values.is_empty() || self.sparsity_ratios.is_empty() => {
                return bad("DRL sweep needs DRL values and a sparsity ratio".into())
            }
            _ => {}
        }
        for c in self.configurations() {
            if c.m <= c.n {
                return bad(format!("configuration has m = {} <= n = {}", c.m, c.n));
            }
        }
        Ok(())
    }
}

/// Aggregate over the repetitions of one method on one configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct BenchRecord {
    pub method: Method,
    pub m: usize,
    pub n: usize,
    pub sparsity: f64,
    pub drl: f64,
    /// Mean over successful repetitions; NaN if all failed.
    pub mean_rel_err: f64,
    pub mean_runtime_s: f64,
    pub repeats: usize,
    pub errors: usize,
    /// Worst `‖Dr − w‖₂` relative to its allowance over the repetitions; NaN for
    /// methods that do not solve the reduced problem.
    pub max_feas_ratio: f64,
}

#[derive(Debug, Clone, Copy)]
struct RunOutcome {
    rel_err: f64,
    secs: f64,
    feas_ratio: Option<f64>,
}

/// Per-repetition outcome for every method, in method order.
type RepOutcome = Vec<Option<RunOutcome>>;

fn run_repetition(spec: &ExperimentSpec, cfg: &Configuration, rep: usize) -> Result<RepOutcome> {
    let seed = spec.seed.wrapping_add(rep as u64);
    let (prob, p) = gen_instance(cfg.m, cfg.n, seed)?;
    let prob = if cfg.sparsity > 0.0 {
        let b = add_sparse_noise_with(
            prob.b(),
            cfg.sparsity,
            spec.noise_variance,
            spec.noise_scale,
            seed.wrapping_add(NOISE_SEED_OFFSET),
        )?;
        MlmProblem::new(prob.a().clone(), b)?
    } else {
        prob
    };
    Ok(spec
        .methods
        .iter()
        .map(|&method| {
            let start = Instant::now();
            let res = solve(&prob, method, &spec.options);
            let secs = start.elapsed().as_secs_f64();
            res.ok().map(|rep| RunOutcome {
                rel_err: relative_error(&rep.x, &p),
                secs,
                feas_ratio: rep.feasibility_ratio(spec.options.rev.epsilon),
            })
        })
        .collect())
}

/// Runs every method on every configuration; records come back sorted by
/// method (in [`Method::ALL`] order) and then configuration.
pub fn run_experiment(spec: &ExperimentSpec) -> Result<Vec<BenchRecord>> {
    spec.validate()?;
    let mut records = Vec::new();
    for cfg in spec.configurations() {
        let outcomes = run_repetitions(spec, &cfg)?;
        for (k, &method) in spec.methods.iter().enumerate() {
            let ok: Vec<RunOutcome> = outcomes.iter().filter_map(|o| o[k]).collect();
            let count = ok.len() as f64;
            let (mean_rel_err, mean_runtime_s) = if ok.is_empty() {
                (f64::NAN, f64::NAN)
            } else {
                (
                    ok.iter().map(|o| o.rel_err).sum::<f64>() / count,
                    ok.iter().map(|o| o.secs).sum::<f64>() / count,
                )
            };
            let max_feas_ratio =
                ok.iter()
                    .filter_map(|o| o.feas_ratio)
                    .fold(f64::NAN, |acc, v| if acc.is_nan() || v > acc { v } else { acc });
            records.push(BenchRecord {
                method,
                m: cfg.m,
                n: cfg.n,
                sparsity: cfg.sparsity,
                drl: cfg.drl,
                mean_rel_err,
                mean_runtime_s,
                repeats: spec.repeats,
                errors: spec.repeats - ok.len(),
                max_feas_ratio,
            });
        }
    }
    // stable sort keeps configuration order within each method
    records.sort_by_key(|r| r.method);
    Ok(records)
}

fn run_repetitions(spec: &ExperimentSpec, cfg: &Configuration) -> Result<Vec<RepOutcome>> {
    let threads = spec.threads.min(spec.repeats);
    if threads <= 1 {
        return (0..spec.repeats).map(|k| run_repetition(spec, cfg, k)).collect();
    }
    let mut slots: Vec<Option<Result<RepOutcome>>> = (0..spec.repeats).map(|_| None).collect();
    thread::scope(|s| {
        let handles: Vec<_> = (0..threads)
            .map(|t| {
                s.spawn(move || {
                    (t..spec.repeats)
                        .step_by(threads)
                        .map(|k| (k, run_repetition(spec, cfg, k)))
                        .collect::<Vec<_>>()
                })
            })
            .collect();
        for h in handles {
            for (k, out) in h.join().expect("benchmark worker panicked") {
                slots[k] = Some(out);
            }
        }
    });
    slots.into_iter().map(|s| s.expect("every repetition ran")).collect()
}

/// Worker count: `L1REV_THREADS` if set to a positive integer, else `fallback`.
pub fn threads_from_env(fallback: usize) -> usize {
    std::env::var(THREADS_ENV)
        .ok()
        .and_then(|v| v.trim().parse::<usize>().ok())
        .filter(|&t| t > 0)
        .unwrap_or(fallback)
}

/// Shortest-round-trip-safe rendering with 17 significant digits.
pub fn fmt_f64(x: f64) -> String {
    if x.is_nan() {
        "NaN".into()
    } else if x.is_infinite() {
        if x > 0.0 {
            "inf".into()
        } else {
            "-inf".into()
        }
    } else {
        format!("{x:.16e}")
    }
}

pub fn write_csv<W: Write>(records: &[BenchRecord], mut out: W) -> io::Result<()> {
    writeln!(out, "{CSV_HEADER}")?;
    for r in records {
        writeln!(
            out,
            "{},{},{},{},{},{},{},{},{}",
            r.method.label(),
            r.m,
            r.n,
            fmt_f64(r.sparsity),
            fmt_f64(r.drl),
            fmt_f64(r.mean_rel_err),
            fmt_f64(r.mean_runtime_s),
            r.repeats,
            r.errors
        )?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn instance_is_deterministic_and_consistent() {
        let (p1, x1) = gen_instance(8, 3, 7).unwrap();
        let (p2, x2) = gen_instance(8, 3, 7).unwrap();
        assert_eq!(p1, p2);
        assert_eq!(x1, x2);
        assert_eq!(p1.residual(&x1).unwrap(), vec![0.0; 8]);
        assert!(gen_instance(3, 3, 1).is_err());
        assert!(gen_instance(5, 1, 1).is_err());
    }

    #[test]
    fn sample_mean_concentrates() {
        let (p, _) = gen_instance(256, 128, 3).unwrap();
        let mean = p.a().as_slice().iter().sum::<f64>() / (256.0 * 128.0);
        assert!(mean.abs() <= 4.0 / (256.0f64 * 128.0).sqrt());
    }

    #[test]
    fn sparse_noise_counts() {
        let b = vec![1.0; 256];
        let count = |g| {
            add_sparse_noise(&b, g, 0.25, 9)
                .unwrap()
                .iter()
                .filter(|&&v| v != 1.0)
                .count()
        };
        assert_eq!(count(0.0), 0);
        assert_eq!(count(0.25), 64);
        assert_eq!(count(1.0), 256);
        assert!(add_sparse_noise(&b, 1.5, 0.25, 9).is_err());
    }

    #[test]
    fn std_interpretation_scales_noise() {
        let b = vec![0.0; 50];
        let v = add_sparse_noise_with(&b, 1.0, 0.25, NoiseScale::Variance, 4).unwrap();
        let s = add_sparse_noise_with(&b, 1.0, 0.25, NoiseScale::StdDev, 4).unwrap();
        for (a, c) in v.iter().zip(&s) {
            assert!((a * 0.5 - c).abs() <= 1e-15);
        }
    }

    #[test]
    fn relative_error_is_rotation_invariant() {
        let (x, p) = ([1.0, 2.0], [1.5, 1.0]);
        let (c, s) = (0.6f64, 0.8f64);
        let rot = |v: [f64; 2]| [c * v[0] - s * v[1], s * v[0] + c * v[1]];
        let e1 = relative_error(&x, &p);
        let e2 = relative_error(&rot(x), &rot(p));
        assert!((e1 - e2).abs() <= 1e-15);
    }

    #[test]
    fn drl_configurations() {
        let spec = ExperimentSpec::drl_sweep(50, 1, 0, &[1.5, 2.0]);
        let cfgs = spec.configurations();
        assert_eq!(cfgs.len(), 2);
        assert_eq!((cfgs[0].m, cfgs[1].m), (75, 100));
        let bad = ExperimentSpec::drl_sweep(50, 1, 0, &[1.0]);
        assert!(bad.validate().is_err());
    }

    #[test]
    fn noise_free_run_and_csv() {
        let spec = ExperimentSpec::noise_free(12, 4, 2, 5).with_methods(&[Method::Pob, Method::Res]);
        let recs = run_experiment(&spec).unwrap();
        assert_eq!(recs.len(), 2);
        assert_eq!(recs[0].method, Method::Res);
        assert!(recs[0].mean_rel_err <= 1e-10);
        let mut buf = Vec::new();
        write_csv(&recs, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with(CSV_HEADER));
        assert!(!text.contains('\r'));
        assert_eq!(text.lines().count(), 3);
    }

    #[test]
    fn threads_do_not_change_results() {
        let mut spec = ExperimentSpec::sparse_noise(20, 5, 4, 11, &[0.25]).with_methods(&[Method::Res]);
        let serial = run_experiment(&spec).unwrap();
        spec.threads = 3;
        let parallel = run_experiment(&spec).unwrap();
        assert_eq!(serial[0].mean_rel_err, parallel[0].mean_rel_err);
    }

    #[test]
    fn fmt_round_trips() {
        for x in [0.1, 1.0 / 3.0, 1e-300, 6.02e23, -2.5] {
            assert_eq!(fmt_f64(x).parse::<f64>().unwrap(), x);
        }
    }
}
