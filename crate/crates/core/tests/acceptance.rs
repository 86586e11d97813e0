//! Acceptance suite: one PASS/FAIL line per criterion. Failures exit non-zero
//! only with `L1REV_ACCEPTANCE_STRICT=1`.

// NaN measurements must fail, hence `!(x <= tol)`
#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod common;

use std::process::ExitCode;
use std::time::Instant;

use common::{gaussian_matrix, noisy_instance, rel_diff};
use l1rev_core::bench::{run_experiment, BenchRecord, ExperimentSpec};
use l1rev_core::linalg::{
    default_nullspace_tol, default_rank_tol, negative_part, norm2, norm_inf, nullspace_basis, pcg, pinv, positive_part,
    soft, solve as dense_solve, Cholesky, Matrix,
};
use l1rev_core::oracle::oracle_solve_default;
use l1rev_core::rng::SplitMix64;
use l1rev_core::{solve, Method, MlmProblem, SolveOptions, SolveReport};

const ITERATIVE: [Method; 6] = [
    Method::Gpsr,
    Method::Tnipm,
    Method::Hp,
    Method::Ist,
    Method::Adm,
    Method::Pob,
];

/// Constraint violations `‖Dr − w‖₂` seen by REV solves, with their allowance.
#[derive(Default)]
struct FeasibilityLog {
    checked: usize,
    worst_ratio: f64,
    failures: Vec<String>,
}

impl FeasibilityLog {
    fn note(&mut self, ratio: f64, what: impl FnOnce() -> String) {
        self.checked += 1;
        self.worst_ratio = self.worst_ratio.max(ratio);
        if !(ratio <= 1.0) {
            self.failures.push(format!("{}: {ratio:.2e}x allowance", what()));
        }
    }

    fn record(&mut self, p: &MlmProblem, rep: &SolveReport, eps: f64) {
        if let Some(ratio) = rep.feasibility_ratio(eps) {
            self.note(ratio, || format!("{} ({}x{})", rep.label, p.m(), p.n()));
        }
    }

    /// Bench records carry the worst ratio over their repetitions.
    fn record_bench(&mut self, recs: &[BenchRecord], experiment: &str) {
        for r in recs.iter().filter(|r| !r.max_feas_ratio.is_nan()) {
            self.note(r.max_feas_ratio, || {
                format!(
                    "{} in {experiment} ({}x{}, sparsity {})",
                    r.method, r.m, r.n, r.sparsity
                )
            });
        }
    }
}

struct Ctx {
    opts: SolveOptions,
    feas: FeasibilityLog,
}

impl Ctx {
    fn solve(&mut self, p: &MlmProblem, m: Method) -> Result<SolveReport, String> {
        let rep = solve(p, m, &self.opts).map_err(|e| format!("{m}: {e}"))?;
        self.feas.record(p, &rep, self.opts.rev.epsilon);
        Ok(rep)
    }

    fn experiment(&mut self, mut spec: ExperimentSpec, name: &str) -> Vec<BenchRecord> {
        spec.options = self.opts.clone();
        let recs = run_experiment(&spec).unwrap();
        self.feas.record_bench(&recs, name);
        recs
    }
}

struct Verdict {
    pass: bool,
    detail: String,
}

fn verdict(failures: Vec<String>, ok_detail: String) -> Verdict {
    if failures.is_empty() {
        Verdict {
            pass: true,
            detail: ok_detail,
        }
    } else {
        let shown: Vec<_> = failures.iter().take(4).cloned().collect();
        let more = failures.len().saturating_sub(shown.len());
        let suffix = if more > 0 {
            format!(" (+{more} more)")
        } else {
            String::new()
        };
        Verdict {
            pass: false,
            detail: format!("{}{suffix}", shown.join("; ")),
        }
    }
}

fn oracle_equivalence(ctx: &mut Ctx) -> Verdict {
    let mut failures = Vec::new();
    let mut worst_exact = 0.0f64;
    let mut worst_iter = 0.0f64;
    for k in 0..50u64 {
        let m = 6 + (k % 7) as usize;
        let n = 2 + (k % 2) as usize;
        let p = noisy_instance(m, n, 1000 + k);
        let best = oracle_solve_default(&p).unwrap().objective;
        for method in [Method::Lp, Method::Res].into_iter().chain(ITERATIVE) {
            let tol = if matches!(method, Method::Lp | Method::Res) {
                1e-9
            } else {
                1e-3
            };
            match ctx.solve(&p, method) {
                Ok(rep) => {
                    let d = rel_diff(rep.objective, best);
                    if tol < 1e-6 {
                        worst_exact = worst_exact.max(d);
                    } else {
                        worst_iter = worst_iter.max(d);
                    }
                    if !(d <= tol) {
                        failures.push(format!("{method} on #{k} ({m}x{n}): rel diff {d:.2e}"));
                    }
                }
                Err(e) => failures.push(format!("#{k}: {e}")),
            }
        }
    }
    verdict(
        failures,
        format!("max rel diff LP/RES {worst_exact:.1e}, iterative {worst_iter:.1e}"),
    )
}

fn mean_errors(ctx: &mut Ctx, spec: ExperimentSpec, name: &str) -> Vec<(Method, f64, f64, usize)> {
    ctx.experiment(spec, name)
        .into_iter()
        .map(|r| (r.method, r.sparsity, r.mean_rel_err, r.errors))
        .collect()
}

fn noise_free_accuracy(ctx: &mut Ctx) -> Verdict {
    let spec = ExperimentSpec::noise_free(256, 128, 5, 20_240)
        .with_methods(&[[Method::Lp, Method::Res].as_slice(), &ITERATIVE].concat());
    let mut failures = Vec::new();
    let mut parts = Vec::new();
    for (method, _, eta, errors) in mean_errors(ctx, spec, "noise-free bench") {
        let tol = if matches!(method, Method::Lp | Method::Res) {
            1e-10
        } else {
            1e-6
        };
        parts.push(format!("{method} {eta:.1e}"));
        if errors > 0 || !(eta <= tol) {
            failures.push(format!("{method}: eta {eta:.2e} (tol {tol:.0e}), {errors} errors"));
        }
    }
    verdict(failures, parts.join(", "))
}

fn sparse_noise_accuracy(ctx: &mut Ctx) -> Verdict {
    let spec = ExperimentSpec::sparse_noise(256, 128, 10, 31_337, &[0.25, 0.75]).with_methods(&Method::REV);
    let rows = mean_errors(ctx, spec, "sparse-noise bench");
    let mut failures = Vec::new();
    let mut parts = Vec::new();
    for method in Method::REV {
        let at = |g: f64| rows.iter().find(|r| r.0 == method && r.1 == g).unwrap();
        let (low, high) = (at(0.25), at(0.75));
        parts.push(format!("{method} {:.2e}/{:.2e}", low.2, high.2));
        if low.3 > 0 || !(low.2 <= 0.03) {
            failures.push(format!("{method}: eta(0.25) = {:.3e}, {} errors", low.2, low.3));
        }
        if !(high.2 >= low.2) {
            failures.push(format!(
                "{method}: eta(0.75) = {:.3e} < eta(0.25) = {:.3e}",
                high.2, low.2
            ));
        }
    }
    verdict(failures, format!("eta(0.25)/eta(0.75): {}", parts.join(", ")))
}

fn drl_trend(ctx: &mut Ctx) -> Verdict {
    let grid = [1.5, 2.0, 4.0, 8.0];
    let spec = ExperimentSpec::drl_sweep(50, 10, 4_242, &grid).with_methods(&[Method::Res]);
    let etas: Vec<f64> = ctx
        .experiment(spec, "DRL sweep")
        .iter()
        .map(|r| r.mean_rel_err)
        .collect();
    let mut failures = Vec::new();
    for i in 1..etas.len() {
        if !(etas[i] <= 1.1 * etas[i - 1]) {
            failures.push(format!(
                "eta rises from {:.3e} to {:.3e} at DRL {}",
                etas[i - 1],
                etas[i],
                grid[i]
            ));
        }
    }
    let shown: Vec<String> = grid.iter().zip(&etas).map(|(d, e)| format!("{d}:{e:.2e}")).collect();
    verdict(failures, format!("L1-RES eta by DRL {}", shown.join(" ")))
}

fn vertex_sparsity(ctx: &mut Ctx) -> Verdict {
    let mut failures = Vec::new();
    let mut min_excess = usize::MAX;
    for k in 0..50u64 {
        let n = 2 + (k % 7) as usize;
        let m = n + 3 + (k % 11) as usize * 3;
        let p = noisy_instance(m, n, 5000 + k);
        let rep = ctx.solve(&p, Method::Lp).unwrap();
        let thresh = 1e-8 * (1.0 + norm_inf(&rep.r));
        let zeros = rep.r.iter().filter(|r| r.abs() <= thresh).count();
        min_excess = min_excess.min(zeros.saturating_sub(n));
        if zeros < n {
            failures.push(format!("#{k} ({m}x{n}): {zeros} zero residuals"));
        }
    }
    verdict(
        failures,
        format!("every vertex residual has >= n zeros (min surplus {min_excess})"),
    )
}

fn right_factor_invariance(ctx: &mut Ctx) -> Verdict {
    let mut failures = Vec::new();
    let mut worst = 0.0f64;
    let mut rng = SplitMix64::new(77);
    for k in 0..20u64 {
        let n = 2 + (k % 5) as usize;
        let m = 3 * n + (k % 4) as usize;
        let p = noisy_instance(m, n, 9000 + k);
        // P = I + G/(4√n) stays well conditioned
        let g = gaussian_matrix(n, n, &mut rng);
        let pm = Matrix::identity(n).add(&g.scale(0.25 / (n as f64).sqrt())).unwrap();
        let ap = p.a().matmul(&pm).unwrap();
        let q = MlmProblem::new(ap, p.b().to_vec()).unwrap();
        let c1 = ctx.solve(&p, Method::Lp).unwrap().objective;
        let c2 = ctx.solve(&q, Method::Lp).unwrap().objective;
        let d = rel_diff(c2, c1);
        worst = worst.max(d);
        if !(d <= 1e-6) {
            failures.push(format!("#{k}: {c1} vs {c2}"));
        }
    }
    verdict(failures, format!("max rel diff {worst:.1e}"))
}

fn feasibility(ctx: &mut Ctx) -> Verdict {
    let log = &ctx.feas;
    verdict(
        log.failures.clone(),
        format!(
            "{} REV solutions checked, worst ‖Dr−w‖/allowance = {:.2e}",
            log.checked, log.worst_ratio
        ),
    )
}

fn kernel_suites(_: &mut Ctx) -> Verdict {
    let mut failures = Vec::new();
    let mut rng = SplitMix64::new(8);
    let mut worst = [0.0f64; 3];
    for k in 0..20 {
        let (r, c) = (3 + k % 5, 2 + k % 4);
        let mut a = gaussian_matrix(r, c, &mut rng);
        if k % 3 == 0 {
            // duplicate a column to force rank deficiency
            let c0 = a.col(0);
            a.set_col(c - 1, &c0);
        }
        let ap = pinv(&a, default_rank_tol(&a));
        let scale = 1.0 + a.max_abs();
        let conds = [
            a.matmul(&ap).unwrap().matmul(&a).unwrap().sub(&a).unwrap().max_abs(),
            ap.matmul(&a).unwrap().matmul(&ap).unwrap().sub(&ap).unwrap().max_abs(),
            a.matmul(&ap).unwrap().asymmetry(),
            ap.matmul(&a).unwrap().asymmetry(),
        ];
        let e = conds.iter().fold(0.0f64, |x, y| x.max(*y)) / scale;
        worst[0] = worst[0].max(e);
        if !(e <= 1e-9) {
            failures.push(format!("Penrose conditions on #{k}: {e:.2e}"));
        }

        let ns = nullspace_basis(&a.transpose(), default_nullspace_tol(&a));
        if ns.cols() > 0 {
            let res = a.transpose().matmul(&ns).unwrap().max_abs();
            worst[2] = worst[2].max(res);
            if !(res <= 1e-10) {
                failures.push(format!("nullspace residual on #{k}: {res:.2e}"));
            }
        }

        let g = gaussian_matrix(c + 3, c, &mut rng);
        let h = g.gram().add(&Matrix::identity(c).scale(0.1)).unwrap();
        let rhs: Vec<f64> = (0..c).map(|_| rng.normal()).collect();
        let exact = dense_solve(&h, &rhs).unwrap();
        let diag: Vec<f64> = (0..c).map(|i| h[(i, i)]).collect();
        let pre = Matrix::diag(&diag);
        let it = pcg(&h, &rhs, &pre, &vec![0.0; c], 1e-14, 10 * c).unwrap();
        let diff: Vec<f64> = it.x.iter().zip(&exact).map(|(a, b)| a - b).collect();
        let rel = norm2(&diff) / norm2(&exact);
        worst[1] = worst[1].max(rel);
        if !(rel <= 1e-8) {
            failures.push(format!("PCG vs direct on #{k}: {rel:.2e}"));
        }
        let _ = Cholesky::new(&h).unwrap();
    }

    for _ in 0..2000 {
        let u = 10.0 * rng.normal();
        let a = rng.uniform() * 5.0;
        let s = soft(u, a);
        let exact = s == -soft(-u, a)
            && soft(u, 0.0) == u
            && (u.abs() > a || s == 0.0)
            && (s == 0.0 || s.signum() == u.signum());
        let v = [u, -a, s];
        let split: Vec<f64> = positive_part(&v)
            .iter()
            .zip(negative_part(&v))
            .map(|(p, q)| p - q)
            .collect();
        if !exact || split != v {
            failures.push(format!("soft-threshold identity broken at u = {u}, a = {a}"));
            break;
        }
    }
    verdict(
        failures,
        format!(
            "Penrose {:.1e}, PCG {:.1e}, nullspace {:.1e}, soft-threshold identities exact",
            worst[0], worst[1], worst[2]
        ),
    )
}

fn runtime_ratios(ctx: &mut Ctx) -> Verdict {
    let spec = ExperimentSpec::noise_free(128, 64, 3, 99).with_methods(&[Method::Res, Method::Hp, Method::Pob]);
    let recs = ctx.experiment(spec, "runtime bench");
    let t = |m: Method| recs.iter().find(|r| r.method == m).unwrap().mean_runtime_s;
    let res = t(Method::Res);
    Verdict {
        pass: true,
        detail: format!(
            "reported only: HP/RES = {:.3}, POB/RES = {:.3} (128x64 noise-free)",
            t(Method::Hp) / res,
            t(Method::Pob) / res
        ),
    }
}

type Criterion = (u32, &'static str, fn(&mut Ctx) -> Verdict);

/// When set to `1`, any failed criterion makes the process exit non-zero.
const STRICT_ENV: &str = "L1REV_ACCEPTANCE_STRICT";

fn main() -> ExitCode {
    let criteria: [Criterion; 9] = [
        (1, "oracle equivalence", oracle_equivalence),
        (2, "noise-free accuracy", noise_free_accuracy),
        (3, "sparse-noise accuracy", sparse_noise_accuracy),
        (4, "DRL trend", drl_trend),
        (5, "vertex sparsity", vertex_sparsity),
        (6, "right-factor invariance", right_factor_invariance),
        (7, "REV feasibility", feasibility),
        (8, "numerical kernels", kernel_suites),
        (9, "runtime ratios", runtime_ratios),
    ];
    let mut ctx = Ctx {
        opts: SolveOptions::default(),
        feas: FeasibilityLog::default(),
    };
    let mut failed = 0;
    for (id, name, check) in criteria {
        let start = Instant::now();
        let v = check(&mut ctx);
        let status = if v.pass { "PASS" } else { "FAIL" };
        failed += usize::from(!v.pass);
        println!(
            "criterion {id} [{status}] {name} ({:.1}s): {}",
            start.elapsed().as_secs_f64(),
            v.detail
        );
    }
    if failed == 0 {
        println!("acceptance: all 9 criteria passed");
        return ExitCode::SUCCESS;
    }
    println!("acceptance: {failed} criterion/criteria failed");
    if std::env::var_os(STRICT_ENV).is_some_and(|v| v == "1") {
        ExitCode::FAILURE
    } else {
        println!("acceptance: failures are reported only; set {STRICT_ENV}=1 to fail the run");
        ExitCode::SUCCESS
    }
}
