//! `l1rev`: generate test data, solve minimum-ℓ1 fits, run benchmark experiments.
//!
//! Exit codes: 0 success, 1 usage / parse / solver error, 2 solver stopped at
//! its iteration limit (the result is still written).

mod io;

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use l1rev_core::bench::{
    add_sparse_noise, default_methods, gen_instance, run_experiment, threads_from_env, write_csv, ExperimentKind,
    ExperimentSpec, DEFAULT_DRL_GRID, DEFAULT_NOISE_VARIANCE, DEFAULT_SPARSITY_RATIOS,
};
use l1rev_core::{solve, Method, MlmProblem, SolveOptions};

const EXIT_USAGE: u8 = 1;
const EXIT_NOT_CONVERGED: u8 = 2;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{path}:{line}: {msg}")]
    Parse { path: String, line: usize, msg: String },
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    Core(#[from] l1rev_core::Error),
}

#[derive(Parser, Debug)]
#[command(
    name = "l1rev",
    version,
    about = "Minimum l1-norm fits of overdetermined linear systems"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Write a random instance as A.txt, b.txt and p.txt (the true solution).
    Gen(GenArgs),
    /// Solve min ‖Ax − b‖₁ and print x, one value per line.
    Solve(SolveArgs),
    /// Run a benchmark experiment and write the CSV summary.
    Bench(BenchArgs),
}

#[derive(Args, Debug)]
struct GenArgs {
    #[arg(long)]
    m: usize,
    #[arg(long)]
    n: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Fraction of entries of b that receive Gaussian noise.
    #[arg(long, default_value_t = 0.0)]
    sparsity: f64,
    #[arg(long = "noise-var", default_value_t = DEFAULT_NOISE_VARIANCE)]
    noise_var: f64,
    /// Prepended to the file names, e.g. `data/run1-`.
    #[arg(long = "out-prefix", default_value = "")]
    out_prefix: String,
}

#[derive(Args, Debug)]
struct SolveArgs {
    #[arg(long, default_value = "l1-res")]
    method: String,
    /// Matrix file for A.
    #[arg(long)]
    matrix: PathBuf,
    /// Vector file for b.
    #[arg(long)]
    rhs: PathBuf,
    #[arg(long, default_value_t = 1e-8)]
    eps: f64,
    #[arg(long, default_value_t = 1e-8)]
    lambda: f64,
    /// Defaults to 10000 (15 for l1-ptb).
    #[arg(long)]
    maxiter: Option<usize>,
    #[arg(long)]
    tau: Option<f64>,
    #[arg(long)]
    mu: Option<f64>,
    /// Write x here instead of standard output.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct BenchArgs {
    /// noise-free, sparse-noise or drl.
    #[arg(long)]
    experiment: String,
    #[arg(long, default_value_t = 256)]
    m: usize,
    #[arg(long, default_value_t = 128)]
    n: usize,
    #[arg(long, default_value_t = 10)]
    repeats: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Comma-separated method names; defaults to every method except oracle.
    #[arg(long, value_delimiter = ',')]
    methods: Vec<String>,
    /// Sparsity ratios for sparse-noise (DRL sweeps use the first one).
    #[arg(long, value_delimiter = ',')]
    sparsity: Vec<f64>,
    #[arg(long = "noise-var", default_value_t = DEFAULT_NOISE_VARIANCE)]
    noise_var: f64,
    /// DRL grid (m/n ratios) for the drl experiment.
    #[arg(long, value_delimiter = ',')]
    drl: Vec<f64>,
    /// Worker threads across repetitions; L1REV_THREADS overrides.
    #[arg(long, default_value_t = 1)]
    threads: usize,
    /// Output file; standard output if omitted.
    #[arg(long)]
    csv: Option<PathBuf>,
}

fn cmd_gen(a: &GenArgs) -> Result<u8, CliError> {
    if !(a.m > a.n && a.n >= 2) {
        return Err(CliError::Usage(format!(
            "need m > n >= 2, got m = {}, n = {}",
            a.m, a.n
        )));
    }
    let (prob, p) = gen_instance(a.m, a.n, a.seed)?;
    let b = if a.sparsity > 0.0 {
        add_sparse_noise(
            prob.b(),
            a.sparsity,
            a.noise_var,
            a.seed.wrapping_add(l1rev_core::bench::NOISE_SEED_OFFSET),
        )?
    } else {
        prob.b().to_vec()
    };
    let path = |name: &str| PathBuf::from(format!("{}{name}", a.out_prefix));
    io::write_file(&path("A.txt"), &io::format_matrix(prob.a()))?;
    io::write_file(&path("b.txt"), &io::format_vector(&b))?;
    io::write_file(&path("p.txt"), &io::format_vector(&p))?;
    Ok(0)
}

fn cmd_solve(a: &SolveArgs) -> Result<u8, CliError> {
    let method: Method = a.method.parse()?;
    let matrix = io::read_matrix(&a.matrix)?;
    let rhs = io::read_vector(&a.rhs)?;
    let prob = MlmProblem::new(matrix, rhs)?;
    let mut opts = SolveOptions::default();
    opts.rev.epsilon = a.eps;
    opts.rev.lambda = a.lambda;
    opts.rev.tau = a.tau;
    opts.rev.mu = a.mu;
    if let Some(k) = a.maxiter {
        opts.rev.maxiter = k;
        opts.pert.maxiter = k;
    }
    let rep = solve(&prob, method, &opts)?;
    let body: String = rep
        .x
        .iter()
        .map(|v| format!("{}\n", l1rev_core::bench::fmt_f64(*v)))
        .collect();
    match &a.out {
        Some(path) => io::write_file(path, &body)?,
        None => print!("{body}"),
    }
    eprintln!("method: {}", rep.label);
    eprintln!("C1: {}", l1rev_core::bench::fmt_f64(rep.objective));
    eprintln!("iterations: {}", rep.iterations);
    eprintln!("converged: {}", rep.converged);
    eprintln!("runtime_s: {:.6}", rep.runtime.as_secs_f64());
    for w in &rep.warnings {
        eprintln!("warning: {w}");
    }
    Ok(if rep.converged { 0 } else { EXIT_NOT_CONVERGED })
}

fn cmd_bench(a: &BenchArgs) -> Result<u8, CliError> {
    let kind: ExperimentKind = a
        .experiment
        .parse()
        .map_err(|e: l1rev_core::Error| CliError::Usage(e.to_string()))?;
    let methods = if a.methods.is_empty() {
        default_methods()
    } else {
        a.methods
            .iter()
            .map(|s| s.parse())
            .collect::<Result<Vec<Method>, _>>()?
    };
    let mut spec = match kind {
        ExperimentKind::NoiseFree => ExperimentSpec::noise_free(a.m, a.n, a.repeats, a.seed),
        ExperimentKind::SparseNoise => {
            let ratios = if a.sparsity.is_empty() {
                DEFAULT_SPARSITY_RATIOS.to_vec()
            } else {
                a.sparsity.clone()
            };
            ExperimentSpec::sparse_noise(a.m, a.n, a.repeats, a.seed, &ratios)
        }
        ExperimentKind::DrlSweep => {
            let grid = if a.drl.is_empty() {
                DEFAULT_DRL_GRID.to_vec()
            } else {
                a.drl.clone()
            };
            let mut s = ExperimentSpec::drl_sweep(a.n, a.repeats, a.seed, &grid);
            if let Some(&g) = a.sparsity.first() {
                s.sparsity_ratios = vec![g];
            }
            s
        }
    }
    .with_methods(&methods);
    spec.noise_variance = a.noise_var;
    spec.threads = threads_from_env(a.threads);
    spec.validate().map_err(|e| CliError::Usage(e.to_string()))?;

    let records = run_experiment(&spec)?;
    let write = |w: &mut dyn Write| write_csv(&records, w);
    let result = match &a.csv {
        Some(path) => {
            let f = File::create(path).map_err(|e| io_err(path, e))?;
            let mut w = BufWriter::new(f);
            write(&mut w).and_then(|_| w.flush()).map_err(|e| io_err(path, e))
        }
        None => write(&mut std::io::stdout().lock()).map_err(|e| io_err(Path::new("<stdout>"), e)),
    };
    result?;
    if records.iter().all(|r| r.errors == r.repeats) {
        eprintln!("error: every run failed");
        return Ok(EXIT_USAGE);
    }
    Ok(0)
}

fn io_err(path: &Path, source: std::io::Error) -> CliError {
    CliError::Io {
        path: path.display().to_string(),
        source,
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(EXIT_USAGE)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    let outcome = match &cli.command {
        Command::Gen(a) => cmd_gen(a),
        Command::Solve(a) => cmd_solve(a),
        Command::Bench(a) => cmd_bench(a),
    };
    match outcome {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_USAGE)
        }
    }
}
