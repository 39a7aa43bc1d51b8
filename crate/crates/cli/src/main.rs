//! betabulk: sample tridiagonal beta-ensembles, solve their spectra, and
//! run the Monte-Carlo studies comparing matrix statistics to the Sine_β
//! limit process.
//!
//! Exit codes: 0 success, 1 parameter error, 2 numerical-guard failure.
//! Results go to standard output (or --out); diagnostics and errors go to
//! standard error.

use betabulk::ensembles::{double, sample_hermite, sample_laguerre, SymTridiagonal};
use betabulk::error::Error;
use betabulk::experiments::{
    run_bulk_comparison, run_density_check, run_hermite_comparison, run_phase_vs_sde,
    ExperimentConfig, ExperimentKind, Report, SdeSettings,
};
use betabulk::rng::RngStream;
use betabulk::sde::{sine_beta_counting, SineBetaConfig};
use betabulk::spectral::{eigenvalues, gershgorin_bounds};
use clap::{Args, Parser, Subcommand, ValueEnum};
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "betabulk", version, about = "beta-ensemble spectra and Sine_beta bulk-limit experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Ensemble {
    Laguerre,
    Hermite,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum OutputFormat {
    Json,
    Csv,
}

#[derive(Args)]
struct SampleArgs {
    /// Which tridiagonal model to emit (laguerre emits the doubled form).
    #[arg(long, value_enum, default_value = "laguerre")]
    ensemble: Ensemble,
    #[arg(long)]
    n: usize,
    /// Laguerre second parameter; must exceed n.
    #[arg(long)]
    m: Option<usize>,
    #[arg(long, default_value_t = 2.0)]
    beta: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Stream id (replica index) within the seed.
    #[arg(long, default_value_t = 0)]
    stream: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct EigArgs {
    /// Matrix file (line 1: k, line 2: diagonal, line 3: off-diagonal).
    #[arg(long, conflicts_with_all = ["ensemble", "n", "m"])]
    file: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "laguerre")]
    ensemble: Ensemble,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    m: Option<usize>,
    #[arg(long, default_value_t = 2.0)]
    beta: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 0)]
    stream: u64,
    /// Window lower end (default: below the whole spectrum).
    #[arg(long)]
    lo: Option<f64>,
    /// Window upper end (default: above the whole spectrum).
    #[arg(long)]
    hi: Option<f64>,
    #[arg(long, default_value_t = 1e-10)]
    tol: f64,
    #[arg(long, value_enum, default_value = "json")]
    format: OutputFormat,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ExperimentArgs {
    /// JSON config file; explicit flags override its fields.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    beta: Option<f64>,
    #[arg(long)]
    n: Option<usize>,
    /// Defaults to 2n when n is given without a config file.
    #[arg(long)]
    m: Option<usize>,
    /// Center c with mu = sqrt(c n).
    #[arg(long)]
    c: Option<f64>,
    /// Explicit center mu (wins over c).
    #[arg(long)]
    mu: Option<f64>,
    /// Center of the Hermite side for hermite-compare.
    #[arg(long)]
    mu_hermite: Option<f64>,
    /// Comma-separated lambda grid, strictly increasing.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    lambda: Option<Vec<f64>>,
    #[arg(long)]
    replicas: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    kappa_cutoff: Option<f64>,
    #[arg(long)]
    epsilon: Option<f64>,
    #[arg(long)]
    sde_h: Option<f64>,
    #[arg(long)]
    sde_delta: Option<f64>,
    #[arg(long)]
    threads: Option<usize>,
    #[arg(long, value_enum, default_value = "json")]
    format: OutputFormat,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SineBetaArgs {
    #[arg(long, default_value_t = 2.0)]
    beta: f64,
    /// Comma-separated lambda grid, strictly increasing.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true, default_value = "6.283185307179586")]
    lambda: Vec<f64>,
    #[arg(long, default_value_t = 100)]
    replicas: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 1e-3)]
    h: f64,
    #[arg(long, default_value_t = 1e-6)]
    delta: f64,
    #[arg(long)]
    threads: Option<usize>,
    #[arg(long, value_enum, default_value = "json")]
    format: OutputFormat,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Sample a tridiagonal matrix and emit it in the matrix file format.
    Sample(SampleArgs),
    /// Eigenvalues of a sampled or file-given symmetric tridiagonal matrix.
    Eig(EigArgs),
    /// Empirical spectral measure against the Marchenko-Pastur law.
    Density(ExperimentArgs),
    /// Matrix-side vs SDE-side counting statistics under the bulk scaling.
    BulkCount(ExperimentArgs),
    /// Counting samples of the Sine_beta process by SDE simulation.
    SineBeta(SineBetaArgs),
    /// Relative phase from sweeps against the limiting diffusion.
    Phase(ExperimentArgs),
    /// Laguerre vs Hermite central-gap comparison.
    HermiteCompare(ExperimentArgs),
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                print!("{e}");
                return ExitCode::SUCCESS;
            }
            eprint!("{e}");
            return ExitCode::from(1);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_parameter_error() { 1 } else { 2 })
        }
    }
}

fn run(cli: Cli) -> Result<(), Error> {
    match cli.command {
        Command::Sample(args) => cmd_sample(args),
        Command::Eig(args) => cmd_eig(args),
        Command::Density(args) => cmd_experiment(args, ExperimentKind::Density),
        Command::BulkCount(args) => cmd_experiment(args, ExperimentKind::BulkCompare),
        Command::SineBeta(args) => cmd_sine_beta(args),
        Command::Phase(args) => cmd_experiment(args, ExperimentKind::PhaseVsSde),
        Command::HermiteCompare(args) => cmd_experiment(args, ExperimentKind::HermiteCompare),
    }
}

fn emit(out: &Option<PathBuf>, content: &str) -> Result<(), Error> {
    match out {
        Some(path) => fs::write(path, content).map_err(Error::from),
        None => {
            print!("{content}");
            Ok(())
        }
    }
}

fn sample_matrix(
    ensemble: Ensemble,
    n: usize,
    m: Option<usize>,
    beta: f64,
    seed: u64,
    stream_id: u64,
) -> Result<SymTridiagonal, Error> {
    let stream = RngStream::with_stream(seed, stream_id);
    match ensemble {
        Ensemble::Laguerre => {
            let m = m.ok_or_else(|| Error::InvalidParameter("laguerre requires --m".into()))?;
            Ok(double(&sample_laguerre(n, m, beta, stream)?))
        }
        Ensemble::Hermite => sample_hermite(n, beta, stream),
    }
}

fn matrix_to_text(t: &SymTridiagonal) -> String {
    let mut s = format!("{}\n", t.dim());
    let join = |v: &[f64]| v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" ");
    s.push_str(&join(&t.diag));
    s.push('\n');
    s.push_str(&join(&t.offdiag));
    s.push('\n');
    s
}

fn matrix_from_file(path: &Path) -> Result<SymTridiagonal, Error> {
    let text = fs::read_to_string(path)?;
    let mut lines = text.lines();
    let k: usize = lines
        .next()
        .ok_or_else(|| Error::InvalidParameter("matrix file is empty".into()))?
        .trim()
        .parse()
        .map_err(|_| Error::InvalidParameter("matrix file: first line must be the dimension".into()))?;
    let parse_row = |line: Option<&str>, want: usize, what: &str| -> Result<Vec<f64>, Error> {
        let row: Vec<f64> = line
            .unwrap_or("")
            .split_whitespace()
            .map(|tok| tok.parse::<f64>())
            .collect::<Result<_, _>>()
            .map_err(|_| Error::InvalidParameter(format!("matrix file: bad {what} entry")))?;
        if row.len() != want {
            return Err(Error::InvalidParameter(format!(
                "matrix file: expected {want} {what} entries, got {}",
                row.len()
            )));
        }
        Ok(row)
    };
    let diag = parse_row(lines.next(), k, "diagonal")?;
    let offdiag = parse_row(lines.next(), k.saturating_sub(1), "off-diagonal")?;
    SymTridiagonal::new(diag, offdiag)
}

fn cmd_sample(args: SampleArgs) -> Result<(), Error> {
    let t = sample_matrix(args.ensemble, args.n, args.m, args.beta, args.seed, args.stream)?;
    emit(&args.out, &matrix_to_text(&t))
}

fn cmd_eig(args: EigArgs) -> Result<(), Error> {
    let t = match &args.file {
        Some(path) => matrix_from_file(path)?,
        None => {
            let n = args
                .n
                .ok_or_else(|| Error::InvalidParameter("eig requires --file or --n".into()))?;
            sample_matrix(args.ensemble, n, args.m, args.beta, args.seed, args.stream)?
        }
    };
    let (glo, ghi) = gershgorin_bounds(&t);
    let lo = args.lo.unwrap_or(glo - 1.0);
    let hi = args.hi.unwrap_or(ghi + 1.0);
    let evs = eigenvalues(&t, lo, hi, args.tol)?;
    let content = match args.format {
        OutputFormat::Json => format!("{}\n", serde_json::to_string_pretty(&evs).expect("serializes")),
        OutputFormat::Csv => {
            let mut s = String::from("index,eigenvalue\n");
            for (i, e) in evs.iter().enumerate() {
                s.push_str(&format!("{i},{e}\n"));
            }
            s
        }
    };
    emit(&args.out, &content)
}

fn install_threads(threads: Option<usize>) {
    if let Some(t) = threads {
        // results never depend on the pool size; ignore re-init in-process
        let _ = rayon::ThreadPoolBuilder::new().num_threads(t).build_global();
    }
}

fn build_experiment_config(
    args: &ExperimentArgs,
    kind: ExperimentKind,
) -> Result<ExperimentConfig, Error> {
    let mut cfg = match &args.config {
        Some(path) => {
            let text = fs::read_to_string(path)?;
            serde_json::from_str::<ExperimentConfig>(&text)
                .map_err(|e| Error::InvalidParameter(format!("config file: {e}")))?
        }
        None => {
            let n = 500;
            ExperimentConfig {
                kind,
                beta: 2.0,
                n,
                m: 2 * n,
                c: Some(3.0),
                mu: None,
                mu_hermite: 0.0,
                lambda_grid: vec![-std::f64::consts::TAU, std::f64::consts::TAU],
                replicas: 100,
                seed: 42,
                kappa_cutoff: 1.0,
                epsilon: 0.5,
                sde: SdeSettings::default(),
            }
        }
    };
    cfg.kind = kind;
    if let Some(v) = args.beta {
        cfg.beta = v;
    }
    if let Some(v) = args.n {
        cfg.n = v;
        if args.m.is_none() && args.config.is_none() {
            cfg.m = 2 * v;
        }
    }
    if let Some(v) = args.m {
        cfg.m = v;
    }
    if args.mu.is_some() {
        cfg.mu = args.mu;
        cfg.c = None;
    } else if args.c.is_some() {
        cfg.c = args.c;
        cfg.mu = None;
    }
    if let Some(v) = args.mu_hermite {
        cfg.mu_hermite = v;
    }
    if let Some(v) = &args.lambda {
        cfg.lambda_grid = v.clone();
    }
    if let Some(v) = args.replicas {
        cfg.replicas = v;
    }
    if let Some(v) = args.seed {
        cfg.seed = v;
    }
    if let Some(v) = args.kappa_cutoff {
        cfg.kappa_cutoff = v;
    }
    if let Some(v) = args.epsilon {
        cfg.epsilon = v;
    }
    if let Some(v) = args.sde_h {
        cfg.sde.h = v;
    }
    if let Some(v) = args.sde_delta {
        cfg.sde.delta = v;
    }
    Ok(cfg)
}

fn cmd_experiment(args: ExperimentArgs, kind: ExperimentKind) -> Result<(), Error> {
    install_threads(args.threads);
    let cfg = build_experiment_config(&args, kind)?;
    let report: Report = match kind {
        ExperimentKind::Density => run_density_check(&cfg)?,
        ExperimentKind::BulkCompare => run_bulk_comparison(&cfg)?,
        ExperimentKind::HermiteCompare => run_hermite_comparison(&cfg)?,
        ExperimentKind::PhaseVsSde => run_phase_vs_sde(&cfg)?,
    };
    eprintln!("elapsed: {:.3}s", report.meta.elapsed_s);
    let content = match args.format {
        OutputFormat::Json => {
            let mut s = report.to_canonical_json();
            s.push('\n');
            s
        }
        OutputFormat::Csv => report.to_csv(),
    };
    emit(&args.out, &content)
}

/// Serialized output of the sine-beta subcommand.
#[derive(serde::Serialize)]
struct SineBetaOutput {
    config: SineBetaConfig,
    mean_residual: f64,
    monotonicity_violations: Vec<u64>,
    samples: Vec<betabulk::spectral::CountingSample>,
}

fn cmd_sine_beta(args: SineBetaArgs) -> Result<(), Error> {
    install_threads(args.threads);
    for w in args.lambda.windows(2) {
        // rejects NaN grid entries as well
        #[allow(clippy::neg_cmp_op_on_partial_ord)]
        if !(w[0] < w[1]) {
            return Err(Error::InvalidParameter("lambda grid must be strictly increasing".into()));
        }
    }
    let cfg = SineBetaConfig {
        beta: args.beta,
        lambda_grid: args.lambda.clone(),
        h: args.h,
        delta: args.delta,
        replicas: args.replicas,
        seed: args.seed,
    };
    let out = sine_beta_counting(&cfg)?;
    let content = match args.format {
        OutputFormat::Json => {
            let payload = SineBetaOutput {
                config: cfg,
                mean_residual: out.mean_residual,
                monotonicity_violations: out.monotonicity_violations,
                samples: out.samples,
            };
            format!("{}\n", serde_json::to_string_pretty(&payload).expect("serializes"))
        }
        OutputFormat::Csv => {
            let mut s = String::from("replica_id,source,lambda,count\n");
            for sample in &out.samples {
                for (l, c) in sample.lambda_grid.iter().zip(&sample.counts) {
                    s.push_str(&format!("{},{},{},{}\n", sample.replica_id, sample.source, l, c));
                }
            }
            s
        }
    };
    emit(&args.out, &content)
}
