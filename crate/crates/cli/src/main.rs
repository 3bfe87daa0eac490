//! Command-line front end: configuration, seeding, experiment dispatch,
//! and bit-stable report emission.
//!
//! Exit codes: 0 success, 2 configuration error, 3 runtime statistical
//! failure (zero accepted trials, failed CGLMP self-check, insufficient
//! calibration samples).

mod config;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use config::{resolve, FileConfig};
use lhvsim::p1::P1Params;
use lhvsim::sampling::{calibrate_scale, random_basis, RngStream, SamplingError};
use lhvsim::scenarios::{
    cglmp_study, delta_sweep, phi_study, randomized_study, P1Protocol, Protocol,
    PrtqRejectionProtocol, Scenario, ScenarioError, StudyConfig,
};
use output::{ensure_dir, fmt_f64, Manifest};

const DEFAULT_SEED: u64 = 42;

#[derive(Parser)]
#[command(name = "lhvsim", version, about = "Classical simulation studies of projective quantum measurements")]
struct Cli {
    /// Flat `key = value` config file; command-line flags take precedence.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Master seed (also via the LHVSIM_SEED environment variable).
    #[arg(long, global = true, env = "LHVSIM_SEED")]
    seed: Option<u64>,

    /// Worker threads for setup-level parallelism; results are identical
    /// regardless of the thread count.
    #[arg(long, global = true)]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Randomized TVD study over Haar-random input setups.
    RunRandom(RandomArgs),
    /// Structured d=3 study over the phi-parameterized measurement grid.
    RunPhi(PhiArgs),
    /// CGLMP entanglement setup: per-pair TVD and the I3 value.
    RunCglmp(CglmpArgs),
    /// Sweep the acceptance cutoff Delta around 1/2.
    SweepDelta(SweepArgs),
    /// Check the rejection scale M_d by the factor-alpha acceptance trick.
    CalibrateM(CalibArgs),
    /// Desk-scale end-to-end rerun of one report table (1..5).
    ReproduceTable(ReproduceArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ProtocolId {
    P1,
    Prtq,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ScenarioArg {
    Pm,
    Ent,
}

impl From<ScenarioArg> for Scenario {
    fn from(s: ScenarioArg) -> Self {
        match s {
            ScenarioArg::Pm => Scenario::Pm,
            ScenarioArg::Ent => Scenario::Ent,
        }
    }
}

#[derive(Args)]
struct RandomArgs {
    #[arg(long, value_enum)]
    protocol: Option<ProtocolId>,
    #[arg(long, value_enum)]
    scenario: Option<ScenarioArg>,
    /// Hilbert space dimension (2, 3, 4; larger accepted with a warning).
    #[arg(long)]
    d: Option<usize>,
    /// Number of randomized input setups.
    #[arg(long)]
    n: Option<usize>,
    /// Shared-randomness samples per setup.
    #[arg(long)]
    n_ini: Option<usize>,
    /// Override the rejection scale M_d.
    #[arg(long)]
    m: Option<f64>,
    /// Override the weight exponent alpha_d.
    #[arg(long)]
    alpha: Option<f64>,
    /// Override the acceptance cutoff Delta.
    #[arg(long)]
    delta: Option<f64>,
    /// Reuse one shared-randomness pool across setups (the paper's regime).
    #[arg(long)]
    shared_pool: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct PhiArgs {
    #[arg(long)]
    n_phi: Option<usize>,
    #[arg(long)]
    n_ini: Option<usize>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct CglmpArgs {
    #[arg(long)]
    n_ini: Option<usize>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SweepArgs {
    #[arg(long)]
    d: Option<usize>,
    /// Comma-separated cutoffs; fractions like 11/24 are accepted.
    #[arg(long)]
    cutoffs: Option<String>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    n_ini: Option<usize>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct CalibArgs {
    #[arg(long)]
    d: Option<usize>,
    #[arg(long)]
    m: Option<f64>,
    /// Scale multiplier for the acceptance check.
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ReproduceArgs {
    /// Table number: 1 = d=2 randomized, 2 = cutoff sweep, 3 = d=3
    /// randomized, 4 = CGLMP, 5 = d=4 randomized.
    table: u8,
    #[arg(long)]
    out: Option<PathBuf>,
}

enum CliError {
    Config(String),
    Runtime(String),
}

impl CliError {
    fn exit_code(&self) -> ExitCode {
        match self {
            CliError::Config(_) => ExitCode::from(2),
            CliError::Runtime(_) => ExitCode::from(3),
        }
    }
}

impl From<ScenarioError> for CliError {
    fn from(e: ScenarioError) -> Self {
        match e {
            ScenarioError::EmptyDistribution | ScenarioError::CglmpSelfCheck { .. } => {
                CliError::Runtime(e.to_string())
            }
            ScenarioError::Sampling(SamplingError::InsufficientSamples { .. }) => {
                CliError::Runtime(e.to_string())
            }
            other => CliError::Config(other.to_string()),
        }
    }
}

impl From<SamplingError> for CliError {
    fn from(e: SamplingError) -> Self {
        match e {
            SamplingError::InsufficientSamples { .. } => CliError::Runtime(e.to_string()),
            other => CliError::Config(other.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Config(format!("io error: {e}"))
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let msg = match &e {
                CliError::Config(m) | CliError::Runtime(m) => m,
            };
            eprintln!("error: {msg}");
            e.exit_code()
        }
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    let file_cfg = match &cli.config {
        Some(path) => FileConfig::load(path).map_err(CliError::Config)?,
        None => FileConfig::default(),
    };
    let seed = resolve(cli.seed, &file_cfg, "seed", DEFAULT_SEED).map_err(CliError::Config)?;
    let threads = resolve(cli.threads, &file_cfg, "threads", 0).map_err(CliError::Config)?;
    if threads > 0 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
            .map_err(|e| CliError::Config(format!("thread pool: {e}")))?;
    }
    match cli.command {
        Command::RunRandom(args) => run_random(args, &file_cfg, seed),
        Command::RunPhi(args) => run_phi(args, &file_cfg, seed),
        Command::RunCglmp(args) => run_cglmp(args, &file_cfg, seed),
        Command::SweepDelta(args) => sweep_delta_cmd(args, &file_cfg, seed),
        Command::CalibrateM(args) => calibrate_m(args, &file_cfg, seed),
        Command::ReproduceTable(args) => reproduce_table(args, &file_cfg, seed),
    }
}

fn resolve_params(
    d: usize,
    m: Option<f64>,
    alpha: Option<f64>,
    delta: Option<f64>,
) -> P1Params {
    let mut params = P1Params::defaults(d);
    if let Some(m) = m {
        params = params.with_scale(m);
    }
    if let Some(alpha) = alpha {
        params = params.with_alpha(alpha);
    }
    if let Some(delta) = delta {
        params = params.with_cutoff(delta);
    }
    params
}

#[derive(Serialize)]
struct RandomManifestConfig {
    protocol: String,
    scenario: Scenario,
    d: usize,
    n: usize,
    n_ini: usize,
    m: f64,
    alpha: f64,
    delta: f64,
    shared_pool: bool,
}

fn run_random(args: RandomArgs, file_cfg: &FileConfig, seed: u64) -> Result<(), CliError> {
    let d = resolve(args.d, file_cfg, "d", 2).map_err(CliError::Config)?;
    if d < 2 {
        return Err(CliError::Config(format!("d must be at least 2, got {d}")));
    }
    if d > 4 {
        eprintln!("warning: d = {d} is outside the studied range 2..4");
    }
    let n = resolve(args.n, file_cfg, "n", 20).map_err(CliError::Config)?;
    let n_ini = resolve(args.n_ini, file_cfg, "n-ini", 40_000).map_err(CliError::Config)?;
    let protocol_id = args.protocol.unwrap_or(match file_cfg.get("protocol") {
        Some("p1") | None => ProtocolId::P1,
        Some("prtq") => ProtocolId::Prtq,
        Some(other) => return Err(CliError::Config(format!("unknown protocol '{other}'"))),
    });
    let scenario: Scenario = args
        .scenario
        .unwrap_or(match file_cfg.get("scenario") {
            Some("ent") => ScenarioArg::Ent,
            Some("pm") | None => ScenarioArg::Pm,
            Some(other) => return Err(CliError::Config(format!("unknown scenario '{other}'"))),
        })
        .into();
    let params = resolve_params(d, args.m, args.alpha, args.delta);
    let protocol: Box<dyn Protocol> = match protocol_id {
        ProtocolId::P1 => Box::new(P1Protocol::new(params)),
        ProtocolId::Prtq => {
            if d != 2 {
                return Err(CliError::Config("prtq is defined for d = 2 only".into()));
            }
            Box::new(PrtqRejectionProtocol)
        }
    };
    let shared_pool = args.shared_pool || file_cfg.get("shared-pool") == Some("true");
    let cfg = StudyConfig {
        d,
        n_setups: n,
        n_ini,
        seed,
        shared_pool,
    };
    let report = randomized_study(protocol.as_ref(), scenario, &cfg)?;
    for w in &report.warnings {
        eprintln!("warning: {w}");
    }
    let dir = ensure_dir(&args.out.unwrap_or_else(|| PathBuf::from("out/run-random")))
        .map_err(CliError::Config)?;
    output::write_report_csv(&dir.join("report.csv"), &[&report])?;
    output::write_manifest(
        &dir,
        &Manifest {
            artifact: "lhvsim",
            version: env!("CARGO_PKG_VERSION"),
            command: "run-random".into(),
            seed,
            config: RandomManifestConfig {
                protocol: protocol.id(),
                scenario,
                d,
                n,
                n_ini,
                m: params.scale,
                alpha: params.alpha,
                delta: params.cutoff,
                shared_pool,
            },
            outputs: vec!["report.csv".into()],
        },
    )?;
    println!(
        "{} {} d={}: mean delta = {:.5} +- {:.5} over {} setups (N_out total {})",
        report.protocol,
        report.scenario,
        d,
        report.mean_delta,
        report.std_err,
        n,
        report.total_n_out()
    );
    Ok(())
}

#[derive(Serialize)]
struct PhiManifestConfig {
    n_phi: usize,
    n_ini: usize,
}

fn run_phi(args: PhiArgs, file_cfg: &FileConfig, seed: u64) -> Result<(), CliError> {
    let n_phi = resolve(args.n_phi, file_cfg, "n-phi", 11).map_err(CliError::Config)?;
    let n_ini = resolve(args.n_ini, file_cfg, "n-ini", 100_000).map_err(CliError::Config)?;
    let protocol = P1Protocol::with_defaults(3);
    let report = phi_study(&protocol, n_phi, n_ini, seed)?;
    let dir = ensure_dir(&args.out.unwrap_or_else(|| PathBuf::from("out/run-phi")))
        .map_err(CliError::Config)?;
    output::write_phi_csv(&dir.join("report.csv"), &report)?;
    output::write_manifest(
        &dir,
        &Manifest {
            artifact: "lhvsim",
            version: env!("CARGO_PKG_VERSION"),
            command: "run-phi".into(),
            seed,
            config: PhiManifestConfig { n_phi, n_ini },
            outputs: vec!["report.csv".into()],
        },
    )?;
    println!(
        "phi study: mean delta = {:.5} +- {:.5} over {} grid points",
        report.mean_delta, report.std_err, n_phi
    );
    Ok(())
}

#[derive(Serialize)]
struct CglmpManifestConfig {
    n_ini: usize,
}

fn run_cglmp(args: CglmpArgs, file_cfg: &FileConfig, seed: u64) -> Result<(), CliError> {
    let n_ini = resolve(args.n_ini, file_cfg, "n-ini", 500_000).map_err(CliError::Config)?;
    let protocol = P1Protocol::with_defaults(3);
    let report = cglmp_study(&protocol, n_ini, seed)?;
    let dir = ensure_dir(&args.out.unwrap_or_else(|| PathBuf::from("out/run-cglmp")))
        .map_err(CliError::Config)?;
    output::write_cglmp_csv(&dir.join("report.csv"), &report)?;
    output::write_manifest(
        &dir,
        &Manifest {
            artifact: "lhvsim",
            version: env!("CARGO_PKG_VERSION"),
            command: "run-cglmp".into(),
            seed,
            config: CglmpManifestConfig { n_ini },
            outputs: vec!["report.csv".into()],
        },
    )?;
    println!(
        "cglmp: I3 simulated = {:.4} (quantum {:.4}), mean delta = {:.5}",
        report.i3_simulated, report.i3_quantum, report.mean_delta
    );
    Ok(())
}

fn parse_cutoffs(raw: &str) -> Result<Vec<f64>, CliError> {
    raw.split(',')
        .map(|tok| {
            let tok = tok.trim();
            if let Some((num, den)) = tok.split_once('/') {
                let num: f64 = num
                    .trim()
                    .parse()
                    .map_err(|e| CliError::Config(format!("cutoff '{tok}': {e}")))?;
                let den: f64 = den
                    .trim()
                    .parse()
                    .map_err(|e| CliError::Config(format!("cutoff '{tok}': {e}")))?;
                Ok(num / den)
            } else {
                tok.parse()
                    .map_err(|e| CliError::Config(format!("cutoff '{tok}': {e}")))
            }
        })
        .collect()
}

#[derive(Serialize)]
struct SweepManifestConfig {
    d: usize,
    cutoffs: Vec<f64>,
    n: usize,
    n_ini: usize,
}

fn sweep_delta_cmd(args: SweepArgs, file_cfg: &FileConfig, seed: u64) -> Result<(), CliError> {
    let d = resolve(args.d, file_cfg, "d", 3).map_err(CliError::Config)?;
    let n = resolve(args.n, file_cfg, "n", 20).map_err(CliError::Config)?;
    let n_ini = resolve(args.n_ini, file_cfg, "n-ini", 60_000).map_err(CliError::Config)?;
    let raw = args
        .cutoffs
        .or_else(|| file_cfg.get("cutoffs").map(String::from))
        .unwrap_or_else(|| "10/24,11/24,1/2,13/24,14/24".into());
    let cutoffs = parse_cutoffs(&raw)?;
    let cfg = StudyConfig {
        d,
        n_setups: n,
        n_ini,
        seed,
        shared_pool: false,
    };
    let rows = delta_sweep(&cutoffs, P1Params::defaults(d), &cfg)?;
    let dir = ensure_dir(&args.out.unwrap_or_else(|| PathBuf::from("out/sweep-delta")))
        .map_err(CliError::Config)?;
    output::write_sweep_csv(&dir.join("report.csv"), &rows, d, seed)?;
    output::write_manifest(
        &dir,
        &Manifest {
            artifact: "lhvsim",
            version: env!("CARGO_PKG_VERSION"),
            command: "sweep-delta".into(),
            seed,
            config: SweepManifestConfig {
                d,
                cutoffs: cutoffs.clone(),
                n,
                n_ini,
            },
            outputs: vec!["report.csv".into()],
        },
    )?;
    for r in &rows {
        println!(
            "delta cutoff {:.4}: mean delta = {:.5} +- {:.5} (accept {:.3})",
            r.cutoff, r.mean_delta, r.std_err, r.accept_ratio
        );
    }
    Ok(())
}

#[derive(Serialize)]
struct CalibManifestConfig {
    d: usize,
    m: f64,
    alpha: f64,
    n: usize,
}

fn calibrate_m(args: CalibArgs, file_cfg: &FileConfig, seed: u64) -> Result<(), CliError> {
    let d = resolve(args.d, file_cfg, "d", 2).map_err(CliError::Config)?;
    let alpha = resolve(args.alpha, file_cfg, "alpha", 10.0).map_err(CliError::Config)?;
    let n = resolve(args.n, file_cfg, "n", 200_000).map_err(CliError::Config)?;
    let params = match args.m.or(file_cfg.get_parsed("m").map_err(CliError::Config)?) {
        Some(m) => P1Params::defaults(d).with_scale(m),
        None => P1Params::defaults(d),
    };
    // P1 acceptance weights against a fixed measurement; the weight law is
    // unitarily invariant, so the computational basis is representative
    let meas = lhvsim::qmath::Basis::computational(d);
    let mut rng = RngStream::new(seed, 0);
    let report = calibrate_scale(
        |rng| {
            let lambda = random_basis(d, rng).expect("d >= 2");
            lhvsim::p1::p1_weight(&lhvsim::p1::match_table(&lambda, &meas), &params)
        },
        params.scale,
        alpha,
        n,
        &mut rng,
    )?;
    let dir = ensure_dir(&args.out.unwrap_or_else(|| PathBuf::from("out/calibrate-m")))
        .map_err(CliError::Config)?;
    let csv = format!(
        "d,m,alpha,accept_base,accept_scaled,ratio,n,seed\n{},{},{},{},{},{},{},{}\n",
        d,
        fmt_f64(report.scale),
        fmt_f64(report.alpha),
        fmt_f64(report.accept_base),
        fmt_f64(report.accept_scaled),
        fmt_f64(report.ratio),
        report.n,
        seed,
    );
    std::fs::write(dir.join("report.csv"), csv)?;
    output::write_manifest(
        &dir,
        &Manifest {
            artifact: "lhvsim",
            version: env!("CARGO_PKG_VERSION"),
            command: "calibrate-m".into(),
            seed,
            config: CalibManifestConfig {
                d,
                m: params.scale,
                alpha,
                n,
            },
            outputs: vec!["report.csv".into()],
        },
    )?;
    println!(
        "M_{} = {}: acceptance {:.4} -> {:.4} at alpha = {}, ratio = {:.2}",
        d, params.scale, report.accept_base, report.accept_scaled, alpha, report.ratio
    );
    Ok(())
}

fn reproduce_table(args: ReproduceArgs, file_cfg: &FileConfig, seed: u64) -> Result<(), CliError> {
    let out = args
        .out
        .unwrap_or_else(|| PathBuf::from(format!("out/table-{}", args.table)));
    match args.table {
        1 => reproduce_randomized(2, 20, 40_000, seed, &out),
        2 => {
            let sweep = SweepArgs {
                d: Some(3),
                cutoffs: None,
                n: Some(10),
                n_ini: Some(30_000),
                out: Some(out),
            };
            sweep_delta_cmd(sweep, file_cfg, seed)
        }
        3 => reproduce_randomized(3, 20, 50_000, seed, &out),
        4 => {
            let cglmp = CglmpArgs {
                n_ini: Some(500_000),
                out: Some(out),
            };
            run_cglmp(cglmp, file_cfg, seed)
        }
        5 => reproduce_randomized(4, 10, 150_000, seed, &out),
        other => Err(CliError::Config(format!(
            "table must be 1..5, got {other}"
        ))),
    }
}

#[derive(Serialize)]
struct TableManifestConfig {
    d: usize,
    n: usize,
    n_ini: usize,
    scenarios: Vec<Scenario>,
}

/// Desk-scale version of the randomized tables: both scenarios at one d.
fn reproduce_randomized(
    d: usize,
    n: usize,
    n_ini: usize,
    seed: u64,
    out: &PathBuf,
) -> Result<(), CliError> {
    let protocol = P1Protocol::with_defaults(d);
    let cfg = StudyConfig {
        d,
        n_setups: n,
        n_ini,
        seed,
        shared_pool: false,
    };
    let pm = randomized_study(&protocol, Scenario::Pm, &cfg)?;
    let ent = randomized_study(&protocol, Scenario::Ent, &cfg)?;
    let dir = ensure_dir(out).map_err(CliError::Config)?;
    output::write_report_csv(&dir.join("report.csv"), &[&pm, &ent])?;
    output::write_manifest(
        &dir,
        &Manifest {
            artifact: "lhvsim",
            version: env!("CARGO_PKG_VERSION"),
            command: "reproduce-table".into(),
            seed,
            config: TableManifestConfig {
                d,
                n,
                n_ini,
                scenarios: vec![Scenario::Pm, Scenario::Ent],
            },
            outputs: vec!["report.csv".into()],
        },
    )?;
    println!(
        "d={d}: PM mean delta = {:.5} +- {:.5}; ent mean delta = {:.5} +- {:.5}",
        pm.mean_delta, pm.std_err, ent.mean_delta, ent.std_err
    );
    Ok(())
}
