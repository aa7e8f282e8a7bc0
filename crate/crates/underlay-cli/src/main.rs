//! Command-line front end: point calculations, rate profiles, Monte Carlo
//! sweeps and self-check suites.
//!
//! Exit codes: 0 on success, 1 on runtime or configuration failure, 2 on
//! usage errors.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use underlay::channel::{capacity, db_to_linear, linear_to_db, inv_capacity, LinSnr, Rate};
use underlay::rates::{rate_profile, zero_outage_snr, DecoderKind, ProfileBreakpoints};
use underlay::sim::{run_sweep, ScenarioConfig, SweepResult};
use underlay::verify::{closed_form_suite, geometry_suite, mac_oracle_suite, SuiteReport};

use underlay_cli::config::{load_config, SweepVariable};
use underlay_cli::output::{sig6, write_csv, RunManifest};

/// Fallback master seed taken from the environment when neither the
/// command line nor the config file provides one.
const SEED_ENV_VAR: &str = "UNDERLAY_SEED";

#[derive(Parser)]
#[command(
    name = "underlay",
    version,
    about = "Zero-outage downlink rate selection with a fixed-rate machine-type D2D underlay"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print the zero-outage downlink SNR and rate for one scenario
    Rate(RateArgs),
    /// Emit the downlink rate versus single-interferer SNR as CSV
    Profile(ProfileArgs),
    /// Run a Monte Carlo sweep described by a config file
    Simulate(SimulateArgs),
    /// Run a self-check suite and report pass/fail per property
    Verify(VerifyArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum DecoderArg {
    Jd,
    Sd,
}

impl From<DecoderArg> for DecoderKind {
    fn from(arg: DecoderArg) -> Self {
        match arg {
            DecoderArg::Jd => DecoderKind::Jd,
            DecoderArg::Sd => DecoderKind::Sd,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum SweepArg {
    #[value(name = "r_m")]
    Rm,
    #[value(name = "n_m")]
    Nm,
    #[value(name = "lambda_i")]
    LambdaI,
}

impl SweepArg {
    fn variable(self) -> SweepVariable {
        match self {
            SweepArg::Rm => SweepVariable::Rm,
            SweepArg::Nm => SweepVariable::Nm,
            SweepArg::LambdaI => SweepVariable::LambdaI,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum SuiteArg {
    MacOracle,
    ClosedForm,
    Geometry,
}

fn parse_finite(value: &str) -> std::result::Result<f64, String> {
    let parsed: f64 = value.parse().map_err(|e| format!("{e}"))?;
    if parsed.is_finite() {
        Ok(parsed)
    } else {
        Err("must be a finite number".to_string())
    }
}

fn parse_nonneg(value: &str) -> std::result::Result<f64, String> {
    let parsed = parse_finite(value)?;
    if parsed >= 0.0 {
        Ok(parsed)
    } else {
        Err("must be nonnegative".to_string())
    }
}

fn parse_mtd_count(value: &str) -> std::result::Result<usize, String> {
    let parsed: usize = value.parse().map_err(|e| format!("{e}"))?;
    if (1..=20).contains(&parsed) {
        Ok(parsed)
    } else {
        Err("must be between 1 and 20".to_string())
    }
}

#[derive(Args)]
struct RateArgs {
    /// Downlink SNR gamma_B in dB
    #[arg(long = "gamma-b-db", value_parser = parse_finite)]
    gamma_b_db: f64,
    /// Fixed MTD rate R_M in bits/s/Hz
    #[arg(long = "r-m", default_value = "0.01", value_parser = parse_nonneg)]
    r_m: f64,
    /// Number of associated MTDs
    #[arg(long = "n-m", default_value = "1", value_parser = parse_mtd_count)]
    n_m: usize,
    /// Decoder architecture
    #[arg(long, value_enum, default_value = "jd")]
    decoder: DecoderArg,
}

#[derive(Args)]
struct ProfileArgs {
    /// Decoder architecture
    #[arg(long, value_enum, default_value = "jd")]
    decoder: DecoderArg,
    /// Downlink SNR gamma_B in dB
    #[arg(long = "gamma-b-db", value_parser = parse_finite)]
    gamma_b_db: f64,
    /// Fixed MTD rate R_M in bits/s/Hz
    #[arg(long = "r-m", default_value = "0.01", value_parser = parse_nonneg)]
    r_m: f64,
    /// Smallest interferer SNR on the grid (linear)
    #[arg(long = "grid-min", default_value = "0", value_parser = parse_nonneg)]
    grid_min: f64,
    /// Largest interferer SNR on the grid (linear); defaults to ten times
    /// the full-cancellation threshold
    #[arg(long = "grid-max", value_parser = parse_nonneg)]
    grid_max: Option<f64>,
    /// Number of grid points
    #[arg(long = "grid-points", default_value = "1000", value_parser = clap::value_parser!(u64).range(2..))]
    grid_points: u64,
    /// Output path (stdout when omitted)
    #[arg(long = "out")]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SimulateArgs {
    /// Experiment config file (TOML)
    #[arg(long = "config")]
    config: PathBuf,
    /// Variable to sweep
    #[arg(long = "sweep", value_enum)]
    sweep: SweepArg,
    /// Output path (stdout when omitted)
    #[arg(long = "out")]
    out: Option<PathBuf>,
    /// Master seed override
    #[arg(long = "seed")]
    seed: Option<u64>,
    /// Trials per sweep point override
    #[arg(long = "trials", value_parser = clap::value_parser!(u64).range(1..))]
    trials: Option<u64>,
    /// Worker thread count (defaults to all cores; results do not depend on it)
    #[arg(long = "workers", value_parser = clap::value_parser!(u64).range(1..))]
    workers: Option<u64>,
}

#[derive(Args)]
struct VerifyArgs {
    /// Which suite to run
    #[arg(long = "suite", value_enum)]
    suite: SuiteArg,
    /// Master seed override for the randomized suites
    #[arg(long = "seed")]
    seed: Option<u64>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Rate(args) => cmd_rate(&args),
        Command::Profile(args) => cmd_profile(&args),
        Command::Simulate(args) => cmd_simulate(&args),
        Command::Verify(args) => cmd_verify(&args),
    };
    match outcome {
        Ok(code) => code,
        Err(error) => {
            eprintln!("error: {error:#}");
            ExitCode::from(1)
        }
    }
}

fn env_seed() -> Option<u64> {
    std::env::var(SEED_ENV_VAR).ok().and_then(|raw| raw.parse().ok())
}

// ---------------------------------------------------------------------------
// rate
// ---------------------------------------------------------------------------

fn cmd_rate(args: &RateArgs) -> Result<ExitCode> {
    let gamma_b = LinSnr::new(db_to_linear(args.gamma_b_db)?)?;
    let gamma_m = inv_capacity(Rate::new(args.r_m)?);
    let decoder: DecoderKind = args.decoder.into();
    let threshold = zero_outage_snr(decoder, gamma_b, gamma_m, args.n_m)?;
    let rate = capacity(LinSnr::new(threshold.value())?);

    println!("decoder: {decoder}");
    println!("n_m: {}", args.n_m);
    println!("r_m: {} bits/s/Hz (Gamma_M = {} linear)", sig6(args.r_m), sig6(gamma_m.value()));
    println!(
        "gamma_b: {} dB ({} linear)",
        sig6(args.gamma_b_db),
        sig6(gamma_b.value())
    );
    let db = if threshold.value() > 0.0 {
        format!("{} dB", sig6(linear_to_db(threshold.value())?))
    } else {
        "-inf dB".to_string()
    };
    println!("zero-outage snr: {} linear ({db})", sig6(threshold.value()));
    println!("zero-outage rate: {} bits/s/Hz", sig6(rate.value()));
    if decoder == DecoderKind::Sd && args.n_m > 1 {
        println!(
            "note: with single-user decoding and more than one MTD no positive \
             downlink rate is decodable for every interference realization"
        );
    }
    Ok(ExitCode::SUCCESS)
}

// ---------------------------------------------------------------------------
// profile
// ---------------------------------------------------------------------------

fn cmd_profile(args: &ProfileArgs) -> Result<ExitCode> {
    let gamma_b = LinSnr::new(db_to_linear(args.gamma_b_db)?)?;
    let gamma_m = inv_capacity(Rate::new(args.r_m)?);
    let decoder: DecoderKind = args.decoder.into();

    let cancel_threshold = gamma_m.value() * (1.0 + gamma_b.value());
    let grid_max = args.grid_max.unwrap_or_else(|| {
        if cancel_threshold > 0.0 {
            10.0 * cancel_threshold
        } else {
            10.0 * (1.0 + gamma_b.value())
        }
    });
    if grid_max <= args.grid_min {
        // usage error: report like a flag validation failure
        eprintln!(
            "error: invalid value for '--grid-max': must exceed --grid-min ({})",
            args.grid_min
        );
        return Ok(ExitCode::from(2));
    }

    let mut grid: Vec<f64> = (0..args.grid_points)
        .map(|i| {
            args.grid_min
                + (grid_max - args.grid_min) * i as f64 / (args.grid_points - 1) as f64
        })
        .collect();
    // breakpoint rows are part of the output contract
    for breakpoint in [gamma_m.value(), cancel_threshold] {
        if breakpoint >= args.grid_min && breakpoint <= grid_max {
            grid.push(breakpoint);
        }
    }
    grid.sort_by(|a, b| a.partial_cmp(b).unwrap());
    grid.dedup();
    let grid: Vec<LinSnr> =
        grid.into_iter().map(LinSnr::new).collect::<underlay::Result<_>>()?;

    let profile = rate_profile(decoder, gamma_b, gamma_m, &grid)?;

    let mut manifest = RunManifest::new("profile");
    manifest.push("decoder", decoder);
    manifest.push("gamma_b_db", args.gamma_b_db);
    manifest.push("r_m", args.r_m);
    match profile.breakpoints {
        ProfileBreakpoints::Jd { tau1, tau2 } => {
            manifest.push("tau1", tau1.value());
            manifest.push("tau2", tau2.value());
        }
        ProfileBreakpoints::Sd { phi1 } => manifest.push("phi1", phi1.value()),
    }

    let rows: Vec<Vec<String>> = profile
        .gamma_1_grid
        .iter()
        .zip(&profile.rates)
        .map(|(g1, rate)| vec![g1.value().to_string(), rate.value().to_string()])
        .collect();
    emit(args.out.as_deref(), &manifest, &["gamma_1_linear", "rate_bps_hz"], &rows)?;
    Ok(ExitCode::SUCCESS)
}

// ---------------------------------------------------------------------------
// simulate
// ---------------------------------------------------------------------------

fn cmd_simulate(args: &SimulateArgs) -> Result<ExitCode> {
    let loaded = load_config(&args.config)?;
    let mut scenario = loaded.scenario.clone();
    scenario.master_seed = match (args.seed, loaded.seed_in_file, env_seed()) {
        (Some(seed), _, _) => seed,
        (None, true, _) => scenario.master_seed,
        (None, false, Some(seed)) => seed,
        (None, false, None) => scenario.master_seed,
    };
    if let Some(trials) = args.trials {
        scenario.trials = trials;
    }
    if let Some(workers) = args.workers {
        rayon::ThreadPoolBuilder::new()
            .num_threads(workers as usize)
            .build_global()
            .context("cannot configure worker pool")?;
    }

    let sweep = loaded.sweep_spec(args.sweep.variable());
    let result = run_sweep(&scenario, &sweep)?;

    let manifest = simulate_manifest(&args.config, &scenario, &result);
    let rows: Vec<Vec<String>> = result
        .points
        .iter()
        .map(|p| {
            vec![
                p.sweep_value.to_string(),
                p.mean_rate_sim.to_string(),
                p.std_err.to_string(),
                p.mean_rate_analytic.to_string(),
                p.analytic_kind.as_str().to_string(),
                p.outage_rate.to_string(),
                p.trials.to_string(),
                result.master_seed.to_string(),
            ]
        })
        .collect();
    emit(
        args.out.as_deref(),
        &manifest,
        &[
            "sweep_value",
            "mean_rate_sim",
            "std_err",
            "mean_rate_analytic",
            "analytic_kind",
            "outage_rate",
            "trials",
            "seed",
        ],
        &rows,
    )?;
    Ok(ExitCode::SUCCESS)
}

fn simulate_manifest(
    config: &std::path::Path,
    scenario: &ScenarioConfig,
    result: &SweepResult,
) -> RunManifest {
    let mut manifest = RunManifest::new("simulate");
    manifest.push("config", config.display());
    manifest.push("sweep", result.variable);
    manifest.push("decoder", scenario.decoder);
    manifest.push("sigma2_dbm", scenario.sigma2_dbm);
    manifest.push("alpha", scenario.alpha);
    manifest.push("p_m_dbm", scenario.p_m_dbm);
    manifest.push("p_b_dbm", scenario.p_b_dbm);
    manifest.push("k_db", scenario.k_db);
    manifest.push("radius_m", scenario.radius_m);
    manifest.push("n_m", scenario.n_m);
    manifest.push("n_i", scenario.n_i().unwrap_or_default());
    manifest.push("r_m", scenario.r_m);
    manifest.push("trials", scenario.trials);
    manifest.push("seed", scenario.master_seed);
    manifest
}

// ---------------------------------------------------------------------------
// verify
// ---------------------------------------------------------------------------

fn cmd_verify(args: &VerifyArgs) -> Result<ExitCode> {
    let seed = args.seed.or_else(env_seed).unwrap_or(0xACCE55);
    let report: SuiteReport = match args.suite {
        SuiteArg::MacOracle => mac_oracle_suite(seed, 20_000),
        SuiteArg::ClosedForm => closed_form_suite(),
        SuiteArg::Geometry => geometry_suite(seed),
    };
    println!("suite: {}", report.name);
    for check in &report.checks {
        let status = if check.passed { "PASS" } else { "FAIL" };
        println!("[{status}] {} — {}", check.label, check.detail);
    }
    if report.passed() {
        println!("result: all {} checks passed", report.checks.len());
        Ok(ExitCode::SUCCESS)
    } else {
        println!("result: FAILED");
        Ok(ExitCode::from(1))
    }
}

// ---------------------------------------------------------------------------
// output plumbing
// ---------------------------------------------------------------------------

fn emit(
    out: Option<&std::path::Path>,
    manifest: &RunManifest,
    header: &[&str],
    rows: &[Vec<String>],
) -> Result<()> {
    match out {
        Some(path) => {
            let file = File::create(path)
                .with_context(|| format!("cannot create output file {}", path.display()))?;
            let mut writer = BufWriter::new(file);
            write_csv(&mut writer, manifest, header, rows)?;
            writer.flush()?;
        }
        None => {
            let stdout = std::io::stdout();
            let mut writer = stdout.lock();
            write_csv(&mut writer, manifest, header, rows)?;
        }
    }
    Ok(())
}
