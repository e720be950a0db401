use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use sha2::{Digest, Sha256};

use cyclescope::hp::{hp_decompose, HpDecomposition};
use cyclescope::pipeline::{self, PipelineConfig, PipelineReport, TOOL_VERSION};
use cyclescope::report::{
    decomposition_csv, hp_cycles_csv, read_series_file, scan_csv, series_csv, stages_csv, to_json,
    write_atomic,
};
use cyclescope::series::YearMonth;
use cyclescope::spectral::{RefineObjective, BAND_HI, DEFAULT_STEP};
use cyclescope::synth::{generate, ground_truth, GroundTruth, SyntheticSpec};
use cyclescope::validate::{self, Check};
use cyclescope::Error;

#[derive(Parser)]
#[command(name = "cyclescope", version, about = "Business-cycle frequency identification for monthly series")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the identification pipeline on a `date,value` CSV.
    Analyze(AnalyzeArgs),
    /// Generate a synthetic series from a JSON spec.
    Simulate(SimulateArgs),
    /// Run built-in oracle and Monte Carlo checks.
    Validate(ValidateArgs),
    /// HP trend/cycle decomposition for one or more λ.
    Filter(FilterArgs),
}

#[derive(Args)]
struct AnalyzeArgs {
    input: PathBuf,
    /// Log-transform the input (default).
    #[arg(long, overrides_with = "no_log")]
    log: bool,
    #[arg(long = "no-log")]
    no_log: bool,
    /// Differencing order.
    #[arg(long = "p", default_value_t = 1)]
    p: u32,
    #[arg(long, value_delimiter = ',', default_values_t = vec![0.92, 0.95, 0.99])]
    gammas: Vec<f64>,
    #[arg(long = "scan-gamma", default_value_t = 0.99)]
    scan_gamma: f64,
    #[arg(long = "grid-step", default_value_t = DEFAULT_STEP)]
    grid_step: f64,
    #[arg(long = "band-hi", default_value_t = BAND_HI)]
    band_hi: f64,
    /// Block length override (default round(2.5 √n)).
    #[arg(long = "b")]
    b: Option<usize>,
    #[arg(long = "lambda", num_args = 1.., value_delimiter = ',',
          default_values_t = vec![5500.0, 12000.0, 32000.0, 55000.0])]
    lambdas: Vec<f64>,
    #[arg(long = "min-phase", default_value_t = 9)]
    min_phase: usize,
    /// Maximize |m̂| instead of the demeaned |r̂| when refining.
    #[arg(long = "raw-refine")]
    raw_refine: bool,
    /// Accepted for interface uniformity; the analysis is deterministic.
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, default_value = ".")]
    out: PathBuf,
}

#[derive(Args)]
struct SimulateArgs {
    spec: PathBuf,
    #[arg(long)]
    n: usize,
    /// Overrides the spec's seed.
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, default_value = "1995-01")]
    start: String,
    #[arg(long, default_value = ".")]
    out: PathBuf,
}

#[derive(Args)]
struct ValidateArgs {
    /// Exhaustive subsampling oracle equivalence.
    #[arg(long)]
    oracle: bool,
    /// Banded vs dense HP solve.
    #[arg(long)]
    hp: bool,
    /// λ → cutoff period table.
    #[arg(long = "lambda-table")]
    lambda_table: bool,
    /// Frequency → period conversions.
    #[arg(long)]
    periods: bool,
    /// Seasonal annihilation of the 2x12 filter.
    #[arg(long)]
    seasonal: bool,
    /// Monte Carlo size/power (slow).
    #[arg(long = "monte-carlo")]
    monte_carlo: bool,
    #[arg(long, default_value_t = 200)]
    replications: usize,
    /// Also write validation.json here.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct FilterArgs {
    input: PathBuf,
    #[arg(long = "lambda", num_args = 1.., value_delimiter = ',', required = true)]
    lambdas: Vec<f64>,
    /// Log-transform before filtering.
    #[arg(long)]
    log: bool,
    #[arg(long, default_value = ".")]
    out: PathBuf,
}

#[derive(Serialize)]
struct RunManifest<C: Serialize> {
    command: String,
    config: C,
    input_digest: String,
    tool_version: String,
    seed: Option<u64>,
    outputs: Vec<String>,
}

impl<C: Serialize> RunManifest<C> {
    fn new(command: &str, config: C, input: &[u8], seed: Option<u64>, outputs: &[&str]) -> Self {
        Self {
            command: command.to_string(),
            config,
            input_digest: hex_digest(input),
            tool_version: TOOL_VERSION.to_string(),
            seed,
            outputs: outputs.iter().map(|s| s.to_string()).collect(),
        }
    }
}

#[derive(Serialize)]
struct AnalyzeDocument<'a> {
    #[serde(flatten)]
    report: &'a PipelineReport,
    manifest: RunManifest<&'a PipelineConfig>,
}

#[derive(Serialize)]
struct TruthDocument<'a> {
    #[serde(flatten)]
    truth: &'a GroundTruth,
    manifest: RunManifest<&'a SyntheticSpec>,
}

#[derive(Serialize)]
struct ValidationDocument<'a> {
    checks: &'a [Check],
    passed: bool,
    tool_version: &'a str,
}

fn hex_digest(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

enum Failure {
    Input(String),
    Internal(String),
    ChecksFailed,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        if e.is_input_error() {
            Failure::Input(e.to_string())
        } else {
            Failure::Internal(e.to_string())
        }
    }
}

fn read_input(path: &Path) -> Result<Vec<u8>, Failure> {
    std::fs::read(path).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn analyze(args: AnalyzeArgs) -> Result<(), Failure> {
    let bytes = read_input(&args.input)?;
    let series = read_series_file(&args.input)?;
    let config = PipelineConfig {
        log_transform: !args.no_log || args.log,
        trend_order: args.p,
        gammas: args.gammas,
        scan_gamma: args.scan_gamma,
        grid_step: args.grid_step,
        band_hi: args.band_hi,
        b_override: args.b,
        lambdas: args.lambdas,
        min_phase_months: args.min_phase,
        refine_objective: if args.raw_refine {
            RefineObjective::Raw
        } else {
            RefineObjective::Demeaned
        },
    };
    let report = pipeline::run(&series, &config)?;
    let outputs = ["report.json", "scan.csv", "stages.csv", "hp_cycles.csv"];
    let doc = AnalyzeDocument {
        report: &report,
        manifest: RunManifest::new("analyze", &config, &bytes, args.seed, &outputs),
    };
    let out = &args.out;
    write_atomic(&out.join("report.json"), to_json(&doc)?.as_bytes())?;
    write_atomic(&out.join("scan.csv"), scan_csv(&report.scan).as_bytes())?;
    write_atomic(&out.join("stages.csv"), stages_csv(&report).as_bytes())?;
    write_atomic(&out.join("hp_cycles.csv"), hp_cycles_csv(&report).as_bytes())?;

    println!(
        "{}: n = {}, block length b = {}, {} flagged interval(s) at gamma {}",
        args.input.display(),
        report.provenance.input_len,
        report.provenance.block_length,
        report.intervals.len(),
        config.scan_gamma
    );
    for c in &report.cycles {
        println!(
            "  psi = {:.6}  period = {:.2} months ({:.2} years)  amplitude = {:.6}  [{}]",
            c.psi, c.period_months, c.period_years, c.amplitude, c.band
        );
    }
    println!("wrote {}", out.join("report.json").display());
    Ok(())
}

fn simulate(args: SimulateArgs) -> Result<(), Failure> {
    let bytes = read_input(&args.spec)?;
    let mut spec: SyntheticSpec = serde_json::from_slice(&bytes)
        .map_err(|e| Failure::Input(format!("{}: {e}", args.spec.display())))?;
    if let Some(seed) = args.seed {
        spec.seed = seed;
    }
    let start: YearMonth = args.start.parse()?;
    let series = generate(&spec, args.n, start)?;
    let truth = ground_truth(&spec, args.n, start)?;
    let outputs = ["series.csv", "truth.json"];
    let doc = TruthDocument {
        truth: &truth,
        manifest: RunManifest::new("simulate", &spec, &bytes, Some(spec.seed), &outputs),
    };
    write_atomic(&args.out.join("series.csv"), series_csv(&series).as_bytes())?;
    write_atomic(&args.out.join("truth.json"), to_json(&doc)?.as_bytes())?;
    println!(
        "wrote {} observations ({} to {}) with seed {}",
        series.len(),
        series.start,
        series.end(),
        spec.seed
    );
    Ok(())
}

fn run_validate(args: ValidateArgs) -> Result<(), Failure> {
    let any = args.oracle || args.hp || args.lambda_table || args.periods || args.seasonal || args.monte_carlo;
    let mut checks = Vec::new();
    if args.oracle || !any {
        checks.extend(validate::oracle_equivalence()?);
    }
    if args.hp || !any {
        checks.extend(validate::hp_oracle()?);
    }
    if args.lambda_table || !any {
        checks.extend(validate::lambda_table()?);
    }
    if args.periods || !any {
        checks.extend(validate::period_table()?);
    }
    if args.seasonal || !any {
        checks.extend(validate::seasonal_annihilation()?);
    }
    if args.monte_carlo {
        checks.extend(validate::monte_carlo_checks(args.replications)?);
    }
    let width = checks.iter().map(|c| c.name.len()).max().unwrap_or(0);
    for c in &checks {
        println!(
            "{}  {:<width$}  measured {:<12.4e} tolerance {:<10.3e} {}",
            if c.passed { "PASS" } else { "FAIL" },
            c.name,
            c.measured,
            c.tolerance,
            c.detail,
        );
    }
    let passed = checks.iter().all(|c| c.passed);
    if let Some(dir) = args.out {
        let doc = ValidationDocument {
            checks: &checks,
            passed,
            tool_version: TOOL_VERSION,
        };
        write_atomic(&dir.join("validation.json"), to_json(&doc)?.as_bytes())?;
    }
    if passed {
        Ok(())
    } else {
        Err(Failure::ChecksFailed)
    }
}

fn filter(args: FilterArgs) -> Result<(), Failure> {
    let series = read_series_file(&args.input)?;
    let series = if args.log { series.ln()? } else { series };
    let parts = args
        .lambdas
        .iter()
        .map(|&l| hp_decompose(&series, l))
        .collect::<Result<Vec<HpDecomposition>, _>>()?;
    let path = args.out.join("decomposition.csv");
    write_atomic(&path, decomposition_csv(&series, &parts).as_bytes())?;
    println!("wrote {} ({} lambda value(s))", path.display(), parts.len());
    Ok(())
}

fn configure_threads() {
    if let Some(n) = std::env::var("CYCLESCOPE_THREADS")
        .ok()
        .and_then(|v| v.parse::<usize>().ok())
        .filter(|&n| n > 0)
    {
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    configure_threads();
    let result = match cli.command {
        Command::Analyze(a) => analyze(a),
        Command::Simulate(a) => simulate(a),
        Command::Validate(a) => run_validate(a),
        Command::Filter(a) => filter(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::ChecksFailed) => {
            eprintln!("validation failed");
            ExitCode::from(1)
        }
        Err(Failure::Input(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Internal(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}
