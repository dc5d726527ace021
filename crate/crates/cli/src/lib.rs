//! Argument handling and dispatch for the `anomaly-forge` binary.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use anomaly_core::anomaly::{analyze, AnomalyResult};
use anomaly_core::oracle::{sample_oracle, OracleConfig};
use anomaly_core::perturbation::{sample_w, Order, TraceSamples};
use anomaly_core::quadrature::geometric_grid;
use anomaly_core::report::{emit_report, samples_csv, Format};
use anomaly_core::reproduce::{run_target, ReproduceParams, Target};
use anomaly_core::{Error, PotentialSpec, QuadratureBudget, UnitSystem};

pub const EXIT_OK: i32 = 0;
pub const EXIT_TARGET_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "anomaly-forge", version, about = "Trace anomalies of Fermi systems in singular potentials")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Print the singularity class of a potential.
    Classify {
        #[arg(long)]
        potential: PotentialSpec,
    },
    /// Sample the reduced trace difference w(Λ) and write CSV.
    Trace(SampleArgs),
    /// Sample, fit and extract the number and energy anomalies.
    Anomaly(SampleArgs),
    /// Run a reference scenario and report pass/fail.
    Reproduce {
        #[arg(long)]
        target: Target,
        /// Coulomb charge.
        #[arg(long = "Z", default_value_t = 1.0)]
        z: f64,
        /// Inverse-square strength (default: 2mα/ħ² = 100).
        #[arg(long)]
        alpha: Option<f64>,
        #[command(flatten)]
        units: UnitArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Debug, Args)]
struct UnitArgs {
    #[arg(long, default_value_t = 1.0)]
    hbar: f64,
    #[arg(long, default_value_t = 1.0)]
    mass: f64,
    #[arg(long, default_value_t = 1.0)]
    e2: f64,
}

impl UnitArgs {
    fn units(&self) -> Result<UnitSystem, Error> {
        UnitSystem::new(self.hbar, self.mass, self.e2)
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Method {
    #[value(name = "perturbative-1")]
    Perturbative1,
    #[value(name = "perturbative-2")]
    Perturbative2,
    Oracle,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum OutFormat {
    Csv,
    Keyvalue,
}

#[derive(Debug, Args)]
struct SampleArgs {
    #[arg(long)]
    potential: PotentialSpec,
    #[arg(long, default_value_t = 10.0)]
    lambda_min: f64,
    #[arg(long, default_value_t = 100.0)]
    lambda_max: f64,
    #[arg(long, default_value_t = 12)]
    points: usize,
    #[arg(long, value_enum, default_value = "perturbative-2")]
    method: Method,
    #[arg(long, value_enum)]
    format: Option<OutFormat>,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Highest angular channel summed explicitly by the oracle.
    #[arg(long)]
    ell_max: Option<u32>,
    #[command(flatten)]
    units: UnitArgs,
}

/// A failure carrying the exit code it maps to.
struct Failure {
    code: i32,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Unconverged { .. }
            | Error::NotPowerLaw { .. }
            | Error::MixedSign
            | Error::TailDivergent => EXIT_NUMERICAL,
            _ => EXIT_USAGE,
        };
        Failure { code, message: e.to_string() }
    }
}

fn usage(message: impl Into<String>) -> Failure {
    Failure { code: EXIT_USAGE, message: message.into() }
}

impl SampleArgs {
    fn samples(&self) -> Result<TraceSamples, Failure> {
        if !(self.lambda_min > 0.0 && self.lambda_min < self.lambda_max) {
            return Err(usage(format!(
                "need 0 < lambda-min < lambda-max, got {} and {}",
                self.lambda_min, self.lambda_max
            )));
        }
        if self.points < 4 {
            return Err(usage(format!("--points must be at least 4, got {}", self.points)));
        }
        let units = self.units.units()?;
        let grid = geometric_grid(self.lambda_min, self.lambda_max, self.points)?;
        let budget = QuadratureBudget::default();
        let samples = match self.method {
            Method::Perturbative1 => sample_w(&self.potential, &units, &grid, Order::First, &budget)?,
            Method::Perturbative2 => sample_w(&self.potential, &units, &grid, Order::Second, &budget)?,
            Method::Oracle => {
                let mut config = OracleConfig::default();
                if let Some(l) = self.ell_max {
                    config = config.with_ell_max(l)?;
                }
                sample_oracle(&self.potential, &units, &grid, &config)?
            }
        };
        Ok(samples)
    }
}

fn emit(text: &str, out: &Option<PathBuf>, stdout: &mut dyn Write) -> Result<(), Failure> {
    let written = match out {
        Some(path) => std::fs::write(path, text),
        None => stdout.write_all(text.as_bytes()),
    };
    written.map_err(|e| Failure { code: EXIT_USAGE, message: format!("cannot write output: {e}") })
}

fn dispatch(cli: Cli, stdout: &mut dyn Write) -> Result<i32, Failure> {
    match cli.command {
        Command::Classify { potential } => {
            emit(&format!("{}\n", potential.classify()), &None, stdout)?;
        }
        Command::Trace(args) => {
            let samples = args.samples()?;
            let text = match args.format.unwrap_or(OutFormat::Csv) {
                OutFormat::Csv => samples_csv(&samples),
                OutFormat::Keyvalue => return Err(usage("trace only writes csv")),
            };
            emit(&text, &args.out, stdout)?;
        }
        Command::Anomaly(args) => {
            let result: AnomalyResult = analyze(&args.samples()?)?;
            let format = match args.format.unwrap_or(OutFormat::Keyvalue) {
                OutFormat::Csv => Format::Csv,
                OutFormat::Keyvalue => Format::KeyValue,
            };
            emit(&emit_report(&result, format), &args.out, stdout)?;
        }
        Command::Reproduce { target, z, alpha, units, out } => {
            let params = ReproduceParams { units: units.units()?, z, alpha, ..ReproduceParams::default() };
            let outcome = run_target(target, &params)?;
            emit(&outcome.to_string(), &out, stdout)?;
            if !outcome.pass() {
                return Ok(EXIT_TARGET_FAILED);
            }
        }
    }
    Ok(EXIT_OK)
}

/// Runs the CLI on `argv` (including the program name) and returns the
/// process exit code.
pub fn run<I, T>(argv: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() { stderr.write_all(text.as_bytes()) } else { stdout.write_all(text.as_bytes()) };
            return code;
        }
    };
    match dispatch(cli, stdout) {
        Ok(code) => code,
        Err(f) => {
            let _ = writeln!(stderr, "error: {}", f.message);
            f.code
        }
    }
}
