//! `fireball`: simulate, verify and evaluate the reduced fireball models.

mod commands;
mod config;
mod output;
mod verify;

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, CommandFactory, Parser, Subcommand, ValueEnum};
use log::{error, info};
use rayon::prelude::*;
use thiserror::Error;

use config::{Format, RunConfig, Settings};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("missing required setting `model` (pass --model or set it in a config file)")]
    MissingModel,
    #[error("configuration error: {0}")]
    Config(String),
    #[error("{0}")]
    Runtime(#[from] fireball_core::Error),
    #[error("i/o error: {0}")]
    Io(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::MissingModel | CliError::Config(_) => 2,
            CliError::Runtime(_) | CliError::Io(_) => 3,
        }
    }
}

#[derive(Parser, Debug)]
#[command(name = "fireball", version, about = "Reduced fireball hydrodynamics: simulation and verification")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Integrate a model and write the trajectory with its invariants.
    Simulate(RunArgs),
    /// Run the verification suite and write a pass/fail report.
    Verify(RunArgs),
    /// Evaluate the closed-form polar solution on the sample grid.
    Analytic(RunArgs),
}

#[derive(Copy, Clone, Debug, ValueEnum)]
enum ModelArg {
    #[value(name = "1d")]
    OneD,
    #[value(name = "2d")]
    TwoD,
    #[value(name = "3d")]
    ThreeD,
    Elliptic,
}

#[derive(Copy, Clone, Debug, ValueEnum)]
enum FormatArg {
    Csv,
    Json,
}

#[derive(Args, Debug, Clone)]
struct RunArgs {
    /// Configuration file of `key = value` lines; repeat for a parameter sweep.
    #[arg(long = "config", value_name = "PATH")]
    configs: Vec<PathBuf>,
    #[arg(long, value_enum)]
    model: Option<ModelArg>,
    #[arg(long = "X", allow_negative_numbers = true)]
    x: Option<f64>,
    #[arg(long = "Y", allow_negative_numbers = true)]
    y: Option<f64>,
    #[arg(long = "Z", allow_negative_numbers = true)]
    z: Option<f64>,
    #[arg(long = "Xdot", allow_negative_numbers = true)]
    xdot: Option<f64>,
    #[arg(long = "Ydot", allow_negative_numbers = true)]
    ydot: Option<f64>,
    #[arg(long = "Zdot", allow_negative_numbers = true)]
    zdot: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    t_start: Option<f64>,
    #[arg(long)]
    t_end: Option<f64>,
    #[arg(long)]
    rel_tol: Option<f64>,
    #[arg(long)]
    abs_tol: Option<f64>,
    #[arg(long)]
    sample_interval: Option<f64>,
    /// Largest drift of H, I, Ĩ and J accepted by `verify`.
    #[arg(long)]
    drift_bound: Option<f64>,
    /// Add closed-form comparison columns (`simulate`) or checks (`verify`).
    #[arg(long)]
    compare: Option<bool>,
    #[arg(long)]
    symmetry: Option<bool>,
    #[arg(long)]
    hydro: Option<bool>,
    /// Energy for the closed-form solution.
    #[arg(long = "H")]
    h: Option<f64>,
    /// Ermakov invariant for the closed-form solution.
    #[arg(long = "I")]
    i: Option<f64>,
    /// Instant of minimum radius.
    #[arg(long, allow_negative_numbers = true)]
    t0: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    phi0: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    sign0: Option<f64>,
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<FormatArg>,
    /// Worker threads for a sweep over several config files.
    #[arg(long, default_value_t = 1)]
    jobs: usize,
}

impl RunArgs {
    fn overrides(&self) -> Result<Settings, CliError> {
        let mut s = Settings::default();
        if let Some(m) = self.model {
            let name = match m {
                ModelArg::OneD => "1d",
                ModelArg::TwoD => "2d",
                ModelArg::ThreeD => "3d",
                ModelArg::Elliptic => "elliptic",
            };
            s.set("model", name)?;
        }
        let numbers = [
            ("X", self.x),
            ("Y", self.y),
            ("Z", self.z),
            ("Xdot", self.xdot),
            ("Ydot", self.ydot),
            ("Zdot", self.zdot),
            ("t_start", self.t_start),
            ("t_end", self.t_end),
            ("rel_tol", self.rel_tol),
            ("abs_tol", self.abs_tol),
            ("sample_interval", self.sample_interval),
            ("drift_bound", self.drift_bound),
            ("H", self.h),
            ("I", self.i),
            ("t0", self.t0),
            ("phi0", self.phi0),
            ("sign0", self.sign0),
        ];
        for (key, value) in numbers {
            if let Some(v) = value {
                // `{:?}` keeps every digit
                s.set(key, format!("{v:?}"))?;
            }
        }
        for (key, value) in [("compare", self.compare), ("symmetry", self.symmetry), ("hydro", self.hydro)] {
            if let Some(v) = value {
                s.set(key, v.to_string())?;
            }
        }
        if let Some(f) = self.format {
            s.set("format", if matches!(f, FormatArg::Csv) { "csv" } else { "json" })?;
        }
        Ok(s)
    }

    fn run_configs(&self) -> Result<Vec<RunConfig>, CliError> {
        let flags = self.overrides()?;
        let files = if self.configs.is_empty() {
            vec![Settings::default()]
        } else {
            self.configs.iter().map(|p| Settings::from_file(p)).collect::<Result<_, _>>()?
        };
        if files.len() > 1 && self.out.is_some() {
            return Err(CliError::Config("--out cannot be shared by a sweep; set `out` in each config file".into()));
        }
        files
            .into_iter()
            .map(|mut s| {
                s.merge(&flags);
                let mut config = RunConfig::from_settings(&s)?;
                if let Some(out) = &self.out {
                    config.out = Some(out.clone());
                }
                Ok(config)
            })
            .collect()
    }
}

#[derive(Clone, Copy)]
enum Kind {
    Simulate,
    Verify,
    Analytic,
}

/// Rendered output of one configuration plus its exit code.
struct Outcome {
    text: String,
    code: u8,
}

fn execute(kind: Kind, config: &RunConfig) -> Result<Outcome, CliError> {
    let (text, code) = match kind {
        Kind::Simulate => {
            let table = commands::simulate(config)?;
            (table.render(config.format.unwrap_or(Format::Csv), &config.metadata("simulate")), 0)
        }
        Kind::Analytic => {
            let table = commands::analytic(config)?;
            (table.render(config.format.unwrap_or(Format::Csv), &config.metadata("analytic")), 0)
        }
        Kind::Verify => {
            let report = verify::verify(config)?;
            for c in report.checks.iter().filter(|c| !c.passed) {
                error!("check {} failed: {:e} against {:e}", c.name, c.value, c.threshold);
            }
            (report.render(config.format.unwrap_or(Format::Json)), if report.passed { 0 } else { 1 })
        }
    };
    if let Some(path) = &config.out {
        fs::write(path, &text).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
        info!("wrote {}", path.display());
        return Ok(Outcome { text: String::new(), code });
    }
    Ok(Outcome { text, code })
}

fn run(kind: Kind, args: &RunArgs) -> Result<u8, CliError> {
    let configs = args.run_configs()?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(args.jobs.max(1))
        .build()
        .map_err(|e| CliError::Config(format!("cannot start {} workers: {e}", args.jobs)))?;
    let results: Vec<Result<Outcome, CliError>> = pool.install(|| configs.par_iter().map(|c| execute(kind, c)).collect());

    let mut code = 0;
    for result in results {
        match result {
            Ok(outcome) => {
                print!("{}", outcome.text);
                code = code.max(outcome.code);
            }
            Err(e) => {
                eprintln!("error: {e}");
                code = code.max(e.exit_code());
            }
        }
    }
    Ok(code)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("FIREBALL_LOG", "warn")).init();
    let cli = Cli::parse();
    let (kind, name, args) = match &cli.command {
        Command::Simulate(a) => (Kind::Simulate, "simulate", a),
        Command::Verify(a) => (Kind::Verify, "verify", a),
        Command::Analytic(a) => (Kind::Analytic, "analytic", a),
    };
    match run(kind, args) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            if matches!(e, CliError::MissingModel) {
                let mut cmd = Cli::command();
                cmd.build();
                if let Some(sub) = cmd.find_subcommand_mut(name) {
                    eprintln!("\n{}", sub.render_usage());
                }
            }
            ExitCode::from(e.exit_code())
        }
    }
}
