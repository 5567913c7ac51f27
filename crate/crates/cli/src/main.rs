//! `ergolab`: reproducible numerical experiments on weighted ergodic
//! averages, uniformity norms and multiplicative functions.

mod commands;
mod config;
mod error;
mod output;
mod parse;

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::de::DeserializeOwned;
use serde::Serialize;
use serde_json::{json, Map, Value};

use commands::*;
use config::{merge, ConfigFile, Runtime};
use error::{CliError, Result};
use output::{sidecar, write_json, Outcome, Paths};

#[derive(Debug, Parser)]
#[command(name = "ergolab", version, about = "Numerical experiments in ergodic averages and uniformity")]
struct Cli {
    /// TOML experiment file; flags override its `[params]`.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output prefix; writes `<out>.csv` and `<out>.json`.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Seed for the ChaCha8 generator behind random inputs.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads; results do not depend on this.
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Largest averaging window.
    #[arg(long, global = true)]
    max_points: Option<u64>,
    /// Cap on elementary evaluations.
    #[arg(long, global = true)]
    max_work: Option<u64>,
    /// Largest dense sample buffer, in points.
    #[arg(long, global = true)]
    max_memory: Option<u64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Gowers norms of functions on `Z_N^d`.
    Gowers(GowersArgs),
    /// Weighted multiple ergodic averages on a torus.
    Average(AverageArgs),
    /// Multiple correlation sequences.
    Correlate(CorrelateArgs),
    /// Structured plus uniform decomposition of a sequence.
    Decompose(DecomposeArgs),
    /// Multiplicative-function experiments.
    Arith(ArithArgs),
    /// Hardy-field weights.
    Hardy(HardyArgs),
    /// Uniformity and Host–Kra seminorms.
    Seminorm(SeminormArgs),
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Gowers(_) => "gowers",
            Command::Average(_) => "average",
            Command::Correlate(_) => "correlate",
            Command::Decompose(_) => "decompose",
            Command::Arith(_) => "arith",
            Command::Hardy(_) => "hardy",
            Command::Seminorm(_) => "seminorm",
        }
    }
}

struct Setup {
    runtime: Runtime,
    params: toml::Table,
}

fn setup(cli: &Cli) -> Result<Setup> {
    let file = match &cli.config {
        Some(p) => ConfigFile::load(p)?,
        None => ConfigFile::default(),
    };
    let name = cli.command.name();
    if let Some(exp) = &file.experiment {
        if exp != name {
            return Err(CliError::Config(format!("file is for '{exp}', not '{name}'")));
        }
    }
    let mut limits = file.limits.clone().unwrap_or_default();
    if let Some(v) = cli.max_points {
        limits.max_window_points = v;
    }
    if let Some(v) = cli.max_work {
        limits.max_work = v;
        limits.gowers_budget = v;
        limits.max_shift_tuples = limits.max_shift_tuples.min(v);
    }
    if let Some(v) = cli.max_memory {
        limits.max_sample_points = v;
    }
    let runtime = Runtime {
        seed: cli.seed.or(file.seed).unwrap_or(0),
        out: cli.out.clone().or(file.out.clone()).unwrap_or_else(|| PathBuf::from(name)),
        threads: cli.threads.or(file.threads),
        limits,
    };
    if runtime.threads == Some(0) {
        return Err(CliError::invalid("--threads must be positive"));
    }
    if let Some(n) = runtime.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Config(e.to_string()))?;
    }
    Ok(Setup { runtime, params: file.params })
}

fn run<T, F>(setup: &Setup, cli_args: &T, f: F) -> Result<(Outcome, Value)>
where
    T: Serialize + DeserializeOwned,
    F: FnOnce(&T, &Runtime, &mut ChaCha8Rng) -> Result<Outcome>,
{
    let (params, echo) = merge(&setup.params, cli_args)?;
    let mut rng = ChaCha8Rng::seed_from_u64(setup.runtime.seed);
    let outcome = f(&params, &setup.runtime, &mut rng)?;
    Ok((outcome, echo))
}

fn execute(cli: &Cli, setup: &Setup) -> Result<(Outcome, Value)> {
    match &cli.command {
        Command::Gowers(a) => run(setup, a, gowers),
        Command::Average(a) => run(setup, a, average),
        Command::Correlate(a) => run(setup, a, |p, rt, _| correlate(p, rt)),
        Command::Decompose(a) => run(setup, a, decompose),
        Command::Arith(a) => run(setup, a, arith),
        Command::Hardy(a) => run(setup, a, |p, rt, _| hardy(p, rt)),
        Command::Seminorm(a) => run(setup, a, seminorm),
    }
}

fn runtime_echo(rt: &Runtime) -> Map<String, Value> {
    match serde_json::to_value(rt).expect("runtime serializes") {
        Value::Object(m) => m,
        _ => Map::new(),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let start = Instant::now();
    let setup = match setup(&cli) {
        Ok(s) => s,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(e.exit_code() as u8);
        }
    };
    let paths = Paths::from_prefix(&setup.runtime.out);
    let result = execute(&cli, &setup).and_then(|(outcome, echo)| {
        paths.ensure_parent()?;
        outcome.table.write_csv(&paths.csv)?;
        let meta = sidecar(
            cli.command.name(),
            &echo,
            &runtime_echo(&setup.runtime),
            &outcome,
            start.elapsed().as_secs_f64(),
        );
        write_json(&paths.json, &meta)
    });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            let code = e.exit_code();
            if code == 4 {
                let details = match &e {
                    CliError::WithDetails { details, .. } => details.clone(),
                    _ => Value::Null,
                };
                let diag = json!({
                    "tool": "ergolab",
                    "version": env!("CARGO_PKG_VERSION"),
                    "command": cli.command.name(),
                    "status": "numerical_error",
                    "error": e.to_string(),
                    "runtime": runtime_echo(&setup.runtime),
                    "details": details,
                });
                let _ = paths.ensure_parent().and_then(|_| write_json(&paths.json, &diag));
            }
            ExitCode::from(code as u8)
        }
    }
}
