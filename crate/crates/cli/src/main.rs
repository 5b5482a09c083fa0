use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use mfspin::checks::{self, CheckOptions, Suite};
use mfspin::config::{self, RunConfig};
use mfspin::sweep::{self, RunError};
use mfspin_core::{FockPolicy, LorentzianBath, Topology};

#[derive(Parser)]
#[command(
    name = "mfspin",
    version,
    about = "Mean-force equilibrium states of a spin coupled to bosonic baths"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a temperature sweep from a JSON config or a named preset.
    Run {
        #[arg(long, conflicts_with = "preset", required_unless_present = "preset")]
        config: Option<PathBuf>,
        /// One of fig2a, fig2b, fig3, fig4.
        #[arg(long)]
        preset: Option<String>,
        /// Output path without extension; overrides the config.
        #[arg(long)]
        output: Option<String>,
    },
    /// Fock-converged entropy and |s| at one temperature, as JSON.
    Entropy {
        #[arg(long, default_value = "three_bath")]
        topology: Topology,
        #[arg(long)]
        alpha: f64,
        #[arg(long, default_value_t = 2.0)]
        omega0: f64,
        #[arg(long, default_value_t = 0.6)]
        gamma: f64,
        #[arg(long, default_value_t = 0.0)]
        t: f64,
        #[arg(long)]
        tol: Option<f64>,
        #[arg(long)]
        n_start: Option<usize>,
        #[arg(long)]
        n_cap: Option<usize>,
    },
    /// Run a self-check suite; exits 1 if any check fails.
    Check {
        #[arg(long, default_value = "invariants")]
        suite: Suite,
        /// Scale the principal-value pole half-width (negative control).
        #[arg(long, default_value_t = 1.0)]
        tamper_delta: f64,
    },
    /// Print a preset configuration as JSON.
    Preset { name: String },
}

fn run_command(
    config: Option<PathBuf>,
    preset: Option<String>,
    output: Option<String>,
) -> ExitCode {
    let loaded = match (config, preset) {
        (Some(path), _) => RunConfig::from_file(&path),
        (None, Some(name)) => config::preset(&name).ok_or_else(|| {
            config::ConfigError(format!(
                "unknown preset '{name}'; known: {:?}",
                config::PRESET_NAMES
            ))
        }),
        (None, None) => unreachable!("clap requires one of --config / --preset"),
    };
    let mut cfg = match loaded {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    if let Some(o) = output {
        cfg.output = o;
    }
    match sweep::run(&cfg, sweep::threads_from_env()) {
        Ok((path, out)) => {
            eprintln!("wrote {} rows to {}", out.rows.len(), path.display());
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(RunError::exit_code(&e) as u8)
        }
    }
}

#[allow(clippy::too_many_arguments)]
fn entropy_command(
    topology: Topology,
    alpha: f64,
    omega0: f64,
    gamma: f64,
    t: f64,
    tol: Option<f64>,
    n_start: Option<usize>,
    n_cap: Option<usize>,
) -> ExitCode {
    let defaults = FockPolicy::for_topology(topology);
    let policy = FockPolicy {
        tol: tol.unwrap_or(defaults.tol),
        n_start: n_start.unwrap_or(defaults.n_start),
        n_cap: n_cap.unwrap_or(defaults.n_cap),
    };
    let bath = match LorentzianBath::new(omega0, gamma, alpha, 1e10) {
        Ok(b) => b,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    match mfspin::entropy_report(topology, bath, t, &policy) {
        Ok(v) => {
            println!("{v}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_validation() { 2 } else { 3 })
        }
    }
}

fn check_command(suite: Suite, tamper_delta: f64) -> ExitCode {
    if !(tamper_delta > 0.0 && tamper_delta.is_finite()) {
        eprintln!("error: --tamper-delta must be positive");
        return ExitCode::from(2);
    }
    let opts = CheckOptions {
        tamper_delta,
        ..CheckOptions::default()
    };
    let results = checks::run_suite(suite, &opts);
    print!("{}", checks::render_table(&results));
    println!("{}", checks::summary_json(suite, &results));
    if results.iter().all(|r| r.pass) {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match cli.command {
        Command::Run {
            config,
            preset,
            output,
        } => run_command(config, preset, output),
        Command::Entropy {
            topology,
            alpha,
            omega0,
            gamma,
            t,
            tol,
            n_start,
            n_cap,
        } => entropy_command(topology, alpha, omega0, gamma, t, tol, n_start, n_cap),
        Command::Check {
            suite,
            tamper_delta,
        } => check_command(suite, tamper_delta),
        Command::Preset { name } => match config::preset(&name) {
            Some(c) => {
                println!("{}", c.resolved().to_json_pretty());
                ExitCode::SUCCESS
            }
            None => {
                eprintln!(
                    "error: unknown preset '{name}'; known: {:?}",
                    config::PRESET_NAMES
                );
                ExitCode::from(2)
            }
        },
    }
}
