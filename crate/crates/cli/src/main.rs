use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use qnoise_cli::config::fmt_f64;
use qnoise_cli::{load_target, output, run, run_scenario, scenarios, CliError};

#[derive(Parser)]
#[command(name = "qnoise", version, about = "Charge-noise qubit decoherence scenarios")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a built-in scenario or a scenario file.
    Run {
        /// Built-in name (fig1..fig6) or path to a TOML file.
        scenario: String,
        /// Output directory [default: out/<name>].
        #[arg(long)]
        out: Option<PathBuf>,
        /// Override a parameter, e.g. --set ensemble.n_traj=20.
        #[arg(long = "set", value_name = "KEY=VALUE")]
        overrides: Vec<String>,
        /// Also write SVG plots.
        #[arg(long)]
        plot: bool,
    },
    /// List the built-in scenarios.
    ListScenarios,
    /// Bisect the qubit coupling delta so the fitted T2* hits a target.
    Calibrate {
        scenario: String,
        #[arg(long, default_value_t = 3.0)]
        target: f64,
        #[arg(long = "set", value_name = "KEY=VALUE")]
        overrides: Vec<String>,
    },
    /// Print the version.
    Version,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("qnoise: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn dispatch(cmd: Command) -> Result<(), CliError> {
    match cmd {
        Command::Run {
            scenario,
            out,
            overrides,
            plot,
        } => {
            let out = match out {
                Some(o) => o,
                None => {
                    let cfg = load_target(&scenario, &overrides)?;
                    PathBuf::from("out").join(&cfg.resolved.name)
                }
            };
            let files = run_scenario(&scenario, &out, &overrides, plot)?;
            for f in files {
                println!("{}", f.display());
            }
        }
        Command::ListScenarios => {
            for (name, src) in scenarios::BUILTIN {
                let cfg = qnoise_cli::load(name, src, &[])?;
                let desc = cfg.resolved.description.unwrap_or_default();
                println!("{name:<6} {:<9} {desc}", cfg.resolved.model.name());
            }
        }
        Command::Calibrate {
            scenario,
            target,
            overrides,
        } => {
            let cfg = load_target(&scenario, &overrides)?;
            for v in &cfg.variants {
                let delta = run::calibrate(&v.scenario, target)?;
                match &v.label {
                    Some(l) => println!("{l}: delta = {}", fmt_f64(delta)),
                    None => println!("delta = {}", fmt_f64(delta)),
                }
            }
        }
        Command::Version => println!("{}", output::version()),
    }
    Ok(())
}
