use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use congest_core::continuation::{run_continuation, ContinuationPlan, DeltaRule};
use congest_core::error::{Error, Result};
use congest_core::run::{output_dir, run_to_dir};
use congest_core::scenario::{parse_scenario, preset, serialize_scenario, ScenarioSpec, PRESET_NAMES};
use congest_core::validate::validate_problem_data;

/// Congested two-phase flow simulator.
#[derive(Parser)]
#[command(name = "congest", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check every data hypothesis of a scenario.
    Validate {
        /// Config file or preset name.
        scenario: String,
    },
    /// Run a scenario and write snapshots and diagnostics.
    Run {
        scenario: String,
        /// Output directory (default: $CONGEST_OUTPUT_ROOT/<name>).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run a scenario for a decreasing sequence of epsilon values.
    Continuation {
        scenario: String,
        /// Comma-separated, strictly decreasing.
        #[arg(long, value_delimiter = ',', required = true)]
        epsilons: Vec<f64>,
        /// `eps` (delta = epsilon), `scale:<c>` (delta = c epsilon) or
        /// `fixed:<delta>`.
        #[arg(long, default_value = "eps")]
        delta_rule: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// List the built-in scenarios.
    ListPresets,
    /// Print a scenario in config syntax.
    PrintConfig { scenario: String },
}

fn load(arg: &str) -> Result<ScenarioSpec> {
    let path = Path::new(arg);
    if path.is_file() {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        return parse_scenario(&text);
    }
    if PRESET_NAMES.contains(&arg) {
        return preset(arg);
    }
    Err(Error::InvalidParams(format!(
        "'{arg}' is neither a config file nor a preset ({})",
        PRESET_NAMES.join(", ")
    )))
}

fn delta_rule(s: &str) -> Result<DeltaRule> {
    let bad = || Error::InvalidParams(format!("unknown delta rule '{s}'"));
    match s.split_once(':') {
        None if s == "eps" => Ok(DeltaRule::Proportional(1.0)),
        Some(("scale", c)) => c.parse().map(DeltaRule::Proportional).map_err(|_| bad()),
        Some(("fixed", d)) => d.parse().map(DeltaRule::Fixed).map_err(|_| bad()),
        _ => Err(bad()),
    }
}

fn execute(cmd: Command) -> Result<()> {
    match cmd {
        Command::Validate { scenario } => {
            let spec = load(&scenario)?;
            let report = validate_problem_data(&spec);
            println!("{report}");
            report.into_result().map(|_| ())
        }
        Command::Run { scenario, out } => {
            let spec = load(&scenario)?;
            let dir = out.unwrap_or_else(|| output_dir(&spec));
            let outcome = run_to_dir(&spec, &dir)?;
            let s = outcome.summary;
            if outcome.report.no_guarantee() {
                eprintln!("warning: scenario is outside the stiff-limit hypotheses (no guarantee)");
            }
            println!(
                "{}: {} steps to t = {}, max Z = {:.6}, energy residual+ = {:.3e}, output in {}",
                spec.output.name,
                s.steps,
                outcome.final_state.t,
                s.max_z,
                s.energy_residual_positive,
                dir.display()
            );
            Ok(())
        }
        Command::Continuation {
            scenario,
            epsilons,
            delta_rule: rule,
            out,
        } => {
            let spec = load(&scenario)?;
            let dir = out.unwrap_or_else(|| {
                let mut s = spec.clone();
                s.output.dir = None;
                s.output.name = format!("{}-continuation", spec.output.name);
                output_dir(&s)
            });
            let plan = ContinuationPlan {
                delta_rule: delta_rule(&rule)?,
                ..ContinuationPlan::new(spec, epsilons)
            };
            let report = run_continuation(&plan, Some(&dir))?;
            if report.no_guarantee() {
                eprintln!("warning: limit claims are outside theorem hypotheses (no guarantee)");
            }
            for m in &report.members {
                println!(
                    "eps = {:e}: int pi(1-Z) dt = {:.6e}, max Z = {:.6}",
                    m.epsilon, m.summary.pi_one_minus_z_time, m.summary.max_z
                );
            }
            println!("report in {}", dir.display());
            Ok(())
        }
        Command::ListPresets => {
            for name in PRESET_NAMES {
                println!("{name}");
            }
            Ok(())
        }
        Command::PrintConfig { scenario } => {
            print!("{}", serialize_scenario(&load(&scenario)?));
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            if let Error::Hypothesis { hypothesis, .. } = &e {
                eprintln!("violated hypothesis: {hypothesis}");
            }
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
