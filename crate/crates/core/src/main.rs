use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand};
use serde::Serialize;

use charging_games::atomic::{AtomicGame, EnumerationOptions};
use charging_games::experiments::{emit_data, run_counterexamples, run_sweep, SweepOptions, SweepSpec, BUDGET_ENV};
use charging_games::model::file::{InstanceFile, LoadedInstance};
use charging_games::nonatomic::{
    check_invariance_condition, efficiency_nonatomic, solve_equilibrium, solve_symmetric_invariant, SolverOptions,
};

#[derive(Parser)]
#[command(version, about = "Equilibria and efficiency of EV charging games")]
struct Cli {
    /// Worker threads (defaults to all cores)
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a parameter sweep and write its data files
    Sweep {
        spec: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Check the non-uniqueness counter-examples and constant-load invariance
    Counterexamples {
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Equilibria, optimum and efficiency of an atomic instance
    SolveAtomic {
        instance: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Candidate limit for enumeration
        #[arg(long)]
        budget: Option<u64>,
    },
    /// Equilibrium, optimum and efficiency of a nonatomic instance
    SolveNonatomic {
        instance: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Target Wardrop gap
        #[arg(long, default_value_t = 1e-9)]
        tolerance: f64,
    },
}

fn write_json<T: Serialize>(value: &T, out: Option<&Path>, file: &str) -> Result<()> {
    let json = serde_json::to_string_pretty(value)? + "\n";
    match out {
        Some(dir) => {
            fs::create_dir_all(dir)?;
            let path = dir.join(file);
            fs::write(&path, json).with_context(|| format!("writing {}", path.display()))?;
            println!("wrote {}", path.display());
        }
        None => print!("{json}"),
    }
    Ok(())
}

fn budget(cli: Option<u64>) -> Result<u64> {
    if let Some(b) = cli {
        return Ok(b);
    }
    match std::env::var(BUDGET_ENV) {
        Ok(v) => v.trim().parse().with_context(|| format!("{BUDGET_ENV}={v}")),
        Err(_) => Ok(charging_games::atomic::DEFAULT_BUDGET),
    }
}

fn run(cli: Cli) -> Result<bool> {
    let threads = cli.threads;
    match cli.command {
        Command::Sweep { spec, out } => {
            let spec = SweepSpec::read(&spec).with_context(|| format!("reading {}", spec.display()))?;
            let budget = spec.effective_budget()?;
            let result = run_sweep(&spec, &SweepOptions { threads, budget: Some(budget) })?;
            for path in emit_data(&spec, &result, budget, &out)? {
                println!("wrote {}", path.display());
            }
            for gap in &result.gaps {
                eprintln!("gap: {} at x = {}: {}", gap.series, gap.x, gap.reason);
            }
            Ok(true)
        }
        Command::Counterexamples { out } => {
            let report = run_counterexamples()?;
            write_json(&report, out.as_deref(), "counterexamples.json")?;
            if !report.passed {
                eprintln!("counter-example assertions failed");
            }
            Ok(report.passed)
        }
        Command::SolveAtomic { instance, out, budget: b } => {
            let file = InstanceFile::read(&instance).with_context(|| format!("reading {}", instance.display()))?;
            let LoadedInstance::Atomic { instance, cost, pricing } = file.load()? else {
                anyhow::bail!("{} describes a nonatomic instance", instance.display());
            };
            let mut options = EnumerationOptions::default().with_budget(budget(b)?);
            options.threads = threads;
            let game = AtomicGame::new(instance, cost, pricing);
            let equilibria = game.enumerate_equilibria(&options)?;
            let efficiency = if equilibria.complete {
                Some(game.efficiency(&options)?)
            } else {
                None
            };
            #[derive(Serialize)]
            struct Report {
                equilibria: charging_games::atomic::EquilibriumSet,
                efficiency: Option<charging_games::atomic::EfficiencyReport>,
            }
            write_json(&Report { equilibria, efficiency }, out.as_deref(), "atomic.json")?;
            Ok(true)
        }
        Command::SolveNonatomic { instance, out, tolerance } => {
            let file = InstanceFile::read(&instance).with_context(|| format!("reading {}", instance.display()))?;
            let LoadedInstance::Nonatomic { instance, cost, .. } = file.load()? else {
                anyhow::bail!("{} describes an atomic instance", instance.display());
            };
            let options = SolverOptions::default().with_tolerance(tolerance);
            let equilibrium = solve_equilibrium(&instance, &cost, &options)?;
            let efficiency = if cost.satisfies_a2() {
                Some(efficiency_nonatomic(&instance, &cost, &options)?)
            } else {
                None
            };
            let full_window = instance.is_symmetric()
                && instance.classes()[0].window.arrival == 1
                && instance.classes()[0].window.departure == instance.slots();
            let (invariance, invariant) = if full_window {
                let exo: Vec<f64> = instance.exogenous().iter().map(|l| l / instance.power()).collect();
                let duration = instance.classes()[0].window.duration;
                let check = check_invariance_condition(&exo, duration)?;
                let solution = if check.holds {
                    Some(solve_symmetric_invariant(&exo, duration).map_err(|e| e.to_string()))
                } else {
                    None
                };
                (Some(check), solution)
            } else {
                (None, None)
            };
            #[derive(Serialize)]
            struct Report {
                equilibrium: charging_games::nonatomic::NonatomicEquilibrium,
                efficiency: Option<charging_games::nonatomic::NonatomicEfficiency>,
                invariance: Option<charging_games::nonatomic::InvarianceCheck>,
                linear_system: Option<std::result::Result<charging_games::nonatomic::InvariantEquilibrium, String>>,
            }
            write_json(
                &Report { equilibrium, efficiency, invariance, linear_system: invariant },
                out.as_deref(),
                "nonatomic.json",
            )?;
            Ok(true)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
