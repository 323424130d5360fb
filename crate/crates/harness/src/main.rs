use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Result;
use clap::{Parser, Subcommand};

use pltl_teach::learner::{AdversarialTies, PreferenceModel};
use pltl_teach::teacher::{tlip_teach, Objective, TeachSetup, TeacherConfig};
use teach_harness::check::{self, worked_example, WORKED_MAX_LEN};
use teach_harness::emit::{emit, Format};
use teach_harness::{run_experiment, run_suite, ExperimentConfig, Suite, SuiteOptions};

#[derive(Parser)]
#[command(
    name = "teach",
    version,
    about = "Teaching temporal logic formulas by demonstration"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the configured experiment or a named suite.
    Run {
        #[arg(long)]
        config: PathBuf,
        /// global_uniform, positive_only, adaptive_vs_nonadaptive,
        /// oracle_vs_plain or timing.
        #[arg(long)]
        suite: Option<Suite>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "csv")]
        format: Format,
        /// Write the first step's integer program of every session here.
        #[arg(long)]
        export_lp: Option<PathBuf>,
        /// CI mode: 60 s timing budget.
        #[arg(long)]
        short: bool,
    },
    /// Run the verification battery.
    Check {
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Replay the card-suit example and print the transcript.
    Demo {
        #[arg(long, value_parser = parse_objective, default_value = "AN")]
        objective: Objective,
    },
}

fn parse_objective(s: &str) -> Result<Objective, String> {
    match s.to_ascii_uppercase().as_str() {
        "AN" => Ok(Objective::AN),
        "AL" => Ok(Objective::AL),
        _ => Err(format!("unknown objective `{s}`; expected AN or AL")),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Run {
            config,
            suite,
            seed,
            out,
            format,
            export_lp,
            short,
        } => {
            let mut cfg = ExperimentConfig::load(&config)?;
            if let Some(seed) = seed {
                cfg.seed = seed;
            }
            let out = out.unwrap_or_else(|| cfg.out.clone());
            let report = match suite {
                Some(s) => run_suite(s, &cfg, &SuiteOptions { short, export_lp })?,
                None => run_experiment(&cfg)?,
            };
            for g in &report.aggregates {
                log::info!(
                    "{} a={} {}: {}/{} completed, mean AN {:?}, mean AL {:?}",
                    g.suite,
                    g.a,
                    g.method,
                    g.completed,
                    g.sessions,
                    g.mean_an,
                    g.mean_al
                );
            }
            let path = emit(&report, format, &out)?;
            println!("{}", path.display());
            Ok(ExitCode::SUCCESS)
        }
        Command::Check { seed } => {
            let outcomes = check::run_all(seed);
            for o in &outcomes {
                println!("{o}");
            }
            Ok(if outcomes.iter().all(|o| o.passed) {
                ExitCode::SUCCESS
            } else {
                ExitCode::FAILURE
            })
        }
        Command::Demo { objective } => {
            let (hyps, domain) = worked_example();
            let cfg = TeacherConfig::new(objective, WORKED_MAX_LEN);
            let setup = TeachSetup {
                hyps: &hyps,
                domain: &domain,
                pref: &PreferenceModel::Uniform,
                cfg: &cfg,
                oracle: None,
            };
            let t = tlip_teach(&setup, 0, &mut AdversarialTies)?;
            println!("target {}", hyps.target_formula());
            println!("initial {}", hyps.formula(0));
            for (demo, step) in t.demos.iter().zip(&t.steps) {
                println!(
                    "{demo}  eliminates {} (kappa {}), learner -> {}",
                    step.eliminated,
                    step.kappa,
                    hyps.formula(step.hypothesis)
                );
            }
            println!("AN {} AL {}", t.an_cost, t.al_cost);
            Ok(ExitCode::SUCCESS)
        }
    }
}
