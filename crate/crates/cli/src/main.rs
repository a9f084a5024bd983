//! `comshift` — planar simulation and static analysis of a CoM-shifting
//! aerial vehicle pushing on vertical surfaces.

use clap::{Args, Parser, Subcommand};
use comshift_cli::config::{ConfigError, RunConfig, ScenarioName};
use comshift_cli::runner::{sim_task, write_outputs, RunError};
use comshift_cli::{analyze, exit_codes, verify};
use std::path::PathBuf;

#[derive(Parser)]
#[command(
    name = "comshift",
    about = "Planar simulator and static analysis for a CoM-shifting pushing platform",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print the full default configuration file.
    Defaults,
    /// Static-analysis sweeps written as CSV.
    Analyze {
        #[command(subcommand)]
        what: AnalyzeCommand,
    },
    /// Run a closed-loop scenario and write trace + summary.
    Sim(SimArgs),
    /// Recompute analysis tables and scenario summaries and compare them
    /// against a golden directory.
    Verify(VerifyArgs),
}

#[derive(Args)]
struct CommonConfig {
    /// Configuration file (defaults apply when omitted).
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Subcommand)]
enum AnalyzeCommand {
    /// Contact-force budget over the normalized CoM position.
    SweepRl {
        #[command(flatten)]
        common: CommonConfig,
        /// Override the weight used in the force balance, N.
        #[arg(long)]
        g0: Option<f64>,
        /// Override the back-rotor thrust, N.
        #[arg(long)]
        t2: Option<f64>,
        #[arg(long, default_value_t = 0.0)]
        from: f64,
        #[arg(long, default_value_t = 1.0)]
        to: f64,
        #[arg(long, default_value_t = 0.01)]
        step: f64,
        /// Output CSV path (stdout when omitted).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Platform force budget while the arm presses at an offset point.
    ToolLoad {
        #[command(flatten)]
        common: CommonConfig,
        #[arg(long)]
        t2: Option<f64>,
        /// Operation-point offsets, m (comma separated).
        #[arg(long, value_delimiter = ',', default_values_t = [0.1, 0.15])]
        lc: Vec<f64>,
        #[arg(long, default_value_t = 0.0)]
        from: f64,
        #[arg(long, default_value_t = 20.0)]
        to: f64,
        #[arg(long, default_value_t = 0.1)]
        step: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
struct SimArgs {
    /// task1 | task2a | task2b | custom
    #[arg(long)]
    scenario: String,
    #[command(flatten)]
    common: CommonConfig,
    /// Output directory for trace.csv and summary.toml.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct VerifyArgs {
    #[command(flatten)]
    common: CommonConfig,
    /// Golden baseline directory.
    #[arg(long)]
    golden: PathBuf,
    /// Write fresh baselines instead of comparing.
    #[arg(long)]
    update: bool,
}

fn load_config(common: &CommonConfig) -> Result<RunConfig, ConfigError> {
    match &common.config {
        Some(path) => RunConfig::load(path),
        None => Ok(RunConfig::default()),
    }
}

fn write_or_print(out: &Option<PathBuf>, content: &str) -> std::io::Result<()> {
    match out {
        Some(path) => std::fs::write(path, content),
        None => {
            print!("{content}");
            Ok(())
        }
    }
}

fn run() -> i32 {
    let cli = Cli::parse();
    match cli.command {
        Command::Defaults => {
            print!("{}", RunConfig::default().to_toml());
            exit_codes::OK
        }
        Command::Analyze { what } => {
            let result: Result<(), ConfigError> = (|| {
                match what {
                    AnalyzeCommand::SweepRl {
                        common,
                        g0,
                        t2,
                        from,
                        to,
                        step,
                        out,
                    } => {
                        let cfg = load_config(&common)?;
                        let csv = analyze::analyze_sweep_rl(&cfg, g0, t2, from, to, step)?;
                        write_or_print(&out, &csv)
                            .map_err(|e| ConfigError::Invalid(e.to_string()))?;
                    }
                    AnalyzeCommand::ToolLoad {
                        common,
                        t2,
                        lc,
                        from,
                        to,
                        step,
                        out,
                    } => {
                        let cfg = load_config(&common)?;
                        let csv = analyze::analyze_tool_load(&cfg, t2, &lc, from, to, step)?;
                        write_or_print(&out, &csv)
                            .map_err(|e| ConfigError::Invalid(e.to_string()))?;
                    }
                }
                Ok(())
            })();
            match result {
                Ok(()) => exit_codes::OK,
                Err(e) => {
                    eprintln!("error: {e}");
                    exit_codes::CONFIG
                }
            }
        }
        Command::Sim(args) => {
            let outcome = (|| -> Result<(), RunError> {
                let mut cfg = load_config(&args.common)?;
                cfg.run.scenario = ScenarioName::parse(&args.scenario)?;
                let (trace, summary) = sim_task(&cfg)?;
                write_outputs(&args.out, &cfg, &trace, &summary)?;
                print!("{}", summary.render());
                Ok(())
            })();
            match outcome {
                Ok(()) => exit_codes::OK,
                Err(RunError::Divergence(e)) => {
                    eprintln!("error: {e}");
                    exit_codes::DIVERGENCE
                }
                Err(e) => {
                    eprintln!("error: {e}");
                    exit_codes::CONFIG
                }
            }
        }
        Command::Verify(args) => {
            let outcome = (|| -> Result<i32, RunError> {
                let cfg = load_config(&args.common)?;
                if args.update {
                    verify::update_goldens(&cfg, &args.golden)?;
                    println!("baselines written to {}", args.golden.display());
                    return Ok(exit_codes::OK);
                }
                let findings = verify::verify(&cfg, &args.golden)?;
                if findings.is_empty() {
                    println!("verify: all artifacts match the baselines");
                    Ok(exit_codes::OK)
                } else {
                    for f in &findings {
                        println!("verify: {f}");
                    }
                    Ok(exit_codes::VERIFY_MISMATCH)
                }
            })();
            match outcome {
                Ok(code) => code,
                Err(RunError::Divergence(e)) => {
                    eprintln!("error: {e}");
                    exit_codes::DIVERGENCE
                }
                Err(e) => {
                    eprintln!("error: {e}");
                    exit_codes::CONFIG
                }
            }
        }
    }
}

fn main() {
    std::process::exit(run());
}
