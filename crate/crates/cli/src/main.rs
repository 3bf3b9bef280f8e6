use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use spdc_g2_cli::{run_file, selftest, CliError, Overrides, RunOptions};

#[derive(Parser)]
#[command(name = "spdc-g2", version, about = "Second-order coherence of down-converted light")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario and write its CSV and JSON outputs.
    Run(RunArgs),
    /// Like `run`, but the scenario must declare a sweep.
    Sweep(RunArgs),
    /// Run the built-in acceptance suite.
    Selftest {
        /// Only criteria whose id matches or whose name contains this.
        #[arg(long)]
        filter: Option<String>,
    },
}

#[derive(Args)]
struct RunArgs {
    #[arg(long)]
    scenario: PathBuf,
    #[arg(long)]
    out: PathBuf,
    /// Replace grid.n_points.
    #[arg(long)]
    grid_points: Option<usize>,
    /// Replace grid.delta_omega (rad/ps).
    #[arg(long)]
    grid_domega: Option<f64>,
    /// Sweep worker threads (0 = all cores).
    #[arg(long, default_value_t = 0)]
    workers: usize,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Run(args) => execute(args, false),
        Command::Sweep(args) => execute(args, true),
        Command::Selftest { filter } => {
            let selected = selftest::select(filter.as_deref());
            if selected.is_empty() {
                eprintln!("error: no criterion matches the filter");
                return ExitCode::from(1);
            }
            if selftest::run_suite(&selected, |line| println!("{line}")) {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
    }
}

fn execute(args: RunArgs, require_sweep: bool) -> ExitCode {
    let overrides = Overrides {
        grid_points: args.grid_points,
        grid_domega: args.grid_domega,
    };
    let options = RunOptions { workers: args.workers };
    let result = if require_sweep {
        std::fs::read_to_string(&args.scenario)
            .map_err(|e| CliError::io(&args.scenario, e))
            .and_then(|text| spdc_g2_cli::parse_scenario_with(&text, overrides))
            .and_then(|s| {
                if s.sweep.is_none() {
                    return Err(CliError::Scenario {
                        location: None,
                        message: "the sweep command needs a scenario with a `sweep` section".into(),
                        source: None,
                    });
                }
                spdc_g2_cli::run(&s, &args.out, options)
            })
    } else {
        run_file(&args.scenario, &args.out, overrides, options)
    };
    match result {
        Ok(report) => {
            for file in &report.files {
                println!("{}", args.out.join(file).display());
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {}: {e}", args.scenario.display());
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
