//! Thin command-line shell: parses arguments, loads the network description,
//! dispatches to [`netfdi::cli`], and prints the verdict document as JSON.
//!
//! Exit codes: 0 success, 2 input or analysis error, 3 structural/Monte-Carlo
//! disagreement, 4 infeasible placement.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use netfdi::cli::{
    self, AnalysisOptions, PlacementMode, SimulateOptions,
};
use netfdi::desc::NetworkDescription;

#[derive(Parser)]
#[command(
    name = "netfdi",
    about = "Detectability, isolability, and sensor placement for topology failures in networked linear systems"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Detect,
    Isolate,
}

#[derive(Subcommand)]
enum Command {
    /// Transfer index of the subsystem dynamics
    Rmax {
        /// Network description (JSON)
        file: PathBuf,
    },
    /// Generic detectability of one named failure
    Detect {
        file: PathBuf,
        /// Name of the failure scenario to test
        #[arg(long)]
        failure: String,
        #[command(flatten)]
        analysis: AnalysisArgs,
    },
    /// Generic isolability of a failure set
    Isolate {
        file: PathBuf,
        /// Scenario names (defaults to the file's failure_set)
        #[arg(long = "set", value_delimiter = ',')]
        set: Vec<String>,
        #[command(flatten)]
        analysis: AnalysisArgs,
    },
    /// Minimum sensor placement (greedy + exact oracle)
    Place {
        file: PathBuf,
        /// detect: cover all single-link failures; isolate: cover the failure set
        #[arg(long, value_enum)]
        mode: Mode,
        #[arg(long = "set", value_delimiter = ',')]
        set: Vec<String>,
        /// Largest ground set the exhaustive solver will accept
        #[arg(long, default_value_t = 16)]
        exact_limit: usize,
        /// Override the file's sensor list
        #[arg(long, value_delimiter = ',')]
        sensors: Vec<usize>,
    },
    /// Trajectories, residuals, and optional noise/threshold detection times
    Simulate {
        file: PathBuf,
        /// Failure scenarios to simulate alongside the nominal system
        #[arg(long = "failures", value_delimiter = ',')]
        failures: Vec<String>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Per-channel measurement noise standard deviation
        #[arg(long)]
        noise_std: Option<f64>,
        /// Detection threshold on the output-deviation 2-norm
        #[arg(long)]
        threshold: Option<f64>,
        #[arg(long, default_value_t = 10.0)]
        horizon: f64,
        #[arg(long, default_value_t = 1000)]
        steps: usize,
        /// CSV output path (a .meta.json companion is written next to it)
        #[arg(long, default_value = "trajectories.csv")]
        out: PathBuf,
        #[arg(long, value_delimiter = ',')]
        sensors: Vec<usize>,
    },
}

#[derive(clap::Args)]
struct AnalysisArgs {
    /// Weight realizations sampled for the Monte-Carlo verdict
    #[arg(long, default_value_t = 5)]
    trials: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Relative tolerance separating structural zeros from generic nonzeros
    #[arg(long, default_value_t = 1e-9)]
    tol: f64,
    /// Override the file's sensor list
    #[arg(long, value_delimiter = ',')]
    sensors: Vec<usize>,
}

impl AnalysisArgs {
    fn options(&self) -> AnalysisOptions {
        AnalysisOptions {
            trials: self.trials,
            seed: self.seed,
            tol: self.tol,
        }
    }
}

fn print_doc(doc: &impl Serialize) {
    println!(
        "{}",
        serde_json::to_string_pretty(doc).expect("verdict document serializes")
    );
}

fn run(command: Command) -> netfdi::Result<ExitCode> {
    let agreement = match command {
        Command::Rmax { file } => {
            let desc = NetworkDescription::from_path(&file)?;
            let doc = cli::cmd_rmax(&desc)?;
            print_doc(&doc);
            if doc.r_max.degenerate_output {
                eprintln!("warning: C = 0; no output ever reflects a failure");
            }
            true
        }
        Command::Detect {
            file,
            failure,
            analysis,
        } => {
            let desc = NetworkDescription::from_path(&file)?;
            let desc = cli::with_sensor_override(&desc, &analysis.sensors);
            let doc = cli::cmd_detect(&desc, &failure, analysis.options())?;
            print_doc(&doc);
            doc.agreement
        }
        Command::Isolate {
            file,
            set,
            analysis,
        } => {
            let desc = NetworkDescription::from_path(&file)?;
            let desc = cli::with_sensor_override(&desc, &analysis.sensors);
            let doc = cli::cmd_isolate(&desc, &set, analysis.options())?;
            print_doc(&doc);
            doc.agreement
        }
        Command::Place {
            file,
            mode,
            set,
            exact_limit,
            sensors,
        } => {
            let desc = NetworkDescription::from_path(&file)?;
            let desc = cli::with_sensor_override(&desc, &sensors);
            let mode = match mode {
                Mode::Detect => PlacementMode::Detect,
                Mode::Isolate => PlacementMode::Isolate,
            };
            let doc = cli::cmd_place(&desc, mode, &set, exact_limit)?;
            print_doc(&doc);
            true
        }
        Command::Simulate {
            file,
            failures,
            seed,
            noise_std,
            threshold,
            horizon,
            steps,
            out,
            sensors,
        } => {
            let desc = NetworkDescription::from_path(&file)?;
            let desc = cli::with_sensor_override(&desc, &sensors);
            let options = SimulateOptions {
                seed,
                horizon,
                steps,
                noise_std,
                threshold,
            };
            let doc = cli::cmd_simulate(&desc, &failures, options, &out)?;
            print_doc(&doc);
            true
        }
    };
    Ok(if agreement {
        ExitCode::SUCCESS
    } else {
        eprintln!("warning: structural and Monte-Carlo verdicts disagree");
        ExitCode::from(3)
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(cli::exit_code(&err) as u8)
        }
    }
}
