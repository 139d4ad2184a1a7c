use std::io;
use std::path::PathBuf;
use std::process::ExitCode;

use bt_flight::cli::{self, CliError};
use bt_flight::sim::Pose;
use clap::{Parser, Subcommand};

/// Evolve, inspect and validate behaviour-tree controllers for the
/// fly-through-window task.
#[derive(Parser)]
#[command(version, about)]
struct Args {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run an evolution; outputs go to the config's output_dir.
    Evolve {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
        /// Cap on parallel episode evaluations (results do not depend on it).
        #[arg(long)]
        threads: Option<usize>,
    },
    /// Fly a tree from seeded random starts and report the success rate.
    Validate {
        #[arg(long)]
        tree: PathBuf,
        #[arg(long, default_value_t = 250)]
        runs: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        config: Option<PathBuf>,
        /// Per-run CSV; defaults to <tree>_validation.csv beside the tree.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Tick a tree once and print the evaluated nodes.
    #[command(allow_negative_numbers = true)]
    Tick {
        #[arg(long)]
        tree: PathBuf,
        #[arg(long)]
        x: f64,
        #[arg(long)]
        sigma: f64,
        #[arg(long = "Sigma")]
        sum_disparity: f64,
        #[arg(long = "Delta")]
        delta: f64,
        /// Rudder value on the blackboard before the tick.
        #[arg(long, default_value_t = 0.0)]
        r: f64,
    },
    /// Remove nodes that cannot affect the tree's behaviour.
    Prune {
        #[arg(long)]
        tree: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Render a path-trace or validation CSV as an SVG top-down view.
    Plot {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Room geometry; defaults to the standard room.
        #[arg(long)]
        config: Option<PathBuf>,
    },
    /// Fly one episode and write its path trace CSV.
    #[command(allow_negative_numbers = true)]
    Fly {
        #[arg(long)]
        tree: PathBuf,
        #[arg(long = "start-x")]
        start_x: f64,
        #[arg(long = "start-y")]
        start_y: f64,
        /// Initial heading, radians from +x.
        #[arg(long)]
        heading: f64,
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
    },
}

fn run(command: Command) -> Result<(), CliError> {
    let mut out = io::stdout();
    match command {
        Command::Evolve { config, seed, threads } => cli::cmd_evolve(&config, seed, threads, &mut out),
        Command::Validate {
            tree,
            runs,
            seed,
            config,
            out: csv,
        } => {
            let csv = csv.unwrap_or_else(|| cli::default_validation_csv(&tree));
            cli::cmd_validate(&tree, runs, seed, config.as_deref(), &csv, &mut out)
        }
        Command::Tick {
            tree,
            x,
            sigma,
            sum_disparity,
            delta,
            r,
        } => cli::cmd_tick(&tree, [x, sigma, sum_disparity, delta], r, &mut out),
        Command::Prune { tree, out: dest } => cli::cmd_prune(&tree, &dest, &mut out),
        Command::Plot { input, out: dest, config } => cli::cmd_plot(&input, &dest, config.as_deref(), &mut out),
        Command::Fly {
            tree,
            start_x,
            start_y,
            heading,
            config,
            out: dest,
        } => {
            let init = Pose {
                x: start_x,
                y: start_y,
                heading,
            };
            cli::cmd_fly(&tree, init, config.as_deref(), &dest, &mut out)
        }
    }
}

fn main() -> ExitCode {
    match run(Args::parse().command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
