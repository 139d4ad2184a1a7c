//! Subcommand implementations behind the `bt-flight` binary.
//!
//! Each command writes its human-readable report to `out` and returns a
//! [`CliError`] whose [`exit_code`](CliError::exit_code) is 1 for runtime
//! failures and 2 for usage or configuration problems.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use thiserror::Error;

use crate::bt::{check_limits, parse, prune, serialize, BehaviourTree, Blackboard, NodeKind};
use crate::config::RunConfig;
use crate::evaluation::{validate, write_validation_csv};
use crate::evolution::{run_evolution, ArchiveWriter, CheckpointWriter, EAParams, SimEvaluator};
use crate::plot::plot_csv;
use crate::sim::{run_episode, write_trace_csv, Pose, RoomConfig, World};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Runtime(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Runtime(_) => 1,
        }
    }
}

fn usage(msg: impl std::fmt::Display) -> CliError {
    CliError::Usage(msg.to_string())
}

fn runtime(msg: impl std::fmt::Display) -> CliError {
    CliError::Runtime(msg.to_string())
}

fn io_err(path: &Path) -> impl Fn(std::io::Error) -> CliError + '_ {
    move |e| runtime(format!("{}: {e}", path.display()))
}

/// Reads and parses a `.bt` file; missing files and parse errors are usage errors.
pub fn load_tree(path: &Path) -> Result<BehaviourTree, CliError> {
    let text = fs::read_to_string(path).map_err(|e| usage(format!("{}: {e}", path.display())))?;
    parse(&text).map_err(|e| usage(format!("{}: {e}", path.display())))
}

fn load_world(config: Option<&Path>) -> Result<World, CliError> {
    match config {
        Some(path) => Ok(RunConfig::load(path).map_err(usage)?.world()),
        None => Ok(World::default()),
    }
}

fn thread_pool(threads: Option<usize>) -> Result<rayon::ThreadPool, CliError> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = threads {
        if n == 0 {
            return Err(usage("--threads must be at least 1"));
        }
        builder = builder.num_threads(n);
    }
    builder.build().map_err(runtime)
}

/// Runs an evolution and writes `archive.csv`, `checkpoints/gen_NNNN.jsonl`,
/// `best.bt` and `best_pruned.bt` into the configured output directory.
pub fn cmd_evolve<W: Write + Send>(
    config: &Path,
    seed: Option<u64>,
    threads: Option<usize>,
    out: &mut W,
) -> Result<(), CliError> {
    let mut cfg = RunConfig::load(config).map_err(usage)?;
    if let Some(s) = seed {
        cfg.ea.seed = s;
    }
    let dir = &cfg.output_dir;
    fs::create_dir_all(dir).map_err(io_err(dir))?;
    let archive_path = dir.join("archive.csv");
    let mut archive = ArchiveWriter::create(&archive_path).map_err(io_err(&archive_path))?;
    let checkpoints = CheckpointWriter::new(dir.join("checkpoints")).map_err(io_err(dir))?;
    let evaluator = SimEvaluator { world: cfg.world() };
    let params: &EAParams = &cfg.ea;
    let pool = thread_pool(threads)?;
    let result = pool
        .install(|| {
            run_evolution(params, &evaluator, |generation, s| {
                archive.append(s)?;
                checkpoints.write(generation)?;
                writeln!(
                    out,
                    "gen {:4}  best_f {:.6}  mean_f {:.6}  best_size {:5}  mean_size {:8.2}",
                    s.generation, s.best_fitness, s.mean_fitness, s.best_size, s.mean_size
                )
            })
        })
        .map_err(runtime)?;
    let pruned = prune(&result.best.tree);
    let best_path = dir.join("best.bt");
    let pruned_path = dir.join("best_pruned.bt");
    fs::write(&best_path, serialize(&result.best.tree)).map_err(io_err(&best_path))?;
    fs::write(&pruned_path, serialize(&pruned)).map_err(io_err(&pruned_path))?;
    writeln!(
        out,
        "best: generation {}  fitness {:.6}  size {} (pruned {})\nwrote {}",
        result.best_generation,
        result.best.fitness,
        result.best.size,
        pruned.size(),
        dir.display()
    )
    .map_err(runtime)?;
    Ok(())
}

/// Flies `tree` from `runs` seeded starts; writes the per-run CSV to
/// `csv_out` and a summary to `out`.
pub fn cmd_validate<W: Write>(
    tree: &Path,
    runs: usize,
    seed: u64,
    config: Option<&Path>,
    csv_out: &Path,
    out: &mut W,
) -> Result<(), CliError> {
    if runs == 0 {
        return Err(usage("--runs must be at least 1"));
    }
    let world = load_world(config)?;
    let bt = load_tree(tree)?;
    let limits = EAParams::default();
    for w in check_limits(&bt, limits.max_depth, limits.max_children) {
        eprintln!("warning: {}: {w}", tree.display());
    }
    let report = validate(&bt, runs, seed, &world);
    let file = fs::File::create(csv_out).map_err(io_err(csv_out))?;
    write_validation_csv(file, &report).map_err(runtime)?;
    write!(out, "{}", report.summary(bt.size())).map_err(runtime)?;
    writeln!(out, "wrote {}", csv_out.display()).map_err(runtime)?;
    Ok(())
}

fn node_label(kind: &NodeKind) -> String {
    match kind {
        NodeKind::Selector => "sel".into(),
        NodeKind::Sequence => "seq".into(),
        NodeKind::Condition {
            variable,
            comparison,
            threshold,
        } => format!("cond {variable} {} {threshold}", comparison.symbol()),
        NodeKind::Action { rudder } => format!("act r {rudder}"),
    }
}

/// Ticks `tree` once on the given inputs and prints the status, the final
/// rudder and every evaluated node in visiting order.
pub fn cmd_tick<W: Write>(tree: &Path, inputs: [f64; 4], rudder: f64, out: &mut W) -> Result<(), CliError> {
    let bt = load_tree(tree)?;
    let [x, sigma, sum, delta] = inputs;
    let bb = Blackboard::new(x, sigma, sum, delta)
        .and_then(|bb| bb.with_rudder(rudder))
        .map_err(usage)?;
    let trace = bt.tick_traced(bb);
    let depths = bt.node_depths();
    let mut text = format!("status: {}\nr: {}\n", trace.status, trace.blackboard.rudder);
    match trace.last_action {
        Some(i) => text.push_str(&format!("r set by node {i}\n")),
        None => text.push_str("r held\n"),
    }
    text.push_str("evaluated:\n");
    for (i, status) in &trace.evaluated {
        let indent = "  ".repeat(depths[*i]);
        text.push_str(&format!("{i:5}  {indent}{:<28} {status}\n", node_label(&bt.node(*i).kind)));
    }
    out.write_all(text.as_bytes()).map_err(runtime)
}

/// Writes the pruned form of `tree` to `dest`.
pub fn cmd_prune<W: Write>(tree: &Path, dest: &Path, out: &mut W) -> Result<(), CliError> {
    let bt = load_tree(tree)?;
    let pruned = prune(&bt);
    fs::write(dest, serialize(&pruned)).map_err(io_err(dest))?;
    writeln!(out, "size {} -> {}\nwrote {}", bt.size(), pruned.size(), dest.display()).map_err(runtime)
}

/// Renders a path-trace or validation CSV as an SVG top-down view.
pub fn cmd_plot<W: Write>(input: &Path, dest: &Path, config: Option<&Path>, out: &mut W) -> Result<(), CliError> {
    let room = match config {
        Some(p) => RunConfig::load(p).map_err(usage)?.room,
        None => RoomConfig::default(),
    };
    let text = fs::read_to_string(input).map_err(|e| usage(format!("{}: {e}", input.display())))?;
    let svg = plot_csv(&text, &room).map_err(|e| usage(format!("{}: {e}", input.display())))?;
    fs::write(dest, svg).map_err(io_err(dest))?;
    writeln!(out, "wrote {}", dest.display()).map_err(runtime)
}

/// Flies `tree` once from `init` and writes the 10 Hz path trace CSV.
pub fn cmd_fly<W: Write>(
    tree: &Path,
    init: Pose,
    config: Option<&Path>,
    dest: &Path,
    out: &mut W,
) -> Result<(), CliError> {
    let world = load_world(config)?;
    let bt = load_tree(tree)?;
    let b = world.room.bounds();
    if !(init.x > b.x0 && init.x < b.x1 && init.y > b.y0 && init.y < b.y1) {
        return Err(usage(format!("start ({}, {}) is outside the room", init.x, init.y)));
    }
    let result = run_episode(&bt, init, &world);
    let file = fs::File::create(dest).map_err(io_err(dest))?;
    write_trace_csv(file, &result).map_err(runtime)?;
    writeln!(
        out,
        "outcome: {}\nflight time [s]: {:.2}\nmiss distance [m]: {:.3}\nwrote {}",
        result.outcome,
        result.flight_time,
        result.error_norm(),
        dest.display()
    )
    .map_err(runtime)
}

/// Default location for a validation CSV: next to the tree file.
pub fn default_validation_csv(tree: &Path) -> PathBuf {
    let stem = tree.file_stem().and_then(|s| s.to_str()).unwrap_or("tree");
    tree.with_file_name(format!("{stem}_validation.csv"))
}
