//! Flies a tree from seeded random starts and prints the validation summary.
//!
//! `cargo run --release --example validate_tree -- [tree.bt] [runs] [seed]`

use bt_flight::bt::parse;
use bt_flight::evaluation::validate;
use bt_flight::sim::{Outcome, World};

fn main() {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let path = args
        .first()
        .cloned()
        .unwrap_or_else(|| concat!(env!("CARGO_MANIFEST_DIR"), "/examples/data/tuned.bt").into());
    let runs: usize = args.get(1).map_or(50, |s| s.parse().expect("integer run count"));
    let seed: u64 = args.get(2).map_or(1, |s| s.parse().expect("integer seed"));

    let tree = parse(&std::fs::read_to_string(&path).expect("readable tree")).expect("valid tree");
    let report = validate(&tree, runs, seed, &World::default());
    println!("tree: {path}");
    print!("{}", report.summary(tree.size()));
    for outcome in [Outcome::Success, Outcome::Crash, Outcome::Timeout] {
        let n = report.per_run.iter().filter(|r| r.outcome == outcome).count();
        println!("{:>8}: {n}", outcome.to_string());
    }
}
