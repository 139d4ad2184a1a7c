//! Ticks a tree once and prints which nodes were evaluated, in order.
//!
//! `cargo run --example tick_trace -- [tree.bt] [x sigma Sigma Delta]`

use bt_flight::bt::{parse, Blackboard, NodeKind};

fn main() {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let path = args
        .first()
        .cloned()
        .unwrap_or_else(|| concat!(env!("CARGO_MANIFEST_DIR"), "/examples/data/execution_trace.bt").into());
    let values: Vec<f64> = if args.len() >= 5 {
        args[1..5].iter().map(|a| a.parse().expect("numeric input")).collect()
    } else {
        vec![0.2, 50.0, 0.3, -0.2]
    };
    let tree = parse(&std::fs::read_to_string(&path).expect("readable tree")).expect("valid tree");
    let bb = Blackboard::new(values[0], values[1], values[2], values[3]).expect("inputs in range");
    let trace = tree.tick_traced(bb);

    println!("tree: {path} ({} nodes)", tree.size());
    println!("inputs: x={} sigma={} Sigma={} Delta={}", values[0], values[1], values[2], values[3]);
    println!("status {}  r = {}", trace.status, trace.blackboard.rudder);
    let depths = tree.node_depths();
    for &(i, status) in &trace.evaluated {
        let kind = match tree.node(i).kind {
            NodeKind::Selector => "sel".to_string(),
            NodeKind::Sequence => "seq".to_string(),
            NodeKind::Condition {
                variable,
                comparison,
                threshold,
            } => format!("cond {variable} {} {threshold}", comparison.symbol()),
            NodeKind::Action { rudder } => format!("act r {rudder}"),
        };
        println!("{i:3} {}{kind:<24} {status}", "  ".repeat(depths[i]));
    }
    let skipped: Vec<usize> = (0..tree.size())
        .filter(|i| !trace.evaluated.iter().any(|(j, _)| j == i))
        .collect();
    println!("not evaluated: {skipped:?}");
}
