//! Flies one episode and writes the path as an SVG, coloured by the action
//! node in control.
//!
//! `cargo run --release --example fly_episode -- [tree.bt] [x y heading] [out.svg]`

use bt_flight::bt::parse;
use bt_flight::plot::{trace_svg, TracePoint};
use bt_flight::sim::{run_episode, Pose, World};

fn main() {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let path = args
        .first()
        .cloned()
        .unwrap_or_else(|| concat!(env!("CARGO_MANIFEST_DIR"), "/examples/data/tuned.bt").into());
    let pose = if args.len() >= 4 {
        let v: Vec<f64> = args[1..4].iter().map(|a| a.parse().expect("numeric pose")).collect();
        Pose { x: v[0], y: v[1], heading: v[2] }
    } else {
        Pose { x: 2.0, y: 2.0, heading: 0.0 }
    };
    let out = args
        .get(4)
        .cloned()
        .unwrap_or_else(|| std::env::temp_dir().join("episode.svg").display().to_string());

    let tree = parse(&std::fs::read_to_string(&path).expect("readable tree")).expect("valid tree");
    let world = World::default();
    let result = run_episode(&tree, pose, &world);
    println!("outcome: {}", result.outcome);
    println!("flight time [s]: {:.2}", result.flight_time);
    println!("miss distance [m]: {:.3}", result.error_norm());
    if let (Some(angle), Some(offset)) = (result.approach_angle, result.centre_offset) {
        println!("approach angle [deg]: {angle:.1}  centre offset [m]: {offset:.3}");
    }

    let points: Vec<TracePoint> = result
        .path
        .iter()
        .map(|s| TracePoint { x: s.x, y: s.y, mode: s.mode })
        .collect();
    let svg = trace_svg(&points, &world.room).expect("non-empty path");
    std::fs::write(&out, svg).expect("writable output");
    println!("wrote {out}");
}
