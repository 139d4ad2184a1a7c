//! Renders the disparity map seen from one pose, runs the window detector
//! and writes the map as a PGM image.
//!
//! `cargo run --release --example window_detection -- [x y heading] [out.pgm]`

use bt_flight::sim::{Pose, World};
use bt_flight::vision::{detect_window, Sensor};

fn main() {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let pose = if args.len() >= 3 {
        let v: Vec<f64> = args[..3].iter().map(|a| a.parse().expect("numeric pose")).collect();
        Pose { x: v[0], y: v[1], heading: v[2] }
    } else {
        Pose { x: 3.0, y: 4.0, heading: 1.3 }
    };
    let out = args
        .get(3)
        .cloned()
        .unwrap_or_else(|| std::env::temp_dir().join("disparity.pgm").display().to_string());

    let world = World::default();
    let sensor = Sensor::new(&world.camera, &world.detector);
    let disparity = sensor.disparity(&pose, world.sim.camera_height, &world.room);
    let detection = detect_window(&disparity, &world.detector);
    let features = sensor.sense(&pose, world.sim.camera_height, &world.room);

    println!("pose: x={} y={} heading={}", pose.x, pose.y, pose.heading);
    println!("detection: {detection:?}");
    println!(
        "features: x={:.3} sigma={:.2} Sigma={:.4} Delta={:.4}",
        features.x, features.sigma, features.sum_disparity, features.delta
    );
    let mut file = std::io::BufWriter::new(std::fs::File::create(&out).expect("writable output"));
    // disparities are a few pixels; scale them into a visible grey range
    bt_flight::vision::write_pgm(&mut file, &disparity.0, 10.0).expect("write image");
    println!("wrote {out}");
}
