//! Prunes a tree and checks, on a grid of blackboards, that the pruned tree
//! behaves identically.
//!
//! `cargo run --example prune_tree -- [tree.bt]`

use bt_flight::bt::{parse, prune, serialize, Blackboard};

fn main() {
    let text = match std::env::args().nth(1) {
        Some(path) => std::fs::read_to_string(path).expect("readable tree"),
        None => "(sel\n  (seq (cond x > 0.5) (cond x < 0.2) (act r 1.0))\n  (sel (sel (cond sigma < 30.0) (act r -0.4)))\n  (act r 0.9))\n".to_string(),
    };
    let tree = parse(&text).expect("valid tree");
    let pruned = prune(&tree);
    println!("original ({} nodes):\n{}", tree.size(), serialize(&tree));
    println!("pruned ({} nodes):\n{}", pruned.size(), serialize(&pruned));

    let mut checked = 0;
    for x in [-0.9, -0.3, 0.0, 0.3, 0.6] {
        for sigma in [0.0, 20.0, 40.0, 90.0] {
            for sum in [0.0, 0.1, 0.5] {
                for delta in [-0.5, 0.0, 0.5] {
                    let bb = Blackboard::new(x, sigma, sum, delta).unwrap().with_rudder(0.25).unwrap();
                    assert_eq!(tree.tick(bb), pruned.tick(bb), "diverged on {bb:?}");
                    checked += 1;
                }
            }
        }
    }
    println!("identical on {checked} blackboards");
}
