//! Shared generators and reference oracles for the integration tests.
#![allow(dead_code)]

use bt_flight::bt::{BehaviourTree, Blackboard, BlackboardInput, Comparison, NodeKind, TickStatus};
use proptest::prelude::*;
use rand::Rng;

/// Thresholds and inputs are sometimes drawn from this grid (scaled to the
/// variable's range) so that ties between an input and a threshold happen.
const GRID: [f64; 5] = [0.0, 0.25, 0.5, 0.75, 1.0];

fn scaled(var: BlackboardInput, u: f64) -> f64 {
    let (lo, hi) = var.range();
    lo + u * (hi - lo)
}

fn unit<R: Rng>(rng: &mut R) -> f64 {
    if rng.gen_bool(0.3) {
        GRID[rng.gen_range(0..GRID.len())]
    } else {
        rng.gen_range(0.0..=1.0)
    }
}

pub fn random_leaf<R: Rng>(rng: &mut R) -> BehaviourTree {
    if rng.gen_bool(0.4) {
        BehaviourTree::action(rng.gen_range(-1.0..=1.0))
    } else {
        let var = BlackboardInput::ALL[rng.gen_range(0..4)];
        let cmp = if rng.gen_bool(0.5) {
            Comparison::GreaterThan
        } else {
            Comparison::LessThan
        };
        BehaviourTree::condition(var, cmp, scaled(var, unit(rng)))
    }
}

/// Random well-formed tree with composites of 0..=`max_children` children.
pub fn random_tree<R: Rng>(rng: &mut R, max_depth: usize, max_children: usize) -> BehaviourTree {
    fn node<R: Rng>(rng: &mut R, depth: usize, max_depth: usize, max_children: usize) -> BehaviourTree {
        if depth >= max_depth || rng.gen_bool(0.45) {
            return random_leaf(rng);
        }
        let n = rng.gen_range(0..=max_children);
        let kids: Vec<_> = (0..n).map(|_| node(rng, depth + 1, max_depth, max_children)).collect();
        if rng.gen_bool(0.5) {
            BehaviourTree::selector(kids)
        } else {
            BehaviourTree::sequence(kids)
        }
    }
    let n = rng.gen_range(1..=max_children);
    BehaviourTree::selector((0..n).map(|_| node(rng, 1, max_depth, max_children)).collect::<Vec<_>>())
}

pub fn random_blackboard<R: Rng>(rng: &mut R) -> Blackboard {
    let [x, s, sum, d] = BlackboardInput::ALL.map(|v| scaled(v, unit(rng)));
    Blackboard::new(x, s, sum, d)
        .unwrap()
        .with_rudder(rng.gen_range(-1.0..=1.0))
        .unwrap()
}

pub fn arb_blackboard() -> impl Strategy<Value = Blackboard> {
    any::<u64>().prop_map(|seed| {
        let mut rng = <rand_chacha::ChaCha8Rng as rand::SeedableRng>::seed_from_u64(seed);
        random_blackboard(&mut rng)
    })
}

pub fn arb_tree() -> impl Strategy<Value = BehaviourTree> {
    (any::<u64>(), 1usize..=5, 1usize..=6).prop_map(|(seed, depth, kids)| {
        let mut rng = <rand_chacha::ChaCha8Rng as rand::SeedableRng>::seed_from_u64(seed);
        random_tree(&mut rng, depth, kids)
    })
}

/// Result of the reference interpreter.
#[derive(Debug, PartialEq)]
pub struct RefTick {
    pub status: TickStatus,
    pub rudder: f64,
    /// Node indices in the order they were evaluated.
    pub visited: Vec<usize>,
}

/// Straightforward recursive interpreter written from the textbook
/// definition, independent of the library's traversal.
pub fn reference_tick(tree: &BehaviourTree, bb: &Blackboard) -> RefTick {
    fn go(tree: &BehaviourTree, i: usize, bb: &Blackboard, r: &mut f64, visited: &mut Vec<usize>) -> bool {
        visited.push(i);
        let node = tree.node(i);
        match node.kind {
            NodeKind::Action { rudder } => {
                *r = rudder;
                true
            }
            NodeKind::Condition {
                variable,
                comparison,
                threshold,
            } => {
                let v = match variable {
                    BlackboardInput::X => bb.x,
                    BlackboardInput::Sigma => bb.sigma,
                    BlackboardInput::SumDisparity => bb.sum_disparity,
                    BlackboardInput::Delta => bb.delta,
                };
                match comparison {
                    Comparison::GreaterThan => v > threshold,
                    Comparison::LessThan => v < threshold,
                }
            }
            NodeKind::Selector => {
                for &c in &node.children {
                    if go(tree, c, bb, r, visited) {
                        return true;
                    }
                }
                false
            }
            NodeKind::Sequence => {
                for &c in &node.children {
                    if !go(tree, c, bb, r, visited) {
                        return false;
                    }
                }
                true
            }
        }
    }
    let mut rudder = bb.rudder;
    let mut visited = Vec::new();
    let ok = go(tree, tree.root(), bb, &mut rudder, &mut visited);
    RefTick {
        status: if ok { TickStatus::Success } else { TickStatus::Failure },
        rudder,
        visited,
    }
}
