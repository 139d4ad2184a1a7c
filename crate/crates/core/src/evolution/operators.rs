use rand::Rng;

use super::EAParams;
use crate::bt::{BehaviourTree, BlackboardInput, Comparison, NodeKind, TreeNode, RUDDER_RANGE};

/// A random Condition or Action with uniformly drawn parameters.
pub fn random_leaf<R: Rng + ?Sized>(rng: &mut R) -> NodeKind {
    if rng.gen_bool(0.5) {
        random_action(rng)
    } else {
        random_condition(rng)
    }
}

fn random_action<R: Rng + ?Sized>(rng: &mut R) -> NodeKind {
    NodeKind::Action {
        rudder: rng.gen_range(RUDDER_RANGE.0..=RUDDER_RANGE.1),
    }
}

fn random_condition<R: Rng + ?Sized>(rng: &mut R) -> NodeKind {
    let variable = BlackboardInput::ALL[rng.gen_range(0..BlackboardInput::ALL.len())];
    let comparison = if rng.gen_bool(0.5) {
        Comparison::GreaterThan
    } else {
        Comparison::LessThan
    };
    let (lo, hi) = variable.range();
    NodeKind::Condition {
        variable,
        comparison,
        threshold: rng.gen_range(lo..=hi),
    }
}

fn push_composite(out: &mut Vec<TreeNode>, kind: NodeKind) -> usize {
    out.push(TreeNode {
        kind,
        children: Vec::new(),
    });
    out.len() - 1
}

/// Appends a grown node at `depth` (and its subtree) in pre-order; returns its index.
fn grow_into<R: Rng + ?Sized>(out: &mut Vec<TreeNode>, depth: usize, params: &EAParams, rng: &mut R) -> usize {
    let kind = if depth >= params.max_depth {
        random_leaf(rng)
    } else {
        match rng.gen_range(0..3) {
            0 if rng.gen_bool(0.5) => NodeKind::Selector,
            0 => NodeKind::Sequence,
            1 => random_action(rng),
            _ => random_condition(rng),
        }
    };
    let slot = push_composite(out, kind);
    if kind.is_composite() {
        for _ in 0..params.max_children {
            let child = grow_into(out, depth + 1, params, rng);
            out[slot].children.push(child);
        }
    }
    slot
}

/// Grow-method tree: a Selector root filled with `max_children` children,
/// each drawn uniformly from composite/action/condition, recursively, with
/// only leaves at the depth limit.
pub fn grow<R: Rng + ?Sized>(params: &EAParams, rng: &mut R) -> BehaviourTree {
    let mut out = Vec::new();
    let root = push_composite(&mut out, NodeKind::Selector);
    for _ in 0..params.max_children {
        let child = grow_into(&mut out, 1, params, rng);
        out[root].children.push(child);
    }
    BehaviourTree::from_parts(out, root).expect("grow builds well-formed trees")
}

/// A grown subtree whose root sits at `depth` of the host tree, so the host
/// stays within `max_depth`.
pub fn grow_subtree<R: Rng + ?Sized>(depth: usize, params: &EAParams, rng: &mut R) -> BehaviourTree {
    if depth == 0 {
        return grow(params, rng);
    }
    let mut out = Vec::new();
    let root = grow_into(&mut out, depth, params, rng);
    BehaviourTree::from_parts(out, root).expect("grow builds well-formed trees")
}

/// Swaps the subtree at node `at_a` of `a` with the one at `at_b` of `b`,
/// without depth truncation.
pub fn crossover_at(a: &BehaviourTree, b: &BehaviourTree, at_a: usize, at_b: usize) -> (BehaviourTree, BehaviourTree) {
    let child_a = a.replace_subtree(at_a, &b.subtree(at_b));
    let child_b = b.replace_subtree(at_b, &a.subtree(at_a));
    (child_a, child_b)
}

/// Single-point crossover with uniformly drawn points in each parent; both
/// children are cut back to `max_depth`.
pub fn crossover<R: Rng + ?Sized>(
    a: &BehaviourTree,
    b: &BehaviourTree,
    params: &EAParams,
    rng: &mut R,
) -> (BehaviourTree, BehaviourTree) {
    let at_a = rng.gen_range(0..a.size());
    let at_b = rng.gen_range(0..b.size());
    let (ca, cb) = crossover_at(a, b, at_a, at_b);
    (ca.truncate_depth(params.max_depth), cb.truncate_depth(params.max_depth))
}

/// Counts of what [`mutate_with_stats`] did.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct MutationStats {
    /// Nodes of the input tree that were considered.
    pub visited: usize,
    pub micro: usize,
    pub macro_: usize,
}

pub fn mutate<R: Rng + ?Sized>(tree: &BehaviourTree, params: &EAParams, rng: &mut R) -> BehaviourTree {
    mutate_with_stats(tree, params, rng).0
}

/// Per-node mutation. Each node of `tree` mutates with probability
/// `mutation_rate`; a mutating node is replaced by a grown subtree with
/// probability `hcc_rate`, otherwise a leaf gets fresh parameters of the same
/// kind and a composite is left as is. Nodes inside a replaced subtree are
/// not visited.
pub fn mutate_with_stats<R: Rng + ?Sized>(
    tree: &BehaviourTree,
    params: &EAParams,
    rng: &mut R,
) -> (BehaviourTree, MutationStats) {
    let mut stats = MutationStats::default();
    let mut out = Vec::with_capacity(tree.size());
    mutate_into(tree, 0, 0, params, rng, &mut out, &mut stats);
    let tree = BehaviourTree::from_parts(out, 0).expect("mutation keeps trees well-formed");
    (tree, stats)
}

fn mutate_into<R: Rng + ?Sized>(
    tree: &BehaviourTree,
    at: usize,
    depth: usize,
    params: &EAParams,
    rng: &mut R,
    out: &mut Vec<TreeNode>,
    stats: &mut MutationStats,
) -> usize {
    stats.visited += 1;
    let node = tree.node(at);
    let mut kind = node.kind;
    if rng.gen_bool(params.mutation_rate) {
        if rng.gen_bool(params.hcc_rate) {
            stats.macro_ += 1;
            let fresh = grow_subtree(depth, params, rng);
            let offset = out.len();
            out.extend(fresh.nodes().iter().map(|n| TreeNode {
                kind: n.kind,
                children: n.children.iter().map(|c| c + offset).collect(),
            }));
            return offset;
        }
        stats.micro += 1;
        kind = match kind {
            NodeKind::Action { .. } => random_action(rng),
            NodeKind::Condition { .. } => random_condition(rng),
            composite => composite,
        };
    }
    let slot = push_composite(out, kind);
    for &c in &node.children {
        let child = mutate_into(tree, c, depth + 1, params, rng, out, stats);
        out[slot].children.push(child);
    }
    slot
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn params() -> EAParams {
        EAParams::default()
    }

    #[test]
    fn depth_one_gives_flat_selector() {
        let p = EAParams {
            max_depth: 1,
            ..params()
        };
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..50 {
            let t = grow(&p, &mut rng);
            assert_eq!(t.node(0).kind, NodeKind::Selector);
            assert_eq!(t.size(), 1 + p.max_children);
            assert!(t.nodes()[1..].iter().all(|n| n.kind.is_leaf()));
        }
    }

    #[test]
    fn grown_trees_respect_bounds() {
        let p = params();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..1000 {
            let t = grow(&p, &mut rng);
            assert!(t.depth() <= p.max_depth);
            assert_eq!(t.node(0).kind, NodeKind::Selector);
            assert!(t.nodes().iter().all(|n| n.children.is_empty() || n.children.len() == p.max_children));
        }
    }

    #[test]
    fn root_swap_exchanges_parents() {
        let p = params();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let a = grow(&p, &mut rng);
        let b = grow(&p, &mut rng);
        let (ca, cb) = crossover_at(&a, &b, 0, 0);
        assert_eq!(ca, b);
        assert_eq!(cb, a);
    }

    #[test]
    fn no_mutation_when_rate_is_zero() {
        let p = EAParams {
            mutation_rate: 0.0,
            ..params()
        };
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let t = grow(&p, &mut rng);
        assert_eq!(mutate(&t, &p, &mut rng), t);
    }

    #[test]
    fn micro_only_keeps_topology() {
        let p = EAParams {
            mutation_rate: 1.0,
            hcc_rate: 0.0,
            ..params()
        };
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..20 {
            let t = grow(&p, &mut rng);
            let (m, stats) = mutate_with_stats(&t, &p, &mut rng);
            assert_eq!(stats.visited, t.size());
            assert_eq!(stats.micro, t.size());
            assert_eq!(m.size(), t.size());
            for (a, b) in t.nodes().iter().zip(m.nodes()) {
                assert_eq!(a.children, b.children);
                assert_eq!(std::mem::discriminant(&a.kind), std::mem::discriminant(&b.kind));
                if a.kind.is_leaf() {
                    assert_ne!(a.kind, b.kind);
                }
            }
        }
    }

    #[test]
    fn macro_mutation_respects_depth() {
        let p = EAParams {
            mutation_rate: 0.5,
            hcc_rate: 1.0,
            ..params()
        };
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        for _ in 0..200 {
            let t = grow(&p, &mut rng);
            assert!(mutate(&t, &p, &mut rng).depth() <= p.max_depth);
        }
    }
}
