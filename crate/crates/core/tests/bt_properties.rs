mod common;

use bt_flight::bt::{parse, prune, serialize, serialize_compact, BehaviourTree, NodeKind, TickStatus};
use common::{arb_blackboard, arb_tree, reference_tick};
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(2000))]

    #[test]
    fn tick_matches_reference_interpreter(tree in arb_tree(), bb in arb_blackboard()) {
        let expected = reference_tick(&tree, &bb);
        let trace = tree.tick_traced(bb);
        prop_assert_eq!(trace.status, expected.status);
        prop_assert_eq!(trace.blackboard.rudder, expected.rudder);
        let visited: Vec<usize> = trace.evaluated.iter().map(|(i, _)| *i).collect();
        prop_assert_eq!(visited, expected.visited);
        prop_assert_eq!(tree.tick(bb), (trace.status, trace.blackboard));
    }

    #[test]
    fn tick_is_deterministic_and_stateless(tree in arb_tree(), bb in arb_blackboard()) {
        let first = tree.tick(bb);
        prop_assert_eq!(first, tree.tick(bb));
        // feeding the output blackboard back in changes only the held rudder
        let (_, out) = first;
        let mut again = out;
        again.rudder = bb.rudder;
        prop_assert_eq!(tree.tick(again), first);
    }

    #[test]
    fn short_circuit_bound(tree in arb_tree(), bb in arb_blackboard()) {
        let trace = tree.tick_traced(bb);
        let evaluated: std::collections::HashSet<usize> = trace.evaluated.iter().map(|(i, _)| *i).collect();
        prop_assert_eq!(evaluated.len(), trace.evaluated.len());
        prop_assert!(evaluated.len() <= tree.size());
        let exhausted = evaluated.iter().all(|&i| {
            tree.node(i).children.iter().all(|c| evaluated.contains(c))
        });
        prop_assert_eq!(evaluated.len() == tree.size(), exhausted);
    }

    #[test]
    fn prioritised_execution(tree in arb_tree(), bb in arb_blackboard()) {
        let trace = tree.tick_traced(bb);
        let status = |i: usize| trace.evaluated.iter().find(|(j, _)| *j == i).map(|(_, s)| *s);
        for (i, node) in tree.nodes().iter().enumerate() {
            if status(i).is_none() {
                continue;
            }
            let stop = match node.kind {
                NodeKind::Selector => TickStatus::Success,
                NodeKind::Sequence => TickStatus::Failure,
                _ => continue,
            };
            let mut stopped = false;
            for &c in &node.children {
                match status(c) {
                    Some(_) if stopped => prop_assert!(false, "child {c} of {i} ran after a short-circuit"),
                    Some(s) => stopped = s == stop,
                    None => prop_assert!(stopped, "child {c} of {i} skipped without a short-circuit"),
                }
            }
        }
        // no Action after a successful Selector child may have written r
        if let Some(last) = trace.last_action {
            prop_assert!(status(last).is_some());
            prop_assert_eq!(trace.blackboard.rudder, match tree.node(last).kind {
                NodeKind::Action { rudder } => rudder,
                _ => unreachable!(),
            });
        } else {
            prop_assert_eq!(trace.blackboard.rudder, bb.rudder);
        }
    }

    #[test]
    fn dsl_round_trip(tree in arb_tree()) {
        let text = serialize(&tree);
        let back = parse(&text).unwrap();
        prop_assert_eq!(&back, &tree);
        prop_assert_eq!(serialize(&back), text);
        prop_assert_eq!(parse(&serialize_compact(&tree)).unwrap(), tree);
    }

    #[test]
    fn prune_never_grows_and_is_idempotent(tree in arb_tree()) {
        let p = prune(&tree);
        prop_assert!(p.size() <= tree.size());
        prop_assert_eq!(prune(&p), p);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn prune_is_behaviour_preserving(tree in arb_tree(), bbs in prop::collection::vec(arb_blackboard(), 100)) {
        let p = prune(&tree);
        for bb in bbs {
            let (s1, b1) = tree.tick(bb);
            let (s2, b2) = p.tick(bb);
            prop_assert_eq!(s1, s2, "status differs on {:?}", bb);
            prop_assert_eq!(b1.rudder, b2.rudder, "rudder differs on {:?}", bb);
        }
    }
}

#[test]
fn execution_trace_example() {
    let text = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/data/execution_trace.bt")).unwrap();
    let tree = parse(&text).unwrap();
    assert_eq!(tree.size(), 23);
    let bb = bt_flight::bt::Blackboard::new(0.2, 50.0, 0.3, -0.2).unwrap();
    let trace = tree.tick_traced(bb);
    let failed: Vec<usize> = trace
        .evaluated
        .iter()
        .filter(|(i, s)| *s == TickStatus::Failure && matches!(tree.node(*i).kind, NodeKind::Condition { .. }))
        .map(|(i, _)| *i)
        .collect();
    assert_eq!(failed, vec![3, 13, 15, 17, 20]);
    let skipped: Vec<usize> = (0..23).filter(|i| !trace.evaluated.iter().any(|(j, _)| j == i)).collect();
    assert_eq!(skipped, vec![4, 16, 21]);
    let failing_composites: Vec<usize> = trace
        .evaluated
        .iter()
        .filter(|(i, s)| *s == TickStatus::Failure && tree.node(*i).kind.is_composite())
        .map(|(i, _)| *i)
        .collect();
    assert_eq!(failing_composites, vec![1, 5, 8, 9, 14, 18]);
    assert_eq!(trace.status, TickStatus::Success);
    assert_eq!(trace.blackboard.rudder, 0.1);
    assert_eq!(trace.last_action, Some(22));
}

#[test]
fn size_and_depth_examples() {
    let single = BehaviourTree::selector([BehaviourTree::action(0.0)]);
    assert_eq!((single.size(), single.depth()), (2, 1));
    let root = BehaviourTree::selector(Vec::new());
    assert_eq!((root.size(), root.depth()), (1, 0));
    let nested = BehaviourTree::selector([BehaviourTree::sequence([BehaviourTree::condition(
        bt_flight::bt::BlackboardInput::X,
        bt_flight::bt::Comparison::GreaterThan,
        0.0,
    )])]);
    assert_eq!(nested.depth(), 2);
    // a full 6-ary tree of depth 6 is the search-space bound: sum of 6^d
    let full: usize = (0..=6).map(|d| 6usize.pow(d)).sum();
    assert!(full > 46_000);
}
