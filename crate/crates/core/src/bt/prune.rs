//! Static removal of nodes that cannot change a tick's outcome.

use super::{BehaviourTree, NodeKind, TickStatus};

struct PNode {
    kind: NodeKind,
    children: Vec<PNode>,
}

impl PNode {
    fn from_tree(tree: &BehaviourTree, i: usize) -> PNode {
        let node = tree.node(i);
        PNode {
            kind: node.kind,
            children: node.children.iter().map(|&c| PNode::from_tree(tree, c)).collect(),
        }
    }

    fn into_tree(self) -> BehaviourTree {
        if self.kind.is_composite() {
            BehaviourTree::composite(self.kind, self.children.into_iter().map(PNode::into_tree))
        } else {
            BehaviourTree::leaf(self.kind)
        }
    }

    /// True if no Action lives in this subtree, so ticking it never writes.
    fn pure(&self) -> bool {
        !matches!(self.kind, NodeKind::Action { .. }) && self.children.iter().all(PNode::pure)
    }

    /// Status returned for every blackboard, if it does not depend on inputs.
    fn constant(&self) -> Option<TickStatus> {
        match self.kind {
            NodeKind::Action { .. } => Some(TickStatus::Success),
            NodeKind::Condition { .. } => None,
            NodeKind::Selector => {
                let consts: Vec<_> = self.children.iter().map(PNode::constant).collect();
                if consts.contains(&Some(TickStatus::Success)) {
                    Some(TickStatus::Success)
                } else if consts.iter().all(|c| *c == Some(TickStatus::Failure)) {
                    Some(TickStatus::Failure)
                } else {
                    None
                }
            }
            NodeKind::Sequence => {
                let consts: Vec<_> = self.children.iter().map(PNode::constant).collect();
                if consts.contains(&Some(TickStatus::Failure)) {
                    Some(TickStatus::Failure)
                } else if consts.iter().all(|c| *c == Some(TickStatus::Success)) {
                    Some(TickStatus::Success)
                } else {
                    None
                }
            }
        }
    }

    fn simplify(self) -> PNode {
        let kind = self.kind;
        if kind.is_leaf() {
            return self;
        }
        // Status that makes this composite stop early, and the one that lets
        // evaluation pass on to the next sibling.
        let (stop, pass) = match kind {
            NodeKind::Selector => (TickStatus::Success, TickStatus::Failure),
            _ => (TickStatus::Failure, TickStatus::Success),
        };

        let mut children = Vec::with_capacity(self.children.len());
        for child in self.children.into_iter().map(PNode::simplify) {
            if child.kind == kind {
                // same-type nesting evaluates identically when inlined
                children.extend(child.children);
            } else {
                children.push(child);
            }
        }

        if let Some(cut) = children.iter().position(|c| c.constant() == Some(stop)) {
            children.truncate(cut + 1);
        }
        children.retain(|c| !(c.pure() && c.constant() == Some(pass)));

        let node = PNode { kind, children };
        if node.pure() {
            match node.constant() {
                Some(TickStatus::Failure) => {
                    return PNode {
                        kind: NodeKind::Selector,
                        children: Vec::new(),
                    }
                }
                Some(TickStatus::Success) => {
                    return PNode {
                        kind: NodeKind::Sequence,
                        children: Vec::new(),
                    }
                }
                None => {}
            }
        }
        let PNode { kind, mut children } = node;
        if children.len() == 1 {
            return children.pop().unwrap();
        }
        PNode { kind, children }
    }
}

/// Returns an equivalent tree with redundant nodes removed.
///
/// For every blackboard, ticking the result gives the same status and the
/// same final rudder as ticking `tree`. Applied rules, repeated to a
/// fixpoint: siblings after a child that always short-circuits its parent
/// are dropped; children without Actions whose constant status is ignored by
/// the parent are dropped; constant Action-free subtrees collapse to an empty
/// composite of that status; nested composites of the same type are inlined;
/// single-child composites are replaced by the child.
pub fn prune(tree: &BehaviourTree) -> BehaviourTree {
    let mut current = tree.clone();
    loop {
        let next = PNode::from_tree(&current, 0).simplify().into_tree();
        if next == current {
            return current;
        }
        current = next;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bt::{parse, BlackboardInput::*, Comparison::*};

    #[test]
    fn drops_siblings_after_action_then_collapses() {
        let t = BehaviourTree::selector([BehaviourTree::action(0.5), BehaviourTree::condition(X, GreaterThan, 0.0)]);
        assert_eq!(prune(&t), BehaviourTree::action(0.5));
    }

    #[test]
    fn minimal_tree_is_a_fixpoint() {
        let t = parse("(sel (seq (cond sigma < 40) (act r 0.6)) (seq (cond Sigma > 0.2) (act r -1)) (act r -0.2))")
            .unwrap();
        assert_eq!(prune(&t), t);
    }

    #[test]
    fn folds_empty_and_nested_composites() {
        let t = parse("(sel (sel) (sel (cond x > 0.1) (act r 0.3)) (seq (seq) (act r 0.0)) (act r 1))").unwrap();
        // the inlined (act r 0.3) always succeeds, so everything after it is dead
        let expected = parse("(sel (cond x > 0.1) (act r 0.3))").unwrap();
        assert_eq!(prune(&t), expected);
    }

    #[test]
    fn constant_failure_in_sequence_keeps_side_effects_before_it() {
        let t = parse("(seq (act r 0.4) (sel) (act r -0.4) (cond x > 0))").unwrap();
        assert_eq!(prune(&t), parse("(seq (act r 0.4) (sel))").unwrap());
    }

    #[test]
    fn pure_constant_subtrees_collapse() {
        let t = parse("(seq (cond x > 0) (sel (cond Delta < 0.1) (seq)) (act r 0.1))").unwrap();
        assert_eq!(prune(&t), parse("(seq (cond x > 0) (act r 0.1))").unwrap());
        let t = parse("(sel (seq (cond x > 0) (sel)) (cond sigma < 3) (sel))").unwrap();
        assert_eq!(prune(&t), parse("(cond sigma < 3)").unwrap());
    }
}
