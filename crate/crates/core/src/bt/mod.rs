//! Behaviour-tree genome: node kinds, the blackboard, tick semantics and
//! structural metrics.
//!
//! Trees are stored as an arena in depth-first pre-order, so node index `0`
//! is always the root and the index of a node equals its position when the
//! tree is read left to right (as in the text format). Every constructor
//! validates structure, so a `BehaviourTree` value is always a well-formed
//! rooted tree and ticking it cannot fail.

mod dsl;
mod prune;

use std::fmt;

use thiserror::Error;

pub use dsl::{check_limits, parse, serialize, serialize_compact, LimitWarning, ParseError};
pub use prune::prune;

/// The four sensed quantities a Condition node can test.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum BlackboardInput {
    /// Horizontal window position in the image, `[-1, 1]`.
    X,
    /// Window response, `[0, 100]`; lower means a more certain detection.
    Sigma,
    /// Normalised sum of disparity, `[0, 1]`.
    SumDisparity,
    /// Normalised left/right disparity difference, `[-1, 1]`.
    Delta,
}

impl BlackboardInput {
    pub const ALL: [BlackboardInput; 4] = [
        BlackboardInput::X,
        BlackboardInput::Sigma,
        BlackboardInput::SumDisparity,
        BlackboardInput::Delta,
    ];

    /// Name used in the text format and on the command line.
    pub fn name(self) -> &'static str {
        match self {
            BlackboardInput::X => "x",
            BlackboardInput::Sigma => "sigma",
            BlackboardInput::SumDisparity => "Sigma",
            BlackboardInput::Delta => "Delta",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|v| v.name() == name)
    }

    /// Closed range `(lo, hi)` of values this input can take.
    pub fn range(self) -> (f64, f64) {
        match self {
            BlackboardInput::X | BlackboardInput::Delta => (-1.0, 1.0),
            BlackboardInput::Sigma => (0.0, 100.0),
            BlackboardInput::SumDisparity => (0.0, 1.0),
        }
    }

    pub fn contains(self, value: f64) -> bool {
        let (lo, hi) = self.range();
        value >= lo && value <= hi
    }
}

impl fmt::Display for BlackboardInput {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Comparison {
    GreaterThan,
    LessThan,
}

impl Comparison {
    pub fn symbol(self) -> &'static str {
        match self {
            Comparison::GreaterThan => ">",
            Comparison::LessThan => "<",
        }
    }

    /// Strict comparison; ties fail.
    pub fn holds(self, value: f64, threshold: f64) -> bool {
        match self {
            Comparison::GreaterThan => value > threshold,
            Comparison::LessThan => value < threshold,
        }
    }
}

/// Valid range of an Action's rudder setting.
pub const RUDDER_RANGE: (f64, f64) = (-1.0, 1.0);

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum NodeKind {
    Selector,
    Sequence,
    Condition {
        variable: BlackboardInput,
        comparison: Comparison,
        threshold: f64,
    },
    Action {
        rudder: f64,
    },
}

impl NodeKind {
    pub fn is_composite(&self) -> bool {
        matches!(self, NodeKind::Selector | NodeKind::Sequence)
    }

    pub fn is_leaf(&self) -> bool {
        !self.is_composite()
    }

    fn check(&self) -> Result<(), TreeError> {
        match *self {
            NodeKind::Condition {
                variable,
                threshold,
                ..
            } if !variable.contains(threshold) => Err(TreeError::ThresholdOutOfRange {
                variable,
                threshold,
            }),
            NodeKind::Action { rudder } if !(RUDDER_RANGE.0..=RUDDER_RANGE.1).contains(&rudder) => {
                Err(TreeError::RudderOutOfRange(rudder))
            }
            _ => Ok(()),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TickStatus {
    Success,
    Failure,
}

impl fmt::Display for TickStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            TickStatus::Success => "Success",
            TickStatus::Failure => "Failure",
        })
    }
}

/// Shared state between sensing and the tree.
///
/// The four inputs are written by the vision pipeline before a tick; `rudder`
/// is written only by Action nodes.
#[derive(Clone, Copy, Debug, PartialEq, Default)]
pub struct Blackboard {
    pub x: f64,
    pub sigma: f64,
    pub sum_disparity: f64,
    pub delta: f64,
    pub rudder: f64,
}

#[derive(Debug, Error, PartialEq)]
#[error("blackboard entry {name} = {value} outside [{lo}, {hi}]")]
pub struct BlackboardRangeError {
    pub name: &'static str,
    pub value: f64,
    pub lo: f64,
    pub hi: f64,
}

impl Blackboard {
    /// Builds a blackboard from the four inputs, checking ranges. `rudder`
    /// starts at zero.
    pub fn new(x: f64, sigma: f64, sum_disparity: f64, delta: f64) -> Result<Self, BlackboardRangeError> {
        let bb = Blackboard {
            x,
            sigma,
            sum_disparity,
            delta,
            rudder: 0.0,
        };
        bb.check()?;
        Ok(bb)
    }

    pub fn with_rudder(mut self, rudder: f64) -> Result<Self, BlackboardRangeError> {
        self.rudder = rudder;
        self.check()?;
        Ok(self)
    }

    pub fn get(&self, input: BlackboardInput) -> f64 {
        match input {
            BlackboardInput::X => self.x,
            BlackboardInput::Sigma => self.sigma,
            BlackboardInput::SumDisparity => self.sum_disparity,
            BlackboardInput::Delta => self.delta,
        }
    }

    pub fn check(&self) -> Result<(), BlackboardRangeError> {
        for input in BlackboardInput::ALL {
            let value = self.get(input);
            if !input.contains(value) {
                let (lo, hi) = input.range();
                return Err(BlackboardRangeError {
                    name: input.name(),
                    value,
                    lo,
                    hi,
                });
            }
        }
        if !(RUDDER_RANGE.0..=RUDDER_RANGE.1).contains(&self.rudder) {
            return Err(BlackboardRangeError {
                name: "r",
                value: self.rudder,
                lo: RUDDER_RANGE.0,
                hi: RUDDER_RANGE.1,
            });
        }
        Ok(())
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum TreeError {
    #[error("tree has no nodes")]
    Empty,
    #[error("node {node} references missing child {child}")]
    DanglingChild { node: usize, child: usize },
    #[error("root index {0} out of bounds")]
    BadRoot(usize),
    #[error("node {0} has more than one parent")]
    SharedNode(usize),
    #[error("root node {0} has a parent")]
    RootHasParent(usize),
    #[error("node {0} is not reachable from the root")]
    Orphan(usize),
    #[error("leaf node {0} has children")]
    LeafWithChildren(usize),
    #[error("condition threshold {threshold} outside range of {variable}")]
    ThresholdOutOfRange {
        variable: BlackboardInput,
        threshold: f64,
    },
    #[error("rudder setting {0} outside [-1, 1]")]
    RudderOutOfRange(f64),
}

#[derive(Clone, Debug, PartialEq)]
pub struct TreeNode {
    pub kind: NodeKind,
    pub children: Vec<usize>,
}

/// An ordered rooted tree of Selector, Sequence, Condition and Action nodes.
#[derive(Clone, Debug, PartialEq)]
pub struct BehaviourTree {
    nodes: Vec<TreeNode>,
}

/// Result of a traced tick.
#[derive(Clone, Debug, PartialEq)]
pub struct TickTrace {
    pub status: TickStatus,
    pub blackboard: Blackboard,
    /// Evaluated nodes in visiting order, with the status each returned.
    pub evaluated: Vec<(usize, TickStatus)>,
    /// Index of the Action node that wrote the rudder last, if any ran.
    pub last_action: Option<usize>,
}

trait TickObserver {
    fn visited(&mut self, node: usize, status: TickStatus);
}

struct NoTrace;

impl TickObserver for NoTrace {
    #[inline]
    fn visited(&mut self, _: usize, _: TickStatus) {}
}

impl TickObserver for Vec<(usize, TickStatus)> {
    fn visited(&mut self, node: usize, status: TickStatus) {
        self.push((node, status));
    }
}

impl BehaviourTree {
    /// Builds a tree from an arbitrary arena, validating that it is a rooted
    /// tree with in-range leaf parameters. The result is re-indexed in
    /// pre-order.
    pub fn from_parts(nodes: Vec<TreeNode>, root: usize) -> Result<Self, TreeError> {
        if nodes.is_empty() {
            return Err(TreeError::Empty);
        }
        if root >= nodes.len() {
            return Err(TreeError::BadRoot(root));
        }
        let mut parent_count = vec![0usize; nodes.len()];
        for (i, node) in nodes.iter().enumerate() {
            node.kind.check()?;
            if node.kind.is_leaf() && !node.children.is_empty() {
                return Err(TreeError::LeafWithChildren(i));
            }
            for &c in &node.children {
                if c >= nodes.len() {
                    return Err(TreeError::DanglingChild { node: i, child: c });
                }
                parent_count[c] += 1;
                if parent_count[c] > 1 {
                    return Err(TreeError::SharedNode(c));
                }
            }
        }
        if parent_count[root] != 0 {
            return Err(TreeError::RootHasParent(root));
        }
        // With one parent per non-root node and none for the root, any cycle
        // is disconnected from the root, so reachability covers both checks.
        let mut seen = vec![false; nodes.len()];
        let mut order = Vec::with_capacity(nodes.len());
        let mut stack = vec![root];
        while let Some(i) = stack.pop() {
            seen[i] = true;
            order.push(i);
            stack.extend(nodes[i].children.iter().rev());
        }
        if let Some(orphan) = seen.iter().position(|s| !s) {
            return Err(TreeError::Orphan(orphan));
        }
        let mut new_index = vec![0usize; nodes.len()];
        for (new, &old) in order.iter().enumerate() {
            new_index[old] = new;
        }
        let nodes = order
            .iter()
            .map(|&old| TreeNode {
                kind: nodes[old].kind,
                children: nodes[old].children.iter().map(|&c| new_index[c]).collect(),
            })
            .collect();
        Ok(BehaviourTree { nodes })
    }

    /// Single-node tree.
    ///
    /// # Panics
    /// If a leaf parameter is out of range.
    pub fn leaf(kind: NodeKind) -> Self {
        kind.check().expect("leaf parameter out of range");
        BehaviourTree {
            nodes: vec![TreeNode {
                kind,
                children: Vec::new(),
            }],
        }
    }

    pub fn condition(variable: BlackboardInput, comparison: Comparison, threshold: f64) -> Self {
        Self::leaf(NodeKind::Condition {
            variable,
            comparison,
            threshold,
        })
    }

    pub fn action(rudder: f64) -> Self {
        Self::leaf(NodeKind::Action { rudder })
    }

    pub fn selector(children: impl IntoIterator<Item = BehaviourTree>) -> Self {
        Self::composite(NodeKind::Selector, children)
    }

    pub fn sequence(children: impl IntoIterator<Item = BehaviourTree>) -> Self {
        Self::composite(NodeKind::Sequence, children)
    }

    /// # Panics
    /// If `kind` is not a composite.
    pub fn composite(kind: NodeKind, children: impl IntoIterator<Item = BehaviourTree>) -> Self {
        assert!(kind.is_composite(), "composite() needs a Selector or Sequence");
        let mut nodes = vec![TreeNode {
            kind,
            children: Vec::new(),
        }];
        for child in children {
            let offset = nodes.len();
            nodes[0].children.push(offset);
            nodes.extend(child.nodes.into_iter().map(|n| TreeNode {
                kind: n.kind,
                children: n.children.into_iter().map(|c| c + offset).collect(),
            }));
        }
        BehaviourTree { nodes }
    }

    pub fn root(&self) -> usize {
        0
    }

    pub fn node(&self, index: usize) -> &TreeNode {
        &self.nodes[index]
    }

    pub fn nodes(&self) -> &[TreeNode] {
        &self.nodes
    }

    /// Total node count, root included.
    pub fn size(&self) -> usize {
        self.nodes.len()
    }

    /// Longest root-to-leaf edge count; a lone root has depth 0.
    pub fn depth(&self) -> usize {
        self.node_depths().into_iter().max().unwrap_or(0)
    }

    /// Depth of every node, indexed like the arena.
    pub fn node_depths(&self) -> Vec<usize> {
        let mut depths = vec![0; self.nodes.len()];
        // Pre-order guarantees parents come before their children.
        for i in 0..self.nodes.len() {
            for &c in &self.nodes[i].children {
                depths[c] = depths[i] + 1;
            }
        }
        depths
    }

    /// Largest child count of any composite.
    pub fn max_children(&self) -> usize {
        self.nodes.iter().map(|n| n.children.len()).max().unwrap_or(0)
    }

    /// Number of nodes in the subtree rooted at `index`.
    pub fn subtree_size(&self, index: usize) -> usize {
        let mut count = 0;
        let mut stack = vec![index];
        while let Some(i) = stack.pop() {
            count += 1;
            stack.extend(&self.nodes[i].children);
        }
        count
    }

    /// Copy of the subtree rooted at `index`.
    pub fn subtree(&self, index: usize) -> BehaviourTree {
        // Pre-order storage keeps a subtree contiguous.
        let len = self.subtree_size(index);
        let nodes = self.nodes[index..index + len]
            .iter()
            .map(|n| TreeNode {
                kind: n.kind,
                children: n.children.iter().map(|&c| c - index).collect(),
            })
            .collect();
        BehaviourTree { nodes }
    }

    /// Copy of this tree with the subtree at `index` replaced by `replacement`.
    pub fn replace_subtree(&self, index: usize, replacement: &BehaviourTree) -> BehaviourTree {
        let mut out = Vec::with_capacity(self.nodes.len() + replacement.nodes.len());
        self.copy_replacing(0, index, replacement, &mut out);
        BehaviourTree { nodes: out }
    }

    fn copy_replacing(&self, at: usize, target: usize, replacement: &BehaviourTree, out: &mut Vec<TreeNode>) {
        if at == target {
            let offset = out.len();
            out.extend(replacement.nodes.iter().map(|n| TreeNode {
                kind: n.kind,
                children: n.children.iter().map(|&c| c + offset).collect(),
            }));
            return;
        }
        let slot = out.len();
        out.push(TreeNode {
            kind: self.nodes[at].kind,
            children: Vec::with_capacity(self.nodes[at].children.len()),
        });
        for &c in &self.nodes[at].children {
            let child_slot = out.len();
            out[slot].children.push(child_slot);
            self.copy_replacing(c, target, replacement, out);
        }
    }

    /// Drops every node deeper than `max_depth`, then deletes composites that
    /// lost all their children to the cut (recursively upwards). Composites
    /// that were empty to begin with are kept. The root always survives.
    pub fn truncate_depth(&self, max_depth: usize) -> BehaviourTree {
        let mut out = Vec::with_capacity(self.nodes.len());
        self.copy_truncated(0, 0, max_depth, &mut out);
        BehaviourTree { nodes: out }
    }

    /// Appends the truncated subtree at `at`; returns false if it vanished.
    fn copy_truncated(&self, at: usize, depth: usize, max_depth: usize, out: &mut Vec<TreeNode>) -> bool {
        if depth > max_depth {
            return false;
        }
        let node = &self.nodes[at];
        let slot = out.len();
        out.push(TreeNode {
            kind: node.kind,
            children: Vec::new(),
        });
        for &c in &node.children {
            let child_slot = out.len();
            if self.copy_truncated(c, depth + 1, max_depth, out) {
                out[slot].children.push(child_slot);
            }
        }
        if depth > 0 && !node.children.is_empty() && out[slot].children.is_empty() {
            out.truncate(slot);
            return false;
        }
        true
    }

    /// Evaluates the tree once against `bb`.
    pub fn tick(&self, mut bb: Blackboard) -> (TickStatus, Blackboard) {
        let mut last_action = None;
        let status = self.tick_node(0, &mut bb, &mut last_action, &mut NoTrace);
        (status, bb)
    }

    /// Like [`tick`](Self::tick), also returning the index of the Action that
    /// wrote the rudder last (`None` if the previous value was held).
    pub fn tick_with_mode(&self, mut bb: Blackboard) -> (TickStatus, Blackboard, Option<usize>) {
        let mut last_action = None;
        let status = self.tick_node(0, &mut bb, &mut last_action, &mut NoTrace);
        (status, bb, last_action)
    }

    /// Like [`tick`](Self::tick) but also reports which nodes were evaluated.
    pub fn tick_traced(&self, mut bb: Blackboard) -> TickTrace {
        let mut last_action = None;
        let mut evaluated = Vec::new();
        let status = self.tick_node(0, &mut bb, &mut last_action, &mut evaluated);
        // Completion order is post-order; pre-order indices sort back to
        // visiting order.
        evaluated.sort_unstable_by_key(|&(i, _)| i);
        TickTrace {
            status,
            blackboard: bb,
            evaluated,
            last_action,
        }
    }

    fn tick_node<O: TickObserver>(
        &self,
        index: usize,
        bb: &mut Blackboard,
        last_action: &mut Option<usize>,
        obs: &mut O,
    ) -> TickStatus {
        let node = &self.nodes[index];
        let status = match node.kind {
            NodeKind::Selector => {
                let mut status = TickStatus::Failure;
                for &c in &node.children {
                    if self.tick_node(c, bb, last_action, obs) == TickStatus::Success {
                        status = TickStatus::Success;
                        break;
                    }
                }
                status
            }
            NodeKind::Sequence => {
                let mut status = TickStatus::Success;
                for &c in &node.children {
                    if self.tick_node(c, bb, last_action, obs) == TickStatus::Failure {
                        status = TickStatus::Failure;
                        break;
                    }
                }
                status
            }
            NodeKind::Condition {
                variable,
                comparison,
                threshold,
            } => {
                if comparison.holds(bb.get(variable), threshold) {
                    TickStatus::Success
                } else {
                    TickStatus::Failure
                }
            }
            NodeKind::Action { rudder } => {
                bb.rudder = rudder;
                *last_action = Some(index);
                TickStatus::Success
            }
        };
        obs.visited(index, status);
        status
    }
}

impl fmt::Display for BehaviourTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&serialize(self))
    }
}
