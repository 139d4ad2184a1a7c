//! S-expression text format for behaviour trees.
//!
//! ```text
//! tree := node
//! node := "(" "sel" node* ")" | "(" "seq" node* ")"
//!       | "(" "cond" VAR CMP NUM ")" | "(" "act" "r" NUM ")"
//! ```
//!
//! `;` starts a comment running to the end of the line.

use std::fmt::Write as _;

use thiserror::Error;

use super::{BehaviourTree, BlackboardInput, Comparison, NodeKind, TreeNode, RUDDER_RANGE};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ParseError {
    #[error("{line}:{col}: syntax error: {msg}")]
    Syntax { line: usize, col: usize, msg: String },
    #[error("{line}:{col}: unknown variable {name}")]
    UnknownVariable { line: usize, col: usize, name: String },
    #[error("{line}:{col}: value {value} outside [{lo}, {hi}]")]
    OutOfRange {
        line: usize,
        col: usize,
        value: f64,
        lo: f64,
        hi: f64,
    },
}

/// A hand-edited tree exceeding the evolution bounds is still accepted; these
/// are reported alongside.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LimitWarning {
    Depth { depth: usize, max: usize },
    Children { node: usize, count: usize, max: usize },
}

impl std::fmt::Display for LimitWarning {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            LimitWarning::Depth { depth, max } => write!(f, "tree depth {depth} exceeds limit {max}"),
            LimitWarning::Children { node, count, max } => {
                write!(f, "node {node} has {count} children, limit is {max}")
            }
        }
    }
}

pub fn check_limits(tree: &BehaviourTree, max_depth: usize, max_children: usize) -> Vec<LimitWarning> {
    let mut warnings = Vec::new();
    let depth = tree.depth();
    if depth > max_depth {
        warnings.push(LimitWarning::Depth { depth, max: max_depth });
    }
    for (i, n) in tree.nodes().iter().enumerate() {
        if n.children.len() > max_children {
            warnings.push(LimitWarning::Children {
                node: i,
                count: n.children.len(),
                max: max_children,
            });
        }
    }
    warnings
}

#[derive(Debug, Clone, PartialEq)]
enum Tok<'a> {
    Open,
    Close,
    Atom(&'a str),
}

#[derive(Debug, Clone)]
struct Token<'a> {
    tok: Tok<'a>,
    line: usize,
    col: usize,
}

fn tokenize(text: &str) -> Vec<Token<'_>> {
    let mut out = Vec::new();
    for (line_no, line) in text.lines().enumerate() {
        let line = match line.find(';') {
            Some(i) => &line[..i],
            None => line,
        };
        let mut chars = line.char_indices().peekable();
        while let Some((start, c)) = chars.next() {
            let col = line[..start].chars().count() + 1;
            let pos = (line_no + 1, col);
            match c {
                '(' => out.push(Token {
                    tok: Tok::Open,
                    line: pos.0,
                    col: pos.1,
                }),
                ')' => out.push(Token {
                    tok: Tok::Close,
                    line: pos.0,
                    col: pos.1,
                }),
                c if c.is_whitespace() => {}
                _ => {
                    let mut end = start + c.len_utf8();
                    while let Some(&(i, c)) = chars.peek() {
                        if c.is_whitespace() || c == '(' || c == ')' {
                            break;
                        }
                        end = i + c.len_utf8();
                        chars.next();
                    }
                    out.push(Token {
                        tok: Tok::Atom(&line[start..end]),
                        line: pos.0,
                        col: pos.1,
                    });
                }
            }
        }
    }
    out
}

struct Parser<'a> {
    tokens: Vec<Token<'a>>,
    pos: usize,
    end: (usize, usize),
    nodes: Vec<TreeNode>,
}

impl<'a> Parser<'a> {
    fn err<T>(&self, at: (usize, usize), msg: impl Into<String>) -> Result<T, ParseError> {
        Err(ParseError::Syntax {
            line: at.0,
            col: at.1,
            msg: msg.into(),
        })
    }

    fn here(&self) -> (usize, usize) {
        self.tokens.get(self.pos).map(|t| (t.line, t.col)).unwrap_or(self.end)
    }

    fn next(&mut self) -> Option<Token<'a>> {
        let t = self.tokens.get(self.pos).cloned();
        self.pos += 1;
        t
    }

    fn atom(&mut self, what: &str) -> Result<(&'a str, (usize, usize)), ParseError> {
        let at = self.here();
        match self.next() {
            Some(Token { tok: Tok::Atom(a), .. }) => Ok((a, at)),
            Some(_) => self.err(at, format!("expected {what}")),
            None => self.err(at, format!("unexpected end of input, expected {what}")),
        }
    }

    fn number(&mut self, what: &str) -> Result<(f64, (usize, usize)), ParseError> {
        let (a, at) = self.atom(what)?;
        let numeric = !a.is_empty() && a.chars().all(|c| c.is_ascii_digit() || "+-.eE".contains(c));
        match a.parse::<f64>() {
            Ok(v) if numeric && v.is_finite() => Ok((v, at)),
            _ => self.err(at, format!("expected {what}, found `{a}`")),
        }
    }

    fn close(&mut self) -> Result<(), ParseError> {
        let at = self.here();
        match self.next() {
            Some(Token { tok: Tok::Close, .. }) => Ok(()),
            Some(_) => self.err(at, "expected `)`"),
            None => self.err(at, "unexpected end of input, expected `)`"),
        }
    }

    fn node(&mut self) -> Result<usize, ParseError> {
        let at = self.here();
        match self.next() {
            Some(Token { tok: Tok::Open, .. }) => {}
            Some(_) => return self.err(at, "expected `(`"),
            None => return self.err(at, "unexpected end of input, expected `(`"),
        }
        let (head, head_at) = self.atom("node type")?;
        let slot = self.nodes.len();
        match head {
            "sel" | "seq" => {
                let kind = if head == "sel" {
                    NodeKind::Selector
                } else {
                    NodeKind::Sequence
                };
                self.nodes.push(TreeNode {
                    kind,
                    children: Vec::new(),
                });
                loop {
                    match self.tokens.get(self.pos).map(|t| &t.tok) {
                        Some(Tok::Close) => {
                            self.pos += 1;
                            break;
                        }
                        Some(_) => {
                            let child = self.node()?;
                            self.nodes[slot].children.push(child);
                        }
                        None => return self.err(self.end, format!("unclosed `({head}`")),
                    }
                }
            }
            "cond" => {
                let (name, name_at) = self.atom("variable name")?;
                let variable = BlackboardInput::from_name(name).ok_or_else(|| ParseError::UnknownVariable {
                    line: name_at.0,
                    col: name_at.1,
                    name: name.to_string(),
                })?;
                let (cmp, cmp_at) = self.atom("`>` or `<`")?;
                let comparison = match cmp {
                    ">" => Comparison::GreaterThan,
                    "<" => Comparison::LessThan,
                    other => return self.err(cmp_at, format!("expected `>` or `<`, found `{other}`")),
                };
                let (threshold, num_at) = self.number("threshold")?;
                let (lo, hi) = variable.range();
                if !variable.contains(threshold) {
                    return Err(ParseError::OutOfRange {
                        line: num_at.0,
                        col: num_at.1,
                        value: threshold,
                        lo,
                        hi,
                    });
                }
                self.close()?;
                self.nodes.push(TreeNode {
                    kind: NodeKind::Condition {
                        variable,
                        comparison,
                        threshold,
                    },
                    children: Vec::new(),
                });
            }
            "act" => {
                let (target, target_at) = self.atom("`r`")?;
                if target != "r" {
                    return self.err(target_at, format!("actions can only set `r`, found `{target}`"));
                }
                let (rudder, num_at) = self.number("rudder setting")?;
                if !(RUDDER_RANGE.0..=RUDDER_RANGE.1).contains(&rudder) {
                    return Err(ParseError::OutOfRange {
                        line: num_at.0,
                        col: num_at.1,
                        value: rudder,
                        lo: RUDDER_RANGE.0,
                        hi: RUDDER_RANGE.1,
                    });
                }
                self.close()?;
                self.nodes.push(TreeNode {
                    kind: NodeKind::Action { rudder },
                    children: Vec::new(),
                });
            }
            other => return self.err(head_at, format!("unknown node type `{other}`")),
        }
        Ok(slot)
    }
}

/// Parses one tree from `text`.
pub fn parse(text: &str) -> Result<BehaviourTree, ParseError> {
    let tokens = tokenize(text);
    let end = {
        let lines = text.lines().count().max(1);
        let col = text.lines().last().map(|l| l.chars().count() + 1).unwrap_or(1);
        (lines, col)
    };
    let mut p = Parser {
        tokens,
        pos: 0,
        end,
        nodes: Vec::new(),
    };
    if p.tokens.is_empty() {
        return p.err(end, "empty input");
    }
    let root = p.node()?;
    if p.pos < p.tokens.len() {
        return p.err(p.here(), "trailing input after tree");
    }
    // nodes were pushed in pre-order, so the arena is already canonical
    Ok(BehaviourTree::from_parts(p.nodes, root).expect("parser builds well-formed trees"))
}

fn fmt_num(v: f64) -> String {
    let s = format!("{v}");
    if s.contains('.') {
        s
    } else {
        s + ".0"
    }
}

fn write_leaf(out: &mut String, kind: &NodeKind) {
    match *kind {
        NodeKind::Condition {
            variable,
            comparison,
            threshold,
        } => {
            let _ = write!(out, "(cond {} {} {})", variable.name(), comparison.symbol(), fmt_num(threshold));
        }
        NodeKind::Action { rudder } => {
            let _ = write!(out, "(act r {})", fmt_num(rudder));
        }
        NodeKind::Selector => out.push_str("(sel"),
        NodeKind::Sequence => out.push_str("(seq"),
    }
}

/// Canonical multi-line form: one node per line, two-space indentation.
pub fn serialize(tree: &BehaviourTree) -> String {
    fn go(tree: &BehaviourTree, i: usize, indent: usize, out: &mut String) {
        let node = tree.node(i);
        for _ in 0..indent {
            out.push_str("  ");
        }
        write_leaf(out, &node.kind);
        if node.kind.is_composite() {
            for &c in &node.children {
                out.push('\n');
                go(tree, c, indent + 1, out);
            }
            out.push(')');
        }
    }
    let mut out = String::new();
    go(tree, 0, 0, &mut out);
    out.push('\n');
    out
}

/// Single-line form, used in checkpoints.
pub fn serialize_compact(tree: &BehaviourTree) -> String {
    fn go(tree: &BehaviourTree, i: usize, out: &mut String) {
        let node = tree.node(i);
        write_leaf(out, &node.kind);
        if node.kind.is_composite() {
            for &c in &node.children {
                out.push(' ');
                go(tree, c, out);
            }
            out.push(')');
        }
    }
    let mut out = String::new();
    go(tree, 0, &mut out);
    out
}
