//! Frontier artifacts: JSON documents, Graphviz trees and plain tables.

use std::fmt::Write as _;

use serde::Serialize;

use crate::error::Result;
use crate::oracle;
use crate::trees::{frontier, members_upto, Alphabet, ClosedClass, DEFAULT_CAP};
use crate::word::{llex, Word};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FrontierDoc {
    pub expr: String,
    pub alphabet: Alphabet,
    pub depth: usize,
    pub count: usize,
    pub members: Vec<Word>,
    pub leaves: Vec<Word>,
    /// The members and leaves agree with a word-by-word enumeration under the branching bound.
    pub validated: bool,
}

pub fn frontier_doc(p: &ClosedClass, depth: usize) -> Result<FrontierDoc> {
    let f = frontier(p, depth)?;
    let validated = oracle::enumerate(p, depth).frontier() == f;
    Ok(FrontierDoc {
        expr: p.label().to_string(),
        alphabet: p.alphabet(),
        depth,
        count: f.members.len(),
        members: f.members,
        leaves: f.leaves,
        validated,
    })
}

fn name(w: &[u64]) -> String {
    if w.is_empty() {
        return "ε".into();
    }
    w.iter().map(|s| s.to_string()).collect::<Vec<_>>().join(".")
}

/// `T_P` to `depth` as a Graphviz digraph; leaves are boxes.
pub fn dot(p: &ClosedClass, depth: usize) -> Result<String> {
    let mut nodes = members_upto(p, depth, DEFAULT_CAP)?;
    nodes.sort_by(|a, b| llex(a, b));
    let mut s = String::new();
    let _ = writeln!(s, "digraph tree {{");
    let _ = writeln!(s, "  label={:?};", p.label());
    let _ = writeln!(s, "  node [shape=circle, fontsize=10];");
    for w in &nodes {
        let shape = if w.len() < depth && p.is_leaf(w) { "box" } else { "circle" };
        let _ = writeln!(s, "  {:?} [shape={shape}];", name(w));
    }
    for w in nodes.iter().filter(|w| !w.is_empty()) {
        let parent = &w[..w.len() - 1];
        let _ = writeln!(s, "  {:?} -> {:?} [label=\"{}\"];", name(parent), name(w), w[w.len() - 1]);
    }
    s.push_str("}\n");
    Ok(s)
}

/// One row per member and leaf.
pub fn table(doc: &FrontierDoc) -> String {
    let mut s = format!("{}  depth {}  members {}  leaves {}\n", doc.expr, doc.depth, doc.count, doc.leaves.len());
    for w in &doc.members {
        let _ = writeln!(s, "member  {}", name(w));
    }
    for w in &doc.leaves {
        let _ = writeln!(s, "leaf    {}", name(w));
    }
    s
}
