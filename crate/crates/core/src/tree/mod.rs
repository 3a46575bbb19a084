//! Prefix-closed finite trees of natural-number sequences.
//!
//! A tree is a finite set of nodes closed under initial segments. The tree order is
//! the prefix order, the meet of two nodes is their longest common prefix, and the
//! predecessor of a non-root node drops the last coordinate. [`TreeIndex`] abstracts
//! the index shape so that quotient trees, whose meets are rearranged by an explicit
//! table, can drive the same enumeration machinery as plain trees.

mod enumerate;
mod quotient;

pub use enumerate::{all_enumerations, close_neighbor, is_enumeration, neighbor_path, Enumeration};
pub use quotient::{all_ideals, is_ideal, omit_node, quotient, Ideal, QuotientTree};

use serde::{Deserialize, Serialize};
use std::fmt;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TreeError {
    #[error("node {node} is present but its prefix {missing} is not")]
    MissingPrefix { node: TreeNode, missing: TreeNode },
    #[error("node {node} is longer than the height bound {max}")]
    HeightExceeded { node: TreeNode, max: usize },
    #[error("node {node} has a coordinate outside the branching bound {max}")]
    BranchingExceeded { node: TreeNode, max: u32 },
    #[error("node {0} is not in the tree")]
    NodeNotInTree(TreeNode),
    #[error("the root has no predecessor")]
    RootHasNoPredecessor,
    #[error("tree has {size} nodes, over the bound {bound}")]
    BoundExceeded { size: usize, bound: usize },
    #[error("sequence does not enumerate the tree")]
    NotAnEnumeration,
    #[error("enumerations do not list the same node set")]
    DifferentTrees,
    #[error("subset is not closed under initial segments")]
    NotAnIdeal,
}

/// A node: a finite sequence of natural numbers. The empty sequence is the root.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct TreeNode(Vec<u32>);

impl TreeNode {
    pub fn root() -> Self {
        TreeNode(Vec::new())
    }

    pub fn new(path: impl Into<Vec<u32>>) -> Self {
        TreeNode(path.into())
    }

    pub fn path(&self) -> &[u32] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_root(&self) -> bool {
        self.0.is_empty()
    }

    pub fn child(&self, coord: u32) -> Self {
        let mut p = self.0.clone();
        p.push(coord);
        TreeNode(p)
    }

    /// Drops the last coordinate; `None` on the root.
    pub fn parent(&self) -> Option<Self> {
        if self.0.is_empty() {
            None
        } else {
            Some(TreeNode(self.0[..self.0.len() - 1].to_vec()))
        }
    }

    pub fn is_prefix_of(&self, other: &Self) -> bool {
        other.0.len() >= self.0.len() && other.0[..self.0.len()] == self.0[..]
    }

    pub fn is_proper_prefix_of(&self, other: &Self) -> bool {
        other.0.len() > self.0.len() && self.is_prefix_of(other)
    }

    pub fn comparable(&self, other: &Self) -> bool {
        self.is_prefix_of(other) || other.is_prefix_of(self)
    }

    /// Longest common prefix.
    pub fn meet(&self, other: &Self) -> Self {
        let n = self
            .0
            .iter()
            .zip(other.0.iter())
            .take_while(|(a, b)| a == b)
            .count();
        TreeNode(self.0[..n].to_vec())
    }

    /// Canonical text form, identical to the node's JSON rendering, e.g. `[1,0]`.
    pub fn key(&self) -> String {
        let parts: Vec<String> = self.0.iter().map(u32::to_string).collect();
        format!("[{}]", parts.join(","))
    }

    /// Inverse of [`TreeNode::key`]: parses `[]`, `[0]`, `[1,0]`, … Whitespace
    /// around coordinates is tolerated.
    pub fn parse_key(s: &str) -> Option<Self> {
        let inner = s.trim().strip_prefix('[')?.strip_suffix(']')?.trim();
        if inner.is_empty() {
            return Some(TreeNode::root());
        }
        let path: Option<Vec<u32>> =
            inner.split(',').map(|p| p.trim().parse::<u32>().ok()).collect();
        Some(TreeNode(path?))
    }
}

impl fmt::Display for TreeNode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.key())
    }
}

impl fmt::Debug for TreeNode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.key())
    }
}

/// Size bounds for tree construction and enumeration listing.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Limits {
    pub max_height: usize,
    pub max_branching: u32,
    /// Node-count cap for listing all enumerations of a tree.
    pub max_enum_nodes: usize,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            max_height: 4,
            max_branching: 4,
            max_enum_nodes: 8,
        }
    }
}

/// Common interface of plain trees and quotient trees: a finite meet-semilattice of
/// nodes whose order (`le`) is recovered from meets.
pub trait TreeIndex {
    /// All nodes in ascending lexicographic order. The root sorts first.
    fn nodes(&self) -> &[TreeNode];

    fn contains(&self, t: &TreeNode) -> bool {
        self.nodes().binary_search(t).is_ok()
    }

    /// Meet of two member nodes; `None` if either is absent.
    fn meet_of(&self, s: &TreeNode, t: &TreeNode) -> Option<TreeNode>;

    /// Immediate predecessor of a member node; `None` on the root or an absent node.
    fn predecessor_of(&self, t: &TreeNode) -> Option<TreeNode>;

    fn le(&self, s: &TreeNode, t: &TreeNode) -> bool {
        self.meet_of(s, t).as_ref() == Some(s)
    }

    fn root(&self) -> Option<&TreeNode> {
        self.nodes().first()
    }
}

/// A finite prefix-closed set of nodes.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(transparent)]
pub struct Tree {
    nodes: Vec<TreeNode>,
}

impl Tree {
    /// Validates prefix closure and the height/branching bounds.
    pub fn new(nodes: impl IntoIterator<Item = TreeNode>, limits: &Limits) -> Result<Self, TreeError> {
        let mut nodes: Vec<TreeNode> = nodes.into_iter().collect();
        nodes.sort();
        nodes.dedup();
        for node in &nodes {
            if node.len() > limits.max_height {
                return Err(TreeError::HeightExceeded {
                    node: node.clone(),
                    max: limits.max_height,
                });
            }
            if node.path().iter().any(|&c| c >= limits.max_branching) {
                return Err(TreeError::BranchingExceeded {
                    node: node.clone(),
                    max: limits.max_branching,
                });
            }
            if let Some(parent) = node.parent() {
                if nodes.binary_search(&parent).is_err() {
                    return Err(TreeError::MissingPrefix {
                        node: node.clone(),
                        missing: parent,
                    });
                }
            }
        }
        Ok(Tree { nodes })
    }

    pub(crate) fn from_sorted_unchecked(nodes: Vec<TreeNode>) -> Self {
        Tree { nodes }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Longest common prefix of two member nodes.
    pub fn meet(&self, s: &TreeNode, t: &TreeNode) -> Result<TreeNode, TreeError> {
        for n in [s, t] {
            if !self.contains(n) {
                return Err(TreeError::NodeNotInTree(n.clone()));
            }
        }
        Ok(s.meet(t))
    }

    /// Drops the last coordinate of a member node.
    pub fn predecessor(&self, t: &TreeNode) -> Result<TreeNode, TreeError> {
        if !self.contains(t) {
            return Err(TreeError::NodeNotInTree(t.clone()));
        }
        t.parent().ok_or(TreeError::RootHasNoPredecessor)
    }
}

impl TreeIndex for Tree {
    fn nodes(&self) -> &[TreeNode] {
        &self.nodes
    }

    fn meet_of(&self, s: &TreeNode, t: &TreeNode) -> Option<TreeNode> {
        if self.contains(s) && self.contains(t) {
            Some(s.meet(t))
        } else {
            None
        }
    }

    fn predecessor_of(&self, t: &TreeNode) -> Option<TreeNode> {
        if self.contains(t) {
            t.parent()
        } else {
            None
        }
    }
}

/// Every nonempty prefix-closed set with at most `max_nodes` nodes, coordinates below
/// `max_branching` and paths no longer than `max_height`, in a fixed deterministic order.
pub fn all_trees(max_nodes: usize, max_branching: u32, max_height: usize) -> Vec<Tree> {
    let mut out = Vec::new();
    if max_nodes == 0 {
        return out;
    }
    grow(&mut out, vec![TreeNode::root()], max_nodes, max_branching, max_height);
    out
}

fn grow(out: &mut Vec<Tree>, cur: Vec<TreeNode>, max_nodes: usize, max_branching: u32, max_height: usize) {
    out.push(Tree::from_sorted_unchecked(cur.clone()));
    if cur.len() == max_nodes {
        return;
    }
    // Growing only by nodes above the lexicographic maximum generates each
    // prefix-closed set exactly once.
    let last = cur.last().unwrap().clone();
    let mut cands = Vec::new();
    for node in &cur {
        if node.len() == max_height {
            continue;
        }
        for c in 0..max_branching {
            let child = node.child(c);
            if child > last && cur.binary_search(&child).is_err() {
                cands.push(child);
            }
        }
    }
    cands.sort();
    for cand in cands {
        let mut next = cur.clone();
        let pos = next.binary_search(&cand).unwrap_err();
        next.insert(pos, cand);
        grow(out, next, max_nodes, max_branching, max_height);
    }
}

/// One representative per tree shape (index-isomorphism class): the first tree
/// in [`all_trees`] order whose shape has not appeared before.
pub fn canonical_trees(max_nodes: usize, max_height: usize) -> Vec<Tree> {
    let branching = max_nodes.saturating_sub(1).max(1) as u32;
    let mut seen = std::collections::BTreeSet::new();
    all_trees(max_nodes, branching, max_height)
        .into_iter()
        .filter(|t| seen.insert(shape_key(t, &TreeNode::root())))
        .collect()
}

/// Recursive shape encoding: a node's key is the sorted multiset of its
/// children's keys in parentheses, so two trees get the same key exactly when
/// a coordinate-relabeling bijection maps one onto the other.
fn shape_key(tree: &Tree, node: &TreeNode) -> String {
    let mut child_keys: Vec<String> = tree
        .nodes()
        .iter()
        .filter(|c| c.parent().as_ref() == Some(node))
        .map(|c| shape_key(tree, c))
        .collect();
    child_keys.sort();
    format!("({})", child_keys.join(""))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn node(p: &[u32]) -> TreeNode {
        TreeNode::new(p.to_vec())
    }

    #[test]
    fn validates_prefix_closed_sets() {
        let t = Tree::new(
            [node(&[]), node(&[0]), node(&[1]), node(&[0, 0])],
            &Limits::default(),
        )
        .unwrap();
        assert_eq!(t.len(), 4);
        assert!(t.contains(&node(&[0, 0])));
    }

    #[test]
    fn rejects_missing_prefix() {
        let err = Tree::new([node(&[]), node(&[0, 0])], &Limits::default()).unwrap_err();
        assert_eq!(
            err,
            TreeError::MissingPrefix {
                node: node(&[0, 0]),
                missing: node(&[0]),
            }
        );
    }

    #[test]
    fn rejects_too_long_paths() {
        let deep = node(&[0, 0, 0, 0, 0]);
        let mut nodes = vec![node(&[])];
        for k in 1..=5 {
            nodes.push(node(&vec![0; k]));
        }
        let err = Tree::new(nodes, &Limits::default()).unwrap_err();
        assert_eq!(err, TreeError::HeightExceeded { node: deep, max: 4 });
    }

    #[test]
    fn meets_are_longest_common_prefixes() {
        let t = Tree::new(
            [node(&[]), node(&[0]), node(&[0, 1]), node(&[0, 0])],
            &Limits::default(),
        )
        .unwrap();
        assert_eq!(t.meet(&node(&[0, 1]), &node(&[0, 0])).unwrap(), node(&[0]));
        assert_eq!(t.meet(&node(&[0, 1]), &node(&[0, 1])).unwrap(), node(&[0, 1]));
        assert_eq!(
            t.meet(&node(&[2]), &node(&[0])).unwrap_err(),
            TreeError::NodeNotInTree(node(&[2]))
        );
    }

    #[test]
    fn predecessor_drops_last_coordinate() {
        let t = Tree::new([node(&[]), node(&[1]), node(&[1, 2])], &Limits {
            max_branching: 4,
            ..Limits::default()
        })
        .unwrap();
        assert_eq!(t.predecessor(&node(&[1, 2])).unwrap(), node(&[1]));
        assert_eq!(
            t.predecessor(&node(&[])).unwrap_err(),
            TreeError::RootHasNoPredecessor
        );
    }

    #[test]
    fn node_keys_render_like_json() {
        assert_eq!(node(&[]).key(), "[]");
        assert_eq!(node(&[1, 0]).key(), "[1,0]");
        assert_eq!(serde_json::to_string(&node(&[1, 0])).unwrap(), "[1,0]");
    }

    #[test]
    fn node_keys_parse_back() {
        assert_eq!(TreeNode::parse_key("[]"), Some(node(&[])));
        assert_eq!(TreeNode::parse_key("[1,0]"), Some(node(&[1, 0])));
        assert_eq!(TreeNode::parse_key(" [ 2 , 3 ] "), Some(node(&[2, 3])));
        assert_eq!(TreeNode::parse_key("1,0"), None);
        assert_eq!(TreeNode::parse_key("[x]"), None);
    }

    #[test]
    fn tree_counts_match_hand_enumeration() {
        // Chains only: branching 1.
        assert_eq!(all_trees(3, 1, 4).len(), 3);
        // One or two nodes, two coordinate choices for the second.
        assert_eq!(all_trees(2, 2, 4).len(), 3);
        for t in all_trees(5, 3, 4) {
            assert!(t.len() <= 5);
            assert!(Tree::new(t.nodes().to_vec(), &Limits::default()).is_ok());
        }
    }

    #[test]
    fn canonical_trees_are_shapes() {
        // Rooted-tree shape counts by size: 1, 1, 2, 4.
        let shapes = canonical_trees(4, 4);
        let by_size = |k: usize| shapes.iter().filter(|t| t.len() == k).count();
        assert_eq!(by_size(1), 1);
        assert_eq!(by_size(2), 1);
        assert_eq!(by_size(3), 2);
        assert_eq!(by_size(4), 4);
    }
}
