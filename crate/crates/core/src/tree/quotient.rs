//! Ideals and quotient trees. Collapsing an ideal keeps the remaining nodes and the
//! root; meets that used to land inside the ideal drop to the root. The result need
//! not be prefix-closed, so its meets live in an explicit table. Deleting a single
//! interior node is handled the same way, with meets dropping to the node's
//! predecessor.

use super::{TreeError, TreeIndex, TreeNode};
use serde::ser::{SerializeStruct, Serializer};
use serde::Serialize;
use std::collections::BTreeMap;

/// A subset of a tree closed under initial segments.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Ideal {
    members: Vec<TreeNode>,
}

impl Ideal {
    pub fn new<T: TreeIndex + ?Sized>(
        tree: &T,
        members: impl IntoIterator<Item = TreeNode>,
    ) -> Result<Self, TreeError> {
        let mut members: Vec<TreeNode> = members.into_iter().collect();
        members.sort();
        members.dedup();
        if !is_ideal(tree, &members) {
            return Err(TreeError::NotAnIdeal);
        }
        Ok(Ideal { members })
    }

    pub fn members(&self) -> &[TreeNode] {
        &self.members
    }

    pub fn contains(&self, t: &TreeNode) -> bool {
        self.members.binary_search(t).is_ok()
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }
}

/// Membership in the tree plus closure under predecessors. Lower sets of a tree order
/// are exactly the predecessor-closed subsets.
pub fn is_ideal<T: TreeIndex + ?Sized>(tree: &T, subset: &[TreeNode]) -> bool {
    subset.iter().all(|t| {
        tree.contains(t)
            && tree
                .predecessor_of(t)
                .map_or(true, |p| subset.contains(&p))
    })
}

/// Every ideal of the tree (including the empty one), in a fixed deterministic order.
pub fn all_ideals<T: TreeIndex + ?Sized>(tree: &T) -> Vec<Ideal> {
    let nodes = tree.nodes();
    let n = nodes.len();
    assert!(n <= 16, "ideal listing is a small-tree operation");
    let parent: Vec<Option<usize>> = nodes
        .iter()
        .map(|t| {
            tree.predecessor_of(t)
                .map(|p| nodes.binary_search(&p).expect("predecessor is a member"))
        })
        .collect();
    let mut out = Vec::new();
    for mask in 0u32..(1 << n) {
        let closed = (0..n).all(|i| {
            mask >> i & 1 == 0 || parent[i].map_or(true, |p| mask >> p & 1 == 1)
        });
        if closed {
            let members: Vec<TreeNode> = (0..n)
                .filter(|&i| mask >> i & 1 == 1)
                .map(|i| nodes[i].clone())
                .collect();
            out.push(Ideal { members });
        }
    }
    out
}

/// A finite tree given by its node set and an explicit meet table.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuotientTree {
    nodes: Vec<TreeNode>,
    /// Keyed by ordered pairs `(min, max)`; diagonal entries are implicit.
    meets: BTreeMap<(TreeNode, TreeNode), TreeNode>,
}

impl QuotientTree {
    fn build(mut nodes: Vec<TreeNode>, meet_fn: impl Fn(&TreeNode, &TreeNode) -> TreeNode) -> Self {
        nodes.sort();
        nodes.dedup();
        let mut meets = BTreeMap::new();
        for (i, x) in nodes.iter().enumerate() {
            for y in nodes.iter().skip(i + 1) {
                meets.insert((x.clone(), y.clone()), meet_fn(x, y));
            }
        }
        QuotientTree { nodes, meets }
    }

    /// All off-diagonal meet entries as `(x, y, meet)` with `x < y`.
    pub fn meet_table(&self) -> impl Iterator<Item = (&TreeNode, &TreeNode, &TreeNode)> {
        self.meets.iter().map(|((x, y), m)| (x, y, m))
    }

    /// The sub-semilattice on a predecessor-closed subset of the nodes. Meets
    /// of two members are below both, hence members themselves.
    pub fn restriction(
        &self,
        members: impl IntoIterator<Item = TreeNode>,
    ) -> Result<QuotientTree, TreeError> {
        let mut members: Vec<TreeNode> = members.into_iter().collect();
        members.sort();
        members.dedup();
        for m in &members {
            if !self.contains(m) {
                return Err(TreeError::NodeNotInTree(m.clone()));
            }
        }
        if !is_ideal(self, &members) {
            return Err(TreeError::NotAnIdeal);
        }
        Ok(QuotientTree::build(members, |x, y| {
            self.meet_of(x, y).expect("restriction members are nodes")
        }))
    }

    /// Idempotence and commutativity hold by construction; checks that every meet is
    /// a member and is the greatest lower bound, and that meets associate.
    pub fn semilattice_laws_hold(&self) -> bool {
        let n = &self.nodes;
        let meet = |x: &TreeNode, y: &TreeNode| self.meet_of(x, y).unwrap();
        for x in n {
            for y in n {
                let m = meet(x, y);
                if !self.contains(&m) {
                    return false;
                }
                if !self.le(&m, x) || !self.le(&m, y) {
                    return false;
                }
                for z in n {
                    if self.le(z, x) && self.le(z, y) && !self.le(z, &m) {
                        return false;
                    }
                    if meet(&meet(x, y), z) != meet(x, &meet(y, z)) {
                        return false;
                    }
                }
            }
        }
        true
    }
}

impl TreeIndex for QuotientTree {
    fn nodes(&self) -> &[TreeNode] {
        &self.nodes
    }

    fn meet_of(&self, s: &TreeNode, t: &TreeNode) -> Option<TreeNode> {
        if !self.contains(s) || !self.contains(t) {
            return None;
        }
        if s == t {
            return Some(s.clone());
        }
        let key = if s < t {
            (s.clone(), t.clone())
        } else {
            (t.clone(), s.clone())
        };
        self.meets.get(&key).cloned()
    }

    /// Read from the quotient's own structure: the deepest member strictly below `t`.
    /// Lower sets in a tree order are chains, so the fold is well defined.
    fn predecessor_of(&self, t: &TreeNode) -> Option<TreeNode> {
        if !self.contains(t) {
            return None;
        }
        let mut best: Option<&TreeNode> = None;
        for cand in &self.nodes {
            if cand != t && self.le(cand, t) {
                match best {
                    Some(b) if self.le(cand, b) => {}
                    _ => best = Some(cand),
                }
            }
        }
        best.cloned()
    }
}

impl Serialize for QuotientTree {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut st = serializer.serialize_struct("QuotientTree", 2)?;
        st.serialize_field("nodes", &self.nodes)?;
        let meets: Vec<(&TreeNode, &TreeNode, &TreeNode)> = self.meet_table().collect();
        st.serialize_field("meets", &meets)?;
        st.end()
    }
}

/// Quotient by an ideal: nodes outside the ideal plus the root; meets that land in
/// the ideal collapse to the root.
pub fn quotient<T: TreeIndex + ?Sized>(tree: &T, ideal: &Ideal) -> Result<QuotientTree, TreeError> {
    if !is_ideal(tree, ideal.members()) {
        return Err(TreeError::NotAnIdeal);
    }
    let root = TreeNode::root();
    let mut nodes: Vec<TreeNode> = tree
        .nodes()
        .iter()
        .filter(|t| !ideal.contains(t))
        .cloned()
        .collect();
    if !nodes.contains(&root) {
        nodes.push(root.clone());
    }
    Ok(QuotientTree::build(nodes, |x, y| {
        let m = tree.meet_of(x, y).expect("nodes are members");
        if ideal.contains(&m) {
            root.clone()
        } else {
            m
        }
    }))
}

/// Deletes one non-root node; meets through it drop to its predecessor, so the
/// deleted node's children reattach there.
pub fn omit_node<T: TreeIndex + ?Sized>(tree: &T, r: &TreeNode) -> Result<QuotientTree, TreeError> {
    if !tree.contains(r) {
        return Err(TreeError::NodeNotInTree(r.clone()));
    }
    let pred = tree
        .predecessor_of(r)
        .ok_or(TreeError::RootHasNoPredecessor)?;
    let nodes: Vec<TreeNode> = tree.nodes().iter().filter(|t| *t != r).cloned().collect();
    Ok(QuotientTree::build(nodes, |x, y| {
        let m = tree.meet_of(x, y).expect("nodes are members");
        if &m == r {
            pred.clone()
        } else {
            m
        }
    }))
}
