//! Enumerations of a tree: listings of all nodes in which every node appears after
//! its proper prefixes. Two enumerations are close neighbors when they differ by one
//! adjacent transposition; every pair is connected by such moves, and the greedy
//! bubbling path realized here has length equal to the pair's inversion count.

use super::{TreeError, TreeIndex, TreeNode};
use serde::Serialize;

/// An order-compatible listing of all nodes of one tree.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(transparent)]
pub struct Enumeration {
    order: Vec<TreeNode>,
}

impl Enumeration {
    /// Validates that `order` lists exactly the nodes of `tree`, each after all of
    /// its proper prefixes.
    pub fn new<T: TreeIndex + ?Sized>(tree: &T, order: Vec<TreeNode>) -> Result<Self, TreeError> {
        let mut sorted = order.clone();
        sorted.sort();
        sorted.dedup();
        if sorted != tree.nodes() {
            return Err(TreeError::NotAnEnumeration);
        }
        if !order_compatible(&order) {
            return Err(TreeError::NotAnEnumeration);
        }
        Ok(Enumeration { order })
    }

    pub(crate) fn from_checked(order: Vec<TreeNode>) -> Self {
        debug_assert!(order_compatible(&order));
        Enumeration { order }
    }

    pub fn order(&self) -> &[TreeNode] {
        &self.order
    }

    pub fn len(&self) -> usize {
        self.order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }

    pub fn position(&self, t: &TreeNode) -> Option<usize> {
        self.order.iter().position(|n| n == t)
    }
}

pub fn is_enumeration<T: TreeIndex + ?Sized>(tree: &T, order: &[TreeNode]) -> bool {
    Enumeration::new(tree, order.to_vec()).is_ok()
}

/// Order compatibility is intrinsic: in both plain and quotient trees the node order
/// is the prefix order on the stored paths.
fn order_compatible(order: &[TreeNode]) -> bool {
    (0..order.len()).all(|j| {
        (j + 1..order.len()).all(|i| !order[i].is_proper_prefix_of(&order[j]))
    })
}

/// Every enumeration of `tree`, in lexicographic order of node-index sequences.
/// Errors with `BoundExceeded` when the tree has more than `bound` nodes.
pub fn all_enumerations<T: TreeIndex + ?Sized>(
    tree: &T,
    bound: usize,
) -> Result<Vec<Enumeration>, TreeError> {
    let nodes = tree.nodes();
    if nodes.len() > bound {
        return Err(TreeError::BoundExceeded {
            size: nodes.len(),
            bound,
        });
    }
    let parent: Vec<Option<usize>> = nodes
        .iter()
        .map(|n| {
            tree.predecessor_of(n)
                .map(|p| nodes.binary_search(&p).expect("predecessor is a member"))
        })
        .collect();
    let mut out = Vec::new();
    let mut placed = vec![false; nodes.len()];
    let mut seq = Vec::with_capacity(nodes.len());
    extend_all(nodes, &parent, &mut placed, &mut seq, &mut out);
    Ok(out)
}

fn extend_all(
    nodes: &[TreeNode],
    parent: &[Option<usize>],
    placed: &mut Vec<bool>,
    seq: &mut Vec<usize>,
    out: &mut Vec<Enumeration>,
) {
    if seq.len() == nodes.len() {
        out.push(Enumeration::from_checked(
            seq.iter().map(|&i| nodes[i].clone()).collect(),
        ));
        return;
    }
    // Ascending candidate order yields lexicographic output order.
    for i in 0..nodes.len() {
        if !placed[i] && parent[i].map_or(true, |p| placed[p]) {
            placed[i] = true;
            seq.push(i);
            extend_all(nodes, parent, placed, seq, out);
            seq.pop();
            placed[i] = false;
        }
    }
}

/// `Some(i)` when the two enumerations differ exactly by swapping positions `i` and
/// `i + 1`; `None` when they are equal or further apart.
pub fn close_neighbor(e1: &Enumeration, e2: &Enumeration) -> Result<Option<usize>, TreeError> {
    check_same_nodes(e1, e2)?;
    let diffs: Vec<usize> = (0..e1.len())
        .filter(|&i| e1.order[i] != e2.order[i])
        .collect();
    match diffs.as_slice() {
        [i, j]
            if *j == *i + 1
                && e1.order[*i] == e2.order[*j]
                && e1.order[*j] == e2.order[*i] =>
        {
            Ok(Some(*i))
        }
        _ => Ok(None),
    }
}

/// Swap positions transforming `e1` into `e2` through valid enumerations: repeatedly
/// extend the agreeing prefix by bubbling the next required node leftward. Each swap
/// moves an incomparable pair, so the path length is the inversion count of the pair.
pub fn neighbor_path(e1: &Enumeration, e2: &Enumeration) -> Result<Vec<usize>, TreeError> {
    check_same_nodes(e1, e2)?;
    let mut cur = e1.order.clone();
    let target = &e2.order;
    let mut path = Vec::new();
    for k in 0..cur.len() {
        if cur[k] == target[k] {
            continue;
        }
        let l = k + cur[k..]
            .iter()
            .position(|x| x == &target[k])
            .expect("same node sets");
        for j in ((k + 1)..=l).rev() {
            cur.swap(j - 1, j);
            debug_assert!(order_compatible(&cur));
            path.push(j - 1);
        }
    }
    debug_assert_eq!(&cur, target);
    Ok(path)
}

fn check_same_nodes(e1: &Enumeration, e2: &Enumeration) -> Result<(), TreeError> {
    let mut a = e1.order.clone();
    let mut b = e2.order.clone();
    a.sort();
    b.sort();
    if a != b {
        return Err(TreeError::DifferentTrees);
    }
    Ok(())
}
