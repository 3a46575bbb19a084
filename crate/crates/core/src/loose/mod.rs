//! Loose trees of models: tree-indexed families whose adjacent members meet in
//! a common strong submodel, with freeness witnesses, explicit prime models,
//! and the transformations (swap, omission, substitution, quotient) that show
//! freeness does not depend on the chosen enumeration.
//!
//! A [`LooseTree`] carries an explicit ambient model: freeness always means
//! freeness *inside* that ambient, checked against the instance's finite
//! fragment. Constructions therefore return "no witness" rather than a
//! refutation when the window is too small.

mod conclusion;
mod pool;
mod quotient_check;
mod transform;
mod witness;

pub use conclusion::{check_conclusion, is_locally_free, ConclusionReport};
pub use pool::{loose_tree_pool, omission_pool, PoolCase};
pub use quotient_check::{quotient_check, QuotientCheckReport};
pub use transform::{
    omission_transform, substitute_prime_node_check, swap_transform, SubstituteReport,
};
pub use witness::{
    check_free_all_enumerations, explicit_prime, find_witness, find_witness_almost_free, is_free,
    isomorphic_over_tree, validate_witness, FreenessReport, WitnessSequence, WitnessValidation,
};

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

use crate::kernel::{ClassInstance, Model};
use crate::tree::{is_ideal, Enumeration, Ideal, Limits, QuotientTree, Tree, TreeIndex, TreeNode};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LooseTreeError {
    #[error("the model at {0} is not a member lying strongly inside the ambient")]
    NotInAmbient(TreeNode),
    #[error("the models at {0} and {1} do not intersect in a member")]
    IntersectionNotMember(TreeNode, TreeNode),
    #[error("the intersection of the models at {0} and {1} is not a strong submodel of both")]
    IntersectionNotSubmodel(TreeNode, TreeNode),
    #[error("sequence does not enumerate this loose tree's nodes")]
    EnumerationMismatch,
    #[error("nodes {0} and {1} are comparable and cannot be swapped")]
    NodesComparable(TreeNode, TreeNode),
    #[error("the fragment holds no prime completion {0}")]
    NoPrimeInFragment(String),
    #[error("precondition failed: {0}")]
    PreconditionFailed(String),
    #[error("transformed output failed validation: {0}")]
    ValidationFailed(String),
    #[error("substitution breaks the intersection condition against node {0}")]
    IntersectionCondition(TreeNode),
    #[error("the loose tree is not free inside its ambient")]
    NotFree,
    #[error("the subset is not an ideal of the index tree")]
    NotAnIdeal,
    #[error("index has {size} nodes, over the bound {bound}")]
    BoundExceeded { size: usize, bound: usize },
}

/// The index shape of a loose tree: either a plain prefix-closed tree or a
/// quotient tree whose meets come from an explicit table. Both expose the same
/// node/meet/predecessor interface, so every operation here works on either.
#[derive(Debug, Clone, PartialEq)]
pub enum IndexTree {
    Plain(Tree),
    Quotient(QuotientTree),
}

impl TreeIndex for IndexTree {
    fn nodes(&self) -> &[TreeNode] {
        match self {
            IndexTree::Plain(t) => t.nodes(),
            IndexTree::Quotient(q) => q.nodes(),
        }
    }

    fn meet_of(&self, s: &TreeNode, t: &TreeNode) -> Option<TreeNode> {
        match self {
            IndexTree::Plain(tr) => tr.meet_of(s, t),
            IndexTree::Quotient(q) => q.meet_of(s, t),
        }
    }

    fn predecessor_of(&self, t: &TreeNode) -> Option<TreeNode> {
        match self {
            IndexTree::Plain(tr) => tr.predecessor_of(t),
            IndexTree::Quotient(q) => q.predecessor_of(t),
        }
    }
}

impl From<Tree> for IndexTree {
    fn from(t: Tree) -> Self {
        IndexTree::Plain(t)
    }
}

impl From<QuotientTree> for IndexTree {
    fn from(q: QuotientTree) -> Self {
        IndexTree::Quotient(q)
    }
}

impl IndexTree {
    /// The index restricted to a nonempty ideal of its nodes.
    pub fn restrict_to_ideal(&self, ideal: &Ideal) -> Result<IndexTree, LooseTreeError> {
        if !is_ideal(self, ideal.members()) {
            return Err(LooseTreeError::NotAnIdeal);
        }
        if ideal.is_empty() {
            return Err(LooseTreeError::PreconditionFailed(
                "cannot restrict to the empty ideal".into(),
            ));
        }
        match self {
            IndexTree::Plain(_) => {
                // An ideal of a prefix-closed set is prefix-closed, and its
                // nodes already sit inside the original bounds.
                let loose_limits = Limits {
                    max_height: 16,
                    max_branching: u32::MAX,
                    max_enum_nodes: 16,
                };
                let t = Tree::new(ideal.members().iter().cloned(), &loose_limits)
                    .expect("ideals of trees are prefix-closed");
                Ok(IndexTree::Plain(t))
            }
            IndexTree::Quotient(q) => {
                let r = q
                    .restriction(ideal.members().iter().cloned())
                    .expect("ideals restrict to sub-semilattices");
                Ok(IndexTree::Quotient(r))
            }
        }
    }
}

/// A family of fragment members indexed by a tree, each strongly inside a
/// common ambient member, such that each model meets its predecessor's model
/// in a common strong submodel.
#[derive(Clone)]
pub struct LooseTree<'a> {
    index: IndexTree,
    assign: BTreeMap<TreeNode, Model>,
    ambient: Model,
    instance: &'a dyn ClassInstance,
}

impl fmt::Debug for LooseTree<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("LooseTree")
            .field("index", &self.index)
            .field("assign", &self.assign)
            .field("ambient", &self.ambient)
            .field("instance", &self.instance.name())
            .finish()
    }
}

impl<'a> LooseTree<'a> {
    /// Validates the defining conditions: the assignment covers exactly the
    /// tree nodes, every assigned model and the ambient are members, every
    /// assigned model sits strongly inside the ambient, and each non-root
    /// node's model intersects its predecessor's model in a common strong
    /// submodel.
    pub fn new(
        index: impl Into<IndexTree>,
        assign: BTreeMap<TreeNode, Model>,
        ambient: Model,
        instance: &'a dyn ClassInstance,
    ) -> Result<Self, LooseTreeError> {
        let index = index.into();
        let nodes = index.nodes();
        if nodes.is_empty() {
            return Err(LooseTreeError::PreconditionFailed(
                "the index tree has no nodes".into(),
            ));
        }
        if assign.len() != nodes.len() || nodes.iter().any(|t| !assign.contains_key(t)) {
            return Err(LooseTreeError::PreconditionFailed(
                "the assignment must cover exactly the tree nodes".into(),
            ));
        }
        if !instance.is_member(&ambient) {
            return Err(LooseTreeError::PreconditionFailed(
                "the ambient model is not a member".into(),
            ));
        }
        for t in nodes {
            let m = &assign[t];
            if !instance.is_member(m) || !instance.is_sub(m, &ambient) {
                return Err(LooseTreeError::NotInAmbient(t.clone()));
            }
            if let Some(s) = index.predecessor_of(t) {
                let ms = &assign[&s];
                match instance.intersect(m, ms) {
                    None => {
                        return Err(LooseTreeError::IntersectionNotMember(t.clone(), s));
                    }
                    Some(b) => {
                        if !instance.is_sub(&b, m) || !instance.is_sub(&b, ms) {
                            return Err(LooseTreeError::IntersectionNotSubmodel(t.clone(), s));
                        }
                    }
                }
            }
        }
        Ok(LooseTree { index, assign, ambient, instance })
    }

    pub fn index(&self) -> &IndexTree {
        &self.index
    }

    pub fn nodes(&self) -> &[TreeNode] {
        self.index.nodes()
    }

    pub fn assign(&self) -> &BTreeMap<TreeNode, Model> {
        &self.assign
    }

    /// The model at a node. Panics on foreign nodes; the assignment is total.
    pub fn model_at(&self, t: &TreeNode) -> &Model {
        &self.assign[t]
    }

    pub fn ambient(&self) -> &Model {
        &self.ambient
    }

    pub fn instance(&self) -> &'a dyn ClassInstance {
        self.instance
    }

    /// The base of the step at a non-root node: the intersection of its model
    /// with its predecessor's model, canonicalized into the fragment. `None`
    /// on the root.
    pub fn base_at(&self, t: &TreeNode) -> Option<Model> {
        let s = self.index.predecessor_of(t)?;
        let b = self
            .instance
            .intersect(&self.assign[t], &self.assign[&s])
            .expect("validated loose tree has member intersections");
        Some(canonical_member(self.instance, b))
    }

    /// The nodes listed in ascending order — always a valid enumeration, since
    /// predecessors sort before their successors.
    pub fn default_enumeration(&self) -> Enumeration {
        Enumeration::new(&self.index, self.index.nodes().to_vec())
            .expect("sorted nodes enumerate the index")
    }

    /// The loose tree restricted to a nonempty ideal of its index.
    pub fn restrict(&self, ideal: &Ideal) -> Result<LooseTree<'a>, LooseTreeError> {
        let sub = self.index.restrict_to_ideal(ideal)?;
        let assign: BTreeMap<TreeNode, Model> = self
            .assign
            .iter()
            .filter(|(t, _)| ideal.contains(t))
            .map(|(t, m)| (t.clone(), m.clone()))
            .collect();
        LooseTree::new(sub, assign, self.ambient.clone(), self.instance)
    }
}

/// The structurally equal fragment member when one exists, else the model
/// itself. Keeps ids stable across operations that synthesize models.
pub(crate) fn canonical_member(inst: &dyn ClassInstance, m: Model) -> Model {
    match inst.find_in_fragment(&m) {
        Some(i) => inst.fragment()[i].clone(),
        None => m,
    }
}
