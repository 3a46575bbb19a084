//! Witness and loose-tree transformations: adjacent-transposition rewrites of a
//! witness, omission of a node absorbed by its predecessor, and substitution of
//! a node's model — each post-validated, never trusted blindly.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::kernel::Model;
use crate::tree::{neighbor_path, omit_node, Enumeration, TreeIndex, TreeNode};

use super::witness::{
    check_free_all_enumerations, find_witness, prime_step, validate_basic_detail, FreenessReport,
    WitnessSequence,
};
use super::{LooseTree, LooseTreeError};

/// Requires the witness to satisfy the basic conditions before transforming it.
fn require_valid(lt: &LooseTree<'_>, w: &WitnessSequence) -> Result<(), LooseTreeError> {
    match validate_basic_detail(lt, w)? {
        None => Ok(()),
        Some(reason) => Err(LooseTreeError::PreconditionFailed(format!(
            "input witness is not valid: {reason}"
        ))),
    }
}

/// Rewrites a witness for the enumeration with positions `i` and `i+1`
/// transposed. The nodes at those positions must be incomparable; entries
/// before `i` and after `i` are kept, and the entry at `i` becomes a prime
/// completion, inside the old entry at `i+1`, of the incoming node's step.
pub fn swap_transform(
    lt: &LooseTree<'_>,
    w: &WitnessSequence,
    i: usize,
) -> Result<WitnessSequence, LooseTreeError> {
    require_valid(lt, w)?;
    let e = w.enumeration();
    if i + 1 >= e.len() {
        return Err(LooseTreeError::PreconditionFailed(format!(
            "positions {i} and {} do not both exist",
            i + 1
        )));
    }
    let a = e.order()[i].clone();
    let b = e.order()[i + 1].clone();
    let meet = lt.index().meet_of(&a, &b);
    if meet.as_ref() == Some(&a) || meet.as_ref() == Some(&b) {
        return Err(LooseTreeError::NodesComparable(a, b));
    }

    let mut order = e.order().to_vec();
    order.swap(i, i + 1);
    let swapped = Enumeration::new(lt.index(), order)
        .expect("transposing adjacent incomparable nodes keeps the order valid");

    // Incomparable nodes are never first: position 0 holds the root, which is
    // below everything. So i >= 1 here and the previous entry exists.
    let base = lt.base_at(&b).expect("b is not the root");
    let inside = &w.models()[i + 1];
    let fresh = prime_step(
        lt.instance(),
        &base,
        lt.model_at(&b),
        &w.models()[i - 1],
        inside,
        &format!("for node {b} inside witness entry {}", i + 1),
    )?;

    let mut models = w.models().to_vec();
    models[i] = fresh;
    let out = WitnessSequence::new(swapped, models);
    match validate_basic_detail(lt, &out)? {
        None => Ok(out),
        Some(reason) => Err(LooseTreeError::ValidationFailed(reason)),
    }
}

/// Omits a node `r` whose model extends its predecessor's model: the node is
/// deleted from the index (children reattach to the predecessor `s`), `s` takes
/// over the model of `r`, and the witness drops the entry at `s`'s position.
///
/// The witness is first rewritten, by adjacent transpositions, to an
/// enumeration listing `r` immediately after `s`.
pub fn omission_transform<'a>(
    lt: &LooseTree<'a>,
    w: &WitnessSequence,
    r: &TreeNode,
) -> Result<(LooseTree<'a>, WitnessSequence), LooseTreeError> {
    require_valid(lt, w)?;
    let inst = lt.instance();
    let Some(s) = lt.index().predecessor_of(r) else {
        return Err(LooseTreeError::PreconditionFailed(format!(
            "{r} has no predecessor to absorb it"
        )));
    };
    if !inst.is_sub(lt.model_at(&s), lt.model_at(r)) {
        return Err(LooseTreeError::PreconditionFailed(format!(
            "the model at {s} is not strongly inside the model at {r}"
        )));
    }

    // Align the witness so that r directly follows s.
    let mut w = w.clone();
    let j = w.enumeration().position(&s).expect("s is a node");
    if w.enumeration().order()[j + 1] != *r {
        let mut target: Vec<TreeNode> =
            w.enumeration().order().iter().filter(|t| *t != r).cloned().collect();
        target.insert(j + 1, r.clone());
        let target = Enumeration::new(lt.index(), target)
            .expect("moving r up to its predecessor keeps the order valid");
        for k in neighbor_path(w.enumeration(), &target)
            .expect("same nodes by construction")
        {
            w = swap_transform(lt, &w, k)?;
        }
    }
    debug_assert_eq!(w.enumeration().order()[j], s);
    debug_assert_eq!(&w.enumeration().order()[j + 1], r);

    let index = omit_node(lt.index(), r).expect("r is a non-root node");
    let mut assign: BTreeMap<TreeNode, Model> = lt
        .assign()
        .iter()
        .filter(|(t, _)| *t != r)
        .map(|(t, m)| (t.clone(), m.clone()))
        .collect();
    assign.insert(s.clone(), lt.model_at(r).clone());
    let shrunk = LooseTree::new(index, assign, lt.ambient().clone(), inst)
        .map_err(|e| LooseTreeError::ValidationFailed(format!("omitted tree: {e}")))?;

    let order: Vec<TreeNode> =
        w.enumeration().order().iter().filter(|t| *t != r).cloned().collect();
    let order = Enumeration::new(shrunk.index(), order)
        .expect("deleting r keeps the order valid on the omitted index");
    let mut models = w.models().to_vec();
    models.remove(j);
    let out = WitnessSequence::new(order, models);
    match validate_basic_detail(&shrunk, &out)? {
        None => Ok((shrunk, out)),
        Some(reason) => Err(LooseTreeError::ValidationFailed(reason)),
    }
}

impl<'a> LooseTree<'a> {
    /// The same loose tree with the model at `s` replaced by `n`, revalidated.
    /// A broken intersection against a neighbor of `s` reports that neighbor.
    pub fn substitute(&self, s: &TreeNode, n: Model) -> Result<LooseTree<'a>, LooseTreeError> {
        if !self.index().contains(s) {
            return Err(LooseTreeError::PreconditionFailed(format!("{s} is not a node")));
        }
        let mut assign = self.assign().clone();
        assign.insert(s.clone(), n);
        LooseTree::new(self.index().clone(), assign, self.ambient().clone(), self.instance())
            .map_err(|e| match e {
                LooseTreeError::IntersectionNotMember(t, u)
                | LooseTreeError::IntersectionNotSubmodel(t, u) => {
                    LooseTreeError::IntersectionCondition(if t == *s { u } else { t })
                }
                other => other,
            })
    }
}

/// Outcome of replacing a node's model by a prime completion of its step.
#[derive(Clone, Debug, Serialize)]
pub struct SubstituteReport {
    /// The node whose model was replaced.
    pub node: String,
    /// Id of the prime completion substituted there.
    pub substituted: String,
    /// Freeness of the substituted loose tree across all enumerations.
    pub freeness: FreenessReport,
}

/// Replaces the model at a non-root node `v` by a prime completion of `M_v`
/// with its predecessor's model over their intersection, then checks that the
/// substituted loose tree stays free under every enumeration.
///
/// The input must itself be free (under its default enumeration).
pub fn substitute_prime_node_check(
    lt: &LooseTree<'_>,
    v: &TreeNode,
    bound: usize,
) -> Result<SubstituteReport, LooseTreeError> {
    if find_witness(lt, &lt.default_enumeration()).is_none() {
        return Err(LooseTreeError::NotFree);
    }
    let Some(s) = lt.index().predecessor_of(v) else {
        return Err(LooseTreeError::PreconditionFailed(format!(
            "{v} has no predecessor to amalgamate with"
        )));
    };
    let base = lt.base_at(v).expect("v is not the root");
    let n = prime_step(
        lt.instance(),
        &base,
        lt.model_at(v),
        lt.model_at(&s),
        lt.ambient(),
        &format!("for node {v} joined with its predecessor {s}"),
    )?;
    let substituted = lt.substitute(v, n.clone())?;
    let freeness = check_free_all_enumerations(&substituted, bound)?;
    Ok(SubstituteReport {
        node: v.key(),
        substituted: lt.instance().id_in_fragment(&n),
        freeness,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::{AtomMap, ClassInstance};
    use crate::loose::tests::{clashing_tree, free_tree, loose, member, node, sets4};
    use crate::loose::witness::validate_witness;
    use crate::tree::Limits;

    #[test]
    fn swap_rebuilds_the_middle_entry() {
        let inst = sets4();
        let lt = loose(&inst, &[&[], &[0], &[1]], &[&[], &["a"], &["b"]], &["a", "b"]);
        let w = find_witness(&lt, &lt.default_enumeration()).unwrap();
        let swapped = swap_transform(&lt, &w, 1).unwrap();
        assert_eq!(
            swapped.enumeration().order(),
            &[node(&[]), node(&[1]), node(&[0])]
        );
        assert_eq!(swapped.models()[1], member(&inst, &["b"]));
        assert_eq!(swapped.models()[2], member(&inst, &["a", "b"]));
        assert!(validate_witness(&lt, &swapped).unwrap().basic);
    }

    #[test]
    fn swapping_twice_restores_a_witness_for_the_original_enumeration() {
        let inst = sets4();
        let lt = free_tree(&inst);
        let w = find_witness(&lt, &lt.default_enumeration()).unwrap();
        let once = swap_transform(&lt, &w, 1).unwrap();
        let twice = swap_transform(&lt, &once, 1).unwrap();
        assert_eq!(twice.enumeration().order(), w.enumeration().order());
        assert!(validate_witness(&lt, &twice).unwrap().basic);
    }

    #[test]
    fn comparable_positions_cannot_swap() {
        let inst = sets4();
        let lt = loose(&inst, &[&[], &[0], &[0, 0]], &[&[], &["a"], &["a", "b"]], &["a", "b"]);
        let w = find_witness(&lt, &lt.default_enumeration()).unwrap();
        assert_eq!(
            swap_transform(&lt, &w, 1).unwrap_err(),
            LooseTreeError::NodesComparable(node(&[0]), node(&[0, 0]))
        );
        assert!(matches!(
            swap_transform(&lt, &w, 2).unwrap_err(),
            LooseTreeError::PreconditionFailed(_)
        ));
    }

    #[test]
    fn omitting_a_chain_leaf_absorbs_its_model() {
        let inst = sets4();
        let lt = loose(&inst, &[&[], &[0], &[0, 0]], &[&[], &["a"], &["a", "b"]], &["a", "b"]);
        let w = find_witness(&lt, &lt.default_enumeration()).unwrap();
        let (shrunk, w2) = omission_transform(&lt, &w, &node(&[0, 0])).unwrap();
        assert_eq!(shrunk.nodes(), &[node(&[]), node(&[0])]);
        assert_eq!(shrunk.model_at(&node(&[0])), &member(&inst, &["a", "b"]));
        assert_eq!(w2.models(), &[member(&inst, &[]), member(&inst, &["a", "b"])]);
        assert!(validate_witness(&shrunk, &w2).unwrap().basic);
    }

    #[test]
    fn omission_realigns_the_enumeration_first() {
        let inst = sets4();
        let lt = loose(
            &inst,
            &[&[], &[0], &[0, 0], &[1]],
            &[&[], &["a"], &["a", "b"], &["c"]],
            &["a", "b", "c"],
        );
        // Enumeration putting [1] between [0] and [0,0]: omitting [0,0] must
        // first bubble it back next to its predecessor.
        let e = Enumeration::new(
            lt.index(),
            vec![node(&[]), node(&[0]), node(&[1]), node(&[0, 0])],
        )
        .unwrap();
        let w = find_witness(&lt, &e).unwrap();
        let (shrunk, w2) = omission_transform(&lt, &w, &node(&[0, 0])).unwrap();
        assert_eq!(shrunk.nodes(), &[node(&[]), node(&[0]), node(&[1])]);
        assert_eq!(shrunk.model_at(&node(&[0])), &member(&inst, &["a", "b"]));
        assert_eq!(
            w2.enumeration().order(),
            &[node(&[]), node(&[0]), node(&[1])]
        );
        assert!(validate_witness(&shrunk, &w2).unwrap().basic);
    }

    #[test]
    fn omitting_the_root_is_rejected() {
        let inst = sets4();
        let lt = loose(&inst, &[&[], &[0]], &[&[], &["a"]], &["a"]);
        let w = find_witness(&lt, &lt.default_enumeration()).unwrap();
        assert!(matches!(
            omission_transform(&lt, &w, &node(&[])),
            Err(LooseTreeError::PreconditionFailed(_))
        ));
    }

    #[test]
    fn omission_requires_the_predecessor_model_inside() {
        let inst = sets4();
        // Free tree, but the root's model {a} does not sit inside the leaf's
        // model {b}, so the leaf cannot absorb it.
        let lt = loose(&inst, &[&[], &[0]], &[&["a"], &["b"]], &["a", "b"]);
        let w = find_witness(&lt, &lt.default_enumeration()).unwrap();
        assert!(matches!(
            omission_transform(&lt, &w, &node(&[0])),
            Err(LooseTreeError::PreconditionFailed(_))
        ));
    }

    #[test]
    fn substituting_the_same_model_is_identity() {
        let inst = sets4();
        let lt = free_tree(&inst);
        let same = lt.substitute(&node(&[1]), member(&inst, &["b"])).unwrap();
        assert_eq!(same.assign(), lt.assign());
    }

    #[test]
    fn substituting_a_larger_member_revalidates() {
        let inst = sets4();
        let lt = loose(&inst, &[&[], &[0]], &[&[], &["a"]], &["a", "b", "d"]);
        let bigger = lt.substitute(&node(&[0]), member(&inst, &["a", "d"])).unwrap();
        assert_eq!(bigger.model_at(&node(&[0])), &member(&inst, &["a", "d"]));
        let outside = lt.substitute(&node(&[0]), member(&inst, &["c"]));
        assert_eq!(outside.unwrap_err(), LooseTreeError::NotInAmbient(node(&[0])));
    }

    /// Sets over {a,b,c,d} with the singleton {c} removed from the class:
    /// intersections can land outside membership, breaking substitution.
    struct HoleySets {
        frag: Vec<Model>,
    }

    impl HoleySets {
        fn new() -> Self {
            let letters = ["a", "b", "c", "d"];
            let mut frag: Vec<Model> = (0u8..16)
                .map(|mask| {
                    let atoms: Vec<&str> = letters
                        .iter()
                        .enumerate()
                        .filter(|(i, _)| mask >> i & 1 == 1)
                        .map(|(_, l)| *l)
                        .collect();
                    Model::of_atoms("tmp", atoms)
                })
                .filter(|m| m != &Model::of_atoms("c", ["c"]))
                .collect();
            frag.sort();
            let frag =
                frag.into_iter().enumerate().map(|(i, m)| m.with_id(format!("m{i}"))).collect();
            HoleySets { frag }
        }
    }

    impl ClassInstance for HoleySets {
        fn name(&self) -> &str {
            "holey_sets"
        }

        fn fragment(&self) -> &[Model] {
            &self.frag
        }

        fn is_member(&self, m: &Model) -> bool {
            self.find_in_fragment(m).is_some()
        }

        fn is_sub(&self, m: &Model, n: &Model) -> bool {
            self.is_member(m) && self.is_member(n) && m.is_carrier_subset(n)
        }

        fn nf(&self, m0: &Model, m1: &Model, m2: &Model, m3: &Model) -> bool {
            self.is_sub(m0, m1)
                && self.is_sub(m0, m2)
                && self.is_sub(m1, m3)
                && self.is_sub(m2, m3)
                && m1.carrier_intersection(m2) == *m0.carrier()
        }

        fn prime_over_vee(
            &self,
            m0: &Model,
            m1: &Model,
            m2: &Model,
            ambient: &Model,
        ) -> Option<Model> {
            if !self.nf(m0, m1, m2, ambient) {
                return None;
            }
            let union = Model::new(
                format!("{}+{}", m1.id(), m2.id()),
                m1.carrier_union(m2),
                crate::kernel::Content::None,
            );
            self.is_member(&union).then_some(union)
        }

        fn is_iso_onto_image(&self, _m: &Model, _n: &Model, _map: &AtomMap) -> bool {
            true
        }
    }

    #[test]
    fn substitution_reports_the_neighbor_with_the_broken_intersection() {
        let inst = HoleySets::new();
        let get = |atoms: &[&str]| member(&inst, atoms);
        let assign: BTreeMap<TreeNode, Model> = [
            (node(&[]), get(&[])),
            (node(&[0]), get(&["a", "c"])),
            (node(&[0, 0]), get(&["a", "c", "d"])),
        ]
        .into();
        let lt = LooseTree::new(
            crate::loose::tests::plain(&[&[], &[0], &[0, 0]]),
            assign,
            get(&["a", "b", "c", "d"]),
            &inst,
        )
        .unwrap();
        // {b,c} meets the child {a,c,d} in {c}, which is not a member.
        let err = lt.substitute(&node(&[0]), get(&["b", "c"])).unwrap_err();
        assert_eq!(err, LooseTreeError::IntersectionCondition(node(&[0, 0])));
    }

    #[test]
    fn prime_substitution_keeps_the_tree_free() {
        let inst = sets4();
        let lt = loose(&inst, &[&[], &[0], &[1]], &[&["a"], &["a", "b"], &["a", "c"]], &["a", "b", "c"]);
        let report = substitute_prime_node_check(&lt, &node(&[0]), Limits::default().max_enum_nodes)
            .unwrap();
        // Prime over M_[0] and its predecessor {a}: M_[0] itself.
        assert_eq!(report.node, "[0]");
        assert!(report.freeness.all_free());
        assert_eq!(report.freeness.enumerations, 2);
    }

    #[test]
    fn prime_substitution_requires_freeness() {
        let inst = sets4();
        let lt = clashing_tree(&inst);
        assert_eq!(
            substitute_prime_node_check(&lt, &node(&[1, 0]), 8).unwrap_err(),
            LooseTreeError::NotFree
        );
    }
}
