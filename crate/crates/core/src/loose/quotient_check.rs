//! The quotient construction on loose trees: collapse an ideal to a single
//! root carrying an explicit prime completion of the restriction, then check
//! that the collapsed tree is free and that the restricted witness extends to
//! a witness for the whole tree.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::kernel::Model;
use crate::tree::{is_ideal, quotient, Enumeration, Ideal, TreeNode};

use super::witness::{check_free_all_enumerations, find_witness, greedy_extend, validate_basic};
use super::{IndexTree, LooseTree, LooseTreeError};

/// Outcome of the quotient check on a free loose tree and an ideal.
#[derive(Clone, Debug, Serialize)]
pub struct QuotientCheckReport {
    /// The collapsed ideal, as node keys.
    pub ideal: Vec<String>,
    /// Id of the explicit prime completion of the restriction to the ideal.
    pub prime: String,
    /// Whether the quotient loose tree is free under every enumeration.
    pub quotient_free: bool,
    /// Whether the quotient's per-enumeration verdicts agree.
    pub quotient_agrees: bool,
    /// Number of quotient enumerations checked.
    pub enumerations_checked: usize,
    /// Whether the restriction's witness extends to one for the whole tree.
    pub extension_ok: bool,
}

/// Collapses a nonempty ideal of a free loose tree to a root node carrying an
/// explicit prime completion of the restriction, and reports (a) freeness of
/// the collapsed tree and (b) extendability of the restricted witness to the
/// whole tree.
pub fn quotient_check(
    lt: &LooseTree<'_>,
    ideal: &Ideal,
    bound: usize,
) -> Result<QuotientCheckReport, LooseTreeError> {
    if !is_ideal(lt.index(), ideal.members()) {
        return Err(LooseTreeError::NotAnIdeal);
    }
    if ideal.is_empty() {
        return Err(LooseTreeError::PreconditionFailed(
            "the quotient check needs a nonempty ideal".into(),
        ));
    }
    let inst = lt.instance();
    if find_witness(lt, &lt.default_enumeration()).is_none() {
        return Err(LooseTreeError::NotFree);
    }

    let restricted = lt.restrict(ideal)?;
    let w_restricted = find_witness(&restricted, &restricted.default_enumeration())
        .ok_or(LooseTreeError::NotFree)?;
    let prime = w_restricted.last().clone();

    // The collapsed index: ideal nodes fold into the root, which now carries
    // the prime completion; all other nodes keep their models.
    let q = quotient(lt.index(), ideal).expect("checked ideal");
    let mut assign: BTreeMap<TreeNode, Model> = lt
        .assign()
        .iter()
        .filter(|(t, _)| !ideal.contains(t))
        .map(|(t, m)| (t.clone(), m.clone()))
        .collect();
    assign.insert(TreeNode::root(), prime.clone());
    let collapsed = LooseTree::new(IndexTree::Quotient(q), assign, lt.ambient().clone(), inst)
        .map_err(|e| LooseTreeError::ValidationFailed(format!("collapsed tree: {e}")))?;

    let freeness = check_free_all_enumerations(&collapsed, bound)?;

    // Extension: enumerate the ideal first (in the restriction's order), then
    // the remaining nodes, and continue the restricted witness greedily.
    let mut full_order: Vec<TreeNode> = w_restricted.enumeration().order().to_vec();
    full_order.extend(lt.nodes().iter().filter(|t| !ideal.contains(t)).cloned());
    let full = Enumeration::new(lt.index(), full_order)
        .expect("ideal-first listings respect predecessors");
    let extension_ok = match greedy_extend(lt, &full, w_restricted.models()) {
        Some(w_full) => validate_basic(lt, &w_full),
        None => false,
    };

    Ok(QuotientCheckReport {
        ideal: ideal.members().iter().map(TreeNode::key).collect(),
        prime: inst.id_in_fragment(&prime),
        quotient_free: freeness.all_free(),
        quotient_agrees: freeness.agrees(),
        enumerations_checked: freeness.enumerations,
        extension_ok,
    })
}
