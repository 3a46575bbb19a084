//! Local freeness and the end-to-end conclusion check: a free loose tree is
//! free under every enumeration, and its explicit prime completion passes the
//! bounded compatibility-primality test over the diagrams the tree induces.

use serde::Serialize;

use crate::kernel::{
    is_compatibility_prime, AxiomEntry, Diagram, DiagramEmbedding, KernelError, Model,
};
use crate::tree::{all_ideals, TreeIndex};

use super::witness::{check_free_all_enumerations, find_witness, FreenessReport};
use super::{LooseTree, LooseTreeError};

/// Node-count cap on the exhaustive ideal sweep.
const LOCAL_CAP: usize = 6;

/// Whether every restriction of the loose tree to a nonempty ideal is free.
///
/// One enumeration per restriction suffices: freeness is
/// enumeration-independent.
pub fn is_locally_free(lt: &LooseTree<'_>) -> Result<bool, LooseTreeError> {
    let size = lt.nodes().len();
    if size > LOCAL_CAP {
        return Err(LooseTreeError::BoundExceeded { size, bound: LOCAL_CAP });
    }
    for ideal in all_ideals(lt.index()) {
        if ideal.is_empty() {
            continue;
        }
        let sub = lt.restrict(&ideal)?;
        if find_witness(&sub, &sub.default_enumeration()).is_none() {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Outcome of the conclusion check.
#[derive(Clone, Debug, Serialize)]
pub struct ConclusionReport {
    /// Per-enumeration freeness verdicts.
    pub freeness: FreenessReport,
    /// True when the tree is not free, making the primality claims vacuous.
    pub vacuous: bool,
    /// Id of the explicit prime completion, when free.
    pub prime: Option<String>,
    /// Compatibility-primality verdicts for the prime over the witness chain
    /// and over the tree's own diagram.
    pub entries: Vec<AxiomEntry>,
    pub note: String,
}

impl ConclusionReport {
    /// No FAIL anywhere and, when free, no failed primality entry.
    pub fn holds(&self) -> bool {
        self.freeness.agrees()
            && self
                .entries
                .iter()
                .all(|e| e.verdict != crate::kernel::Verdict::Fail)
    }
}

/// The end-to-end check: freeness under every enumeration, and bounded
/// compatibility primality of the explicit prime over (a) the witness chain and
/// (b) the tree's induced diagram when the assignment realizes it concretely.
pub fn check_conclusion(
    lt: &LooseTree<'_>,
    bound: usize,
) -> Result<ConclusionReport, LooseTreeError> {
    let freeness = check_free_all_enumerations(lt, bound)?;
    if !freeness.all_free() {
        let note = if freeness.agrees() {
            "not free; conclusion vacuous".to_string()
        } else {
            "enumeration verdicts disagree; the instance violates enumeration invariance"
                .to_string()
        };
        return Ok(ConclusionReport { freeness, vacuous: true, prime: None, entries: vec![], note });
    }

    let inst = lt.instance();
    let w = find_witness(lt, &lt.default_enumeration()).expect("free under all enumerations");
    let prime = w.last().clone();
    let mut entries = Vec::new();

    let chain = Diagram::chain(w.models().to_vec());
    entries.push(primality_entry(lt, &chain, &prime, "prime_over_witness_chain"));

    match tree_diagram(lt) {
        Some(d) if d.is_concrete(inst) => {
            entries.push(primality_entry(lt, &d, &prime, "prime_over_tree_diagram"));
        }
        _ => entries.push(AxiomEntry::inconclusive(
            "prime_over_tree_diagram",
            "the assignment does not realize the index as a concrete diagram; skipped",
        )),
    }

    Ok(ConclusionReport {
        note: format!(
            "free under all {} enumerations; explicit prime {} checked",
            freeness.enumerations,
            inst.id_in_fragment(&prime)
        ),
        freeness,
        vacuous: false,
        prime: Some(inst.id_in_fragment(&prime)),
        entries,
    })
}

fn primality_entry(
    lt: &LooseTree<'_>,
    diagram: &Diagram,
    prime: &Model,
    id: &str,
) -> AxiomEntry {
    match is_compatibility_prime(
        lt.instance(),
        diagram,
        prime,
        &DiagramEmbedding::identity(diagram),
    ) {
        Ok(mut entry) => {
            entry.axiom = id.to_string();
            entry
        }
        Err(KernelError::InvalidEmbedding) => AxiomEntry::inconclusive(
            id,
            "the diagram does not sit identically inside the prime; skipped",
        ),
        Err(other) => AxiomEntry::inconclusive(id, format!("primality not evaluated: {other}")),
    }
}

/// The diagram the assignment induces on the index: order = tree order realized
/// by literal strong inclusion, meets = models at the index meets. `None` when
/// the parts do not form a diagram (some meet model is not literally below its
/// pair).
fn tree_diagram(lt: &LooseTree<'_>) -> Option<Diagram> {
    let inst = lt.instance();
    let nodes = lt.nodes();
    let models: Vec<Model> = nodes.iter().map(|t| lt.model_at(t).clone()).collect();
    let mut le = vec![vec![false; nodes.len()]; nodes.len()];
    let mut meet = vec![vec![0usize; nodes.len()]; nodes.len()];
    for (i, x) in nodes.iter().enumerate() {
        for (j, y) in nodes.iter().enumerate() {
            let m = lt.index().meet_of(x, y)?;
            le[i][j] = i == j || (m == *x && inst.is_sub(&models[i], &models[j]));
            meet[i][j] = nodes.iter().position(|t| *t == m).expect("meets are nodes");
        }
    }
    Diagram::new(models, le, meet).ok()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::{ClassInstance, Verdict};
    use crate::loose::tests::{clashing_tree, free_tree, loose, member, node, sets4};
    use crate::loose::LooseTreeError;
    use crate::tree::{Limits, Tree, TreeNode};
    use std::collections::BTreeMap;

    #[test]
    fn free_trees_are_locally_free() {
        let inst = sets4();
        assert!(is_locally_free(&free_tree(&inst)).unwrap());
        let single = loose(&inst, &[&[]], &[&["a"]], &["a"]);
        assert!(is_locally_free(&single).unwrap());
    }

    #[test]
    fn the_clashing_tree_is_not_locally_free() {
        let inst = sets4();
        assert!(!is_locally_free(&clashing_tree(&inst)).unwrap());
    }

    #[test]
    fn local_freeness_is_bounded() {
        let inst = sets4();
        let wide = Limits { max_height: 16, max_branching: 16, max_enum_nodes: 16 };
        let paths: Vec<TreeNode> =
            std::iter::once(TreeNode::root()).chain((0..6).map(|i| node(&[i]))).collect();
        let tree = Tree::new(paths.clone(), &wide).unwrap();
        let assign: BTreeMap<TreeNode, _> =
            paths.into_iter().map(|p| (p, member(&inst, &[]))).collect();
        let lt = crate::loose::LooseTree::new(tree, assign, member(&inst, &[]), &inst).unwrap();
        assert_eq!(
            is_locally_free(&lt).unwrap_err(),
            LooseTreeError::BoundExceeded { size: 7, bound: 6 }
        );
    }

    #[test]
    fn conclusion_on_the_free_tree_passes_both_primality_checks() {
        let inst = sets4();
        let lt = free_tree(&inst);
        let report = check_conclusion(&lt, Limits::default().max_enum_nodes).unwrap();
        assert!(!report.vacuous);
        assert!(report.freeness.all_free());
        assert_eq!(report.freeness.enumerations, 8);
        assert_eq!(
            report.prime.as_deref(),
            Some(inst.id_in_fragment(&member(&inst, &["a", "b", "c", "d"])).as_str())
        );
        assert_eq!(report.entries.len(), 2);
        assert_eq!(report.entries[0].axiom, "prime_over_witness_chain");
        assert_eq!(report.entries[0].verdict, Verdict::Pass);
        assert_eq!(report.entries[1].axiom, "prime_over_tree_diagram");
        assert_eq!(report.entries[1].verdict, Verdict::Pass);
        assert!(report.holds());
    }

    #[test]
    fn conclusion_on_the_clashing_tree_is_vacuous() {
        let inst = sets4();
        let report = check_conclusion(&clashing_tree(&inst), 8).unwrap();
        assert!(report.vacuous);
        assert!(report.prime.is_none());
        assert!(report.entries.is_empty());
        assert_eq!(report.note, "not free; conclusion vacuous");
        assert!(report.holds());
    }

    #[test]
    fn non_monotone_assignments_skip_the_tree_diagram() {
        let inst = sets4();
        // The root model {a} is not a strong submodel of the child model {b}:
        // the tree order is not realized by inclusion, so only the witness
        // chain is checked.
        let lt = loose(&inst, &[&[], &[0]], &[&["a"], &["b"]], &["a", "b"]);
        let report = check_conclusion(&lt, 8).unwrap();
        assert!(!report.vacuous);
        assert_eq!(report.entries[1].axiom, "prime_over_tree_diagram");
        assert_eq!(report.entries[1].verdict, Verdict::Inconclusive);
        assert!(report.holds());
    }
}
