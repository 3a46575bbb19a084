//! Witness sequences: the step-by-step certificates that a loose tree is free
//! inside its ambient under a given enumeration, their validation, and the
//! greedy construction that produces them.

use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use crate::kernel::{
    exists_embedding_extending, identity_map, is_prime_over_vee_bounded, merge_maps,
    ClassInstance, Model,
};
use crate::tree::{all_enumerations, Enumeration, TreeError, TreeNode};

use super::{canonical_member, LooseTree, LooseTreeError};

/// A candidate certificate of freeness: one model per enumeration position.
///
/// Position 0 must repeat the model at the first node; each later position
/// holds a member that amalgamates the node's model freely with the previous
/// witness model over the node's base.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WitnessSequence {
    enumeration: Enumeration,
    models: Vec<Model>,
}

impl WitnessSequence {
    pub fn new(enumeration: Enumeration, models: Vec<Model>) -> Self {
        WitnessSequence { enumeration, models }
    }

    pub fn enumeration(&self) -> &Enumeration {
        &self.enumeration
    }

    pub fn models(&self) -> &[Model] {
        &self.models
    }

    /// The final witness model — the completion of the whole tree.
    pub fn last(&self) -> &Model {
        self.models.last().expect("witness sequences are nonempty")
    }
}

impl Serialize for WitnessSequence {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut s = serializer.serialize_struct("WitnessSequence", 2)?;
        let order: Vec<String> = self.enumeration.order().iter().map(TreeNode::key).collect();
        let models: Vec<&str> = self.models.iter().map(Model::id).collect();
        s.serialize_field("order", &order)?;
        s.serialize_field("models", &models)?;
        s.end()
    }
}

/// Outcome of checking a witness sequence, in both strengths.
///
/// `basic` covers the defining conditions: the sequence starts at the first
/// node's model, every entry is a member strongly inside the ambient, and each
/// step freely amalgamates the node's model with the previous entry over the
/// node's base. `refined` additionally requires each step to be prime over
/// that amalgamation. `first_failure` describes the earliest violated clause.
#[derive(Clone, Debug, Serialize)]
pub struct WitnessValidation {
    pub basic: bool,
    pub refined: bool,
    pub first_failure: Option<String>,
}

/// The per-step data of a witness check: node, its tree predecessor, and the
/// canonicalized base (intersection of their models).
struct Step {
    node: TreeNode,
    base: Model,
}

/// The step layout for an enumeration, or `EnumerationMismatch` when the
/// enumeration does not list exactly the loose tree's nodes in a
/// predecessor-respecting order.
fn steps(lt: &LooseTree<'_>, e: &Enumeration) -> Result<Vec<Step>, LooseTreeError> {
    if Enumeration::new(lt.index(), e.order().to_vec()).is_err() {
        return Err(LooseTreeError::EnumerationMismatch);
    }
    let mut out = Vec::with_capacity(e.len());
    for t in e.order() {
        let base = lt.base_at(t).unwrap_or_else(|| lt.model_at(t).clone());
        out.push(Step { node: t.clone(), base });
    }
    Ok(out)
}

/// Checks a witness sequence against a loose tree, reporting the basic and the
/// refined (prime-step) forms together with the first violated clause.
pub fn validate_witness(
    lt: &LooseTree<'_>,
    w: &WitnessSequence,
) -> Result<WitnessValidation, LooseTreeError> {
    let steps = steps(lt, w.enumeration())?;
    if w.models().len() != steps.len() {
        return Err(LooseTreeError::EnumerationMismatch);
    }
    let inst = lt.instance();
    let mut first_failure = None;
    let fail = |msg: String, slot: &mut Option<String>| {
        if slot.is_none() {
            *slot = Some(msg);
        }
    };

    let mut basic = true;
    if w.models()[0] != *lt.model_at(&steps[0].node) {
        basic = false;
        fail(
            format!("entry 0 must equal the model at node {}", steps[0].node),
            &mut first_failure,
        );
    }
    for (i, n) in w.models().iter().enumerate() {
        if !inst.is_member(n) || !inst.is_sub(n, lt.ambient()) {
            basic = false;
            fail(
                format!("entry {i} is not a member strongly inside the ambient"),
                &mut first_failure,
            );
        }
    }
    for (i, step) in steps.iter().enumerate().skip(1) {
        let m = lt.model_at(&step.node);
        if !inst.nf(&step.base, m, &w.models()[i - 1], &w.models()[i]) {
            basic = false;
            fail(
                format!(
                    "entry {i} does not freely amalgamate the model at {} with entry {} over their base",
                    step.node,
                    i - 1
                ),
                &mut first_failure,
            );
        }
    }

    let mut refined = basic;
    if basic {
        for (i, step) in steps.iter().enumerate().skip(1) {
            let m = lt.model_at(&step.node);
            if is_prime_over_vee_bounded(inst, &step.base, m, &w.models()[i - 1], &w.models()[i])
                .is_err()
            {
                refined = false;
                fail(
                    format!("entry {i} is not prime over the step at node {}", step.node),
                    &mut first_failure,
                );
                break;
            }
        }
    }

    Ok(WitnessValidation { basic, refined, first_failure })
}

/// The basic conditions only — the cheap self-check used after transformations.
pub(crate) fn validate_basic(lt: &LooseTree<'_>, w: &WitnessSequence) -> bool {
    matches!(validate_basic_detail(lt, w), Ok(None))
}

/// `Ok(None)` when basically valid, `Ok(Some(reason))` on a violated clause.
pub(crate) fn validate_basic_detail(
    lt: &LooseTree<'_>,
    w: &WitnessSequence,
) -> Result<Option<String>, LooseTreeError> {
    let steps = steps(lt, w.enumeration())?;
    if w.models().len() != steps.len() {
        return Err(LooseTreeError::EnumerationMismatch);
    }
    let inst = lt.instance();
    if w.models()[0] != *lt.model_at(&steps[0].node) {
        return Ok(Some(format!(
            "entry 0 must equal the model at node {}",
            steps[0].node
        )));
    }
    for (i, n) in w.models().iter().enumerate() {
        if !inst.is_member(n) || !inst.is_sub(n, lt.ambient()) {
            return Ok(Some(format!("entry {i} is not a member strongly inside the ambient")));
        }
    }
    for (i, step) in steps.iter().enumerate().skip(1) {
        let m = lt.model_at(&step.node);
        if !inst.nf(&step.base, m, &w.models()[i - 1], &w.models()[i]) {
            return Ok(Some(format!(
                "entry {i} does not freely amalgamate the model at {} with entry {} over their base",
                step.node,
                i - 1
            )));
        }
    }
    Ok(None)
}

/// Greedy witness construction: entry 0 is the first node's model, and each
/// later entry is the instance's prime completion of the step inside the
/// ambient. `None` as soon as a step's independence fails inside the ambient
/// or no completion is constructed — the tree is then not free under this
/// enumeration inside this ambient (no refutation beyond that is implied).
pub fn find_witness(lt: &LooseTree<'_>, e: &Enumeration) -> Option<WitnessSequence> {
    greedy_extend(lt, e, &[])
}

/// Greedy construction continuing a trusted prefix of witness entries.
///
/// With an empty prefix this is `find_witness`. A nonempty prefix is used when
/// a witness for a restriction is already in hand and the enumeration lists
/// the restricted nodes first.
pub(crate) fn greedy_extend(
    lt: &LooseTree<'_>,
    e: &Enumeration,
    prefix: &[Model],
) -> Option<WitnessSequence> {
    let steps = steps(lt, e).ok()?;
    if prefix.len() > steps.len() {
        return None;
    }
    let inst = lt.instance();
    let mut models: Vec<Model> = prefix.to_vec();
    if models.is_empty() {
        models.push(canonical_member(inst, lt.model_at(&steps[0].node).clone()));
    }
    for step in steps.iter().skip(models.len()) {
        let m = lt.model_at(&step.node);
        let prev = models.last().expect("nonempty by construction");
        if !inst.nf(&step.base, m, prev, lt.ambient()) {
            return None;
        }
        let candidate = inst.prime_over_vee(&step.base, m, prev, lt.ambient())?;
        if !inst.is_member(&candidate)
            || !inst.is_sub(&candidate, lt.ambient())
            || !inst.nf(&step.base, m, prev, &candidate)
        {
            return None;
        }
        models.push(canonical_member(inst, candidate));
    }
    Some(WitnessSequence::new(e.clone(), models))
}

/// The almost-free variant: when no witness exists inside the loose tree's own
/// ambient, retry inside every fragment member strongly extending it. Returns
/// the witness together with the ambient that admitted it.
pub fn find_witness_almost_free<'a>(
    lt: &LooseTree<'a>,
    e: &Enumeration,
) -> Option<(WitnessSequence, Model)> {
    if let Some(w) = find_witness(lt, e) {
        return Some((w, lt.ambient().clone()));
    }
    let inst = lt.instance();
    for bigger in inst.fragment() {
        if bigger == lt.ambient() || !inst.is_sub(lt.ambient(), bigger) {
            continue;
        }
        let Ok(wider) = LooseTree::new(
            lt.index().clone(),
            lt.assign().clone(),
            bigger.clone(),
            inst,
        ) else {
            continue;
        };
        if let Some(w) = find_witness(&wider, e) {
            return Some((w, bigger.clone()));
        }
    }
    None
}

/// Whether the loose tree is free inside its ambient with respect to `e`.
pub fn is_free(lt: &LooseTree<'_>, e: &Enumeration) -> bool {
    find_witness(lt, e).is_some()
}

/// Freeness across every enumeration of the index, in listing order.
#[derive(Clone, Debug, Serialize)]
pub struct FreenessReport {
    pub enumerations: usize,
    pub verdicts: Vec<bool>,
}

impl FreenessReport {
    /// Freeness is enumeration-independent; disagreement flags a broken instance.
    pub fn agrees(&self) -> bool {
        self.verdicts.windows(2).all(|w| w[0] == w[1])
    }

    pub fn all_free(&self) -> bool {
        self.verdicts.iter().all(|v| *v)
    }
}

/// Runs `is_free` under every enumeration (up to `bound` nodes) and reports the
/// per-enumeration verdicts. Freeness under one enumeration entails freeness
/// under all, so `agrees` is expected to hold on every sound instance.
pub fn check_free_all_enumerations(
    lt: &LooseTree<'_>,
    bound: usize,
) -> Result<FreenessReport, LooseTreeError> {
    let enums = all_enumerations(lt.index(), bound).map_err(|e| match e {
        TreeError::BoundExceeded { size, bound } => LooseTreeError::BoundExceeded { size, bound },
        _ => LooseTreeError::EnumerationMismatch,
    })?;
    let verdicts: Vec<bool> = enums.iter().map(|e| is_free(lt, e)).collect();
    Ok(FreenessReport { enumerations: enums.len(), verdicts })
}

/// The completion certified by the witness: the final witness model. It is
/// prime over the whole loose tree in the bounded compatibility sense.
pub fn explicit_prime(lt: &LooseTree<'_>, e: &Enumeration) -> Result<Model, LooseTreeError> {
    match find_witness(lt, e) {
        Some(w) => Ok(w.last().clone()),
        None => Err(LooseTreeError::NotFree),
    }
}

/// Whether two completions of the same loose tree are isomorphic by strong
/// embeddings both ways fixing every assigned model pointwise.
pub fn isomorphic_over_tree(lt: &LooseTree<'_>, a: &Model, b: &Model) -> bool {
    let mut pins = crate::kernel::AtomMap::new();
    for m in lt.assign().values() {
        match merge_maps(&pins, &identity_map(m.carrier())) {
            Some(merged) => pins = merged,
            None => return false,
        }
    }
    let inst = lt.instance();
    exists_embedding_extending(inst, a, b, &pins)
        && exists_embedding_extending(inst, b, a, &pins)
}

/// A verified prime completion of the span `m1 ≥ m0 ≤ m2` strongly inside
/// `inside`: the instance's constructor when its output checks out, otherwise
/// an exhaustive scan of the fragment for a member meeting the primality
/// predicate. Absence is an error, never silently skipped.
pub(crate) fn prime_step(
    inst: &dyn ClassInstance,
    m0: &Model,
    m1: &Model,
    m2: &Model,
    inside: &Model,
    context: &str,
) -> Result<Model, LooseTreeError> {
    let fits = |c: &Model| {
        inst.is_member(c)
            && inst.is_sub(c, inside)
            && inst.nf(m0, m1, m2, c)
            && is_prime_over_vee_bounded(inst, m0, m1, m2, c).is_ok()
    };
    if inst.nf(m0, m1, m2, inside) {
        if let Some(c) = inst.prime_over_vee(m0, m1, m2, inside) {
            if fits(&c) {
                return Ok(canonical_member(inst, c));
            }
        }
    }
    for c in inst.fragment() {
        if fits(c) {
            return Ok(c.clone());
        }
    }
    Err(LooseTreeError::NoPrimeInFragment(context.to_string()))
}
