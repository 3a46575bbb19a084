//! Concrete diagrams (spans and finite chains), stable embeddings of diagrams,
//! compatibility of two extensions over a diagram, and the bounded
//! compatibility-primality verdict.

use std::collections::BTreeSet;

use super::instance::{
    embeddings_between, embeddings_extending, exists_embedding_extending, identity_map,
    merge_maps, ClassInstance,
};
use super::model::{Atom, AtomMap, Model};
use super::report::{AxiomEntry, Verdict};
use super::KernelError;

/// A finite concrete diagram: models connected by literal strong inclusions,
/// with an explicit meet index for every pair.
///
/// Indices are arranged so that ascending index order is a linear extension of
/// the diagram order.
#[derive(Clone, Debug)]
pub struct Diagram {
    models: Vec<Model>,
    le: Vec<Vec<bool>>,
    meet: Vec<Vec<usize>>,
}

impl Diagram {
    /// A diagram from explicit parts. The order must be reflexive, respect
    /// index order (`le(i, j)` with `i ≠ j` only for `i < j`), and every meet
    /// entry must be a lower bound of its pair.
    pub fn new(
        models: Vec<Model>,
        le: Vec<Vec<bool>>,
        meet: Vec<Vec<usize>>,
    ) -> Result<Diagram, KernelError> {
        let n = models.len();
        let square = |m: &[Vec<bool>]| m.len() == n && m.iter().all(|row| row.len() == n);
        let meet_square = meet.len() == n && meet.iter().all(|row| row.len() == n);
        if n == 0 || !square(&le) || !meet_square {
            return Err(KernelError::MalformedDiagram);
        }
        for i in 0..n {
            if !le[i][i] {
                return Err(KernelError::MalformedDiagram);
            }
            for j in 0..n {
                if le[i][j] && i != j && i > j {
                    return Err(KernelError::MalformedDiagram);
                }
                let m = meet[i][j];
                if m >= n || !le[m][i] || !le[m][j] {
                    return Err(KernelError::MalformedDiagram);
                }
            }
        }
        Ok(Diagram { models, le, meet })
    }

    /// The one-point diagram.
    pub fn single(m: Model) -> Diagram {
        Diagram { models: vec![m], le: vec![vec![true]], meet: vec![vec![0]] }
    }

    /// The span `m1 ≥ m0 ≤ m2` with meet(m1, m2) = m0.
    pub fn vee(m0: Model, m1: Model, m2: Model) -> Diagram {
        let le = vec![
            vec![true, true, true],
            vec![false, true, false],
            vec![false, false, true],
        ];
        let meet = vec![vec![0, 0, 0], vec![0, 1, 0], vec![0, 0, 2]];
        Diagram { models: vec![m0, m1, m2], le, meet }
    }

    /// A linearly ordered diagram, smallest first.
    pub fn chain(models: Vec<Model>) -> Diagram {
        let n = models.len();
        let le = (0..n).map(|i| (0..n).map(|j| i <= j).collect()).collect();
        let meet = (0..n).map(|i| (0..n).map(|j| i.min(j)).collect()).collect();
        Diagram { models, le, meet }
    }

    pub fn models(&self) -> &[Model] {
        &self.models
    }

    pub fn len(&self) -> usize {
        self.models.len()
    }

    pub fn is_empty(&self) -> bool {
        self.models.is_empty()
    }

    pub fn le(&self, i: usize, j: usize) -> bool {
        self.le[i][j]
    }

    pub fn meet(&self, i: usize, j: usize) -> usize {
        self.meet[i][j]
    }

    /// Whether the listed models realize the diagram order concretely in the
    /// given class: related positions are literal strong submodels.
    pub fn is_concrete(&self, inst: &dyn ClassInstance) -> bool {
        for i in 0..self.len() {
            for j in 0..self.len() {
                if self.le[i][j]
                    && i != j
                    && !(self.models[i].is_carrier_subset(&self.models[j])
                        && inst.is_sub(&self.models[i], &self.models[j]))
                {
                    return false;
                }
                let m = self.meet[i][j];
                if !(self.le[m][i] && self.le[m][j]) {
                    return false;
                }
            }
        }
        true
    }
}

/// One map per diagram position, all into a single target.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DiagramEmbedding {
    pub maps: Vec<AtomMap>,
}

impl DiagramEmbedding {
    /// The literal-inclusion embedding of a concrete diagram into an extension
    /// that contains its models as they stand.
    pub fn identity(diagram: &Diagram) -> DiagramEmbedding {
        DiagramEmbedding {
            maps: diagram.models().iter().map(|m| identity_map(m.carrier())).collect(),
        }
    }
}

/// Whether a family of maps is a stable embedding of the diagram into `target`:
/// each leg a strong embedding, legs coherent along the diagram order, and every
/// pair of images freely amalgamated over the image of its meet.
pub fn is_stable_embedding(
    inst: &dyn ClassInstance,
    diagram: &Diagram,
    emb: &DiagramEmbedding,
    target: &Model,
) -> bool {
    if emb.maps.len() != diagram.len() {
        return false;
    }
    for (i, m) in diagram.models().iter().enumerate() {
        if !super::instance::is_k_embedding(inst, m, target, &emb.maps[i]) {
            return false;
        }
    }
    for i in 0..diagram.len() {
        for j in 0..diagram.len() {
            if i != j && diagram.le(i, j) {
                let smaller = diagram.models()[i].carrier();
                if smaller.iter().any(|a| emb.maps[i][a] != emb.maps[j][a]) {
                    return false;
                }
            }
        }
    }
    let image = |idx: usize| -> Model {
        let carrier: BTreeSet<Atom> = emb.maps[idx].values().cloned().collect();
        inst.induced_raw(target, &carrier)
    };
    for i in 0..diagram.len() {
        for j in i + 1..diagram.len() {
            let base = image(diagram.meet(i, j));
            if !inst.nf(&base, &image(i), &image(j), target) {
                return false;
            }
        }
    }
    true
}

/// All stable embeddings of the diagram into `target`, in deterministic order.
pub fn stable_diagram_embeddings(
    inst: &dyn ClassInstance,
    diagram: &Diagram,
    target: &Model,
) -> Vec<DiagramEmbedding> {
    let mut out = Vec::new();
    let mut maps: Vec<AtomMap> = Vec::new();
    fill(inst, diagram, target, &mut maps, &mut out);
    out
}

fn fill(
    inst: &dyn ClassInstance,
    diagram: &Diagram,
    target: &Model,
    maps: &mut Vec<AtomMap>,
    out: &mut Vec<DiagramEmbedding>,
) {
    let i = maps.len();
    if i == diagram.len() {
        let emb = DiagramEmbedding { maps: maps.clone() };
        if is_stable_embedding(inst, diagram, &emb, target) {
            out.push(emb);
        }
        return;
    }
    // Pins from already-placed smaller positions: index order is a linear
    // extension, so every j ≤ i in the diagram order is already in `maps`.
    let mut pins = AtomMap::new();
    for j in 0..i {
        if diagram.le(j, i) {
            match merge_maps(&pins, &maps[j]) {
                Some(merged) => pins = merged,
                None => return,
            }
        }
    }
    for f in embeddings_extending(inst, &diagram.models()[i], target, &pins) {
        maps.push(f);
        fill(inst, diagram, target, maps, out);
        maps.pop();
    }
}

/// A common extension reconciling two diagram extensions.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CompatibilityWitness {
    pub extension: String,
    pub g1: AtomMap,
    pub g2: AtomMap,
}

/// Bounded compatibility search: a fragment member `n` with strong embeddings
/// `g1: m1 → n`, `g2: m2 → n` agreeing on the two diagram images
/// (`g1∘f1 = g2∘f2` position by position). `None` means the fragment holds no
/// reconciliation; with an incomplete fragment that is not a refutation.
pub fn compatible_over(
    inst: &dyn ClassInstance,
    diagram: &Diagram,
    m1: &Model,
    f1: &DiagramEmbedding,
    m2: &Model,
    f2: &DiagramEmbedding,
) -> Result<Option<CompatibilityWitness>, KernelError> {
    if !is_stable_embedding(inst, diagram, f1, m1) || !is_stable_embedding(inst, diagram, f2, m2) {
        return Err(KernelError::InvalidEmbedding);
    }
    for n in inst.fragment() {
        for g1 in embeddings_between(inst, m1, n) {
            let Some(pins) = g2_pins(diagram, f1, f2, &g1) else {
                continue;
            };
            if let Some(g2) = embeddings_extending(inst, m2, n, &pins).into_iter().next() {
                return Ok(Some(CompatibilityWitness {
                    extension: n.id().to_string(),
                    g1,
                    g2,
                }));
            }
        }
    }
    Ok(None)
}

/// The assignments `g2` must satisfy so that `g2∘f2 = g1∘f1`.
fn g2_pins(
    diagram: &Diagram,
    f1: &DiagramEmbedding,
    f2: &DiagramEmbedding,
    g1: &AtomMap,
) -> Option<AtomMap> {
    let mut pins = AtomMap::new();
    for (x, m) in diagram.models().iter().enumerate() {
        for a in m.carrier() {
            let src = f2.maps[x].get(a)?.clone();
            let dst = g1.get(f1.maps[x].get(a)?)?.clone();
            match pins.get(&src) {
                Some(existing) if *existing != dst => return None,
                Some(_) => {}
                None => {
                    if pins.values().any(|v| *v == dst) {
                        return None;
                    }
                    pins.insert(src, dst);
                }
            }
        }
    }
    Some(pins)
}

/// Bounded compatibility-primality verdict for `(m, f)` over the diagram:
/// every fragment extension of the diagram found compatible with `(m, f)` must
/// receive `m` by a strong embedding commuting with the diagram maps.
///
/// FAIL carries the offending extension; a fragment with no compatible
/// extension at all is `INCONCLUSIVE` unless declared complete (the condition
/// is then vacuous).
pub fn is_compatibility_prime(
    inst: &dyn ClassInstance,
    diagram: &Diagram,
    m: &Model,
    f: &DiagramEmbedding,
) -> Result<AxiomEntry, KernelError> {
    const AXIOM: &str = "compatibility_prime";
    if !is_stable_embedding(inst, diagram, f, m) {
        return Err(KernelError::InvalidEmbedding);
    }
    let mut compatible_found = 0usize;
    for n in inst.fragment() {
        for fp in stable_diagram_embeddings(inst, diagram, n) {
            let witness = compatible_over(inst, diagram, m, f, n, &fp)?;
            if witness.is_none() {
                continue;
            }
            compatible_found += 1;
            // g must extend the position-wise pins f(a) ↦ f'(a).
            let Some(pins) = g2_pins(diagram, &fp, f, &identity_map(n.carrier())) else {
                return Ok(AxiomEntry::fail(
                    AXIOM,
                    vec![m.id().to_string(), n.id().to_string()],
                    "diagram images conflict; no commuting embedding can exist",
                ));
            };
            if !exists_embedding_extending(inst, m, n, &pins) {
                return Ok(AxiomEntry::fail(
                    AXIOM,
                    vec![m.id().to_string(), n.id().to_string()],
                    "a compatible extension admits no commuting embedding of the candidate",
                ));
            }
        }
    }
    if compatible_found == 0 && !inst.fragment_complete() {
        return Ok(AxiomEntry::inconclusive(
            AXIOM,
            "no compatible stable extension of the diagram inside the fragment",
        ));
    }
    Ok(AxiomEntry {
        axiom: AXIOM.to_string(),
        verdict: Verdict::Pass,
        witness: Some(vec![m.id().to_string()]),
        counterexample: None,
        note: format!("embeds into all {compatible_found} compatible fragment extensions"),
    })
}

/// A nonempty strictly bounded increasing run of members.
#[derive(Clone, Debug)]
pub struct FiniteChain {
    models: Vec<Model>,
}

impl FiniteChain {
    /// Validates that consecutive entries are strong submodels in order.
    pub fn new(inst: &dyn ClassInstance, models: Vec<Model>) -> Result<FiniteChain, KernelError> {
        for w in models.windows(2) {
            if !inst.is_sub(&w[0], &w[1]) {
                return Err(KernelError::NotAChain);
            }
        }
        Ok(FiniteChain { models })
    }

    pub fn models(&self) -> &[Model] {
        &self.models
    }

    pub fn to_diagram(&self) -> Diagram {
        Diagram::chain(self.models.clone())
    }
}

/// The canonically prime model over a finite chain: its maximum. Finite chains
/// have no limit stages, so continuity is vacuous and the maximum is
/// compatibility prime over the chain.
pub fn cpr_finite(chain: &FiniteChain) -> Result<Model, KernelError> {
    chain.models().last().cloned().ok_or(KernelError::EmptyChain)
}

#[cfg(test)]
mod tests {
    use super::super::instance::tests::TinySets;
    use super::*;

    fn model(id: &str, atoms: &[&str]) -> Model {
        Model::of_atoms(id, atoms.iter().copied())
    }

    #[test]
    fn chain_validation_and_maximum() {
        let inst = TinySets::new();
        let chain = FiniteChain::new(
            &inst,
            vec![model("x", &[]), model("y", &["a"]), model("z", &["a", "b"])],
        )
        .unwrap();
        assert_eq!(cpr_finite(&chain).unwrap(), model("w", &["a", "b"]));
        assert!(matches!(
            FiniteChain::new(&inst, vec![model("y", &["a"]), model("x", &[])]),
            Err(KernelError::NotAChain)
        ));
        let empty = FiniteChain::new(&inst, vec![]).unwrap();
        assert!(matches!(cpr_finite(&empty), Err(KernelError::EmptyChain)));
    }

    #[test]
    fn identity_embedding_of_concrete_vee_is_stable() {
        let inst = TinySets::new();
        let d = Diagram::vee(model("0", &[]), model("1", &["a"]), model("2", &["b"]));
        assert!(d.is_concrete(&inst));
        let n = model("n", &["a", "b"]);
        let id = DiagramEmbedding::identity(&d);
        assert!(is_stable_embedding(&inst, &d, &id, &n));
        // A vee with overlapping legs beyond the base is concrete but its
        // identity embedding is not stable.
        let bad = Diagram::vee(model("0", &[]), model("1", &["a"]), model("2", &["a"]));
        let id_bad = DiagramEmbedding::identity(&bad);
        assert!(!is_stable_embedding(&inst, &bad, &id_bad, &model("m", &["a"])));
    }

    #[test]
    fn stable_embedding_count_for_vee() {
        let inst = TinySets::new();
        let d = Diagram::vee(model("0", &[]), model("1", &["a"]), model("2", &["b"]));
        let n = model("n", &["a", "b", "c"]);
        // Ordered pairs of distinct targets: 3 × 2.
        assert_eq!(stable_diagram_embeddings(&inst, &d, &n).len(), 6);
    }

    #[test]
    fn compatibility_is_reflexive_and_finds_witnesses() {
        let inst = TinySets::new();
        let d = Diagram::single(model("0", &["a"]));
        let m = model("m", &["a", "b"]);
        let f = DiagramEmbedding::identity(&d);
        let w = compatible_over(&inst, &d, &m, &f, &m, &f).unwrap().unwrap();
        assert_eq!(w.g1, w.g2);
    }

    #[test]
    fn compatibility_rejects_invalid_embeddings() {
        let inst = TinySets::new();
        let d = Diagram::single(model("0", &["a"]));
        let m = model("m", &["b"]);
        let f = DiagramEmbedding::identity(&d);
        assert_eq!(
            compatible_over(&inst, &d, &m, &f, &m, &f),
            Err(KernelError::InvalidEmbedding)
        );
    }

    #[test]
    fn compatibility_is_symmetric_and_transitive_on_small_fragment() {
        let inst = TinySets::new();
        let d = Diagram::single(model("0", &["a"]));
        let f = DiagramEmbedding::identity(&d);
        // All fragment extensions of the one-point diagram by inclusion.
        let exts: Vec<&Model> =
            inst.fragment().iter().filter(|m| m.contains_atom(&Atom::new("a"))).collect();
        let compat = |x: &Model, y: &Model| {
            compatible_over(&inst, &d, x, &f, y, &f).unwrap().is_some()
        };
        for x in &exts {
            assert!(compat(x, x));
            for y in &exts {
                assert_eq!(compat(x, y), compat(y, x));
                for z in &exts {
                    if compat(x, y) && compat(y, z) {
                        assert!(compat(x, z));
                    }
                }
            }
        }
    }

    #[test]
    fn union_is_compatibility_prime_but_padded_model_is_not() {
        let inst = TinySets::new();
        let d = Diagram::vee(model("0", &["a"]), model("1", &["a", "b"]), model("2", &["a", "c"]));
        let f = DiagramEmbedding::identity(&d);
        let union = model("u", &["a", "b", "c"]);
        let entry = is_compatibility_prime(&inst, &d, &union, &f).unwrap();
        assert_eq!(entry.verdict, Verdict::Pass);
        // No room in a three-atom universe for a strictly larger completion, so
        // build the counterexample on a smaller diagram instead.
        let d2 = Diagram::vee(model("0", &[]), model("1", &["a"]), model("2", &["b"]));
        let f2 = DiagramEmbedding::identity(&d2);
        let padded = model("p", &["a", "b", "c"]);
        let entry2 = is_compatibility_prime(&inst, &d2, &padded, &f2).unwrap();
        assert_eq!(entry2.verdict, Verdict::Fail);
        let cx = entry2.counterexample.unwrap();
        assert_eq!(cx[0], "p");
    }
}
