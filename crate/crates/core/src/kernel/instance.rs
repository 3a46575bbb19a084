//! The interface a concrete class implements, plus the generic embedding search
//! and the bounded primality test built on top of it.

use std::collections::BTreeSet;

use super::model::{Atom, AtomMap, Content, Model};

/// A finitely presented class: a fragment of concrete members, the strong-submodel
/// order, the free-amalgamation relation, and a prime completion constructor.
///
/// Canonical atom naming is part of the contract: whenever two fragment members
/// share an atom name they share that point, so `intersect` can work on literal
/// carrier intersections.
pub trait ClassInstance: Send + Sync {
    fn name(&self) -> &str;

    /// Every member shipped with the instance, in a fixed deterministic order,
    /// with ids `m0, m1, ...` matching positions.
    fn fragment(&self) -> &[Model];

    /// Whether the fragment lists *every* member of the intended class.
    ///
    /// Bounded existential searches may only report a definite failure when this
    /// holds; otherwise an exhausted search is inconclusive.
    fn fragment_complete(&self) -> bool {
        false
    }

    /// Whether the fragment is closed under strong submodels of its members.
    ///
    /// The bounded downward-closure check (small strong submodels through every
    /// small subset) can only refute when this holds.
    fn submodels_complete(&self) -> bool {
        false
    }

    /// Membership of an arbitrary concrete model in the class.
    fn is_member(&self, m: &Model) -> bool;

    /// The strong-submodel order. Implementations check membership of both sides.
    fn is_sub(&self, m: &Model, n: &Model) -> bool;

    /// The free-amalgamation relation on a quadruple of members.
    fn nf(&self, m0: &Model, m1: &Model, m2: &Model, m3: &Model) -> bool;

    /// A prime completion of the span `m1 ≥ m0 ≤ m2` inside `ambient`, when the
    /// instance can construct one; `None` when no construction applies.
    fn prime_over_vee(
        &self,
        m0: &Model,
        m1: &Model,
        m2: &Model,
        ambient: &Model,
    ) -> Option<Model>;

    /// Whether a total injective atom map is an isomorphism from `m` onto the
    /// structure its range induces inside `n`. Totality and injectivity are
    /// already guaranteed by the caller.
    fn is_iso_onto_image(&self, m: &Model, n: &Model, map: &AtomMap) -> bool;

    /// Pruning hook for the backtracking embedding search: may a partial map be
    /// extended with `src ↦ dst`? Must err on the side of `true`.
    fn atom_step_ok(
        &self,
        _m: &Model,
        _n: &Model,
        _partial: &AtomMap,
        _src: &Atom,
        _dst: &Atom,
    ) -> bool {
        true
    }

    /// The structure `n` induces on a subset of its carrier (no membership check).
    fn induced_raw(&self, n: &Model, carrier: &BTreeSet<Atom>) -> Model {
        debug_assert!(carrier.is_subset(n.carrier()));
        let content = n.content().restrict(carrier);
        Model::new(format!("{}|sub", n.id()), carrier.clone(), content)
    }

    /// The induced-substructure relation: carrier inclusion plus structural
    /// agreement on the smaller carrier.
    fn is_substructure(&self, m: &Model, n: &Model) -> bool {
        m.is_carrier_subset(n) && self.induced_raw(n, m.carrier()) == *m
    }

    /// The member induced on the carrier intersection, when the two sides agree
    /// there and the result is in the class.
    fn intersect(&self, m: &Model, n: &Model) -> Option<Model> {
        let shared = m.carrier_intersection(n);
        let from_m = self.induced_raw(m, &shared);
        let from_n = self.induced_raw(n, &shared);
        if from_m != from_n || !self.is_member(&from_m) {
            return None;
        }
        Some(from_m.with_id(format!("{}&{}", m.id(), n.id())))
    }

    /// Position of a structurally equal member in the fragment.
    fn find_in_fragment(&self, m: &Model) -> Option<usize> {
        self.fragment().iter().position(|f| f == m)
    }

    /// The fragment id of a structurally equal member, or a synthesized
    /// description when the model is not listed.
    fn id_in_fragment(&self, m: &Model) -> String {
        match self.find_in_fragment(m) {
            Some(i) => self.fragment()[i].id().to_string(),
            None => m.describe(),
        }
    }
}

/// The identity map on a carrier.
pub fn identity_map(carrier: &BTreeSet<Atom>) -> AtomMap {
    carrier.iter().map(|a| (a.clone(), a.clone())).collect()
}

/// The union of two atom maps, `None` on a conflicting assignment or on a
/// violation of joint injectivity.
pub fn merge_maps(a: &AtomMap, b: &AtomMap) -> Option<AtomMap> {
    let mut out = a.clone();
    for (src, dst) in b {
        match out.get(src) {
            Some(existing) if existing != dst => return None,
            Some(_) => {}
            None => {
                if out.values().any(|v| v == dst) {
                    return None;
                }
                out.insert(src.clone(), dst.clone());
            }
        }
    }
    Some(out)
}

/// Restriction of a map to a sub-carrier.
pub fn restrict_map(map: &AtomMap, carrier: &BTreeSet<Atom>) -> AtomMap {
    map.iter().filter(|(k, _)| carrier.contains(*k)).map(|(k, v)| (k.clone(), v.clone())).collect()
}

/// Image of `m` under a total map: mapped carrier plus mapped content.
pub fn apply_map(m: &Model, map: &AtomMap) -> Model {
    let carrier: BTreeSet<Atom> = m.carrier().iter().map(|a| map[a].clone()).collect();
    let content = match m.content() {
        Content::None => Content::None,
        Content::Tags(tags) => Content::Tags(tags.iter().map(|a| map[a].clone()).collect()),
    };
    Model::new(format!("{}~img", m.id()), carrier, content)
}

/// The full strong-embedding condition for a candidate total injective map:
/// isomorphism onto the induced image, and the image a strong submodel of `n`.
pub fn is_k_embedding(inst: &dyn ClassInstance, m: &Model, n: &Model, map: &AtomMap) -> bool {
    if map.len() != m.len() || !m.carrier().iter().all(|a| map.contains_key(a)) {
        return false;
    }
    let mut range: BTreeSet<&Atom> = BTreeSet::new();
    for dst in map.values() {
        if !n.contains_atom(dst) || !range.insert(dst) {
            return false;
        }
    }
    if !inst.is_iso_onto_image(m, n, map) {
        return false;
    }
    let image_carrier: BTreeSet<Atom> = map.values().cloned().collect();
    let image = inst.induced_raw(n, &image_carrier);
    inst.is_sub(&image, n)
}

fn search_embeddings(
    inst: &dyn ClassInstance,
    m: &Model,
    n: &Model,
    pinned: &AtomMap,
    first_only: bool,
    out: &mut Vec<AtomMap>,
) {
    // Validate the pins: sources in m, targets in n, injective.
    let mut seen: BTreeSet<&Atom> = BTreeSet::new();
    for (src, dst) in pinned {
        if !m.contains_atom(src) || !n.contains_atom(dst) || !seen.insert(dst) {
            return;
        }
    }
    let free_sources: Vec<&Atom> =
        m.carrier().iter().filter(|a| !pinned.contains_key(*a)).collect();
    let mut map = pinned.clone();

    fn go(
        inst: &dyn ClassInstance,
        m: &Model,
        n: &Model,
        free_sources: &[&Atom],
        depth: usize,
        map: &mut AtomMap,
        first_only: bool,
        out: &mut Vec<AtomMap>,
    ) -> bool {
        if depth == free_sources.len() {
            if is_k_embedding(inst, m, n, map) {
                out.push(map.clone());
                return first_only;
            }
            return false;
        }
        let src = free_sources[depth];
        let candidates: Vec<Atom> = n
            .carrier()
            .iter()
            .filter(|dst| !map.values().any(|v| v == *dst))
            .filter(|dst| inst.atom_step_ok(m, n, map, src, dst))
            .cloned()
            .collect();
        for dst in candidates {
            map.insert(src.clone(), dst);
            if go(inst, m, n, free_sources, depth + 1, map, first_only, out) {
                return true;
            }
            map.remove(src);
        }
        false
    }

    go(inst, m, n, &free_sources, 0, &mut map, first_only, out);
}

/// All strong embeddings of `m` into `n`, in deterministic order.
pub fn embeddings_between(inst: &dyn ClassInstance, m: &Model, n: &Model) -> Vec<AtomMap> {
    embeddings_extending(inst, m, n, &AtomMap::new())
}

/// All strong embeddings of `m` into `n` extending the pinned assignments.
pub fn embeddings_extending(
    inst: &dyn ClassInstance,
    m: &Model,
    n: &Model,
    pinned: &AtomMap,
) -> Vec<AtomMap> {
    let mut out = Vec::new();
    search_embeddings(inst, m, n, pinned, false, &mut out);
    out
}

/// Whether some strong embedding of `m` into `n` extends the pinned assignments.
pub fn exists_embedding_extending(
    inst: &dyn ClassInstance,
    m: &Model,
    n: &Model,
    pinned: &AtomMap,
) -> bool {
    let mut out = Vec::new();
    search_embeddings(inst, m, n, pinned, true, &mut out);
    !out.is_empty()
}

/// A span `m1 ≥ m0 ≤ m2` embedded into an extension so that the two images are
/// freely amalgamated over the image of the base.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VeeEmbedding {
    pub f0: AtomMap,
    pub f1: AtomMap,
    pub f2: AtomMap,
}

impl VeeEmbedding {
    /// The combined map on the union carrier, when the legs are jointly
    /// consistent and injective.
    pub fn union_map(&self) -> Option<AtomMap> {
        merge_maps(&self.f1, &self.f2)
    }
}

/// All stable embeddings of the span `m1 ≥ m0 ≤ m2` into `n`: legs are strong
/// embeddings agreeing on `m0`, and the images amalgamate freely over the image
/// of `m0` inside `n`.
pub fn stable_vee_embeddings(
    inst: &dyn ClassInstance,
    m0: &Model,
    m1: &Model,
    m2: &Model,
    n: &Model,
) -> Vec<VeeEmbedding> {
    let mut out = Vec::new();
    for f1 in embeddings_between(inst, m1, n) {
        let f0 = restrict_map(&f1, m0.carrier());
        if !is_k_embedding(inst, m0, n, &f0) {
            continue;
        }
        let img0 = inst.induced_raw(n, &f0.values().cloned().collect());
        let img1 = inst.induced_raw(n, &f1.values().cloned().collect());
        for f2 in embeddings_extending(inst, m2, n, &f0) {
            let img2 = inst.induced_raw(n, &f2.values().cloned().collect());
            if inst.nf(&img0, &img1, &img2, n) {
                out.push(VeeEmbedding { f0: f0.clone(), f1: f1.clone(), f2 });
            }
        }
    }
    out
}

/// Why a candidate fails the bounded primality test.
#[derive(Clone, Debug)]
pub struct PrimalityFailure {
    /// Id of the fragment extension the candidate failed to reach.
    pub extension: String,
    /// The stable span embedding that could not be extended over the candidate.
    pub vee: VeeEmbedding,
}

/// Bounded absolute-primality test: over every fragment member and every stable
/// embedding of the span into it, the candidate must follow via a strong
/// embedding extending both legs. The span must sit inside the candidate.
pub fn is_prime_over_vee_bounded(
    inst: &dyn ClassInstance,
    m0: &Model,
    m1: &Model,
    m2: &Model,
    candidate: &Model,
) -> Result<(), PrimalityFailure> {
    if !inst.is_sub(m1, candidate) || !inst.is_sub(m2, candidate) {
        return Err(PrimalityFailure {
            extension: candidate.id().to_string(),
            vee: VeeEmbedding {
                f0: identity_map(m0.carrier()),
                f1: identity_map(m1.carrier()),
                f2: identity_map(m2.carrier()),
            },
        });
    }
    for n in inst.fragment() {
        for vee in stable_vee_embeddings(inst, m0, m1, m2, n) {
            let Some(pins) = vee.union_map() else {
                return Err(PrimalityFailure { extension: n.id().to_string(), vee });
            };
            if !exists_embedding_extending(inst, candidate, n, &pins) {
                return Err(PrimalityFailure { extension: n.id().to_string(), vee });
            }
        }
    }
    Ok(())
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;

    /// A minimal test class: members are the subsets of {a, b, c}, the order is
    /// inclusion, amalgamation is disjointness over the base, primes are unions.
    pub(crate) struct TinySets {
        frag: Vec<Model>,
    }

    impl TinySets {
        pub(crate) fn new() -> Self {
            let letters = ["a", "b", "c"];
            let mut frag = Vec::new();
            for mask in 0u8..8 {
                let atoms: Vec<&str> = letters
                    .iter()
                    .enumerate()
                    .filter(|(i, _)| mask >> i & 1 == 1)
                    .map(|(_, l)| *l)
                    .collect();
                frag.push(Model::of_atoms(format!("m{mask}"), atoms));
            }
            frag.sort();
            let frag = frag
                .into_iter()
                .enumerate()
                .map(|(i, m)| m.with_id(format!("m{i}")))
                .collect();
            TinySets { frag }
        }
    }

    impl ClassInstance for TinySets {
        fn name(&self) -> &str {
            "tiny_sets"
        }

        fn fragment(&self) -> &[Model] {
            &self.frag
        }

        fn fragment_complete(&self) -> bool {
            true
        }

        fn submodels_complete(&self) -> bool {
            true
        }

        fn is_member(&self, m: &Model) -> bool {
            *m.content() == Content::None
                && m.carrier().iter().all(|a| ["a", "b", "c"].contains(&a.as_str()))
        }

        fn is_sub(&self, m: &Model, n: &Model) -> bool {
            self.is_member(m) && self.is_member(n) && m.is_carrier_subset(n)
        }

        fn nf(&self, m0: &Model, m1: &Model, m2: &Model, m3: &Model) -> bool {
            self.is_sub(m0, m1)
                && self.is_sub(m1, m3)
                && self.is_sub(m0, m2)
                && self.is_sub(m2, m3)
                && m1.carrier_intersection(m2) == *m0.carrier()
        }

        fn prime_over_vee(
            &self,
            _m0: &Model,
            m1: &Model,
            m2: &Model,
            ambient: &Model,
        ) -> Option<Model> {
            let union = Model::of_atoms("p", m1.carrier_union(m2));
            self.is_sub(&union, ambient).then_some(union)
        }

        fn is_iso_onto_image(&self, _m: &Model, _n: &Model, _map: &AtomMap) -> bool {
            true
        }
    }

    fn model(id: &str, atoms: &[&str]) -> Model {
        Model::of_atoms(id, atoms.iter().copied())
    }

    #[test]
    fn embedding_counts_are_falling_factorials() {
        let inst = TinySets::new();
        let two = model("x", &["a", "b"]);
        let three = model("y", &["a", "b", "c"]);
        assert_eq!(embeddings_between(&inst, &two, &three).len(), 6);
        assert_eq!(embeddings_between(&inst, &three, &two).len(), 0);
        assert_eq!(embeddings_between(&inst, &model("e", &[]), &three).len(), 1);
    }

    #[test]
    fn pinned_search_respects_pins() {
        let inst = TinySets::new();
        let two = model("x", &["a", "b"]);
        let three = model("y", &["a", "b", "c"]);
        let pins: AtomMap = [(Atom::new("a"), Atom::new("c"))].into_iter().collect();
        let found = embeddings_extending(&inst, &two, &three, &pins);
        assert_eq!(found.len(), 2);
        assert!(found.iter().all(|f| f[&Atom::new("a")] == Atom::new("c")));
        assert!(exists_embedding_extending(&inst, &two, &three, &pins));
        let bad_pins: AtomMap = [(Atom::new("z"), Atom::new("c"))].into_iter().collect();
        assert!(!exists_embedding_extending(&inst, &two, &three, &bad_pins));
    }

    #[test]
    fn merge_maps_detects_conflicts_and_joint_injectivity() {
        let f: AtomMap = [(Atom::new("a"), Atom::new("x"))].into_iter().collect();
        let g: AtomMap = [(Atom::new("b"), Atom::new("y"))].into_iter().collect();
        assert_eq!(merge_maps(&f, &g).unwrap().len(), 2);
        let clash: AtomMap = [(Atom::new("a"), Atom::new("y"))].into_iter().collect();
        assert!(merge_maps(&f, &clash).is_none());
        let not_injective: AtomMap = [(Atom::new("b"), Atom::new("x"))].into_iter().collect();
        assert!(merge_maps(&f, &not_injective).is_none());
    }

    #[test]
    fn stable_vee_embeddings_require_disjoint_images() {
        let inst = TinySets::new();
        let base = model("b", &[]);
        let left = model("l", &["a"]);
        let right = model("r", &["b"]);
        let ambient = model("n", &["a", "b"]);
        let stable = stable_vee_embeddings(&inst, &base, &left, &right, &ambient);
        // Two choices for the left image, the right leg must take the other atom.
        assert_eq!(stable.len(), 2);
        for v in &stable {
            assert!(v.union_map().is_some());
        }
    }

    #[test]
    fn union_is_prime_but_proper_extension_is_not() {
        let inst = TinySets::new();
        let base = model("b", &[]);
        let left = model("l", &["a"]);
        let right = model("r", &["b"]);
        let union = model("u", &["a", "b"]);
        assert!(is_prime_over_vee_bounded(&inst, &base, &left, &right, &union).is_ok());
        let bigger = model("v", &["a", "b", "c"]);
        let failure =
            is_prime_over_vee_bounded(&inst, &base, &left, &right, &bigger).unwrap_err();
        // The first two-atom extension hosting a stable span cannot absorb a
        // three-atom candidate.
        assert_eq!(failure.extension, "m2");
    }
}
