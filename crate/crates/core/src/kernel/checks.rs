//! Exhaustive and bounded checkers for every law of the class interface, plus
//! counterexample replay.
//!
//! Universally quantified laws are swept over the whole fragment and `FAIL`
//! entries always carry the violating id tuple. Existentially quantified laws
//! search the fragment for witnesses; exhaustion without a witness is
//! `INCONCLUSIVE` unless the instance declares the fragment complete.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};

use super::instance::{
    embeddings_between, embeddings_extending, exists_embedding_extending, identity_map,
    is_k_embedding, is_prime_over_vee_bounded, merge_maps, restrict_map, ClassInstance,
};
use super::model::{Atom, AtomMap, Model};
use super::report::{AxiomEntry, AxiomReport};
use super::KernelError;

/// Shared precomputation for one checker run: the order matrix and the full
/// list of freely amalgamated quadruples.
struct Ctx<'a> {
    inst: &'a dyn ClassInstance,
    frag: &'a [Model],
    sub: Vec<Vec<bool>>,
    substruct: Vec<Vec<bool>>,
    nf_quads: Vec<[usize; 4]>,
    nf_set: HashSet<u32>,
}

fn pack(q: [usize; 4]) -> u32 {
    (q[0] as u32) | (q[1] as u32) << 8 | (q[2] as u32) << 16 | (q[3] as u32) << 24
}

impl<'a> Ctx<'a> {
    fn new(inst: &'a dyn ClassInstance) -> Self {
        let frag = inst.fragment();
        assert!(frag.len() <= 256, "fragment too large for packed quadruple indexing");
        let n = frag.len();
        let sub: Vec<Vec<bool>> = (0..n)
            .map(|i| (0..n).map(|j| inst.is_sub(&frag[i], &frag[j])).collect())
            .collect();
        let substruct: Vec<Vec<bool>> = (0..n)
            .map(|i| (0..n).map(|j| inst.is_substructure(&frag[i], &frag[j])).collect())
            .collect();
        let mut nf_quads = Vec::new();
        let mut nf_set = HashSet::new();
        for i0 in 0..n {
            for i1 in 0..n {
                for i2 in 0..n {
                    for i3 in 0..n {
                        if inst.nf(&frag[i0], &frag[i1], &frag[i2], &frag[i3]) {
                            nf_quads.push([i0, i1, i2, i3]);
                            nf_set.insert(pack([i0, i1, i2, i3]));
                        }
                    }
                }
            }
        }
        Ctx { inst, frag, sub, substruct, nf_quads, nf_set }
    }

    fn nf_idx(&self, q: [usize; 4]) -> bool {
        self.nf_set.contains(&pack(q))
    }

    fn ids(&self, idxs: &[usize]) -> Vec<String> {
        idxs.iter().map(|&i| self.frag[i].id().to_string()).collect()
    }

    /// Distinct spans appearing in freely amalgamated quadruples, each with its
    /// first completing ambient.
    fn free_vees(&self) -> Vec<([usize; 3], usize)> {
        let mut seen = BTreeMap::new();
        for q in &self.nf_quads {
            seen.entry([q[0], q[1], q[2]]).or_insert(q[3]);
        }
        seen.into_iter().collect()
    }
}

/// Memoized bounded-primality and constructor queries shared by the D-group,
/// transitivity, and loose-tree checks.
struct PrimeCache {
    primality: BTreeMap<(Model, Model, Model, Model), bool>,
    constructed: BTreeMap<(Model, Model, Model, Model), Option<Model>>,
}

impl PrimeCache {
    fn new() -> Self {
        PrimeCache { primality: BTreeMap::new(), constructed: BTreeMap::new() }
    }

    fn is_prime(
        &mut self,
        inst: &dyn ClassInstance,
        m0: &Model,
        m1: &Model,
        m2: &Model,
        candidate: &Model,
    ) -> bool {
        let key = (m0.clone(), m1.clone(), m2.clone(), candidate.clone());
        if let Some(&v) = self.primality.get(&key) {
            return v;
        }
        let v = is_prime_over_vee_bounded(inst, m0, m1, m2, candidate).is_ok();
        self.primality.insert(key, v);
        v
    }

    fn construct(
        &mut self,
        inst: &dyn ClassInstance,
        m0: &Model,
        m1: &Model,
        m2: &Model,
        ambient: &Model,
    ) -> Option<Model> {
        let key = (m0.clone(), m1.clone(), m2.clone(), ambient.clone());
        if let Some(v) = self.constructed.get(&key) {
            return v.clone();
        }
        let v = inst.prime_over_vee(m0, m1, m2, ambient);
        self.constructed.insert(key, v.clone());
        v
    }
}

// ---------------------------------------------------------------------------
// Group A
// ---------------------------------------------------------------------------

pub fn check_axioms_a(inst: &dyn ClassInstance, lambda: usize) -> AxiomReport {
    let ctx = Ctx::new(inst);
    AxiomReport::new(
        inst.name(),
        vec![a0(&ctx), a1(&ctx), a2(&ctx), a3(&ctx), a4(&ctx, lambda)],
    )
}

fn a0(ctx: &Ctx) -> AxiomEntry {
    for (i, _) in ctx.frag.iter().enumerate() {
        if !ctx.sub[i][i] {
            return AxiomEntry::fail("A0", ctx.ids(&[i]), "member is not a submodel of itself");
        }
    }
    AxiomEntry::pass("A0", format!("reflexive on all {} members", ctx.frag.len()))
}

fn a1(ctx: &Ctx) -> AxiomEntry {
    let n = ctx.frag.len();
    for i in 0..n {
        for j in 0..n {
            if ctx.sub[i][j] && !ctx.substruct[i][j] {
                return AxiomEntry::fail(
                    "A1",
                    ctx.ids(&[i, j]),
                    "submodel order holds without substructure containment",
                );
            }
        }
    }
    AxiomEntry::pass("A1", format!("order implies substructure on all {n}\u{b2} pairs"))
}

fn a2(ctx: &Ctx) -> AxiomEntry {
    let n = ctx.frag.len();
    for i in 0..n {
        for j in 0..n {
            if !ctx.sub[i][j] {
                continue;
            }
            for k in 0..n {
                if ctx.sub[j][k] && !ctx.sub[i][k] {
                    return AxiomEntry::fail(
                        "A2",
                        ctx.ids(&[i, j, k]),
                        "order fails to compose through the middle member",
                    );
                }
            }
        }
    }
    AxiomEntry::pass("A2", "order is transitive over all triples")
}

fn a3(ctx: &Ctx) -> AxiomEntry {
    let n = ctx.frag.len();
    for i0 in 0..n {
        for i1 in 0..n {
            if !ctx.substruct[i0][i1] {
                continue;
            }
            for i2 in 0..n {
                if ctx.substruct[i1][i2]
                    && ctx.sub[i0][i2]
                    && ctx.sub[i1][i2]
                    && !ctx.sub[i0][i1]
                {
                    return AxiomEntry::fail(
                        "A3",
                        ctx.ids(&[i0, i1, i2]),
                        "coherence fails: both sit strongly in the top but not in each other",
                    );
                }
            }
        }
    }
    AxiomEntry::pass("A3", "coherence holds over all substructure chains")
}

/// One bounded downward-closure probe: a small strong submodel through `subset`.
fn a4_witness_exists(ctx: &Ctx, i: usize, subset: &BTreeSet<Atom>, lambda: usize) -> bool {
    (0..ctx.frag.len()).any(|j| {
        ctx.frag[j].len() <= lambda
            && ctx.sub[j][i]
            && subset.iter().all(|a| ctx.frag[j].contains_atom(a))
    })
}

fn a4(ctx: &Ctx, lambda: usize) -> AxiomEntry {
    let mut pairs = 0usize;
    for (i, m) in ctx.frag.iter().enumerate() {
        let atoms: Vec<&Atom> = m.carrier().iter().collect();
        assert!(atoms.len() <= 20, "carrier too large for subset sweep");
        for mask in 0u32..(1u32 << atoms.len()) {
            if (mask.count_ones() as usize) > lambda {
                continue;
            }
            let subset: BTreeSet<Atom> = atoms
                .iter()
                .enumerate()
                .filter(|(k, _)| mask >> k & 1 == 1)
                .map(|(_, a)| (*a).clone())
                .collect();
            pairs += 1;
            if !a4_witness_exists(ctx, i, &subset, lambda) {
                let shown: Vec<String> =
                    subset.iter().map(|a| a.as_str().to_string()).collect();
                let note = format!(
                    "no member of size <= {lambda} through subset {{{}}} below {}",
                    shown.join(","),
                    ctx.frag[i].id()
                );
                return if ctx.inst.submodels_complete() {
                    AxiomEntry::fail("A4", ctx.ids(&[i]), note)
                } else {
                    AxiomEntry::inconclusive("A4", note + "; fragment not submodel-complete")
                };
            }
        }
    }
    AxiomEntry::pass(
        "A4",
        format!("bounded downward closure holds for {pairs} (member, subset) pairs at lambda={lambda}"),
    )
}

// ---------------------------------------------------------------------------
// Group C
// ---------------------------------------------------------------------------

pub fn check_axioms_c(inst: &dyn ClassInstance) -> AxiomReport {
    let ctx = Ctx::new(inst);
    AxiomReport::new(
        inst.name(),
        vec![c1(&ctx), c2(&ctx), c3i(&ctx), c3ii(&ctx), c3iii(&ctx), c5(&ctx), c6(&ctx), c7(&ctx)],
    )
}

fn c1(ctx: &Ctx) -> AxiomEntry {
    for q in &ctx.nf_quads {
        let legs = ctx.sub[q[0]][q[1]]
            && ctx.sub[q[1]][q[3]]
            && ctx.sub[q[0]][q[2]]
            && ctx.sub[q[2]][q[3]];
        if !legs {
            return AxiomEntry::fail(
                "C1",
                ctx.ids(q),
                "free amalgamation holds without the submodel legs",
            );
        }
    }
    AxiomEntry::pass("C1", format!("legs verified on all {} amalgams", ctx.nf_quads.len()))
}

/// Search a free completion of the span inside the fragment: copies of both
/// legs over the literal base, freely amalgamated in some member.
fn c2_complete(ctx: &Ctx, v: [usize; 3]) -> Option<(usize, Model, Model)> {
    let (m0, m1, m2) = (&ctx.frag[v[0]], &ctx.frag[v[1]], &ctx.frag[v[2]]);
    let pins = identity_map(m0.carrier());
    for (i3, m3) in ctx.frag.iter().enumerate() {
        for f1 in embeddings_extending(ctx.inst, m1, m3, &pins) {
            let img1 = ctx.inst.induced_raw(m3, &f1.values().cloned().collect());
            for f2 in embeddings_extending(ctx.inst, m2, m3, &pins) {
                let img2 = ctx.inst.induced_raw(m3, &f2.values().cloned().collect());
                if ctx.inst.nf(m0, &img1, &img2, m3) {
                    return Some((i3, img1, img2));
                }
            }
        }
    }
    None
}

fn all_vees(ctx: &Ctx) -> Vec<[usize; 3]> {
    let n = ctx.frag.len();
    let mut vees = Vec::new();
    for i0 in 0..n {
        for i1 in 0..n {
            if !ctx.sub[i0][i1] {
                continue;
            }
            for i2 in 0..n {
                if ctx.sub[i0][i2] {
                    vees.push([i0, i1, i2]);
                }
            }
        }
    }
    vees
}

fn c2(ctx: &Ctx) -> AxiomEntry {
    let vees = all_vees(ctx);
    let mut witness: Option<Vec<String>> = None;
    let mut exhausted: Option<[usize; 3]> = None;
    let mut completed = 0usize;
    for v in &vees {
        match c2_complete(ctx, *v) {
            Some((i3, img1, img2)) => {
                completed += 1;
                if witness.is_none() {
                    witness = Some(vec![
                        ctx.frag[v[0]].id().to_string(),
                        ctx.inst.id_in_fragment(&img1),
                        ctx.inst.id_in_fragment(&img2),
                        ctx.frag[i3].id().to_string(),
                    ]);
                }
            }
            None => {
                if exhausted.is_none() {
                    exhausted = Some(*v);
                }
            }
        }
    }
    if let Some(v) = exhausted {
        // Existence can only be confirmed inside a finite window: an
        // exhausted search is never reported as a failure.
        let mut entry = AxiomEntry::inconclusive(
            "C2",
            format!(
                "{completed} of {} spans complete freely; search exhausted \
                 for span ({},{},{})",
                vees.len(),
                ctx.frag[v[0]].id(),
                ctx.frag[v[1]].id(),
                ctx.frag[v[2]].id()
            ),
        );
        entry.witness = witness;
        return entry;
    }
    let mut entry = AxiomEntry::pass(
        "C2",
        format!("all {} spans complete freely inside the fragment", vees.len()),
    );
    entry.witness = witness;
    entry
}

fn c3i(ctx: &Ctx) -> AxiomEntry {
    let n = ctx.frag.len();
    for q in &ctx.nf_quads {
        for i2p in 0..n {
            if ctx.sub[q[0]][i2p]
                && ctx.sub[i2p][q[2]]
                && !ctx.nf_idx([q[0], q[1], i2p, q[3]])
            {
                return AxiomEntry::fail(
                    "C3i",
                    ctx.ids(&[q[0], q[1], q[2], q[3], i2p]),
                    "freeness does not descend to a smaller second leg",
                );
            }
        }
    }
    AxiomEntry::pass("C3i", "freeness descends to every smaller second leg")
}

fn c3ii(ctx: &Ctx) -> AxiomEntry {
    let n = ctx.frag.len();
    for q in &ctx.nf_quads {
        for i3p in 0..n {
            if ctx.sub[q[3]][i3p] && !ctx.nf_idx([q[0], q[1], q[2], i3p]) {
                return AxiomEntry::fail(
                    "C3ii",
                    ctx.ids(&[q[0], q[1], q[2], q[3], i3p]),
                    "freeness is lost in a larger ambient",
                );
            }
        }
    }
    AxiomEntry::pass("C3ii", "freeness persists in every larger ambient")
}

fn c3iii(ctx: &Ctx) -> AxiomEntry {
    let n = ctx.frag.len();
    for q in &ctx.nf_quads {
        let union = ctx.frag[q[1]].carrier_union(&ctx.frag[q[2]]);
        for i3p in 0..n {
            if ctx.sub[i3p][q[3]]
                && union.iter().all(|a| ctx.frag[i3p].contains_atom(a))
                && !ctx.nf_idx([q[0], q[1], q[2], i3p])
            {
                return AxiomEntry::fail(
                    "C3iii",
                    ctx.ids(&[q[0], q[1], q[2], q[3], i3p]),
                    "freeness is lost in a smaller ambient containing both legs",
                );
            }
        }
    }
    AxiomEntry::pass("C3iii", "freeness persists in every smaller ambient containing both legs")
}

/// Isomorphisms between two spans: maps of the legs agreeing on the base and
/// carrying it onto the other base.
fn vee_isos(ctx: &Ctx, va: [usize; 3], vb: [usize; 3]) -> Vec<(AtomMap, AtomMap)> {
    let (a0, a1, a2) = (&ctx.frag[va[0]], &ctx.frag[va[1]], &ctx.frag[va[2]]);
    let (b0, b1, b2) = (&ctx.frag[vb[0]], &ctx.frag[vb[1]], &ctx.frag[vb[2]]);
    if a0.len() != b0.len() || a1.len() != b1.len() || a2.len() != b2.len() {
        return Vec::new();
    }
    let mut out = Vec::new();
    for f1 in embeddings_between(ctx.inst, a1, b1) {
        let f0 = restrict_map(&f1, a0.carrier());
        let f0_range: BTreeSet<Atom> = f0.values().cloned().collect();
        if f0_range != *b0.carrier() || !is_k_embedding(ctx.inst, a0, b0, &f0) {
            continue;
        }
        for f2 in embeddings_extending(ctx.inst, a2, b2, &f0) {
            out.push((f1.clone(), f2));
        }
    }
    out
}

fn c5(ctx: &Ctx) -> AxiomEntry {
    // Bucket completions by their span.
    let mut completions: BTreeMap<[usize; 3], Vec<usize>> = BTreeMap::new();
    for q in &ctx.nf_quads {
        completions.entry([q[0], q[1], q[2]]).or_default().push(q[3]);
    }
    let spans: Vec<&[usize; 3]> = completions.keys().collect();
    let mut checked = 0usize;
    for va in &spans {
        for vb in &spans {
            for (f1, f2) in vee_isos(ctx, **va, **vb) {
                let Some(pins) = merge_maps(&f1, &f2) else {
                    // A non-injective union can extend to no embedding at all.
                    return c5_unresolved(ctx, va, vb, "span isomorphism has non-injective union");
                };
                for &i3a in &completions[*va] {
                    for &i3b in &completions[*vb] {
                        checked += 1;
                        let found = (0..ctx.frag.len()).any(|i_n| {
                            ctx.sub[i3b][i_n]
                                && exists_embedding_extending(
                                    ctx.inst,
                                    &ctx.frag[i3a],
                                    &ctx.frag[i_n],
                                    &pins,
                                )
                        });
                        if !found {
                            let mut idxs = Vec::new();
                            idxs.extend_from_slice(*va);
                            idxs.push(i3a);
                            idxs.extend_from_slice(*vb);
                            idxs.push(i3b);
                            let note = "no fragment extension reconciles the two completions";
                            return if ctx.inst.fragment_complete() {
                                AxiomEntry::fail("C5", ctx.ids(&idxs), note)
                            } else {
                                AxiomEntry::inconclusive(
                                    "C5",
                                    format!(
                                        "{note} for amalgams ({}) and ({}); fragment incomplete",
                                        ctx.ids(&idxs[..4]).join(","),
                                        ctx.ids(&idxs[4..]).join(",")
                                    ),
                                )
                            };
                        }
                    }
                }
            }
        }
    }
    AxiomEntry::pass(
        "C5",
        format!("all {checked} isomorphic completion pairs reconcile inside the fragment"),
    )
}

fn c5_unresolved(ctx: &Ctx, va: &[usize; 3], vb: &[usize; 3], note: &str) -> AxiomEntry {
    let mut idxs = Vec::new();
    idxs.extend_from_slice(va);
    idxs.extend_from_slice(vb);
    if ctx.inst.fragment_complete() {
        AxiomEntry::fail("C5", ctx.ids(&idxs), note)
    } else {
        AxiomEntry::inconclusive("C5", format!("{note}; fragment incomplete"))
    }
}

fn c6(ctx: &Ctx) -> AxiomEntry {
    for q in &ctx.nf_quads {
        if !ctx.nf_idx([q[0], q[2], q[1], q[3]]) {
            return AxiomEntry::fail("C6", ctx.ids(q), "free amalgamation is not symmetric");
        }
    }
    AxiomEntry::pass("C6", format!("symmetry holds on all {} amalgams", ctx.nf_quads.len()))
}

fn c7(ctx: &Ctx) -> AxiomEntry {
    for q in &ctx.nf_quads {
        let ok = match ctx.inst.intersect(&ctx.frag[q[1]], &ctx.frag[q[2]]) {
            Some(m) => m == ctx.frag[q[0]],
            None => false,
        };
        if !ok {
            return AxiomEntry::fail(
                "C7",
                ctx.ids(q),
                "legs intersect in more than the base",
            );
        }
    }
    AxiomEntry::pass(
        "C7",
        format!("legs meet exactly in the base on all {} amalgams", ctx.nf_quads.len()),
    )
}

// ---------------------------------------------------------------------------
// Proposition: the base of a free amalgam can be moved up
// ---------------------------------------------------------------------------

pub fn check_prop_base_monotonicity(inst: &dyn ClassInstance) -> AxiomReport {
    let ctx = Ctx::new(inst);
    let n = ctx.frag.len();
    for q in &ctx.nf_quads {
        for i_n in 0..n {
            if ctx.sub[q[0]][i_n]
                && ctx.sub[i_n][q[1]]
                && ctx.sub[i_n][q[2]]
                && !ctx.nf_idx([i_n, q[1], q[2], q[3]])
            {
                return AxiomReport::new(
                    inst.name(),
                    vec![AxiomEntry::fail(
                        "monotonicity4",
                        ctx.ids(&[q[0], q[1], q[2], q[3], i_n]),
                        "base cannot be raised to an intermediate submodel",
                    )],
                );
            }
        }
    }
    AxiomReport::new(
        inst.name(),
        vec![AxiomEntry::pass(
            "monotonicity4",
            format!("base raises over all {} amalgams", ctx.nf_quads.len()),
        )],
    )
}

// ---------------------------------------------------------------------------
// Group D
// ---------------------------------------------------------------------------

pub fn check_axioms_d(inst: &dyn ClassInstance) -> AxiomReport {
    let ctx = Ctx::new(inst);
    let mut cache = PrimeCache::new();
    // Constructed (or fallback-found) primes per free span, reused by D3/D4.
    let mut primes: Vec<([usize; 3], Model)> = Vec::new();
    let d1 = d1_check(&ctx, &mut cache, &mut primes);
    let d2 = d2_check(&ctx, &mut cache);
    let d3 = d3_check(&ctx, &primes);
    let d4 = d4_check(&ctx, &mut cache, &primes);
    let d5 = d5_check(&ctx, &mut cache);
    AxiomReport::new(inst.name(), vec![d1, d2, d3, d4, d5])
}

fn d1_check(
    ctx: &Ctx,
    cache: &mut PrimeCache,
    primes: &mut Vec<([usize; 3], Model)>,
) -> AxiomEntry {
    let vees = ctx.free_vees();
    let mut witness: Option<Vec<String>> = None;
    for (v, i3) in &vees {
        let (m0, m1, m2) = (&ctx.frag[v[0]], &ctx.frag[v[1]], &ctx.frag[v[2]]);
        let constructed = cache.construct(ctx.inst, m0, m1, m2, &ctx.frag[*i3]);
        match constructed {
            Some(p) => {
                if !cache.is_prime(ctx.inst, m0, m1, m2, &p) {
                    let failure = is_prime_over_vee_bounded(ctx.inst, m0, m1, m2, &p)
                        .err()
                        .map(|f| f.extension)
                        .unwrap_or_default();
                    let mut cx = ctx.ids(&v[..]);
                    cx.push(ctx.inst.id_in_fragment(&p));
                    return AxiomEntry::fail(
                        "D1",
                        cx,
                        format!("constructed completion fails to reach extension {failure}"),
                    );
                }
                if witness.is_none() {
                    let mut w = ctx.ids(&v[..]);
                    w.push(ctx.inst.id_in_fragment(&p));
                    witness = Some(w);
                }
                primes.push((*v, p));
            }
            None => {
                // Constructor declined: fall back to an exhaustive fragment search.
                let found = ctx
                    .frag
                    .iter()
                    .find(|cand| cache.is_prime(ctx.inst, m0, m1, m2, cand))
                    .cloned();
                match found {
                    Some(p) => primes.push((*v, p)),
                    None => {
                        let note = format!(
                            "no prime completion of span ({},{},{}) found",
                            m0.id(),
                            m1.id(),
                            m2.id()
                        );
                        return if ctx.inst.fragment_complete() {
                            AxiomEntry::fail("D1", ctx.ids(&v[..]), note)
                        } else {
                            AxiomEntry::inconclusive("D1", note + "; fragment incomplete")
                        };
                    }
                }
            }
        }
    }
    let mut entry = AxiomEntry::pass(
        "D1",
        format!("prime completions verified for all {} free spans", vees.len()),
    );
    entry.witness = witness;
    entry
}

fn d2_check(ctx: &Ctx, cache: &mut PrimeCache) -> AxiomEntry {
    let n = ctx.frag.len();
    let mut configs = 0usize;
    for q in &ctx.nf_quads {
        let [i0, i1, i4, i5] = *q;
        for i2 in 0..n {
            if !(ctx.sub[i0][i2] && ctx.sub[i2][i4]) {
                continue;
            }
            let (m0, m1, m2) = (&ctx.frag[i0], &ctx.frag[i1], &ctx.frag[i2]);
            let Some(m3) = cache.construct(ctx.inst, m0, m1, m2, &ctx.frag[i5]) else {
                continue;
            };
            configs += 1;
            if !ctx.inst.nf(&ctx.frag[i2], &m3, &ctx.frag[i4], &ctx.frag[i5]) {
                let mut cx = ctx.ids(&[i0, i1, i2]);
                cx.push(ctx.inst.id_in_fragment(&m3));
                cx.extend(ctx.ids(&[i4, i5]));
                return AxiomEntry::fail(
                    "D2",
                    cx,
                    "base extension fails: completion and upper leg not free over the new base",
                );
            }
        }
    }
    AxiomEntry::pass("D2", format!("base extension holds for {configs} configurations"))
}

fn d3_check(ctx: &Ctx, primes: &[([usize; 3], Model)]) -> AxiomEntry {
    for (v, p) in primes {
        let union = ctx.frag[v[1]].carrier_union(&ctx.frag[v[2]]);
        for cand in ctx.frag {
            if union.iter().all(|a| cand.contains_atom(a))
                && ctx.inst.is_sub(cand, p)
                && cand != p
            {
                let mut cx = ctx.ids(&v[..]);
                cx.push(ctx.inst.id_in_fragment(p));
                cx.push(cand.id().to_string());
                return AxiomEntry::fail(
                    "D3",
                    cx,
                    "informational: prime completion is not minimal over the span",
                );
            }
        }
    }
    AxiomEntry::pass(
        "D3",
        format!("informational: all {} prime completions are minimal", primes.len()),
    )
}

fn d4_check(ctx: &Ctx, cache: &mut PrimeCache, primes: &[([usize; 3], Model)]) -> AxiomEntry {
    let mut compared = 0usize;
    for (v, p) in primes {
        let (m0, m1, m2) = (&ctx.frag[v[0]], &ctx.frag[v[1]], &ctx.frag[v[2]]);
        let union: BTreeSet<Atom> = m1.carrier_union(m2);
        let pins: AtomMap = union.iter().map(|a| (a.clone(), a.clone())).collect();
        // The constructed prime is a stable extension of its own span exactly
        // when the span completes freely in it; shipped instances satisfy this.
        let p_is_stable = ctx.inst.nf(m0, m1, m2, p);
        for cand in ctx.frag {
            if cand == p || !union.iter().all(|a| cand.contains_atom(a)) {
                continue;
            }
            // Cheap necessary condition first: a prime candidate must embed
            // over the span into the stable extension p.
            if p_is_stable && !exists_embedding_extending(ctx.inst, cand, p, &pins) {
                continue;
            }
            if !cache.is_prime(ctx.inst, m0, m1, m2, cand) {
                continue;
            }
            compared += 1;
            let iso = cand.len() == p.len()
                && exists_embedding_extending(ctx.inst, p, cand, &pins);
            if !iso {
                let mut cx = ctx.ids(&v[..]);
                cx.push(ctx.inst.id_in_fragment(p));
                cx.push(cand.id().to_string());
                return AxiomEntry::fail(
                    "D4",
                    cx,
                    "informational: two non-isomorphic prime completions over one span",
                );
            }
        }
    }
    AxiomEntry::pass(
        "D4",
        format!("informational: uniqueness verified against {compared} rival prime completions"),
    )
}

fn d5_check(ctx: &Ctx, cache: &mut PrimeCache) -> AxiomEntry {
    let n = ctx.frag.len();
    let mut configs = 0usize;
    for q in &ctx.nf_quads {
        let [i0, i1, i4, i5] = *q;
        let (m0, m1, m4, m5) =
            (&ctx.frag[i0], &ctx.frag[i1], &ctx.frag[i4], &ctx.frag[i5]);
        // Hypothesis: the ambient is itself prime over its span. The
        // constructed prime is a stable completion inside the ambient, so a
        // structurally different construction already refutes primality.
        match cache.construct(ctx.inst, m0, m1, m4, m5) {
            Some(p) if p == *m5 => {}
            _ => continue,
        }
        if !cache.is_prime(ctx.inst, m0, m1, m4, m5) {
            continue;
        }
        for i2 in 0..n {
            if !(ctx.sub[i0][i2] && ctx.sub[i2][i4]) {
                continue;
            }
            let m2 = &ctx.frag[i2];
            let Some(m3) = cache.construct(ctx.inst, m0, m1, m2, m5) else {
                continue;
            };
            configs += 1;
            if !cache.is_prime(ctx.inst, m2, &m3, m4, m5) {
                let mut cx = ctx.ids(&[i0, i1, i2]);
                cx.push(ctx.inst.id_in_fragment(&m3));
                cx.extend(ctx.ids(&[i4, i5]));
                return AxiomEntry::fail(
                    "D5",
                    cx,
                    "informational: ambient is not prime over the completed pair",
                );
            }
        }
    }
    AxiomEntry::pass("D5", format!("informational: holds for {configs} configurations"))
}

// ---------------------------------------------------------------------------
// Derived theorems used as consistency oracles
// ---------------------------------------------------------------------------

pub fn check_theorem_transind(inst: &dyn ClassInstance) -> AxiomReport {
    let ctx = Ctx::new(inst);
    // Bucket second amalgams by their first two components.
    let mut by_head: HashMap<(usize, usize), Vec<(usize, usize)>> = HashMap::new();
    for q in &ctx.nf_quads {
        by_head.entry((q[0], q[1])).or_default().push((q[2], q[3]));
    }
    let mut pairs = 0usize;
    for q1 in &ctx.nf_quads {
        if let Some(tails) = by_head.get(&(q1[2], q1[3])) {
            for &(i4, i5) in tails {
                pairs += 1;
                if !ctx.nf_idx([q1[0], q1[1], i4, i5]) {
                    return AxiomReport::new(
                        inst.name(),
                        vec![AxiomEntry::fail(
                            "transind",
                            ctx.ids(&[q1[0], q1[1], q1[2], q1[3], i4, i5]),
                            "independence fails to compose through the middle amalgam",
                        )],
                    );
                }
            }
        }
    }
    AxiomReport::new(
        inst.name(),
        vec![AxiomEntry::pass(
            "transind",
            format!("independence composes over all {pairs} chained amalgam pairs"),
        )],
    )
}

pub fn check_theorem_transprime(inst: &dyn ClassInstance) -> AxiomReport {
    let ctx = Ctx::new(inst);
    let mut cache = PrimeCache::new();
    let n = ctx.frag.len();
    let mut configs = 0usize;
    for q in &ctx.nf_quads {
        let [i0, i1, i4, i5] = *q;
        let (m0, m1, m4, m5) =
            (&ctx.frag[i0], &ctx.frag[i1], &ctx.frag[i4], &ctx.frag[i5]);
        for i2 in 0..n {
            if !(ctx.sub[i0][i2] && ctx.sub[i2][i4]) {
                continue;
            }
            let m2 = &ctx.frag[i2];
            let Some(m3) = cache.construct(ctx.inst, m0, m1, m2, m5) else {
                continue;
            };
            // Hypothesis: the ambient is prime over the completion and the
            // upper leg (cheap structural filter, then the bounded predicate).
            match cache.construct(ctx.inst, m2, &m3, m4, m5) {
                Some(p) if p == *m5 => {}
                _ => continue,
            }
            if !cache.is_prime(ctx.inst, m2, &m3, m4, m5) {
                continue;
            }
            configs += 1;
            if !cache.is_prime(ctx.inst, m0, m1, m4, m5) {
                let mut cx = ctx.ids(&[i0, i1, i2]);
                cx.push(ctx.inst.id_in_fragment(&m3));
                cx.extend(ctx.ids(&[i4, i5]));
                return AxiomReport::new(
                    inst.name(),
                    vec![AxiomEntry::fail(
                        "transprime",
                        cx,
                        "primality fails to compose across the base extension",
                    )],
                );
            }
        }
    }
    AxiomReport::new(
        inst.name(),
        vec![AxiomEntry::pass(
            "transprime",
            format!("primality composes for all {configs} qualifying configurations"),
        )],
    )
}

// ---------------------------------------------------------------------------
// Replay
// ---------------------------------------------------------------------------

fn resolve<'a>(inst: &'a dyn ClassInstance, id: &str) -> Result<&'a Model, KernelError> {
    inst.fragment()
        .iter()
        .find(|m| m.id() == id)
        .or_else(|| inst.fragment().iter().find(|m| m.describe() == id))
        .ok_or_else(|| KernelError::UnknownModel(id.to_string()))
}

fn resolve_all<'a>(
    inst: &'a dyn ClassInstance,
    ids: &[String],
    arity: usize,
) -> Result<Vec<&'a Model>, KernelError> {
    if ids.len() != arity {
        return Err(KernelError::UnknownAxiom(format!("expected {arity} ids, got {}", ids.len())));
    }
    ids.iter().map(|id| resolve(inst, id)).collect()
}

/// Re-evaluates the violation recorded by a FAIL entry. Returns `true` when the
/// counterexample still violates the law — i.e. the report replays.
pub fn replay_counterexample(
    inst: &dyn ClassInstance,
    axiom: &str,
    ids: &[String],
    lambda: usize,
) -> Result<bool, KernelError> {
    let nf = |a: &Model, b: &Model, c: &Model, d: &Model| inst.nf(a, b, c, d);
    match axiom {
        "A0" => {
            let m = resolve_all(inst, ids, 1)?;
            Ok(!inst.is_sub(m[0], m[0]))
        }
        "A1" => {
            let m = resolve_all(inst, ids, 2)?;
            Ok(inst.is_sub(m[0], m[1]) && !inst.is_substructure(m[0], m[1]))
        }
        "A2" => {
            let m = resolve_all(inst, ids, 3)?;
            Ok(inst.is_sub(m[0], m[1]) && inst.is_sub(m[1], m[2]) && !inst.is_sub(m[0], m[2]))
        }
        "A3" => {
            let m = resolve_all(inst, ids, 3)?;
            Ok(inst.is_substructure(m[0], m[1])
                && inst.is_substructure(m[1], m[2])
                && inst.is_sub(m[0], m[2])
                && inst.is_sub(m[1], m[2])
                && !inst.is_sub(m[0], m[1]))
        }
        "A4" => {
            let m = resolve_all(inst, ids, 1)?;
            let ctx = Ctx::new(inst);
            let i = ctx.frag.iter().position(|f| f == m[0]).unwrap();
            let atoms: Vec<&Atom> = m[0].carrier().iter().collect();
            for mask in 0u32..(1u32 << atoms.len()) {
                if (mask.count_ones() as usize) > lambda {
                    continue;
                }
                let subset: BTreeSet<Atom> = atoms
                    .iter()
                    .enumerate()
                    .filter(|(k, _)| mask >> k & 1 == 1)
                    .map(|(_, a)| (*a).clone())
                    .collect();
                if !a4_witness_exists(&ctx, i, &subset, lambda) {
                    return Ok(inst.submodels_complete());
                }
            }
            Ok(false)
        }
        "C1" => {
            let m = resolve_all(inst, ids, 4)?;
            let legs = inst.is_sub(m[0], m[1])
                && inst.is_sub(m[1], m[3])
                && inst.is_sub(m[0], m[2])
                && inst.is_sub(m[2], m[3]);
            Ok(nf(m[0], m[1], m[2], m[3]) && !legs)
        }
        "C2" => {
            let m = resolve_all(inst, ids, 3)?;
            let ctx = Ctx::new(inst);
            let v = [
                ctx.frag.iter().position(|f| f == m[0]).unwrap(),
                ctx.frag.iter().position(|f| f == m[1]).unwrap(),
                ctx.frag.iter().position(|f| f == m[2]).unwrap(),
            ];
            Ok(inst.fragment_complete() && c2_complete(&ctx, v).is_none())
        }
        "C3i" => {
            let m = resolve_all(inst, ids, 5)?;
            Ok(nf(m[0], m[1], m[2], m[3])
                && inst.is_sub(m[0], m[4])
                && inst.is_sub(m[4], m[2])
                && !nf(m[0], m[1], m[4], m[3]))
        }
        "C3ii" => {
            let m = resolve_all(inst, ids, 5)?;
            Ok(nf(m[0], m[1], m[2], m[3])
                && inst.is_sub(m[3], m[4])
                && !nf(m[0], m[1], m[2], m[4]))
        }
        "C3iii" => {
            let m = resolve_all(inst, ids, 5)?;
            let union = m[1].carrier_union(m[2]);
            Ok(nf(m[0], m[1], m[2], m[3])
                && inst.is_sub(m[4], m[3])
                && union.iter().all(|a| m[4].contains_atom(a))
                && !nf(m[0], m[1], m[2], m[4]))
        }
        "C5" => {
            let m = resolve_all(inst, ids, 8)?;
            if !inst.fragment_complete() {
                return Ok(false);
            }
            let ctx = Ctx::new(inst);
            let pos = |x: &Model| ctx.frag.iter().position(|f| f == x).unwrap();
            let va = [pos(m[0]), pos(m[1]), pos(m[2])];
            let vb = [pos(m[4]), pos(m[5]), pos(m[6])];
            for (f1, f2) in vee_isos(&ctx, va, vb) {
                let Some(pins) = merge_maps(&f1, &f2) else {
                    return Ok(true);
                };
                let found = ctx.frag.iter().enumerate().any(|(i_n, n_mod)| {
                    ctx.sub[pos(m[7])][i_n]
                        && exists_embedding_extending(inst, m[3], n_mod, &pins)
                });
                if !found {
                    return Ok(true);
                }
            }
            Ok(false)
        }
        "C6" => {
            let m = resolve_all(inst, ids, 4)?;
            Ok(nf(m[0], m[1], m[2], m[3]) && !nf(m[0], m[2], m[1], m[3]))
        }
        "C7" => {
            let m = resolve_all(inst, ids, 4)?;
            let meets = match inst.intersect(m[1], m[2]) {
                Some(i) => i == *m[0],
                None => false,
            };
            Ok(nf(m[0], m[1], m[2], m[3]) && !meets)
        }
        "monotonicity4" => {
            let m = resolve_all(inst, ids, 5)?;
            Ok(nf(m[0], m[1], m[2], m[3])
                && inst.is_sub(m[0], m[4])
                && inst.is_sub(m[4], m[1])
                && inst.is_sub(m[4], m[2])
                && !nf(m[4], m[1], m[2], m[3]))
        }
        "D1" => {
            let m = resolve_all(inst, ids, 4)?;
            Ok(is_prime_over_vee_bounded(inst, m[0], m[1], m[2], m[3]).is_err())
        }
        "D2" => {
            let m = resolve_all(inst, ids, 6)?;
            Ok(nf(m[0], m[1], m[4], m[5])
                && inst.is_sub(m[0], m[2])
                && inst.is_sub(m[2], m[4])
                && inst.prime_over_vee(m[0], m[1], m[2], m[5]).as_ref() == Some(m[3])
                && !nf(m[2], m[3], m[4], m[5]))
        }
        "D3" => {
            let m = resolve_all(inst, ids, 5)?;
            let union = m[1].carrier_union(m[2]);
            Ok(union.iter().all(|a| m[4].contains_atom(a))
                && inst.is_sub(m[4], m[3])
                && m[4] != m[3])
        }
        "D4" => {
            let m = resolve_all(inst, ids, 5)?;
            let union = m[1].carrier_union(m[2]);
            let pins: AtomMap = union.iter().map(|a| (a.clone(), a.clone())).collect();
            let rival_prime = is_prime_over_vee_bounded(inst, m[0], m[1], m[2], m[4]).is_ok();
            let iso = m[3].len() == m[4].len()
                && exists_embedding_extending(inst, m[3], m[4], &pins);
            Ok(rival_prime && !iso)
        }
        "D5" => {
            let m = resolve_all(inst, ids, 6)?;
            Ok(nf(m[0], m[1], m[4], m[5])
                && is_prime_over_vee_bounded(inst, m[0], m[1], m[4], m[5]).is_ok()
                && inst.is_sub(m[0], m[2])
                && inst.is_sub(m[2], m[4])
                && inst.prime_over_vee(m[0], m[1], m[2], m[5]).as_ref() == Some(m[3])
                && is_prime_over_vee_bounded(inst, m[2], m[3], m[4], m[5]).is_err())
        }
        "transind" => {
            let m = resolve_all(inst, ids, 6)?;
            Ok(nf(m[0], m[1], m[2], m[3])
                && nf(m[2], m[3], m[4], m[5])
                && !nf(m[0], m[1], m[4], m[5]))
        }
        "transprime" => {
            let m = resolve_all(inst, ids, 6)?;
            Ok(nf(m[0], m[1], m[4], m[5])
                && inst.is_sub(m[0], m[2])
                && inst.is_sub(m[2], m[4])
                && inst.prime_over_vee(m[0], m[1], m[2], m[5]).as_ref() == Some(m[3])
                && is_prime_over_vee_bounded(inst, m[2], m[3], m[4], m[5]).is_ok()
                && is_prime_over_vee_bounded(inst, m[0], m[1], m[4], m[5]).is_err())
        }
        other => Err(KernelError::UnknownAxiom(other.to_string())),
    }
}
