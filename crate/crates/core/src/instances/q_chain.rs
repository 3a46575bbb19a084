//! A four-member fixture with a unary tag predicate: the chain `{u0} ≤
//! {u0,u1}` has two extensions adding the same new atom `w`, one tagging it
//! and one not. No member hosts both, so the two extensions are incompatible
//! over the chain — the smallest witness that compatibility of extensions is
//! a real constraint. The fragment is an honest slice of a larger class, so
//! existential verdicts stay inconclusive.

use std::collections::BTreeSet;

use crate::kernel::{Atom, AtomMap, ClassInstance, Content, Model};

#[derive(Debug)]
pub struct QChainFixture {
    frag: Vec<Model>,
}

fn tagged(id: &str, atoms: &[&str], tags: &[&str]) -> Model {
    let carrier: BTreeSet<Atom> = atoms.iter().map(|a| Atom::new(*a)).collect();
    let tags: BTreeSet<Atom> = tags.iter().map(|a| Atom::new(*a)).collect();
    Model::new(id, carrier, Content::Tags(tags))
}

impl QChainFixture {
    pub fn new() -> Self {
        let mut frag = vec![
            tagged("", &["u0"], &[]),
            tagged("", &["u0", "u1"], &[]),
            tagged("", &["u0", "u1", "w"], &[]),
            tagged("", &["u0", "u1", "w"], &["w"]),
        ];
        frag.sort();
        let frag = frag
            .into_iter()
            .enumerate()
            .map(|(i, m)| m.with_id(format!("m{i}")))
            .collect();
        QChainFixture { frag }
    }

    /// The two-member chain both extensions share.
    pub fn chain_models(&self) -> (Model, Model) {
        (self.frag[0].clone(), self.frag[1].clone())
    }

    /// The two incompatible extensions: `w` untagged, then `w` tagged.
    pub fn rival_extensions(&self) -> (Model, Model) {
        (self.frag[2].clone(), self.frag[3].clone())
    }
}

impl Default for QChainFixture {
    fn default() -> Self {
        Self::new()
    }
}

impl ClassInstance for QChainFixture {
    fn name(&self) -> &str {
        "q_chain"
    }

    fn fragment(&self) -> &[Model] {
        &self.frag
    }

    fn is_member(&self, m: &Model) -> bool {
        self.frag.iter().any(|f| f == m)
    }

    fn is_sub(&self, m: &Model, n: &Model) -> bool {
        self.is_member(m) && self.is_member(n) && self.is_substructure(m, n)
    }

    /// Only degenerate amalgams (one leg equal to the base) are free here; the
    /// fixture exists for compatibility questions, not amalgamation ones.
    fn nf(&self, m0: &Model, m1: &Model, m2: &Model, m3: &Model) -> bool {
        (m1 == m0 && self.is_sub(m0, m2) && self.is_sub(m2, m3) && self.is_sub(m1, m3))
            || (m2 == m0 && self.is_sub(m0, m1) && self.is_sub(m1, m3) && self.is_sub(m2, m3))
    }

    fn prime_over_vee(
        &self,
        m0: &Model,
        m1: &Model,
        m2: &Model,
        ambient: &Model,
    ) -> Option<Model> {
        if m1 == m0 && self.is_sub(m2, ambient) {
            return Some(m2.clone());
        }
        if m2 == m0 && self.is_sub(m1, ambient) {
            return Some(m1.clone());
        }
        None
    }

    fn is_iso_onto_image(&self, m: &Model, n: &Model, map: &AtomMap) -> bool {
        let (Content::Tags(tm), Content::Tags(tn)) = (m.content(), n.content()) else {
            return false;
        };
        m.carrier().iter().all(|a| match map.get(a) {
            Some(img) => tm.contains(a) == tn.contains(img),
            None => false,
        })
    }
}
