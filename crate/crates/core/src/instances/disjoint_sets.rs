//! Members are the subsets of a fixed finite universe of unstructured atoms,
//! ordered by inclusion. Two members are freely amalgamated over a base when
//! they meet exactly in it, and the prime completion of a span is the union.
//! Every law checked by the kernel holds here exhaustively, which makes this
//! the oracle instance for the whole workbench.

use std::collections::BTreeSet;

use crate::kernel::{Atom, AtomMap, ClassInstance, Content, Model};

use super::InstanceError;

#[derive(Debug)]
pub struct DisjointSets {
    universe: BTreeSet<Atom>,
    frag: Vec<Model>,
}

impl DisjointSets {
    pub const MAX_UNIVERSE: usize = 6;

    pub fn new<I, A>(universe: I) -> Result<Self, InstanceError>
    where
        I: IntoIterator<Item = A>,
        A: Into<Atom>,
    {
        let universe: BTreeSet<Atom> = universe.into_iter().map(Into::into).collect();
        if universe.len() > Self::MAX_UNIVERSE {
            return Err(InstanceError::UniverseTooLarge {
                got: universe.len(),
                max: Self::MAX_UNIVERSE,
            });
        }
        let atoms: Vec<&Atom> = universe.iter().collect();
        let mut carriers: Vec<BTreeSet<Atom>> = (0u32..1 << atoms.len())
            .map(|mask| {
                atoms
                    .iter()
                    .enumerate()
                    .filter(|(i, _)| mask >> i & 1 == 1)
                    .map(|(_, a)| (*a).clone())
                    .collect()
            })
            .collect();
        carriers.sort();
        let frag = carriers
            .into_iter()
            .enumerate()
            .map(|(i, c)| Model::new(format!("m{i}"), c, Content::None))
            .collect();
        Ok(DisjointSets { universe, frag })
    }

    pub fn universe(&self) -> &BTreeSet<Atom> {
        &self.universe
    }
}

impl ClassInstance for DisjointSets {
    fn name(&self) -> &str {
        "disjoint_sets"
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
        *m.content() == Content::None && m.carrier().is_subset(&self.universe)
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
        let union = m1.carrier_union(m2);
        if !union.iter().all(|a| ambient.contains_atom(a)) {
            return None;
        }
        let fresh = Model::new("union", union, Content::None);
        match self.find_in_fragment(&fresh) {
            Some(i) => Some(self.frag[i].clone()),
            None => Some(fresh),
        }
    }

    fn is_iso_onto_image(&self, _m: &Model, _n: &Model, _map: &AtomMap) -> bool {
        // Atoms carry no structure; any injective carrier map is an isomorphism.
        true
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn model<const N: usize>(atoms: [&str; N]) -> Model {
        Model::of_atoms("t", atoms)
    }

    #[test]
    fn fragment_is_the_powerset() {
        let inst = DisjointSets::new(["a", "b", "c", "d"]).unwrap();
        assert_eq!(inst.fragment().len(), 16);
        assert!(inst.fragment().iter().all(|m| inst.is_member(m)));
        // Canonical ids follow the structural order of the carriers.
        assert_eq!(inst.fragment()[0].id(), "m0");
        assert!(inst.fragment()[0].is_empty());
    }

    #[test]
    fn universe_bound_is_enforced() {
        let err = DisjointSets::new(["a", "b", "c", "d", "e", "f", "g"]).unwrap_err();
        assert_eq!(err, InstanceError::UniverseTooLarge { got: 7, max: 6 });
    }

    #[test]
    fn amalgamation_is_disjointness_over_the_base() {
        let inst = DisjointSets::new(["a", "b", "c"]).unwrap();
        assert!(inst.nf(
            &model(["a"]),
            &model(["a", "b"]),
            &model(["a", "c"]),
            &model(["a", "b", "c"])
        ));
        assert!(!inst.nf(
            &model(["a"]),
            &model(["a", "b"]),
            &model(["a", "b"]),
            &model(["a", "b"])
        ));
    }

    #[test]
    fn prime_completion_is_the_union() {
        let inst = DisjointSets::new(["a", "b", "c"]).unwrap();
        let p = inst
            .prime_over_vee(&model([]), &model(["a"]), &model(["b"]), &model(["a", "b", "c"]))
            .unwrap();
        assert_eq!(p, model(["a", "b"]));
        // The result is canonicalized to the fragment member.
        assert!(p.id().starts_with('m'));
        assert!(inst
            .prime_over_vee(&model([]), &model(["a"]), &model(["b"]), &model(["a", "c"]))
            .is_none());
    }
}
