//! Members are the subspaces of a small vector space over the two-element
//! field. Atoms name vectors canonically (`v0` is zero, `v5` is the vector
//! with bit pattern 101), so carrier intersection is subspace intersection.
//! A span is freely amalgamated when its sum has additive dimension and the
//! legs meet exactly in the base; the prime completion is the subspace sum.

use std::collections::BTreeSet;

use crate::kernel::{Atom, AtomMap, ClassInstance, Content, Model};

use super::InstanceError;

#[derive(Debug)]
pub struct VectorSpaceF2 {
    dim: usize,
    frag: Vec<Model>,
}

fn vector_atom(bits: u32) -> Atom {
    Atom::new(format!("v{bits}"))
}

/// The bit pattern a vector atom names, or `None` for a foreign atom.
fn atom_bits(a: &Atom) -> Option<u32> {
    a.as_str().strip_prefix('v')?.parse().ok()
}

fn carrier_bits(m: &Model) -> Option<Vec<u32>> {
    m.carrier().iter().map(atom_bits).collect()
}

fn closed_under_sum(vectors: &[u32]) -> bool {
    let mut present = 0u32;
    for &v in vectors {
        present |= 1 << v;
    }
    present & 1 == 1
        && vectors.iter().all(|&a| vectors.iter().all(|&b| present >> (a ^ b) & 1 == 1))
}

fn span(vectors: &BTreeSet<u32>) -> BTreeSet<u32> {
    let mut out: BTreeSet<u32> = [0].into();
    for &v in vectors {
        if out.contains(&v) {
            continue;
        }
        let grown: BTreeSet<u32> = out.iter().map(|w| w ^ v).collect();
        out.extend(grown);
    }
    out
}

impl VectorSpaceF2 {
    pub const MAX_DIM: usize = 4;

    pub fn new(dim: usize) -> Result<Self, InstanceError> {
        if dim > Self::MAX_DIM {
            return Err(InstanceError::DimTooLarge { got: dim, max: Self::MAX_DIM });
        }
        let count = 1u32 << dim;
        let mut carriers: Vec<BTreeSet<Atom>> = Vec::new();
        // Sweep all vector subsets; keep the ones closed under addition.
        for mask in 0u64..1 << count {
            let vectors: Vec<u32> = (0..count).filter(|v| mask >> v & 1 == 1).collect();
            if closed_under_sum(&vectors) {
                carriers.push(vectors.into_iter().map(vector_atom).collect());
            }
        }
        carriers.sort();
        let frag = carriers
            .into_iter()
            .enumerate()
            .map(|(i, c)| Model::new(format!("m{i}"), c, Content::None))
            .collect();
        Ok(VectorSpaceF2 { dim, frag })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }
}

impl ClassInstance for VectorSpaceF2 {
    fn name(&self) -> &str {
        "vector_space_f2"
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
        if *m.content() != Content::None {
            return false;
        }
        match carrier_bits(m) {
            Some(bits) => {
                bits.iter().all(|&v| v < 1 << self.dim) && closed_under_sum(&bits)
            }
            None => false,
        }
    }

    fn is_sub(&self, m: &Model, n: &Model) -> bool {
        self.is_member(m) && self.is_member(n) && m.is_carrier_subset(n)
    }

    fn nf(&self, m0: &Model, m1: &Model, m2: &Model, m3: &Model) -> bool {
        if !(self.is_sub(m0, m1)
            && self.is_sub(m1, m3)
            && self.is_sub(m0, m2)
            && self.is_sub(m2, m3))
        {
            return false;
        }
        if m1.carrier_intersection(m2) != *m0.carrier() {
            return false;
        }
        // Dimension additivity: |M1 + M2| * |M0| = |M1| * |M2| for subspaces.
        let bits1: BTreeSet<u32> = carrier_bits(m1).unwrap().into_iter().collect();
        let bits2: BTreeSet<u32> = carrier_bits(m2).unwrap().into_iter().collect();
        let sum = span(&bits1.union(&bits2).copied().collect());
        sum.len() * m0.len() == m1.len() * m2.len()
    }

    fn prime_over_vee(
        &self,
        _m0: &Model,
        m1: &Model,
        m2: &Model,
        ambient: &Model,
    ) -> Option<Model> {
        let bits1: BTreeSet<u32> = carrier_bits(m1)?.into_iter().collect();
        let bits2: BTreeSet<u32> = carrier_bits(m2)?.into_iter().collect();
        let sum: BTreeSet<Atom> =
            span(&bits1.union(&bits2).copied().collect()).into_iter().map(vector_atom).collect();
        if !sum.iter().all(|a| ambient.contains_atom(a)) {
            return None;
        }
        let fresh = Model::new("sum", sum, Content::None);
        match self.find_in_fragment(&fresh) {
            Some(i) => Some(self.frag[i].clone()),
            None => Some(fresh),
        }
    }

    fn is_iso_onto_image(&self, m: &Model, _n: &Model, map: &AtomMap) -> bool {
        // Isomorphisms of subspaces are the linear carrier maps.
        let Some(bits) = carrier_bits(m) else {
            return false;
        };
        let image = |v: u32| map.get(&vector_atom(v)).and_then(atom_bits);
        for &a in &bits {
            for &b in &bits {
                let (Some(fa), Some(fb), Some(fab)) = (image(a), image(b), image(a ^ b)) else {
                    return false;
                };
                if fab != fa ^ fb {
                    return false;
                }
            }
        }
        true
    }

    fn atom_step_ok(
        &self,
        _m: &Model,
        _n: &Model,
        partial: &AtomMap,
        src: &Atom,
        dst: &Atom,
    ) -> bool {
        // Reject extensions that already violate linearity.
        let (Some(s), Some(d)) = (atom_bits(src), atom_bits(dst)) else {
            return false;
        };
        if (s == 0) != (d == 0) {
            return false;
        }
        for (a, fa) in partial {
            let (Some(a), Some(fa)) = (atom_bits(a), atom_bits(fa)) else {
                return false;
            };
            if let Some(f_sum) = partial.get(&vector_atom(s ^ a)) {
                if atom_bits(f_sum) != Some(d ^ fa) {
                    return false;
                }
            }
        }
        true
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::embeddings_between;

    fn subspace(vectors: &[u32]) -> Model {
        Model::new("t", vectors.iter().map(|&v| vector_atom(v)).collect(), Content::None)
    }

    #[test]
    fn subspace_counts_match_the_gaussian_coefficients() {
        assert_eq!(VectorSpaceF2::new(2).unwrap().fragment().len(), 5);
        assert_eq!(VectorSpaceF2::new(3).unwrap().fragment().len(), 16);
        assert_eq!(VectorSpaceF2::new(4).unwrap().fragment().len(), 67);
        assert_eq!(
            VectorSpaceF2::new(5).unwrap_err(),
            InstanceError::DimTooLarge { got: 5, max: 4 }
        );
    }

    #[test]
    fn amalgamation_is_dimension_additivity() {
        let inst = VectorSpaceF2::new(2).unwrap();
        let zero = subspace(&[0]);
        let e1 = subspace(&[0, 1]);
        let e2 = subspace(&[0, 2]);
        let diag = subspace(&[0, 3]);
        let full = subspace(&[0, 1, 2, 3]);
        assert!(inst.nf(&zero, &e1, &e2, &full));
        assert!(!inst.nf(&zero, &e1, &e1, &full));
        // Two distinct lines are independent even when neither is an axis.
        assert!(inst.nf(&zero, &e1, &diag, &full));
    }

    #[test]
    fn prime_completion_is_the_subspace_sum() {
        let inst = VectorSpaceF2::new(2).unwrap();
        let p = inst
            .prime_over_vee(
                &subspace(&[0]),
                &subspace(&[0, 1]),
                &subspace(&[0, 2]),
                &subspace(&[0, 1, 2, 3]),
            )
            .unwrap();
        assert_eq!(p, subspace(&[0, 1, 2, 3]));
    }

    #[test]
    fn embeddings_are_exactly_the_injective_linear_maps() {
        let inst = VectorSpaceF2::new(2).unwrap();
        let line = subspace(&[0, 1]);
        let full = subspace(&[0, 1, 2, 3]);
        // A line embeds onto each of the three lines of the plane.
        assert_eq!(embeddings_between(&inst, &line, &full).len(), 3);
        // GL(2, F2) has six elements.
        assert_eq!(embeddings_between(&inst, &full, &full).len(), 6);
    }
}
