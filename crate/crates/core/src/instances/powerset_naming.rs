//! Structures with a universe of point atoms (`u0`, `u1`, …) and name atoms
//! (`v0`, `v5`, …) where `v{mask}` is related to exactly the points whose bit
//! is set in `mask`. A member is a structure in which every subset of its
//! points has one and only one name.
//!
//! Two submodel orders are shipped. Variant 1 demands that a name in the
//! larger structure still names the same point set it named in the smaller
//! one; under it free amalgamation is leg containment plus disjointness over
//! the base, and the whole C group holds. Variant 2 is bare substructure
//! containment with the naive amalgamation relation (legs plus the name-set
//! condition); there two legs can share names beyond the base, which the C7
//! checker exposes as a replayable failure.

use std::collections::BTreeSet;

use crate::kernel::{Atom, AtomMap, ClassInstance, Content, Model};

use super::InstanceError;

#[derive(Clone, Copy, PartialEq, Eq)]
enum Sort {
    /// A point atom `u{i}`, carrying its index.
    Point(u32),
    /// A name atom `v{mask}`, carrying the point set it names globally.
    Name(u32),
}

fn classify(a: &Atom) -> Option<Sort> {
    if let Some(i) = a.as_str().strip_prefix('u') {
        return i.parse().ok().map(Sort::Point);
    }
    a.as_str().strip_prefix('v')?.parse().ok().map(Sort::Name)
}

fn point_atom(i: u32) -> Atom {
    Atom::new(format!("u{i}"))
}

fn name_atom(mask: u32) -> Atom {
    Atom::new(format!("v{mask}"))
}

/// The point mask and name list of a model's carrier; `None` on foreign atoms.
fn split(m: &Model) -> Option<(u32, Vec<u32>)> {
    let mut points = 0u32;
    let mut names = Vec::new();
    for a in m.carrier() {
        match classify(a)? {
            Sort::Point(i) if i < 32 => points |= 1 << i,
            Sort::Point(_) => return None,
            Sort::Name(mask) => names.push(mask),
        }
    }
    Some((points, names))
}

#[derive(Debug)]
pub struct PowersetNaming {
    u_max: usize,
    variant: u8,
    frag: Vec<Model>,
}

impl PowersetNaming {
    pub const MAX_POINTS: usize = 3;

    pub fn new(u_max: usize, variant: u8) -> Result<Self, InstanceError> {
        if u_max > Self::MAX_POINTS {
            return Err(InstanceError::UniverseTooLarge { got: u_max, max: Self::MAX_POINTS });
        }
        if !(variant == 1 || variant == 2) {
            return Err(InstanceError::BadVariant(variant));
        }
        let full = (1u32 << u_max) - 1;
        let mut carriers: Vec<BTreeSet<Atom>> = Vec::new();
        for points in 0..=full {
            // Every subset of the points needs exactly one name; enumerate all
            // ways of drawing those names from the global pool.
            let subsets: Vec<u32> = (0..=full).filter(|t| t & points == *t).collect();
            let mut partial: Vec<Vec<u32>> = vec![Vec::new()];
            for &t in &subsets {
                let candidates: Vec<u32> =
                    (0..=full).filter(|s| s & points == t).collect();
                partial = partial
                    .into_iter()
                    .flat_map(|chosen| {
                        candidates.iter().map(move |&c| {
                            let mut next = chosen.clone();
                            next.push(c);
                            next
                        })
                    })
                    .collect();
            }
            for names in partial {
                let mut carrier: BTreeSet<Atom> =
                    (0..u_max as u32).filter(|i| points >> i & 1 == 1).map(point_atom).collect();
                carrier.extend(names.into_iter().map(name_atom));
                carriers.push(carrier);
            }
        }
        carriers.sort();
        carriers.dedup();
        let frag = carriers
            .into_iter()
            .enumerate()
            .map(|(i, c)| Model::new(format!("m{i}"), c, Content::None))
            .collect();
        Ok(PowersetNaming { u_max, variant, frag })
    }

    pub fn variant(&self) -> u8 {
        self.variant
    }

    fn in_range(&self, sort: Sort) -> bool {
        match sort {
            Sort::Point(i) => (i as usize) < self.u_max,
            Sort::Name(mask) => mask < 1 << self.u_max,
        }
    }

    /// Variant-1 stability: every name of `m` names inside `n` the same point
    /// set it names inside `m`.
    fn names_stable(&self, m: &Model, n: &Model) -> bool {
        let (Some((points_m, names_m)), Some((points_n, _))) = (split(m), split(n)) else {
            return false;
        };
        names_m.iter().all(|s| s & points_n == s & points_m)
    }

    /// The naive amalgamation side condition: every name of `m` names inside
    /// `big` a point set lying inside `m`.
    fn name_sets_inside(&self, m: &Model, big: &Model) -> bool {
        let (Some((points_m, names_m)), Some((points_big, _))) = (split(m), split(big)) else {
            return false;
        };
        names_m.iter().all(|s| s & points_big & !points_m == 0)
    }
}

impl ClassInstance for PowersetNaming {
    fn name(&self) -> &str {
        "powerset_naming"
    }

    fn fragment(&self) -> &[Model] {
        &self.frag
    }

    // The full class has members with arbitrarily many points; this fragment
    // is a bounded window of it, so existential searches must stay inconclusive
    // when they exhaust the window.
    fn fragment_complete(&self) -> bool {
        false
    }

    fn submodels_complete(&self) -> bool {
        true
    }

    fn is_member(&self, m: &Model) -> bool {
        if *m.content() != Content::None {
            return false;
        }
        let Some((points, names)) = split(m) else {
            return false;
        };
        if !m.carrier().iter().all(|a| classify(a).is_some_and(|s| self.in_range(s))) {
            return false;
        }
        // Exactly one name per subset of the points.
        let full = (1u32 << self.u_max) - 1;
        (0..=full).filter(|t| t & points == *t).all(|t| {
            names.iter().filter(|s| *s & points == t).count() == 1
        })
    }

    fn is_sub(&self, m: &Model, n: &Model) -> bool {
        if !(self.is_member(m) && self.is_member(n) && m.is_carrier_subset(n)) {
            return false;
        }
        match self.variant {
            1 => self.names_stable(m, n),
            _ => true,
        }
    }

    fn nf(&self, m0: &Model, m1: &Model, m2: &Model, m3: &Model) -> bool {
        let legs = self.is_sub(m0, m1)
            && self.is_sub(m1, m3)
            && self.is_sub(m0, m2)
            && self.is_sub(m2, m3);
        if !legs {
            return false;
        }
        match self.variant {
            // Leg stability already pins every name; independence is literal
            // disjointness over the base.
            1 => m1.carrier_intersection(m2) == *m0.carrier(),
            // The naive relation: only the name-set side conditions.
            _ => self.name_sets_inside(m1, m3) && self.name_sets_inside(m2, m3),
        }
    }

    fn prime_over_vee(
        &self,
        _m0: &Model,
        m1: &Model,
        m2: &Model,
        ambient: &Model,
    ) -> Option<Model> {
        let (points1, names1) = split(m1)?;
        let (points2, names2) = split(m2)?;
        let (points_amb, names_amb) = split(ambient)?;
        let points = points1 | points2;
        if points & !points_amb != 0 {
            return None;
        }
        let taken: BTreeSet<u32> = names1.iter().chain(&names2).copied().collect();
        let full = (1u32 << self.u_max) - 1;
        let mut names: Vec<u32> = Vec::new();
        for t in (0..=full).filter(|t| t & points == *t) {
            let from1: Vec<u32> = names1.iter().copied().filter(|s| s & points == t).collect();
            let from2: Vec<u32> = names2.iter().copied().filter(|s| s & points == t).collect();
            let chosen = match (from1.as_slice(), from2.as_slice()) {
                ([a], [b]) if a == b => *a,
                ([a], []) => *a,
                ([], [b]) => *b,
                ([], []) => {
                    // Draw a fresh name from the ambient, stable on its points.
                    *names_amb
                        .iter()
                        .filter(|&&s| !taken.contains(&s) && s & points_amb == t)
                        .min()?
                }
                // Distinct legs naming one subset cannot share a completion.
                _ => return None,
            };
            names.push(chosen);
        }
        let mut carrier: BTreeSet<Atom> =
            (0..self.u_max as u32).filter(|i| points >> i & 1 == 1).map(point_atom).collect();
        carrier.extend(names.into_iter().map(name_atom));
        let fresh = Model::new("join", carrier, Content::None);
        if !self.is_member(&fresh) || !self.is_sub(&fresh, ambient) {
            return None;
        }
        match self.find_in_fragment(&fresh) {
            Some(i) => Some(self.frag[i].clone()),
            None => Some(fresh),
        }
    }

    fn is_iso_onto_image(&self, m: &Model, _n: &Model, map: &AtomMap) -> bool {
        let atoms: Vec<(Sort, Sort)> = match m
            .carrier()
            .iter()
            .map(|a| Some((classify(a)?, classify(map.get(a)?)?)))
            .collect::<Option<Vec<_>>>()
        {
            Some(v) => v,
            None => return false,
        };
        for (src, dst) in &atoms {
            for (src2, dst2) in &atoms {
                match ((src, dst), (src2, dst2)) {
                    ((Sort::Point(i), Sort::Point(j)), (Sort::Name(s), Sort::Name(t))) => {
                        if (s >> i & 1) != (t >> j & 1) {
                            return false;
                        }
                    }
                    ((Sort::Point(_), Sort::Name(_)), _)
                    | ((Sort::Name(_), Sort::Point(_)), _) => return false,
                    _ => {}
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
        let (Some(s), Some(d)) = (classify(src), classify(dst)) else {
            return false;
        };
        let consistent = |a: Sort, fa: Sort| match (a, fa, s, d) {
            (Sort::Point(i), Sort::Point(j), Sort::Name(x), Sort::Name(y))
            | (Sort::Name(x), Sort::Name(y), Sort::Point(i), Sort::Point(j)) => {
                (x >> i & 1) == (y >> j & 1)
            }
            _ => true,
        };
        match (s, d) {
            (Sort::Point(_), Sort::Point(_)) | (Sort::Name(_), Sort::Name(_)) => partial
                .iter()
                .all(|(a, fa)| match (classify(a), classify(fa)) {
                    (Some(ca), Some(cfa)) => consistent(ca, cfa),
                    _ => false,
                }),
            _ => false,
        }
    }
}
