//! Concrete classes with finite, exhaustively checkable fragments.
//!
//! Each instance names its atoms canonically so that structural model equality
//! and literal carrier intersection coincide with the intended semantics:
//!
//! * [`DisjointSets`] — members are subsets of a fixed universe, amalgamation
//!   is disjointness over the base; the well-behaved oracle instance.
//! * [`VectorSpaceF2`] — members are subspaces of a small vector space over
//!   the two-element field, amalgamation is dimension additivity.
//! * [`PowersetNaming`] — structures where every subset of a finite universe
//!   carries exactly one name, in two submodel-order variants with different
//!   axiom-compliance profiles.
//! * [`QChainFixture`] — a four-member fixture with two incompatible
//!   extensions of a chain, exercising the compatibility machinery.

mod disjoint_sets;
mod powerset_naming;
mod q_chain;
mod vector_space_f2;

pub use disjoint_sets::DisjointSets;
pub use powerset_naming::PowersetNaming;
pub use q_chain::QChainFixture;
pub use vector_space_f2::VectorSpaceF2;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum InstanceError {
    #[error("universe has {got} atoms, the supported maximum is {max}")]
    UniverseTooLarge { got: usize, max: usize },
    #[error("dimension {got} exceeds the supported maximum {max}")]
    DimTooLarge { got: usize, max: usize },
    #[error("naming variant must be 1 or 2, got {0}")]
    BadVariant(u8),
}
