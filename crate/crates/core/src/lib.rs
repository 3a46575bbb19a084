//! Finite workbench for amalgamation classes.
//!
//! The library has four layers:
//!
//! * [`tree`]: prefix-closed finite index trees, their enumerations (order-compatible
//!   listings), adjacent-transposition neighbor moves between enumerations, ideals, and
//!   quotient trees with explicit meet tables.
//! * [`kernel`]: the class abstraction (membership, strong submodel order, free
//!   amalgamation relation, prime completions) together with exhaustive and bounded
//!   axiom checkers producing replayable JSON reports.
//! * [`instances`]: small concrete classes used as test beds: finite sets with disjoint
//!   amalgamation, subspaces of a finite binary vector space, and a two-sorted naming
//!   class with two candidate strong-submodel orders.
//! * [`loose`]: loose trees (models assigned to tree nodes inside an explicit ambient),
//!   witness sequences for freeness, enumeration-change transforms, node omission,
//!   quotient checks, and local-freeness and prime-completion analysis.
//!
//! Everything operates on finite fragments. Checkers never report a failure that is an
//! artifact of fragment truncation: existential searches that exhaust the fragment
//! without a verdict report `INCONCLUSIVE` instead of `FAIL`.

pub mod instances;
pub mod kernel;
pub mod loose;
pub mod tree;
