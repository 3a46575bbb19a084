//! The class abstraction and its checkers.
//!
//! A class is presented by a finite fragment of concrete models together with a
//! strong-submodel order `is_sub`, a free-amalgamation relation `nf`, and a prime
//! completion constructor `prime_over_vee`. Models are structurally equal (carrier
//! plus content, ids ignored), and instances name atoms canonically so that carrier
//! intersection is literal set intersection.
//!
//! Checkers sweep the fragment exhaustively for universally quantified laws and
//! report `FAIL` with a replayable counterexample tuple. Existentially quantified
//! laws (completion and uniqueness searches) are bounded by the fragment: a fruitless
//! search is `INCONCLUSIVE` unless the instance declares the relevant part of the
//! fragment complete, so truncation is never misread as refutation.

mod checks;
mod diagram;
mod instance;
mod model;
mod report;

pub use checks::{
    check_axioms_a, check_axioms_c, check_axioms_d, check_prop_base_monotonicity,
    check_theorem_transind, check_theorem_transprime, replay_counterexample,
};
pub use diagram::{
    compatible_over, cpr_finite, is_compatibility_prime, stable_diagram_embeddings,
    CompatibilityWitness, Diagram, DiagramEmbedding, FiniteChain,
};
pub use instance::{
    apply_map, embeddings_between, embeddings_extending, exists_embedding_extending, identity_map,
    is_k_embedding, is_prime_over_vee_bounded, merge_maps, restrict_map, stable_vee_embeddings,
    ClassInstance, PrimalityFailure, VeeEmbedding,
};
pub use model::{Atom, AtomMap, Content, Embedding, Model};
pub use report::{AxiomEntry, AxiomReport, Verdict};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum KernelError {
    #[error("chain is empty")]
    EmptyChain,
    #[error("models do not form an increasing chain")]
    NotAChain,
    #[error("embedding data is not a stable embedding of the diagram")]
    InvalidEmbedding,
    #[error("diagram parts do not form a meet-indexed order")]
    MalformedDiagram,
    #[error("unknown model id {0}")]
    UnknownModel(String),
    #[error("unknown axiom id {0}")]
    UnknownAxiom(String),
}
