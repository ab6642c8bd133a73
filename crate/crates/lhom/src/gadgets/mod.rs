//! Hardness-reduction building blocks: avoiding walks, corner triples, the
//! relation gadgets built from them, and the CNF-SAT reduction compilers.

mod build;
mod reduce;
mod walks;

pub use build::{
    build_assignment, build_detector, build_nand2, build_or_k, build_switching,
    build_walk_path, compose_path_gadgets, extender_path, synthesize_distinguisher, Gadget,
};
pub use reduce::{
    ctw_width_constant, layout_cut_profile, reduce_sat_ctw, reduce_sat_fvs, validate_class_cg,
    Certificate, ClauseRecord, ReductionOutput, ReductionParams,
};
pub use walks::{find_avoiding_walks, find_corner_triple, CornerTriple, TripleCase, Walk};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GadgetError {
    #[error("precondition violated: {0}")]
    PreconditionViolated(String),
    #[error("required walk family not found: {0}")]
    MissingWalk(String),
    #[error("distinguisher synthesis budget exceeded after {explored} profile states")]
    SynthesisBudgetExceeded { explored: usize },
    /// The target admits no corner triple; the caller's preconditions
    /// (connected, bipartite, undecomposable, not complement of circular-arc)
    /// cannot all hold.
    #[error("no corner triple exists; target preconditions violated")]
    NoTriple,
    #[error("triple case unsupported for this construction: {0}")]
    TripleCaseUnsupported(String),
    /// A built gadget failed its own exhaustive verification; surfaced
    /// loudly since downstream soundness depends on it.
    #[error("gadget {name} failed verification: {detail}")]
    VerificationFailed { name: String, detail: String },
}
