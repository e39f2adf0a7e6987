//! Equational definitions of quasigroups.
//!
//! An algebra `(Q, *, \, /)` can be required to satisfy any subset of six
//! identities (tagged A, C, B, D, T, R). This crate checks those identities on
//! finite algebras, searches for finite countermodels, replays the known
//! equational derivations between them, and classifies all 64 subsets as
//! quasigroup-defining or not.
//!
//! Module map:
//!
//! - [`terms`]: terms over `{*, \, /}`, parsing, substitution, positions.
//! - [`identities`]: the six canonical identities and satisfaction checks.
//! - [`algebra`]: finite algebras as Cayley table triples, Latin squares.
//! - [`model_search`]: finite model finder and counter.
//! - [`derivations`]: checkable rewrite derivations and their closure.
//! - [`classification`]: the 64-subset report.
//! - [`witness`]: infinite witnesses on the integers.

pub mod algebra;
pub mod classification;
pub mod derivations;
pub mod identities;
pub mod model_search;
pub mod terms;
pub mod witness;

pub use algebra::{from_latin_square, is_latin, AlgebraError, BinaryTable, FiniteAlgebra};
pub use classification::{
    classify_all, classify_subset, corollary_sets, ClassificationEntry, ClassificationReport, ClassifyParams, Status,
};
pub use derivations::{
    builtin, builtin_derivations, closure, closure_trace, verify_derivation, verify_step, Derivation, Direction,
    RewriteStep,
};
pub use identities::{canonical_identities, holds, satisfied_identities, violating_assignment, Identity, IdentitySet, Tag};
pub use model_search::{
    count_models, entailed_finitely, find_model, FiniteEntailment, Outcome, SearchError, SearchQuery, SearchResult,
};
pub use terms::{evaluate, parse_term, Assignment, Op, Position, Step, Substitution, Term, Var};
pub use witness::{check_witness, IntegerWitness, WitnessReport};
