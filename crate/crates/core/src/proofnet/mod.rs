//! Pomset proof structures over `⊗`, `⅋` and `◁`: formulas, their
//! dicographs, axiom links, the alternating-circuit criterion and the
//! coherence-space interpretation by experiments.

mod criterion;
mod dicograph;
mod formula;
mod semantics;
mod structure;

pub use criterion::{
    ae_circuits, is_correct, is_correct_with_cap, Circuit, Verdict, DEFAULT_CIRCUIT_CAP,
};
pub use dicograph::{dicograph_of, Dicograph, RLink};
pub use formula::{parse_formula, Atom, Connective, Formula, Path};
pub use semantics::{
    catalog_interpretations, catalog_spaces, conclusion_space, experiments,
    semantic_correctness_check, AtomInterpretation, InterpretationOutcome, SemanticReport,
};
pub use structure::{all_matchings, parse_path, parse_structure, path_to_string, ProofStructure};

use crate::coherence::CohError;
use crate::syntax::ParseError;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ProofNetError {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error("invalid proof structure: {0}")]
    InvalidStructure(String),
    #[error("{count} atom occurrences exceed the circuit search cap of {cap}")]
    TooManyVertices { count: usize, cap: usize },
    #[error("no space given for variable {0}")]
    MissingInterpretation(String),
    #[error(transparent)]
    Coherence(#[from] CohError),
}
