pub mod coherence;
pub mod flag;
pub mod hyper;
pub mod proofnet;
pub mod suites;
pub mod syntax;
pub mod trees;
