//! Unfolding trees: finite certificates of coverability.
//!
//! A node pairs the local run of one agent with a specification of what that
//! agent does for its parent. Boss nodes broadcast a word with one of their
//! own values; follower nodes broadcast one message with a value they
//! received. [`tree_to_run`] turns a valid tree into a run and
//! [`run_to_tree_signature`] goes the other way for signature protocols.

mod decomposition;
mod extract;
pub mod fixtures;
mod synth;
mod tree;

use thiserror::Error;

pub use decomposition::{admits_decomposition, Decomposition};
pub use extract::{run_to_tree_signature, truncate_to_cover};
pub use synth::{tree_to_run, Synthesized};
pub use tree::{
    is_coverability_witness, minimize_tree, validate_signature_tree, validate_tree, Condition, InitialAnnotation, Spec, TreeNode,
    Violation,
};

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum TreeError {
    #[error("the protocol is not a signature protocol")]
    NotSignature,
    #[error("invalid run: {0}")]
    InvalidRun(String),
    #[error("invalid tree: {} violation(s)", .0.len())]
    InvalidTree(Vec<Violation>),
    #[error("internal invariant failure: {0}")]
    Internal(String),
}
