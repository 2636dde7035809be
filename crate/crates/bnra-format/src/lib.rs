//! Text formats: the protocol language, JSON witnesses, and the inputs of
//! the reductions.

pub mod dsl;
pub mod inputs;
pub mod json;

pub use dsl::{parse_protocol, print_protocol, Diagnostic, ProtocolDocument};
pub use inputs::{parse_dimacs, parse_lcs, parse_minsky, print_dimacs, print_lcs, print_minsky};
pub use json::{
    deserialize_abstract_run, deserialize_partial_run, deserialize_run, deserialize_tree, serialize_abstract_run,
    serialize_partial_run, serialize_run, serialize_tree, FORMAT_VERSION,
};
