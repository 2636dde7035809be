//! Reductions into coverability and TARGET problems, each with a
//! brute-force oracle for its source problem and a witness-run builder.

mod chain;
pub mod lcs;
pub mod loceq;
pub mod minsky;
pub mod sat;

use thiserror::Error;

pub use lcs::{fin_state, lcs_reach_bounded, lcs_to_protocol, lcs_witness_to_run, Lcs, LcsOp, LcsRule, LcsStep};
pub use loceq::{eliminate_local_equality, funnel_targets, lift_targets, lifted_name, MAX_REGISTERS};
pub use minsky::{
    minsky_exec_to_run, minsky_run_bounded, minsky_to_protocol, MinskyConfig, MinskyExecution, MinskyMachine, MinskyOp,
    MinskyRule, DONE,
};
pub use sat::{brute_force_sat, literal_name, sat_to_protocol, Cnf3};

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum ReduceError {
    #[error("malformed input: {0}")]
    Malformed(String),
    #[error("input too large: {0}")]
    TooLarge(String),
    #[error("{0} registers exceed the supported bound of 4")]
    RegisterBoundExceeded(usize),
    #[error("invalid witness: {0}")]
    InvalidWitness(String),
    #[error("internal error: {0}")]
    Internal(String),
}

/// Names usable inside generated state and message names.
pub(crate) fn is_plain_name(s: &str) -> bool {
    !s.is_empty() && s.chars().all(|c| c.is_ascii_alphanumeric() || c == '_')
}
