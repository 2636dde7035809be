//! Concrete semantics of broadcast networks of register automata (BNRA).
//!
//! A [`Protocol`] is run by any number of identical agents, each holding a
//! finite number of registers. Steps are broadcasts received by any subset of
//! the other agents; [`replay`] is the validity oracle for every run built
//! elsewhere in the workspace.

pub mod canon;
pub mod config;
pub mod local;
pub mod protocol;
pub mod run;
pub mod samples;
pub mod words;

pub use canon::{canonicalize, canonicalize_with_order, CanonMode, Canonical};
pub use config::{
    action_accepts, apply_step, apply_step_in_place, enabled_steps, enabled_steps_with, initial_configuration, outgoing, Agent,
    ConfigError, Configuration, LocalConfig, StepDescriptor, StepError, Value,
};
pub use local::{
    local_events, local_v_input, local_v_output, replay_local, v_input, v_output, visited_states, LocalError, LocalEvent,
    LocalRun, LocalStep,
};
pub use protocol::{Action, Diagnostic, LocalTest, Location, MsgId, Op, Protocol, ProtocolBuilder, StateId, TransId, Transition};
pub use run::{
    apply_unmatched, copycat_double, first_cover, rename_partial, replay, replay_from, replay_partial, replay_trace, run_events,
    run_v_input, run_v_output, PartialRun, PartialStep, ReplayError, Run, RunEvent, Unmatched,
};
pub use words::{embedding, subword, Word};

/// Checks every protocol invariant; empty means valid.
pub fn validate_protocol(p: &Protocol) -> Vec<Diagnostic> {
    p.validate()
}
