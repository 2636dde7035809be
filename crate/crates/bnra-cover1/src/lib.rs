//! Coverability for one-register protocols.
//!
//! The abstraction follows one value at a time: its *boss* (the agent that
//! owned the value initially), its *clique* (states reached by other agents
//! holding the value) and the set `S` of states already known to be
//! coverable by arbitrarily many agents. A gang reset folds the gang into `S`
//! and starts following a fresh value.

mod abstraction;
mod concretize;
mod stateset;

pub use abstraction::{
    abstract_successors, clique_succ, decide_cover1, length_bound, remove_disequality, replay_abstract, AbstractConfig,
    AbstractRun, Cover1Error, Decision, StepKind,
};
pub use concretize::{concretize, ConcretizeError};
pub use stateset::StateSet;
