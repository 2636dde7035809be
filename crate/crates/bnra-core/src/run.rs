//! Runs, partial runs and the replay oracle.

use std::collections::{BTreeMap, HashMap};

use thiserror::Error;

use crate::config::{apply_step_in_place, receive, Agent, Configuration, StepDescriptor, StepError, Value};
use crate::protocol::{MsgId, Op, Protocol, StateId, TransId};
use crate::words::Word;

/// A sequence of steps from an initial configuration.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Run {
    pub initial: Configuration,
    pub steps: Vec<StepDescriptor>,
}

/// A reception of `(message, value)` that no agent of the run broadcasts.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Unmatched {
    pub message: MsgId,
    pub value: Value,
    pub receptions: BTreeMap<Agent, TransId>,
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum PartialStep {
    Step(StepDescriptor),
    Unmatched(Unmatched),
}

/// A run whose steps may include unmatched receptions.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PartialRun {
    pub initial: Configuration,
    pub steps: Vec<PartialStep>,
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum ReplayError {
    #[error("the starting configuration is not initial")]
    NotInitial,
    #[error("step {index} is invalid: {reason}")]
    InvalidAt { index: usize, reason: StepError },
}

impl Run {
    pub fn empty(initial: Configuration) -> Self {
        Run { initial, steps: Vec::new() }
    }

    pub fn agent_count(&self) -> usize {
        self.initial.len()
    }

    pub fn to_partial(&self) -> PartialRun {
        PartialRun { initial: self.initial.clone(), steps: self.steps.iter().cloned().map(PartialStep::Step).collect() }
    }

    /// Keeps the first `len` steps.
    pub fn truncated(&self, len: usize) -> Run {
        Run { initial: self.initial.clone(), steps: self.steps[..len.min(self.steps.len())].to_vec() }
    }
}

impl PartialRun {
    /// The run, if no step is an unmatched reception.
    pub fn to_run(&self) -> Option<Run> {
        let steps = self
            .steps
            .iter()
            .map(|s| match s {
                PartialStep::Step(d) => Some(d.clone()),
                PartialStep::Unmatched(_) => None,
            })
            .collect::<Option<Vec<_>>>()?;
        Some(Run { initial: self.initial.clone(), steps })
    }

    pub fn unmatched_count(&self) -> usize {
        self.steps.iter().filter(|s| matches!(s, PartialStep::Unmatched(_))).count()
    }
}

/// Replays an initial run and returns its final configuration.
pub fn replay(p: &Protocol, run: &Run) -> Result<Configuration, ReplayError> {
    if !run.initial.is_initial(p) {
        return Err(ReplayError::NotInitial);
    }
    replay_from(p, &run.initial, &run.steps)
}

/// Replays steps from an arbitrary configuration.
pub fn replay_from(p: &Protocol, start: &Configuration, steps: &[StepDescriptor]) -> Result<Configuration, ReplayError> {
    let mut g = start.clone();
    for (index, s) in steps.iter().enumerate() {
        apply_step_in_place(p, &mut g, s).map_err(|reason| ReplayError::InvalidAt { index, reason })?;
    }
    Ok(g)
}

/// Every configuration of a replayed run, starting with the initial one.
pub fn replay_trace(p: &Protocol, run: &Run) -> Result<Vec<Configuration>, ReplayError> {
    if !run.initial.is_initial(p) {
        return Err(ReplayError::NotInitial);
    }
    let mut out = vec![run.initial.clone()];
    let mut g = run.initial.clone();
    for (index, s) in run.steps.iter().enumerate() {
        apply_step_in_place(p, &mut g, s).map_err(|reason| ReplayError::InvalidAt { index, reason })?;
        out.push(g.clone());
    }
    Ok(out)
}

/// Applies an unmatched reception in place.
pub fn apply_unmatched(p: &Protocol, g: &mut Configuration, u: &Unmatched) -> Result<(), StepError> {
    for (&a, &t) in &u.receptions {
        receive(p, &mut g.agents, a, t, u.message, u.value)?;
    }
    Ok(())
}

/// Replays an initial partial run.
pub fn replay_partial(p: &Protocol, run: &PartialRun) -> Result<Configuration, ReplayError> {
    if !run.initial.is_initial(p) {
        return Err(ReplayError::NotInitial);
    }
    let mut g = run.initial.clone();
    for (index, s) in run.steps.iter().enumerate() {
        let r = match s {
            PartialStep::Step(d) => apply_step_in_place(p, &mut g, d),
            PartialStep::Unmatched(u) => apply_unmatched(p, &mut g, u),
        };
        r.map_err(|reason| ReplayError::InvalidAt { index, reason })?;
    }
    Ok(g)
}

/// One observable event of a partial run, with the value it carries.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RunEvent {
    Broadcast { index: usize, agent: Agent, msg: MsgId, value: Value },
    Unmatched { index: usize, msg: MsgId, value: Value },
    Silent { index: usize },
}

/// Events of a partial run; fails if the run does not replay.
pub fn run_events(p: &Protocol, run: &PartialRun) -> Result<Vec<RunEvent>, ReplayError> {
    let mut g = run.initial.clone();
    let mut out = Vec::with_capacity(run.steps.len());
    for (index, s) in run.steps.iter().enumerate() {
        let err = |reason| ReplayError::InvalidAt { index, reason };
        match s {
            PartialStep::Step(d) => {
                let ev = match p.transitions.get(d.transition).map(|t| t.op) {
                    Some(Op::Br { msg, reg }) if d.broadcaster < g.len() => {
                        RunEvent::Broadcast { index, agent: d.broadcaster, msg, value: g.agents[d.broadcaster].regs[reg - 1] }
                    }
                    _ => RunEvent::Silent { index },
                };
                apply_step_in_place(p, &mut g, d).map_err(err)?;
                out.push(ev);
            }
            PartialStep::Unmatched(u) => {
                apply_unmatched(p, &mut g, u).map_err(err)?;
                out.push(RunEvent::Unmatched { index, msg: u.message, value: u.value });
            }
        }
    }
    Ok(out)
}

/// Message types broadcast with value `v`, in order.
pub fn run_v_output(events: &[RunEvent], v: Value) -> Word {
    events
        .iter()
        .filter_map(|e| match *e {
            RunEvent::Broadcast { msg, value, .. } if value == v => Some(msg),
            _ => None,
        })
        .collect()
}

/// Message types of unmatched receptions with value `v`, in order.
pub fn run_v_input(events: &[RunEvent], v: Value) -> Word {
    events
        .iter()
        .filter_map(|e| match *e {
            RunEvent::Unmatched { msg, value, .. } if value == v => Some(msg),
            _ => None,
        })
        .collect()
}

/// Renames agents and values of a partial run. Agents are shifted by
/// `agent_offset`; values not in `values` are kept.
pub fn rename_partial(run: &PartialRun, agent_offset: usize, values: &HashMap<Value, Value>) -> PartialRun {
    let mv = |v: Value| values.get(&v).copied().unwrap_or(v);
    let shift = |m: &BTreeMap<Agent, TransId>| m.iter().map(|(&a, &t)| (a + agent_offset, t)).collect();
    PartialRun {
        initial: Configuration {
            agents: run
                .initial
                .agents
                .iter()
                .map(|l| crate::config::LocalConfig { state: l.state, regs: l.regs.iter().map(|&v| mv(v)).collect() })
                .collect(),
        },
        steps: run
            .steps
            .iter()
            .map(|s| match s {
                PartialStep::Step(d) => PartialStep::Step(StepDescriptor {
                    broadcaster: d.broadcaster + agent_offset,
                    transition: d.transition,
                    receptions: shift(&d.receptions),
                }),
                PartialStep::Unmatched(u) => {
                    PartialStep::Unmatched(Unmatched { message: u.message, value: mv(u.value), receptions: shift(&u.receptions) })
                }
            })
            .collect(),
    }
}

/// The copycat construction: a second copy of `run` on fresh agents and
/// values, interleaved step by step with the original.
pub fn copycat_double(run: &Run) -> Run {
    let n = run.agent_count();
    let offset = run.initial.max_value().map_or(0, |m| m + 1);
    let mut initial = run.initial.clone();
    for l in &run.initial.agents {
        initial.agents.push(crate::config::LocalConfig { state: l.state, regs: l.regs.iter().map(|v| v + offset).collect() });
    }
    let mut steps = Vec::with_capacity(2 * run.steps.len());
    for s in &run.steps {
        steps.push(s.clone());
        steps.push(StepDescriptor {
            broadcaster: s.broadcaster + n,
            transition: s.transition,
            receptions: s.receptions.iter().map(|(&a, &t)| (a + n, t)).collect(),
        });
    }
    Run { initial, steps }
}

/// Length of the shortest prefix whose final configuration covers `q`.
pub fn first_cover(p: &Protocol, run: &Run, q: StateId) -> Option<usize> {
    let trace = replay_trace(p, run).ok()?;
    trace.iter().position(|g| g.covers(q))
}
