//! Local runs: the projection of a run on a single agent.

use thiserror::Error;

use crate::config::{action_accepts, LocalConfig, Value};
use crate::protocol::{Action, LocalTest, MsgId, Op, Protocol, TransId};
use crate::words::Word;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum LocalStep {
    /// A broadcast or a local test.
    Internal(TransId),
    /// Reception of a message carrying `value`.
    Reception(TransId, Value),
}

impl LocalStep {
    pub fn transition(&self) -> TransId {
        match *self {
            LocalStep::Internal(t) | LocalStep::Reception(t, _) => t,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct LocalRun {
    pub start: LocalConfig,
    pub steps: Vec<LocalStep>,
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum LocalError {
    #[error("local step {index} is invalid: {reason}")]
    InvalidAt { index: usize, reason: String },
}

/// What one local step does, with the value involved.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LocalEvent {
    Broadcast { msg: MsgId, value: Value },
    Receive { msg: MsgId, value: Value },
    Test,
}

impl LocalRun {
    pub fn new(start: LocalConfig) -> Self {
        LocalRun { start, steps: Vec::new() }
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    /// Values held in the starting valuation.
    pub fn initial_values(&self) -> Vec<Value> {
        let mut v = self.start.regs.clone();
        v.sort_unstable();
        v.dedup();
        v
    }

    pub fn is_initial_value(&self, v: Value) -> bool {
        self.start.regs.contains(&v)
    }

    /// Values received during the run that are not initial, in first-reception order.
    pub fn non_initial_values(&self) -> Vec<Value> {
        let mut out = Vec::new();
        for s in &self.steps {
            if let LocalStep::Reception(_, v) = *s {
                if !self.is_initial_value(v) && !out.contains(&v) {
                    out.push(v);
                }
            }
        }
        out
    }

    /// A sub-run consisting of steps `from..to` starting from the configuration reached after `from` steps.
    pub fn slice(&self, p: &Protocol, from: usize, to: usize) -> Result<LocalRun, LocalError> {
        let prefix = LocalRun { start: self.start.clone(), steps: self.steps[..from].to_vec() };
        let start = replay_local(p, &prefix)?;
        Ok(LocalRun { start, steps: self.steps[from..to].to_vec() })
    }
}

/// Replays a local run and returns every event.
pub fn local_events(p: &Protocol, u: &LocalRun) -> Result<(LocalConfig, Vec<LocalEvent>), LocalError> {
    let mut c = u.start.clone();
    let mut events = Vec::with_capacity(u.steps.len());
    for (index, s) in u.steps.iter().enumerate() {
        let fail = |reason: &str| LocalError::InvalidAt { index, reason: reason.to_string() };
        let t = p.transitions.get(s.transition()).ok_or_else(|| fail("unknown transition"))?;
        if t.from != c.state {
            return Err(fail("wrong source state"));
        }
        match (*s, t.op) {
            (LocalStep::Internal(_), Op::Br { msg, reg }) => {
                events.push(LocalEvent::Broadcast { msg, value: c.regs[reg - 1] });
            }
            (LocalStep::Internal(_), Op::Loc { left, right, test }) => {
                if !p.local_tests {
                    return Err(fail("local tests are not enabled"));
                }
                if (c.regs[left - 1] == c.regs[right - 1]) != (test == LocalTest::Eq) {
                    return Err(fail("local test fails"));
                }
                events.push(LocalEvent::Test);
            }
            (LocalStep::Reception(_, value), Op::Rec { msg, reg, action }) => {
                if !action_accepts(action, c.regs[reg - 1], value) {
                    return Err(fail("reception test fails"));
                }
                if action == Action::Down {
                    c.regs[reg - 1] = value;
                }
                events.push(LocalEvent::Receive { msg, value });
            }
            _ => return Err(fail("step kind does not match the transition")),
        }
        c.state = t.to;
    }
    Ok((c, events))
}

/// Final local configuration of a local run.
pub fn replay_local(p: &Protocol, u: &LocalRun) -> Result<LocalConfig, LocalError> {
    local_events(p, u).map(|(c, _)| c)
}

/// States visited by a local run, including the start.
pub fn visited_states(p: &Protocol, u: &LocalRun) -> Vec<crate::protocol::StateId> {
    let mut out = vec![u.start.state];
    out.extend(u.steps.iter().map(|s| p.transitions[s.transition()].to));
    out
}

/// Message types received with value `v`.
pub fn v_input(events: &[LocalEvent], v: Value) -> Word {
    events
        .iter()
        .filter_map(|e| match *e {
            LocalEvent::Receive { msg, value } if value == v => Some(msg),
            _ => None,
        })
        .collect()
}

/// Message types broadcast with value `v`.
pub fn v_output(events: &[LocalEvent], v: Value) -> Word {
    events
        .iter()
        .filter_map(|e| match *e {
            LocalEvent::Broadcast { msg, value } if value == v => Some(msg),
            _ => None,
        })
        .collect()
}

/// Convenience wrapper: v-input of a local run.
pub fn local_v_input(p: &Protocol, u: &LocalRun, v: Value) -> Result<Word, LocalError> {
    Ok(v_input(&local_events(p, u)?.1, v))
}

/// Convenience wrapper: v-output of a local run.
pub fn local_v_output(p: &Protocol, u: &LocalRun, v: Value) -> Result<Word, LocalError> {
    Ok(v_output(&local_events(p, u)?.1, v))
}
