//! Configurations and single steps.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::protocol::{Action, LocalTest, Op, Protocol, StateId, TransId};

pub type Agent = usize;
pub type Value = u64;

/// State and register valuation of one agent. `regs[i]` holds register `i + 1`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct LocalConfig {
    pub state: StateId,
    pub regs: Vec<Value>,
}

/// A configuration over agents `0..n`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Configuration {
    pub agents: Vec<LocalConfig>,
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum ConfigError {
    #[error("invalid agent count: at least one agent is required")]
    InvalidAgentCount,
}

impl Configuration {
    pub fn len(&self) -> usize {
        self.agents.len()
    }

    pub fn is_empty(&self) -> bool {
        self.agents.is_empty()
    }

    pub fn state(&self, a: Agent) -> StateId {
        self.agents[a].state
    }

    pub fn covers(&self, q: StateId) -> bool {
        self.agents.iter().any(|l| l.state == q)
    }

    pub fn all_in(&self, q: StateId) -> bool {
        self.agents.iter().all(|l| l.state == q)
    }

    /// All agents in the initial state with pairwise-distinct values.
    pub fn is_initial(&self, p: &Protocol) -> bool {
        let mut seen = std::collections::HashSet::new();
        self.agents.iter().all(|l| l.state == p.initial && l.regs.len() == p.registers && l.regs.iter().all(|v| seen.insert(*v)))
    }

    pub fn values(&self) -> impl Iterator<Item = Value> + '_ {
        self.agents.iter().flat_map(|l| l.regs.iter().copied())
    }

    pub fn max_value(&self) -> Option<Value> {
        self.values().max()
    }
}

/// Initial configuration with `n` agents; register `i` of agent `a` holds `a·r + (i−1)`.
pub fn initial_configuration(p: &Protocol, n: usize) -> Result<Configuration, ConfigError> {
    if n == 0 {
        return Err(ConfigError::InvalidAgentCount);
    }
    let r = p.registers as Value;
    let agents = (0..n as Value).map(|a| LocalConfig { state: p.initial, regs: (0..r).map(|i| a * r + i).collect() }).collect();
    Ok(Configuration { agents })
}

/// One step: a broadcast (or local test) by `broadcaster`, plus the
/// receptions of the other agents. Agents absent from `receptions` idle.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct StepDescriptor {
    pub broadcaster: Agent,
    pub transition: TransId,
    pub receptions: BTreeMap<Agent, TransId>,
}

impl StepDescriptor {
    pub fn silent(broadcaster: Agent, transition: TransId) -> Self {
        StepDescriptor { broadcaster, transition, receptions: BTreeMap::new() }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum StepError {
    #[error("unknown agent {0}")]
    UnknownAgent(Agent),
    #[error("unknown transition {0}")]
    UnknownTransition(TransId),
    #[error("agent {agent} is not in the source state of transition {transition}")]
    WrongState { agent: Agent, transition: TransId },
    #[error("transition {0} is not a broadcast or local test")]
    NotABroadcast(TransId),
    #[error("transition {0} is not a reception")]
    NotAReception(TransId),
    #[error("the broadcaster {0} cannot receive its own message")]
    SelfReception(Agent),
    #[error("agent {agent} receives a different message type than broadcast")]
    MessageMismatch { agent: Agent },
    #[error("reception test of agent {agent} fails on value {value}")]
    TestFailed { agent: Agent, value: Value },
    #[error("local test of agent {agent} fails")]
    LocalTestFailed { agent: Agent },
    #[error("a local-test step cannot have receivers")]
    LocalTestWithReceivers,
    #[error("local tests are not enabled in this protocol")]
    LocalTestsDisabled,
}

/// Whether a reception with `action` on a register holding `current` accepts `value`.
pub fn action_accepts(action: Action, current: Value, value: Value) -> bool {
    match action {
        Action::Eq => current == value,
        Action::Neq => current != value,
        Action::Down | Action::Any => true,
    }
}

/// Moves `agent` along reception transition `t` for message value `value`.
pub(crate) fn receive(
    p: &Protocol,
    agents: &mut [LocalConfig],
    agent: Agent,
    t: TransId,
    msg: usize,
    value: Value,
) -> Result<(), StepError> {
    let tr = p.transitions.get(t).ok_or(StepError::UnknownTransition(t))?;
    let local = agents.get_mut(agent).ok_or(StepError::UnknownAgent(agent))?;
    let Op::Rec { msg: m, reg, action } = tr.op else {
        return Err(StepError::NotAReception(t));
    };
    if local.state != tr.from {
        return Err(StepError::WrongState { agent, transition: t });
    }
    if m != msg {
        return Err(StepError::MessageMismatch { agent });
    }
    if !action_accepts(action, local.regs[reg - 1], value) {
        return Err(StepError::TestFailed { agent, value });
    }
    if action == Action::Down {
        local.regs[reg - 1] = value;
    }
    local.state = tr.to;
    Ok(())
}

/// Applies a step, returning the successor configuration.
pub fn apply_step(p: &Protocol, g: &Configuration, s: &StepDescriptor) -> Result<Configuration, StepError> {
    let mut next = g.clone();
    apply_step_in_place(p, &mut next, s)?;
    Ok(next)
}

/// In-place variant of [`apply_step`]; `g` is left unspecified on error.
pub fn apply_step_in_place(p: &Protocol, g: &mut Configuration, s: &StepDescriptor) -> Result<(), StepError> {
    let b = s.broadcaster;
    let tr = *p.transitions.get(s.transition).ok_or(StepError::UnknownTransition(s.transition))?;
    let bl = g.agents.get(b).ok_or(StepError::UnknownAgent(b))?;
    if bl.state != tr.from {
        return Err(StepError::WrongState { agent: b, transition: s.transition });
    }
    match tr.op {
        Op::Rec { .. } => Err(StepError::NotABroadcast(s.transition)),
        Op::Loc { left, right, test } => {
            if !p.local_tests {
                return Err(StepError::LocalTestsDisabled);
            }
            if !s.receptions.is_empty() {
                return Err(StepError::LocalTestWithReceivers);
            }
            let equal = bl.regs[left - 1] == bl.regs[right - 1];
            if equal != (test == LocalTest::Eq) {
                return Err(StepError::LocalTestFailed { agent: b });
            }
            g.agents[b].state = tr.to;
            Ok(())
        }
        Op::Br { msg, reg } => {
            let value = bl.regs[reg - 1];
            for (&a, &t) in &s.receptions {
                if a == b {
                    return Err(StepError::SelfReception(a));
                }
                receive(p, &mut g.agents, a, t, msg, value)?;
            }
            g.agents[b].state = tr.to;
            Ok(())
        }
    }
}

/// Transitions leaving each state, in index order.
pub fn outgoing(p: &Protocol) -> Vec<Vec<TransId>> {
    let mut out = vec![Vec::new(); p.states.len()];
    for (i, t) in p.transitions.iter().enumerate() {
        out[t.from].push(i);
    }
    out
}

/// Every enabled step, in a fixed order: by broadcaster, then transition,
/// then the lexicographic cross product of per-agent options (idle first).
pub fn enabled_steps(p: &Protocol, g: &Configuration) -> Vec<StepDescriptor> {
    enabled_steps_with(p, &outgoing(p), g)
}

/// [`enabled_steps`] with a precomputed [`outgoing`] table.
pub fn enabled_steps_with(p: &Protocol, out: &[Vec<TransId>], g: &Configuration) -> Vec<StepDescriptor> {
    let mut steps = Vec::new();
    for (b, bl) in g.agents.iter().enumerate() {
        for &t in &out[bl.state] {
            match p.transitions[t].op {
                Op::Rec { .. } => {}
                Op::Loc { left, right, test } => {
                    if p.local_tests && (bl.regs[left - 1] == bl.regs[right - 1]) == (test == LocalTest::Eq) {
                        steps.push(StepDescriptor::silent(b, t));
                    }
                }
                Op::Br { msg, reg } => {
                    let value = bl.regs[reg - 1];
                    let options: Vec<(Agent, Vec<TransId>)> = g
                        .agents
                        .iter()
                        .enumerate()
                        .filter(|&(a, _)| a != b)
                        .map(|(a, l)| {
                            let opts = out[l.state]
                                .iter()
                                .copied()
                                .filter(|&rt| match p.transitions[rt].op {
                                    Op::Rec { msg: m, reg: r, action } => {
                                        m == msg && action_accepts(action, l.regs[r - 1], value)
                                    }
                                    _ => false,
                                })
                                .collect();
                            (a, opts)
                        })
                        .filter(|(_, o): &(Agent, Vec<TransId>)| !o.is_empty())
                        .collect();
                    // Odometer over (idle | option) per agent.
                    let mut idx = vec![0usize; options.len()];
                    loop {
                        let receptions =
                            options.iter().zip(&idx).filter(|(_, &k)| k > 0).map(|((a, o), &k)| (*a, o[k - 1])).collect();
                        steps.push(StepDescriptor { broadcaster: b, transition: t, receptions });
                        let mut exhausted = true;
                        for pos in (0..options.len()).rev() {
                            idx[pos] += 1;
                            if idx[pos] <= options[pos].1.len() {
                                exhausted = false;
                                break;
                            }
                            idx[pos] = 0;
                        }
                        if exhausted {
                            break;
                        }
                    }
                }
            }
        }
    }
    steps
}
