//! Two-counter Minsky machines and their encoding as a TARGET instance.

use std::collections::{HashMap, VecDeque};

use bnra_core::{initial_configuration, Action, Op, Protocol, ProtocolBuilder, Run, StateId, StepDescriptor, Transition};
use serde::{Deserialize, Serialize};

use crate::ReduceError;

/// Counters are numbered 1 and 2.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MinskyOp {
    Inc(u8),
    Dec(u8),
    Testz(u8),
}

impl MinskyOp {
    pub fn counter(self) -> u8 {
        match self {
            MinskyOp::Inc(c) | MinskyOp::Dec(c) | MinskyOp::Testz(c) => c,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MinskyRule {
    pub from: String,
    #[serde(flatten)]
    pub op: MinskyOp,
    pub to: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MinskyMachine {
    pub locations: Vec<String>,
    pub rules: Vec<MinskyRule>,
    pub initial: String,
    #[serde(rename = "final")]
    pub final_: String,
}

/// Machine configuration: location index and both counters.
pub type MinskyConfig = (usize, u64, u64);

/// A halting execution: rules taken and the configurations they lead to.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MinskyExecution {
    pub rules: Vec<usize>,
    pub configs: Vec<MinskyConfig>,
}

impl MinskyExecution {
    pub fn len(&self) -> usize {
        self.rules.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rules.is_empty()
    }

    pub fn max_counter(&self) -> u64 {
        self.configs.iter().map(|&(_, a, b)| a.max(b)).max().unwrap_or(0)
    }
}

impl MinskyMachine {
    pub fn check(&self) -> Result<(), ReduceError> {
        for name in &self.locations {
            if !crate::is_plain_name(name) {
                return Err(ReduceError::Malformed(format!("`{name}` is not a plain identifier")));
            }
        }
        let all = [&self.initial, &self.final_].into_iter().chain(self.rules.iter().flat_map(|r| [&r.from, &r.to]));
        for l in all {
            if !self.locations.contains(l) {
                return Err(ReduceError::Malformed(format!("unknown location `{l}`")));
            }
        }
        if let Some(r) = self.rules.iter().find(|r| !matches!(r.op.counter(), 1 | 2)) {
            return Err(ReduceError::Malformed(format!("counter {} does not exist", r.op.counter())));
        }
        Ok(())
    }

    fn location(&self, l: &str) -> usize {
        self.locations.iter().position(|x| x == l).expect("checked location")
    }

    /// Successor of `c` under rule `k`, if enabled.
    pub fn apply(&self, k: usize, c: MinskyConfig) -> Option<MinskyConfig> {
        let r = &self.rules[k];
        if self.location(&r.from) != c.0 {
            return None;
        }
        let (mut a, mut b) = (c.1, c.2);
        let x = if r.op.counter() == 1 { &mut a } else { &mut b };
        match r.op {
            MinskyOp::Inc(_) => *x += 1,
            MinskyOp::Dec(_) => *x = x.checked_sub(1)?,
            MinskyOp::Testz(_) if *x != 0 => return None,
            MinskyOp::Testz(_) => {}
        }
        Some((self.location(&r.to), a, b))
    }
}

/// Breadth-first search for a shortest execution reaching the final
/// location with at most `max_steps` rules and counters up to `max_counter`.
pub fn minsky_run_bounded(m: &MinskyMachine, max_steps: usize, max_counter: u64) -> Result<Option<MinskyExecution>, ReduceError> {
    m.check()?;
    let start = (m.location(&m.initial), 0, 0);
    let goal = m.location(&m.final_);
    let mut parent: HashMap<MinskyConfig, Option<(MinskyConfig, usize)>> = HashMap::from([(start, None)]);
    let mut queue = VecDeque::from([(start, 0)]);
    while let Some((c, depth)) = queue.pop_front() {
        if c.0 == goal {
            let mut exec = MinskyExecution { rules: Vec::new(), configs: vec![c] };
            let mut at = c;
            while let Some(Some((prev, k))) = parent.get(&at).copied() {
                exec.rules.push(k);
                exec.configs.push(prev);
                at = prev;
            }
            exec.rules.reverse();
            exec.configs.reverse();
            return Ok(Some(exec));
        }
        if depth == max_steps {
            continue;
        }
        for k in 0..m.rules.len() {
            if let Some(d) = m.apply(k, c).filter(|d| d.1.max(d.2) <= max_counter) {
                if let std::collections::hash_map::Entry::Vacant(e) = parent.entry(d) {
                    e.insert(Some((c, k)));
                    queue.push_back((d, depth + 1));
                }
            }
        }
    }
    Ok(None)
}

fn rule_msg(k: usize) -> String {
    format!("d{k}")
}

fn ack_msg(m: &MinskyMachine, k: usize) -> String {
    match m.rules[k].op {
        MinskyOp::Testz(_) => rule_msg(k),
        _ => format!("ack_d{k}"),
    }
}

/// Counter state `x<i>_<bit>`.
fn counter_state(i: u8, bit: u8) -> String {
    format!("x{i}_{bit}")
}

/// Name of the TARGET state.
pub const DONE: &str = "done";

/// Encodes `m`: agents store a predecessor and listen only to it. A leader
/// issues rules and waits for their acknowledgement; every other agent holds
/// one unit of one counter and relays what it does not consume. `end` sends
/// everyone to [`DONE`].
pub fn minsky_to_protocol(m: &MinskyMachine) -> Result<(Protocol, StateId), ReduceError> {
    m.check()?;
    let mut b = ProtocolBuilder::new("minsky", 2, "q0");
    b.br("q0", "init", 1, "lead");
    b.rec("lead", "init", 2, Action::Down, &format!("loc_{}", m.initial));
    b.rec("q0", "init", 2, Action::Down, "count");
    for (k, r) in m.rules.iter().enumerate() {
        let wait = format!("wait_d{k}");
        b.br(&format!("loc_{}", r.from), &rule_msg(k), 1, &wait);
        b.rec(&wait, &ack_msg(m, k), 2, Action::Eq, &format!("loc_{}", r.to));
    }
    b.br(&format!("loc_{}", m.final_), "end", 1, "halt");
    b.rec("halt", "end", 2, Action::Eq, DONE);
    let all_acks: Vec<String> =
        (0..m.rules.len()).filter(|&k| !matches!(m.rules[k].op, MinskyOp::Testz(_))).map(|k| ack_msg(m, k)).collect();
    for i in [1u8, 2] {
        b.br("count", "init", 1, &counter_state(i, 0));
        for bit in [0u8, 1] {
            let s = counter_state(i, bit);
            let relay = |b: &mut ProtocolBuilder, msg: &str, out: &str, to: &str| {
                let mid = format!("{s}_{msg}");
                b.rec(&s, msg, 2, Action::Eq, &mid);
                b.br(&mid, out, 1, to);
            };
            for (k, r) in m.rules.iter().enumerate() {
                let d = rule_msg(k);
                match (r.op, bit) {
                    (op, _) if op.counter() != i => relay(&mut b, &d, &d, &s),
                    (MinskyOp::Inc(_), 0) => relay(&mut b, &d, &ack_msg(m, k), &counter_state(i, 1)),
                    (MinskyOp::Dec(_), 1) => relay(&mut b, &d, &ack_msg(m, k), &counter_state(i, 0)),
                    (MinskyOp::Testz(_), 1) => {
                        b.rec(&s, &d, 2, Action::Eq, "dead");
                    }
                    _ => relay(&mut b, &d, &d, &s),
                }
            }
            for a in &all_acks {
                relay(&mut b, a, a, &s);
            }
            relay(&mut b, "end", "end", DONE);
        }
    }
    let q = b.state(DONE);
    Ok((b.build(), q))
}

/// Builds the run of the leader (agent 0) and `2·max(N, 1)` counter agents
/// in one predecessor cycle, replaying `exec` and ending with everyone in
/// [`DONE`]. Agents `1..=N` hold units of counter 1, the others counter 2.
pub fn minsky_exec_to_run(p: &Protocol, m: &MinskyMachine, exec: &MinskyExecution) -> Result<Run, ReduceError> {
    m.check()?;
    let mut c = (m.location(&m.initial), 0, 0);
    for (i, &k) in exec.rules.iter().enumerate() {
        c = m.apply(k, c).ok_or_else(|| ReduceError::InvalidWitness(format!("rule {k} is not enabled at step {i}")))?;
    }
    if c.0 != m.location(&m.final_) {
        return Err(ReduceError::InvalidWitness("execution does not reach the final location".into()));
    }
    let n = exec.max_counter().max(1) as usize;
    let agents = 1 + 2 * n;
    let state = |name: &str| p.state_id(name).ok_or_else(|| ReduceError::Internal(format!("missing state {name}")));
    let msg = |name: &str| p.message_id(name).ok_or_else(|| ReduceError::Internal(format!("missing message {name}")));
    let find = |from: StateId, op: Op, to: StateId| {
        p.find_transition(&Transition { from, op, to })
            .ok_or_else(|| ReduceError::Internal(format!("missing transition from {}", p.state_name(from))))
    };
    // The unique reception from `s` on `m`, with its target.
    let rec_from = |s: StateId, m: usize| {
        p.transitions
            .iter()
            .position(|t| t.from == s && matches!(t.op, Op::Rec { msg, .. } if msg == m))
            .ok_or_else(|| ReduceError::Internal(format!("{} cannot receive {}", p.state_name(s), p.message_name(m))))
    };
    let out_of = |s: StateId| {
        p.transitions
            .iter()
            .position(|t| t.from == s && t.op.is_broadcast())
            .ok_or_else(|| ReduceError::Internal(format!("{} has no broadcast", p.state_name(s))))
    };
    let init = msg("init")?;
    let mut at: Vec<StateId> = vec![p.initial; agents];
    let mut steps = Vec::new();
    let mut step = |at: &mut Vec<StateId>, a: usize, t: usize, r: usize| {
        at[a] = p.transitions[t].to;
        let to = (a + 1) % agents;
        at[to] = p.transitions[r].to;
        steps.push(StepDescriptor { broadcaster: a, transition: t, receptions: [(to, r)].into() });
    };
    // Everyone stores its predecessor around the cycle.
    let (q0, lead, count) = (p.initial, state("lead")?, state("count")?);
    step(
        &mut at,
        0,
        find(q0, Op::Br { msg: init, reg: 1 }, lead)?,
        find(q0, Op::Rec { msg: init, reg: 2, action: Action::Down }, count)?,
    );
    for a in 1..agents {
        let unit = state(&counter_state(if a <= n { 1 } else { 2 }, 0))?;
        let t = find(count, Op::Br { msg: init, reg: 1 }, unit)?;
        let r = if a + 1 == agents {
            find(lead, Op::Rec { msg: init, reg: 2, action: Action::Down }, state(&format!("loc_{}", m.initial))?)?
        } else {
            find(q0, Op::Rec { msg: init, reg: 2, action: Action::Down }, count)?
        };
        step(&mut at, a, t, r);
    }
    let mut round = |at: &mut Vec<StateId>, first: usize| -> Result<(), ReduceError> {
        let mut t = first;
        for a in 0..agents {
            let sent = p.transitions[t].op.message().expect("broadcast");
            let r = rec_from(at[(a + 1) % agents], sent)?;
            step(at, a, t, r);
            if a + 1 < agents {
                t = out_of(at[a + 1])?;
            }
        }
        Ok(())
    };
    for &k in &exec.rules {
        let from = state(&format!("loc_{}", m.rules[k].from))?;
        let t = find(from, Op::Br { msg: msg(&rule_msg(k))?, reg: 1 }, state(&format!("wait_d{k}"))?)?;
        round(&mut at, t)?;
    }
    let t = find(state(&format!("loc_{}", m.final_))?, Op::Br { msg: msg("end")?, reg: 1 }, state("halt")?)?;
    round(&mut at, t)?;
    let initial = initial_configuration(p, agents).map_err(|e| ReduceError::Internal(e.to_string()))?;
    Ok(Run { initial, steps })
}
