//! Protocols: states, message types, registers and transitions.

use std::collections::{BTreeSet, HashMap};
use std::fmt;

/// Index of a state in [`Protocol::states`].
pub type StateId = usize;
/// Index of a message type in [`Protocol::messages`].
pub type MsgId = usize;
/// Index of a transition in [`Protocol::transitions`].
pub type TransId = usize;

/// Reception action: `=`, `≠`, `↓` (store) or `*` (ignore value).
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Action {
    Eq,
    Neq,
    Down,
    Any,
}

impl Action {
    pub const ALL: [Action; 4] = [Action::Eq, Action::Neq, Action::Down, Action::Any];

    /// Keyword used by the textual protocol format.
    pub fn keyword(self) -> &'static str {
        match self {
            Action::Eq => "=",
            Action::Neq => "!=",
            Action::Down => "down",
            Action::Any => "any",
        }
    }
}

/// Comparison performed by a local register test.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum LocalTest {
    Eq,
    Neq,
}

/// Operation labelling a transition. Register indices are 1-based.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Op {
    Br { msg: MsgId, reg: usize },
    Rec { msg: MsgId, reg: usize, action: Action },
    Loc { left: usize, right: usize, test: LocalTest },
}

impl Op {
    pub fn message(&self) -> Option<MsgId> {
        match *self {
            Op::Br { msg, .. } | Op::Rec { msg, .. } => Some(msg),
            Op::Loc { .. } => None,
        }
    }

    pub fn is_broadcast(&self) -> bool {
        matches!(self, Op::Br { .. })
    }

    pub fn is_reception(&self) -> bool {
        matches!(self, Op::Rec { .. })
    }

    pub fn is_local_test(&self) -> bool {
        matches!(self, Op::Loc { .. })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Transition {
    pub from: StateId,
    pub op: Op,
    pub to: StateId,
}

/// A BNRA protocol. Transitions are identified by their position.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Protocol {
    pub name: String,
    pub states: Vec<String>,
    pub initial: StateId,
    pub messages: Vec<String>,
    pub registers: usize,
    pub transitions: Vec<Transition>,
    /// Enables `loc(i,j,=|≠)` transitions.
    pub local_tests: bool,
}

/// Where a protocol diagnostic points to.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Location {
    Protocol,
    State(StateId),
    Transition(TransId),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Diagnostic {
    pub location: Location,
    pub message: String,
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.location {
            Location::Protocol => write!(f, "protocol: {}", self.message),
            Location::State(s) => write!(f, "state #{s}: {}", self.message),
            Location::Transition(t) => write!(f, "transition #{t}: {}", self.message),
        }
    }
}

impl Protocol {
    pub fn state_id(&self, name: &str) -> Option<StateId> {
        self.states.iter().position(|s| s == name)
    }

    pub fn message_id(&self, name: &str) -> Option<MsgId> {
        self.messages.iter().position(|m| m == name)
    }

    pub fn state_name(&self, s: StateId) -> &str {
        &self.states[s]
    }

    pub fn message_name(&self, m: MsgId) -> &str {
        &self.messages[m]
    }

    pub fn transition(&self, t: TransId) -> &Transition {
        &self.transitions[t]
    }

    /// Position of an identical transition, if any.
    pub fn find_transition(&self, t: &Transition) -> Option<TransId> {
        self.transitions.iter().position(|x| x == t)
    }

    /// Register 1 is broadcast-only and the other registers reception-only.
    pub fn is_signature(&self) -> bool {
        self.transitions.iter().all(|t| match t.op {
            Op::Br { reg, .. } => reg == 1,
            Op::Rec { reg, .. } => reg != 1,
            Op::Loc { .. } => false,
        })
    }

    pub fn has_local_tests(&self) -> bool {
        self.transitions.iter().any(|t| t.op.is_local_test())
    }

    /// Checks every structural invariant; an empty result means the protocol is valid.
    pub fn validate(&self) -> Vec<Diagnostic> {
        let mut out = Vec::new();
        let diag = |location, message: String| Diagnostic { location, message };
        if self.registers == 0 {
            out.push(diag(Location::Protocol, "register count must be positive".into()));
        }
        if self.initial >= self.states.len() {
            out.push(diag(Location::Protocol, "initial state out of range".into()));
        }
        let mut seen_states = HashMap::new();
        for (i, s) in self.states.iter().enumerate() {
            if let Some(j) = seen_states.insert(s.as_str(), i) {
                out.push(diag(Location::State(i), format!("duplicate state name `{s}` (also #{j})")));
            }
        }
        let mut seen_msgs = BTreeSet::new();
        for m in &self.messages {
            if !seen_msgs.insert(m.as_str()) {
                out.push(diag(Location::Protocol, format!("duplicate message type `{m}`")));
            }
        }
        let mut seen = HashMap::new();
        for (i, t) in self.transitions.iter().enumerate() {
            let loc = Location::Transition(i);
            if t.from >= self.states.len() || t.to >= self.states.len() {
                out.push(diag(loc.clone(), "endpoint state out of range".into()));
            }
            if let Some(m) = t.op.message() {
                if m >= self.messages.len() {
                    out.push(diag(loc.clone(), "unknown message type".into()));
                }
            }
            let regs: Vec<usize> = match t.op {
                Op::Br { reg, .. } | Op::Rec { reg, .. } => vec![reg],
                Op::Loc { left, right, .. } => {
                    if !self.local_tests {
                        out.push(diag(loc.clone(), "local test used without the local-tests extension".into()));
                    }
                    vec![left, right]
                }
            };
            for r in regs {
                if r == 0 || r > self.registers {
                    out.push(diag(loc.clone(), format!("register index out of range: {r}")));
                }
            }
            if let Some(j) = seen.insert(*t, i) {
                out.push(diag(loc, format!("duplicate transition (same as #{j})")));
            }
        }
        out
    }
}

/// Incremental protocol construction with name interning and duplicate-free transitions.
#[derive(Clone, Debug)]
pub struct ProtocolBuilder {
    protocol: Protocol,
    state_index: HashMap<String, StateId>,
    msg_index: HashMap<String, MsgId>,
    trans_index: HashMap<Transition, TransId>,
}

impl ProtocolBuilder {
    /// Starts a protocol whose initial state is named `initial`.
    pub fn new(name: &str, registers: usize, initial: &str) -> Self {
        let mut b = ProtocolBuilder {
            protocol: Protocol {
                name: name.to_string(),
                states: Vec::new(),
                initial: 0,
                messages: Vec::new(),
                registers,
                transitions: Vec::new(),
                local_tests: false,
            },
            state_index: HashMap::new(),
            msg_index: HashMap::new(),
            trans_index: HashMap::new(),
        };
        b.protocol.initial = b.state(initial);
        b
    }

    pub fn local_tests(mut self, on: bool) -> Self {
        self.protocol.local_tests = on;
        self
    }

    pub fn state(&mut self, name: &str) -> StateId {
        if let Some(&s) = self.state_index.get(name) {
            return s;
        }
        let id = self.protocol.states.len();
        self.protocol.states.push(name.to_string());
        self.state_index.insert(name.to_string(), id);
        id
    }

    pub fn message(&mut self, name: &str) -> MsgId {
        if let Some(&m) = self.msg_index.get(name) {
            return m;
        }
        let id = self.protocol.messages.len();
        self.protocol.messages.push(name.to_string());
        self.msg_index.insert(name.to_string(), id);
        id
    }

    /// Adds a transition unless an identical one exists; returns its index.
    pub fn transition(&mut self, from: StateId, op: Op, to: StateId) -> TransId {
        let t = Transition { from, op, to };
        if let Some(&i) = self.trans_index.get(&t) {
            return i;
        }
        let id = self.protocol.transitions.len();
        self.protocol.transitions.push(t);
        self.trans_index.insert(t, id);
        id
    }

    pub fn br(&mut self, from: &str, msg: &str, reg: usize, to: &str) -> TransId {
        let (f, m, t) = (self.state(from), self.message(msg), self.state(to));
        self.transition(f, Op::Br { msg: m, reg }, t)
    }

    pub fn rec(&mut self, from: &str, msg: &str, reg: usize, action: Action, to: &str) -> TransId {
        let (f, m, t) = (self.state(from), self.message(msg), self.state(to));
        self.transition(f, Op::Rec { msg: m, reg, action }, t)
    }

    pub fn loc(&mut self, from: &str, left: usize, right: usize, test: LocalTest, to: &str) -> TransId {
        let (f, t) = (self.state(from), self.state(to));
        self.transition(f, Op::Loc { left, right, test }, t)
    }

    pub fn transition_count(&self) -> usize {
        self.protocol.transitions.len()
    }

    pub fn build(self) -> Protocol {
        self.protocol
    }
}
