//! Lossy channel systems with one channel, and their encoding as signature protocols.

use std::collections::{HashMap, VecDeque};

use bnra_core::{initial_configuration, subword, Action, Protocol, ProtocolBuilder, Run, StateId};
use serde::{Deserialize, Serialize};

use crate::chain::{schedule, Act};
use crate::ReduceError;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LcsOp {
    Push(String),
    Pop(String),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LcsRule {
    pub from: String,
    #[serde(flatten)]
    pub op: LcsOp,
    pub to: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Lcs {
    pub locations: Vec<String>,
    pub alphabet: Vec<String>,
    pub rules: Vec<LcsRule>,
    pub initial: String,
    #[serde(rename = "final")]
    pub final_: String,
}

/// One step of a witness: the rule taken and the channel afterwards.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LcsStep {
    pub rule: usize,
    pub channel: Vec<usize>,
}

impl Lcs {
    pub fn check(&self) -> Result<(), ReduceError> {
        let bad = |what: &str, name: &str| Err(ReduceError::Malformed(format!("unknown {what} `{name}`")));
        for name in self.locations.iter().chain(&self.alphabet) {
            if !crate::is_plain_name(name) {
                return Err(ReduceError::Malformed(format!("`{name}` is not a plain identifier")));
            }
        }
        for l in [&self.initial, &self.final_] {
            if !self.locations.contains(l) {
                return bad("location", l);
            }
        }
        for r in &self.rules {
            for l in [&r.from, &r.to] {
                if !self.locations.contains(l) {
                    return bad("location", l);
                }
            }
            let (LcsOp::Push(x) | LcsOp::Pop(x)) = &r.op;
            if !self.alphabet.contains(x) {
                return bad("symbol", x);
            }
        }
        Ok(())
    }

    fn location(&self, l: &str) -> usize {
        self.locations.iter().position(|x| x == l).expect("checked location")
    }

    fn symbol(&self, x: &str) -> usize {
        self.alphabet.iter().position(|y| y == x).expect("checked symbol")
    }

    /// `(from, push?, symbol, to)` with indices.
    fn rule(&self, k: usize) -> (usize, bool, usize, usize) {
        let r = &self.rules[k];
        let (push, x) = match &r.op {
            LcsOp::Push(x) => (true, x),
            LcsOp::Pop(x) => (false, x),
        };
        (self.location(&r.from), push, self.symbol(x), self.location(&r.to))
    }
}

/// Location and channel contents.
type Node = (usize, Vec<usize>);

/// Bounded search for a path from `(initial, ε)` to the final location.
/// Channels never exceed `max_channel` letters; a push onto a full channel
/// loses one letter.
pub fn lcs_reach_bounded(l: &Lcs, max_channel: usize, max_steps: usize) -> Result<Option<Vec<LcsStep>>, ReduceError> {
    l.check()?;
    let start = (l.location(&l.initial), Vec::new());
    let goal = l.location(&l.final_);
    let mut parent: HashMap<Node, Option<(Node, usize)>> = HashMap::new();
    parent.insert(start.clone(), None);
    let mut queue = VecDeque::from([(start, 0)]);
    while let Some((cur, depth)) = queue.pop_front() {
        if cur.0 == goal {
            let mut path = Vec::new();
            let mut at = cur;
            while let Some(Some((prev, rule))) = parent.get(&at).cloned() {
                path.push(LcsStep { rule, channel: at.1.clone() });
                at = prev;
            }
            path.reverse();
            return Ok(Some(path));
        }
        if depth == max_steps {
            continue;
        }
        for k in 0..l.rules.len() {
            let (from, push, x, to) = l.rule(k);
            if from != cur.0 {
                continue;
            }
            let w = &cur.1;
            let mut next = Vec::new();
            if push {
                let mut wx = w.clone();
                wx.push(x);
                if wx.len() <= max_channel {
                    next.push(wx);
                } else {
                    for i in 0..wx.len() {
                        let mut shorter = wx.clone();
                        shorter.remove(i);
                        next.push(shorter);
                    }
                }
            } else if let Some(i) = w.iter().position(|&y| y == x) {
                next.push(w[i + 1..].to_vec());
            }
            for c in next {
                let key = (to, c);
                if !parent.contains_key(&key) {
                    parent.insert(key.clone(), Some((cur.clone(), k)));
                    queue.push_back((key, depth + 1));
                }
            }
        }
    }
    Ok(None)
}

fn loc_msg(l: &str) -> String {
    format!("at_{l}")
}

fn sym_msg(x: &str) -> String {
    format!("sym_{x}")
}

/// Name of the state reached once a step into location `l` is complete.
pub fn fin_state(l: &str) -> String {
    format!("fin_{l}")
}

/// Encodes `l`: agents form chains through their stored predecessor, and
/// each link replays one step of the system on the channel it hears. The
/// target is `fin_<final>`.
pub fn lcs_to_protocol(l: &Lcs) -> Result<(Protocol, StateId), ReduceError> {
    l.check()?;
    let mut b = ProtocolBuilder::new("lcs", 2, "q0");
    let (init, end) = ("init", "end");
    b.br("q0", init, 1, "root_1");
    b.br("root_1", &loc_msg(&l.initial), 1, "root_2");
    b.br("root_2", end, 1, &fin_state(&l.initial));
    b.rec("q0", init, 2, Action::Down, "link");
    b.br("link", init, 1, "wait");
    for loc in &l.locations {
        b.rec("wait", &loc_msg(loc), 2, Action::Eq, &format!("start_{loc}"));
        b.state(&fin_state(loc));
    }
    for (k, r) in l.rules.iter().enumerate() {
        let (pick, body, done) = (format!("pick_d{k}"), format!("body_d{k}"), format!("end_d{k}"));
        b.br(&format!("start_{}", r.from), &loc_msg(&r.to), 1, &pick);
        let relay_at = |b: &mut ProtocolBuilder, s: &str| {
            for y in &l.alphabet {
                let relay = format!("{s}_{y}");
                b.rec(s, &sym_msg(y), 2, Action::Eq, &relay);
                b.br(&relay, &sym_msg(y), 1, s);
            }
        };
        match &r.op {
            LcsOp::Push(x) => {
                relay_at(&mut b, &pick);
                b.br(&pick, &sym_msg(x), 1, &body);
            }
            LcsOp::Pop(x) => {
                b.rec(&pick, &sym_msg(x), 2, Action::Eq, &body);
                relay_at(&mut b, &body);
            }
        }
        b.rec(&body, end, 2, Action::Eq, &done);
        b.br(&done, end, 1, &fin_state(&r.to));
    }
    let q = b.state(&fin_state(&l.final_));
    Ok((b.build(), q))
}

/// Builds the run where agent 0 is the root and agent `i` replays step `i`
/// of `path`, listening to agent `i-1`.
pub fn lcs_witness_to_run(p: &Protocol, l: &Lcs, path: &[LcsStep]) -> Result<Run, ReduceError> {
    l.check()?;
    let t = |from: &str, op: &str, to: &str| -> Result<usize, ReduceError> {
        let (f, tt) = (p.state_id(from), p.state_id(to));
        p.transitions
            .iter()
            .position(|tr| Some(tr.from) == f && Some(tr.to) == tt && tr.op.message().map(|m| p.message_name(m)) == Some(op))
            .ok_or_else(|| ReduceError::Internal(format!("missing transition {from} -{op}-> {to}")))
    };
    let mut plans = vec![vec![
        Act::Br(t("q0", "init", "root_1")?),
        Act::Br(t("root_1", &loc_msg(&l.initial), "root_2")?),
        Act::Br(t("root_2", "end", &fin_state(&l.initial))?),
    ]];
    // Broadcast words of the previous agent: location, then channel letters.
    let mut loc = l.location(&l.initial);
    let mut channel: Vec<usize> = Vec::new();
    for (i, step) in path.iter().enumerate() {
        let (from, push, x, to) = l.rule(step.rule);
        if from != loc {
            return Err(ReduceError::InvalidWitness(format!("step {i} starts from the wrong location")));
        }
        let k = step.rule;
        let (pick, body, done) = (format!("pick_d{k}"), format!("body_d{k}"), format!("end_d{k}"));
        let start = format!("start_{}", l.locations[from]);
        let name = |y: usize| sym_msg(&l.alphabet[y]);
        let mut plan = vec![
            Act::Rec(t("q0", "init", "link")?, 0),
            Act::Br(t("link", "init", "wait")?),
            Act::Rec(t("wait", &loc_msg(&l.locations[from]), &start)?, 1),
            Act::Br(t(&start, &loc_msg(&l.locations[to]), &pick)?),
        ];
        let relay = |plan: &mut Vec<Act>, s: &str, y: usize, k: usize| -> Result<(), ReduceError> {
            let mid = format!("{s}_{}", l.alphabet[y]);
            plan.push(Act::Rec(t(s, &name(y), &mid)?, k));
            plan.push(Act::Br(t(&mid, &name(y), s)?));
            Ok(())
        };
        let next = if push {
            for (j, &y) in channel.iter().enumerate() {
                relay(&mut plan, &pick, y, 2 + j)?;
            }
            plan.push(Act::Br(t(&pick, &name(x), &body)?));
            let mut c = channel.clone();
            c.push(x);
            c
        } else {
            let first = channel
                .iter()
                .position(|&y| y == x)
                .ok_or_else(|| ReduceError::InvalidWitness(format!("step {i} pops a letter that is not there")))?;
            plan.push(Act::Rec(t(&pick, &name(x), &body)?, 2 + first));
            for (j, &y) in channel.iter().enumerate().skip(first + 1) {
                relay(&mut plan, &body, y, 2 + j)?;
            }
            channel[first + 1..].to_vec()
        };
        plan.push(Act::Rec(t(&body, "end", &done)?, 2 + channel.len()));
        plan.push(Act::Br(t(&done, "end", &fin_state(&l.locations[to]))?));
        if !subword(&step.channel, &next) {
            return Err(ReduceError::InvalidWitness(format!("channel after step {i} is not reachable")));
        }
        plans.push(plan);
        loc = to;
        channel = next;
    }
    let initial = initial_configuration(p, plans.len()).map_err(|e| ReduceError::Internal(e.to_string()))?;
    Ok(Run { initial, steps: schedule(&plans)? })
}
