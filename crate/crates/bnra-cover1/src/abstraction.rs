//! Abstract gang semantics and the coverability decision.

use std::collections::{HashMap, VecDeque};

use bnra_core::{Action, MsgId, Op, Protocol, StateId, TransId};
use thiserror::Error;

use crate::stateset::StateSet;

/// `(S, boss, clique)`; a boss of `None` stands for ⊥.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct AbstractConfig {
    pub s: StateSet,
    pub boss: Option<StateId>,
    pub clique: StateSet,
}

impl AbstractConfig {
    pub fn initial(p: &Protocol) -> Self {
        AbstractConfig { s: StateSet::singleton(p.initial), boss: Some(p.initial), clique: StateSet::EMPTY }
    }

    /// `S ∪ K ∪ {b}`.
    pub fn covered(&self) -> StateSet {
        let mut all = self.s.union(self.clique);
        if let Some(b) = self.boss {
            all.insert(b);
        }
        all
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum StepKind {
    BroadcastFromClique(TransId),
    BroadcastFromBoss(TransId),
    ExternalBroadcast(TransId),
    GangReset,
}

/// An abstract run from the initial abstract configuration. Each entry holds
/// a step and the configuration it leads to.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct AbstractRun {
    pub steps: Vec<(StepKind, AbstractConfig)>,
}

impl AbstractRun {
    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    /// Every configuration, starting with the initial one.
    pub fn configs(&self, p: &Protocol) -> Vec<AbstractConfig> {
        let mut out = vec![AbstractConfig::initial(p)];
        out.extend(self.steps.iter().map(|(_, c)| *c));
        out
    }

    pub fn last(&self, p: &Protocol) -> AbstractConfig {
        self.steps.last().map(|(_, c)| *c).unwrap_or_else(|| AbstractConfig::initial(p))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum Cover1Error {
    #[error("wrong register count: expected 1, found {0}")]
    WrongRegisterCount(usize),
    #[error("local tests are not supported")]
    LocalTests,
    #[error("too many states: {0} (at most 64)")]
    TooManyStates(usize),
    #[error("unknown state {0}")]
    UnknownState(StateId),
    #[error("protocol not normalized: disequality tests remain")]
    NotNormalized,
    #[error("abstract step {index} is invalid")]
    InvalidAt { index: usize },
}

/// Decision with a shortest witness when the state is coverable.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Decision {
    pub coverable: bool,
    pub witness: Option<AbstractRun>,
    /// Number of abstract configurations visited.
    pub explored: usize,
}

fn check_shape(p: &Protocol) -> Result<(), Cover1Error> {
    if p.registers != 1 {
        return Err(Cover1Error::WrongRegisterCount(p.registers));
    }
    if p.has_local_tests() {
        return Err(Cover1Error::LocalTests);
    }
    if p.states.len() > 64 {
        return Err(Cover1Error::TooManyStates(p.states.len()));
    }
    Ok(())
}

fn has_disequality(p: &Protocol) -> bool {
    p.transitions.iter().any(|t| matches!(t.op, Op::Rec { action: Action::Neq, .. }))
}

/// Rewrites every `rec(m,1,≠)` into `rec(m,1,*)`. Transition positions are kept.
pub fn remove_disequality(p: &Protocol) -> Result<Protocol, Cover1Error> {
    check_shape(p)?;
    let mut out = p.clone();
    for t in &mut out.transitions {
        if let Op::Rec { action: a @ Action::Neq, .. } = &mut t.op {
            *a = Action::Any;
        }
    }
    Ok(out)
}

/// States reachable from `set` by a reception of `m` with an action in `ops`.
pub fn clique_succ(p: &Protocol, set: StateSet, m: MsgId, ops: &[Action]) -> StateSet {
    p.transitions
        .iter()
        .filter(|t| set.contains(t.from))
        .filter(|t| matches!(t.op, Op::Rec { msg, action, .. } if msg == m && ops.contains(&action)))
        .map(|t| t.to)
        .collect()
}

const GANG_OPS: [Action; 3] = [Action::Eq, Action::Any, Action::Down];

fn broadcasts(p: &Protocol) -> impl Iterator<Item = (TransId, StateId, MsgId, StateId)> + '_ {
    p.transitions.iter().enumerate().filter_map(|(i, t)| match t.op {
        Op::Br { msg, .. } => Some((i, t.from, msg, t.to)),
        _ => None,
    })
}

/// Boss targets reachable on a reception of `m` with one of `ops`, or `None` for ⊥.
fn boss_receptions(p: &Protocol, b: StateId, m: MsgId, ops: &[Action]) -> Vec<StateId> {
    let mut out: Vec<StateId> = p
        .transitions
        .iter()
        .filter(|t| t.from == b && matches!(t.op, Op::Rec { msg, action, .. } if msg == m && ops.contains(&action)))
        .map(|t| t.to)
        .collect();
    out.sort_unstable();
    out.dedup();
    out
}

fn make(s: StateSet, boss: Option<StateId>, clique: StateSet) -> AbstractConfig {
    let mut s = s.union(clique);
    if let Some(b) = boss {
        s.insert(b);
    }
    AbstractConfig { s, boss, clique }
}

fn successors_unchecked(p: &Protocol, c: &AbstractConfig) -> Vec<(StepKind, AbstractConfig)> {
    let mut out = Vec::new();
    for (t, from, m, to) in broadcasts(p) {
        let gang_k = c.clique.union(clique_succ(p, c.clique, m, &GANG_OPS)).union(clique_succ(p, c.s, m, &[Action::Down]));
        if c.clique.contains(from) {
            let k = gang_k.with(to);
            let mut bosses = vec![c.boss];
            if let Some(b) = c.boss {
                bosses.extend(boss_receptions(p, b, m, &GANG_OPS).into_iter().map(Some));
            }
            for b in dedup(bosses) {
                out.push((StepKind::BroadcastFromClique(t), make(c.s, b, k)));
            }
        }
        if c.boss == Some(from) {
            out.push((StepKind::BroadcastFromBoss(t), make(c.s, Some(to), gang_k)));
        }
        if c.s.contains(from) {
            let k = c.clique.union(clique_succ(p, c.clique, m, &[Action::Any]));
            let mut bosses = vec![c.boss];
            if let Some(b) = c.boss {
                bosses.extend(boss_receptions(p, b, m, &[Action::Any]).into_iter().map(Some));
                if !boss_receptions(p, b, m, &[Action::Down]).is_empty() {
                    bosses.push(None);
                }
            }
            for b in dedup(bosses) {
                out.push((StepKind::ExternalBroadcast(t), make(c.s, b, k)));
            }
        }
    }
    out.push((StepKind::GangReset, make(c.covered(), Some(p.initial), StateSet::EMPTY)));
    out
}

fn dedup(mut v: Vec<Option<StateId>>) -> Vec<Option<StateId>> {
    let mut seen = Vec::new();
    v.retain(|b| {
        if seen.contains(b) {
            false
        } else {
            seen.push(*b);
            true
        }
    });
    v
}

/// All one-step successors of `c`. `S′` always absorbs `K′` and `b′`.
pub fn abstract_successors(p: &Protocol, c: &AbstractConfig) -> Result<Vec<(StepKind, AbstractConfig)>, Cover1Error> {
    check_shape(p)?;
    if has_disequality(p) {
        return Err(Cover1Error::NotNormalized);
    }
    Ok(successors_unchecked(p, c))
}

/// Upper bound on the length of a shortest abstract witness.
pub fn length_bound(p: &Protocol) -> usize {
    (p.states.len() + 2).pow(3)
}

/// Decides whether `target` is coverable, by BFS over abstract configurations.
pub fn decide_cover1(p: &Protocol, target: StateId) -> Result<Decision, Cover1Error> {
    let q = remove_disequality(p)?;
    if target >= q.states.len() {
        return Err(Cover1Error::UnknownState(target));
    }
    let start = AbstractConfig::initial(&q);
    let mut parent: HashMap<AbstractConfig, Option<(AbstractConfig, StepKind)>> = HashMap::new();
    parent.insert(start, None);
    let mut queue = VecDeque::from([start]);
    let mut found = None;
    while let Some(c) = queue.pop_front() {
        if c.covered().contains(target) {
            found = Some(c);
            break;
        }
        for (kind, next) in successors_unchecked(&q, &c) {
            if let std::collections::hash_map::Entry::Vacant(e) = parent.entry(next) {
                e.insert(Some((c, kind)));
                queue.push_back(next);
            }
        }
    }
    let explored = parent.len();
    let Some(mut c) = found else {
        return Ok(Decision { coverable: false, witness: None, explored });
    };
    let mut steps = Vec::new();
    while let Some(Some((prev, kind))) = parent.get(&c) {
        steps.push((*kind, c));
        c = *prev;
    }
    steps.reverse();
    assert!(steps.len() <= length_bound(&q), "abstract witness longer than (|Q|+2)^3");
    Ok(Decision { coverable: true, witness: Some(AbstractRun { steps }), explored })
}

/// Checks every step of `run`; returns the final abstract configuration.
/// Disequality tests are read as `*`.
pub fn replay_abstract(p: &Protocol, run: &AbstractRun) -> Result<AbstractConfig, Cover1Error> {
    let q = remove_disequality(p)?;
    let mut c = AbstractConfig::initial(&q);
    for (index, (kind, next)) in run.steps.iter().enumerate() {
        let ok = successors_unchecked(&q, &c).iter().any(|(k, n)| k == kind && n == next);
        let monotone = c.s.is_subset(next.s) && (*kind == StepKind::GangReset || c.clique.is_subset(next.clique));
        if !ok || !monotone {
            return Err(Cover1Error::InvalidAt { index });
        }
        c = *next;
    }
    Ok(c)
}
