//! Turns an abstract witness into a concrete run.
//!
//! Clique multiplicities are computed backwards over each gang phase. Agents
//! in a covered state are obtained lazily: a fresh agent for the initial
//! state, otherwise a copy of the causal history of the first agent that
//! covered the state, played on fresh agents and values.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use bnra_core::{
    apply_step_in_place, replay, Action, Agent, Configuration, LocalConfig, Op, Protocol, Run, StateId, StepDescriptor, TransId,
    Value,
};
use thiserror::Error;

use crate::abstraction::{remove_disequality, replay_abstract, AbstractConfig, AbstractRun, Cover1Error, StepKind};

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum ConcretizeError {
    #[error("agent budget of {0} exceeded")]
    BudgetExceeded(usize),
    #[error(transparent)]
    Abstract(#[from] Cover1Error),
    #[error("internal error: {0}")]
    Internal(String),
}

/// How the agents entering a new clique state are produced.
#[derive(Clone, Copy, Debug)]
enum Producer {
    /// The clique broadcasters themselves.
    Broadcasters,
    /// Agents taking reception `trans` from `from`; `generic` agents come
    /// from the covered states rather than from the clique.
    Receive { trans: TransId, from: StateId, generic: bool },
}

#[derive(Clone, Debug)]
struct StepPlan {
    kind: StepKind,
    before: AbstractConfig,
    after: AbstractConfig,
    produce: Vec<(StateId, Producer, usize)>,
    broadcasters: usize,
    boss_move: Option<TransId>,
}

fn rec_parts(p: &Protocol, t: TransId) -> Option<(usize, Action)> {
    match p.transitions[t].op {
        Op::Rec { msg, action, .. } => Some((msg, action)),
        _ => None,
    }
}

fn broadcast_parts(p: &Protocol, t: TransId) -> (StateId, usize, StateId) {
    let tr = &p.transitions[t];
    (tr.from, tr.op.message().expect("broadcast"), tr.to)
}

/// Picks a reception transition producing `target`, preferring fresh agents,
/// then clique agents, then other covered states.
fn choose_producer(q: &Protocol, kind: StepKind, msg: usize, c: &AbstractConfig, target: StateId) -> Option<Producer> {
    let mut best: Option<(u8, Producer)> = None;
    for (i, t) in q.transitions.iter().enumerate() {
        if t.to != target {
            continue;
        }
        let Some((m, a)) = rec_parts(q, i) else { continue };
        if m != msg {
            continue;
        }
        let mut options = Vec::new();
        match kind {
            StepKind::ExternalBroadcast(_) => {
                if a == Action::Any && c.clique.contains(t.from) {
                    options.push((1, false));
                }
            }
            _ => {
                if a == Action::Down && c.s.contains(t.from) {
                    options.push((if t.from == q.initial { 0 } else { 2 }, true));
                }
                if a != Action::Neq && c.clique.contains(t.from) {
                    options.push((1, false));
                }
            }
        }
        for (rank, generic) in options {
            if best.is_none_or(|(r, _)| rank < r) {
                best = Some((rank, Producer::Receive { trans: i, from: t.from, generic }));
            }
        }
    }
    best.map(|(_, p)| p)
}

fn boss_transition(q: &Protocol, kind: StepKind, msg: usize, b: StateId, after: Option<StateId>) -> Option<TransId> {
    q.transitions.iter().enumerate().find_map(|(i, t)| {
        let (m, a) = rec_parts(q, i)?;
        if t.from != b || m != msg {
            return None;
        }
        let ok = match (kind, after) {
            (StepKind::ExternalBroadcast(_), None) => a == Action::Down,
            (StepKind::ExternalBroadcast(_), Some(b2)) => a == Action::Any && t.to == b2,
            (_, Some(b2)) => t.to == b2,
            (_, None) => false,
        };
        ok.then_some(i)
    })
}

/// Plans one gang phase: which transitions produce each new clique state and
/// how many agents each clique state needs.
fn plan_phase(
    q: &Protocol,
    steps: &[(StepKind, AbstractConfig, AbstractConfig)],
    last: bool,
) -> Result<Vec<StepPlan>, ConcretizeError> {
    let internal = |s: &str| ConcretizeError::Internal(s.to_string());
    let mut plans = Vec::with_capacity(steps.len());
    for &(kind, before, after) in steps {
        let t = match kind {
            StepKind::BroadcastFromClique(t) | StepKind::BroadcastFromBoss(t) | StepKind::ExternalBroadcast(t) => t,
            StepKind::GangReset => return Err(internal("reset inside a phase")),
        };
        let (_, msg, to) = broadcast_parts(q, t);
        let mut produce = Vec::new();
        for k in after.clique.iter().filter(|k| !before.clique.contains(*k)) {
            let producer = if matches!(kind, StepKind::BroadcastFromClique(_)) && k == to {
                Producer::Broadcasters
            } else {
                choose_producer(q, kind, msg, &before, k).ok_or_else(|| internal("no producer for a clique state"))?
            };
            produce.push((k, producer, 0));
        }
        let boss_move = match (kind, before.boss) {
            (StepKind::BroadcastFromBoss(_), _) | (_, None) => None,
            (_, Some(b)) if after.boss == Some(b) => None,
            (_, Some(b)) => Some(boss_transition(q, kind, msg, b, after.boss).ok_or_else(|| internal("no boss transition"))?),
        };
        plans.push(StepPlan { kind, before, after, produce, broadcasters: 0, boss_move });
    }
    // Backward demand over clique states.
    let mut demand: BTreeMap<StateId, usize> = BTreeMap::new();
    if last {
        if let Some(&(_, _, after)) = steps.last() {
            for k in after.clique.iter() {
                demand.insert(k, 1);
            }
        }
    }
    for plan in plans.iter_mut().rev() {
        let mut arrivals: BTreeMap<StateId, usize> = BTreeMap::new();
        let mut departures: BTreeMap<StateId, usize> = BTreeMap::new();
        let mut broadcasters = 1;
        for (k, producer, count) in plan.produce.iter_mut() {
            *count = demand.get(k).copied().unwrap_or(0).max(1);
            match *producer {
                Producer::Broadcasters => broadcasters = *count,
                Producer::Receive { from, generic: false, .. } => *departures.entry(from).or_default() += *count,
                Producer::Receive { .. } => {}
            }
        }
        if let StepKind::BroadcastFromClique(t) = plan.kind {
            let (from, _, to) = broadcast_parts(q, t);
            *departures.entry(from).or_default() += broadcasters;
            if plan.before.clique.contains(to) {
                *arrivals.entry(to).or_default() += broadcasters;
            }
            plan.broadcasters = broadcasters;
        }
        let mut next = BTreeMap::new();
        for k in plan.before.clique.iter() {
            let need = demand.get(&k).copied().unwrap_or(0);
            let arrived = arrivals.get(&k).copied().unwrap_or(0);
            let n = need.saturating_sub(arrived) + departures.get(&k).copied().unwrap_or(0);
            if n > 0 {
                next.insert(k, n);
            }
        }
        demand = next;
    }
    Ok(plans)
}

struct Builder<'a> {
    p: &'a Protocol,
    initial: Vec<LocalConfig>,
    steps: Vec<StepDescriptor>,
    config: Configuration,
    first_cover: HashMap<StateId, (usize, Agent)>,
    budget: usize,
}

impl<'a> Builder<'a> {
    fn fresh(&mut self) -> Result<Agent, ConcretizeError> {
        if self.initial.len() >= self.budget {
            return Err(ConcretizeError::BudgetExceeded(self.budget));
        }
        let a = self.initial.len();
        let l = LocalConfig { state: self.p.initial, regs: vec![a as Value] };
        self.initial.push(l.clone());
        self.config.agents.push(l);
        self.first_cover.entry(self.p.initial).or_insert((self.steps.len(), a));
        Ok(a)
    }

    fn value(&self, a: Agent) -> Value {
        self.config.agents[a].regs[0]
    }

    fn push(&mut self, s: StepDescriptor) -> Result<(), ConcretizeError> {
        apply_step_in_place(self.p, &mut self.config, &s).map_err(|e| ConcretizeError::Internal(e.to_string()))?;
        let time = self.steps.len() + 1;
        for a in std::iter::once(s.broadcaster).chain(s.receptions.keys().copied()) {
            self.first_cover.entry(self.config.state(a)).or_insert((time, a));
        }
        self.steps.push(s);
        Ok(())
    }

    /// A new agent in covered state `q`, idle in every existing step.
    fn acquire(&mut self, q: StateId) -> Result<Agent, ConcretizeError> {
        if q == self.p.initial {
            return self.fresh();
        }
        let (time, agent) = *self.first_cover.get(&q).ok_or_else(|| ConcretizeError::Internal("state never covered".into()))?;
        let mut cone = BTreeSet::from([agent]);
        let mut picked = Vec::new();
        for i in (0..time).rev() {
            let s = &self.steps[i];
            let hears = s.receptions.keys().any(|a| cone.contains(a));
            if hears || cone.contains(&s.broadcaster) {
                picked.push(i);
                cone.insert(s.broadcaster);
            }
        }
        picked.reverse();
        let mut rename = HashMap::new();
        for &a in &cone {
            rename.insert(a, self.fresh()?);
        }
        for i in picked {
            let s = &self.steps[i];
            let copy = StepDescriptor {
                broadcaster: rename[&s.broadcaster],
                transition: s.transition,
                receptions: s.receptions.iter().filter(|(a, _)| cone.contains(a)).map(|(a, t)| (rename[a], *t)).collect(),
            };
            self.push(copy)?;
        }
        Ok(rename[&agent])
    }
}

/// Builds a concrete initial run realizing `run`, using at most `budget` agents.
/// Its final configuration covers every state of the final `S ∪ K ∪ {b}`.
pub fn concretize(p: &Protocol, run: &AbstractRun, budget: usize) -> Result<Run, ConcretizeError> {
    let q = remove_disequality(p)?;
    let end = replay_abstract(&q, run)?;
    let mut b = Builder {
        p,
        initial: Vec::new(),
        steps: Vec::new(),
        config: Configuration { agents: Vec::new() },
        first_cover: HashMap::new(),
        budget,
    };
    let configs = run.configs(&q);
    let mut phases: Vec<Vec<(StepKind, AbstractConfig, AbstractConfig)>> = vec![Vec::new()];
    for (i, (kind, after)) in run.steps.iter().enumerate() {
        if *kind == StepKind::GangReset {
            phases.push(Vec::new());
        } else {
            phases.last_mut().unwrap().push((*kind, configs[i], *after));
        }
    }
    let phase_count = phases.len();
    for (index, phase) in phases.into_iter().enumerate() {
        let plans = plan_phase(&q, &phase, index + 1 == phase_count)?;
        let mut boss = Some(b.fresh()?);
        let mut pools: HashMap<StateId, Vec<Agent>> = HashMap::new();
        for plan in plans {
            run_step(&mut b, &q, &plan, &mut boss, &mut pools)?;
        }
    }
    let missing: Vec<StateId> = end.covered().iter().filter(|s| !b.config.covers(*s)).collect();
    for s in missing {
        b.acquire(s)?;
    }
    let result = Run { initial: Configuration { agents: b.initial }, steps: b.steps };
    let last = replay(p, &result).map_err(|e| ConcretizeError::Internal(e.to_string()))?;
    if end.covered().iter().any(|s| !last.covers(s)) {
        return Err(ConcretizeError::Internal("final configuration misses a state".into()));
    }
    Ok(result)
}

fn run_step(
    b: &mut Builder<'_>,
    q: &Protocol,
    plan: &StepPlan,
    boss: &mut Option<Agent>,
    pools: &mut HashMap<StateId, Vec<Agent>>,
) -> Result<(), ConcretizeError> {
    let internal = |s: &str| ConcretizeError::Internal(s.to_string());
    let take = |pools: &mut HashMap<StateId, Vec<Agent>>, k: StateId| {
        pools.get_mut(&k).and_then(|v| v.pop()).ok_or_else(|| internal("clique pool exhausted"))
    };
    let t = match plan.kind {
        StepKind::BroadcastFromClique(t) | StepKind::BroadcastFromBoss(t) | StepKind::ExternalBroadcast(t) => t,
        StepKind::GangReset => unreachable!(),
    };
    let (from, _, to) = broadcast_parts(q, t);
    let mut receivers: Vec<(Agent, TransId, StateId)> = Vec::new();
    for &(k, producer, count) in &plan.produce {
        if let Producer::Receive { trans, from, generic } = producer {
            for _ in 0..count {
                let a = if generic { b.acquire(from)? } else { take(pools, from)? };
                receivers.push((a, trans, k));
            }
        }
    }
    let mut broadcasters = Vec::new();
    match plan.kind {
        StepKind::BroadcastFromClique(_) => {
            for _ in 0..plan.broadcasters {
                broadcasters.push(take(pools, from)?);
            }
        }
        StepKind::BroadcastFromBoss(_) => broadcasters.push(boss.ok_or_else(|| internal("no boss"))?),
        _ => broadcasters.push(b.acquire(from)?),
    }
    let speaker = *broadcasters.last().unwrap();
    let mut all: Vec<(Agent, TransId)> = receivers.iter().map(|&(a, t, _)| (a, t)).collect();
    if let (Some(tr), Some(a)) = (plan.boss_move, *boss) {
        all.push((a, tr));
    }
    // Receptions that are disequality tests on the broadcast value need a
    // broadcaster holding another value.
    let value = b.value(speaker);
    let (helped, direct): (Vec<_>, Vec<_>) = all
        .into_iter()
        .partition(|&(a, tr)| matches!(b.p.transitions[tr].op, Op::Rec { action: Action::Neq, .. }) && b.value(a) == value);
    if !helped.is_empty() {
        let helper = b.acquire(from)?;
        b.push(StepDescriptor { broadcaster: helper, transition: t, receptions: helped.into_iter().collect() })?;
    }
    for &a in &broadcasters[..broadcasters.len() - 1] {
        b.push(StepDescriptor::silent(a, t))?;
    }
    b.push(StepDescriptor { broadcaster: speaker, transition: t, receptions: direct.into_iter().collect() })?;
    if matches!(plan.kind, StepKind::BroadcastFromClique(_)) {
        pools.entry(to).or_default().extend(broadcasters);
    }
    for (a, _, k) in receivers {
        pools.entry(k).or_default().push(a);
    }
    if plan.after.boss.is_none() {
        *boss = None;
    }
    Ok(())
}
