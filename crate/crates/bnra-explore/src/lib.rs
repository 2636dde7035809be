//! Bounded breadth-first exploration over canonicalized configurations.
//!
//! The explorer is a semi-decision procedure: a `Found` verdict carries a run
//! that replays, while `NotFoundWithinBounds` only says that no run exists
//! with the given number of agents and steps.
//!
//! With several workers, each BFS level is expanded in parallel and merged in
//! frontier order, so verdicts and witnesses do not depend on the worker count.

use std::collections::HashMap;

use bnra_core::{
    apply_step, canonicalize_with_order, enabled_steps_with, initial_configuration, outgoing, CanonMode, Configuration, Protocol,
    Run, StateId, StepDescriptor,
};
use rayon::prelude::*;
use thiserror::Error;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ExploreParams {
    pub agents: usize,
    pub max_depth: usize,
    pub max_states: usize,
    pub canon: CanonMode,
    pub workers: usize,
}

impl ExploreParams {
    pub fn new(agents: usize, max_depth: usize) -> Self {
        ExploreParams { agents, max_depth, max_states: 1_000_000, canon: CanonMode::ValuesOnly, workers: 1 }
    }

    pub fn max_states(mut self, k: usize) -> Self {
        self.max_states = k;
        self
    }

    pub fn canon(mut self, mode: CanonMode) -> Self {
        self.canon = mode;
        self
    }

    pub fn workers(mut self, n: usize) -> Self {
        self.workers = n;
        self
    }
}

/// Which configurations the search accepts.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Goal {
    /// Some agent is in one of the states.
    Cover(Vec<StateId>),
    /// Every agent is in the state.
    Target(StateId),
}

impl Goal {
    pub fn holds(&self, g: &Configuration) -> bool {
        match self {
            Goal::Cover(qs) => g.agents.iter().any(|l| qs.contains(&l.state)),
            Goal::Target(q) => g.all_in(*q),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Outcome {
    Found(Run),
    NotFoundWithinBounds,
    BudgetExceeded,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Stats {
    pub visited: usize,
    pub expanded: usize,
    pub depth: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Report {
    pub outcome: Outcome,
    pub stats: Stats,
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum ExploreError {
    #[error("at least one agent is required")]
    NoAgents,
    #[error("the state budget must be positive")]
    NoBudget,
    #[error("at least one worker is required")]
    NoWorkers,
    #[error("unknown state {0}")]
    UnknownState(StateId),
}

struct Node {
    config: Configuration,
    parent: usize,
    step: Option<StepDescriptor>,
}

pub fn bounded_cover(p: &Protocol, q: StateId, params: ExploreParams) -> Result<Report, ExploreError> {
    explore(p, &Goal::Cover(vec![q]), params)
}

pub fn bounded_target(p: &Protocol, q: StateId, params: ExploreParams) -> Result<Report, ExploreError> {
    explore(p, &Goal::Target(q), params)
}

pub fn explore(p: &Protocol, goal: &Goal, params: ExploreParams) -> Result<Report, ExploreError> {
    if params.agents == 0 {
        return Err(ExploreError::NoAgents);
    }
    if params.max_states == 0 {
        return Err(ExploreError::NoBudget);
    }
    if params.workers == 0 {
        return Err(ExploreError::NoWorkers);
    }
    let states = match goal {
        Goal::Cover(qs) => qs.clone(),
        Goal::Target(q) => vec![*q],
    };
    if let Some(&q) = states.iter().find(|&&q| q >= p.states.len()) {
        return Err(ExploreError::UnknownState(q));
    }
    let pool = if params.workers > 1 { rayon::ThreadPoolBuilder::new().num_threads(params.workers).build().ok() } else { None };
    let out = outgoing(p);
    let init = initial_configuration(p, params.agents).map_err(|_| ExploreError::NoAgents)?;
    let root = canonicalize_with_order(&init, params.canon).config;
    let mut stats = Stats { visited: 1, ..Stats::default() };
    let mut nodes = vec![Node { config: root.clone(), parent: 0, step: None }];
    if goal.holds(&root) {
        return Ok(Report { outcome: Outcome::Found(witness(p, &nodes, 0, &init, params.canon)), stats });
    }
    let mut visited: HashMap<Configuration, usize> = HashMap::from([(root, 0)]);
    let mut frontier = vec![0usize];
    let successors = |c: &Configuration| -> Vec<(StepDescriptor, Configuration)> {
        enabled_steps_with(p, &out, c)
            .into_iter()
            .map(|s| {
                let next = apply_step(p, c, &s).expect("enabled step applies");
                let canon = canonicalize_with_order(&next, params.canon).config;
                (s, canon)
            })
            .collect()
    };
    for depth in 0..params.max_depth {
        if frontier.is_empty() {
            break;
        }
        stats.depth = depth + 1;
        let expanded: Vec<Vec<(StepDescriptor, Configuration)>> = match &pool {
            Some(pool) => pool.install(|| frontier.par_iter().map(|&i| successors(&nodes[i].config)).collect()),
            None => frontier.iter().map(|&i| successors(&nodes[i].config)).collect(),
        };
        let mut next_frontier = Vec::new();
        for (&parent, succ) in frontier.iter().zip(expanded) {
            stats.expanded += 1;
            for (step, config) in succ {
                if visited.contains_key(&config) {
                    continue;
                }
                let found = goal.holds(&config);
                if !found && visited.len() >= params.max_states {
                    return Ok(Report { outcome: Outcome::BudgetExceeded, stats });
                }
                let id = nodes.len();
                visited.insert(config.clone(), id);
                nodes.push(Node { config, parent, step: Some(step) });
                stats.visited += 1;
                if found {
                    let run = witness(p, &nodes, id, &init, params.canon);
                    return Ok(Report { outcome: Outcome::Found(run), stats });
                }
                next_frontier.push(id);
            }
        }
        frontier = next_frontier;
    }
    Ok(Report { outcome: Outcome::NotFoundWithinBounds, stats })
}

/// Rebuilds a concrete run from parent pointers by translating each stored
/// step through the agent order of the concrete configuration.
fn witness(p: &Protocol, nodes: &[Node], target: usize, init: &Configuration, mode: CanonMode) -> Run {
    let mut path = Vec::new();
    let mut i = target;
    while let Some(step) = &nodes[i].step {
        path.push(step);
        i = nodes[i].parent;
    }
    path.reverse();
    let mut run = Run::empty(init.clone());
    let mut g = init.clone();
    for step in path {
        let order = canonicalize_with_order(&g, mode).order;
        let concrete = StepDescriptor {
            broadcaster: order[step.broadcaster],
            transition: step.transition,
            receptions: step.receptions.iter().map(|(&a, &t)| (order[a], t)).collect(),
        };
        g = apply_step(p, &g, &concrete).expect("translated step applies");
        run.steps.push(concrete);
    }
    run
}
