//! Canonical forms of configurations up to value (and agent) renaming.

use std::collections::HashMap;

use crate::config::{Configuration, LocalConfig, Value};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum CanonMode {
    #[default]
    ValuesOnly,
    ValuesAndAgents,
}

/// A canonical configuration together with the agent order used:
/// canonical agent `i` is original agent `order[i]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Canonical {
    pub config: Configuration,
    pub order: Vec<usize>,
}

/// Equality pattern of a valuation: each register replaced by the index of its first occurrence.
fn pattern(regs: &[Value]) -> Vec<usize> {
    regs.iter().map(|v| regs.iter().position(|w| w == v).unwrap()).collect()
}

pub fn canonicalize(g: &Configuration, mode: CanonMode) -> Configuration {
    canonicalize_with_order(g, mode).config
}

pub fn canonicalize_with_order(g: &Configuration, mode: CanonMode) -> Canonical {
    let mut order: Vec<usize> = (0..g.len()).collect();
    if mode == CanonMode::ValuesAndAgents {
        let keys: Vec<_> = g.agents.iter().map(|l| (l.state, pattern(&l.regs))).collect();
        order.sort_by(|&a, &b| keys[a].cmp(&keys[b]));
    }
    let mut names: HashMap<Value, Value> = HashMap::new();
    let agents = order
        .iter()
        .map(|&a| {
            let l = &g.agents[a];
            let regs = l
                .regs
                .iter()
                .map(|v| {
                    let next = names.len() as Value;
                    *names.entry(*v).or_insert(next)
                })
                .collect();
            LocalConfig { state: l.state, regs }
        })
        .collect();
    Canonical { config: Configuration { agents }, order }
}
