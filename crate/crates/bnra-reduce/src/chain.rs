//! Scheduling of agents arranged in a chain, each listening to its predecessor.

use std::collections::BTreeMap;

use bnra_core::{StepDescriptor, TransId};

use crate::ReduceError;

/// One action of an agent's plan.
#[derive(Clone, Copy, Debug)]
pub(crate) enum Act {
    Br(TransId),
    /// Reception of the predecessor's broadcast number `k` (0-based).
    Rec(TransId, usize),
}

/// Interleaves the plans of agents `0..plans.len()`, where agent `i+1`
/// receives from agent `i`. Receptions of each plan must refer to increasing
/// broadcast numbers of the predecessor.
pub(crate) fn schedule(plans: &[Vec<Act>]) -> Result<Vec<StepDescriptor>, ReduceError> {
    let n = plans.len();
    let mut pos = vec![0; n];
    let mut sent = vec![0; n];
    let mut steps = Vec::new();
    loop {
        let ready = (0..n).rev().find(|&j| {
            let Some(Act::Br(_)) = plans[j].get(pos[j]) else { return false };
            match plans.get(j + 1).and_then(|next| next.get(pos[j + 1])) {
                Some(&Act::Rec(_, k)) if k == sent[j] => true,
                _ => j + 1 == n || !plans[j + 1][pos[j + 1]..].iter().any(|a| matches!(a, Act::Rec(_, k) if *k == sent[j])),
            }
        });
        let Some(j) = ready else { break };
        let Act::Br(t) = plans[j][pos[j]] else { unreachable!() };
        let mut receptions = BTreeMap::new();
        if let Some(&Act::Rec(r, k)) = plans.get(j + 1).and_then(|next| next.get(pos[j + 1])) {
            if k == sent[j] {
                receptions.insert(j + 1, r);
                pos[j + 1] += 1;
            }
        }
        steps.push(StepDescriptor { broadcaster: j, transition: t, receptions });
        pos[j] += 1;
        sent[j] += 1;
    }
    if (0..n).any(|j| pos[j] < plans[j].len()) {
        return Err(ReduceError::Internal("chain schedule is stuck".into()));
    }
    Ok(steps)
}
