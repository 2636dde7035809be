//! From runs of signature protocols to unfolding trees.

use bnra_core::{replay_trace, Agent, LocalRun, LocalStep, Op, Protocol, Run, StateId, Value, Word};

use crate::tree::TreeNode;
use crate::TreeError;

/// One step of a replayed run, as seen by the agents involved.
struct Seen {
    broadcaster: Agent,
    transition: usize,
    msg: usize,
    value: Value,
    receptions: Vec<(Agent, usize)>,
}

/// Builds a signature unfolding tree for agent `a` and value `v` of `run`.
/// The root's local run is the projection of `run` on `a` and its spec is
/// the `v`-output of `a`.
pub fn run_to_tree_signature(p: &Protocol, run: &Run, a: Agent, v: Value) -> Result<TreeNode, TreeError> {
    if !p.is_signature() {
        return Err(TreeError::NotSignature);
    }
    if a >= run.agent_count() {
        return Err(TreeError::InvalidRun(format!("unknown agent {a}")));
    }
    let trace = replay_trace(p, run).map_err(|e| TreeError::InvalidRun(e.to_string()))?;
    let mut seen = Vec::with_capacity(run.steps.len());
    for (i, s) in run.steps.iter().enumerate() {
        let (msg, value) = match p.transitions[s.transition].op {
            Op::Br { msg, reg } => (msg, trace[i].agents[s.broadcaster].regs[reg - 1]),
            _ => return Err(TreeError::InvalidRun("local tests are not allowed in signature protocols".into())),
        };
        seen.push(Seen {
            broadcaster: s.broadcaster,
            transition: s.transition,
            msg,
            value,
            receptions: s.receptions.iter().map(|(&x, &t)| (x, t)).collect(),
        });
    }
    let steps = &seen;
    let start = |x: Agent| run.initial.agents[x].clone();
    let project = |x: Agent, k: usize| {
        let mut u = LocalRun::new(start(x));
        for s in &steps[..k] {
            if s.broadcaster == x {
                u.steps.push(LocalStep::Internal(s.transition));
            } else if let Some(&(_, t)) = s.receptions.iter().find(|(y, _)| *y == x) {
                u.steps.push(LocalStep::Reception(t, s.value));
            }
        }
        u
    };
    let output = |x: Agent, k: usize, v: Value| -> Word {
        steps[..k].iter().filter(|s| s.broadcaster == x && s.value == v).map(|s| s.msg).collect()
    };
    // Each pending node: (agent, prefix length, value, spec, parent path).
    struct Pending {
        agent: Agent,
        len: usize,
        value: Value,
        spec: Word,
        path: Vec<usize>,
    }
    let mut root: Option<TreeNode> = None;
    let mut queue =
        vec![Pending { agent: a, len: run.steps.len(), value: v, spec: output(a, run.steps.len(), v), path: Vec::new() }];
    while let Some(item) = queue.pop() {
        let u = project(item.agent, item.len);
        let mut node = TreeNode::boss(u, item.value, item.spec);
        let mut received: Vec<Value> = Vec::new();
        for s in &steps[..item.len] {
            if s.receptions.iter().any(|(y, _)| *y == item.agent) && !received.contains(&s.value) {
                received.push(s.value);
            }
        }
        let mut children = Vec::new();
        for (i, &w) in received.iter().enumerate() {
            let last = (0..item.len)
                .rev()
                .find(|&j| steps[j].value == w && steps[j].receptions.iter().any(|(y, _)| *y == item.agent))
                .expect("received value");
            let need: Word = steps[..item.len]
                .iter()
                .filter(|s| s.value == w && s.receptions.iter().any(|(y, _)| *y == item.agent))
                .map(|s| s.msg)
                .collect();
            node.non_initial.push((w, i));
            let mut path = item.path.clone();
            path.push(i);
            children.push(Pending { agent: steps[last].broadcaster, len: last + 1, value: w, spec: need, path });
        }
        match root.as_mut() {
            None => root = Some(node),
            Some(r) => {
                let (last, parent) = item.path.split_last().expect("child path");
                let parent = r.at_mut(parent).expect("parent exists");
                debug_assert_eq!(parent.children.len(), *last);
                parent.children.push(node);
            }
        }
        // Children are attached in order, so process them first-to-last.
        queue.extend(children.into_iter().rev());
    }
    Ok(root.expect("root"))
}

/// Shortest prefix of `run` that covers `q`.
pub fn truncate_to_cover(p: &Protocol, run: &Run, q: StateId) -> Option<Run> {
    bnra_core::first_cover(p, run, q).map(|k| run.truncated(k))
}
