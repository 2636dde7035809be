//! Unfolding trees and their validation.

use std::fmt;

use bnra_core::{local_events, subword, v_input, v_output, visited_states, LocalRun, MsgId, Protocol, StateId, Value, Word};

use crate::decomposition::{admits_decomposition, Decomposition};

/// Specification carried out by a node.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Spec {
    /// Broadcast `bw` with one of the node's initial values.
    Boss(Word),
    /// After receiving `fw` with a non-initial value, broadcast `fm` with it.
    Follower { fw: Word, fm: MsgId },
}

/// Decomposition and split of the local run for one initial value.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct InitialAnnotation {
    pub value: Value,
    pub dec: Decomposition,
    /// Local-run positions where `u_1, …, u_ℓ` start (non-decreasing).
    pub splits: Vec<usize>,
    /// Index in `children` of the follower node for each `m_i`.
    pub followers: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct TreeNode {
    pub local_run: LocalRun,
    pub value: Value,
    pub spec: Spec,
    /// Annotations for initial values; missing values use `(voutput(v, u))`.
    pub initial: Vec<InitialAnnotation>,
    /// Child index of the boss node serving each non-initial value.
    pub non_initial: Vec<(Value, usize)>,
    pub children: Vec<TreeNode>,
}

impl TreeNode {
    pub fn boss(local_run: LocalRun, value: Value, bw: Word) -> Self {
        TreeNode { local_run, value, spec: Spec::Boss(bw), initial: Vec::new(), non_initial: Vec::new(), children: Vec::new() }
    }

    pub fn follower(local_run: LocalRun, value: Value, fw: Word, fm: MsgId) -> Self {
        TreeNode {
            local_run,
            value,
            spec: Spec::Follower { fw, fm },
            initial: Vec::new(),
            non_initial: Vec::new(),
            children: Vec::new(),
        }
    }

    pub fn with_child(mut self, child: TreeNode) -> Self {
        self.children.push(child);
        self
    }

    pub fn is_boss(&self) -> bool {
        matches!(self.spec, Spec::Boss(_))
    }

    pub fn node_count(&self) -> usize {
        1 + self.children.iter().map(TreeNode::node_count).sum::<usize>()
    }

    /// The node at `path` (child indices from the root).
    pub fn at(&self, path: &[usize]) -> Option<&TreeNode> {
        path.iter().try_fold(self, |n, &i| n.children.get(i))
    }

    pub fn at_mut(&mut self, path: &[usize]) -> Option<&mut TreeNode> {
        path.iter().try_fold(self, |n, &i| n.children.get_mut(i))
    }

    /// Largest value mentioned anywhere in the tree.
    pub fn max_value(&self) -> Value {
        let u = &self.local_run;
        let local = u.start.regs.iter().copied().chain(u.steps.iter().filter_map(|s| match *s {
            bnra_core::LocalStep::Reception(_, v) => Some(v),
            _ => None,
        }));
        let annotated = self.initial.iter().map(|a| a.value).chain(self.non_initial.iter().map(|(v, _)| *v));
        local
            .chain(annotated)
            .chain(std::iter::once(self.value))
            .chain(self.children.iter().map(TreeNode::max_value))
            .max()
            .unwrap_or(0)
    }

    /// The annotation for initial value `v`, or the default one.
    pub(crate) fn annotation(&self, p: &Protocol, v: Value) -> Option<InitialAnnotation> {
        if let Some(a) = self.initial.iter().find(|a| a.value == v) {
            return Some(a.clone());
        }
        let (_, events) = local_events(p, &self.local_run).ok()?;
        Some(InitialAnnotation {
            value: v,
            dec: Decomposition::new(v_output(&events, v)),
            splits: Vec::new(),
            followers: Vec::new(),
        })
    }

    /// Child serving non-initial value `v`.
    pub(crate) fn boss_child_for(&self, p: &Protocol, v: Value) -> Option<usize> {
        if let Some(&(_, i)) = self.non_initial.iter().find(|(x, _)| *x == v) {
            return Some(i);
        }
        let need = local_events(p, &self.local_run).ok().map(|(_, e)| v_input(&e, v))?;
        self.children.iter().position(|c| matches!(&c.spec, Spec::Boss(bw) if subword(&need, bw)))
    }
}

/// Which definition a violation refers to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Condition {
    /// The protocol is not a signature protocol.
    Signature,
    /// The local run does not replay from an initial local configuration.
    LocalRun,
    I,
    II,
    III,
    IV,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Violation {
    /// Child indices from the root.
    pub path: Vec<usize>,
    pub condition: Condition,
    pub detail: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "node {:?}: condition {:?}: {}", self.path, self.condition, self.detail)
    }
}

fn distinct(values: &[Value]) -> bool {
    values.iter().enumerate().all(|(i, v)| !values[..i].contains(v))
}

fn check_local_run(
    p: &Protocol,
    node: &TreeNode,
    path: &[usize],
    out: &mut Vec<Violation>,
) -> Option<Vec<bnra_core::LocalEvent>> {
    let u = &node.local_run;
    let mut fail = |detail: String| {
        out.push(Violation { path: path.to_vec(), condition: Condition::LocalRun, detail });
        None
    };
    if u.start.state != p.initial || u.start.regs.len() != p.registers || !distinct(&u.start.regs) {
        return fail("local run does not start from an initial local configuration".into());
    }
    match local_events(p, u) {
        Ok((_, events)) => Some(events),
        Err(e) => fail(e.to_string()),
    }
}

fn received_values(events: &[bnra_core::LocalEvent]) -> Vec<Value> {
    let mut out = Vec::new();
    for e in events {
        if let bnra_core::LocalEvent::Receive { value, .. } = *e {
            if !out.contains(&value) {
                out.push(value);
            }
        }
    }
    out
}

/// Validates a tree over a signature protocol: every node needs a word spec.
pub fn validate_signature_tree(p: &Protocol, tree: &TreeNode) -> Result<(), Vec<Violation>> {
    let mut out = Vec::new();
    if !p.is_signature() {
        out.push(Violation { path: Vec::new(), condition: Condition::Signature, detail: "not a signature protocol".into() });
        return Err(out);
    }
    signature_node(p, tree, &mut Vec::new(), &mut out);
    if out.is_empty() {
        Ok(())
    } else {
        Err(out)
    }
}

fn signature_node(p: &Protocol, node: &TreeNode, path: &mut Vec<usize>, out: &mut Vec<Violation>) {
    let mut push = |condition, detail: String| out.push(Violation { path: path.clone(), condition, detail });
    match &node.spec {
        Spec::Follower { .. } => push(Condition::II, "follower node in a signature tree".into()),
        Spec::Boss(spec) => {
            if let Some(events) = check_local_run(p, node, path, out) {
                let mut push = |condition, detail: String| out.push(Violation { path: path.clone(), condition, detail });
                for v in received_values(&events) {
                    if node.local_run.is_initial_value(v) {
                        push(Condition::I, format!("initial value {v} is received"));
                        continue;
                    }
                    let need = v_input(&events, v);
                    let served = node.children.iter().any(|c| matches!(&c.spec, Spec::Boss(bw) if subword(&need, bw)));
                    if !served {
                        push(Condition::III, format!("no child broadcasts the input on value {v}"));
                    }
                }
                if !subword(spec, &v_output(&events, node.value)) {
                    push(Condition::II, "spec is not a subword of the output".into());
                }
            }
        }
    }
    for (i, c) in node.children.iter().enumerate() {
        path.push(i);
        signature_node(p, c, path, out);
        path.pop();
    }
}

/// Validates a general unfolding tree using its annotations.
pub fn validate_tree(p: &Protocol, tree: &TreeNode) -> Result<(), Vec<Violation>> {
    let mut out = Vec::new();
    general_node(p, tree, &mut Vec::new(), &mut out);
    if out.is_empty() {
        Ok(())
    } else {
        Err(out)
    }
}

fn general_node(p: &Protocol, node: &TreeNode, path: &mut Vec<usize>, out: &mut Vec<Violation>) {
    if let Some(events) = check_local_run(p, node, path, out) {
        check_general(p, node, &events, path, out);
    }
    for (i, c) in node.children.iter().enumerate() {
        path.push(i);
        general_node(p, c, path, out);
        path.pop();
    }
}

fn check_general(p: &Protocol, node: &TreeNode, events: &[bnra_core::LocalEvent], path: &[usize], out: &mut Vec<Violation>) {
    let u = &node.local_run;
    let mut push = |condition, detail: String| out.push(Violation { path: path.to_vec(), condition, detail });
    // (i) non-initial values other than v(μ)
    for v in u.non_initial_values() {
        if v == node.value {
            continue;
        }
        let need = v_input(events, v);
        let ok = node
            .boss_child_for(p, v)
            .and_then(|i| node.children.get(i))
            .is_some_and(|c| matches!(&c.spec, Spec::Boss(bw) if subword(&need, bw)));
        if !ok {
            push(Condition::I, format!("no boss child covers the input on value {v}"));
        }
    }
    // (ii) initial values
    for v in u.initial_values() {
        let Some(a) = node.annotation(p, v) else { continue };
        if let Err(detail) = check_annotation(p, node, &a) {
            push(Condition::II, format!("value {v}: {detail}"));
        }
    }
    match &node.spec {
        Spec::Follower { fw, fm } => {
            if u.is_initial_value(node.value) {
                push(Condition::III, "follower value is initial".into());
            } else if !subword(&v_input(events, node.value), fw) {
                push(Condition::III, "input on the follower value is not a subword of fw".into());
            } else if !v_output(events, node.value).contains(fm) {
                push(Condition::III, "fm is never broadcast".into());
            }
        }
        Spec::Boss(bw) => {
            if !u.is_initial_value(node.value) {
                push(Condition::IV, "boss value is not initial".into());
            } else if let Some(a) = node.annotation(p, node.value) {
                if !admits_decomposition(bw, &a.dec) {
                    push(Condition::IV, "bw does not admit the decomposition".into());
                }
            }
        }
    }
}

fn check_annotation(p: &Protocol, node: &TreeNode, a: &InitialAnnotation) -> Result<(), String> {
    let u = &node.local_run;
    let ell = a.dec.len();
    if !a.dec.is_well_formed() {
        return Err("decomposition repeats a message type".into());
    }
    if a.splits.len() != ell || a.followers.len() != ell {
        return Err("annotation sizes do not match ℓ".into());
    }
    let mut bounds = vec![0];
    bounds.extend(a.splits.iter().copied());
    bounds.push(u.len());
    if bounds.windows(2).any(|w| w[0] > w[1]) {
        return Err("split positions are not ordered".into());
    }
    let messages = a.dec.messages();
    for i in 0..=ell {
        let part = u.slice(p, bounds[i], bounds[i + 1]).map_err(|e| e.to_string())?;
        let (_, events) = local_events(p, &part).map_err(|e| e.to_string())?;
        if !subword(a.dec.segment(i), &v_output(&events, a.value)) {
            return Err(format!("w{i} is not broadcast in u{i}"));
        }
        if v_input(&events, a.value).iter().any(|m| !messages[..i].contains(m)) {
            return Err(format!("u{i} receives a message outside m1..m{i}"));
        }
    }
    for (i, &c) in a.followers.iter().enumerate() {
        let Some(child) = node.children.get(c) else {
            return Err(format!("follower child {c} does not exist"));
        };
        match &child.spec {
            Spec::Follower { fw, fm } if *fm == messages[i] => {
                if !admits_decomposition(fw, &a.dec.prefix(i + 1)) {
                    return Err(format!("fw of the follower for m{} is outside L(dec_{})", i + 1, i + 1));
                }
            }
            _ => return Err(format!("child {c} is not a follower for m{}", i + 1)),
        }
    }
    Ok(())
}

/// The root is a boss node whose local run visits `q_f`.
pub fn is_coverability_witness(p: &Protocol, tree: &TreeNode, q_f: StateId) -> bool {
    tree.is_boss() && local_events(p, &tree.local_run).is_ok() && visited_states(p, &tree.local_run).contains(&q_f)
}

fn dominated_by(ancestor: &Spec, descendant: &Spec) -> bool {
    match (ancestor, descendant) {
        (Spec::Boss(a), Spec::Boss(d)) => subword(a, d),
        (Spec::Follower { fw: a, fm: am }, Spec::Follower { fw: d, fm: dm }) => am == dm && subword(d, a),
        _ => false,
    }
}

/// Path (relative to `node`) of a strict descendant whose spec dominates `node`'s.
fn dominating_descendant(node: &TreeNode) -> Option<Vec<usize>> {
    let mut stack: Vec<Vec<usize>> = (0..node.children.len()).map(|i| vec![i]).collect();
    while let Some(path) = stack.pop() {
        let d = node.at(&path).expect("path");
        if dominated_by(&node.spec, &d.spec) {
            return Some(path);
        }
        for i in 0..d.children.len() {
            let mut next = path.clone();
            next.push(i);
            stack.push(next);
        }
    }
    None
}

fn shorten_once(node: &mut TreeNode) -> bool {
    for i in 0..node.children.len() {
        if let Some(rel) = dominating_descendant(&node.children[i]) {
            let replacement = node.children[i].at(&rel).expect("path").clone();
            node.children[i] = replacement;
            return true;
        }
        if shorten_once(&mut node.children[i]) {
            return true;
        }
    }
    false
}

/// Replaces a subtree by a dominating strict descendant's subtree until no
/// such pair is left. The root itself is kept.
pub fn minimize_tree(tree: &TreeNode) -> TreeNode {
    let mut t = tree.clone();
    while shorten_once(&mut t) {}
    t
}
