//! From unfolding trees to runs.
//!
//! Every node is turned into a partial run in which one agent follows the
//! node's local run. Receptions on a non-initial value are served by a copy
//! of the boss child's run; receptions on an initial value are served by
//! copies of follower runs, spliced in segment by segment.

use std::collections::{BTreeMap, HashMap};

use bnra_core::{
    local_events, rename_partial, replay, replay_partial, run_events, Configuration, LocalEvent, LocalStep, MsgId, PartialRun,
    PartialStep, Protocol, Run, RunEvent, StepDescriptor, Unmatched, Value, Word,
};

use crate::decomposition::{scan, Read};
use crate::tree::{validate_tree, InitialAnnotation, Spec, TreeNode};
use crate::TreeError;

/// Result of [`tree_to_run`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Synthesized {
    /// A boss root yields an initial run.
    Complete(Run),
    /// A follower root yields a partial run whose unmatched receptions all
    /// carry the root's value.
    Partial(PartialRun),
}

impl Synthesized {
    pub fn partial(&self) -> PartialRun {
        match self {
            Synthesized::Complete(r) => r.to_partial(),
            Synthesized::Partial(r) => r.clone(),
        }
    }
}

fn internal(msg: impl Into<String>) -> TreeError {
    TreeError::Internal(msg.into())
}

/// Builds a run from a validated tree.
pub fn tree_to_run(p: &Protocol, tree: &TreeNode) -> Result<Synthesized, TreeError> {
    validate_tree(p, tree).map_err(TreeError::InvalidTree)?;
    let mut fresh = tree.max_value() + 1;
    let run = Builder { p }.build(tree, &mut fresh)?;
    replay_partial(p, &run).map_err(|e| internal(format!("synthesized run does not replay: {e}")))?;
    if tree.is_boss() {
        let run = run.to_run().ok_or_else(|| internal("boss root left unmatched receptions"))?;
        replay(p, &run).map_err(|e| internal(e.to_string()))?;
        Ok(Synthesized::Complete(run))
    } else {
        Ok(Synthesized::Partial(run))
    }
}

/// Renames `run` apart: `from` becomes `to`, every other value is fresh.
fn embed(run: &PartialRun, from: Value, to: Value, agent_offset: usize, fresh: &mut Value) -> PartialRun {
    let mut map = HashMap::new();
    map.insert(from, to);
    let mut values: Vec<Value> = run.initial.values().collect();
    values.extend(run.steps.iter().filter_map(|s| match s {
        PartialStep::Unmatched(u) => Some(u.value),
        _ => None,
    }));
    for v in values {
        map.entry(v).or_insert_with(|| {
            *fresh += 1;
            *fresh - 1
        });
    }
    rename_partial(run, agent_offset, &map)
}

fn merge(a: &PartialStep, b: &PartialStep) -> Result<PartialStep, TreeError> {
    match (a, b) {
        (PartialStep::Step(d), PartialStep::Unmatched(u)) | (PartialStep::Unmatched(u), PartialStep::Step(d)) => {
            let mut d = d.clone();
            d.receptions.extend(u.receptions.iter().map(|(&x, &t)| (x, t)));
            Ok(PartialStep::Step(d))
        }
        _ => Err(internal("merging two steps of the same kind")),
    }
}

/// Where a spliced step goes.
#[derive(Clone, Copy, Debug)]
enum Slot {
    /// Merged with the host step at this index.
    Merge(usize),
    /// Inserted before the host step at `gap`, in segment `label`.
    Insert { gap: usize, label: usize },
}

/// A host partial run with a segment label per step.
struct Host {
    run: PartialRun,
    labels: Vec<usize>,
}

impl Host {
    /// Splices `guest` (already renamed) into the host. `anchors` lists, in
    /// guest order, the guest steps with a fixed slot; unanchored guest steps
    /// go right before the next anchor. The last guest step must be anchored.
    fn splice(&mut self, guest: PartialRun, anchors: &[(usize, Slot)]) -> Result<(), TreeError> {
        let n = guest.steps.len();
        if n > 0 && anchors.last().map(|a| a.0) != Some(n - 1) {
            return Err(internal("last guest step is not anchored"));
        }
        self.run.initial.agents.extend(guest.initial.agents);
        let old_steps = std::mem::take(&mut self.run.steps);
        let old_labels = std::mem::take(&mut self.labels);
        let (mut steps, mut labels) = (Vec::new(), Vec::new());
        let (mut r, mut ci) = (0, 0);
        for &(c, slot) in anchors {
            let (pos, label) = match slot {
                Slot::Merge(x) => (x, old_labels[x]),
                Slot::Insert { gap, label } => (gap, label),
            };
            if pos < r || c < ci {
                return Err(internal("anchors are not ordered"));
            }
            while r < pos {
                steps.push(old_steps[r].clone());
                labels.push(old_labels[r]);
                r += 1;
            }
            for k in ci..=c {
                let s = if k == c {
                    match slot {
                        Slot::Merge(x) => {
                            r = x + 1;
                            merge(&old_steps[x], &guest.steps[k])?
                        }
                        Slot::Insert { .. } => guest.steps[k].clone(),
                    }
                } else {
                    guest.steps[k].clone()
                };
                steps.push(s);
                labels.push(label);
            }
            ci = c + 1;
        }
        steps.extend(old_steps[r..].iter().cloned());
        labels.extend(old_labels[r..].iter().copied());
        self.run.steps = steps;
        self.labels = labels;
        Ok(())
    }

    /// First host index whose label is at least `k`.
    fn segment_start(&self, k: usize) -> usize {
        self.labels.iter().position(|&l| l >= k).unwrap_or(self.labels.len())
    }

    /// Slots for `letters` read against the host's broadcasts of `v` in
    /// segments `0..segments`, with free letters among `free`.
    fn read(&self, p: &Protocol, letters: &[MsgId], v: Value, segments: usize, free: &[MsgId]) -> Result<Vec<Slot>, TreeError> {
        let events = run_events(p, &self.run).map_err(|e| internal(e.to_string()))?;
        let mut words: Vec<Word> = vec![Vec::new(); segments];
        let mut index: Vec<Vec<usize>> = vec![Vec::new(); segments];
        for ev in events {
            if let RunEvent::Broadcast { index: i, msg, value, .. } = ev {
                let l = self.labels[i];
                if value == v && l < segments {
                    words[l].push(msg);
                    index[l].push(i);
                }
            }
        }
        let reads = scan(letters, &words, free).ok_or_else(|| internal("letters cannot be read against the host"))?;
        let mut last = 0;
        let mut out = Vec::with_capacity(reads.len());
        for r in reads {
            match r {
                Read::Match { segment, pos } => {
                    let x = index[segment][pos];
                    out.push(Slot::Merge(x));
                    last = x + 1;
                }
                Read::Free { segment } => {
                    let gap = last.max(self.segment_start(segment));
                    out.push(Slot::Insert { gap, label: segment });
                    last = gap;
                }
            }
        }
        Ok(out)
    }
}

struct Builder<'a> {
    p: &'a Protocol,
}

impl Builder<'_> {
    fn build(&self, node: &TreeNode, fresh: &mut Value) -> Result<PartialRun, TreeError> {
        let p = self.p;
        let u = &node.local_run;
        let (_, events) = local_events(p, u).map_err(|e| internal(e.to_string()))?;
        let mut run = PartialRun { initial: Configuration { agents: vec![u.start.clone()] }, steps: Vec::new() };
        for (s, e) in u.steps.iter().zip(&events) {
            run.steps.push(match (*s, *e) {
                (LocalStep::Reception(t, value), LocalEvent::Receive { msg, .. }) => {
                    PartialStep::Unmatched(Unmatched { message: msg, value, receptions: BTreeMap::from([(0, t)]) })
                }
                (s, _) => PartialStep::Step(StepDescriptor::silent(0, s.transition())),
            });
        }
        for v in u.non_initial_values() {
            if v != node.value {
                self.serve_non_initial(node, v, &mut run, fresh)?;
            }
        }
        for v in u.initial_values() {
            let a = node.annotation(p, v).ok_or_else(|| internal("missing annotation"))?;
            run = self.serve_initial(node, &a, run, fresh)?;
        }
        if let Spec::Follower { fm, .. } = node.spec {
            let events = run_events(p, &run).map_err(|e| internal(e.to_string()))?;
            let end = events
                .iter()
                .find_map(|e| match *e {
                    RunEvent::Broadcast { index, msg, value, .. } if msg == fm && value == node.value => Some(index),
                    _ => None,
                })
                .ok_or_else(|| internal("follower never broadcasts fm"))?;
            run.steps.truncate(end + 1);
        }
        Ok(run)
    }

    /// Matches the receptions on `v` with broadcasts of a copy of the boss child.
    fn serve_non_initial(&self, node: &TreeNode, v: Value, run: &mut PartialRun, fresh: &mut Value) -> Result<(), TreeError> {
        let p = self.p;
        let child = node.boss_child_for(p, v).and_then(|i| node.children.get(i)).ok_or_else(|| internal("no boss child"))?;
        let built = self.build(child, fresh)?;
        let mut guest = embed(&built, child.value, v, run.initial.len(), fresh);
        if guest.unmatched_count() > 0 {
            return Err(internal("boss child run has unmatched receptions"));
        }
        let wanted: Vec<(usize, MsgId)> = run
            .steps
            .iter()
            .enumerate()
            .filter_map(|(i, s)| match s {
                PartialStep::Unmatched(u) if u.value == v => Some((i, u.message)),
                _ => None,
            })
            .collect();
        let offered: Vec<(usize, MsgId)> = run_events(p, &built)
            .map_err(|e| internal(e.to_string()))?
            .into_iter()
            .filter_map(|e| match e {
                RunEvent::Broadcast { index, msg, value, .. } if value == child.value => Some((index, msg)),
                _ => None,
            })
            .collect();
        let want_word: Word = wanted.iter().map(|x| x.1).collect();
        let offer_word: Word = offered.iter().map(|x| x.1).collect();
        let pos = bnra_core::embedding(&want_word, &offer_word).ok_or_else(|| internal("boss child output too short"))?;
        if let Some(&last) = pos.last() {
            guest.steps.truncate(offered[last].0 + 1);
        }
        run.initial.agents.extend(guest.initial.agents.iter().cloned());
        let old = std::mem::take(&mut run.steps);
        let (mut r, mut c) = (0, 0);
        for (k, &j) in pos.iter().enumerate() {
            let (ri, ci) = (wanted[k].0, offered[j].0);
            run.steps.extend(old[r..ri].iter().cloned());
            run.steps.extend(guest.steps[c..ci].iter().cloned());
            run.steps.push(merge(&guest.steps[ci], &old[ri])?);
            r = ri + 1;
            c = ci + 1;
        }
        run.steps.extend(old[r..].iter().cloned());
        Ok(())
    }

    /// Eliminates every unmatched reception on initial value `a.value`.
    fn serve_initial(
        &self,
        node: &TreeNode,
        a: &InitialAnnotation,
        run: PartialRun,
        fresh: &mut Value,
    ) -> Result<PartialRun, TreeError> {
        let p = self.p;
        let v = a.value;
        let free = a.dec.messages();
        let labels = self.segment_labels(&run, &a.splits);
        let mut host = Host { run, labels };
        if let Spec::Boss(bw) = &node.spec {
            if node.value == v {
                // Make room for the follower broadcasts that bw relies on.
                let slots = host.read(p, bw, v, a.dec.len() + 1, &free)?;
                let mut pseudo = PartialRun { initial: Configuration { agents: Vec::new() }, steps: Vec::new() };
                let mut anchors = Vec::new();
                for (k, slot) in slots.into_iter().enumerate() {
                    if let Slot::Insert { .. } = slot {
                        anchors.push((pseudo.steps.len(), slot));
                        pseudo.steps.push(PartialStep::Unmatched(Unmatched {
                            message: bw[k],
                            value: v,
                            receptions: BTreeMap::new(),
                        }));
                    }
                }
                host.splice(pseudo, &anchors)?;
            }
        }
        loop {
            let target = host
                .run
                .steps
                .iter()
                .enumerate()
                .filter_map(|(i, s)| match s {
                    PartialStep::Unmatched(u) if u.value == v => Some((a.dec.index_of(u.message), i)),
                    _ => None,
                })
                .max_by_key(|&(j, i)| (j, std::cmp::Reverse(i)));
            let Some((j, x)) = target else { break };
            let j = j.ok_or_else(|| internal("unmatched message outside the decomposition"))?;
            let child = node.children.get(a.followers[j - 1]).ok_or_else(|| internal("missing follower child"))?;
            let built = self.build(child, fresh)?;
            let guest = embed(&built, child.value, v, host.run.initial.len(), fresh);
            let mut anchors = Vec::new();
            let mut letters = Vec::new();
            for (i, s) in guest.steps.iter().enumerate() {
                if let PartialStep::Unmatched(u) = s {
                    if u.value != v {
                        return Err(internal("follower run has unmatched receptions on another value"));
                    }
                    anchors.push(i);
                    letters.push(u.message);
                }
            }
            let slots = host.read(p, &letters, v, j, &free)?;
            let mut anchored: Vec<(usize, Slot)> = anchors.into_iter().zip(slots).collect();
            let last = guest.steps.len().checked_sub(1).ok_or_else(|| internal("empty follower run"))?;
            if matches!(guest.steps[last], PartialStep::Unmatched(_)) {
                return Err(internal("follower run does not end with its broadcast"));
            }
            anchored.push((last, Slot::Merge(x)));
            host.splice(guest, &anchored)?;
        }
        Ok(host.run)
    }

    /// Segment of every step, following agent 0's position in its local run.
    fn segment_labels(&self, run: &PartialRun, splits: &[usize]) -> Vec<usize> {
        let mut done = 0;
        run.steps
            .iter()
            .map(|s| {
                let label = splits.iter().filter(|&&b| b <= done).count();
                let involved = match s {
                    PartialStep::Step(d) => d.broadcaster == 0 || d.receptions.contains_key(&0),
                    PartialStep::Unmatched(u) => u.receptions.contains_key(&0),
                };
                if involved {
                    done += 1;
                }
                label
            })
            .collect()
    }
}
