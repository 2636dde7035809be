//! JSON documents for runs, partial runs, unfolding trees and abstract runs.
//!
//! Every document carries `"format": 1`. States, messages and transitions
//! are protocol indices; keys are sorted so output is byte-stable.

use std::collections::BTreeMap;

use bnra_core::{
    Agent, Configuration, LocalConfig, LocalRun, LocalStep, MsgId, PartialRun, PartialStep, Run, StateId, StepDescriptor,
    TransId, Unmatched, Value,
};
use bnra_cover1::{AbstractConfig, AbstractRun, StateSet, StepKind};
use bnra_trees::{Decomposition, InitialAnnotation, Spec, TreeNode};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::Diagnostic;

pub const FORMAT_VERSION: u64 = 1;

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct AgentJson {
    state: StateId,
    regs: Vec<Value>,
}

impl From<&LocalConfig> for AgentJson {
    fn from(l: &LocalConfig) -> Self {
        AgentJson { state: l.state, regs: l.regs.clone() }
    }
}

impl From<AgentJson> for LocalConfig {
    fn from(a: AgentJson) -> Self {
        LocalConfig { state: a.state, regs: a.regs }
    }
}

/// One step; `broadcaster: null` marks an unmatched reception.
#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct StepJson {
    broadcaster: Option<Agent>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    transition: Option<TransId>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    message: Option<MsgId>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    value: Option<Value>,
    receivers: BTreeMap<String, TransId>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RunJson {
    format: u64,
    initial: Vec<AgentJson>,
    steps: Vec<StepJson>,
}

fn receivers_out(r: &BTreeMap<Agent, TransId>) -> BTreeMap<String, TransId> {
    r.iter().map(|(a, t)| (a.to_string(), *t)).collect()
}

fn receivers_in(r: BTreeMap<String, TransId>) -> Result<BTreeMap<Agent, TransId>, String> {
    r.into_iter().map(|(a, t)| a.parse().map(|a| (a, t)).map_err(|_| format!("receiver `{a}` is not an agent index"))).collect()
}

fn step_out(s: &PartialStep) -> StepJson {
    match s {
        PartialStep::Step(d) => StepJson {
            broadcaster: Some(d.broadcaster),
            transition: Some(d.transition),
            message: None,
            value: None,
            receivers: receivers_out(&d.receptions),
        },
        PartialStep::Unmatched(u) => StepJson {
            broadcaster: None,
            transition: None,
            message: Some(u.message),
            value: Some(u.value),
            receivers: receivers_out(&u.receptions),
        },
    }
}

fn step_in(s: StepJson) -> Result<PartialStep, String> {
    let receptions = receivers_in(s.receivers)?;
    match (s.broadcaster, s.transition, s.message, s.value) {
        (Some(broadcaster), Some(transition), None, None) => {
            Ok(PartialStep::Step(StepDescriptor { broadcaster, transition, receptions }))
        }
        (None, None, Some(message), Some(value)) => Ok(PartialStep::Unmatched(Unmatched { message, value, receptions })),
        (Some(_), _, _, _) => Err("a step with a broadcaster needs `transition` and no `message`/`value`".into()),
        (None, _, _, _) => Err("an unmatched step needs `message` and `value` and no `transition`".into()),
    }
}

fn to_text<T: Serialize>(doc: &T) -> String {
    // Going through `Value` sorts object keys.
    let v = serde_json::to_value(doc).expect("serializable");
    let mut s = serde_json::to_string_pretty(&v).expect("serializable");
    s.push('\n');
    s
}

fn from_text<T: DeserializeOwned>(text: &str) -> Result<T, Diagnostic> {
    let version: serde_json::Value =
        serde_json::from_str(text).map_err(|e| Diagnostic { line: e.line(), column: e.column(), message: e.to_string() })?;
    match version.get("format").and_then(|f| f.as_u64()) {
        Some(FORMAT_VERSION) => {}
        Some(v) => return Err(Diagnostic { line: 1, column: 1, message: format!("unsupported format version {v}") }),
        None => return Err(Diagnostic { line: 1, column: 1, message: "missing `\"format\": 1`".into() }),
    }
    serde_json::from_str(text).map_err(|e| Diagnostic { line: e.line(), column: e.column(), message: e.to_string() })
}

fn semantic(message: String) -> Diagnostic {
    Diagnostic { line: 1, column: 1, message }
}

pub fn serialize_partial_run(run: &PartialRun) -> String {
    to_text(&RunJson {
        format: FORMAT_VERSION,
        initial: run.initial.agents.iter().map(AgentJson::from).collect(),
        steps: run.steps.iter().map(step_out).collect(),
    })
}

pub fn deserialize_partial_run(text: &str) -> Result<PartialRun, Diagnostic> {
    let doc: RunJson = from_text(text)?;
    let steps = doc.steps.into_iter().enumerate().map(|(i, s)| step_in(s).map_err(|e| semantic(format!("step {i}: {e}"))));
    Ok(PartialRun {
        initial: Configuration { agents: doc.initial.into_iter().map(LocalConfig::from).collect() },
        steps: steps.collect::<Result<_, _>>()?,
    })
}

pub fn serialize_run(run: &Run) -> String {
    serialize_partial_run(&run.to_partial())
}

/// Reads a run; unmatched receptions are rejected.
pub fn deserialize_run(text: &str) -> Result<Run, Diagnostic> {
    deserialize_partial_run(text)?.to_run().ok_or_else(|| semantic("a run cannot contain unmatched receptions".into()))
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct LocalStepJson {
    transition: TransId,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    value: Option<Value>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct LocalRunJson {
    start: AgentJson,
    steps: Vec<LocalStepJson>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct DecJson {
    w0: Vec<MsgId>,
    /// `[m_i, w_i]` pairs.
    parts: Vec<(MsgId, Vec<MsgId>)>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct AnnotationJson {
    value: Value,
    dec: DecJson,
    splits: Vec<usize>,
    followers: Vec<usize>,
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
enum SpecJson {
    Boss { word: Vec<MsgId> },
    Follower { word: Vec<MsgId>, message: MsgId },
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct NodeJson {
    spec: SpecJson,
    value: Value,
    local_run: LocalRunJson,
    #[serde(default)]
    initial: Vec<AnnotationJson>,
    #[serde(default)]
    non_initial: Vec<(Value, usize)>,
    #[serde(default)]
    children: Vec<NodeJson>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TreeJson {
    format: u64,
    root: NodeJson,
}

fn node_out(n: &TreeNode) -> NodeJson {
    NodeJson {
        spec: match &n.spec {
            Spec::Boss(w) => SpecJson::Boss { word: w.clone() },
            Spec::Follower { fw, fm } => SpecJson::Follower { word: fw.clone(), message: *fm },
        },
        value: n.value,
        local_run: LocalRunJson {
            start: AgentJson::from(&n.local_run.start),
            steps: n
                .local_run
                .steps
                .iter()
                .map(|s| match *s {
                    LocalStep::Internal(t) => LocalStepJson { transition: t, value: None },
                    LocalStep::Reception(t, v) => LocalStepJson { transition: t, value: Some(v) },
                })
                .collect(),
        },
        initial: n
            .initial
            .iter()
            .map(|a| AnnotationJson {
                value: a.value,
                dec: DecJson { w0: a.dec.w0.clone(), parts: a.dec.parts.clone() },
                splits: a.splits.clone(),
                followers: a.followers.clone(),
            })
            .collect(),
        non_initial: n.non_initial.clone(),
        children: n.children.iter().map(node_out).collect(),
    }
}

fn node_in(n: NodeJson) -> TreeNode {
    TreeNode {
        local_run: LocalRun {
            start: n.local_run.start.into(),
            steps: n
                .local_run
                .steps
                .into_iter()
                .map(|s| match s.value {
                    None => LocalStep::Internal(s.transition),
                    Some(v) => LocalStep::Reception(s.transition, v),
                })
                .collect(),
        },
        value: n.value,
        spec: match n.spec {
            SpecJson::Boss { word } => Spec::Boss(word),
            SpecJson::Follower { word, message } => Spec::Follower { fw: word, fm: message },
        },
        initial: n
            .initial
            .into_iter()
            .map(|a| InitialAnnotation {
                value: a.value,
                dec: Decomposition { w0: a.dec.w0, parts: a.dec.parts },
                splits: a.splits,
                followers: a.followers,
            })
            .collect(),
        non_initial: n.non_initial,
        children: n.children.into_iter().map(node_in).collect(),
    }
}

pub fn serialize_tree(tree: &TreeNode) -> String {
    to_text(&TreeJson { format: FORMAT_VERSION, root: node_out(tree) })
}

pub fn deserialize_tree(text: &str) -> Result<TreeNode, Diagnostic> {
    let doc: TreeJson = from_text(text)?;
    Ok(node_in(doc.root))
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct AbstractConfigJson {
    covered: Vec<StateId>,
    boss: Option<StateId>,
    clique: Vec<StateId>,
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
enum AbstractStepJson {
    Clique { transition: TransId, config: AbstractConfigJson },
    Boss { transition: TransId, config: AbstractConfigJson },
    External { transition: TransId, config: AbstractConfigJson },
    Reset { config: AbstractConfigJson },
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct AbstractRunJson {
    format: u64,
    steps: Vec<AbstractStepJson>,
}

fn set_in(states: Vec<StateId>) -> Result<StateSet, Diagnostic> {
    match states.iter().find(|&&q| q >= 64) {
        Some(q) => Err(semantic(format!("state {q} does not fit an abstract configuration"))),
        None => Ok(states.into_iter().collect()),
    }
}

pub fn serialize_abstract_run(run: &AbstractRun) -> String {
    let steps = run
        .steps
        .iter()
        .map(|(kind, c)| {
            let config = AbstractConfigJson { covered: c.s.iter().collect(), boss: c.boss, clique: c.clique.iter().collect() };
            match *kind {
                StepKind::BroadcastFromClique(transition) => AbstractStepJson::Clique { transition, config },
                StepKind::BroadcastFromBoss(transition) => AbstractStepJson::Boss { transition, config },
                StepKind::ExternalBroadcast(transition) => AbstractStepJson::External { transition, config },
                StepKind::GangReset => AbstractStepJson::Reset { config },
            }
        })
        .collect();
    to_text(&AbstractRunJson { format: FORMAT_VERSION, steps })
}

pub fn deserialize_abstract_run(text: &str) -> Result<AbstractRun, Diagnostic> {
    let doc: AbstractRunJson = from_text(text)?;
    let config = |c: AbstractConfigJson| -> Result<AbstractConfig, Diagnostic> {
        Ok(AbstractConfig { s: set_in(c.covered)?, boss: c.boss, clique: set_in(c.clique)? })
    };
    let steps = doc
        .steps
        .into_iter()
        .map(|s| {
            Ok(match s {
                AbstractStepJson::Clique { transition, config: c } => (StepKind::BroadcastFromClique(transition), config(c)?),
                AbstractStepJson::Boss { transition, config: c } => (StepKind::BroadcastFromBoss(transition), config(c)?),
                AbstractStepJson::External { transition, config: c } => (StepKind::ExternalBroadcast(transition), config(c)?),
                AbstractStepJson::Reset { config: c } => (StepKind::GangReset, config(c)?),
            })
        })
        .collect::<Result<_, Diagnostic>>()?;
    Ok(AbstractRun { steps })
}
