//! The `bnra` command line.
//!
//! Every command prints one JSON object with `verdict`, `witness` and
//! `stats` on stdout and a one-line summary on stderr. Exit codes: 0 for a
//! positive verdict, 1 for a negative one, 2 for usage and input errors,
//! 3 when a budget runs out.

mod generate;

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use bnra_core::{first_cover, replay, replay_partial, Protocol, Run, StateId};
use bnra_cover1::{concretize, decide_cover1, length_bound, remove_disequality, replay_abstract, ConcretizeError};
use bnra_explore::{explore, ExploreParams, Goal, Outcome};
use bnra_format as format;
use bnra_reduce as reduce;
use bnra_trees::{self as trees, Synthesized, TreeNode};
use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

#[derive(Parser)]
#[command(name = "bnra", version, about = "Coverability tools for broadcast networks of register automata")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Parse and validate a protocol.
    Check { file: PathBuf },
    /// Bounded breadth-first search for a covering (or all-target) run.
    Explore {
        file: PathBuf,
        #[arg(long)]
        target: String,
        /// Require every agent to end in the target.
        #[arg(long)]
        all_target: bool,
        #[arg(long)]
        agents: usize,
        #[arg(long)]
        depth: usize,
        #[arg(long)]
        max_states: Option<usize>,
        #[arg(long, default_value_t = 1)]
        workers: usize,
        /// Also write the witness run to this file.
        #[arg(long)]
        witness: Option<PathBuf>,
    },
    /// Decide coverability of a one-register protocol.
    Cover1 {
        file: PathBuf,
        #[arg(long)]
        target: String,
        /// Write the abstract witness run to this file.
        #[arg(long)]
        witness: Option<PathBuf>,
        /// Turn the abstract witness into a run with at most this many agents.
        #[arg(long, value_name = "BUDGET")]
        concretize: Option<usize>,
        /// Write the concrete run to this file.
        #[arg(long, requires = "concretize")]
        run: Option<PathBuf>,
    },
    /// Check a run, partial run or abstract run against a protocol.
    Replay {
        protocol: PathBuf,
        run: PathBuf,
        #[arg(long)]
        target: Option<String>,
        #[arg(long, requires = "target", conflicts_with = "abstract_run")]
        all_target: bool,
        /// The file holds a partial run.
        #[arg(long, conflicts_with = "abstract_run")]
        partial: bool,
        /// The file holds an abstract run of the one-register abstraction.
        #[arg(long = "abstract")]
        abstract_run: bool,
    },
    /// Unfolding trees.
    #[command(subcommand)]
    Tree(TreeCommand),
    /// Reductions from other problems to coverability.
    #[command(subcommand)]
    Reduce(ReduceCommand),
    /// Protocol transformations.
    #[command(subcommand)]
    Transform(TransformCommand),
    /// Seeded random test data.
    #[command(subcommand)]
    Generate(GenerateCommand),
}

#[derive(Subcommand)]
enum TreeCommand {
    /// Check the tree conditions.
    Validate {
        protocol: PathBuf,
        tree: PathBuf,
        /// Use the signature-protocol conditions.
        #[arg(long)]
        signature: bool,
    },
    /// Check that the tree is valid and its root covers the target.
    Witness {
        protocol: PathBuf,
        tree: PathBuf,
        #[arg(long)]
        target: String,
    },
    /// Build a run (or partial run, for a follower root) from a tree.
    ToRun {
        protocol: PathBuf,
        tree: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Extract a tree from a run of a signature protocol.
    FromRun {
        protocol: PathBuf,
        run: PathBuf,
        /// Cut the run where the target is first covered and root the tree
        /// at the covering agent.
        #[arg(long)]
        target: Option<String>,
        #[arg(long)]
        agent: Option<usize>,
        /// Defaults to the agent's identifier.
        #[arg(long)]
        value: Option<u64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Merge redundant subtrees.
    Minimize {
        tree: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
struct ReduceIo {
    input: PathBuf,
    #[arg(long)]
    out: PathBuf,
    /// Also synthesize a witness run and write it here.
    #[arg(long)]
    witness_run: Option<PathBuf>,
}

#[derive(Subcommand)]
enum ReduceCommand {
    /// 3-CNF satisfiability to one-register coverability.
    Sat {
        #[command(flatten)]
        io: ReduceIo,
        /// Agent budget for the witness run.
        #[arg(long, default_value_t = 64)]
        budget: usize,
    },
    /// Lossy channel system reachability to signature coverability.
    Lcs {
        #[command(flatten)]
        io: ReduceIo,
        #[arg(long, default_value_t = 4)]
        max_channel: usize,
        #[arg(long, default_value_t = 16)]
        max_steps: usize,
    },
    /// Minsky machine halting to two-register all-target reachability.
    Minsky {
        #[command(flatten)]
        io: ReduceIo,
        #[arg(long, default_value_t = 64)]
        max_steps: usize,
        #[arg(long, default_value_t = 4)]
        max_counter: u64,
    },
}

#[derive(Subcommand)]
enum TransformCommand {
    /// Replace disequality receptions by `any` receptions.
    RemoveDiseq {
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Compile away local equality tests.
    EliminateLocalEq {
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Funnel every lifted copy of this state into one new state.
        #[arg(long)]
        target: Option<String>,
    },
}

#[derive(Subcommand)]
enum GenerateCommand {
    /// A random protocol.
    Protocol {
        #[arg(long)]
        seed: u64,
        #[arg(long, default_value_t = 5)]
        states: usize,
        #[arg(long, default_value_t = 2)]
        messages: usize,
        #[arg(long, default_value_t = 1)]
        registers: usize,
        #[arg(long, default_value_t = 8)]
        transitions: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// A random 3-CNF formula.
    Cnf {
        #[arg(long)]
        seed: u64,
        #[arg(long, default_value_t = 3)]
        vars: usize,
        #[arg(long, default_value_t = 3)]
        clauses: usize,
        #[arg(long)]
        out: PathBuf,
    },
}

/// An input or usage problem; exit code 2.
struct UsageError(String);

impl<E: std::fmt::Display> From<E> for UsageError {
    fn from(e: E) -> Self {
        UsageError(e.to_string())
    }
}

type Result<T> = std::result::Result<T, UsageError>;

struct Response {
    code: u8,
    verdict: &'static str,
    witness: Value,
    stats: Value,
    summary: String,
}

impl Response {
    fn new(code: u8, verdict: &'static str, summary: impl Into<String>) -> Self {
        Response { code, verdict, witness: Value::Null, stats: json!({}), summary: summary.into() }
    }

    fn witness(mut self, w: Value) -> Self {
        self.witness = w;
        self
    }

    fn stats(mut self, s: Value) -> Self {
        self.stats = s;
        self
    }
}

/// Runs the command line on `args` (program name first) and returns the
/// exit code.
pub fn run_cli<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            let _ = if code == 0 { out.write_all(text.as_bytes()) } else { err.write_all(text.as_bytes()) };
            return code;
        }
    };
    match dispatch(cli.command) {
        Ok(r) => {
            let doc = json!({ "verdict": r.verdict, "witness": r.witness, "stats": r.stats });
            let _ = writeln!(out, "{}", serde_json::to_string_pretty(&doc).expect("serializable"));
            let _ = writeln!(err, "{}", r.summary);
            r.code
        }
        Err(UsageError(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            2
        }
    }
}

fn dispatch(c: Command) -> Result<Response> {
    match c {
        Command::Check { file } => check(&file),
        Command::Explore { file, target, all_target, agents, depth, max_states, workers, witness } => {
            let p = read_protocol(&file)?;
            let q = state(&p, &target)?;
            let mut params = ExploreParams::new(agents, depth).workers(workers);
            if let Some(k) = max_states {
                params = params.max_states(k);
            }
            let goal = if all_target { Goal::Target(q) } else { Goal::Cover(vec![q]) };
            let rep = explore(&p, &goal, params)?;
            let stats = json!({
                "agents": agents,
                "max_depth": depth,
                "visited": rep.stats.visited,
                "expanded": rep.stats.expanded,
                "depth": rep.stats.depth,
            });
            let r = match rep.outcome {
                Outcome::Found(run) => {
                    let text = format::serialize_run(&run);
                    write_opt(witness.as_deref(), &text)?;
                    Response::new(0, "found", format!("{target} reached in {} steps with {agents} agents", run.steps.len()))
                        .witness(as_json(&text))
                }
                Outcome::NotFoundWithinBounds => Response::new(
                    1,
                    "not-found-within-bounds",
                    format!("{target} not reached with {agents} agents within depth {depth}"),
                ),
                Outcome::BudgetExceeded => Response::new(3, "budget-exceeded", "state budget exhausted"),
            };
            Ok(r.stats(stats))
        }
        Command::Cover1 { file, target, witness, concretize: budget, run } => cover1(&file, &target, witness, budget, run),
        Command::Replay { protocol, run, target, all_target, partial, abstract_run } => {
            replay_cmd(&protocol, &run, target.as_deref(), all_target, partial, abstract_run)
        }
        Command::Tree(t) => tree(t),
        Command::Reduce(r) => reduce_cmd(r),
        Command::Transform(t) => transform(t),
        Command::Generate(GenerateCommand::Protocol { seed, states, messages, registers, transitions, out }) => {
            if states == 0 || messages == 0 || registers == 0 {
                return Err(UsageError("states, messages and registers must be positive".into()));
            }
            let p = generate::protocol(seed, states, messages, registers, transitions);
            write(&out, &format::print_protocol(&p))?;
            Ok(Response::new(0, "written", format!("wrote {}", out.display())).stats(protocol_stats(&p)))
        }
        Command::Generate(GenerateCommand::Cnf { seed, vars, clauses, out }) => {
            if vars == 0 {
                return Err(UsageError("a formula needs at least one variable".into()));
            }
            let phi = generate::cnf(seed, vars, clauses);
            write(&out, &format::print_dimacs(&phi))?;
            Ok(Response::new(0, "written", format!("wrote {}", out.display())).stats(json!({ "vars": vars, "clauses": clauses })))
        }
    }
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| UsageError(format!("{}: {e}", path.display())))
}

fn write(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).map_err(|e| UsageError(format!("{}: {e}", path.display())))
}

fn write_opt(path: Option<&Path>, text: &str) -> Result<()> {
    path.map_or(Ok(()), |p| write(p, text))
}

fn positioned(path: &Path, d: &format::Diagnostic) -> String {
    format!("{}:{d}", path.display())
}

fn read_protocol(path: &Path) -> Result<Protocol> {
    format::parse_protocol(&read(path)?)
        .map(|doc| doc.protocol)
        .map_err(|ds| UsageError(ds.iter().map(|d| positioned(path, d)).collect::<Vec<_>>().join("\n")))
}

fn read_with<T>(path: &Path, parse: impl Fn(&str) -> std::result::Result<T, format::Diagnostic>) -> Result<T> {
    parse(&read(path)?).map_err(|d| UsageError(positioned(path, &d)))
}

fn state(p: &Protocol, name: &str) -> Result<StateId> {
    p.state_id(name).ok_or_else(|| UsageError(format!("unknown state `{name}`")))
}

fn as_json(text: &str) -> Value {
    serde_json::from_str(text).expect("serializers emit valid JSON")
}

fn protocol_stats(p: &Protocol) -> Value {
    json!({
        "states": p.states.len(),
        "messages": p.messages.len(),
        "registers": p.registers,
        "transitions": p.transitions.len(),
        "signature": p.is_signature(),
        "local_tests": p.has_local_tests(),
    })
}

fn check(file: &Path) -> Result<Response> {
    let p = read_protocol(file)?;
    let summary =
        format!("{}: {} states, {} transitions, {} registers", p.name, p.states.len(), p.transitions.len(), p.registers);
    Ok(Response::new(0, "valid", summary).stats(protocol_stats(&p)))
}

fn cover1(file: &Path, target: &str, witness: Option<PathBuf>, budget: Option<usize>, run: Option<PathBuf>) -> Result<Response> {
    let p = read_protocol(file)?;
    let q = state(&p, target)?;
    let d = decide_cover1(&p, q)?;
    let mut stats = json!({ "explored": d.explored, "length_bound": length_bound(&p) });
    let Some(w) = d.witness else {
        return Ok(Response::new(1, "not-coverable", format!("{target} is not coverable")).stats(stats));
    };
    stats["abstract_length"] = json!(w.len());
    let text = format::serialize_abstract_run(&w);
    write_opt(witness.as_deref(), &text)?;
    let mut out = json!({ "abstract": as_json(&text), "run": null });
    let Some(budget) = budget else {
        return Ok(Response::new(0, "coverable", format!("{target} is coverable ({} abstract steps)", w.len()))
            .witness(out)
            .stats(stats));
    };
    match concretize(&p, &w, budget) {
        Ok(concrete) => {
            let end =
                replay(&p, &concrete).map_err(|e| UsageError(format!("internal error: concrete run does not replay: {e}")))?;
            debug_assert!(end.covers(q));
            let run_text = format::serialize_run(&concrete);
            write_opt(run.as_deref(), &run_text)?;
            out["run"] = as_json(&run_text);
            stats["agents"] = json!(concrete.agent_count());
            let summary = format!("{target} is coverable; run with {} agents", concrete.agent_count());
            Ok(Response::new(0, "coverable", summary).witness(out).stats(stats))
        }
        Err(ConcretizeError::BudgetExceeded(n)) => {
            let summary = format!("{target} is coverable, but a run needs more than {n} agents");
            Ok(Response::new(3, "budget-exceeded", summary).witness(out).stats(stats))
        }
        Err(e) => Err(e.into()),
    }
}

fn replay_cmd(
    protocol: &Path,
    file: &Path,
    target: Option<&str>,
    all_target: bool,
    partial: bool,
    abstract_run: bool,
) -> Result<Response> {
    let p = read_protocol(protocol)?;
    let q = target.map(|t| state(&p, t)).transpose()?;
    if abstract_run {
        let run = read_with(file, format::deserialize_abstract_run)?;
        let end = match replay_abstract(&p, &run) {
            Ok(end) => end,
            Err(e) => return Ok(Response::new(1, "invalid", e.to_string())),
        };
        let bound = length_bound(&p);
        let stats = json!({ "length": run.len(), "length_bound": bound });
        if run.len() > bound {
            return Ok(Response::new(1, "too-long", format!("{} steps exceed the bound {bound}", run.len())).stats(stats));
        }
        if q.is_some_and(|q| !end.covered().contains(q)) {
            return Ok(Response::new(1, "target-not-covered", "the abstract run is valid but misses the target").stats(stats));
        }
        return Ok(Response::new(0, "valid", format!("valid abstract run of {} steps", run.len())).stats(stats));
    }
    let run = if partial {
        read_with(file, format::deserialize_partial_run)?
    } else {
        read_with(file, format::deserialize_run)?.to_partial()
    };
    let end = match replay_partial(&p, &run) {
        Ok(end) => end,
        Err(e) => return Ok(Response::new(1, "invalid", e.to_string())),
    };
    let stats = json!({ "agents": run.initial.len(), "steps": run.steps.len(), "unmatched": run.unmatched_count() });
    let missed = q.is_some_and(|q| if all_target { !end.all_in(q) } else { !end.covers(q) });
    if missed {
        return Ok(Response::new(1, "target-not-covered", "the run is valid but misses the target").stats(stats));
    }
    Ok(Response::new(0, "valid", format!("valid run of {} steps", run.steps.len())).stats(stats))
}

fn violations(vs: &[trees::Violation]) -> Value {
    json!(vs.iter().map(|v| v.to_string()).collect::<Vec<_>>())
}

fn tree(c: TreeCommand) -> Result<Response> {
    match c {
        TreeCommand::Validate { protocol, tree, signature } => {
            let p = read_protocol(&protocol)?;
            let t = read_with(&tree, format::deserialize_tree)?;
            let res = if signature { trees::validate_signature_tree(&p, &t) } else { trees::validate_tree(&p, &t) };
            Ok(match res {
                Ok(()) => Response::new(0, "valid", format!("valid tree with {} nodes", t.node_count()))
                    .stats(json!({ "nodes": t.node_count() })),
                Err(vs) => Response::new(1, "invalid", format!("{} violations", vs.len()))
                    .stats(json!({ "nodes": t.node_count(), "violations": violations(&vs) })),
            })
        }
        TreeCommand::Witness { protocol, tree, target } => {
            let p = read_protocol(&protocol)?;
            let q = state(&p, &target)?;
            let t = read_with(&tree, format::deserialize_tree)?;
            let stats = json!({ "nodes": t.node_count() });
            Ok(if trees::is_coverability_witness(&p, &t, q) {
                Response::new(0, "witness", format!("the tree witnesses coverability of {target}")).stats(stats)
            } else {
                Response::new(1, "not-a-witness", format!("the tree does not witness coverability of {target}")).stats(stats)
            })
        }
        TreeCommand::ToRun { protocol, tree, out } => {
            let p = read_protocol(&protocol)?;
            let t = read_with(&tree, format::deserialize_tree)?;
            let synth = match trees::tree_to_run(&p, &t) {
                Ok(s) => s,
                Err(trees::TreeError::InvalidTree(vs)) => {
                    return Ok(Response::new(1, "invalid", format!("{} violations", vs.len()))
                        .stats(json!({ "violations": violations(&vs) })))
                }
                Err(e) => return Err(e.into()),
            };
            let (verdict, text) = match &synth {
                Synthesized::Complete(run) => ("run", format::serialize_run(run)),
                Synthesized::Partial(run) => ("partial-run", format::serialize_partial_run(run)),
            };
            let partial = synth.partial();
            write_opt(out.as_deref(), &text)?;
            let stats =
                json!({ "agents": partial.initial.len(), "steps": partial.steps.len(), "unmatched": partial.unmatched_count() });
            let summary = format!("{verdict} with {} agents and {} steps", partial.initial.len(), partial.steps.len());
            Ok(Response::new(0, verdict, summary).witness(as_json(&text)).stats(stats))
        }
        TreeCommand::FromRun { protocol, run, target, agent, value, out } => {
            let p = read_protocol(&protocol)?;
            let mut run = read_with(&run, format::deserialize_run)?;
            let end = replay(&p, &run).map_err(|e| UsageError(format!("the run does not replay: {e}")))?;
            let agent = match target {
                Some(t) => {
                    let q = state(&p, &t)?;
                    let Some(k) = first_cover(&p, &run, q) else {
                        return Ok(Response::new(1, "target-not-covered", format!("the run never covers {t}")));
                    };
                    run = run.truncated(k);
                    let end = replay(&p, &run).expect("prefix of a valid run");
                    match agent {
                        Some(a) if end.agents.get(a).is_some_and(|l| l.state == q) => a,
                        Some(a) => return Err(UsageError(format!("agent {a} is not in {t} when it is first covered"))),
                        None => end.agents.iter().position(|l| l.state == q).expect("covered"),
                    }
                }
                None => agent.ok_or_else(|| UsageError("either --agent or --target is required".into()))?,
            };
            if agent >= end.agents.len() {
                return Err(UsageError(format!("the run has no agent {agent}")));
            }
            let value = value.unwrap_or(run.initial.agents[agent].regs[0]);
            let t = trees::run_to_tree_signature(&p, &run, agent, value)?;
            let text = format::serialize_tree(&t);
            write_opt(out.as_deref(), &text)?;
            let summary = format!("tree with {} nodes rooted at agent {agent}", t.node_count());
            Ok(Response::new(0, "tree", summary)
                .witness(as_json(&text))
                .stats(json!({ "nodes": t.node_count(), "agent": agent, "value": value })))
        }
        TreeCommand::Minimize { tree, out } => {
            let t: TreeNode = read_with(&tree, format::deserialize_tree)?;
            let m = trees::minimize_tree(&t);
            let text = format::serialize_tree(&m);
            write_opt(out.as_deref(), &text)?;
            let summary = format!("{} nodes to {}", t.node_count(), m.node_count());
            Ok(Response::new(0, "tree", summary)
                .witness(as_json(&text))
                .stats(json!({ "nodes_before": t.node_count(), "nodes_after": m.node_count() })))
        }
    }
}

fn written(p: &Protocol, q: StateId, io: &ReduceIo) -> Result<Value> {
    write(&io.out, &format::print_protocol(p))?;
    let mut stats = protocol_stats(p);
    stats["target"] = json!(p.state_name(q));
    Ok(stats)
}

fn witness_run(p: &Protocol, q: StateId, io: &ReduceIo, run: &Run, all: bool) -> Result<Response> {
    let end = replay(p, run).map_err(|e| UsageError(format!("internal error: witness run does not replay: {e}")))?;
    let ok = if all { end.all_in(q) } else { end.covers(q) };
    if !ok {
        return Err(UsageError("internal error: witness run misses its objective".into()));
    }
    let text = format::serialize_run(run);
    write_opt(io.witness_run.as_deref(), &text)?;
    let mut stats = written(p, q, io)?;
    stats["agents"] = json!(run.agent_count());
    stats["steps"] = json!(run.steps.len());
    let summary = format!("wrote {} and a witness run with {} agents", io.out.display(), run.agent_count());
    Ok(Response::new(0, "witness", summary).witness(as_json(&text)).stats(stats))
}

fn reduce_cmd(c: ReduceCommand) -> Result<Response> {
    match c {
        ReduceCommand::Sat { io, budget } => {
            let phi = read_with(&io.input, format::parse_dimacs)?;
            let (p, q) = reduce::sat_to_protocol(&phi)?;
            if io.witness_run.is_none() {
                let stats = written(&p, q, &io)?;
                return Ok(Response::new(0, "written", format!("wrote {}", io.out.display())).stats(stats));
            }
            let d = decide_cover1(&p, q)?;
            let Some(w) = d.witness else {
                let stats = written(&p, q, &io)?;
                return Ok(Response::new(1, "no-witness", "the formula is unsatisfiable").stats(stats));
            };
            match concretize(&p, &w, budget) {
                Ok(run) => witness_run(&p, q, &io, &run, false),
                Err(ConcretizeError::BudgetExceeded(n)) => {
                    let stats = written(&p, q, &io)?;
                    Ok(Response::new(3, "budget-exceeded", format!("a witness run needs more than {n} agents")).stats(stats))
                }
                Err(e) => Err(e.into()),
            }
        }
        ReduceCommand::Lcs { io, max_channel, max_steps } => {
            let l = read_with(&io.input, format::parse_lcs)?;
            let (p, q) = reduce::lcs_to_protocol(&l)?;
            if io.witness_run.is_none() {
                let stats = written(&p, q, &io)?;
                return Ok(Response::new(0, "written", format!("wrote {}", io.out.display())).stats(stats));
            }
            match reduce::lcs_reach_bounded(&l, max_channel, max_steps)? {
                Some(path) => witness_run(&p, q, &io, &reduce::lcs_witness_to_run(&p, &l, &path)?, false),
                None => {
                    let stats = written(&p, q, &io)?;
                    Ok(Response::new(1, "not-found-within-bounds", format!("{} not reached within the bounds", l.final_))
                        .stats(stats))
                }
            }
        }
        ReduceCommand::Minsky { io, max_steps, max_counter } => {
            let m = read_with(&io.input, format::parse_minsky)?;
            let (p, q) = reduce::minsky_to_protocol(&m)?;
            if io.witness_run.is_none() {
                let stats = written(&p, q, &io)?;
                return Ok(Response::new(0, "written", format!("wrote {}", io.out.display())).stats(stats));
            }
            match reduce::minsky_run_bounded(&m, max_steps, max_counter)? {
                Some(exec) => witness_run(&p, q, &io, &reduce::minsky_exec_to_run(&p, &m, &exec)?, true),
                None => {
                    let stats = written(&p, q, &io)?;
                    Ok(Response::new(1, "not-found-within-bounds", format!("{} not reached within the bounds", m.final_))
                        .stats(stats))
                }
            }
        }
    }
}

fn transform(c: TransformCommand) -> Result<Response> {
    match c {
        TransformCommand::RemoveDiseq { input, out } => {
            let p = read_protocol(&input)?;
            let q = remove_disequality(&p)?;
            write(&out, &format::print_protocol(&q))?;
            Ok(Response::new(0, "written", format!("wrote {}", out.display())).stats(protocol_stats(&q)))
        }
        TransformCommand::EliminateLocalEq { input, out, target } => {
            let p = read_protocol(&input)?;
            let lifted = reduce::eliminate_local_equality(&p)?;
            let (result, targets) = match target {
                Some(t) => {
                    let q = state(&p, &t)?;
                    let copies = reduce::lift_targets(&p, &lifted, q);
                    let (funnelled, f) = reduce::funnel_targets(&lifted, &copies, &format!("{t}@any"))?;
                    let names: Vec<&str> = copies.iter().map(|&c| lifted.state_name(c)).collect();
                    let value = json!({ "copies": names, "funnel": funnelled.state_name(f) });
                    (funnelled, value)
                }
                None => (lifted, Value::Null),
            };
            write(&out, &format::print_protocol(&result))?;
            let mut stats = protocol_stats(&result);
            stats["targets"] = targets;
            Ok(Response::new(0, "written", format!("wrote {}", out.display())).stats(stats))
        }
    }
}
