//! Hand-built trees and runs over the sample protocols.

use bnra_core::{samples, Configuration, LocalConfig, LocalRun, LocalStep, Protocol, Run, StepDescriptor, TransId, Value};

use crate::decomposition::Decomposition;
use crate::tree::{InitialAnnotation, TreeNode};

/// Transition from `from` to `to` whose message is `msg`.
fn tr(p: &Protocol, from: &str, msg: &str, to: &str) -> TransId {
    let (f, t, m) = (p.state_id(from).unwrap(), p.state_id(to).unwrap(), p.message_id(msg).unwrap());
    p.transitions.iter().position(|x| x.from == f && x.to == t && x.op.message() == Some(m)).unwrap()
}

fn run_from(p: &Protocol, regs: &[Value], steps: Vec<LocalStep>) -> LocalRun {
    LocalRun { start: LocalConfig { state: p.initial, regs: regs.to_vec() }, steps }
}

/// The ready/go/halt tree: the root stores two identifiers announced with
/// `rdy`, then hears `go` from the first and `hlt` from the second.
/// Values of reception-only registers are placeholders that are never used.
pub fn ready_go_halt_tree() -> (Protocol, TreeNode) {
    use LocalStep::{Internal as I, Reception as R};
    let p = samples::ready_go_halt();
    let rdy_loop = tr(&p, "q0", "rdy", "q0");
    let to_q5 = tr(&p, "q0", "rdy", "q5");
    let q5_loop = tr(&p, "q5", "rdy", "q5");
    let rdy = p.message_id("rdy").unwrap();
    let leaf = |v: Value| TreeNode::boss(run_from(&p, &[v, 100 * v + 1, 100 * v + 2], vec![I(rdy_loop)]), v, vec![rdy]);
    let go = p.message_id("go").unwrap();
    let hlt = p.message_id("hlt").unwrap();
    let m4 = leaf(4);
    let m6 = leaf(6);
    let m5 = TreeNode::boss(run_from(&p, &[5, 501, 502], vec![R(to_q5, 6), I(q5_loop)]), 5, vec![rdy]).with_child(m6);
    let m2 = TreeNode::boss(
        run_from(&p, &[2, 201, 202], vec![I(rdy_loop), R(to_q5, 4), I(tr(&p, "q5", "go", "q6"))]),
        2,
        vec![rdy, go],
    )
    .with_child(m4);
    let m3 = TreeNode::boss(
        run_from(&p, &[3, 301, 302], vec![I(rdy_loop), R(to_q5, 5), I(tr(&p, "q5", "hlt", "q7"))]),
        3,
        vec![rdy, hlt],
    )
    .with_child(m5);
    let root = TreeNode::boss(
        run_from(
            &p,
            &[1, 101, 102],
            vec![
                R(tr(&p, "q0", "rdy", "q1"), 2),
                R(tr(&p, "q1", "rdy", "q2"), 3),
                R(tr(&p, "q2", "go", "q3"), 2),
                R(tr(&p, "q3", "hlt", "q4"), 3),
            ],
        ),
        1,
        Vec::new(),
    )
    .with_child(m2)
    .with_child(m3);
    (p, root)
}

/// The run of three agents over the ready/go/halt protocol from which
/// [`ready_go_halt_tree`] is extracted. Agent `i` has identifier `i + 1`.
pub fn ready_go_halt_run() -> (Protocol, Run) {
    let p = samples::ready_go_halt();
    let agent = |id: Value| LocalConfig { state: p.initial, regs: vec![id, 100 * id + 1, 100 * id + 2] };
    let initial = Configuration { agents: vec![agent(1), agent(2), agent(3)] };
    let step = |b: usize, t: TransId, rec: &[(usize, TransId)]| StepDescriptor {
        broadcaster: b,
        transition: t,
        receptions: rec.iter().copied().collect(),
    };
    let rdy_loop = tr(&p, "q0", "rdy", "q0");
    let steps = vec![
        step(1, rdy_loop, &[(0, tr(&p, "q0", "rdy", "q1"))]),
        step(2, rdy_loop, &[(0, tr(&p, "q1", "rdy", "q2")), (1, tr(&p, "q0", "rdy", "q5"))]),
        step(1, tr(&p, "q5", "rdy", "q5"), &[(2, tr(&p, "q0", "rdy", "q5"))]),
        step(1, tr(&p, "q5", "go", "q6"), &[(0, tr(&p, "q2", "go", "q3"))]),
        step(2, tr(&p, "q5", "hlt", "q7"), &[(0, tr(&p, "q3", "hlt", "q4"))]),
    ];
    (p, Run { initial, steps })
}

/// The two-register tree for the running example: the root broadcasts
/// `(m2, 1)`, stores 2 from `(m3, 2)`, then hears `(m4, 1)` from a follower.
pub fn running_example_tree() -> (Protocol, TreeNode) {
    use LocalStep::{Internal as I, Reception as R};
    let p = samples::running_example();
    let m = |name: &str| p.message_id(name).unwrap();
    let b2 = tr(&p, "q0", "m2", "q1");
    let r2 = tr(&p, "q0", "m2", "q2");
    let b3 = tr(&p, "q2", "m3", "q3");
    let r3 = tr(&p, "q1", "m3", "q3");
    let r4 = tr(&p, "q3", "m4", "q4");
    let b4_q3 = tr(&p, "q3", "m4", "q3");
    let b4_q4 = tr(&p, "q4", "m4", "q4");
    let leaf = TreeNode::boss(run_from(&p, &[3, 902], vec![I(b2)]), 3, vec![m("m2")]);
    let boss = TreeNode::boss(run_from(&p, &[901, 2], vec![R(r2, 3), I(b3)]), 2, vec![m("m3")]).with_child(leaf);
    let follower = TreeNode::follower(run_from(&p, &[903, 904], vec![R(r2, 1), I(b3), I(b4_q3)]), 1, vec![m("m2")], m("m4"));
    let mut root = TreeNode::boss(run_from(&p, &[1, 900], vec![I(b2), R(r3, 2), R(r4, 1), I(b4_q4)]), 1, Vec::new())
        .with_child(boss)
        .with_child(follower);
    root.initial.push(InitialAnnotation {
        value: 1,
        dec: Decomposition::new(vec![m("m2")]).then(m("m4"), vec![m("m4")]),
        splits: vec![1],
        followers: vec![1],
    });
    root.non_initial.push((2, 0));
    (p, root)
}
