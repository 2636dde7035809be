use std::collections::BTreeMap;

use bnra_core::samples::{ready_go_halt, running_example};
use bnra_core::*;
use bnra_cover1::decide_cover1;
use bnra_format::Diagnostic;
use bnra_format::*;
use bnra_reduce::{Cnf3, LcsOp, MinskyOp};
use bnra_testkit::{random_protocol, random_run, rng, Shape};
use bnra_trees::fixtures::{ready_go_halt_tree, running_example_tree};
use proptest::prelude::*;
use rand::Rng;

const RUNNING: &str = include_str!("../../../protocols/running_example.bnra");

fn parse(text: &str) -> Protocol {
    parse_protocol(text).unwrap_or_else(|e| panic!("{e:?}")).protocol
}

fn errors(text: &str) -> Vec<Diagnostic> {
    parse_protocol(text).expect_err("should be rejected")
}

#[test]
fn running_example_file_has_six_states_and_nine_transitions() {
    let doc = parse_protocol(RUNNING).unwrap();
    assert_eq!(doc.protocol.states.len(), 6);
    assert_eq!(doc.protocol.transitions.len(), 9);
    assert_eq!(doc.protocol.registers, 2);
    assert_eq!(doc.transition_positions[0], (8, 7));
    assert_eq!(doc.protocol, running_example());
}

#[test]
fn ready_go_halt_file_matches_the_sample() {
    assert_eq!(parse(include_str!("../../../protocols/ready_go_halt.bnra")), ready_go_halt());
}

#[test]
fn print_then_parse_is_the_identity() {
    for p in [running_example(), ready_go_halt()] {
        assert_eq!(parse(&print_protocol(&p)), p);
    }
}

#[test]
fn unknown_action_is_positioned() {
    let text = "registers 2\nmessages m1\nstates q0 q1\ninit q0\ntrans q0 rec(m1,2,maybe) q1\n";
    let e = errors(text);
    assert_eq!(e.len(), 1);
    assert_eq!((e[0].line, e[0].column), (5, 19));
    assert!(e[0].message.contains("unknown action"), "{}", e[0].message);
}

#[test]
fn unknown_names_are_reported_each() {
    let text = "registers 1\nmessages m\nstates q0\ninit q0\ntrans q0 br(x,1) q9\ntrans q7 br(m,1) q0\n";
    let e = errors(text);
    let found: Vec<(usize, usize, &str)> = e.iter().map(|d| (d.line, d.column, d.message.as_str())).collect();
    assert!(found.contains(&(5, 13, "unknown message `x`")), "{found:?}");
    assert!(found.contains(&(5, 18, "unknown state `q9`")), "{found:?}");
    assert!(found.contains(&(6, 7, "unknown state `q7`")), "{found:?}");
}

#[test]
fn crlf_and_comments_are_accepted() {
    let crlf = RUNNING.replace('\n', "\r\n");
    assert_eq!(parse(&crlf), running_example());
    let commented = "# header\nregisters 1 # one\nmessages a\nstates q0 q1\ninit q0\ntrans q0 br(a,1) q1 # go\n";
    assert_eq!(parse(commented).transitions.len(), 1);
}

#[test]
fn invariant_violations_point_at_transitions() {
    let text = "registers 2\nmessages a\nstates q0 q1\ninit q0\ntrans q0 br(a,3) q1\ntrans q0 loc(1,2,=) q1\n";
    let e = errors(text);
    assert_eq!(e.len(), 2, "{e:?}");
    assert_eq!(e[0].line, 5);
    assert_eq!(e[1].line, 6);
}

#[test]
fn local_tests_need_the_extension() {
    let text = include_str!("../../../protocols/same_value_twice.bnra");
    let p = parse(text);
    assert!(p.has_local_tests());
    assert_eq!(parse(&print_protocol(&p)), p);
    assert!(parse_protocol(&text.replace("extension local-tests", "")).is_err());
}

#[test]
fn missing_declarations_are_errors() {
    let e = errors("messages a\nstates q0\n");
    let msgs: Vec<&str> = e.iter().map(|d| d.message.as_str()).collect();
    assert!(msgs.iter().any(|m| m.contains("registers")), "{msgs:?}");
    assert!(msgs.iter().any(|m| m.contains("init")), "{msgs:?}");
}

/// The two-agent run reaching q4.
fn two_agent_run(p: &Protocol) -> Run {
    let t = |from: &str, op: Op, to: &str| {
        p.find_transition(&Transition { from: p.state_id(from).unwrap(), op, to: p.state_id(to).unwrap() }).unwrap()
    };
    let m = |name: &str| p.message_id(name).unwrap();
    let step = |b, tr, r: &[(Agent, TransId)]| StepDescriptor {
        broadcaster: b,
        transition: tr,
        receptions: r.iter().copied().collect(),
    };
    let rec_m4 = t("q3", Op::Rec { msg: m("m4"), reg: 1, action: Action::Eq }, "q4");
    Run {
        initial: initial_configuration(p, 2).unwrap(),
        steps: vec![
            step(
                0,
                t("q0", Op::Br { msg: m("m2"), reg: 1 }, "q1"),
                &[(1, t("q0", Op::Rec { msg: m("m2"), reg: 1, action: Action::Down }, "q2"))],
            ),
            step(
                1,
                t("q2", Op::Br { msg: m("m3"), reg: 2 }, "q3"),
                &[(0, t("q1", Op::Rec { msg: m("m3"), reg: 2, action: Action::Down }, "q3"))],
            ),
            step(1, t("q3", Op::Br { msg: m("m4"), reg: 1 }, "q3"), &[(0, rec_m4)]),
            step(0, t("q4", Op::Br { msg: m("m4"), reg: 1 }, "q4"), &[(1, rec_m4)]),
        ],
    }
}

#[test]
fn two_agent_run_round_trips() {
    let p = running_example();
    let run = two_agent_run(&p);
    let text = serialize_run(&run);
    let v: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(v["format"], 1);
    assert_eq!(v["steps"].as_array().unwrap().len(), 4);
    assert_eq!(v["steps"][0]["receivers"]["1"], 2);
    let back = deserialize_run(&text).unwrap();
    assert_eq!(back, run);
    assert!(replay(&p, &back).unwrap().covers(p.state_id("q4").unwrap()));
    assert_eq!(serialize_run(&back), text);
}

#[test]
fn empty_run_round_trips() {
    let run = Run::empty(initial_configuration(&running_example(), 3).unwrap());
    let text = serialize_run(&run);
    let v: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(v["steps"], serde_json::json!([]));
    assert_eq!(v["initial"].as_array().unwrap().len(), 3);
    assert_eq!(deserialize_run(&text).unwrap(), run);
}

#[test]
fn unmatched_receptions_have_no_broadcaster() {
    let p = running_example();
    let mut partial = two_agent_run(&p).to_partial();
    let rec = p.find_transition(&Transition { from: 3, op: Op::Rec { msg: 3, reg: 1, action: Action::Eq }, to: 4 }).unwrap();
    partial.steps.push(PartialStep::Unmatched(Unmatched { message: 3, value: 7, receptions: BTreeMap::from([(0, rec)]) }));
    let text = serialize_partial_run(&partial);
    let v: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(v["steps"][4]["broadcaster"], serde_json::Value::Null);
    assert_eq!(v["steps"][4]["value"], 7);
    assert_eq!(deserialize_partial_run(&text).unwrap(), partial);
    assert!(deserialize_run(&text).is_err());
}

#[test]
fn keys_are_sorted() {
    let text = serialize_run(&two_agent_run(&running_example()));
    let keys: Vec<usize> = ["\"format\"", "\"initial\"", "\"steps\""].iter().map(|k| text.find(k).unwrap()).collect();
    assert!(keys.windows(2).all(|w| w[0] < w[1]));
    assert!(text.find("\"broadcaster\"").unwrap() < text.find("\"receivers\"").unwrap());
}

#[test]
fn malformed_json_is_positioned() {
    let e = deserialize_run("{\n  \"format\": 1,\n  \"initial\": [,]\n}").unwrap_err();
    assert_eq!(e.line, 3);
    assert!(e.column > 1);
    let e = deserialize_run("{\"format\": 2, \"initial\": [], \"steps\": []}").unwrap_err();
    assert!(e.message.contains("version"));
    let e = deserialize_tree("{\"format\": 1}").unwrap_err();
    assert!(e.message.contains("root"), "{}", e.message);
}

#[test]
fn fixture_trees_round_trip() {
    let (_, tree) = running_example_tree();
    assert_eq!(tree.node_count(), 4);
    let (_, big) = ready_go_halt_tree();
    assert_eq!(big.node_count(), 6);
    for t in [tree, big] {
        let text = serialize_tree(&t);
        assert_eq!(deserialize_tree(&text).unwrap(), t);
        assert_eq!(serialize_tree(&deserialize_tree(&text).unwrap()), text);
    }
}

#[test]
fn abstract_runs_round_trip() {
    let p = parse(include_str!("../../../protocols/running_example_first_register.bnra"));
    let d = decide_cover1(&p, p.state_id("q4").unwrap()).unwrap();
    let w = d.witness.expect("coverable");
    assert!(!w.is_empty());
    let text = serialize_abstract_run(&w);
    assert_eq!(deserialize_abstract_run(&text).unwrap(), w);
}

#[test]
fn dimacs_inputs() {
    let phi = parse_dimacs(include_str!("../../../protocols/phi_sat.cnf")).unwrap();
    assert_eq!(phi, Cnf3::new(3, vec![[1, 2, -3], [-1, 2, 3], [-2, -2, 3]]).unwrap());
    assert_eq!(parse_dimacs(&print_dimacs(&phi)).unwrap(), phi);
    assert_eq!(parse_dimacs("p cnf 2 1\r\n1 -2 2\r\n").unwrap().clauses, vec![[1, -2, 2]]);
    let e = parse_dimacs("p cnf 2 1\n1 3 2 0\n").unwrap_err();
    assert_eq!((e.line, e.column), (2, 3));
    let e = parse_dimacs("p cnf 2 1\n1 2 0\n").unwrap_err();
    assert!(e.message.contains("3 literals"));
    let e = parse_dimacs("p cnf 2 2\n1 2 1 0\n").unwrap_err();
    assert!(e.message.contains("announces 2"));
    assert!(parse_dimacs("1 2 3 0\n").is_err());
}

#[test]
fn machine_inputs() {
    let l = parse_lcs(include_str!("../../../protocols/push_a.lcs.json")).unwrap();
    assert_eq!(l.rules.len(), 1);
    assert_eq!(l.rules[0].op, LcsOp::Push("a".into()));
    assert_eq!(parse_lcs(&print_lcs(&l)).unwrap(), l);
    let pp = parse_lcs(include_str!("../../../protocols/push_pop.lcs.json")).unwrap();
    assert_eq!(pp.rules[1].op, LcsOp::Pop("a".into()));

    let m = parse_minsky(include_str!("../../../protocols/inc_dec.minsky.json")).unwrap();
    assert_eq!(m.rules[0].op, MinskyOp::Inc(1));
    assert_eq!(m.rules[1].op, MinskyOp::Dec(1));
    assert_eq!(parse_minsky(&print_minsky(&m)).unwrap(), m);

    assert!(parse_minsky("{\"format\": 1, \"locations\": [\"a\"], \"rules\": [], \"initial\": \"a\", \"final\": \"b\"}").is_err());
    assert!(parse_lcs("{\"locations\": []}").is_err());
    let e = parse_lcs("{\"format\": 1,\n \"locations\": [1]}").unwrap_err();
    assert_eq!(e.line, 2);
}

fn any_shape(g: &mut impl Rng) -> Shape {
    let registers = g.gen_range(1..=3);
    Shape {
        states: g.gen_range(1..=6),
        messages: g.gen_range(1..=3),
        registers,
        transitions: g.gen_range(0..=10),
        local_tests: if registers > 1 && g.gen_bool(0.3) { 0.2 } else { 0.0 },
        actions: &Action::ALL,
    }
}

fn word(g: &mut impl Rng) -> Word {
    (0..g.gen_range(0..4)).map(|_| g.gen_range(0..3)).collect()
}

fn random_tree(g: &mut impl Rng, depth: usize) -> bnra_trees::TreeNode {
    use bnra_trees::{Decomposition, InitialAnnotation, TreeNode};
    let steps = (0..g.gen_range(0..5))
        .map(|_| {
            if g.gen_bool(0.5) {
                LocalStep::Internal(g.gen_range(0..9))
            } else {
                LocalStep::Reception(g.gen_range(0..9), g.gen_range(0..20))
            }
        })
        .collect();
    let regs = (0..g.gen_range(1..=3)).map(|_| g.gen_range(0..20)).collect();
    let run = LocalRun { start: LocalConfig { state: 0, regs }, steps };
    let value = g.gen_range(0..20);
    let mut node = if g.gen_bool(0.5) {
        TreeNode::boss(run, value, word(g))
    } else {
        TreeNode::follower(run, value, word(g), g.gen_range(0..3))
    };
    if depth > 0 {
        for _ in 0..g.gen_range(0..3) {
            node = node.with_child(random_tree(g, depth - 1));
        }
    }
    if g.gen_bool(0.5) {
        let mut dec = Decomposition::new(word(g));
        for _ in 0..g.gen_range(0..3) {
            dec = dec.then(g.gen_range(0..3), word(g));
        }
        let l = dec.parts.len();
        node.initial.push(InitialAnnotation {
            value,
            dec,
            splits: (0..l).map(|i| i * 2).collect(),
            followers: (0..l).map(|_| g.gen_range(0..3)).collect(),
        });
    }
    if g.gen_bool(0.3) {
        node.non_initial.push((g.gen_range(0..20), g.gen_range(0..3)));
    }
    node
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn random_protocols_round_trip(seed in any::<u64>()) {
        let mut g = rng(seed);
        let shape = any_shape(&mut g);
        let p = random_protocol(&mut g, shape);
        prop_assert_eq!(parse(&print_protocol(&p)), p.clone());
        let crlf = print_protocol(&p).replace('\n', "\r\n");
        prop_assert_eq!(parse(&crlf), p);
    }

    #[test]
    fn random_runs_round_trip(seed in any::<u64>(), agents in 1usize..4, len in 0usize..10) {
        let mut g = rng(seed);
        let shape = any_shape(&mut g);
        let p = random_protocol(&mut g, shape);
        let run = random_run(&mut g, &p, agents, len);
        prop_assert_eq!(deserialize_run(&serialize_run(&run)).unwrap(), run.clone());
        let mut partial = run.to_partial();
        if !partial.steps.is_empty() {
            let i = g.gen_range(0..partial.steps.len());
            if let PartialStep::Step(s) = &partial.steps[i] {
                let message = p.transitions[s.transition].op.message().unwrap_or(0);
                let u = Unmatched { message, value: g.gen_range(0..50), receptions: s.receptions.clone() };
                partial.steps[i] = PartialStep::Unmatched(u);
            }
        }
        prop_assert_eq!(deserialize_partial_run(&serialize_partial_run(&partial)).unwrap(), partial);
    }

    #[test]
    fn random_trees_round_trip(seed in any::<u64>()) {
        let mut g = rng(seed);
        let t = random_tree(&mut g, 3);
        prop_assert_eq!(deserialize_tree(&serialize_tree(&t)).unwrap(), t);
    }

    #[test]
    fn random_abstract_runs_round_trip(seed in any::<u64>()) {
        let mut g = rng(seed);
        let states = g.gen_range(2..=5);
        let p = random_protocol(&mut g, Shape::one_register(states, 8));
        let q = g.gen_range(0..states);
        if let Some(w) = decide_cover1(&p, q).unwrap().witness {
            prop_assert_eq!(deserialize_abstract_run(&serialize_abstract_run(&w)).unwrap(), w);
        }
    }
}
