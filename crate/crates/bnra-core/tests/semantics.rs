use std::collections::BTreeMap;

use bnra_core::samples::running_example;
use bnra_core::*;

fn t(p: &Protocol, from: &str, op: Op, to: &str) -> TransId {
    p.find_transition(&Transition { from: p.state_id(from).unwrap(), op, to: p.state_id(to).unwrap() }).unwrap()
}

fn msg(p: &Protocol, m: &str) -> MsgId {
    p.message_id(m).unwrap()
}

/// The four-step run reaching q4 with two agents.
fn two_agent_run(p: &Protocol) -> Run {
    let (m2, m3, m4) = (msg(p, "m2"), msg(p, "m3"), msg(p, "m4"));
    let br_m2 = t(p, "q0", Op::Br { msg: m2, reg: 1 }, "q1");
    let rec_m2 = t(p, "q0", Op::Rec { msg: m2, reg: 1, action: Action::Down }, "q2");
    let br_m3 = t(p, "q2", Op::Br { msg: m3, reg: 2 }, "q3");
    let rec_m3 = t(p, "q1", Op::Rec { msg: m3, reg: 2, action: Action::Down }, "q3");
    let br_m4_q3 = t(p, "q3", Op::Br { msg: m4, reg: 1 }, "q3");
    let rec_m4 = t(p, "q3", Op::Rec { msg: m4, reg: 1, action: Action::Eq }, "q4");
    let br_m4_q4 = t(p, "q4", Op::Br { msg: m4, reg: 1 }, "q4");
    let step = |b, tr, r: &[(Agent, TransId)]| StepDescriptor {
        broadcaster: b,
        transition: tr,
        receptions: r.iter().copied().collect(),
    };
    Run {
        initial: initial_configuration(p, 2).unwrap(),
        steps: vec![
            step(0, br_m2, &[(1, rec_m2)]),
            step(1, br_m3, &[(0, rec_m3)]),
            step(1, br_m4_q3, &[(0, rec_m4)]),
            step(0, br_m4_q4, &[(1, rec_m4)]),
        ],
    }
}

fn lc(p: &Protocol, q: &str, regs: &[Value]) -> LocalConfig {
    LocalConfig { state: p.state_id(q).unwrap(), regs: regs.to_vec() }
}

#[test]
fn running_example_is_valid() {
    let p = running_example();
    assert!(validate_protocol(&p).is_empty());
    assert_eq!(p.states.len(), 6);
    assert_eq!(p.transitions.len(), 9);
}

#[test]
fn out_of_range_register_is_reported() {
    let mut p = running_example();
    let m1 = msg(&p, "m1");
    p.transitions.push(Transition { from: 0, op: Op::Rec { msg: m1, reg: 3, action: Action::Down }, to: 1 });
    let d = validate_protocol(&p);
    assert_eq!(d.len(), 1);
    assert!(d[0].message.contains("register index out of range"));
    assert_eq!(d[0].location, Location::Transition(9));
}

#[test]
fn empty_transition_set_is_valid() {
    let p = ProtocolBuilder::new("empty", 1, "q0").build();
    assert!(validate_protocol(&p).is_empty());
}

#[test]
fn local_tests_require_the_extension() {
    let mut b = ProtocolBuilder::new("loc", 2, "q0");
    b.loc("q0", 1, 2, LocalTest::Eq, "q1");
    let p = b.build();
    assert_eq!(validate_protocol(&p).len(), 1);
    let mut p2 = p.clone();
    p2.local_tests = true;
    assert!(validate_protocol(&p2).is_empty());
}

#[test]
fn initial_configuration_layout() {
    let p = running_example();
    let g = initial_configuration(&p, 2).unwrap();
    assert_eq!(g.agents, vec![lc(&p, "q0", &[0, 1]), lc(&p, "q0", &[2, 3])]);
    assert!(g.is_initial(&p));
    let single = initial_configuration(&p, 1).unwrap();
    assert_eq!(single.len(), 1);
    let one_reg = ProtocolBuilder::new("r1", 1, "q0").build();
    let g3 = initial_configuration(&one_reg, 3).unwrap();
    assert_eq!(g3.values().collect::<Vec<_>>(), vec![0, 1, 2]);
    assert_eq!(initial_configuration(&p, 0), Err(ConfigError::InvalidAgentCount));
}

#[test]
fn first_step_stores_the_broadcast_value() {
    let p = running_example();
    let g = Configuration { agents: vec![lc(&p, "q0", &[1, 2]), lc(&p, "q0", &[3, 4])] };
    let run = two_agent_run(&p);
    let g1 = apply_step(&p, &g, &run.steps[0]).unwrap();
    assert_eq!(g1.agents, vec![lc(&p, "q1", &[1, 2]), lc(&p, "q2", &[1, 4])]);
}

#[test]
fn lone_broadcast_only_moves_the_broadcaster() {
    let p = running_example();
    let g = initial_configuration(&p, 3).unwrap();
    let br_m1 = t(&p, "q0", Op::Br { msg: msg(&p, "m1"), reg: 1 }, "q1");
    let g1 = apply_step(&p, &g, &StepDescriptor::silent(1, br_m1)).unwrap();
    assert_eq!(g1.agents[0], g.agents[0]);
    assert_eq!(g1.agents[2], g.agents[2]);
    assert_eq!(g1.state(1), p.state_id("q1").unwrap());
}

#[test]
fn failed_equality_test_is_not_enabled() {
    let p = running_example();
    let m1 = msg(&p, "m1");
    let g = Configuration { agents: vec![lc(&p, "q0", &[7, 8]), lc(&p, "q2", &[1, 4])] };
    let step = StepDescriptor {
        broadcaster: 0,
        transition: t(&p, "q0", Op::Br { msg: m1, reg: 1 }, "q1"),
        receptions: BTreeMap::from([(1, t(&p, "q2", Op::Rec { msg: m1, reg: 1, action: Action::Eq }, "q5"))]),
    };
    assert_eq!(apply_step(&p, &g, &step), Err(StepError::TestFailed { agent: 1, value: 7 }));
}

#[test]
fn broadcaster_never_receives() {
    let p = running_example();
    let g = initial_configuration(&p, 2).unwrap();
    let m2 = msg(&p, "m2");
    let step = StepDescriptor {
        broadcaster: 0,
        transition: t(&p, "q0", Op::Br { msg: m2, reg: 1 }, "q1"),
        receptions: BTreeMap::from([(0, t(&p, "q0", Op::Rec { msg: m2, reg: 1, action: Action::Down }, "q2"))]),
    };
    assert_eq!(apply_step(&p, &g, &step), Err(StepError::SelfReception(0)));
}

#[test]
fn enabled_steps_single_agent() {
    let p = running_example();
    let g = initial_configuration(&p, 1).unwrap();
    let steps = enabled_steps(&p, &g);
    let m1 = t(&p, "q0", Op::Br { msg: msg(&p, "m1"), reg: 1 }, "q1");
    let m2 = t(&p, "q0", Op::Br { msg: msg(&p, "m2"), reg: 1 }, "q1");
    assert_eq!(steps, vec![StepDescriptor::silent(0, m1), StepDescriptor::silent(0, m2)]);
}

#[test]
fn enabled_steps_without_broadcasts_is_empty() {
    let mut b = ProtocolBuilder::new("rx", 1, "q0");
    b.rec("q0", "m", 1, Action::Any, "q1");
    let p = b.build();
    assert!(enabled_steps(&p, &initial_configuration(&p, 3).unwrap()).is_empty());
}

#[test]
fn enabled_steps_contain_the_first_step_of_the_run() {
    let p = running_example();
    let g = initial_configuration(&p, 2).unwrap();
    let run = two_agent_run(&p);
    assert!(enabled_steps(&p, &g).contains(&run.steps[0]));
}

#[test]
fn replay_reaches_q4_for_both_agents() {
    let p = running_example();
    let run = two_agent_run(&p);
    let g = replay(&p, &run).unwrap();
    // Up to the value bijection 1↦0, 2↦1, 3↦2, 4↦3 this is ⟨q4,(1,4),q4,(1,4)⟩.
    assert_eq!(g.agents, vec![lc(&p, "q4", &[0, 3]), lc(&p, "q4", &[0, 3])]);
    let empty = Run::empty(initial_configuration(&p, 2).unwrap());
    assert_eq!(replay(&p, &empty).unwrap(), empty.initial);
}

#[test]
fn swapped_steps_are_rejected_at_the_first_bad_step() {
    let p = running_example();
    let mut run = two_agent_run(&p);
    run.steps.swap(2, 3);
    match replay(&p, &run) {
        Err(ReplayError::InvalidAt { index, .. }) => assert_eq!(index, 2),
        other => panic!("unexpected {other:?}"),
    }
}

#[test]
fn canonical_forms() {
    let p = running_example();
    let q1 = p.state_id("q1").unwrap();
    let g = Configuration { agents: vec![LocalConfig { state: q1, regs: vec![7, 9] }] };
    assert_eq!(canonicalize(&g, CanonMode::ValuesOnly).agents[0].regs, vec![0, 1]);
    let g = Configuration { agents: vec![LocalConfig { state: q1, regs: vec![7, 7] }] };
    assert_eq!(canonicalize(&g, CanonMode::ValuesOnly).agents[0].regs, vec![0, 0]);
    let fin = Configuration { agents: vec![lc(&p, "q4", &[1, 4]), lc(&p, "q4", &[1, 4])] };
    assert_eq!(canonicalize(&fin, CanonMode::ValuesOnly).agents, vec![lc(&p, "q4", &[0, 1]), lc(&p, "q4", &[0, 1])]);
}

#[test]
fn agent_sorting_canonicalization() {
    let p = running_example();
    let a = Configuration { agents: vec![lc(&p, "q3", &[5, 6]), lc(&p, "q1", &[6, 5])] };
    let b = Configuration { agents: vec![lc(&p, "q1", &[9, 8]), lc(&p, "q3", &[8, 9])] };
    assert_eq!(canonicalize(&a, CanonMode::ValuesAndAgents), canonicalize(&b, CanonMode::ValuesAndAgents));
    assert_ne!(canonicalize(&a, CanonMode::ValuesOnly), canonicalize(&b, CanonMode::ValuesOnly));
}

#[test]
fn subword_examples() {
    assert!(subword::<u8>(&[], b"abc"));
    assert!(subword(b"ab", b"acb"));
    assert!(!subword(b"ba", b"ab"));
}

#[test]
fn local_run_of_a_boss_child() {
    let p = running_example();
    let (m2, m3) = (msg(&p, "m2"), msg(&p, "m3"));
    let u = LocalRun {
        start: lc(&p, "q0", &[100, 2]),
        steps: vec![
            LocalStep::Reception(t(&p, "q0", Op::Rec { msg: m2, reg: 1, action: Action::Down }, "q2"), 3),
            LocalStep::Internal(t(&p, "q2", Op::Br { msg: m3, reg: 2 }, "q3")),
        ],
    };
    assert_eq!(replay_local(&p, &u).unwrap(), lc(&p, "q3", &[3, 2]));
    assert_eq!(local_v_output(&p, &u, 2).unwrap(), vec![m3]);
    assert_eq!(local_v_input(&p, &u, 3).unwrap(), vec![m2]);
    assert_eq!(u.non_initial_values(), vec![3]);
    let empty = LocalRun::new(lc(&p, "q0", &[1, 2]));
    assert_eq!(replay_local(&p, &empty).unwrap(), empty.start);
    assert!(local_v_input(&p, &empty, 1).unwrap().is_empty());
}

#[test]
fn local_run_with_failed_equality() {
    let p = running_example();
    let m4 = msg(&p, "m4");
    let u = LocalRun {
        start: lc(&p, "q3", &[1, 2]),
        steps: vec![LocalStep::Reception(t(&p, "q3", Op::Rec { msg: m4, reg: 1, action: Action::Eq }, "q4"), 5)],
    };
    assert!(matches!(replay_local(&p, &u), Err(LocalError::InvalidAt { index: 0, .. })));
}

#[test]
fn partial_run_inputs_count_only_unmatched_receptions() {
    let p = running_example();
    let m2 = msg(&p, "m2");
    let rec_m2 = t(&p, "q0", Op::Rec { msg: m2, reg: 1, action: Action::Down }, "q2");
    let br_m3 = t(&p, "q2", Op::Br { msg: msg(&p, "m3"), reg: 2 }, "q3");
    let pr = PartialRun {
        initial: initial_configuration(&p, 1).unwrap(),
        steps: vec![
            PartialStep::Unmatched(Unmatched { message: m2, value: 42, receptions: BTreeMap::from([(0, rec_m2)]) }),
            PartialStep::Step(StepDescriptor::silent(0, br_m3)),
        ],
    };
    let g = replay_partial(&p, &pr).unwrap();
    assert_eq!(g.agents[0], lc(&p, "q3", &[42, 1]));
    let ev = run_events(&p, &pr).unwrap();
    assert_eq!(run_v_input(&ev, 42), vec![m2]);
    assert_eq!(run_v_output(&ev, 1), vec![msg(&p, "m3")]);
    assert!(pr.to_run().is_none());
}
