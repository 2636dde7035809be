use bnra_core::*;
use bnra_explore::{explore, ExploreParams, Goal, Outcome};
use bnra_reduce::*;
use bnra_testkit::{random_protocol, rng, Shape};
use rand::Rng;

/// Bounded verdict; `None` when the explorer ran out of budget.
fn covers(p: &Protocol, targets: Vec<StateId>, agents: usize, depth: usize) -> Option<bool> {
    let r = explore(p, &Goal::Cover(targets), ExploreParams::new(agents, depth).max_states(3_000_000)).unwrap();
    match r.outcome {
        Outcome::Found(run) => {
            assert!(replay(p, &run).is_ok());
            Some(true)
        }
        Outcome::NotFoundWithinBounds => Some(false),
        Outcome::BudgetExceeded => None,
    }
}

#[test]
fn without_local_tests_states_multiply_by_the_maps() {
    let p = samples::running_example();
    assert_eq!(p.registers, 2);
    let lifted = eliminate_local_equality(&p).unwrap();
    assert_eq!(lifted.states.len(), p.states.len() * 4);
    assert!(validate_protocol(&lifted).is_empty());
    assert_eq!(lifted.state_name(lifted.initial), lifted_name(p.state_name(p.initial), &[0, 1]));
    for q in 0..p.states.len() {
        assert_eq!(lift_targets(&p, &lifted, q).len(), 4);
        let a = covers(&p, vec![q], 2, 5);
        let b = covers(&lifted, lift_targets(&p, &lifted, q), 2, 5);
        assert_eq!(a, b, "{}", p.state_name(q));
    }
}

#[test]
fn register_bound() {
    let p = ProtocolBuilder::new("wide", 5, "q0").build();
    assert_eq!(eliminate_local_equality(&p), Err(ReduceError::RegisterBoundExceeded(5)));
}

/// `qf` needs two `↓` receptions of one broadcast value followed by `loc(1,2,=)`.
fn equal_after_two_receptions() -> Protocol {
    let mut b = ProtocolBuilder::new("twice", 2, "q0").local_tests(true);
    b.br("q0", "m", 1, "q0");
    b.rec("q0", "m", 1, Action::Down, "got1");
    b.rec("got1", "m", 2, Action::Down, "got2");
    b.loc("got2", 1, 2, LocalTest::Eq, "qf");
    b.build()
}

#[test]
fn local_equality_after_two_receptions() {
    let p = equal_after_two_receptions();
    let qf = p.state_id("qf").unwrap();
    let lifted = eliminate_local_equality(&p).unwrap();
    assert!(!lifted.transitions.iter().any(|t| matches!(t.op, Op::Loc { test: LocalTest::Eq, .. })));
    let targets = lift_targets(&p, &lifted, qf);
    for (n, d) in [(1, 6), (2, 2), (2, 3), (2, 4), (3, 5)] {
        assert_eq!(covers(&p, vec![qf], n, d), covers(&lifted, targets.clone(), n, d), "n={n} d={d}");
    }
    assert_eq!(covers(&p, vec![qf], 2, 3), Some(true));
    let (funnel, q) = funnel_targets(&lifted, &targets, "qf_any").unwrap();
    assert_eq!(covers(&funnel, vec![q], 2, 4), Some(true));
    assert_eq!(covers(&funnel, vec![q], 2, 3), Some(false));
}

#[test]
fn disequality_of_a_register_with_itself_never_fires() {
    let mut b = ProtocolBuilder::new("self", 2, "q0").local_tests(true);
    b.loc("q0", 1, 1, LocalTest::Neq, "qf");
    let p = b.build();
    let lifted = eliminate_local_equality(&p).unwrap();
    let qf = p.state_id("qf").unwrap();
    assert_eq!(covers(&lifted, lift_targets(&p, &lifted, qf), 3, 6), Some(false));
    for t in &lifted.transitions {
        if let Op::Loc { left, right, .. } = t.op {
            assert_eq!(left, right);
        }
    }
}

#[test]
fn funnel_rejects_existing_names() {
    let p = equal_after_two_receptions();
    assert!(funnel_targets(&p, &[0], "qf").is_err());
}

#[test]
fn verdicts_agree_on_random_protocols() {
    let mut g = rng(0x10CE);
    let mut compared = 0;
    for _ in 0..60 {
        let shape = Shape { registers: 2, local_tests: 0.3, ..Shape::one_register(g.gen_range(3..=4), 7) };
        let p = random_protocol(&mut g, shape);
        let lifted = eliminate_local_equality(&p).unwrap();
        for q in 1..p.states.len() {
            let a = covers(&p, vec![q], 3, 6);
            let b = covers(&lifted, lift_targets(&p, &lifted, q), 3, 6);
            if let (Some(a), Some(b)) = (a, b) {
                assert_eq!(a, b, "{} in {p:?}", p.state_name(q));
                compared += 1;
            }
        }
    }
    assert!(compared >= 50, "{compared}");
}
