use bnra_core::*;
use bnra_explore::{bounded_cover, ExploreParams, Outcome};
use bnra_reduce::*;
use bnra_testkit::rng;
use rand::Rng;

fn rule(from: &str, op: LcsOp, to: &str) -> LcsRule {
    LcsRule { from: from.into(), op, to: to.into() }
}

fn system(rules: Vec<LcsRule>, fin: &str) -> Lcs {
    Lcs {
        locations: vec!["l0".into(), "l1".into(), "l2".into()],
        alphabet: vec!["a".into(), "b".into()],
        rules,
        initial: "l0".into(),
        final_: fin.into(),
    }
}

fn push(x: &str) -> LcsOp {
    LcsOp::Push(x.into())
}

fn pop(x: &str) -> LcsOp {
    LcsOp::Pop(x.into())
}

fn synthesize(l: &Lcs, max_channel: usize, max_steps: usize) -> Option<(Protocol, StateId, Run)> {
    let path = lcs_reach_bounded(l, max_channel, max_steps).unwrap()?;
    let (p, q) = lcs_to_protocol(l).unwrap();
    let run = lcs_witness_to_run(&p, l, &path).unwrap();
    assert_eq!(run.agent_count(), path.len() + 1);
    Some((p, q, run))
}

#[test]
fn push_one_letter() {
    let l = system(vec![rule("l0", push("a"), "l1")], "l1");
    let path = lcs_reach_bounded(&l, 2, 4).unwrap().unwrap();
    assert_eq!(path, vec![LcsStep { rule: 0, channel: vec![0] }]);
    let (p, q, run) = synthesize(&l, 2, 4).unwrap();
    assert!(validate_protocol(&p).is_empty());
    assert!(p.is_signature());
    assert_eq!(p.state_name(q), "fin_l1");
    assert_eq!(run.agent_count(), 2);
    assert!(replay(&p, &run).unwrap().covers(q));
}

#[test]
fn empty_path_is_the_root_alone() {
    let l = system(vec![], "l0");
    let (p, q, run) = synthesize(&l, 2, 4).unwrap();
    assert_eq!(run.agent_count(), 1);
    assert!(replay(&p, &run).unwrap().covers(q));
}

#[test]
fn push_then_pop() {
    let l = system(vec![rule("l0", push("a"), "l1"), rule("l1", pop("a"), "l2")], "l2");
    let (p, q, run) = synthesize(&l, 2, 4).unwrap();
    assert_eq!(run.agent_count(), 3);
    assert!(replay(&p, &run).unwrap().covers(q));
}

#[test]
fn pop_on_an_empty_channel_is_blocked() {
    let l = system(vec![rule("l0", pop("a"), "l1")], "l1");
    assert_eq!(lcs_reach_bounded(&l, 3, 5).unwrap(), None);
    let l = system(vec![], "l1");
    assert_eq!(lcs_reach_bounded(&l, 3, 5).unwrap(), None);
}

#[test]
fn without_rules_the_explorer_finds_nothing() {
    let l = system(vec![], "l1");
    let (p, q) = lcs_to_protocol(&l).unwrap();
    let r = bounded_cover(&p, q, ExploreParams::new(3, 10).max_states(2_000_000)).unwrap();
    assert_eq!(r.outcome, Outcome::NotFoundWithinBounds);
}

#[test]
fn explorer_confirms_a_short_witness() {
    let l = system(vec![rule("l0", push("b"), "l1")], "l1");
    let (p, q) = lcs_to_protocol(&l).unwrap();
    let r = bounded_cover(&p, q, ExploreParams::new(2, 8).max_states(2_000_000)).unwrap();
    let Outcome::Found(run) = r.outcome else { panic!("{:?}", r.outcome) };
    assert!(replay(&p, &run).unwrap().covers(q));
}

#[test]
fn lossy_pop_skips_a_prefix() {
    let l = system(vec![rule("l0", push("a"), "l0"), rule("l0", push("b"), "l1"), rule("l1", pop("b"), "l2")], "l2");
    let (p, q, run) = synthesize(&l, 3, 6).unwrap();
    assert!(replay(&p, &run).unwrap().covers(q));
}

#[test]
fn malformed_systems_are_rejected() {
    let mut l = system(vec![rule("l0", push("c"), "l1")], "l1");
    assert!(matches!(lcs_to_protocol(&l), Err(ReduceError::Malformed(_))));
    l.rules.clear();
    l.final_ = "nowhere".into();
    assert!(lcs_to_protocol(&l).is_err());
}

#[test]
fn every_bounded_witness_yields_a_covering_run() {
    let mut g = rng(0x1C5);
    let mut found = 0;
    for _ in 0..300 {
        let locs = ["l0", "l1", "l2", "l3"];
        let rules = (0..g.gen_range(1..=6))
            .map(|_| {
                let x = ["a", "b"][g.gen_range(0..2)];
                let op = if g.gen_bool(0.5) { push(x) } else { pop(x) };
                rule(locs[g.gen_range(0..4)], op, locs[g.gen_range(0..4)])
            })
            .collect();
        let l = Lcs {
            locations: locs.iter().map(|s| s.to_string()).collect(),
            alphabet: vec!["a".into(), "b".into()],
            rules,
            initial: "l0".into(),
            final_: locs[g.gen_range(1..4)].into(),
        };
        let Some((p, q, run)) = synthesize(&l, 3, 8) else { continue };
        assert!(p.is_signature());
        assert!(validate_protocol(&p).is_empty());
        assert!(replay(&p, &run).unwrap().covers(q), "{l:?}");
        found += 1;
    }
    assert!(found > 30, "{found}");
}
