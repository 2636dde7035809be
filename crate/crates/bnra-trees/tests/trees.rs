use bnra_core::*;
use bnra_trees::fixtures::{ready_go_halt_run, ready_go_halt_tree, running_example_tree};
use bnra_trees::*;

fn covers(p: &Protocol, s: &Synthesized, q: StateId) -> bool {
    let g = replay_partial(p, &s.partial()).expect("replays");
    g.covers(q)
}

#[test]
fn decomposition_example_from_the_text() {
    // w = b·c·a·c⁴·a·c², dec = (a·b, c, a³) over a=0, b=1, c=2.
    let w = vec![1, 2, 0, 2, 2, 2, 2, 0, 2, 2];
    let dec = Decomposition::new(vec![0, 1]).then(2, vec![0, 0, 0]);
    assert!(admits_decomposition(&w, &dec));
    assert!(admits_decomposition(&[], &dec));
    assert!(!admits_decomposition(&[2], &Decomposition::new(vec![0, 1])));
}

#[test]
fn ready_go_halt_tree_is_a_witness() {
    let (p, t) = ready_go_halt_tree();
    assert_eq!(validate_signature_tree(&p, &t), Ok(()));
    assert_eq!(validate_tree(&p, &t), Ok(()));
    assert!(is_coverability_witness(&p, &t, p.state_id("q4").unwrap()));
    assert!(!is_coverability_witness(&p, &t, p.state_id("q7").unwrap()));
    let s = tree_to_run(&p, &t).unwrap();
    let Synthesized::Complete(run) = &s else { panic!("boss root") };
    assert_eq!(run.agent_count(), 6);
    assert!(covers(&p, &s, p.state_id("q4").unwrap()));
}

#[test]
fn removing_a_leaf_breaks_condition_three() {
    let (p, mut t) = ready_go_halt_tree();
    t.children[0].children.clear();
    let errs = validate_signature_tree(&p, &t).unwrap_err();
    assert!(errs.iter().any(|e| e.path == vec![0] && e.condition == Condition::III));
}

#[test]
fn single_node_trees() {
    let p = samples::ready_go_halt();
    let start = LocalConfig { state: p.initial, regs: vec![1, 2, 3] };
    let empty = TreeNode::boss(LocalRun::new(start.clone()), 1, Vec::new());
    assert_eq!(validate_signature_tree(&p, &empty), Ok(()));
    assert_eq!(minimize_tree(&empty), empty);
    let rdy = p.message_id("rdy").unwrap();
    let t = p.transitions.iter().position(|t| t.from == 0 && t.to == 0).unwrap();
    let one = TreeNode::boss(LocalRun { start, steps: vec![LocalStep::Internal(t)] }, 1, vec![rdy]);
    let Synthesized::Complete(run) = tree_to_run(&p, &one).unwrap() else { panic!() };
    assert_eq!(run.agent_count(), 1);
    assert_eq!(run.steps.len(), 1);
}

#[test]
fn running_example_tree_is_a_witness() {
    let (p, t) = running_example_tree();
    assert_eq!(validate_tree(&p, &t), Ok(()));
    let q4 = p.state_id("q4").unwrap();
    assert!(is_coverability_witness(&p, &t, q4));
    let s = tree_to_run(&p, &t).unwrap();
    assert!(matches!(s, Synthesized::Complete(_)));
    assert!(covers(&p, &s, q4));
}

#[test]
fn follower_without_its_prompt_breaks_condition_three() {
    let (p, mut t) = running_example_tree();
    if let Spec::Follower { fw, .. } = &mut t.children[1].spec {
        fw.clear();
    }
    let errs = validate_tree(&p, &t).unwrap_err();
    assert!(errs.iter().any(|e| e.path == vec![1] && e.condition == Condition::III), "{errs:?}");
}

#[test]
fn boss_with_received_value_breaks_condition_four() {
    let (p, mut t) = running_example_tree();
    t.value = 2;
    let errs = validate_tree(&p, &t).unwrap_err();
    assert!(errs.iter().any(|e| e.path.is_empty() && e.condition == Condition::IV));
}

#[test]
fn follower_root_gives_a_partial_run() {
    let (p, t) = running_example_tree();
    let f = t.children[1].clone();
    let s = tree_to_run(&p, &f).unwrap();
    let Synthesized::Partial(run) = &s else { panic!("follower root") };
    let ev = run_events(&p, run).unwrap();
    assert!(subword(&run_v_input(&ev, 1), &[p.message_id("m2").unwrap()]));
    assert!(run_v_output(&ev, 1).contains(&p.message_id("m4").unwrap()));
}

#[test]
fn extraction_reproduces_the_ready_go_halt_tree() {
    let (p, run) = ready_go_halt_run();
    let q4 = p.state_id("q4").unwrap();
    assert!(replay(&p, &run).unwrap().agents[0].state == q4);
    let t = run_to_tree_signature(&p, &run, 0, 1).unwrap();
    assert_eq!(validate_signature_tree(&p, &t), Ok(()));
    let (_, expected) = ready_go_halt_tree();
    fn shape(t: &TreeNode) -> (Spec, Vec<(Spec, Vec<Spec>)>) {
        let grand = |c: &TreeNode| c.children.iter().map(|g| g.spec.clone()).collect();
        (t.spec.clone(), t.children.iter().map(|c| (c.spec.clone(), grand(c))).collect())
    }
    assert_eq!(shape(&t), shape(&expected));
    assert_eq!(t.node_count(), 6);
    assert_eq!(t.children[1].children[0].children[0].spec, Spec::Boss(vec![p.message_id("rdy").unwrap()]));
    let small = minimize_tree(&t);
    assert!(small.node_count() < t.node_count());
    assert_eq!(validate_signature_tree(&p, &small), Ok(()));
    assert!(is_coverability_witness(&p, &small, q4));
    assert!(covers(&p, &tree_to_run(&p, &t).unwrap(), q4));
    assert!(covers(&p, &tree_to_run(&p, &small).unwrap(), q4));
}

#[test]
fn extraction_of_trivial_runs() {
    let (p, run) = ready_go_halt_run();
    let t = run_to_tree_signature(&p, &run.truncated(0), 0, 1).unwrap();
    assert_eq!(t.node_count(), 1);
    assert!(t.local_run.is_empty());
    assert_eq!(t.spec, Spec::Boss(Vec::new()));
    let t = run_to_tree_signature(&p, &run.truncated(1), 1, 2).unwrap();
    assert_eq!(t.node_count(), 1);
    assert_eq!(t.spec, Spec::Boss(vec![p.message_id("rdy").unwrap()]));
}

#[test]
fn extraction_needs_a_signature_protocol() {
    let p = samples::running_example();
    let run = Run::empty(initial_configuration(&p, 1).unwrap());
    assert_eq!(run_to_tree_signature(&p, &run, 0, 0), Err(TreeError::NotSignature));
}

#[test]
fn minimizing_a_chain_of_equal_bosses() {
    let (p, t) = ready_go_halt_tree();
    // μ3 → μ5 → μ6 where μ5 and μ6 both carry `rdy`.
    let small = minimize_tree(&t);
    assert_eq!(small.node_count(), 5);
    assert_eq!(validate_signature_tree(&p, &small), Ok(()));
    assert_eq!(minimize_tree(&small), small);
}
