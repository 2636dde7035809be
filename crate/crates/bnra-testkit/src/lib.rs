//! Random instance generators and brute-force oracles shared by the test suites.

use std::collections::HashMap;

use bnra_core::*;
use rand::seq::SliceRandom;
use rand::Rng;
use rand::SeedableRng;
pub use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Shape of a random protocol.
#[derive(Clone, Copy, Debug)]
pub struct Shape {
    pub states: usize,
    pub messages: usize,
    pub registers: usize,
    pub transitions: usize,
    /// Probability of a local-test transition (requires `registers ≥ 2` to be interesting).
    pub local_tests: f64,
    pub actions: &'static [Action],
}

impl Shape {
    pub fn one_register(states: usize, transitions: usize) -> Self {
        Shape { states, messages: 2, registers: 1, transitions, local_tests: 0.0, actions: &Action::ALL }
    }
}

/// A random valid protocol; broadcasts make up roughly half of the transitions.
pub fn random_protocol(rng: &mut impl Rng, shape: Shape) -> Protocol {
    let mut b = ProtocolBuilder::new("random", shape.registers, "q0").local_tests(shape.local_tests > 0.0);
    for i in 1..shape.states {
        b.state(&format!("q{i}"));
    }
    for m in 0..shape.messages {
        b.message(&format!("m{m}"));
    }
    let mut attempts = 0;
    let mut added = 0;
    while added < shape.transitions && attempts < 20 * shape.transitions + 20 {
        attempts += 1;
        // Bias sources towards low states so that more of the protocol is reachable.
        let from = rng.gen_range(0..shape.states).min(rng.gen_range(0..shape.states));
        let to = rng.gen_range(0..shape.states);
        let msg = rng.gen_range(0..shape.messages);
        let op = if rng.gen_bool(shape.local_tests) {
            let left = rng.gen_range(1..=shape.registers);
            let right = rng.gen_range(1..=shape.registers);
            Op::Loc { left, right, test: if rng.gen_bool(0.5) { LocalTest::Eq } else { LocalTest::Neq } }
        } else if rng.gen_bool(0.5) {
            Op::Br { msg, reg: rng.gen_range(1..=shape.registers) }
        } else {
            Op::Rec { msg, reg: rng.gen_range(1..=shape.registers), action: *shape.actions.choose(rng).unwrap() }
        };
        let before = b.transition_count();
        b.transition(from, op, to);
        if b.transition_count() > before {
            added += 1;
        }
    }
    b.build()
}

/// Replays `len` random enabled steps from the initial configuration.
pub fn random_run(rng: &mut impl Rng, p: &Protocol, agents: usize, len: usize) -> Run {
    let mut run = Run::empty(initial_configuration(p, agents).unwrap());
    let out = outgoing(p);
    let mut g = run.initial.clone();
    for _ in 0..len {
        let steps = enabled_steps_with(p, &out, &g);
        let Some(s) = steps.choose(rng) else { break };
        apply_step_in_place(p, &mut g, s).unwrap();
        run.steps.push(s.clone());
    }
    run
}

/// A random injective renaming of the values of `g`.
pub fn random_bijection(rng: &mut impl Rng, g: &Configuration) -> HashMap<Value, Value> {
    let mut vals: Vec<Value> = g.values().collect();
    vals.sort_unstable();
    vals.dedup();
    let mut targets: Vec<Value> = (0..(vals.len() as Value * 3 + 3)).collect();
    targets.shuffle(rng);
    vals.into_iter().zip(targets).collect()
}

pub fn rename_config(g: &Configuration, pi: &HashMap<Value, Value>) -> Configuration {
    Configuration {
        agents: g.agents.iter().map(|l| LocalConfig { state: l.state, regs: l.regs.iter().map(|v| pi[v]).collect() }).collect(),
    }
}

/// Subsequence test by enumerating every subset of positions of `w2`.
pub fn brute_subword<T: PartialEq>(w1: &[T], w2: &[T]) -> bool {
    assert!(w2.len() <= 16);
    (0u32..(1 << w2.len())).any(|mask| {
        let picked: Vec<&T> = (0..w2.len()).filter(|i| mask & (1 << i) != 0).map(|i| &w2[i]).collect();
        picked.len() == w1.len() && picked.iter().zip(w1).all(|(a, b)| *a == b)
    })
}

pub fn random_word(rng: &mut impl Rng, max_len: usize, alphabet: usize) -> Vec<usize> {
    let len = rng.gen_range(0..=max_len);
    (0..len).map(|_| rng.gen_range(0..alphabet)).collect()
}
