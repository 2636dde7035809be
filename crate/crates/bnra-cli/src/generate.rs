//! Seeded random instances.

use bnra_core::{Action, Op, Protocol, ProtocolBuilder};
use bnra_reduce::Cnf3;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn protocol(seed: u64, states: usize, messages: usize, registers: usize, transitions: usize) -> Protocol {
    let mut g = ChaCha8Rng::seed_from_u64(seed);
    let mut b = ProtocolBuilder::new(&format!("random_{seed}"), registers, "q0");
    for i in 1..states {
        b.state(&format!("q{i}"));
    }
    for m in 0..messages {
        b.message(&format!("m{m}"));
    }
    for _ in 0..20 * transitions + 20 {
        if b.transition_count() == transitions {
            break;
        }
        let from = g.gen_range(0..states).min(g.gen_range(0..states));
        let to = g.gen_range(0..states);
        let msg = g.gen_range(0..messages);
        let reg = g.gen_range(1..=registers);
        let op = if g.gen_bool(0.5) {
            Op::Br { msg, reg }
        } else {
            Op::Rec { msg, reg, action: *Action::ALL.choose(&mut g).unwrap() }
        };
        b.transition(from, op, to);
    }
    b.build()
}

pub fn cnf(seed: u64, vars: usize, clauses: usize) -> Cnf3 {
    let mut g = ChaCha8Rng::seed_from_u64(seed);
    let mut literal = || {
        let x = g.gen_range(1..=vars as i32);
        if g.gen_bool(0.5) {
            x
        } else {
            -x
        }
    };
    let clauses = (0..clauses).map(|_| [literal(), literal(), literal()]).collect();
    Cnf3::new(vars, clauses).expect("literals are in range")
}
