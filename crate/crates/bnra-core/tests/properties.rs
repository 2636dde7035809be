use std::collections::HashMap;

use bnra_core::*;
use bnra_testkit::*;
use proptest::prelude::*;

fn config() -> ProptestConfig {
    ProptestConfig::with_cases(512)
}

fn small_protocol(seed: u64) -> (Protocol, ChaCha8Rng) {
    let mut r = rng(seed);
    let shape = Shape { states: 4, messages: 2, registers: 2, transitions: 8, local_tests: 0.1, actions: &Action::ALL };
    (random_protocol(&mut r, shape), r)
}

fn rename_step_values(g: &Configuration, pi: &HashMap<Value, Value>) -> Configuration {
    rename_config(g, pi)
}

proptest! {
    #![proptest_config(config())]

    #[test]
    fn value_permutation_equivariance(seed in any::<u64>(), len in 0usize..6) {
        let (p, mut r) = small_protocol(seed);
        let run = random_run(&mut r, &p, 3, len);
        let g = replay(&p, &run).unwrap();
        let pi = random_bijection(&mut r, &g);
        let pg = rename_step_values(&g, &pi);
        let here = enabled_steps(&p, &g);
        let there = enabled_steps(&p, &pg);
        prop_assert_eq!(&here, &there);
        for s in &here {
            let next = apply_step(&p, &g, s).unwrap();
            prop_assert_eq!(rename_config(&next, &pi), apply_step(&p, &pg, s).unwrap());
        }
    }

    #[test]
    fn canonical_form_identifies_value_renamings(seed in any::<u64>(), len in 0usize..6, other in any::<u64>()) {
        let (p, mut r) = small_protocol(seed);
        let g = replay(&p, &random_run(&mut r, &p, 3, len)).unwrap();
        let pi = random_bijection(&mut r, &g);
        prop_assert_eq!(canonicalize(&g, CanonMode::ValuesOnly), canonicalize(&rename_config(&g, &pi), CanonMode::ValuesOnly));
        // Conversely, equal canonical forms imply a bijection exists.
        let mut r2 = rng(other);
        let h = replay(&p, &random_run(&mut r2, &p, 3, len)).unwrap();
        if canonicalize(&g, CanonMode::ValuesOnly) == canonicalize(&h, CanonMode::ValuesOnly) {
            let mut map = HashMap::new();
            let mut back = HashMap::new();
            for (a, b) in g.agents.iter().zip(&h.agents) {
                prop_assert_eq!(a.state, b.state);
                for (x, y) in a.regs.iter().zip(&b.regs) {
                    prop_assert_eq!(*map.entry(*x).or_insert(*y), *y);
                    prop_assert_eq!(*back.entry(*y).or_insert(*x), *x);
                }
            }
        }
    }

    #[test]
    fn copycat_doubling_replays_and_covers(seed in any::<u64>(), len in 0usize..7) {
        let (p, mut r) = small_protocol(seed);
        let run = random_run(&mut r, &p, 2, len);
        let fin = replay(&p, &run).unwrap();
        let doubled = copycat_double(&run);
        let fin2 = replay(&p, &doubled).unwrap();
        prop_assert_eq!(doubled.agent_count(), 4);
        for a in 0..2 {
            prop_assert_eq!(fin2.state(a), fin.state(a));
            prop_assert_eq!(fin2.state(a + 2), fin.state(a));
        }
    }

    #[test]
    fn recorded_runs_replay_to_the_recorded_configuration(seed in any::<u64>(), len in 0usize..6) {
        let (p, mut r) = small_protocol(seed);
        let run = random_run(&mut r, &p, 3, len);
        let mut g = run.initial.clone();
        for s in &run.steps {
            prop_assert!(enabled_steps(&p, &g).contains(s));
            g = apply_step(&p, &g, s).unwrap();
        }
        prop_assert_eq!(replay(&p, &run).unwrap(), g);
    }

    #[test]
    fn subword_matches_brute_force(seed in any::<u64>()) {
        let mut r = rng(seed);
        let w1 = random_word(&mut r, 4, 3);
        let w2 = random_word(&mut r, 6, 3);
        prop_assert_eq!(subword(&w1, &w2), brute_subword(&w1, &w2));
        prop_assert!(subword(&w2, &w2));
        let w3 = random_word(&mut r, 6, 3);
        if subword(&w1, &w2) && subword(&w2, &w3) {
            prop_assert!(subword(&w1, &w3));
        }
    }
}
