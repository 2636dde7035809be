use bnra_core::*;
use bnra_cover1::{concretize, decide_cover1, replay_abstract, ConcretizeError};
use bnra_reduce::*;
use bnra_testkit::rng;
use rand::Rng;

/// Satisfiability by splitting on the literals of the first clause.
fn split_sat(clauses: &[Vec<i32>]) -> bool {
    let Some(first) = clauses.first() else { return true };
    first.iter().any(|&l| {
        let mut rest = Vec::new();
        for c in clauses {
            if c.contains(&l) {
                continue;
            }
            let c: Vec<i32> = c.iter().copied().filter(|&x| x != -l).collect();
            if c.is_empty() {
                return false;
            }
            rest.push(c);
        }
        split_sat(&rest)
    })
}

fn random_cnf(g: &mut impl Rng) -> Cnf3 {
    let n = g.gen_range(1..=3usize);
    let m = g.gen_range(1..=3usize);
    let lit = |g: &mut dyn rand::RngCore| {
        let v = g.gen_range(1..=n as i32);
        if g.gen_bool(0.5) {
            v
        } else {
            -v
        }
    };
    let clauses = (0..m).map(|_| [lit(g), lit(g), lit(g)]).collect();
    Cnf3::new(n, clauses).unwrap()
}

#[test]
fn single_clause_formula() {
    let phi = Cnf3::new(1, vec![[1, 1, 1]]).unwrap();
    let (p, q) = sat_to_protocol(&phi).unwrap();
    let mut names = p.states.clone();
    names.sort();
    assert_eq!(names, ["final", "lit_nx1", "lit_x1", "v0", "v1"]);
    assert_eq!(p.state_name(q), "final");
    assert!(validate_protocol(&p).is_empty());
    assert!(decide_cover1(&p, q).unwrap().coverable);
}

#[test]
fn contradiction_is_not_coverable() {
    let phi = Cnf3::new(1, vec![[1, 1, 1], [-1, -1, -1]]).unwrap();
    let (p, q) = sat_to_protocol(&phi).unwrap();
    assert!(!brute_force_sat(&phi).unwrap());
    assert!(!decide_cover1(&p, q).unwrap().coverable);
}

#[test]
fn degenerate_formulas_are_rejected() {
    assert!(Cnf3::new(0, vec![]).is_err());
    assert!(Cnf3::new(2, vec![[1, 3, 2]]).is_err());
    assert!(Cnf3::new(2, vec![[1, 0, 2]]).is_err());
    assert!(brute_force_sat(&Cnf3 { vars: 21, clauses: vec![] }).is_err());
}

#[test]
fn trivial_oracle_cases() {
    assert!(brute_force_sat(&Cnf3::new(1, vec![[1, 1, 1]]).unwrap()).unwrap());
    assert!(!brute_force_sat(&Cnf3::new(1, vec![[1, 1, 1], [-1, -1, -1]]).unwrap()).unwrap());
    assert!(brute_force_sat(&Cnf3::new(2, vec![]).unwrap()).unwrap());
}

#[test]
fn oracles_agree_on_random_formulas() {
    let mut g = rng(0x5A7);
    for _ in 0..500 {
        let n = g.gen_range(1..=6usize);
        let m = g.gen_range(0..=12usize);
        let clauses: Vec<[i32; 3]> = (0..m)
            .map(|_| {
                let mut c = [0; 3];
                for l in &mut c {
                    *l = g.gen_range(1..=n as i32) * if g.gen_bool(0.5) { 1 } else { -1 };
                }
                c
            })
            .collect();
        let phi = Cnf3::new(n, clauses).unwrap();
        let split: Vec<Vec<i32>> = phi.clauses.iter().map(|c| c.to_vec()).collect();
        assert_eq!(brute_force_sat(&phi).unwrap(), split_sat(&split), "{phi:?}");
    }
}

#[test]
fn coverability_matches_satisfiability() {
    let mut g = rng(0xC1A5);
    let (mut positive, mut concretized) = (0, 0);
    for _ in 0..250 {
        let phi = random_cnf(&mut g);
        let (p, q) = sat_to_protocol(&phi).unwrap();
        let d = decide_cover1(&p, q).unwrap();
        assert_eq!(d.coverable, brute_force_sat(&phi).unwrap(), "{phi:?}");
        let Some(w) = d.witness else { continue };
        positive += 1;
        assert!(replay_abstract(&p, &w).unwrap().covered().contains(q));
        match concretize(&p, &w, 64) {
            Ok(run) => {
                assert!(replay(&p, &run).unwrap().covers(q));
                concretized += 1;
            }
            Err(ConcretizeError::BudgetExceeded(_)) => {}
            Err(e) => panic!("{e}"),
        }
    }
    assert!(positive > 0);
    assert!(concretized * 100 >= positive * 95, "{concretized}/{positive}");
}

fn literal(vars: usize) -> impl proptest::strategy::Strategy<Value = i32> {
    use proptest::prelude::*;
    (1..=vars as i32, any::<bool>()).prop_map(|(x, pos)| if pos { x } else { -x })
}

proptest::proptest! {
    #![proptest_config(proptest::prelude::ProptestConfig::with_cases(300))]

    #[test]
    fn reduction_agrees_with_splitting(clauses in proptest::collection::vec(proptest::array::uniform3(literal(3)), 0..=4)) {
        let phi = Cnf3::new(3, clauses.clone()).unwrap();
        let (p, q) = sat_to_protocol(&phi).unwrap();
        proptest::prop_assert!(validate_protocol(&p).is_empty());
        let split: Vec<Vec<i32>> = clauses.iter().map(|c| c.to_vec()).collect();
        proptest::prop_assert_eq!(decide_cover1(&p, q).unwrap().coverable, split_sat(&split));
    }
}
