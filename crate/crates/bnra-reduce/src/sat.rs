//! 3SAT to coverability in one-register protocols.

use bnra_core::{Action, Protocol, ProtocolBuilder, StateId};
use serde::{Deserialize, Serialize};

use crate::ReduceError;

/// A 3-CNF formula. Literal `i` is `x_i`, literal `-i` is `¬x_i`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Cnf3 {
    pub vars: usize,
    pub clauses: Vec<[i32; 3]>,
}

impl Cnf3 {
    pub fn new(vars: usize, clauses: Vec<[i32; 3]>) -> Result<Self, ReduceError> {
        let phi = Cnf3 { vars, clauses };
        phi.check()?;
        Ok(phi)
    }

    pub fn check(&self) -> Result<(), ReduceError> {
        if self.vars == 0 {
            return Err(ReduceError::Malformed("a formula needs at least one variable".into()));
        }
        for (j, c) in self.clauses.iter().enumerate() {
            for &l in c {
                if l == 0 || l.unsigned_abs() as usize > self.vars {
                    return Err(ReduceError::Malformed(format!("clause {} has literal {l} out of range", j + 1)));
                }
            }
        }
        Ok(())
    }

    /// Truth value under `assignment`, where bit `i-1` is the value of `x_i`.
    pub fn eval(&self, assignment: u64) -> bool {
        let lit = |l: i32| (assignment >> (l.unsigned_abs() - 1) & 1 == 1) == (l > 0);
        self.clauses.iter().all(|c| c.iter().any(|&l| lit(l)))
    }
}

/// Message (and repeater suffix) for a literal: `x3` or `nx3`.
pub fn literal_name(l: i32) -> String {
    if l > 0 {
        format!("x{l}")
    } else {
        format!("nx{}", -l)
    }
}

/// One agent broadcasts a valuation along `v0 … vn` with its own value,
/// repeaters echo what they heard, and the clause chain `c1 … final` checks
/// one echoed literal per clause with `=`.
pub fn sat_to_protocol(phi: &Cnf3) -> Result<(Protocol, StateId), ReduceError> {
    phi.check()?;
    let n = phi.vars as i32;
    let m = phi.clauses.len();
    let mut b = ProtocolBuilder::new("sat", 1, "v0");
    for i in 1..=n {
        b.message(&literal_name(i));
        b.message(&literal_name(-i));
    }
    let var = |i: i32| format!("v{i}");
    let clause = |j: usize| match j {
        0 => var(n),
        j if j == m => "final".to_string(),
        j => format!("c{j}"),
    };
    for i in 1..=n {
        for l in [i, -i] {
            let lit = literal_name(l);
            b.br(&var(i - 1), &lit, 1, &var(i));
            let rep = format!("lit_{lit}");
            b.rec("v0", &lit, 1, Action::Down, &rep);
            b.br(&rep, &lit, 1, &rep);
        }
    }
    for (j, c) in phi.clauses.iter().enumerate() {
        for &l in c {
            b.rec(&clause(j), &literal_name(l), 1, Action::Eq, &clause(j + 1));
        }
    }
    // Without clauses the end of the valuation chain is the target.
    let q = b.state(&clause(m));
    Ok((b.build(), q))
}

/// Truth-table satisfiability check.
pub fn brute_force_sat(phi: &Cnf3) -> Result<bool, ReduceError> {
    phi.check()?;
    if phi.vars > 20 {
        return Err(ReduceError::TooLarge(format!("{} variables", phi.vars)));
    }
    Ok((0..1u64 << phi.vars).any(|a| phi.eval(a)))
}
