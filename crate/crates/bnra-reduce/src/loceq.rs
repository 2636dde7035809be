//! Elimination of local equality tests by tracking which registers share a value.

use bnra_core::{Action, LocalTest, Op, Protocol, ProtocolBuilder, StateId};

use crate::ReduceError;

/// Largest register count accepted by [`eliminate_local_equality`].
pub const MAX_REGISTERS: usize = 4;

/// Maps `[1..r] → [1..r]`, stored 0-based.
type Map = Vec<usize>;

fn all_maps(r: usize) -> Vec<Map> {
    let mut out = vec![Vec::new()];
    for _ in 0..r {
        out = out.into_iter().flat_map(|m| (0..r).map(move |j| [m.clone(), vec![j]].concat())).collect();
    }
    out
}

/// `q@m12` for state `q` with register 1 in slot 1 and register 2 in slot 2.
pub fn lifted_name(q: &str, map: &[usize]) -> String {
    let digits: String = map.iter().map(|j| (j + 1).to_string()).collect();
    format!("{q}@m{digits}")
}

/// Fresh message name for effect-free broadcasts.
fn dummy_name(p: &Protocol) -> String {
    let mut name = "dummy".to_string();
    while p.message_id(&name).is_some() {
        name.push('_');
    }
    name
}

/// Rebuilds `p` over states `(q, map)`, where `map` sends each register to
/// the memory slot holding its value. `loc(=)` becomes a broadcast of a
/// message nobody receives when both registers share a slot.
pub fn eliminate_local_equality(p: &Protocol) -> Result<Protocol, ReduceError> {
    let r = p.registers;
    if r > MAX_REGISTERS {
        return Err(ReduceError::RegisterBoundExceeded(r));
    }
    let maps = all_maps(r);
    let id: Map = (0..r).collect();
    let mut b = ProtocolBuilder::new(&p.name, r, &lifted_name(p.state_name(p.initial), &id)).local_tests(true);
    for m in &p.messages {
        b.message(m);
    }
    for q in 0..p.states.len() {
        for map in &maps {
            b.state(&lifted_name(p.state_name(q), map));
        }
    }
    let has_eq = p.transitions.iter().any(|t| matches!(t.op, Op::Loc { test: LocalTest::Eq, .. }));
    let dummy = if has_eq { Some(b.message(&dummy_name(p))) } else { None };
    for t in &p.transitions {
        for map in &maps {
            let from = b.state(&lifted_name(p.state_name(t.from), map));
            let add = |b: &mut ProtocolBuilder, op: Op, to_map: &Map| {
                let to = b.state(&lifted_name(p.state_name(t.to), to_map));
                b.transition(from, op, to);
            };
            match t.op {
                Op::Br { msg, reg } => add(&mut b, Op::Br { msg, reg: map[reg - 1] + 1 }, map),
                Op::Rec { msg, reg, action: Action::Down } => {
                    let i0 = reg - 1;
                    for j in 0..r {
                        let mut to = map.clone();
                        to[i0] = j;
                        let action = if (0..r).all(|i| i == i0 || map[i] != j) { Action::Down } else { Action::Eq };
                        add(&mut b, Op::Rec { msg, reg: j + 1, action }, &to);
                        if action == Action::Down {
                            // The value may also already sit in slot j.
                            add(&mut b, Op::Rec { msg, reg: j + 1, action: Action::Eq }, &to);
                        }
                    }
                }
                Op::Rec { msg, reg, action } => add(&mut b, Op::Rec { msg, reg: map[reg - 1] + 1, action }, map),
                Op::Loc { left, right, test: LocalTest::Neq } => {
                    add(&mut b, Op::Loc { left: map[left - 1] + 1, right: map[right - 1] + 1, test: LocalTest::Neq }, map)
                }
                Op::Loc { left, right, test: LocalTest::Eq } => {
                    if map[left - 1] == map[right - 1] {
                        add(&mut b, Op::Br { msg: dummy.expect("dummy message"), reg: 1 }, map);
                    }
                }
            }
        }
    }
    Ok(b.build())
}

/// States of `lifted` that stand for `q` of `p`, under any map.
pub fn lift_targets(p: &Protocol, lifted: &Protocol, q: StateId) -> Vec<StateId> {
    let prefix = format!("{}@m", p.state_name(q));
    (0..lifted.states.len())
        .filter(|&s| lifted.state_name(s).strip_prefix(&prefix).is_some_and(|d| d.chars().all(|c| c.is_ascii_digit())))
        .collect()
}

/// Adds a state `name` reached from every state of `targets` by an
/// effect-free broadcast, so that covering any target becomes covering one.
pub fn funnel_targets(p: &Protocol, targets: &[StateId], name: &str) -> Result<(Protocol, StateId), ReduceError> {
    if p.state_id(name).is_some() {
        return Err(ReduceError::Malformed(format!("state `{name}` already exists")));
    }
    let mut out = p.clone();
    let q = out.states.len();
    out.states.push(name.to_string());
    out.messages.push(dummy_name(p));
    let m = out.messages.len() - 1;
    for &t in targets {
        out.transitions.push(bnra_core::Transition { from: t, op: Op::Br { msg: m, reg: 1 }, to: q });
    }
    Ok((out, q))
}
