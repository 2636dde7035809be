//! Small protocols used in documentation, tests and the command line.

use crate::protocol::{Action, Protocol, ProtocolBuilder};

/// Two-register protocol with states `q0..q5` and messages `m1..m4`.
///
/// `q4` is coverable (and even reachable by all agents at once); `q5` is not.
pub fn running_example() -> Protocol {
    let mut b = ProtocolBuilder::new("running", 2, "q0");
    for q in ["q1", "q2", "q3", "q4", "q5"] {
        b.state(q);
    }
    for m in ["m1", "m2", "m3", "m4"] {
        b.message(m);
    }
    b.br("q0", "m1", 1, "q1");
    b.br("q0", "m2", 1, "q1");
    b.rec("q0", "m2", 1, Action::Down, "q2");
    b.rec("q1", "m3", 2, Action::Down, "q3");
    b.br("q2", "m3", 2, "q3");
    b.br("q3", "m4", 1, "q3");
    b.rec("q3", "m4", 1, Action::Eq, "q4");
    b.br("q4", "m4", 1, "q4");
    b.rec("q2", "m1", 1, Action::Eq, "q5");
    b.build()
}

/// [`running_example`] without the broadcast loop on `q4`.
pub fn running_example_without_loop() -> Protocol {
    let mut p = running_example();
    let q4 = p.state_id("q4").unwrap();
    p.transitions.retain(|t| !(t.from == q4 && t.to == q4));
    p
}

/// Three-register signature protocol over messages `rdy`, `go`, `hlt`.
///
/// An agent in `q0` may store two identifiers announced with `rdy` and then
/// wait for `go` from the first and `hlt` from the second to reach `q4`.
pub fn ready_go_halt() -> Protocol {
    let mut b = ProtocolBuilder::new("ready_go_halt", 3, "q0");
    for q in ["q1", "q2", "q3", "q4", "q5", "q6", "q7"] {
        b.state(q);
    }
    for m in ["rdy", "go", "hlt"] {
        b.message(m);
    }
    b.br("q5", "go", 1, "q6");
    b.br("q5", "hlt", 1, "q7");
    b.br("q5", "rdy", 1, "q5");
    b.br("q0", "rdy", 1, "q0");
    b.rec("q0", "rdy", 2, Action::Down, "q1");
    b.rec("q1", "rdy", 3, Action::Down, "q2");
    b.rec("q2", "go", 2, Action::Eq, "q3");
    b.rec("q3", "hlt", 3, Action::Eq, "q4");
    b.rec("q0", "rdy", 2, Action::Any, "q5");
    b.build()
}
