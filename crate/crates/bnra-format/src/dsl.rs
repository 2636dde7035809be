//! Line-oriented protocol language.
//!
//! ```text
//! protocol running
//! registers 2
//! messages m1 m2
//! states q0 q1 q2
//! init q0
//! trans q0 br(m1,1) q1
//! trans q0 rec(m2,1,down) q2   # actions: = != down any
//! ```
//!
//! `extension local-tests` enables `trans q loc(i,j,=|!=) q'`.

use std::collections::HashMap;
use std::fmt::{self, Write};

use bnra_core::{Action, LocalTest, Location, Op, Protocol, Transition};

/// A problem at a 1-based line and column.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Diagnostic {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}: {}", self.line, self.column, self.message)
    }
}

impl std::error::Error for Diagnostic {}

/// A parsed protocol with the position of each transition.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProtocolDocument {
    pub protocol: Protocol,
    /// `(line, column)` of transition `i`.
    pub transition_positions: Vec<(usize, usize)>,
}

/// Position-tracking reader over one line.
struct Cursor<'a> {
    line: usize,
    chars: Vec<(usize, char)>,
    at: usize,
    text: &'a str,
}

fn is_word(c: char) -> bool {
    !c.is_whitespace() && !matches!(c, '(' | ')' | ',' | '#')
}

impl<'a> Cursor<'a> {
    fn new(line: usize, text: &'a str) -> Self {
        Cursor { line, chars: text.char_indices().collect(), at: 0, text }
    }

    fn column(&self) -> usize {
        self.at + 1
    }

    fn error(&self, message: impl Into<String>) -> Diagnostic {
        Diagnostic { line: self.line, column: self.column(), message: message.into() }
    }

    fn skip_space(&mut self) {
        while self.chars.get(self.at).is_some_and(|&(_, c)| c.is_whitespace()) {
            self.at += 1;
        }
    }

    fn at_end(&mut self) -> bool {
        self.skip_space();
        self.at >= self.chars.len()
    }

    /// Next run of word characters, with its column.
    fn word(&mut self) -> Option<(usize, &'a str)> {
        self.skip_space();
        let start = self.at;
        while self.chars.get(self.at).is_some_and(|&(_, c)| is_word(c)) {
            self.at += 1;
        }
        (self.at > start).then(|| {
            let from = self.chars[start].0;
            let to = self.chars.get(self.at).map_or(self.text.len(), |&(i, _)| i);
            (start + 1, &self.text[from..to])
        })
    }

    fn expect_word(&mut self, what: &str) -> Result<(usize, &'a str), Diagnostic> {
        self.word().ok_or_else(|| self.error(format!("expected {what}")))
    }

    fn expect(&mut self, c: char) -> Result<(), Diagnostic> {
        self.skip_space();
        match self.chars.get(self.at) {
            Some(&(_, d)) if d == c => {
                self.at += 1;
                Ok(())
            }
            _ => Err(self.error(format!("expected `{c}`"))),
        }
    }
}

fn strip_comment(line: &str) -> &str {
    line.find('#').map_or(line, |i| &line[..i])
}

#[derive(Default)]
struct Builder {
    name: Option<String>,
    registers: Option<usize>,
    local_tests: bool,
    messages: Vec<String>,
    states: Vec<String>,
    state_pos: Vec<(usize, usize)>,
    init: Option<(usize, usize, String)>,
    transitions: Vec<RawTransition>,
}

/// A `trans` line split into columns and texts; names are resolved later.
struct RawTransition {
    line: usize,
    from: (usize, String),
    op: (usize, String),
    to: (usize, String),
}

fn register(cur: &mut Cursor, what: &str) -> Result<usize, Diagnostic> {
    let (col, w) = cur.expect_word(what)?;
    w.parse::<usize>().map_err(|_| Diagnostic { line: cur.line, column: col, message: format!("expected {what}, found `{w}`") })
}

/// Parses the operation at the cursor, resolving message names with `msg`.
fn parse_op(cur: &mut Cursor, msg: &dyn Fn(usize, &str) -> Result<usize, Diagnostic>) -> Result<Op, Diagnostic> {
    let (col, kind) = cur.expect_word("an operation")?;
    cur.expect('(')?;
    let op = match kind {
        "br" => {
            let (mc, m) = cur.expect_word("a message")?;
            let msg = msg(mc, m)?;
            cur.expect(',')?;
            Op::Br { msg, reg: register(cur, "a register")? }
        }
        "rec" => {
            let (mc, m) = cur.expect_word("a message")?;
            let msg = msg(mc, m)?;
            cur.expect(',')?;
            let reg = register(cur, "a register")?;
            cur.expect(',')?;
            let (ac, a) = cur.expect_word("an action")?;
            let action = Action::ALL.into_iter().find(|x| x.keyword() == a).ok_or_else(|| Diagnostic {
                line: cur.line,
                column: ac,
                message: format!("unknown action `{a}`"),
            })?;
            Op::Rec { msg, reg, action }
        }
        "loc" => {
            let left = register(cur, "a register")?;
            cur.expect(',')?;
            let right = register(cur, "a register")?;
            cur.expect(',')?;
            let (tc, t) = cur.expect_word("a test")?;
            let test = match t {
                "=" => LocalTest::Eq,
                "!=" => LocalTest::Neq,
                _ => return Err(Diagnostic { line: cur.line, column: tc, message: format!("unknown test `{t}`") }),
            };
            Op::Loc { left, right, test }
        }
        _ => return Err(Diagnostic { line: cur.line, column: col, message: format!("unknown operation `{kind}`") }),
    };
    cur.expect(')')?;
    Ok(op)
}

/// Parses a protocol; every diagnostic found is reported.
pub fn parse_protocol(text: &str) -> Result<ProtocolDocument, Vec<Diagnostic>> {
    let mut errors = Vec::new();
    let mut b = Builder::default();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.strip_suffix('\r').unwrap_or(raw);
        let mut cur = Cursor::new(i + 1, strip_comment(line));
        if let Err(e) = declaration(&mut cur, &mut b) {
            errors.push(e);
        }
    }
    let last_line = text.lines().count().max(1);
    let at_end = |message: &str| Diagnostic { line: last_line, column: 1, message: message.into() };
    let registers = b.registers.unwrap_or_else(|| {
        errors.push(at_end("missing `registers` declaration"));
        1
    });
    let state_index: HashMap<&str, usize> = b.states.iter().enumerate().map(|(i, s)| (s.as_str(), i)).collect();
    let msg_index: HashMap<&str, usize> = b.messages.iter().enumerate().map(|(i, s)| (s.as_str(), i)).collect();
    let initial = match &b.init {
        None => {
            errors.push(at_end("missing `init` declaration"));
            0
        }
        Some((line, column, q)) => state_index.get(q.as_str()).copied().unwrap_or_else(|| {
            errors.push(Diagnostic { line: *line, column: *column, message: format!("unknown state `{q}`") });
            0
        }),
    };
    let mut transitions = Vec::new();
    let mut positions = Vec::new();
    for t in &b.transitions {
        let line = t.line;
        let state = |column: usize, q: &str| {
            state_index.get(q).copied().ok_or(Diagnostic { line, column, message: format!("unknown state `{q}`") })
        };
        let msg = |column: usize, m: &str| {
            msg_index.get(m).copied().ok_or(Diagnostic { line, column, message: format!("unknown message `{m}`") })
        };
        let from = state(t.from.0, &t.from.1);
        let mut cur = Cursor::new(line, &t.op.1);
        let op = parse_op(&mut cur, &msg).map_err(|mut e| {
            e.column += t.op.0 - 1;
            e
        });
        let to = state(t.to.0, &t.to.1);
        match (from, op, to) {
            (Ok(from), Ok(op), Ok(to)) => {
                transitions.push(Transition { from, op, to });
                positions.push((line, t.from.0));
            }
            (from, op, to) => errors.extend([from.err(), op.err(), to.err()].into_iter().flatten()),
        }
    }
    if !errors.is_empty() {
        return Err(errors);
    }
    let protocol = Protocol {
        name: b.name.unwrap_or_else(|| "protocol".into()),
        states: b.states,
        initial,
        messages: b.messages,
        registers,
        transitions,
        local_tests: b.local_tests,
    };
    let errors: Vec<Diagnostic> = protocol
        .validate()
        .into_iter()
        .map(|d| {
            let (line, column) = match d.location {
                Location::Transition(t) => positions[t],
                Location::State(s) => b.state_pos[s],
                Location::Protocol => (1, 1),
            };
            Diagnostic { line, column, message: d.message }
        })
        .collect();
    if !errors.is_empty() {
        return Err(errors);
    }
    Ok(ProtocolDocument { protocol, transition_positions: positions })
}

fn declaration(cur: &mut Cursor, b: &mut Builder) -> Result<(), Diagnostic> {
    let Some((col, keyword)) = cur.word() else {
        return if cur.at_end() { Ok(()) } else { Err(cur.error("expected a declaration")) };
    };
    let line = cur.line;
    match keyword {
        "protocol" => b.name = Some(cur.expect_word("a protocol name")?.1.to_string()),
        "registers" => b.registers = Some(register(cur, "a register count")?),
        "extension" => {
            let (c, e) = cur.expect_word("an extension")?;
            if e != "local-tests" {
                return Err(Diagnostic { line, column: c, message: format!("unknown extension `{e}`") });
            }
            b.local_tests = true;
        }
        "messages" => {
            while let Some((_, m)) = cur.word() {
                b.messages.push(m.to_string());
            }
        }
        "states" => {
            while let Some((c, q)) = cur.word() {
                b.states.push(q.to_string());
                b.state_pos.push((line, c));
            }
        }
        "init" => {
            let (c, q) = cur.expect_word("a state")?;
            b.init = Some((line, c, q.to_string()));
        }
        "trans" => {
            let (fc, from) = cur.expect_word("a source state")?;
            cur.skip_space();
            let op_start = cur.at;
            while cur.chars.get(cur.at).is_some_and(|&(_, ch)| ch != ')') {
                cur.at += 1;
            }
            cur.expect(')')?;
            let op: String = cur.chars[op_start..cur.at].iter().map(|&(_, ch)| ch).collect();
            let (tc, to) = cur.expect_word("a target state")?;
            b.transitions.push(RawTransition {
                line,
                from: (fc, from.to_string()),
                op: (op_start + 1, op),
                to: (tc, to.to_string()),
            });
        }
        _ => return Err(Diagnostic { line, column: col, message: format!("unknown declaration `{keyword}`") }),
    }
    if !cur.at_end() {
        return Err(cur.error("unexpected text after declaration"));
    }
    Ok(())
}

fn op_text(p: &Protocol, op: &Op) -> String {
    match *op {
        Op::Br { msg, reg } => format!("br({},{reg})", p.message_name(msg)),
        Op::Rec { msg, reg, action } => format!("rec({},{reg},{})", p.message_name(msg), action.keyword()),
        Op::Loc { left, right, test } => {
            format!("loc({left},{right},{})", if test == LocalTest::Eq { "=" } else { "!=" })
        }
    }
}

/// Prints `p` in the protocol language; parsing the output gives `p` back.
pub fn print_protocol(p: &Protocol) -> String {
    let mut out = String::new();
    writeln!(out, "protocol {}", p.name).unwrap();
    writeln!(out, "registers {}", p.registers).unwrap();
    if p.local_tests {
        writeln!(out, "extension local-tests").unwrap();
    }
    writeln!(out, "messages {}", p.messages.join(" ")).unwrap();
    writeln!(out, "states {}", p.states.join(" ")).unwrap();
    writeln!(out, "init {}", p.state_name(p.initial)).unwrap();
    for t in &p.transitions {
        writeln!(out, "trans {} {} {}", p.state_name(t.from), op_text(p, &t.op), p.state_name(t.to)).unwrap();
    }
    out
}
