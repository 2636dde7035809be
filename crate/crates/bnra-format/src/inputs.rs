//! Source-problem inputs for the reductions: DIMACS-style 3-CNF, and lossy
//! channel systems and Minsky machines as JSON.

use std::fmt::Write;

use bnra_reduce::{Cnf3, Lcs, MinskyMachine};
use serde::{de::DeserializeOwned, Deserialize, Serialize};

use crate::json::FORMAT_VERSION;
use crate::Diagnostic;

fn at(line: usize, column: usize, message: impl Into<String>) -> Diagnostic {
    Diagnostic { line, column, message: message.into() }
}

/// Parses `p cnf n m` followed by `m` clause lines of three literals, each
/// optionally terminated by `0`. Lines starting with `c` are comments.
pub fn parse_dimacs(text: &str) -> Result<Cnf3, Diagnostic> {
    let mut header: Option<(usize, usize, usize)> = None;
    let mut clauses = Vec::new();
    let mut last = 0;
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        last = line;
        let raw = raw.strip_suffix('\r').unwrap_or(raw);
        let words: Vec<(usize, &str)> =
            raw.split_whitespace().map(|w| (w.as_ptr() as usize - raw.as_ptr() as usize + 1, w)).collect();
        match words.first() {
            None => continue,
            Some((_, w)) if w.starts_with('c') || w.starts_with('%') => continue,
            Some((col, "p")) => {
                if header.is_some() {
                    return Err(at(line, *col, "duplicate header"));
                }
                let [_, (_, "cnf"), (nc, n), (mc, m)] = words[..] else {
                    return Err(at(line, *col, "expected `p cnf <variables> <clauses>`"));
                };
                let n = n.parse().map_err(|_| at(line, nc, format!("bad variable count `{n}`")))?;
                let m = m.parse().map_err(|_| at(line, mc, format!("bad clause count `{m}`")))?;
                header = Some((n, m, line));
            }
            Some(&(col, _)) => {
                let Some((n, _, _)) = header else { return Err(at(line, col, "clause before the `p cnf` header")) };
                let mut lits = Vec::new();
                for &(c, w) in &words {
                    let l: i32 = w.parse().map_err(|_| at(line, c, format!("bad literal `{w}`")))?;
                    if l.unsigned_abs() as usize > n {
                        return Err(at(line, c, format!("literal {l} exceeds {n} variables")));
                    }
                    lits.push((c, l));
                }
                if lits.last().is_some_and(|&(_, l)| l == 0) {
                    lits.pop();
                }
                if let Some(&(c, _)) = lits.iter().find(|&&(_, l)| l == 0) {
                    return Err(at(line, c, "0 may only end a clause"));
                }
                let [a, b, c] = lits[..] else {
                    return Err(at(line, col, format!("expected 3 literals, found {}", lits.len())));
                };
                clauses.push([a.1, b.1, c.1]);
            }
        }
    }
    let Some((n, m, hline)) = header else { return Err(at(last.max(1), 1, "missing `p cnf` header")) };
    if clauses.len() != m {
        return Err(at(hline, 1, format!("header announces {m} clauses, found {}", clauses.len())));
    }
    Cnf3::new(n, clauses).map_err(|e| at(hline, 1, e.to_string()))
}

pub fn print_dimacs(phi: &Cnf3) -> String {
    let mut out = format!("p cnf {} {}\n", phi.vars, phi.clauses.len());
    for [a, b, c] in &phi.clauses {
        writeln!(out, "{a} {b} {c} 0").unwrap();
    }
    out
}

#[derive(Serialize, Deserialize)]
struct Versioned<T> {
    format: u64,
    #[serde(flatten)]
    body: T,
}

fn read_versioned<T: DeserializeOwned>(text: &str) -> Result<T, Diagnostic> {
    let json = |e: serde_json::Error| at(e.line(), e.column(), e.to_string());
    let doc: Versioned<T> = serde_json::from_str(text).map_err(json)?;
    if doc.format != FORMAT_VERSION {
        return Err(at(1, 1, format!("unsupported format version {}", doc.format)));
    }
    Ok(doc.body)
}

fn write_versioned<T: Serialize>(body: &T) -> String {
    let v = serde_json::to_value(Versioned { format: FORMAT_VERSION, body }).expect("serializable");
    let mut s = serde_json::to_string_pretty(&v).expect("serializable");
    s.push('\n');
    s
}

pub fn parse_lcs(text: &str) -> Result<Lcs, Diagnostic> {
    let l: Lcs = read_versioned(text)?;
    l.check().map_err(|e| at(1, 1, e.to_string()))?;
    Ok(l)
}

pub fn print_lcs(l: &Lcs) -> String {
    write_versioned(l)
}

pub fn parse_minsky(text: &str) -> Result<MinskyMachine, Diagnostic> {
    let m: MinskyMachine = read_versioned(text)?;
    m.check().map_err(|e| at(1, 1, e.to_string()))?;
    Ok(m)
}

pub fn print_minsky(m: &MinskyMachine) -> String {
    write_versioned(m)
}
