//! Line-oriented automaton text format.
//!
//! ```text
//! # comment
//! I 0 0
//! A 0 1 5 -0.25
//! F 1 0
//! ```
//!
//! `A src dst label weight` is an arc, `I q w` an initial and `F q w` a
//! final weight. The number of states is one more than the largest state
//! mentioned. Repeated `I`/`F` lines for a state are ⊕-merged.

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::semiring::{format_cotangent, Semiring};
use crate::wfsa::{Automaton, AutomatonGradients};

/// One weighted line of a file, in input order.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Record<E> {
    /// Index into the automaton's arcs.
    Arc(usize),
    Initial(usize, E),
    Final(usize, E),
}

#[derive(Debug, Clone, PartialEq)]
pub struct ParsedFsa<S: Semiring> {
    pub automaton: Automaton<S>,
    pub records: Vec<Record<S::Elem>>,
}

enum Line<E> {
    Arc(usize, usize, u32, E),
    Initial(usize, E),
    Final(usize, E),
}

fn parse_error(line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        message: message.into(),
    }
}

fn parse_line<S: Semiring>(s: &S, lineno: usize, fields: &[&str]) -> Result<Line<S::Elem>> {
    let state = |f: &str| {
        f.parse::<usize>()
            .map_err(|_| parse_error(lineno, format!("invalid state `{f}`")))
    };
    let weight = |f: &str| {
        s.parse_elem(f)
            .map_err(|e| parse_error(lineno, format!("invalid weight `{f}`: {e}")))
    };
    match fields {
        ["A", src, dst, label, w] => {
            let label = label
                .parse::<u32>()
                .map_err(|_| parse_error(lineno, format!("invalid label `{label}`")))?;
            Ok(Line::Arc(state(src)?, state(dst)?, label, weight(w)?))
        }
        ["I", q, w] => Ok(Line::Initial(state(q)?, weight(w)?)),
        ["F", q, w] => Ok(Line::Final(state(q)?, weight(w)?)),
        [kind @ ("A" | "I" | "F"), ..] => Err(parse_error(
            lineno,
            format!("wrong number of fields for `{kind}` record"),
        )),
        [kind, ..] => Err(parse_error(lineno, format!("unknown record type `{kind}`"))),
        [] => unreachable!(),
    }
}

/// Parses a file in the text format.
pub fn parse_fsa<S: Semiring>(semiring: &S, text: &str) -> Result<ParsedFsa<S>> {
    let mut lines = Vec::new();
    let mut num_states = 0;
    for (i, raw) in text.lines().enumerate() {
        let content = raw.split('#').next().unwrap_or("");
        let fields: Vec<&str> = content.split_whitespace().collect();
        if fields.is_empty() {
            continue;
        }
        let line = parse_line(semiring, i + 1, &fields)?;
        let top = match line {
            Line::Arc(o, d, ..) => o.max(d),
            Line::Initial(q, _) | Line::Final(q, _) => q,
        };
        num_states = num_states.max(top + 1);
        lines.push(line);
    }

    let mut automaton = Automaton::new(semiring.clone(), num_states);
    let mut records = Vec::with_capacity(lines.len());
    for line in lines {
        records.push(match line {
            Line::Arc(o, d, label, w) => Record::Arc(automaton.add_arc(o, d, label, w)?),
            Line::Initial(q, w) => {
                automaton.add_initial(q, w)?;
                Record::Initial(q, w)
            }
            Line::Final(q, w) => {
                automaton.add_final(q, w)?;
                Record::Final(q, w)
            }
        });
    }
    Ok(ParsedFsa { automaton, records })
}

/// Canonical serialization: `I` lines by state, then arcs in index order,
/// then `F` lines by state.
pub fn write_fsa<S: Semiring>(a: &Automaton<S>) -> String {
    let s = a.semiring();
    let mut out = String::new();
    for (&q, &w) in a.initial() {
        let _ = writeln!(out, "I {q} {}", s.format_elem(w));
    }
    for arc in a.arcs() {
        let _ = writeln!(
            out,
            "A {} {} {} {}",
            arc.origin,
            arc.dest,
            arc.label,
            s.format_elem(arc.weight)
        );
    }
    for (&q, &w) in a.finals() {
        let _ = writeln!(out, "F {q} {}", s.format_elem(w));
    }
    out
}

/// Writes the records of `parsed` with every weight replaced by the
/// gradient of `ν` with respect to it. State ids are the file's own.
///
/// When several lines were ⊕-merged into one initial or final weight, each
/// line receives its own share through the ⊕-sum.
pub fn write_gradients<S: Semiring>(
    parsed: &ParsedFsa<S>,
    grads: &AutomatonGradients<S::Cotangent>,
) -> String {
    let a = &parsed.automaton;
    let s = a.semiring();
    let mut out = String::new();
    for rec in &parsed.records {
        let _ = match *rec {
            Record::Arc(e) => {
                let arc = a.arcs()[e];
                writeln!(
                    out,
                    "A {} {} {} {}",
                    arc.origin,
                    arc.dest,
                    arc.label,
                    format_cotangent(grads.grad_arcs[e])
                )
            }
            Record::Initial(q, w) => {
                let g = s.pullback_through_sum(a.initial_weight(q), w, grads.grad_initial[q]);
                writeln!(out, "I {q} {}", format_cotangent(g))
            }
            Record::Final(q, w) => {
                let g = s.pullback_through_sum(a.final_weight(q), w, grads.grad_final[q]);
                writeln!(out, "F {q} {}", format_cotangent(g))
            }
        };
    }
    out
}
