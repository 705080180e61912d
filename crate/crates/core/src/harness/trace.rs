//! Line-oriented event trace format.

use std::fmt;

use num::Signed;

use crate::core::{check_epsilon, fmt_rational, parse_rational, Objective, Rational};
use crate::error::{Error, Result};

/// Kind of a trace event.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Op {
    Insert,
    Remove,
}

impl fmt::Display for Op {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Op::Insert => "insert",
            Op::Remove => "remove",
        })
    }
}

/// One insertion or removal of a job of the given size.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Event {
    pub op: Op,
    pub size: Rational,
}

/// A header plus a sequence of events.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EventTrace {
    pub objective: Objective,
    pub epsilon: Rational,
    pub pmax: Rational,
    /// One speed per concrete machine.
    pub speeds: Vec<Rational>,
    pub events: Vec<Event>,
}

fn perr(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse {
        line,
        msg: msg.into(),
    }
}

fn rational_at(line: usize, s: &str) -> Result<Rational> {
    parse_rational(s).map_err(|e| perr(line, e.to_string()))
}

/// Parses a trace. Removals of absent sizes are left to replay.
pub fn parse_trace(text: &str) -> Result<EventTrace> {
    let mut objective = None;
    let mut epsilon = None;
    let mut pmax: Option<Rational> = None;
    let mut speeds: Option<Vec<Rational>> = None;
    let mut events: Vec<(usize, Event)> = Vec::new();

    for (k, raw) in text.lines().enumerate() {
        let line = k + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let mut words = content.split_whitespace();
        let key = words.next().expect("nonempty line");
        let rest: Vec<&str> = words.collect();
        let single = || -> Result<&str> {
            match rest.as_slice() {
                [v] => Ok(v),
                _ => Err(perr(line, format!("`{key}` takes exactly one value"))),
            }
        };
        let header = matches!(key, "objective" | "epsilon" | "pmax" | "speeds");
        if header && !events.is_empty() {
            return Err(perr(line, "header lines must precede events"));
        }
        let dup = || perr(line, format!("duplicate `{key}` header"));
        match key {
            "objective" => {
                if objective.is_some() {
                    return Err(dup());
                }
                objective = Some(single()?.parse::<Objective>().map_err(|e| perr(line, e.to_string()))?);
            }
            "epsilon" => {
                if epsilon.is_some() {
                    return Err(dup());
                }
                let e = rational_at(line, single()?)?;
                check_epsilon(&e).map_err(|e| perr(line, e.to_string()))?;
                epsilon = Some(e);
            }
            "pmax" => {
                if pmax.is_some() {
                    return Err(dup());
                }
                let p = rational_at(line, single()?)?;
                if !p.is_positive() {
                    return Err(perr(line, "pmax must be positive"));
                }
                pmax = Some(p);
            }
            "speeds" => {
                if speeds.is_some() {
                    return Err(dup());
                }
                if rest.is_empty() {
                    return Err(perr(line, "at least one speed is required"));
                }
                let v = rest
                    .iter()
                    .map(|s| rational_at(line, s))
                    .collect::<Result<Vec<_>>>()?;
                if v.iter().any(|s| !s.is_positive()) {
                    return Err(perr(line, "speeds must be positive"));
                }
                speeds = Some(v);
            }
            "insert" | "remove" => {
                let size = rational_at(line, single()?)?;
                if !size.is_positive() {
                    return Err(perr(line, "job sizes must be positive"));
                }
                let op = if key == "insert" { Op::Insert } else { Op::Remove };
                events.push((line, Event { op, size }));
            }
            other => return Err(perr(line, format!("unknown keyword `{other}`"))),
        }
    }

    let at = events.first().map_or(text.lines().count().max(1), |(l, _)| *l);
    let missing = |what: &str| perr(at, format!("missing `{what}` header"));
    let objective = objective.ok_or_else(|| missing("objective"))?;
    let epsilon = epsilon.ok_or_else(|| missing("epsilon"))?;
    let pmax = pmax.ok_or_else(|| missing("pmax"))?;
    let speeds = speeds.ok_or_else(|| missing("speeds"))?;
    for (line, ev) in &events {
        if ev.size > pmax {
            return Err(perr(
                *line,
                format!("size {} exceeds pmax {}", fmt_rational(&ev.size), fmt_rational(&pmax)),
            ));
        }
    }
    Ok(EventTrace {
        objective,
        epsilon,
        pmax,
        speeds,
        events: events.into_iter().map(|(_, e)| e).collect(),
    })
}

impl fmt::Display for EventTrace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "objective {}", self.objective)?;
        writeln!(f, "epsilon {}", fmt_rational(&self.epsilon))?;
        writeln!(f, "pmax {}", fmt_rational(&self.pmax))?;
        let s: Vec<String> = self.speeds.iter().map(fmt_rational).collect();
        writeln!(f, "speeds {}", s.join(" "))?;
        for e in &self.events {
            writeln!(f, "{} {}", e.op, fmt_rational(&e.size))?;
        }
        Ok(())
    }
}
