//! The line-based `strrep v1` text format.
//!
//! ```text
//! strrep v1
//! declare-k 3          # optional
//! curve a : 0/1,0/1 2/1,2/1
//! ```

use std::fmt::Write as _;

use super::{Representation, RepresentationError};
use crate::geometry::{Point, Polyline, Rational};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("line {line}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub message: String,
}

fn err(line: usize, message: impl Into<String>) -> ParseError {
    ParseError { line, message: message.into() }
}

pub fn parse(text: &str) -> Result<Representation, ParseError> {
    let mut r = Representation::new();
    let mut header = false;
    for (i, raw) in text.lines().enumerate() {
        let n = i + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        if !header {
            if line != "strrep v1" {
                return Err(err(n, format!("expected header `strrep v1`, got `{line}`")));
            }
            header = true;
            continue;
        }
        let mut words = line.split_whitespace();
        match words.next() {
            Some("declare-k") => {
                let k: u64 = words
                    .next()
                    .and_then(|w| w.parse().ok())
                    .filter(|&k| k > 0)
                    .ok_or_else(|| err(n, "declare-k needs a positive integer"))?;
                if words.next().is_some() {
                    return Err(err(n, "trailing tokens after declare-k"));
                }
                if r.declared_k.replace(k).is_some() {
                    return Err(err(n, "declare-k given twice"));
                }
            }
            Some("curve") => {
                let id = words.next().ok_or_else(|| err(n, "missing curve id"))?;
                if words.next() != Some(":") {
                    return Err(err(n, "expected `:` after curve id"));
                }
                let mut pts = Vec::new();
                for w in words {
                    let (x, y) = w.split_once(',').ok_or_else(|| err(n, format!("bad point `{w}`")))?;
                    let x: Rational = x.parse().map_err(|e| err(n, format!("{e}")))?;
                    let y: Rational = y.parse().map_err(|e| err(n, format!("{e}")))?;
                    pts.push(Point::new(x, y));
                }
                let curve = Polyline::new(pts).map_err(|e| err(n, format!("curve `{id}`: {e}")))?;
                r.insert(id.to_string(), curve).map_err(|e| match e {
                    RepresentationError::DuplicateVertex(id) => err(n, format!("duplicate vertex `{id}`")),
                    e => err(n, e.to_string()),
                })?;
            }
            Some(w) => return Err(err(n, format!("unknown directive `{w}`"))),
            None => unreachable!(),
        }
    }
    if !header {
        return Err(err(1, "missing header `strrep v1`"));
    }
    Ok(r)
}

pub fn serialize(r: &Representation) -> String {
    let mut s = String::from("strrep v1\n");
    if let Some(k) = r.declared_k {
        let _ = writeln!(s, "declare-k {k}");
    }
    for (id, c) in r.iter() {
        let _ = write!(s, "curve {id} :");
        for p in c.vertices() {
            let _ = write!(s, " {},{}", p.x, p.y);
        }
        s.push('\n');
    }
    s
}
