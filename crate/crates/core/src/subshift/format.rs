//! Text format for subshifts.
//!
//! ```text
//! # golden mean shift
//! alphabet=2; dim=1; name=golden-mean
//! dim=1; cells=(0):1,(1):1
//! ```
//!
//! A header line of `key=value` fields (`alphabet` required; `dim`, `name`
//! optional) is followed either by forbidden patterns, one per line, or by
//! sofic edges written `src -label-> dst`. A header with no body is the
//! full shift.

use std::fmt;

use super::{LabeledEdge, LabeledGraph, ShiftKind, Subshift};
use crate::error::{invalid, Result};
use crate::lattice::{Pattern, Symbol};

pub fn parse_subshift(text: &str) -> Result<Subshift> {
    let mut lines = text
        .lines()
        .map(|l| l.split('#').next().unwrap_or("").trim())
        .filter(|l| !l.is_empty());
    let header = lines.next().ok_or_else(|| invalid("empty subshift description"))?;
    let mut alphabet = None;
    let mut dim = None;
    let mut name = None;
    for field in header.split(';').map(str::trim).filter(|f| !f.is_empty()) {
        let (key, value) = field
            .split_once('=')
            .ok_or_else(|| invalid(format!("header field `{field}` is not key=value")))?;
        let value = value.trim();
        match key.trim() {
            "alphabet" => alphabet = Some(value.parse::<usize>().map_err(|_| invalid(format!("bad alphabet `{value}`")))?),
            "dim" => dim = Some(value.parse::<usize>().map_err(|_| invalid(format!("bad dim `{value}`")))?),
            "name" => name = Some(value.to_string()),
            other => return Err(invalid(format!("unknown header field `{other}`"))),
        }
    }
    let k = alphabet.ok_or_else(|| invalid("header is missing alphabet="))?;
    let body: Vec<&str> = lines.collect();
    let is_edge = |l: &&str| l.contains("->") && !l.contains("cells=");
    let shift = if body.is_empty() {
        Subshift::full(k, dim.unwrap_or(1))?
    } else if body.iter().all(is_edge) {
        if dim.is_some_and(|d| d != 1) {
            return Err(invalid("sofic shifts are one-dimensional"));
        }
        let mut named: Vec<(String, Symbol, String)> = Vec::new();
        for line in &body {
            named.push(parse_edge(line)?);
        }
        let triples: Vec<(&str, Symbol, &str)> = named.iter().map(|(s, a, t)| (s.as_str(), *a, t.as_str())).collect();
        Subshift::sofic(k, LabeledGraph::from_named_edges(&triples))?
    } else if body.iter().any(is_edge) {
        return Err(invalid("a description mixes sofic edges and forbidden patterns"));
    } else {
        let patterns = body.iter().map(|l| l.parse::<Pattern>()).collect::<Result<Vec<_>>>()?;
        let d = dim.or_else(|| patterns.first().map(Pattern::dim)).unwrap_or(1);
        Subshift::sft(k, d, patterns)?
    };
    Ok(match name {
        Some(n) => shift.with_name(n),
        None => shift,
    })
}

fn parse_edge(line: &str) -> Result<(String, Symbol, String)> {
    let bad = || invalid(format!("edge `{line}` is not `src -label-> dst`"));
    let (left, dst) = line.split_once("->").ok_or_else(bad)?;
    let (src, label) = left.trim_end().rsplit_once('-').ok_or_else(bad)?;
    let label: Symbol = label.trim().parse().map_err(|_| bad())?;
    let (src, dst) = (src.trim(), dst.trim());
    if src.is_empty() || dst.is_empty() || src.contains(char::is_whitespace) || dst.contains(char::is_whitespace) {
        return Err(bad());
    }
    Ok((src.to_string(), label, dst.to_string()))
}

pub(super) fn write_subshift(x: &Subshift, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    write!(f, "alphabet={}; dim={}", x.alphabet_size(), x.dim())?;
    if let Some(n) = x.name() {
        write!(f, "; name={n}")?;
    }
    writeln!(f)?;
    match x.kind() {
        ShiftKind::Full => Ok(()),
        ShiftKind::Sft { forbidden } => forbidden.iter().try_for_each(|p| writeln!(f, "{p}")),
        ShiftKind::Sofic { graph } => graph.edges().iter().try_for_each(|&LabeledEdge { source, target, label }| {
            writeln!(f, "{} -{label}-> {}", graph.vertices()[source], graph.vertices()[target])
        }),
    }
}
