//! Finite geometry of ℤ and ℤ²: windows, patterns and the two finitely
//! representable kinds of configuration.
//!
//! Cells are stored as `[i64; 2]`; in dimension one the second coordinate is
//! always zero. Windows keep their cells in lexicographic order, and a
//! pattern's symbols are aligned with that order, so equality and hashing of
//! patterns only depend on the canonical form.

use std::cmp::Ordering;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::str::FromStr;

use crate::error::{invalid, EdenError, Result};

/// Alphabet index.
pub type Symbol = u8;

/// A lattice point. Dimension-one cells use `[n, 0]`.
pub type Cell = [i64; 2];

fn check_dim(dim: usize) -> Result<()> {
    if dim == 1 || dim == 2 {
        Ok(())
    } else {
        Err(invalid(format!("dimension {dim} is not supported (only 1 and 2)")))
    }
}

fn cell_from_slice(dim: usize, v: &[i64]) -> Result<Cell> {
    if v.len() != dim {
        return Err(invalid(format!(
            "vector {v:?} has {} components, expected {dim}",
            v.len()
        )));
    }
    Ok(if dim == 1 { [v[0], 0] } else { [v[0], v[1]] })
}

#[derive(Clone, Debug)]
enum Shape {
    /// Inclusive corners, `lo <= hi` componentwise.
    Box { lo: Cell, hi: Cell },
    /// Sorted and deduplicated.
    Cells(Vec<Cell>),
}

/// A finite set of lattice cells.
#[derive(Clone, Debug)]
pub struct Window {
    dim: usize,
    shape: Shape,
}

impl Window {
    pub fn empty(dim: usize) -> Self {
        Window { dim, shape: Shape::Cells(Vec::new()) }
    }

    /// The one-dimensional interval `{lo, ..., hi}` (empty when `lo > hi`).
    pub fn interval(lo: i64, hi: i64) -> Self {
        if lo > hi {
            return Window::empty(1);
        }
        Window { dim: 1, shape: Shape::Box { lo: [lo, 0], hi: [hi, 0] } }
    }

    /// A box `[lo, hi]` in dimension `dim` (inclusive corners).
    pub fn rect(dim: usize, lo: &[i64], hi: &[i64]) -> Result<Self> {
        check_dim(dim)?;
        let lo = cell_from_slice(dim, lo)?;
        let hi = cell_from_slice(dim, hi)?;
        if lo[0] > hi[0] || lo[1] > hi[1] {
            return Ok(Window::empty(dim));
        }
        Ok(Window { dim, shape: Shape::Box { lo, hi } })
    }

    pub fn from_cells<I>(dim: usize, cells: I) -> Result<Self>
    where
        I: IntoIterator<Item = Cell>,
    {
        check_dim(dim)?;
        let mut v: Vec<Cell> = cells.into_iter().collect();
        if dim == 1 && v.iter().any(|c| c[1] != 0) {
            return Err(invalid("one-dimensional cells must have zero second coordinate"));
        }
        v.sort_unstable();
        v.dedup();
        Ok(Window { dim, shape: Shape::Cells(v) })
    }

    /// Convenience for one-dimensional windows given by their coordinates.
    pub fn from_points(points: &[i64]) -> Self {
        Window::from_cells(1, points.iter().map(|&p| [p, 0])).expect("dimension one is valid")
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        match &self.shape {
            Shape::Box { lo, hi } => ((hi[0] - lo[0] + 1) * (hi[1] - lo[1] + 1)) as usize,
            Shape::Cells(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn is_box(&self) -> bool {
        matches!(self.shape, Shape::Box { .. })
    }

    /// Cells in canonical (lexicographic) order. Boxes are enumerated lazily.
    pub fn cells(&self) -> Cells<'_> {
        Cells { window: self, next: 0 }
    }

    fn nth_cell(&self, i: usize) -> Cell {
        match &self.shape {
            Shape::Box { lo, hi } => {
                let h = (hi[1] - lo[1] + 1) as usize;
                [lo[0] + (i / h) as i64, lo[1] + (i % h) as i64]
            }
            Shape::Cells(v) => v[i],
        }
    }

    /// Position of `cell` in canonical order.
    pub fn index_of(&self, cell: Cell) -> Option<usize> {
        match &self.shape {
            Shape::Box { lo, hi } => {
                if cell[0] < lo[0] || cell[0] > hi[0] || cell[1] < lo[1] || cell[1] > hi[1] {
                    return None;
                }
                let h = hi[1] - lo[1] + 1;
                Some(((cell[0] - lo[0]) * h + (cell[1] - lo[1])) as usize)
            }
            Shape::Cells(v) => v.binary_search(&cell).ok(),
        }
    }

    pub fn contains(&self, cell: Cell) -> bool {
        self.index_of(cell).is_some()
    }

    /// Smallest box containing the window, as inclusive corners.
    pub fn bounds(&self) -> Option<(Cell, Cell)> {
        match &self.shape {
            Shape::Box { lo, hi } => Some((*lo, *hi)),
            Shape::Cells(v) if v.is_empty() => None,
            Shape::Cells(v) => {
                let mut lo = v[0];
                let mut hi = v[0];
                for c in v {
                    for k in 0..2 {
                        lo[k] = lo[k].min(c[k]);
                        hi[k] = hi[k].max(c[k]);
                    }
                }
                Some((lo, hi))
            }
        }
    }

    /// `Some((lo, hi))` when this is a nonempty one-dimensional interval.
    pub fn as_interval(&self) -> Option<(i64, i64)> {
        if self.dim != 1 || self.is_empty() {
            return None;
        }
        let (lo, hi) = self.bounds()?;
        if (hi[0] - lo[0] + 1) as usize == self.len() {
            Some((lo[0], hi[0]))
        } else {
            None
        }
    }

    pub fn translate(&self, v: &[i64]) -> Result<Window> {
        let d = cell_from_slice(self.dim, v)?;
        Ok(self.shifted(d))
    }

    pub(crate) fn shifted(&self, d: Cell) -> Window {
        let shape = match &self.shape {
            Shape::Box { lo, hi } => Shape::Box {
                lo: [lo[0] + d[0], lo[1] + d[1]],
                hi: [hi[0] + d[0], hi[1] + d[1]],
            },
            Shape::Cells(v) => Shape::Cells(v.iter().map(|c| [c[0] + d[0], c[1] + d[1]]).collect()),
        };
        Window { dim: self.dim, shape }
    }

    /// Minkowski sum `{a + b : a ∈ self, b ∈ other}`.
    pub fn sum(&self, other: &Window) -> Result<Window> {
        if self.dim != other.dim {
            return Err(invalid("window dimensions differ"));
        }
        if let (Shape::Box { lo: a, hi: b }, Shape::Box { lo: c, hi: d }) = (&self.shape, &other.shape) {
            return Ok(Window {
                dim: self.dim,
                shape: Shape::Box { lo: [a[0] + c[0], a[1] + c[1]], hi: [b[0] + d[0], b[1] + d[1]] },
            });
        }
        let mut cells = Vec::with_capacity(self.len() * other.len());
        for a in self.cells() {
            for b in other.cells() {
                cells.push([a[0] + b[0], a[1] + b[1]]);
            }
        }
        Window::from_cells(self.dim, cells)
    }

    pub fn union(&self, other: &Window) -> Result<Window> {
        if self.dim != other.dim {
            return Err(invalid("window dimensions differ"));
        }
        Window::from_cells(self.dim, self.cells().chain(other.cells()))
    }

    pub fn difference(&self, other: &Window) -> Window {
        let cells: Vec<Cell> = self.cells().filter(|c| !other.contains(*c)).collect();
        Window { dim: self.dim, shape: Shape::Cells(cells) }
    }

    /// Negated cells, `{-c : c ∈ self}`.
    pub fn reflect(&self) -> Window {
        let cells: Vec<Cell> = self.cells().map(|c| [-c[0], -c[1]]).collect();
        Window::from_cells(self.dim, cells).expect("same dimension")
    }
}

impl PartialEq for Window {
    fn eq(&self, other: &Self) -> bool {
        self.dim == other.dim && self.len() == other.len() && self.cells().eq(other.cells())
    }
}

impl Eq for Window {}

impl Hash for Window {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.dim.hash(state);
        self.len().hash(state);
        for c in self.cells() {
            c.hash(state);
        }
    }
}

impl PartialOrd for Window {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Window {
    fn cmp(&self, other: &Self) -> Ordering {
        self.dim.cmp(&other.dim).then_with(|| self.cells().cmp(other.cells()))
    }
}

pub struct Cells<'a> {
    window: &'a Window,
    next: usize,
}

impl Iterator for Cells<'_> {
    type Item = Cell;

    fn next(&mut self) -> Option<Cell> {
        if self.next >= self.window.len() {
            return None;
        }
        let c = self.window.nth_cell(self.next);
        self.next += 1;
        Some(c)
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let rest = self.window.len() - self.next;
        (rest, Some(rest))
    }
}

impl ExactSizeIterator for Cells<'_> {}

/// The Følner box `[-n, n]^d`.
pub fn folner_box(n: u64, dim: usize) -> Result<Window> {
    let n = n as i64;
    Window::rect(dim, &vec![-n; dim], &vec![n; dim])
}

/// Radius of the box returned by [`metric_window`]: `⌈log₂(1/eps)⌉`.
pub fn metric_radius(eps: f64) -> Result<u32> {
    if !(eps > 0.0 && eps <= 1.0) {
        return Err(invalid(format!("tolerance {eps} is outside (0, 1]")));
    }
    let r = (1.0 / eps).log2();
    // Exact powers of two must not round up because of the logarithm.
    let rounded = r.round();
    let m = if (r - rounded).abs() < 1e-12 { rounded } else { r.ceil() };
    Ok(m as u32)
}

/// Box `[-m, m]^d` such that agreement on it gives `ρ ≤ eps` under
/// `ρ(x, y) = 2^{-min{‖n‖∞ : x_n ≠ y_n}}`, and `ρ ≤ eps/2` forces agreement.
pub fn metric_window(eps: f64, dim: usize) -> Result<Window> {
    let m = metric_radius(eps)?;
    folner_box(m as u64, dim)
}

/// Symbols on a window, aligned with the window's canonical cell order.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Pattern {
    window: Window,
    symbols: Vec<Symbol>,
}

impl Pattern {
    pub fn new(window: Window, symbols: Vec<Symbol>) -> Result<Self> {
        if window.len() != symbols.len() {
            return Err(invalid(format!(
                "pattern has {} symbols for a window of {} cells",
                symbols.len(),
                window.len()
            )));
        }
        Ok(Pattern { window, symbols })
    }

    /// One-dimensional word placed on `{start, ..., start + len - 1}`.
    pub fn word(start: i64, symbols: &[Symbol]) -> Self {
        Pattern {
            window: Window::interval(start, start + symbols.len() as i64 - 1),
            symbols: symbols.to_vec(),
        }
    }

    /// Builds a pattern from `(cell, symbol)` pairs in any order.
    pub fn from_assignments(dim: usize, mut pairs: Vec<(Cell, Symbol)>) -> Result<Self> {
        pairs.sort_unstable_by_key(|p| p.0);
        for w in pairs.windows(2) {
            if w[0].0 == w[1].0 {
                return Err(invalid(format!("cell {:?} assigned twice", w[0].0)));
            }
        }
        let window = Window::from_cells(dim, pairs.iter().map(|p| p.0))?;
        let symbols = pairs.into_iter().map(|p| p.1).collect();
        Ok(Pattern { window, symbols })
    }

    pub fn window(&self) -> &Window {
        &self.window
    }

    pub fn symbols(&self) -> &[Symbol] {
        &self.symbols
    }

    pub fn dim(&self) -> usize {
        self.window.dim()
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn get(&self, cell: Cell) -> Option<Symbol> {
        self.window.index_of(cell).map(|i| self.symbols[i])
    }

    pub fn iter(&self) -> impl Iterator<Item = (Cell, Symbol)> + '_ {
        self.window.cells().zip(self.symbols.iter().copied())
    }

    /// The symbols as a word when the window is a one-dimensional interval.
    pub fn as_word(&self) -> Option<(i64, &[Symbol])> {
        self.window.as_interval().map(|(lo, _)| (lo, self.symbols.as_slice()))
    }

    pub fn translate(&self, v: &[i64]) -> Result<Pattern> {
        Ok(Pattern { window: self.window.translate(v)?, symbols: self.symbols.clone() })
    }

    pub(crate) fn shifted(&self, d: Cell) -> Pattern {
        Pattern { window: self.window.shifted(d), symbols: self.symbols.clone() }
    }

    /// Restriction to `sub`, which must be contained in this pattern's window.
    pub fn restrict(&self, sub: &Window) -> Result<Pattern> {
        let symbols = sub
            .cells()
            .map(|c| self.get(c).ok_or_else(|| invalid(format!("cell {c:?} outside pattern"))))
            .collect::<Result<Vec<_>>>()?;
        Ok(Pattern { window: sub.clone(), symbols })
    }

    pub fn max_symbol(&self) -> Option<Symbol> {
        self.symbols.iter().copied().max()
    }
}

fn fmt_cell(f: &mut fmt::Formatter<'_>, dim: usize, c: Cell) -> fmt::Result {
    if dim == 1 {
        write!(f, "({})", c[0])
    } else {
        write!(f, "({},{})", c[0], c[1])
    }
}

fn fmt_cells(f: &mut fmt::Formatter<'_>, p: &Pattern) -> fmt::Result {
    write!(f, "cells=")?;
    for (i, (c, s)) in p.iter().enumerate() {
        if i > 0 {
            write!(f, ",")?;
        }
        fmt_cell(f, p.dim(), c)?;
        write!(f, ":{s}")?;
    }
    Ok(())
}

impl fmt::Display for Pattern {
    /// `dim=<d>; cells=(v1):s1,(v2):s2,...`
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "dim={}; ", self.dim())?;
        fmt_cells(f, self)
    }
}

/// Splits `k=v; k=v; ...` into pairs.
fn split_fields(s: &str) -> Result<Vec<(&str, &str)>> {
    s.split(';')
        .map(str::trim)
        .filter(|f| !f.is_empty())
        .map(|f| {
            f.split_once('=')
                .map(|(k, v)| (k.trim(), v.trim()))
                .ok_or_else(|| invalid(format!("expected key=value, got {f:?}")))
        })
        .collect()
}

pub(crate) fn parse_vector(s: &str) -> Result<Vec<i64>> {
    let inner = s
        .trim()
        .strip_prefix('(')
        .and_then(|r| r.strip_suffix(')'))
        .ok_or_else(|| invalid(format!("expected (..) vector, got {s:?}")))?;
    inner
        .split(',')
        .map(|x| x.trim().parse::<i64>().map_err(|e| invalid(format!("bad coordinate {x:?}: {e}"))))
        .collect()
}

/// Parses `(v):s,(v):s,...`; an empty string yields no cells.
fn parse_cell_list(dim: usize, s: &str) -> Result<Vec<(Cell, Symbol)>> {
    let s = s.trim();
    let s = s.strip_prefix('<').and_then(|r| r.strip_suffix('>')).unwrap_or(s);
    let mut out = Vec::new();
    let mut rest = s.trim();
    while !rest.is_empty() {
        let close = rest.find(')').ok_or_else(|| invalid(format!("unterminated cell in {rest:?}")))?;
        let v = parse_vector(&rest[..=close])?;
        let cell = cell_from_slice(dim, &v)?;
        let after = rest[close + 1..].trim_start();
        let after = after
            .strip_prefix(':')
            .ok_or_else(|| invalid(format!("expected ':' after cell in {rest:?}")))?;
        let end = after.find(',').unwrap_or(after.len());
        let sym: Symbol = after[..end]
            .trim()
            .parse()
            .map_err(|e| invalid(format!("bad symbol {:?}: {e}", &after[..end])))?;
        out.push((cell, sym));
        rest = after[end..].trim_start_matches(',').trim();
    }
    Ok(out)
}

fn parse_dim(v: &str) -> Result<usize> {
    let d: usize = v.parse().map_err(|e| invalid(format!("bad dim {v:?}: {e}")))?;
    check_dim(d)?;
    Ok(d)
}

impl FromStr for Pattern {
    type Err = EdenError;

    fn from_str(s: &str) -> Result<Self> {
        let fields = split_fields(s)?;
        let mut dim = None;
        let mut cells = None;
        for (k, v) in fields {
            match k {
                "dim" => dim = Some(parse_dim(v)?),
                "cells" => cells = Some(v),
                other => return Err(invalid(format!("unknown pattern field {other:?}"))),
            }
        }
        let dim = dim.ok_or_else(|| invalid("pattern is missing dim="))?;
        let cells = cells.ok_or_else(|| invalid("pattern is missing cells="))?;
        Pattern::from_assignments(dim, parse_cell_list(dim, cells)?)
    }
}

/// A configuration of `A^{ℤ^d}` with a finite description.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Configuration {
    /// `x_v = symbols[v mod period]`; the fundamental domain
    /// `[0, p₀) × [0, p₁)` is stored in canonical cell order.
    Periodic { dim: usize, period: Cell, symbols: Vec<Symbol> },
    /// Constant `background` except on the exceptional pattern.
    FiniteSupport { dim: usize, background: Symbol, exceptions: Pattern },
}

impl Configuration {
    pub fn periodic(dim: usize, period: &[i64], symbols: Vec<Symbol>) -> Result<Self> {
        check_dim(dim)?;
        let mut p = cell_from_slice(dim, period)?;
        if dim == 1 {
            p[1] = 1;
        }
        if p[0] < 1 || p[1] < 1 {
            return Err(invalid(format!("period components must be ≥ 1, got {period:?}")));
        }
        if (p[0] * p[1]) as usize != symbols.len() {
            return Err(invalid(format!(
                "fundamental domain needs {} symbols, got {}",
                p[0] * p[1],
                symbols.len()
            )));
        }
        Ok(Configuration::Periodic { dim, period: p, symbols })
    }

    /// One-dimensional periodic point `...uuu...` with `u` starting at 0.
    pub fn periodic_word(u: &[Symbol]) -> Result<Self> {
        Configuration::periodic(1, &[u.len() as i64], u.to_vec())
    }

    /// Exceptional cells equal to the background are dropped.
    pub fn finite_support(background: Symbol, exceptions: Pattern) -> Self {
        let dim = exceptions.dim();
        let kept: Vec<(Cell, Symbol)> = exceptions.iter().filter(|&(_, s)| s != background).collect();
        let exceptions = Pattern::from_assignments(dim, kept).expect("cells come from a window");
        Configuration::FiniteSupport { dim, background, exceptions }
    }

    pub fn constant(dim: usize, symbol: Symbol) -> Self {
        Configuration::FiniteSupport {
            dim,
            background: symbol,
            exceptions: Pattern::new(Window::empty(dim), Vec::new()).expect("empty"),
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            Configuration::Periodic { dim, .. } | Configuration::FiniteSupport { dim, .. } => *dim,
        }
    }

    pub fn at(&self, cell: Cell) -> Symbol {
        match self {
            Configuration::Periodic { period, symbols, .. } => {
                let a = cell[0].rem_euclid(period[0]);
                let b = cell[1].rem_euclid(period[1]);
                symbols[(a * period[1] + b) as usize]
            }
            Configuration::FiniteSupport { background, exceptions, .. } => {
                exceptions.get(cell).unwrap_or(*background)
            }
        }
    }

    /// Restriction to a window.
    pub fn restrict(&self, w: &Window) -> Pattern {
        let symbols = w.cells().map(|c| self.at(c)).collect();
        Pattern::new(w.clone(), symbols).expect("aligned")
    }

    /// Shift by `v`: `(σ_v x)_c = x_{c - v}`, so a pattern at `c` moves to `c + v`.
    pub fn translate(&self, v: &[i64]) -> Result<Configuration> {
        let d = cell_from_slice(self.dim(), v)?;
        Ok(match self {
            Configuration::Periodic { dim, period, .. } => {
                let w = Window::rect(2, &[0, 0], &[period[0] - 1, period[1] - 1])?;
                let symbols = w.cells().map(|c| self.at([c[0] - d[0], c[1] - d[1]])).collect();
                Configuration::Periodic { dim: *dim, period: *period, symbols }
            }
            Configuration::FiniteSupport { dim, background, exceptions } => Configuration::FiniteSupport {
                dim: *dim,
                background: *background,
                exceptions: exceptions.shifted(d),
            },
        })
    }

    pub fn max_symbol(&self) -> Symbol {
        match self {
            Configuration::Periodic { symbols, .. } => symbols.iter().copied().max().unwrap_or(0),
            Configuration::FiniteSupport { background, exceptions, .. } => {
                exceptions.max_symbol().unwrap_or(0).max(*background)
            }
        }
    }
}

impl fmt::Display for Configuration {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Configuration::Periodic { dim, period, symbols } => {
                if *dim == 1 {
                    write!(f, "dim=1; period=({}); cells=", period[0])?;
                } else {
                    write!(f, "dim=2; period=({},{}); cells=", period[0], period[1])?;
                }
                let w = Window::rect(2, &[0, 0], &[period[0] - 1, period[1] - 1]).expect("valid box");
                for (i, (c, s)) in w.cells().zip(symbols).enumerate() {
                    if i > 0 {
                        write!(f, ",")?;
                    }
                    fmt_cell(f, *dim, c)?;
                    write!(f, ":{s}")?;
                }
                Ok(())
            }
            Configuration::FiniteSupport { dim, background, exceptions } => {
                write!(f, "dim={dim}; background={background}; ")?;
                fmt_cells(f, exceptions)
            }
        }
    }
}

impl FromStr for Configuration {
    type Err = EdenError;

    fn from_str(s: &str) -> Result<Self> {
        let fields = split_fields(s)?;
        let (mut dim, mut period, mut background, mut cells) = (None, None, None, None);
        for (k, v) in fields {
            match k {
                "dim" => dim = Some(parse_dim(v)?),
                "period" => period = Some(parse_vector(v)?),
                "background" => {
                    background = Some(v.parse::<Symbol>().map_err(|e| invalid(format!("bad background: {e}")))?)
                }
                "cells" => cells = Some(v),
                other => return Err(invalid(format!("unknown configuration field {other:?}"))),
            }
        }
        let dim = dim.ok_or_else(|| invalid("configuration is missing dim="))?;
        let assignments = parse_cell_list(dim, cells.unwrap_or(""))?;
        match (period, background) {
            (Some(p), None) => {
                let mut pc = cell_from_slice(dim, &p)?;
                if dim == 1 {
                    pc[1] = 1;
                }
                if pc[0] < 1 || pc[1] < 1 {
                    return Err(invalid("period components must be ≥ 1"));
                }
                let dom = Window::rect(2, &[0, 0], &[pc[0] - 1, pc[1] - 1])?;
                let pat = Pattern::from_assignments(2, assignments)?;
                if pat.window() != &dom {
                    return Err(invalid("periodic cells must cover the fundamental domain exactly"));
                }
                Configuration::periodic(dim, &p, pat.symbols().to_vec())
            }
            (None, Some(b)) => Ok(Configuration::finite_support(b, Pattern::from_assignments(dim, assignments)?)),
            _ => Err(invalid("configuration needs exactly one of period= or background=")),
        }
    }
}

impl serde::Serialize for Window {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let d = self.dim();
        s.collect_seq(self.cells().map(|c| c[..d].to_vec()))
    }
}

impl serde::Serialize for Pattern {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl serde::Serialize for Configuration {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn translate_examples() {
        let p = Pattern::word(0, &[0, 1]);
        assert_eq!(p.translate(&[0]).unwrap(), p);
        let q = Pattern::word(0, &[0]).translate(&[3]).unwrap();
        assert_eq!(q.window(), &Window::from_points(&[3]));
        let r = Pattern::from_assignments(2, vec![([0, 0], 1), ([1, 0], 0)]).unwrap();
        let moved = r.translate(&[0, 2]).unwrap();
        assert_eq!(moved.get([0, 2]), Some(1));
        assert_eq!(moved.get([1, 2]), Some(0));
        assert!(r.translate(&[1]).is_err());
    }

    #[test]
    fn folner_boxes() {
        assert_eq!(folner_box(0, 1).unwrap().len(), 1);
        assert_eq!(folner_box(2, 1).unwrap(), Window::interval(-2, 2));
        assert_eq!(folner_box(1, 2).unwrap().len(), 9);
    }

    /// Direct evaluation of `ρ(x, y) = 2^{-min‖n‖∞}` for two configurations
    /// that first differ at sup-norm `k`.
    fn rho_first_difference(k: u32) -> f64 {
        2f64.powi(-(k as i32))
    }

    #[test]
    fn metric_windows() {
        assert_eq!(metric_window(1.0, 1).unwrap(), Window::interval(0, 0));
        // Configurations agreeing on {-3..3} first differ at 4: ρ = 1/16 ≤ 1/8.
        let w = metric_window(0.125, 1).unwrap();
        assert_eq!(w, Window::interval(-3, 3));
        assert!(rho_first_difference(4) <= 0.125);
        // ρ ≤ eps/2 = 1/16 means the first difference is at ≥ 4, i.e. agreement on {-3..3}.
        assert!(rho_first_difference(3) > 0.0625);
        assert_eq!(metric_window(0.25, 2).unwrap().len(), 25);
        assert!(metric_window(0.0, 1).is_err());
        assert!(metric_window(1.5, 1).is_err());
        assert_eq!(metric_radius(0.3).unwrap(), 2);
    }

    #[test]
    fn box_and_cells_are_interchangeable() {
        let a = Window::interval(-1, 1);
        let b = Window::from_points(&[1, -1, 0, 0]);
        assert_eq!(a, b);
        assert_eq!(a.index_of([1, 0]), b.index_of([1, 0]));
        assert_eq!(b.as_interval(), Some((-1, 1)));
        assert_eq!(Window::from_points(&[0, 2]).as_interval(), None);
    }

    #[test]
    fn pattern_text_round_trip() {
        let p: Pattern = "dim=2; cells=(1,0):1,(0,0):0".parse().unwrap();
        assert_eq!(p.to_string(), "dim=2; cells=(0,0):0,(1,0):1");
        assert_eq!(p.to_string().parse::<Pattern>().unwrap(), p);
        let w: Pattern = "dim=1; cells=<(0):1,(1):1>".parse().unwrap();
        assert_eq!(w, Pattern::word(0, &[1, 1]));
        assert!("dim=1; cells=(0):1,(0):0".parse::<Pattern>().is_err());
        assert!("dim=3; cells=".parse::<Pattern>().is_err());
    }

    #[test]
    fn configuration_text_and_evaluation() {
        let x: Configuration = "dim=1; period=(2); cells=(0):0,(1):1".parse().unwrap();
        assert_eq!(x.at([-3, 0]), 1);
        assert_eq!(x.to_string().parse::<Configuration>().unwrap(), x);
        let y: Configuration = "dim=1; background=0; cells=(3):1,(4):0".parse().unwrap();
        assert_eq!(y.at([3, 0]), 1);
        assert_eq!(y.at([4, 0]), 0);
        if let Configuration::FiniteSupport { exceptions, .. } = &y {
            assert_eq!(exceptions.len(), 1);
        }
        let z: Configuration = "dim=2; period=(1,2); cells=(0,0):1,(0,1):0".parse().unwrap();
        assert_eq!(z.at([5, 3]), 0);
        assert!("dim=1; period=(0); cells=".parse::<Configuration>().is_err());
    }

    #[test]
    fn configuration_translate() {
        let x = Configuration::periodic_word(&[0, 0, 1]).unwrap();
        let y = x.translate(&[1]).unwrap();
        assert_eq!(y.at([0, 0]), 1);
        let f = Configuration::finite_support(0, Pattern::word(0, &[1]));
        assert_eq!(f.translate(&[2]).unwrap().at([2, 0]), 1);
    }

    #[test]
    fn folner_boundary_ratio_decreases() {
        for d in 1..=2usize {
            let k = folner_box(1, d).unwrap();
            let mut prev = f64::INFINITY;
            for n in 1..=6u64 {
                let f = folner_box(n, d).unwrap();
                let kf = k.sum(&f).unwrap();
                let sym = kf.difference(&f).len() + f.difference(&kf).len();
                let ratio = sym as f64 / f.len() as f64;
                let side = (2 * n + 1) as f64;
                let bound = 2.0 * d as f64 * side.powi(d as i32 - 1) * 2.0 / side.powi(d as i32);
                assert!(ratio <= bound + 1e-12, "d={d} n={n}: {ratio} > {bound}");
                assert!(ratio < prev);
                prev = ratio;
            }
        }
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn translate_inverts(cells in proptest::collection::btree_map((-5i64..5, -5i64..5), 0u8..3, 1..8),
                                 v in (-10i64..10, -10i64..10)) {
                let p = Pattern::from_assignments(2, cells.into_iter().map(|((a, b), s)| ([a, b], s)).collect()).unwrap();
                let back = p.translate(&[v.0, v.1]).unwrap().translate(&[-v.0, -v.1]).unwrap();
                prop_assert_eq!(back, p);
            }

            #[test]
            fn metric_window_monotone(a in 1e-6f64..1.0, b in 1e-6f64..1.0) {
                let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
                let big = metric_window(lo, 1).unwrap();
                let small = metric_window(hi, 1).unwrap();
                prop_assert!(small.cells().all(|c| big.contains(c)));
            }
        }
    }
}
