//! Two-dimensional SFTs restricted to horizontal strips.
//!
//! A box window with rows `y0..=y1` is padded by `r` rows on each side,
//! where `r + 1` is the tallest forbidden pattern. Configurations of the
//! padded strip avoiding all forbidden patterns that fit inside it form a
//! one-dimensional SFT over the alphabet of allowed columns. A pattern is
//! reported as allowed when it extends to a point of that strip; this is
//! an over-approximation of extendability to the whole plane.

use std::collections::{BTreeSet, HashMap};

use super::{ShiftKind, Subshift};
use crate::capacity;
use crate::error::{capacity as cap_err, invalid, Result};
use crate::lattice::{Pattern, Symbol, Window};

struct Shape {
    cells: Vec<(usize, usize)>,
    symbols: Vec<Symbol>,
    width: usize,
    height: usize,
}

struct StripGraph {
    height: usize,
    /// Row index of window row `y0` inside the strip.
    pad: usize,
    columns: Vec<Vec<Symbol>>,
    /// `succ[v]` lists `(column, target)`.
    succ: Vec<Vec<(usize, usize)>>,
}

fn shapes(shift: &Subshift) -> Vec<Shape> {
    let forbidden: &[Pattern] = match shift.kind() {
        ShiftKind::Sft { forbidden } => forbidden,
        _ => &[],
    };
    forbidden
        .iter()
        .map(|p| {
            let (lo, hi) = p.window().bounds().expect("nonempty forbidden pattern");
            Shape {
                cells: p.window().cells().map(|c| ((c[0] - lo[0]) as usize, (c[1] - lo[1]) as usize)).collect(),
                symbols: p.symbols().to_vec(),
                width: (hi[0] - lo[0] + 1) as usize,
                height: (hi[1] - lo[1] + 1) as usize,
            }
        })
        .collect()
}

/// Does a forbidden pattern occur in `cols` with its right edge on the last column?
fn ends_badly(shapes: &[Shape], cols: &[&[Symbol]], height: usize) -> bool {
    shapes.iter().any(|s| {
        s.width <= cols.len()
            && s.height <= height
            && (0..=height - s.height).any(|dy| {
                let base = cols.len() - s.width;
                s.cells.iter().zip(&s.symbols).all(|(&(x, y), &a)| cols[base + x][y + dy] == a)
            })
    })
}

impl StripGraph {
    fn build(shift: &Subshift, rows: usize, strip_bound: usize) -> Result<Self> {
        if rows > strip_bound {
            return Err(cap_err(format!("window height {rows} exceeds the strip bound {strip_bound}")));
        }
        let shapes = shapes(shift);
        let pad = shapes.iter().map(|s| s.height).max().unwrap_or(1) - 1;
        let height = rows + 2 * pad;
        let mw = shapes.iter().map(|s| s.width).max().unwrap_or(1);
        let k = shift.alphabet_size();
        let limit = capacity::limit();
        if (k as f64).powi(height as i32) > limit as f64 {
            return Err(cap_err(format!("{k}^{height} strip columns exceed the capacity limit {limit}")));
        }
        let mut columns = Vec::new();
        let total = k.pow(height as u32);
        for mut code in 0..total {
            let mut col = vec![0 as Symbol; height];
            for c in col.iter_mut() {
                *c = (code % k) as Symbol;
                code /= k;
            }
            if !ends_badly(&shapes, &[&col], height) {
                columns.push(col);
            }
        }
        // Vertices: allowed sequences of `mw - 1` columns (one dummy vertex when mw = 1).
        let mut vertices: Vec<Vec<usize>> = Vec::new();
        let mut stack = vec![Vec::new()];
        while let Some(seq) = stack.pop() {
            if seq.len() + 1 >= mw {
                if vertices.len() >= limit {
                    return Err(cap_err("strip transfer graph exceeds the capacity limit"));
                }
                vertices.push(seq);
                continue;
            }
            for c in 0..columns.len() {
                let mut next: Vec<usize> = seq.clone();
                next.push(c);
                let cols: Vec<&[Symbol]> = next.iter().map(|&i| columns[i].as_slice()).collect();
                if !ends_badly(&shapes, &cols, height) {
                    stack.push(next);
                }
            }
        }
        let index: HashMap<Vec<usize>, usize> = vertices.iter().cloned().enumerate().map(|(i, v)| (v, i)).collect();
        let mut succ = vec![Vec::new(); vertices.len()];
        for (i, v) in vertices.iter().enumerate() {
            for c in 0..columns.len() {
                let mut seq = v.clone();
                seq.push(c);
                let cols: Vec<&[Symbol]> = seq.iter().map(|&j| columns[j].as_slice()).collect();
                if ends_badly(&shapes, &cols, height) {
                    continue;
                }
                if let Some(&t) = index.get(&seq[1..]) {
                    succ[i].push((c, t));
                }
            }
        }
        let mut g = StripGraph { height, pad, columns, succ };
        g.trim();
        Ok(g)
    }

    /// Removes edges touching vertices that do not lie on a bi-infinite path.
    fn trim(&mut self) {
        let n = self.succ.len();
        let mut alive = vec![true; n];
        loop {
            let mut indeg = vec![0usize; n];
            let mut outdeg = vec![0usize; n];
            for (v, es) in self.succ.iter().enumerate() {
                if !alive[v] {
                    continue;
                }
                for &(_, t) in es {
                    if alive[t] {
                        outdeg[v] += 1;
                        indeg[t] += 1;
                    }
                }
            }
            let mut changed = false;
            for v in 0..n {
                if alive[v] && (indeg[v] == 0 || outdeg[v] == 0) {
                    alive[v] = false;
                    changed = true;
                }
            }
            if !changed {
                break;
            }
        }
        for (v, es) in self.succ.iter_mut().enumerate() {
            if alive[v] {
                es.retain(|&(_, t)| alive[t]);
            } else {
                es.clear();
            }
        }
    }

    fn start(&self) -> Vec<usize> {
        (0..self.succ.len()).filter(|&v| !self.succ[v].is_empty()).collect()
    }

    /// Advances the vertex set by one column, keeping only columns whose
    /// window rows pass `keep`. Results are grouped by projected column.
    fn step(&self, set: &[usize], keep: impl Fn(&[Symbol]) -> bool) -> Vec<(Vec<Symbol>, Vec<usize>)> {
        let mut groups: std::collections::BTreeMap<Vec<Symbol>, BTreeSet<usize>> = Default::default();
        for &v in set {
            for &(c, t) in &self.succ[v] {
                let col = &self.columns[c];
                let proj = &col[self.pad..self.height - self.pad];
                if keep(proj) {
                    groups.entry(proj.to_vec()).or_default().insert(t);
                }
            }
        }
        groups.into_iter().map(|(k, s)| (k, s.into_iter().collect())).collect()
    }
}

/// Patterns on `w` (through its bounding box) that extend to the padded strip.
pub(super) fn language(shift: &Subshift, w: &Window, strip_bound: usize) -> Result<Vec<Pattern>> {
    let Some((lo, hi)) = w.bounds() else {
        return Ok(vec![Pattern::new(w.clone(), Vec::new())?]);
    };
    let rows = (hi[1] - lo[1] + 1) as usize;
    let g = StripGraph::build(shift, rows, strip_bound)?;
    let limit = capacity::limit();
    let mut found: BTreeSet<Vec<Vec<Symbol>>> = BTreeSet::new();
    let mut cols = Vec::new();
    walk(&g, &g.start(), lo[0], hi[0], &mut cols, &mut |cols: &[Vec<Symbol>]| {
        found.insert(cols.to_vec());
        if found.len() > limit {
            return Err(cap_err(format!("language exceeds {limit} patterns")));
        }
        Ok(())
    })?;
    let mut out: BTreeSet<Pattern> = BTreeSet::new();
    for cols in found {
        let pairs = w
            .cells()
            .map(|c| (c, cols[(c[0] - lo[0]) as usize][(c[1] - lo[1]) as usize]))
            .collect();
        out.insert(Pattern::from_assignments(2, pairs)?);
    }
    Ok(out.into_iter().collect())
}

fn walk(
    g: &StripGraph,
    set: &[usize],
    x: i64,
    x_end: i64,
    cols: &mut Vec<Vec<Symbol>>,
    emit: &mut dyn FnMut(&[Vec<Symbol>]) -> Result<()>,
) -> Result<()> {
    if x > x_end {
        return emit(cols);
    }
    for (col, next) in g.step(set, |_| true) {
        cols.push(col);
        walk(g, &next, x + 1, x_end, cols, emit)?;
        cols.pop();
    }
    Ok(())
}

/// Whether `p` extends to the padded strip around its bounding box.
pub(super) fn allows(shift: &Subshift, p: &Pattern) -> Result<bool> {
    let (lo, hi) = p.window().bounds().ok_or_else(|| invalid("empty pattern"))?;
    let rows = (hi[1] - lo[1] + 1) as usize;
    let g = StripGraph::build(shift, rows, capacity::DEFAULT_STRIP_HEIGHT)?;
    let mut set = g.start();
    for x in lo[0]..=hi[0] {
        let keep = |col: &[Symbol]| {
            (lo[1]..=hi[1]).all(|y| p.get([x, y]).is_none_or(|a| col[(y - lo[1]) as usize] == a))
        };
        let mut next: BTreeSet<usize> = BTreeSet::new();
        for (_, s) in g.step(&set, keep) {
            next.extend(s);
        }
        if next.is_empty() {
            return Ok(false);
        }
        set = next.into_iter().collect();
    }
    Ok(!set.is_empty())
}
