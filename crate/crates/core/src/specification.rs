//! Strong irreducibility, weak specification and independence density for
//! one-dimensional subshifts.
//!
//! Gap convention: a gap `g` means any two allowed words glue with any fill
//! of at least `g` cells, i.e. windows at distance greater than `g`.

use std::collections::{HashMap, VecDeque};

use num_rational::Ratio;
use rayon::prelude::*;
use serde::Serialize;

use crate::capacity;
use crate::error::{capacity as cap_err, invalid, EdenError, Result};
use crate::lattice::{metric_radius, Cell, Pattern, Symbol, Window};
use crate::subshift::{BitSet, Nfa, ShiftKind, Subshift};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GluingCertificate {
    pub gap: usize,
    /// Every left and right context of the presentation is realized by a
    /// word of at most this length, so checking these words covers all.
    pub checked_length: usize,
    pub witness_policy: String,
}

/// Allowed words `left` and `right` that admit no fill of exactly `fill` cells.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GluingFailure {
    pub left: Vec<Symbol>,
    pub right: Vec<Symbol>,
    pub fill: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GapReport {
    pub certificate: Option<GluingCertificate>,
    /// Exact gap when finite, whether or not it is within the requested bound.
    pub exact_gap: Option<usize>,
    pub checked_length: usize,
    /// Empty on success; otherwise failing pairs with fill at least `max_gap`.
    pub failures: Vec<GluingFailure>,
}

/// Context sets of a right-resolving presentation: the terminal vertex
/// sets of left words and the initial vertex sets of right words, each
/// with a shortest word realizing it.
struct Contexts {
    left: Vec<(BitSet, Vec<Symbol>)>,
    right: Vec<(BitSet, Vec<Symbol>)>,
}

fn context_sets(g: &Nfa, forward: bool) -> Result<Vec<(BitSet, Vec<Symbol>)>> {
    let limit = capacity::limit();
    let start = BitSet::full(g.n);
    let mut seen: HashMap<BitSet, Vec<Symbol>> = HashMap::from([(start.clone(), Vec::new())]);
    let mut order = vec![start.clone()];
    let mut queue = VecDeque::from([start]);
    while let Some(s) = queue.pop_front() {
        for a in 0..g.k as Symbol {
            let t = if forward { g.step(&s, a) } else { g.step_back(&s, a) };
            if t.is_empty() || seen.contains_key(&t) {
                continue;
            }
            if seen.len() >= limit {
                return Err(cap_err("context-set enumeration exceeds the capacity limit"));
            }
            let mut w = seen[&s].clone();
            if forward {
                w.push(a);
            } else {
                w.insert(0, a);
            }
            seen.insert(t.clone(), w);
            order.push(t.clone());
            queue.push_back(t);
        }
    }
    // Only inclusion-minimal sets constrain gluing.
    let minimal: Vec<BitSet> = order
        .iter()
        .filter(|s| !order.iter().any(|t| t != *s && t.is_subset(s)))
        .cloned()
        .collect();
    Ok(minimal.into_iter().map(|s| {
        let w = seen[&s].clone();
        (s, w)
    }).collect())
}

fn has_synchronizing_word(g: &Nfa) -> Result<bool> {
    Ok(context_sets(g, true)?.iter().any(|(s, _)| s.len() == 1))
}

/// Exact gluing analysis of a one-dimensional subshift.
pub fn gluing_analysis(x: &Subshift) -> Result<(Option<usize>, usize, Vec<(GluingFailure, bool)>)> {
    x.require_dim1("gluing analysis")?;
    let pres = x.presentation()?;
    let g = &pres.rr_nfa;
    if g.n == 0 {
        return Err(invalid("the subshift is empty"));
    }
    if matches!(x.kind(), ShiftKind::Sofic { .. }) && !has_synchronizing_word(g)? {
        return Err(EdenError::Inconclusive("the sofic presentation has no synchronizing word".into()));
    }
    let ctx = Contexts { left: context_sets(g, true)?, right: context_sets(g, false)? };
    let checked_length = ctx
        .left
        .iter()
        .chain(&ctx.right)
        .map(|(_, w)| w.len())
        .max()
        .unwrap_or(0)
        .max(1);
    // Per left context, the eventually periodic sequence R_k = (reach in k steps).
    let mut gap: Option<usize> = Some(0);
    let mut failures = Vec::new();
    for (t, u) in &ctx.left {
        let mut seq: Vec<BitSet> = vec![t.clone()];
        let mut pos: HashMap<BitSet, usize> = HashMap::from([(t.clone(), 0)]);
        let cycle_start = loop {
            let next = g.step_any(seq.last().expect("nonempty"));
            if let Some(&i) = pos.get(&next) {
                break i;
            }
            pos.insert(next.clone(), seq.len());
            seq.push(next);
        };
        for (s, v) in &ctx.right {
            let fails: Vec<usize> = (0..seq.len()).filter(|&k| !seq[k].intersects(s)).collect();
            if fails.is_empty() {
                continue;
            }
            let last = *fails.last().expect("nonempty");
            let periodic = last >= cycle_start;
            if periodic {
                gap = None;
            } else if let Some(g0) = gap.as_mut() {
                *g0 = (*g0).max(last + 1);
            }
            let info = GluingFailure { left: u.clone(), right: v.clone(), fill: last };
            failures.push((info, periodic));
        }
    }
    Ok((gap, checked_length, failures))
}

/// Smallest `g ≤ max_gap` for which every pair of allowed words glues with
/// any fill of at least `g` cells; `None` if no such `g` exists.
///
/// Fails with [`EdenError::Inconclusive`] when the words needed to cover
/// every context are longer than `max_len`, or when a sofic presentation has
/// no synchronizing word.
pub fn strong_irreducibility_gap(x: &Subshift, max_gap: usize, max_len: usize) -> Result<Option<GluingCertificate>> {
    Ok(strong_irreducibility_report(x, max_gap, max_len)?.certificate)
}

pub fn strong_irreducibility_report(x: &Subshift, max_gap: usize, max_len: usize) -> Result<GapReport> {
    let (gap, checked_length, raw) = gluing_analysis(x)?;
    if checked_length > max_len {
        return Err(EdenError::Inconclusive(format!(
            "contexts need words of length {checked_length}, beyond the bound {max_len}"
        )));
    }
    let certificate = gap.filter(|&g| g <= max_gap).map(|g| GluingCertificate {
        gap: g,
        checked_length,
        witness_policy: "exact: all inclusion-minimal left/right contexts of the right-resolving presentation".into(),
    });
    let failures = if certificate.is_some() {
        Vec::new()
    } else {
        let pres = x.presentation()?;
        raw.into_iter()
            .filter_map(|(f, _)| failing_fill_at_least(&pres.rr_nfa, &f, max_gap).map(|fill| GluingFailure { fill, ..f }))
            .collect()
    };
    Ok(GapReport { certificate, exact_gap: gap, checked_length, failures })
}

/// Smallest fill `k ≥ min` for which `left · ? ^k · right` is not allowed.
fn failing_fill_at_least(g: &Nfa, f: &GluingFailure, min: usize) -> Option<usize> {
    let all = BitSet::full(g.n);
    let mut t = f.left.iter().fold(all.clone(), |s, &a| g.step(&s, a));
    let s = f.right.iter().rev().fold(all, |s, &a| g.step_back(&s, a));
    // The reach sets are eventually periodic; walk until the first repeat.
    let mut seen: HashMap<BitSet, usize> = HashMap::new();
    let mut fails = Vec::new();
    let (start, period) = loop {
        let k = fails.len();
        if let Some(&k0) = seen.get(&t) {
            break (k0, k - k0);
        }
        if k >= min && !t.intersects(&s) {
            return Some(k);
        }
        seen.insert(t.clone(), k);
        fails.push(!t.intersects(&s));
        t = g.step_any(&t);
    };
    (start..start + period)
        .filter(|&j| fails[j])
        .map(|j| if j >= min { j } else { j + (min - j).div_ceil(period) * period })
        .min()
}

/// Search bounds for [`weak_specification_check`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct WspecBounds {
    /// Longest box in two-box families.
    pub max_box_len: usize,
    /// Longest box in three-box families.
    pub max_box_len_three: usize,
    /// Separations tried are `g ..= g + max_extra_sep` fill cells.
    pub max_extra_sep: usize,
    /// 2 or 3.
    pub max_boxes: usize,
}

impl Default for WspecBounds {
    fn default() -> Self {
        WspecBounds { max_box_len: 5, max_box_len_three: 2, max_extra_sep: 3, max_boxes: 3 }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct WspecOutcome {
    pub holds: bool,
    /// Target patterns (on the eps-thickened boxes) with no common shadowing point.
    pub counterexample: Option<Vec<Pattern>>,
}

/// Exhaustive weak-specification check for families of up to three boxes.
///
/// Boxes are intervals separated by at least `g` fill cells; each target is
/// an allowed word on its box thickened by the metric window of `eps`, and
/// all targets must be matched by one point of `x`.
pub fn weak_specification_check(x: &Subshift, eps: f64, g: usize, bounds: WspecBounds) -> Result<WspecOutcome> {
    x.require_dim1("weak specification")?;
    let m = metric_radius(eps)? as usize;
    let pres = x.presentation()?;
    let graph = &pres.rr_nfa;
    if graph.n == 0 {
        return Err(invalid("the subshift is empty"));
    }
    if !(2..=3).contains(&bounds.max_boxes) {
        return Err(invalid("families must have 2 or 3 boxes"));
    }
    let max_word = bounds.max_box_len.max(bounds.max_box_len_three) + 2 * m;
    let mut words: Vec<Vec<Vec<Symbol>>> = vec![Vec::new(); max_word + 1];
    for (len, slot) in words.iter_mut().enumerate().skip(1) {
        *slot = x
            .language(&Window::interval(0, len as i64 - 1))?
            .into_iter()
            .map(|p| p.symbols().to_vec())
            .collect();
    }
    let mut families: Vec<(Vec<usize>, Vec<usize>)> = Vec::new();
    let seps: Vec<usize> = (g..=g + bounds.max_extra_sep).collect();
    for l1 in 1..=bounds.max_box_len {
        for l2 in 1..=bounds.max_box_len {
            for &k in &seps {
                families.push((vec![l1, l2], vec![k]));
            }
        }
    }
    if bounds.max_boxes == 3 {
        for l1 in 1..=bounds.max_box_len_three {
            for l2 in 1..=bounds.max_box_len_three {
                for l3 in 1..=bounds.max_box_len_three {
                    for &k1 in &seps {
                        for &k2 in &seps {
                            families.push((vec![l1, l2, l3], vec![k1, k2]));
                        }
                    }
                }
            }
        }
    }
    let found = families
        .par_iter()
        .map(|(lens, seps)| family_counterexample(graph, &words, lens, seps, m))
        .find_first(Option::is_some)
        .flatten();
    Ok(match found {
        None => WspecOutcome { holds: true, counterexample: None },
        Some(targets) => WspecOutcome { holds: false, counterexample: Some(targets) },
    })
}

/// Searches all target choices for one family of boxes; returns the first
/// target tuple that cannot be realized.
fn family_counterexample(
    g: &Nfa,
    words: &[Vec<Vec<Symbol>>],
    lens: &[usize],
    seps: &[usize],
    m: usize,
) -> Option<Vec<Pattern>> {
    // Box j occupies [start_j, start_j + len_j); thickened by m on each side.
    let mut starts = vec![0i64];
    for j in 1..lens.len() {
        starts.push(starts[j - 1] + lens[j - 1] as i64 + seps[j - 1] as i64);
    }
    let spans: Vec<(i64, i64)> = starts
        .iter()
        .zip(lens)
        .map(|(&s, &l)| (s - m as i64, s + l as i64 - 1 + m as i64))
        .collect();
    let mut chosen: Vec<&[Symbol]> = Vec::new();
    search(g, words, &spans, 0, BitSet::full(g.n), spans[0].0, &mut chosen)
}

/// `state` is the vertex set after reading everything before `pos`.
fn search<'a>(
    g: &Nfa,
    words: &'a [Vec<Vec<Symbol>>],
    spans: &[(i64, i64)],
    j: usize,
    state: BitSet,
    pos: i64,
    chosen: &mut Vec<&'a [Symbol]>,
) -> Option<Vec<Pattern>> {
    if j == spans.len() {
        return None;
    }
    let (lo, hi) = spans[j];
    let mut state = state;
    let mut pos = pos;
    while pos < lo {
        state = g.step_any(&state);
        pos += 1;
    }
    let len = (hi - lo + 1) as usize;
    for w in &words[len] {
        // Cells of this span already fixed by the previous target must agree.
        let overlap = (pos - lo) as usize;
        if overlap > 0 {
            let (plo, _) = spans[j - 1];
            let prev = chosen[j - 1];
            let agree = (0..overlap).all(|i| prev[(lo - plo) as usize + i] == w[i]);
            if !agree {
                chosen.push(w);
                let out = targets(spans, chosen);
                chosen.pop();
                return Some(out);
            }
        }
        let mut s = state.clone();
        let mut dead = false;
        for &a in &w[overlap.min(len)..] {
            s = g.step(&s, a);
            if s.is_empty() {
                dead = true;
                break;
            }
        }
        chosen.push(w);
        let res = if dead {
            Some(targets(spans, chosen))
        } else {
            search(g, words, spans, j + 1, s, pos.max(hi + 1), chosen)
        };
        chosen.pop();
        if res.is_some() {
            return res;
        }
    }
    None
}

fn targets(spans: &[(i64, i64)], chosen: &[&[Symbol]]) -> Vec<Pattern> {
    chosen.iter().zip(spans).map(|(w, &(lo, _))| Pattern::word(lo, w)).collect()
}

/// Smallest `g ≤ max_gap` passing [`weak_specification_check`] at `eps`.
pub fn weak_specification_gap(x: &Subshift, eps: f64, max_gap: usize, bounds: WspecBounds) -> Result<Option<usize>> {
    for g in 0..=max_gap {
        if weak_specification_check(x, eps, g, bounds)?.holds {
            return Ok(Some(g));
        }
    }
    Ok(None)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct IndependenceReport {
    pub tuple: Vec<Pattern>,
    pub window: Window,
    pub independence_set: Window,
    pub phi: usize,
    #[serde(serialize_with = "ser_ratio")]
    pub density: Ratio<u64>,
}

fn ser_ratio<S: serde::Serializer>(r: &Ratio<u64>, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&format!("{}/{}", r.numer(), r.denom()))
}

/// Largest `J ⊆ K` such that for every choice `ω: J → tuple`, some point
/// lies in every `s⁻¹A_{ω(s)}`, i.e. carries `tuple[ω(s)]` translated by `-s`.
pub fn independence_density(x: &Subshift, tuple: &[Pattern], k: &Window) -> Result<IndependenceReport> {
    x.require_dim1("independence density")?;
    if tuple.is_empty() {
        return Err(invalid("the tuple of cylinders is empty"));
    }
    if k.is_empty() || k.len() > 20 {
        return Err(invalid("the window K must have between 1 and 20 cells"));
    }
    for p in tuple {
        if p.is_empty() || !x.allows(p)? {
            return Err(invalid(format!("cylinder {p} is not in the language")));
        }
    }
    let cells: Vec<Cell> = k.cells().collect();
    let mut best: Vec<usize> = Vec::new();
    let mut cur: Vec<usize> = Vec::new();
    grow(x, tuple, &cells, 0, &mut cur, &mut best)?;
    let set = Window::from_cells(1, best.iter().map(|&i| cells[i]))?;
    Ok(IndependenceReport {
        tuple: tuple.to_vec(),
        window: k.clone(),
        independence_set: set,
        phi: best.len(),
        density: Ratio::new(best.len() as u64, cells.len() as u64),
    })
}

/// Branch and bound over subsets; independence is hereditary, so only
/// independent sets are extended.
fn grow(x: &Subshift, tuple: &[Pattern], cells: &[Cell], next: usize, cur: &mut Vec<usize>, best: &mut Vec<usize>) -> Result<()> {
    if cur.len() > best.len() {
        *best = cur.clone();
    }
    if cur.len() + (cells.len() - next) <= best.len() {
        return Ok(());
    }
    for i in next..cells.len() {
        if cur.len() + (cells.len() - i) <= best.len() {
            break;
        }
        cur.push(i);
        let pts: Vec<Cell> = cur.iter().map(|&j| cells[j]).collect();
        if is_independent(x, tuple, &pts)? {
            grow(x, tuple, cells, i + 1, cur, best)?;
        }
        cur.pop();
    }
    Ok(())
}

/// Checks every map `ω` from `set` to tuple indices, the newest cell varying slowest.
fn is_independent(x: &Subshift, tuple: &[Pattern], set: &[Cell]) -> Result<bool> {
    let r = tuple.len();
    let total = (r as u64).checked_pow(set.len() as u32).filter(|&t| t <= capacity::limit() as u64);
    let total = total.ok_or_else(|| cap_err("too many maps to check for independence"))?;
    for mut code in 0..total {
        let mut merged: HashMap<Cell, Symbol> = HashMap::new();
        let mut ok = true;
        for s in set {
            let p = &tuple[(code % r as u64) as usize];
            code /= r as u64;
            for (c, a) in p.iter() {
                let at = [c[0] - s[0], c[1] - s[1]];
                if *merged.entry(at).or_insert(a) != a {
                    ok = false;
                }
            }
        }
        if !ok || !x.allows(&Pattern::from_assignments(1, merged.into_iter().collect())?)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Guaranteed lower bound `1/(2g+1)` on the independence density of
/// single-window cylinder tuples in a subshift with gluing gap `g`.
pub fn ie_density_bound(cert: &GluingCertificate) -> Ratio<u64> {
    Ratio::new(1, 2 * cert.gap as u64 + 1)
}
