//! Subshifts over a finite alphabet: full shifts, shifts of finite type and
//! sofic shifts, with exact language queries in dimension one and
//! strip-bounded queries for two-dimensional SFTs.

pub(crate) mod automata;
mod format;
mod strip;

use std::collections::{HashMap, HashSet, VecDeque};
use std::fmt;
use std::sync::{Arc, OnceLock};

use num_bigint::BigUint;
use serde::Serialize;

use crate::capacity;
use crate::error::{capacity as cap_err, invalid, Result};
use crate::lattice::{Cell, Configuration, Pattern, Symbol, Window};

pub(crate) use automata::{BitSet, Dfa, Nfa};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Alphabet {
    size: usize,
    names: Option<Vec<String>>,
}

impl Alphabet {
    pub fn new(size: usize) -> Result<Self> {
        if size == 0 || size > 256 {
            return Err(invalid(format!("alphabet size {size} outside 1..=256")));
        }
        Ok(Alphabet { size, names: None })
    }

    pub fn with_names(names: Vec<String>) -> Result<Self> {
        let mut a = Alphabet::new(names.len())?;
        a.names = Some(names);
        Ok(a)
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn name(&self, s: Symbol) -> String {
        match &self.names {
            Some(n) => n[s as usize].clone(),
            None => s.to_string(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct LabeledEdge {
    pub source: usize,
    pub target: usize,
    pub label: Symbol,
}

/// Edge-labeled graph presenting a sofic shift.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LabeledGraph {
    vertices: Vec<String>,
    edges: Vec<LabeledEdge>,
}

impl LabeledGraph {
    pub fn new(vertices: Vec<String>, edges: Vec<LabeledEdge>) -> Result<Self> {
        if let Some(e) = edges.iter().find(|e| e.source >= vertices.len() || e.target >= vertices.len()) {
            return Err(invalid(format!("edge {e:?} refers to a missing vertex")));
        }
        Ok(LabeledGraph { vertices, edges })
    }

    /// Builds a graph from `(source, label, target)` triples with named vertices.
    pub fn from_named_edges(edges: &[(&str, Symbol, &str)]) -> Self {
        let mut names: Vec<String> = Vec::new();
        let mut index = HashMap::new();
        let mut id = |n: &str, names: &mut Vec<String>| -> usize {
            *index.entry(n.to_string()).or_insert_with(|| {
                names.push(n.to_string());
                names.len() - 1
            })
        };
        let mut out = Vec::new();
        for &(s, a, t) in edges {
            let source = id(s, &mut names);
            let target = id(t, &mut names);
            out.push(LabeledEdge { source, target, label: a });
        }
        LabeledGraph { vertices: names, edges: out }
    }

    pub fn vertices(&self) -> &[String] {
        &self.vertices
    }

    pub fn edges(&self) -> &[LabeledEdge] {
        &self.edges
    }

    /// No vertex has two out-edges carrying the same label.
    pub fn is_right_resolving(&self) -> bool {
        let mut seen = HashSet::new();
        self.edges.iter().all(|e| seen.insert((e.source, e.label)))
    }

    pub(crate) fn to_nfa(&self, k: usize) -> Nfa {
        Nfa::from_edges(self.vertices.len(), k, self.edges.iter().map(|e| (e.source, e.target, e.label)))
    }

    pub(crate) fn from_dfa(d: &Dfa) -> Self {
        let vertices = (0..d.n).map(|i| format!("q{i}")).collect();
        let edges = (0..d.n)
            .flat_map(|q| {
                (0..d.k).filter_map(move |a| {
                    d.step(q, a as Symbol).map(|t| LabeledEdge { source: q, target: t, label: a as Symbol })
                })
            })
            .collect();
        LabeledGraph { vertices, edges }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ShiftKind {
    Full,
    Sft { forbidden: Vec<Pattern> },
    Sofic { graph: LabeledGraph },
}

/// Normalized presentations of a one-dimensional subshift.
#[derive(Debug)]
pub(crate) struct Presentation {
    /// Minimal DFA of the factor language, read from `init`.
    pub lang: Dfa,
    /// Essential, right-resolving, follower-separated presentation.
    pub rr: Dfa,
    /// `rr` as a graph, for subset propagation.
    pub rr_nfa: Nfa,
}

/// A closed shift-invariant subset of `A^{ℤ^d}` with a finite description.
#[derive(Clone)]
pub struct Subshift {
    name: Option<String>,
    alphabet: Alphabet,
    dim: usize,
    kind: ShiftKind,
    cache: Arc<OnceLock<Result<Arc<Presentation>>>>,
}

impl fmt::Debug for Subshift {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Subshift")
            .field("name", &self.name)
            .field("alphabet", &self.alphabet.size)
            .field("dim", &self.dim)
            .field("kind", &self.kind)
            .finish()
    }
}

impl Subshift {
    pub fn full(k: usize, dim: usize) -> Result<Self> {
        Subshift::build(Alphabet::new(k)?, dim, ShiftKind::Full)
    }

    /// Configurations avoiding every translate of every forbidden pattern.
    pub fn sft(k: usize, dim: usize, forbidden: Vec<Pattern>) -> Result<Self> {
        let alphabet = Alphabet::new(k)?;
        for p in &forbidden {
            if p.is_empty() {
                return Err(invalid("forbidden patterns must have nonempty windows"));
            }
            if p.dim() != dim {
                return Err(invalid(format!("forbidden pattern {p} has the wrong dimension")));
            }
            if p.max_symbol().is_some_and(|s| s as usize >= k) {
                return Err(invalid(format!("forbidden pattern {p} uses a symbol outside the alphabet")));
            }
        }
        let mut forbidden = forbidden;
        forbidden.sort();
        forbidden.dedup();
        Subshift::build(alphabet, dim, ShiftKind::Sft { forbidden })
    }

    /// Convenience: one-dimensional SFT from forbidden words.
    pub fn sft_words(k: usize, words: &[&[Symbol]]) -> Result<Self> {
        Subshift::sft(k, 1, words.iter().map(|w| Pattern::word(0, w)).collect())
    }

    /// Bi-infinite label sequences of `graph` (dimension one).
    pub fn sofic(k: usize, graph: LabeledGraph) -> Result<Self> {
        let alphabet = Alphabet::new(k)?;
        if let Some(e) = graph.edges.iter().find(|e| e.label as usize >= k) {
            return Err(invalid(format!("edge label {} outside the alphabet", e.label)));
        }
        Subshift::build(alphabet, 1, ShiftKind::Sofic { graph })
    }

    fn build(alphabet: Alphabet, dim: usize, kind: ShiftKind) -> Result<Self> {
        if dim != 1 && dim != 2 {
            return Err(invalid(format!("dimension {dim} is not supported")));
        }
        if dim != 1 && matches!(kind, ShiftKind::Sofic { .. }) {
            return Err(invalid("sofic shifts are one-dimensional"));
        }
        Ok(Subshift { name: None, alphabet, dim, kind, cache: Arc::new(OnceLock::new()) })
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = Some(name.into());
        self
    }

    pub fn with_alphabet(mut self, alphabet: Alphabet) -> Result<Self> {
        if alphabet.size != self.alphabet.size {
            return Err(invalid("alphabet size mismatch"));
        }
        self.alphabet = alphabet;
        Ok(self)
    }

    pub fn name(&self) -> Option<&str> {
        self.name.as_deref()
    }

    pub fn label(&self) -> String {
        self.name.clone().unwrap_or_else(|| self.kind_name().to_string())
    }

    fn kind_name(&self) -> &'static str {
        match self.kind {
            ShiftKind::Full => "full",
            ShiftKind::Sft { .. } => "sft",
            ShiftKind::Sofic { .. } => "sofic",
        }
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn alphabet_size(&self) -> usize {
        self.alphabet.size
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn kind(&self) -> &ShiftKind {
        &self.kind
    }

    pub fn is_full(&self) -> bool {
        matches!(self.kind, ShiftKind::Full)
    }

    pub fn is_sft(&self) -> bool {
        matches!(self.kind, ShiftKind::Full | ShiftKind::Sft { .. })
    }

    pub(crate) fn require_dim1(&self, what: &str) -> Result<()> {
        if self.dim != 1 {
            return Err(invalid(format!("{what} needs a one-dimensional subshift")));
        }
        Ok(())
    }

    /// Width of the uniform blocks forbidden patterns are recoded to (1 for full shifts).
    pub fn block_length(&self) -> usize {
        match &self.kind {
            ShiftKind::Sft { forbidden } => forbidden
                .iter()
                .filter_map(|p| p.window().bounds())
                .map(|(lo, hi)| (hi[0] - lo[0] + 1).max(hi[1] - lo[1] + 1) as usize)
                .max()
                .unwrap_or(1),
            _ => 1,
        }
    }

    pub(crate) fn presentation(&self) -> Result<Arc<Presentation>> {
        self.require_dim1("this query")?;
        self.cache.get_or_init(|| self.compute_presentation().map(Arc::new)).clone()
    }

    fn compute_presentation(&self) -> Result<Presentation> {
        let k = self.alphabet.size;
        let nfa = match &self.kind {
            ShiftKind::Full => Nfa::from_edges(1, k, (0..k).map(|a| (0, 0, a as Symbol))),
            ShiftKind::Sft { forbidden } => sft_graph(k, forbidden)?,
            ShiftKind::Sofic { graph } => graph.to_nfa(k),
        };
        let nfa = nfa.trim();
        let lang = nfa.determinize()?.minimize();
        let rr = lang.essential_minimal();
        let rr_nfa = rr.as_nfa();
        Ok(Presentation { lang, rr, rr_nfa })
    }

    /// True when the subshift has no points.
    pub fn is_empty(&self) -> Result<bool> {
        if self.dim == 2 {
            return Ok(self.language(&Window::rect(2, &[0, 0], &[0, 0])?)?.is_empty());
        }
        Ok(self.presentation()?.rr.n == 0)
    }

    /// Number of allowed words of length `n`.
    pub fn count_words(&self, n: usize) -> Result<BigUint> {
        Ok(self.word_counts(n)?.pop().expect("nonempty"))
    }

    /// Allowed-word counts for lengths `0..=max_len`.
    pub fn word_counts(&self, max_len: usize) -> Result<Vec<BigUint>> {
        let p = self.presentation()?;
        if p.lang.init().is_none() {
            return Ok(vec![BigUint::from(0u8); max_len + 1]);
        }
        Ok(p.lang.word_counts(max_len))
    }

    /// `|language(X, w)|` without materializing the patterns when `w` is an interval.
    pub fn language_size(&self, w: &Window) -> Result<BigUint> {
        if self.dim == 1 {
            if let Some((lo, hi)) = w.as_interval() {
                return self.count_words((hi - lo + 1) as usize);
            }
        }
        Ok(BigUint::from(self.language(w)?.len()))
    }

    pub fn allows_word(&self, word: &[Symbol]) -> Result<bool> {
        Ok(self.presentation()?.lang.accepts(word))
    }

    /// Whether a pattern extends to a point of the subshift.
    pub fn allows(&self, p: &Pattern) -> Result<bool> {
        if p.dim() != self.dim {
            return Err(invalid("pattern dimension does not match the subshift"));
        }
        if p.is_empty() {
            return Ok(!self.is_empty()?);
        }
        if p.max_symbol().is_some_and(|s| s as usize >= self.alphabet.size) {
            return Ok(false);
        }
        if self.dim == 2 {
            return strip::allows(self, p);
        }
        if let Some((_, w)) = p.as_word() {
            return self.allows_word(w);
        }
        let pres = self.presentation()?;
        let (lo, hi) = p.window().as_span();
        let mut s = BitSet::full(pres.rr.n);
        for i in lo..=hi {
            s = match p.get([i, 0]) {
                Some(a) => pres.rr_nfa.step(&s, a),
                None => pres.rr_nfa.step_any(&s),
            };
            if s.is_empty() {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// All patterns on `w` that extend to a point, in lexicographic order.
    ///
    /// In dimension two the window must be a box no taller than the strip
    /// bound; the answer is the set of patterns extending to the horizontal
    /// strip around the box (see [`strip`]).
    pub fn language(&self, w: &Window) -> Result<Vec<Pattern>> {
        if w.dim() != self.dim {
            return Err(invalid("window dimension does not match the subshift"));
        }
        if self.dim == 2 {
            return strip::language(self, w, capacity::DEFAULT_STRIP_HEIGHT);
        }
        if w.is_empty() {
            return Ok(vec![Pattern::new(w.clone(), Vec::new())?]);
        }
        let pres = self.presentation()?;
        let limit = capacity::limit();
        let (lo, hi) = w.as_span();
        let mut out = Vec::new();
        let mut buf = Vec::with_capacity(w.len());
        let start = BitSet::full(pres.rr.n);
        if pres.rr.n == 0 {
            return Ok(out);
        }
        enumerate_1d(&pres.rr_nfa, w, lo, hi, start, &mut buf, &mut out, limit)?;
        Ok(out)
    }

    /// Membership of a finitely described configuration.
    pub fn contains(&self, x: &Configuration) -> Result<bool> {
        if x.dim() != self.dim {
            return Err(invalid("configuration dimension does not match the subshift"));
        }
        if x.max_symbol() as usize >= self.alphabet.size {
            return Ok(false);
        }
        match &self.kind {
            ShiftKind::Full => Ok(true),
            ShiftKind::Sft { forbidden } => Ok(!forbidden.iter().any(|p| occurs(p, x))),
            ShiftKind::Sofic { .. } => self.contains_via_graph(x),
        }
    }

    fn contains_via_graph(&self, x: &Configuration) -> Result<bool> {
        let pres = self.presentation()?;
        let g = &pres.rr_nfa;
        let all = BitSet::full(g.n);
        match x {
            Configuration::Periodic { symbols, .. } => Ok(!stable_under_word(g, all, symbols).is_empty()),
            Configuration::FiniteSupport { background, exceptions, .. } => {
                let left = stable_under_word(g, all, &[*background]);
                if left.is_empty() {
                    return Ok(false);
                }
                let mut s = left;
                if let Some((lo, hi)) = exceptions.window().bounds() {
                    for i in lo[0]..=hi[0] {
                        s = g.step(&s, exceptions.get([i, 0]).unwrap_or(*background));
                        if s.is_empty() {
                            return Ok(false);
                        }
                    }
                }
                let mut seen = HashSet::new();
                while seen.insert(s.clone()) {
                    s = g.step(&s, *background);
                    if s.is_empty() {
                        return Ok(false);
                    }
                }
                Ok(true)
            }
        }
    }

    /// Right-resolving, follower-separated presentation of the same subshift.
    pub fn determinize(&self) -> Result<Subshift> {
        let pres = self.presentation()?;
        let graph = LabeledGraph::from_dfa(&pres.rr);
        let mut out = Subshift::sofic(self.alphabet.size, graph)?;
        out.name = self.name.clone();
        out.alphabet = self.alphabet.clone();
        Ok(out)
    }

    /// The presenting graph, when this subshift is sofic.
    pub fn graph(&self) -> Option<&LabeledGraph> {
        match &self.kind {
            ShiftKind::Sofic { graph } => Some(graph),
            _ => None,
        }
    }

    /// True if the presenting graph is right-resolving (SFTs count as such
    /// through their block presentation).
    pub fn is_right_resolving(&self) -> bool {
        self.graph().is_none_or(LabeledGraph::is_right_resolving)
    }

    /// Whether every point of `self` lies in `other`; returns a shortest,
    /// lexicographically least word of `self` missing from `other` otherwise.
    pub fn inclusion_witness(&self, other: &Subshift) -> Result<Option<Vec<Symbol>>> {
        let a = self.presentation()?;
        let b = other.presentation()?;
        Ok(shortest_word(&a.lang, &b.lang, |x, y| x && !y))
    }

    pub fn is_subshift_of(&self, other: &Subshift) -> Result<bool> {
        Ok(self.inclusion_witness(other)?.is_none())
    }

    /// Whether the subshift has at least two points.
    pub fn has_two_points(&self) -> Result<bool> {
        let p = self.presentation()?;
        let bound = 2 * p.lang.n + 2;
        Ok(self.word_counts(bound)?.iter().any(|c| *c >= BigUint::from(2u8)))
    }
}

/// Which side of a comparison a witness word belongs to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum WitnessSide {
    OnlyFirst,
    OnlySecond,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LanguageComparison {
    pub equal: bool,
    /// Shortest, then lexicographically least, word in exactly one language.
    pub witness: Option<(Vec<Symbol>, WitnessSide)>,
}

/// Decides `X = Y` for one-dimensional subshifts.
pub fn equal_language(x: &Subshift, y: &Subshift) -> Result<LanguageComparison> {
    let a = x.presentation()?;
    let b = y.presentation()?;
    let w = shortest_word(&a.lang, &b.lang, |p, q| p != q);
    Ok(match w {
        None => LanguageComparison { equal: true, witness: None },
        Some(word) => {
            let side = if a.lang.accepts(&word) { WitnessSide::OnlyFirst } else { WitnessSide::OnlySecond };
            LanguageComparison { equal: false, witness: Some((word, side)) }
        }
    })
}

/// Breadth-first search over the product of two language DFAs for the
/// shortest, lexicographically least nonempty word whose acceptance
/// pattern satisfies `target`.
pub(crate) fn shortest_word(a: &Dfa, b: &Dfa, target: impl Fn(bool, bool) -> bool) -> Option<Vec<Symbol>> {
    type St = (Option<usize>, Option<usize>);
    let k = a.k.max(b.k);
    let start: St = (a.init(), b.init());
    if start == (None, None) {
        return None;
    }
    let mut parent: HashMap<St, (St, Symbol)> = HashMap::new();
    let mut seen: HashSet<St> = HashSet::from([start]);
    let mut queue = VecDeque::from([start]);
    while let Some(st) = queue.pop_front() {
        for sym in 0..k {
            let sym = sym as Symbol;
            let nxt: St = (st.0.and_then(|q| a.step(q, sym)), st.1.and_then(|q| b.step(q, sym)));
            if nxt == (None, None) || !seen.insert(nxt) {
                continue;
            }
            parent.insert(nxt, (st, sym));
            if target(nxt.0.is_some(), nxt.1.is_some()) {
                let mut word = vec![sym];
                let mut cur = st;
                while cur != start {
                    let (p, s) = parent[&cur];
                    word.push(s);
                    cur = p;
                }
                word.reverse();
                return Some(word);
            }
            queue.push_back(nxt);
        }
    }
    None
}

/// Iterates `S ← δ(S, u)` from `s` until it stabilizes. The sequence is
/// decreasing when started from the full vertex set.
fn stable_under_word(g: &Nfa, mut s: BitSet, u: &[Symbol]) -> BitSet {
    loop {
        let mut t = s.clone();
        for &a in u {
            t = g.step(&t, a);
        }
        if t == s || t.is_empty() {
            return t;
        }
        s = t;
    }
}

#[allow(clippy::too_many_arguments)]
fn enumerate_1d(
    g: &Nfa,
    w: &Window,
    pos: i64,
    hi: i64,
    state: BitSet,
    buf: &mut Vec<Symbol>,
    out: &mut Vec<Pattern>,
    limit: usize,
) -> Result<()> {
    if pos > hi {
        if out.len() >= limit {
            return Err(cap_err(format!("language exceeds {limit} patterns")));
        }
        out.push(Pattern::new(w.clone(), buf.clone())?);
        return Ok(());
    }
    if w.contains([pos, 0]) {
        for a in 0..g.k {
            let nxt = g.step(&state, a as Symbol);
            if nxt.is_empty() {
                continue;
            }
            buf.push(a as Symbol);
            enumerate_1d(g, w, pos + 1, hi, nxt, buf, out, limit)?;
            buf.pop();
        }
        Ok(())
    } else {
        let nxt = g.step_any(&state);
        if nxt.is_empty() {
            return Ok(());
        }
        enumerate_1d(g, w, pos + 1, hi, nxt, buf, out, limit)
    }
}

/// Does some translate of `p` occur in `x`?
fn occurs(p: &Pattern, x: &Configuration) -> bool {
    let matches_at = |t: Cell| p.iter().all(|(c, s)| x.at([c[0] + t[0], c[1] + t[1]]) == s);
    match x {
        Configuration::Periodic { period, .. } => {
            (0..period[0]).any(|i| (0..period[1]).any(|j| matches_at([i, j])))
        }
        Configuration::FiniteSupport { background, exceptions, .. } => {
            if p.symbols().iter().all(|s| s == background) {
                return true;
            }
            exceptions
                .window()
                .cells()
                .any(|e| p.window().cells().any(|q| matches_at([e[0] - q[0], e[1] - q[1]])))
        }
    }
}

/// Block presentation of a one-dimensional SFT: vertices are allowed
/// `(m-1)`-words, edges are allowed `m`-words labeled by their last symbol.
fn sft_graph(k: usize, forbidden: &[Pattern]) -> Result<Nfa> {
    // Each forbidden pattern as (offsets from its leftmost cell, symbols).
    let shapes: Vec<(Vec<usize>, Vec<Symbol>, usize)> = forbidden
        .iter()
        .map(|p| {
            let (lo, hi) = p.window().as_span();
            let offs = p.window().cells().map(|c| (c[0] - lo) as usize).collect();
            (offs, p.symbols().to_vec(), (hi - lo + 1) as usize)
        })
        .collect();
    let m = shapes.iter().map(|s| s.2).max().unwrap_or(1);
    let ends_badly = |w: &[Symbol]| {
        shapes.iter().any(|(offs, syms, span)| {
            *span <= w.len() && {
                let base = w.len() - span;
                offs.iter().zip(syms).all(|(&o, &s)| w[base + o] == s)
            }
        })
    };
    if m <= 1 {
        let edges = (0..k).filter(|&a| !ends_badly(&[a as Symbol])).map(|a| (0, 0, a as Symbol));
        return Ok(Nfa::from_edges(1, k, edges));
    }
    let limit = capacity::limit();
    let mut vertices: Vec<Vec<Symbol>> = Vec::new();
    let mut stack: Vec<Vec<Symbol>> = vec![Vec::new()];
    while let Some(w) = stack.pop() {
        if w.len() == m - 1 {
            if vertices.len() >= limit {
                return Err(cap_err(format!("block presentation exceeds {limit} vertices")));
            }
            vertices.push(w);
            continue;
        }
        for a in (0..k).rev() {
            let mut nw = w.clone();
            nw.push(a as Symbol);
            if !ends_badly(&nw) {
                stack.push(nw);
            }
        }
    }
    let index: HashMap<&[Symbol], usize> = vertices.iter().enumerate().map(|(i, v)| (v.as_slice(), i)).collect();
    let mut edges = Vec::new();
    for (i, v) in vertices.iter().enumerate() {
        for a in 0..k {
            let mut w = v.clone();
            w.push(a as Symbol);
            if ends_badly(&w) {
                continue;
            }
            if let Some(&j) = index.get(&w[1..]) {
                edges.push((i, j, a as Symbol));
            }
        }
    }
    Ok(Nfa::from_edges(vertices.len(), k, edges))
}

impl Window {
    /// First and last coordinate of a nonempty one-dimensional window.
    pub(crate) fn as_span(&self) -> (i64, i64) {
        let (lo, hi) = self.bounds().expect("nonempty window");
        (lo[0], hi[0])
    }
}

pub use format::parse_subshift;

impl fmt::Display for Subshift {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        format::write_subshift(self, f)
    }
}

#[cfg(test)]
mod tests;
