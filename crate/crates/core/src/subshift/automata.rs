//! Labeled-graph machinery behind one-dimensional subshifts: essential
//! trimming, subset construction, and follower-set (Moore) minimization.

use std::collections::{HashMap, VecDeque};

use num_bigint::BigUint;
use num_traits::{One, Zero};

use crate::capacity;
use crate::error::{capacity as cap_err, Result};
use crate::lattice::Symbol;

/// Fixed-size set of vertex indices.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub(crate) struct BitSet {
    words: Vec<u64>,
}

impl BitSet {
    pub fn new(n: usize) -> Self {
        BitSet { words: vec![0; n.div_ceil(64)] }
    }

    pub fn full(n: usize) -> Self {
        let mut s = BitSet::new(n);
        for i in 0..n {
            s.insert(i);
        }
        s
    }

    #[cfg(test)]
    pub fn singleton(n: usize, i: usize) -> Self {
        let mut s = BitSet::new(n);
        s.insert(i);
        s
    }

    pub fn insert(&mut self, i: usize) {
        self.words[i / 64] |= 1 << (i % 64);
    }

    pub fn contains(&self, i: usize) -> bool {
        self.words[i / 64] >> (i % 64) & 1 == 1
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn len(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_subset(&self, other: &BitSet) -> bool {
        self.words.iter().zip(&other.words).all(|(a, b)| a & !b == 0)
    }

    pub fn intersects(&self, other: &BitSet) -> bool {
        self.words.iter().zip(&other.words).any(|(a, b)| a & b != 0)
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(wi, &w)| {
            let mut w = w;
            std::iter::from_fn(move || {
                if w == 0 {
                    return None;
                }
                let t = w.trailing_zeros() as usize;
                w &= w - 1;
                Some(wi * 64 + t)
            })
        })
    }
}

/// A finite labeled graph, possibly nondeterministic, over `k` symbols.
#[derive(Clone, Debug)]
pub(crate) struct Nfa {
    pub n: usize,
    pub k: usize,
    /// `succ[v * k + a]` lists the targets of `a`-edges leaving `v`.
    pub succ: Vec<Vec<usize>>,
}

impl Nfa {
    pub fn from_edges(n: usize, k: usize, edges: impl IntoIterator<Item = (usize, usize, Symbol)>) -> Self {
        let mut succ = vec![Vec::new(); n * k];
        for (s, t, a) in edges {
            let slot = &mut succ[s * k + a as usize];
            if !slot.contains(&t) {
                slot.push(t);
            }
        }
        for s in &mut succ {
            s.sort_unstable();
        }
        Nfa { n, k, succ }
    }

    pub fn edges(&self) -> impl Iterator<Item = (usize, usize, Symbol)> + '_ {
        (0..self.n).flat_map(move |v| {
            (0..self.k).flat_map(move |a| self.succ[v * self.k + a].iter().map(move |&t| (v, t, a as Symbol)))
        })
    }

    pub fn step(&self, s: &BitSet, a: Symbol) -> BitSet {
        let mut out = BitSet::new(self.n);
        if (a as usize) >= self.k {
            return out;
        }
        for v in s.iter() {
            for &t in &self.succ[v * self.k + a as usize] {
                out.insert(t);
            }
        }
        out
    }

    pub fn step_any(&self, s: &BitSet) -> BitSet {
        let mut out = BitSet::new(self.n);
        for v in s.iter() {
            for a in 0..self.k {
                for &t in &self.succ[v * self.k + a] {
                    out.insert(t);
                }
            }
        }
        out
    }

    /// Vertices from which `a` can be read into `s`.
    pub fn step_back(&self, s: &BitSet, a: Symbol) -> BitSet {
        let mut out = BitSet::new(self.n);
        for v in 0..self.n {
            if self.succ[v * self.k + a as usize].iter().any(|&t| s.contains(t)) {
                out.insert(v);
            }
        }
        out
    }

    pub fn is_right_resolving(&self) -> bool {
        self.succ.iter().all(|s| s.len() <= 1)
    }

    /// Keeps only vertices lying on bi-infinite paths.
    pub fn trim(&self) -> Nfa {
        let mut alive = vec![true; self.n];
        loop {
            let mut indeg = vec![0usize; self.n];
            let mut outdeg = vec![0usize; self.n];
            for (s, t, _) in self.edges() {
                if alive[s] && alive[t] {
                    outdeg[s] += 1;
                    indeg[t] += 1;
                }
            }
            let mut changed = false;
            for v in 0..self.n {
                if alive[v] && (indeg[v] == 0 || outdeg[v] == 0) {
                    alive[v] = false;
                    changed = true;
                }
            }
            if !changed {
                break;
            }
        }
        let mut map = vec![usize::MAX; self.n];
        let mut m = 0;
        for v in 0..self.n {
            if alive[v] {
                map[v] = m;
                m += 1;
            }
        }
        let edges: Vec<_> = self
            .edges()
            .filter(|&(s, t, _)| alive[s] && alive[t])
            .map(|(s, t, a)| (map[s], map[t], a))
            .collect();
        Nfa::from_edges(m, self.k, edges)
    }

    /// Subset construction started from the set of all vertices.
    pub fn determinize(&self) -> Result<Dfa> {
        let limit = capacity::limit();
        let mut index: HashMap<BitSet, u32> = HashMap::new();
        let mut states: Vec<BitSet> = Vec::new();
        let mut trans: Vec<u32> = Vec::new();
        let start = BitSet::full(self.n);
        if self.n == 0 {
            return Ok(Dfa { n: 0, k: self.k, trans: Vec::new(), init: NONE });
        }
        index.insert(start.clone(), 0);
        states.push(start);
        let mut i = 0;
        while i < states.len() {
            let cur = states[i].clone();
            for a in 0..self.k {
                let nxt = self.step(&cur, a as Symbol);
                if nxt.is_empty() {
                    trans.push(NONE);
                    continue;
                }
                let id = match index.get(&nxt) {
                    Some(&id) => id,
                    None => {
                        if states.len() >= limit {
                            return Err(cap_err(format!("subset construction exceeds {limit} states")));
                        }
                        let id = states.len() as u32;
                        index.insert(nxt.clone(), id);
                        states.push(nxt);
                        id
                    }
                };
                trans.push(id);
            }
            i += 1;
        }
        Ok(Dfa { n: states.len(), k: self.k, trans, init: 0 })
    }
}

pub(crate) const NONE: u32 = u32::MAX;

/// Language equality of two automata whose live states all accept.
pub(crate) fn same_language(a: &Dfa, b: &Dfa) -> bool {
    let start = (a.init(), b.init());
    let mut seen = std::collections::HashSet::from([start]);
    let mut queue = VecDeque::from([start]);
    while let Some((p, q)) = queue.pop_front() {
        if p.is_some() != q.is_some() {
            return false;
        }
        let (Some(p), Some(q)) = (p, q) else { continue };
        for x in 0..a.k.max(b.k) {
            let nxt = (a.step(p, x as Symbol), b.step(q, x as Symbol));
            if seen.insert(nxt) {
                queue.push_back(nxt);
            }
        }
    }
    true
}

/// Deterministic labeled graph. Missing transitions mean the dead state.
///
/// As a language automaton every live state accepts; `init` is only
/// meaningful for language DFAs, right-resolving presentations ignore it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) struct Dfa {
    pub n: usize,
    pub k: usize,
    pub trans: Vec<u32>,
    pub init: u32,
}

impl Dfa {
    #[inline]
    pub fn step(&self, q: usize, a: Symbol) -> Option<usize> {
        if (a as usize) >= self.k {
            return None;
        }
        let t = self.trans[q * self.k + a as usize];
        (t != NONE).then_some(t as usize)
    }

    pub fn init(&self) -> Option<usize> {
        (self.init != NONE).then_some(self.init as usize)
    }

    pub fn run(&self, from: usize, word: &[Symbol]) -> Option<usize> {
        word.iter().try_fold(from, |q, &a| self.step(q, a))
    }

    pub fn accepts(&self, word: &[Symbol]) -> bool {
        self.init().and_then(|q| self.run(q, word)).is_some()
    }

    pub fn as_nfa(&self) -> Nfa {
        let edges = (0..self.n).flat_map(|q| (0..self.k).filter_map(move |a| self.step(q, a as Symbol).map(|t| (q, t, a as Symbol))));
        Nfa::from_edges(self.n, self.k, edges)
    }

    fn from_nfa_deterministic(nfa: &Nfa) -> Dfa {
        debug_assert!(nfa.is_right_resolving());
        let trans = nfa.succ.iter().map(|s| s.first().map_or(NONE, |&t| t as u32)).collect();
        Dfa { n: nfa.n, k: nfa.k, trans, init: if nfa.n > 0 { 0 } else { NONE } }
    }

    /// Moore partition refinement: states with equal follower sets share a class.
    fn follower_classes(&self) -> (Vec<usize>, usize) {
        let mut class = vec![0usize; self.n];
        let mut count = if self.n == 0 { 0 } else { 1 };
        loop {
            let mut sig: HashMap<Vec<usize>, usize> = HashMap::new();
            let mut next = vec![0usize; self.n];
            for q in 0..self.n {
                let mut key = Vec::with_capacity(self.k + 1);
                key.push(class[q]);
                for a in 0..self.k {
                    key.push(self.step(q, a as Symbol).map_or(usize::MAX, |t| class[t]));
                }
                let len = sig.len();
                next[q] = *sig.entry(key).or_insert(len);
            }
            let new_count = sig.len();
            class = next;
            if new_count == count {
                return (class, count);
            }
            count = new_count;
        }
    }

    fn quotient(&self, class: &[usize], count: usize) -> Dfa {
        let mut trans = vec![NONE; count * self.k];
        for q in 0..self.n {
            for a in 0..self.k {
                if let Some(t) = self.step(q, a as Symbol) {
                    trans[class[q] * self.k + a] = class[t] as u32;
                }
            }
        }
        let init = if self.init == NONE { NONE } else { class[self.init as usize] as u32 };
        Dfa { n: count, k: self.k, trans, init }
    }

    /// Minimal equivalent automaton (reachable part, follower sets merged),
    /// with states renumbered in breadth-first order from `init`.
    pub fn minimize(&self) -> Dfa {
        let (class, count) = self.follower_classes();
        self.quotient(&class, count).reachable_bfs()
    }

    /// Essential part of the underlying graph with follower-separated vertices.
    ///
    /// Strongly connected components that other components feed into are
    /// dropped whenever the remaining graph still presents the same shift;
    /// for irreducible shifts this leaves the Fischer cover.
    pub fn essential_minimal(&self) -> Dfa {
        let mut cur = Dfa::from_nfa_deterministic(&self.as_nfa().trim()).merged();
        let lang = self.as_nfa().determinize().map(|d| d.minimize());
        let Ok(lang) = lang else { return cur.canonical_order() };
        loop {
            let comp = cur.components();
            let mut improved = false;
            for c in 0..comp.iter().copied().max().map_or(0, |m| m + 1) {
                let feeds_out = (0..cur.n).any(|q| {
                    comp[q] == c && (0..cur.k).any(|a| cur.step(q, a as Symbol).is_some_and(|t| comp[t] != c))
                });
                if !feeds_out {
                    continue;
                }
                let keep: Vec<bool> = comp.iter().map(|&x| x != c).collect();
                let cand = Dfa::from_nfa_deterministic(&cur.restrict(&keep).trim()).merged();
                let same = cand.as_nfa().determinize().is_ok_and(|d| same_language(&d.minimize(), &lang));
                if same {
                    cur = cand;
                    improved = true;
                    break;
                }
            }
            if !improved {
                return cur.canonical_order();
            }
        }
    }

    fn merged(&self) -> Dfa {
        let (class, count) = self.follower_classes();
        let mut q = self.quotient(&class, count);
        q.init = if q.n > 0 { 0 } else { NONE };
        q
    }

    fn restrict(&self, keep: &[bool]) -> Nfa {
        let edges = self.as_nfa().edges().filter(|&(s, t, _)| keep[s] && keep[t]).collect::<Vec<_>>();
        Nfa::from_edges(self.n, self.k, edges)
    }

    /// Strongly connected component index of every state (Kosaraju).
    pub(crate) fn components(&self) -> Vec<usize> {
        let n = self.n;
        let mut order = Vec::with_capacity(n);
        let mut seen = vec![false; n];
        for s in 0..n {
            if seen[s] {
                continue;
            }
            seen[s] = true;
            let mut stack = vec![(s, 0usize)];
            while let Some(&mut (q, ref mut a)) = stack.last_mut() {
                if *a < self.k {
                    let sym = *a;
                    *a += 1;
                    if let Some(t) = self.step(q, sym as Symbol) {
                        if !seen[t] {
                            seen[t] = true;
                            stack.push((t, 0));
                        }
                    }
                } else {
                    order.push(q);
                    stack.pop();
                }
            }
        }
        let mut rev = vec![Vec::new(); n];
        for (s, t, _) in self.as_nfa().edges() {
            rev[t].push(s);
        }
        let mut comp = vec![usize::MAX; n];
        let mut count = 0;
        for &s in order.iter().rev() {
            if comp[s] != usize::MAX {
                continue;
            }
            comp[s] = count;
            let mut stack = vec![s];
            while let Some(q) = stack.pop() {
                for &p in &rev[q] {
                    if comp[p] == usize::MAX {
                        comp[p] = count;
                        stack.push(p);
                    }
                }
            }
            count += 1;
        }
        comp
    }

    fn reachable_bfs(&self) -> Dfa {
        let Some(init) = self.init() else {
            return Dfa { n: 0, k: self.k, trans: Vec::new(), init: NONE };
        };
        self.renumber_from(&[init])
    }

    /// Deterministic vertex order: BFS from each not-yet-seen vertex in
    /// order of the lexicographically least word reaching it from vertex 0.
    fn canonical_order(&self) -> Dfa {
        let starts: Vec<usize> = (0..self.n).collect();
        self.renumber_from(&starts)
    }

    fn renumber_from(&self, starts: &[usize]) -> Dfa {
        let mut map = vec![usize::MAX; self.n];
        let mut order = Vec::new();
        for &s in starts {
            if map[s] != usize::MAX {
                continue;
            }
            map[s] = order.len();
            order.push(s);
            let mut queue = VecDeque::from([s]);
            while let Some(q) = queue.pop_front() {
                for a in 0..self.k {
                    if let Some(t) = self.step(q, a as Symbol) {
                        if map[t] == usize::MAX {
                            map[t] = order.len();
                            order.push(t);
                            queue.push_back(t);
                        }
                    }
                }
            }
        }
        let mut trans = vec![NONE; order.len() * self.k];
        for (new, &old) in order.iter().enumerate() {
            for a in 0..self.k {
                if let Some(t) = self.step(old, a as Symbol) {
                    trans[new * self.k + a] = map[t] as u32;
                }
            }
        }
        let init = if self.init == NONE || map[self.init as usize] == usize::MAX {
            NONE
        } else {
            map[self.init as usize] as u32
        };
        Dfa { n: order.len(), k: self.k, trans, init }
    }

    /// Number of words of each length `0..=max_len` read from `init`.
    pub fn word_counts(&self, max_len: usize) -> Vec<BigUint> {
        let mut out = Vec::with_capacity(max_len + 1);
        let Some(init) = self.init() else {
            return vec![BigUint::zero(); max_len + 1];
        };
        let mut cur = vec![BigUint::zero(); self.n];
        cur[init] = BigUint::one();
        for len in 0..=max_len {
            out.push(cur.iter().sum());
            if len == max_len {
                break;
            }
            let mut next = vec![BigUint::zero(); self.n];
            for q in 0..self.n {
                if cur[q].is_zero() {
                    continue;
                }
                for a in 0..self.k {
                    if let Some(t) = self.step(q, a as Symbol) {
                        next[t] += &cur[q];
                    }
                }
            }
            cur = next;
        }
        out
    }
}
