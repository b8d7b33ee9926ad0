//! Decision procedures for one-dimensional codes.
//!
//! Everything runs on the label graph `H` of a code: vertices are pairs
//! `(q, u)` of a vertex of the domain's right-resolving presentation and a
//! word `u` of length `s - 1` read into `q` (`s` = width of the
//! neighborhood hull). Reading `a` from `(q, u)` outputs `table(ua)`.
//! Bi-infinite paths of `H` are exactly pairs `(x, Tx)`.

use std::collections::{HashMap, VecDeque};

use serde::Serialize;

use super::{BlockCode, PatternIndex};
use crate::error::{invalid, EdenError, Result};
use crate::lattice::{Pattern, Symbol, Window};
use crate::subshift::{shortest_word, Nfa};

#[derive(Clone, Copy, Debug)]
pub(crate) struct SkEdge {
    pub src: u32,
    pub dst: u32,
    pub input: Symbol,
    /// Index of the neighborhood pattern read along this edge.
    pub pat: u32,
}

/// Domain-only part of `H`: labels come from a table.
#[derive(Debug)]
pub(crate) struct Skeleton {
    pub nv: usize,
    /// Sorted by source; `edges[start[v]..start[v + 1]]` leave `v`.
    pub edges: Vec<SkEdge>,
    pub start: Vec<usize>,
    /// Width of the neighborhood hull.
    pub span: usize,
}

impl Skeleton {
    pub fn build(code: &BlockCode) -> Result<Skeleton> {
        build_skeleton(code.domain(), code.neighborhood(), &code.patterns)
    }

    pub fn out(&self, v: usize) -> &[SkEdge] {
        &self.edges[self.start[v]..self.start[v + 1]]
    }
}

pub(super) fn build_skeleton(domain: &crate::subshift::Subshift, n: &Window, index: &PatternIndex) -> Result<Skeleton> {
    domain.require_dim1("deciding code properties")?;
    let pres = domain.presentation()?;
    let rr = &pres.rr;
    let (lo, hi) = n.as_interval().map_or_else(|| n.bounds().map(|(a, b)| (a[0], b[0])).expect("nonempty"), |x| x);
    let span = (hi - lo + 1) as usize;
    let offsets: Vec<usize> = n.cells().map(|c| (c[0] - lo) as usize).collect();
    let mut level: Vec<(usize, Vec<Symbol>)> = (0..rr.n).map(|q| (q, Vec::new())).collect();
    for _ in 1..span {
        let mut seen = HashMap::new();
        let mut next = Vec::new();
        for (p, u) in &level {
            for a in 0..rr.k as Symbol {
                if let Some(q) = rr.step(*p, a) {
                    let mut w = u.clone();
                    w.push(a);
                    if seen.insert((q, w.clone()), ()).is_none() {
                        next.push((q, w));
                    }
                }
            }
        }
        crate::capacity::check(next.len(), "label graph vertices")?;
        level = next;
    }
    let ids: HashMap<(usize, Vec<Symbol>), u32> = level.iter().cloned().enumerate().map(|(i, v)| (v, i as u32)).collect();
    let mut edges = Vec::new();
    for (i, (q, u)) in level.iter().enumerate() {
        for a in 0..rr.k as Symbol {
            let Some(t) = rr.step(*q, a) else { continue };
            let mut w = u.clone();
            w.push(a);
            let proj: Vec<Symbol> = offsets.iter().map(|&o| w[o]).collect();
            let pat = *index
                .index
                .get(&proj)
                .ok_or_else(|| EdenError::Invariant(format!("allowed word {w:?} projects outside the pattern list")))?;
            let dst = ids[&(t, w[1..].to_vec())];
            edges.push(SkEdge { src: i as u32, dst, input: a, pat: pat as u32 });
        }
    }
    Ok(trim_skeleton(level.len(), edges, span))
}

fn trim_skeleton(nv: usize, edges: Vec<SkEdge>, span: usize) -> Skeleton {
    let alive = essential(nv, edges.iter().map(|e| (e.src as usize, e.dst as usize)));
    let mut map = vec![u32::MAX; nv];
    let mut m = 0u32;
    for v in 0..nv {
        if alive[v] {
            map[v] = m;
            m += 1;
        }
    }
    let mut kept: Vec<SkEdge> = edges
        .into_iter()
        .filter(|e| alive[e.src as usize] && alive[e.dst as usize])
        .map(|e| SkEdge { src: map[e.src as usize], dst: map[e.dst as usize], ..e })
        .collect();
    kept.sort_by_key(|e| (e.src, e.input));
    let nv = m as usize;
    let mut start = vec![0usize; nv + 1];
    for e in &kept {
        start[e.src as usize + 1] += 1;
    }
    for v in 0..nv {
        start[v + 1] += start[v];
    }
    Skeleton { nv, edges: kept, start, span }
}

/// Vertices lying on bi-infinite paths.
fn essential(n: usize, edges: impl Iterator<Item = (usize, usize)> + Clone) -> Vec<bool> {
    let mut alive = vec![true; n];
    loop {
        let mut indeg = vec![0u32; n];
        let mut outdeg = vec![0u32; n];
        for (s, t) in edges.clone() {
            if alive[s] && alive[t] {
                outdeg[s] += 1;
                indeg[t] += 1;
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
            return alive;
        }
    }
}

impl PatternIndex {
    pub(crate) fn skeleton(&self, code: &BlockCode) -> Result<std::sync::Arc<Skeleton>> {
        self.skeleton
            .get_or_init(|| Skeleton::build(code).map(std::sync::Arc::new))
            .clone()
    }
}

/// Shortest word of the image language missing from the codomain, if any.
pub(crate) fn image_escape(code: &BlockCode) -> Result<Option<Vec<Symbol>>> {
    let sk = code.patterns.skeleton(code)?;
    let cod = code.codomain().presentation()?;
    let lang = &cod.lang;
    let Some(init) = lang.init() else {
        return Ok((sk.nv > 0).then(Vec::new));
    };
    let nc = lang.n;
    let idx = |h: usize, c: usize| h * nc + c;
    let mut parent: Vec<u32> = vec![u32::MAX; sk.nv * nc];
    let mut label: Vec<Symbol> = vec![0; sk.nv * nc];
    let mut queue = VecDeque::new();
    for h in 0..sk.nv {
        parent[idx(h, init)] = u32::MAX - 1;
        queue.push_back((h, init));
    }
    let path = |parent: &[u32], label: &[Symbol], mut i: usize| {
        let mut w = Vec::new();
        while parent[i] != u32::MAX - 1 {
            w.push(label[i]);
            i = parent[i] as usize;
        }
        w.reverse();
        w
    };
    while let Some((h, c)) = queue.pop_front() {
        for e in sk.out(h) {
            let out = code.table[e.pat as usize];
            match lang.step(c, out) {
                None => {
                    let mut w = path(&parent, &label, idx(h, c));
                    w.push(out);
                    return Ok(Some(w));
                }
                Some(c2) => {
                    let j = idx(e.dst as usize, c2);
                    if parent[j] == u32::MAX {
                        parent[j] = idx(h, c) as u32;
                        label[j] = out;
                        queue.push_back((e.dst as usize, c2));
                    }
                }
            }
        }
    }
    Ok(None)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Yes,
    No,
    Inconclusive,
}

impl From<bool> for Verdict {
    fn from(b: bool) -> Self {
        if b {
            Verdict::Yes
        } else {
            Verdict::No
        }
    }
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Verdict::Yes => "yes",
            Verdict::No => "no",
            Verdict::Inconclusive => "inconclusive",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Flag {
    #[serde(rename = "MOORE_VIOLATION")]
    MooreViolation,
    #[serde(rename = "MYHILL_VIOLATION")]
    MyhillViolation,
}

impl std::fmt::Display for Flag {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Flag::MooreViolation => "MOORE_VIOLATION",
            Flag::MyhillViolation => "MYHILL_VIOLATION",
        })
    }
}

/// Distinct patterns on `window` that no common context tells apart.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ErasablePair {
    pub window: Window,
    pub first: Pattern,
    pub second: Pattern,
    /// Number of admissible contexts on which the images were compared.
    pub contexts_checked: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Classification {
    pub surjective: Verdict,
    pub pre_injective: Verdict,
    pub injective: Verdict,
    /// Shortest, lexicographically least Garden of Eden pattern.
    pub goe: Option<Pattern>,
    pub erasable: Option<ErasablePair>,
    pub flags: Vec<Flag>,
}

/// Surjectivity onto the codomain, with a minimal Garden of Eden pattern otherwise.
pub fn is_surjective(code: &BlockCode) -> Result<(bool, Option<Pattern>)> {
    let sk = code.patterns.skeleton(code)?;
    let cod = code.codomain().presentation()?;
    let k = code.codomain().alphabet_size();
    let nfa = Nfa::from_edges(sk.nv, k, sk.edges.iter().map(|e| (e.src as usize, e.dst as usize, code.table[e.pat as usize])));
    let image = nfa.determinize()?.minimize();
    Ok(match shortest_word(&cod.lang, &image, |c, i| c && !i) {
        None => (true, None),
        Some(w) => (false, Some(Pattern::word(0, &w))),
    })
}

/// Pairs of `H`-paths with equal labels.
struct PairGraph {
    nv: usize,
    /// `adj[p]` lists `(target pair, input of first, input of second)`.
    adj: Vec<Vec<(u32, Symbol, Symbol)>>,
}

impl PairGraph {
    fn build(sk: &Skeleton, table: &[Symbol]) -> Result<Self> {
        let nv = sk.nv;
        crate::capacity::check(nv * nv, "pair graph vertices")?;
        let mut adj = vec![Vec::new(); nv * nv];
        for h1 in 0..nv {
            for h2 in 0..nv {
                let list = &mut adj[h1 * nv + h2];
                for e1 in sk.out(h1) {
                    let l1 = table[e1.pat as usize];
                    for e2 in sk.out(h2) {
                        if table[e2.pat as usize] == l1 {
                            list.push((e1.dst * nv as u32 + e2.dst, e1.input, e2.input));
                        }
                    }
                }
            }
        }
        Ok(PairGraph { nv, adj })
    }

    fn len(&self) -> usize {
        self.nv * self.nv
    }

    /// Pairs lying on a cycle of equal-input edges.
    fn equal_cycle_vertices(&self) -> Vec<bool> {
        let n = self.len();
        let comp = tarjan(n, |v, out| out.extend(self.adj[v].iter().filter(|e| e.1 == e.2).map(|e| e.0 as usize)));
        let mut size = HashMap::new();
        for &c in &comp {
            *size.entry(c).or_insert(0usize) += 1;
        }
        (0..n)
            .map(|v| size[&comp[v]] > 1 || self.adj[v].iter().any(|e| e.1 == e.2 && e.0 as usize == v))
            .collect()
    }
}

/// Strongly connected component ids (iterative Tarjan).
fn tarjan(n: usize, succ: impl Fn(usize, &mut Vec<usize>)) -> Vec<usize> {
    let mut index = vec![usize::MAX; n];
    let mut low = vec![0usize; n];
    let mut on_stack = vec![false; n];
    let mut comp = vec![usize::MAX; n];
    let mut stack = Vec::new();
    let mut counter = 0;
    let mut ncomp = 0;
    let mut buf = Vec::new();
    for root in 0..n {
        if index[root] != usize::MAX {
            continue;
        }
        let mut call: Vec<(usize, Vec<usize>, usize)> = Vec::new();
        buf.clear();
        succ(root, &mut buf);
        index[root] = counter;
        low[root] = counter;
        counter += 1;
        stack.push(root);
        on_stack[root] = true;
        call.push((root, buf.clone(), 0));
        while let Some((v, ws, i)) = call.last_mut() {
            let v = *v;
            if *i < ws.len() {
                let w = ws[*i];
                *i += 1;
                if index[w] == usize::MAX {
                    index[w] = counter;
                    low[w] = counter;
                    counter += 1;
                    stack.push(w);
                    on_stack[w] = true;
                    buf.clear();
                    succ(w, &mut buf);
                    call.push((w, buf.clone(), 0));
                } else if on_stack[w] {
                    low[v] = low[v].min(index[w]);
                }
            } else {
                call.pop();
                if let Some((u, _, _)) = call.last() {
                    low[*u] = low[*u].min(low[v]);
                }
                if low[v] == index[v] {
                    while let Some(w) = stack.pop() {
                        on_stack[w] = false;
                        comp[w] = ncomp;
                        if w == v {
                            break;
                        }
                    }
                    ncomp += 1;
                }
            }
        }
    }
    comp
}

/// Pre-injectivity, with a verified mutually erasable pair otherwise.
pub fn is_pre_injective(code: &BlockCode) -> Result<(bool, Option<ErasablePair>)> {
    let sk = code.patterns.skeleton(code)?;
    let pg = PairGraph::build(&sk, &code.table)?;
    pre_injective_on(code, &sk, &pg)
}

fn pre_injective_on(code: &BlockCode, sk: &Skeleton, pg: &PairGraph) -> Result<(bool, Option<ErasablePair>)> {
    let n = pg.len();
    let on_cycle = pg.equal_cycle_vertices();
    // Backward reachability to an equal cycle, recording a next hop.
    let mut rev: Vec<Vec<u32>> = vec![Vec::new(); n];
    for v in 0..n {
        for e in &pg.adj[v] {
            rev[e.0 as usize].push(v as u32);
        }
    }
    let mut next_hop: Vec<Option<usize>> = vec![None; n];
    let mut to_cycle = on_cycle.clone();
    let mut queue: VecDeque<usize> = (0..n).filter(|&v| on_cycle[v]).collect();
    while let Some(v) = queue.pop_front() {
        for &u in &rev[v] {
            let u = u as usize;
            if !to_cycle[u] {
                to_cycle[u] = true;
                next_hop[u] = Some(v);
                queue.push_back(u);
            }
        }
    }
    // Forward search from the cycles for a differing edge landing in `to_cycle`.
    let mut parent: Vec<Option<usize>> = vec![None; n];
    let mut seen = on_cycle.clone();
    let mut queue: VecDeque<usize> = (0..n).filter(|&v| on_cycle[v]).collect();
    let mut hit = None;
    'search: while let Some(v) = queue.pop_front() {
        for &(t, a, b) in &pg.adj[v] {
            let t = t as usize;
            if a != b && to_cycle[t] {
                hit = Some((v, t, a, b));
                break 'search;
            }
            if !seen[t] {
                seen[t] = true;
                parent[t] = Some(v);
                queue.push_back(t);
            }
        }
    }
    let Some((p, q, a, b)) = hit else {
        return Ok((true, None));
    };
    // Assemble the pair path: cycle^r, c1 ~> p, (p -> q), q ~> c2, cycle^r.
    let edge = |u: usize, v: usize| -> (Symbol, Symbol) {
        pg.adj[u]
            .iter()
            .filter(|e| e.0 as usize == v)
            .min_by_key(|e| (e.1 != e.2, e.1, e.2))
            .map(|e| (e.1, e.2))
            .expect("edge exists")
    };
    let mut head = vec![p];
    while let Some(u) = parent[*head.last().expect("nonempty")] {
        head.push(u);
    }
    head.reverse();
    let c1 = head[0];
    let mut tail = vec![q];
    while let Some(u) = next_hop[*tail.last().expect("nonempty")] {
        tail.push(u);
    }
    let c2 = *tail.last().expect("nonempty");
    let pad = sk.span.saturating_sub(1).max(1);
    let mut steps: Vec<(Symbol, Symbol)> = Vec::new();
    let cyc1 = equal_cycle_from(pg, c1);
    while steps.len() < pad {
        steps.extend(&cyc1);
    }
    for w in head.windows(2) {
        steps.push(edge(w[0], w[1]));
    }
    steps.push((a, b));
    for w in tail.windows(2) {
        steps.push(edge(w[0], w[1]));
    }
    let cyc2 = equal_cycle_from(pg, c2);
    let before = steps.len();
    while steps.len() - before < pad {
        steps.extend(&cyc2);
    }
    let x: Vec<Symbol> = steps.iter().map(|s| s.0).collect();
    let y: Vec<Symbol> = steps.iter().map(|s| s.1).collect();
    let i = (0..x.len()).find(|&i| x[i] != y[i]).expect("differing step");
    let j = (0..x.len()).rev().find(|&i| x[i] != y[i]).expect("differing step");
    let s1 = sk.span - 1;
    for total in 0..=2 * s1 {
        for l in 0..=total.min(s1) {
            let r = total - l;
            if r > s1 || i < l || j + r >= x.len() {
                continue;
            }
            let (lo, hi) = (i - l, j + r);
            let (w1, w2) = (&x[lo..=hi], &y[lo..=hi]);
            let (w1, w2) = if w1 <= w2 { (w1, w2) } else { (w2, w1) };
            let pair = ErasablePair {
                window: Window::interval(0, (hi - lo) as i64),
                first: Pattern::word(0, w1),
                second: Pattern::word(0, w2),
                contexts_checked: 0,
            };
            if let Some(checked) = verify_erasable(code, &pair)? {
                return Ok((false, Some(ErasablePair { contexts_checked: checked, ..pair })));
            }
        }
    }
    Err(EdenError::Invariant("pair-graph witness failed its context check".into()))
}

/// A cycle of equal-input edges through `c`, as input pairs.
fn equal_cycle_from(pg: &PairGraph, c: usize) -> Vec<(Symbol, Symbol)> {
    let n = pg.len();
    let mut parent: Vec<Option<(usize, Symbol, Symbol)>> = vec![None; n];
    let mut queue = VecDeque::new();
    for &(t, a, b) in &pg.adj[c] {
        if a == b {
            let t = t as usize;
            if t == c {
                return vec![(a, b)];
            }
            if parent[t].is_none() {
                parent[t] = Some((c, a, b));
                queue.push_back(t);
            }
        }
    }
    while let Some(v) = queue.pop_front() {
        for &(t, a, b) in &pg.adj[v] {
            if a != b {
                continue;
            }
            let t = t as usize;
            if t == c {
                let mut out = vec![(a, b)];
                let mut u = v;
                while u != c {
                    let (p, a0, b0) = parent[u].expect("on tree");
                    out.push((a0, b0));
                    u = p;
                }
                out.reverse();
                return out;
            }
            if parent[t].is_none() {
                parent[t] = Some((v, a, b));
                queue.push_back(t);
            }
        }
    }
    unreachable!("vertex is on an equal cycle")
}

/// Compares images of `first` and `second` in every context of `span - 1`
/// cells on each side for which both extended words are allowed. Returns
/// the number of contexts checked, or `None` if some context separates them.
pub fn verify_erasable(code: &BlockCode, pair: &ErasablePair) -> Result<Option<usize>> {
    if code.domain().dim() != 1 {
        return Err(invalid("erasable-pair verification needs a one-dimensional code"));
    }
    let (Some((_, w1)), Some((_, w2))) = (pair.first.as_word(), pair.second.as_word()) else {
        return Err(invalid("erasable pairs must be interval patterns"));
    };
    if w1.len() != w2.len() || w1 == w2 {
        return Err(invalid("an erasable pair needs two distinct patterns on one window"));
    }
    let (nlo, nhi) = code.neighborhood().bounds().map(|(a, b)| (a[0], b[0])).expect("nonempty");
    let s1 = (nhi - nlo) as usize;
    let k = code.domain().alphabet_size();
    let offsets: Vec<usize> = code.neighborhood().cells().map(|c| (c[0] - nlo) as usize).collect();
    let total = k.checked_pow(2 * s1 as u32).filter(|&t| t <= crate::capacity::limit());
    let total = total.ok_or_else(|| crate::error::capacity("too many contexts to compare"))?;
    let image = |z: &[Symbol]| -> Option<Vec<Symbol>> {
        (0..=z.len() - (s1 + 1))
            .map(|n| {
                let proj: Vec<Symbol> = offsets.iter().map(|&o| z[n + o]).collect();
                code.lookup(&proj)
            })
            .collect()
    };
    let mut checked = 0;
    let mut z1 = Vec::with_capacity(w1.len() + 2 * s1);
    let mut z2 = Vec::with_capacity(w1.len() + 2 * s1);
    for mut c in 0..total {
        let ctx: Vec<Symbol> = (0..2 * s1)
            .map(|_| {
                let a = (c % k) as Symbol;
                c /= k;
                a
            })
            .collect();
        z1.clear();
        z2.clear();
        z1.extend(&ctx[..s1]);
        z1.extend(w1);
        z1.extend(&ctx[s1..]);
        z2.extend(&ctx[..s1]);
        z2.extend(w2);
        z2.extend(&ctx[s1..]);
        if !code.domain().allows_word(&z1)? || !code.domain().allows_word(&z2)? {
            continue;
        }
        checked += 1;
        if image(&z1) != image(&z2) {
            return Ok(None);
        }
    }
    Ok((checked > 0).then_some(checked))
}

/// Injectivity: no bi-infinite pair path with differing inputs.
pub fn is_injective(code: &BlockCode) -> Result<bool> {
    let sk = code.patterns.skeleton(code)?;
    let pg = PairGraph::build(&sk, &code.table)?;
    Ok(injective_on(&pg))
}

fn injective_on(pg: &PairGraph) -> bool {
    let n = pg.len();
    let edges: Vec<(usize, usize)> = (0..n).flat_map(|v| pg.adj[v].iter().map(move |e| (v, e.0 as usize))).collect();
    let alive = essential(n, edges.iter().copied());
    !(0..n).any(|v| alive[v] && pg.adj[v].iter().any(|e| e.1 != e.2 && alive[e.0 as usize]))
}

/// All three verdicts with witnesses and theorem flags.
pub fn classify(code: &BlockCode) -> Result<Classification> {
    if code.domain().dim() != 1 {
        return Err(invalid("verdicts are only available in dimension one; use the bounded searches"));
    }
    let sk = code.patterns.skeleton(code)?;
    let (surj, rest) = rayon::join(
        || is_surjective(code),
        || -> Result<_> {
            let pg = PairGraph::build(&sk, &code.table)?;
            let (pre, pair) = pre_injective_on(code, &sk, &pg)?;
            let inj = pre && injective_on(&pg);
            Ok((pre, pair, inj))
        },
    );
    let (surj, goe) = surj?;
    let (pre, erasable, inj) = rest?;
    let mut flags = Vec::new();
    if surj && !pre {
        flags.push(Flag::MooreViolation);
    }
    if pre && !surj {
        flags.push(Flag::MyhillViolation);
    }
    Ok(Classification {
        surjective: surj.into(),
        pre_injective: pre.into(),
        injective: inj.into(),
        goe,
        erasable,
        flags,
    })
}
