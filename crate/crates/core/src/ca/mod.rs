//! Sliding block codes between subshifts.
//!
//! A code is a neighborhood `N` and a table from the domain's allowed
//! `N`-patterns to codomain symbols; `(Tx)_v = table(x|_{v+N})` with the
//! pattern read in `N`'s coordinates.

mod bounded;
mod decide;
mod survey;

use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, OnceLock};

use num_bigint::BigUint;

use crate::error::{capacity as cap_err, invalid, EdenError, Result};
use crate::lattice::{parse_vector, Cell, Configuration, Pattern, Symbol, Window};
use crate::poly::LaurentPoly;
use crate::subshift::Subshift;

pub use bounded::{bounded_erasable_search, bounded_goe_search, BoundedSearch};
pub use decide::{
    classify, is_injective, is_pre_injective, is_surjective, verify_erasable, Classification, ErasablePair, Flag,
    Verdict,
};
pub use survey::{enumerate_endomorphisms, survey, Survey, SurveyRow, SurveySummary};

/// Shared per-(domain, neighborhood) data: the allowed `N`-patterns in
/// lexicographic order and their index.
#[derive(Debug)]
pub(crate) struct PatternIndex {
    pub patterns: Vec<Pattern>,
    pub index: HashMap<Vec<Symbol>, usize>,
    pub skeleton: OnceLock<Result<Arc<decide::Skeleton>>>,
}

impl PatternIndex {
    pub fn new(domain: &Subshift, n: &Window) -> Result<Self> {
        let patterns = domain.language(n)?;
        let index = patterns.iter().enumerate().map(|(i, p)| (p.symbols().to_vec(), i)).collect();
        Ok(PatternIndex { patterns, index, skeleton: OnceLock::new() })
    }
}

#[derive(Clone)]
pub struct BlockCode {
    domain: Subshift,
    codomain: Subshift,
    neighborhood: Window,
    patterns: Arc<PatternIndex>,
    table: Vec<Symbol>,
}

impl fmt::Debug for BlockCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("BlockCode")
            .field("domain", &self.domain.label())
            .field("codomain", &self.codomain.label())
            .field("neighborhood", &self.neighborhood)
            .field("table", &self.table)
            .finish()
    }
}

impl BlockCode {
    /// Builds the code whose local rule is `rule`, evaluated on every allowed
    /// `N`-pattern of the domain.
    pub fn new(domain: Subshift, codomain: Subshift, neighborhood: Window, rule: impl Fn(&Pattern) -> Symbol) -> Result<Self> {
        let patterns = Arc::new(Self::check_shape(&domain, &codomain, &neighborhood)?);
        let table = patterns.patterns.iter().map(rule).collect();
        BlockCode::with_index(domain, codomain, neighborhood, patterns, table)
    }

    /// `table[i]` is the image of the `i`-th allowed `N`-pattern in lexicographic order.
    pub fn from_table(domain: Subshift, codomain: Subshift, neighborhood: Window, table: Vec<Symbol>) -> Result<Self> {
        let patterns = Arc::new(Self::check_shape(&domain, &codomain, &neighborhood)?);
        BlockCode::with_index(domain, codomain, neighborhood, patterns, table)
    }

    fn check_shape(domain: &Subshift, codomain: &Subshift, n: &Window) -> Result<PatternIndex> {
        if n.is_empty() {
            return Err(invalid("the neighborhood is empty"));
        }
        if n.dim() != domain.dim() || domain.dim() != codomain.dim() {
            return Err(invalid("neighborhood, domain and codomain dimensions differ"));
        }
        PatternIndex::new(domain, n)
    }

    pub(crate) fn with_index(
        domain: Subshift,
        codomain: Subshift,
        neighborhood: Window,
        patterns: Arc<PatternIndex>,
        table: Vec<Symbol>,
    ) -> Result<Self> {
        if table.len() != patterns.patterns.len() {
            return Err(invalid(format!(
                "table has {} entries for {} allowed neighborhood patterns",
                table.len(),
                patterns.patterns.len()
            )));
        }
        if let Some(&s) = table.iter().find(|&&s| s as usize >= codomain.alphabet_size()) {
            return Err(invalid(format!("table symbol {s} is outside the codomain alphabet")));
        }
        let code = BlockCode { domain, codomain, neighborhood, patterns, table };
        if code.domain.dim() == 1 {
            if let Some(w) = decide::image_escape(&code)? {
                return Err(invalid(format!(
                    "the code maps a domain point outside the codomain (image word {})",
                    word_string(&w)
                )));
            }
        }
        Ok(code)
    }

    /// Skips validation; the caller has already checked the table.
    pub(crate) fn assemble(
        domain: Subshift,
        codomain: Subshift,
        neighborhood: Window,
        patterns: Arc<PatternIndex>,
        table: Vec<Symbol>,
    ) -> Self {
        BlockCode { domain, codomain, neighborhood, patterns, table }
    }

    /// Elementary cellular automaton with Wolfram numbering: the image of
    /// `(l, c, r)` is bit `4l + 2c + r` of `rule`.
    pub fn eca(rule: u8) -> Self {
        let x = Subshift::full(2, 1).expect("full shift").with_name("full-2");
        let table = (0..8).map(|i| (rule >> i) & 1).collect();
        BlockCode::from_table(x.clone(), x, Window::interval(-1, 1), table).expect("full-shift code")
    }

    pub fn identity(x: Subshift) -> Result<Self> {
        let n = Window::rect(x.dim(), &vec![0; x.dim()], &vec![0; x.dim()])?;
        BlockCode::new(x.clone(), x, n, |p| p.symbols()[0])
    }

    pub fn domain(&self) -> &Subshift {
        &self.domain
    }

    pub fn codomain(&self) -> &Subshift {
        &self.codomain
    }

    pub fn neighborhood(&self) -> &Window {
        &self.neighborhood
    }

    pub fn table(&self) -> &[Symbol] {
        &self.table
    }

    /// The allowed `N`-patterns, in the order the table is indexed.
    pub fn patterns(&self) -> &[Pattern] {
        &self.patterns.patterns
    }

    /// `Σ table[i] · |B|^i` over the lexicographically ordered patterns, `B`
    /// the codomain alphabet; this is the Wolfram number for elementary rules.
    pub fn rule_id(&self) -> BigUint {
        table_id(&self.table, self.codomain.alphabet_size())
    }

    fn lookup(&self, symbols: &[Symbol]) -> Option<Symbol> {
        self.patterns.index.get(symbols).map(|&i| self.table[i])
    }

    fn eval_at(&self, x: &Configuration, v: Cell) -> Result<Symbol> {
        let syms: Vec<Symbol> = self.neighborhood.cells().map(|n| x.at([v[0] + n[0], v[1] + n[1]])).collect();
        self.lookup(&syms)
            .ok_or_else(|| invalid(format!("neighborhood pattern at {v:?} is not allowed in the domain")))
    }

    /// The image of a configuration; periodic stays periodic with the same
    /// period, finite-support stays finite-support.
    pub fn apply(&self, x: &Configuration) -> Result<Configuration> {
        if x.dim() != self.domain.dim() {
            return Err(invalid("configuration dimension does not match the code"));
        }
        match x {
            Configuration::Periodic { dim, period, .. } => {
                let mut symbols = Vec::with_capacity((period[0] * period[1]) as usize);
                let fundamental = Window::rect(2, &[0, 0], &[period[0] - 1, period[1] - 1])?;
                for c in fundamental.cells() {
                    symbols.push(self.eval_at(x, c)?);
                }
                let p: &[i64] = if *dim == 1 { &period[..1] } else { &period[..] };
                Configuration::periodic(*dim, p, symbols)
            }
            Configuration::FiniteSupport { dim, background, exceptions } => {
                let block = vec![*background; self.neighborhood.len()];
                let nb = self.lookup(&block).ok_or_else(|| {
                    EdenError::Representation(format!(
                        "the constant block of {background} is not an allowed neighborhood pattern"
                    ))
                })?;
                let Some((lo, hi)) = exceptions.window().bounds() else {
                    return Ok(Configuration::constant(*dim, nb));
                };
                let (nlo, nhi) = self.neighborhood.bounds().expect("nonempty neighborhood");
                let d = *dim;
                let region = Window::rect(d, &[lo[0] - nhi[0], lo[1] - nhi[1]][..d], &[hi[0] - nlo[0], hi[1] - nlo[1]][..d])?;
                let mut out = Vec::new();
                for c in region.cells() {
                    let s = self.eval_at(x, c)?;
                    if s != nb {
                        out.push((c, s));
                    }
                }
                Ok(Configuration::finite_support(nb, Pattern::from_assignments(d, out)?))
            }
        }
    }

    /// Image of a pattern on the eroded window `{v : v + N ⊆ window}`.
    pub fn apply_pattern(&self, p: &Pattern) -> Result<Pattern> {
        if p.dim() != self.domain.dim() {
            return Err(invalid("pattern dimension does not match the code"));
        }
        let eroded = self.eroded(p.window());
        if eroded.is_empty() {
            return Err(cap_err("the eroded window is empty"));
        }
        let mut out = Vec::with_capacity(eroded.len());
        for v in eroded.cells() {
            let syms: Vec<Symbol> = self
                .neighborhood
                .cells()
                .map(|n| p.get([v[0] + n[0], v[1] + n[1]]).expect("inside eroded window"))
                .collect();
            let s = self
                .lookup(&syms)
                .ok_or_else(|| invalid(format!("neighborhood pattern at {v:?} is not allowed in the domain")))?;
            out.push(s);
        }
        Pattern::new(eroded, out)
    }

    /// `{v : v + N ⊆ w}`.
    pub fn eroded(&self, w: &Window) -> Window {
        let d = w.dim();
        let (Some((lo, hi)), Some((nlo, nhi))) = (w.bounds(), self.neighborhood.bounds()) else {
            return Window::empty(d);
        };
        let cand = Window::rect(d, &[lo[0] - nlo[0], lo[1] - nlo[1]][..d], &[hi[0] - nhi[0], hi[1] - nhi[1]][..d])
            .expect("same dimension");
        let cells: Vec<Cell> = cand
            .cells()
            .filter(|v| self.neighborhood.cells().all(|n| w.contains([v[0] + n[0], v[1] + n[1]])))
            .collect();
        Window::from_cells(d, cells).expect("same dimension")
    }

    /// Rule file text: a header `N=<cells>` and one `<pattern>-><symbol>`
    /// line per allowed neighborhood pattern.
    pub fn to_rule_text(&self) -> String {
        let mut s = format!("N={}\n", neighborhood_string(&self.neighborhood));
        let wide = self.domain.alphabet_size() > 10;
        for (p, &t) in self.patterns.patterns.iter().zip(&self.table) {
            s.push_str(&symbols_string(p.symbols(), wide));
            s.push_str(&format!("->{t}\n"));
        }
        s
    }

    /// Parses a rule file for the given domain and codomain; every allowed
    /// neighborhood pattern must be listed.
    pub fn parse_rule(text: &str, domain: Subshift, codomain: Subshift) -> Result<Self> {
        let mut lines = text
            .lines()
            .map(|l| l.split('#').next().unwrap_or("").trim())
            .filter(|l| !l.is_empty());
        let header = lines.next().ok_or_else(|| invalid("empty rule file"))?;
        let n_text = header
            .strip_prefix("N=")
            .or_else(|| header.strip_prefix("N ="))
            .ok_or_else(|| invalid("rule file must start with N=<cells>"))?;
        let n = parse_neighborhood(n_text.trim(), domain.dim())?;
        let index = Self::check_shape(&domain, &codomain, &n)?;
        let mut table: Vec<Option<Symbol>> = vec![None; index.patterns.len()];
        for line in lines {
            let (lhs, rhs) = line
                .split_once("->")
                .ok_or_else(|| invalid(format!("rule line `{line}` is not <pattern>-><symbol>")))?;
            let syms = parse_symbols(lhs.trim())?;
            let out: Symbol = rhs.trim().parse().map_err(|_| invalid(format!("bad image symbol in `{line}`")))?;
            let i = *index
                .index
                .get(&syms)
                .ok_or_else(|| invalid(format!("`{}` is not an allowed neighborhood pattern", lhs.trim())))?;
            if table[i].replace(out).is_some_and(|prev| prev != out) {
                return Err(invalid(format!("conflicting entries for `{}`", lhs.trim())));
            }
        }
        let table = table
            .iter()
            .zip(&index.patterns)
            .map(|(t, p)| t.ok_or_else(|| invalid(format!("no entry for neighborhood pattern {p}"))))
            .collect::<Result<Vec<_>>>()?;
        BlockCode::with_index(domain, codomain, n, Arc::new(index), table)
    }
}

/// `(Tx)_n = Σ_k g_k x_{n+k} mod m` on the full shift over `ℤ/m`.
pub fn linear_code(g: &LaurentPoly, m: usize) -> Result<BlockCode> {
    if !(2..=256).contains(&m) {
        return Err(invalid("the modulus must lie in 2..=256"));
    }
    let g = g.reduce_mod(m as i64);
    if g.is_zero() {
        return Err(invalid("the polynomial vanishes modulo m"));
    }
    let x = Subshift::full(m, 1)?.with_name(format!("full-{m}"));
    let n = Window::interval(g.offset(), g.top());
    BlockCode::new(x.clone(), x, n, |p| {
        let s: i64 = p.iter().map(|(c, a)| g.coeff(c[0]) * a as i64).sum();
        s.rem_euclid(m as i64) as Symbol
    })
}

/// Parses the shorthands `eca:<n>` and `linear:<coeffs>@<offset>%<m>`.
pub fn parse_shorthand(s: &str) -> Result<Option<BlockCode>> {
    if let Some(n) = s.strip_prefix("eca:") {
        let rule: u8 = n.trim().parse().map_err(|_| invalid(format!("bad elementary rule `{n}`")))?;
        return Ok(Some(BlockCode::eca(rule)));
    }
    if let Some(rest) = s.strip_prefix("linear:") {
        let (poly, m) = rest.rsplit_once('%').ok_or_else(|| invalid("linear rule needs %<modulus>"))?;
        let m: usize = m.trim().parse().map_err(|_| invalid(format!("bad modulus `{m}`")))?;
        return linear_code(&poly.parse()?, m).map(Some);
    }
    Ok(None)
}

pub(crate) fn table_id(table: &[Symbol], k: usize) -> BigUint {
    let mut id = BigUint::from(0u8);
    for &t in table.iter().rev() {
        id = id * k + t as u32;
    }
    id
}

fn neighborhood_string(n: &Window) -> String {
    let parts: Vec<String> = if n.dim() == 1 {
        n.cells().map(|c| c[0].to_string()).collect()
    } else {
        n.cells().map(|c| format!("({},{})", c[0], c[1])).collect()
    };
    parts.join(",")
}

/// `-1,0,1`, `-2..2`, or `(0,0),(1,0)`.
fn parse_neighborhood(s: &str, dim: usize) -> Result<Window> {
    if s.contains('(') {
        let mut cells = Vec::new();
        let mut rest = s;
        while let Some(open) = rest.find('(') {
            let close = rest[open..].find(')').ok_or_else(|| invalid(format!("unterminated cell in `{s}`")))? + open;
            let v = parse_vector(&rest[open..=close])?;
            if v.len() != dim {
                return Err(invalid(format!("neighborhood cell {v:?} has the wrong dimension")));
            }
            cells.push(if dim == 1 { [v[0], 0] } else { [v[0], v[1]] });
            rest = &rest[close + 1..];
        }
        return Window::from_cells(dim, cells);
    }
    if dim != 1 {
        return Err(invalid("two-dimensional neighborhoods are written as (x,y) cells"));
    }
    let mut pts = Vec::new();
    for part in s.split(',').map(str::trim) {
        if let Some((a, b)) = part.split_once("..") {
            let a: i64 = a.trim().parse().map_err(|_| invalid(format!("bad range `{part}`")))?;
            let b: i64 = b.trim().parse().map_err(|_| invalid(format!("bad range `{part}`")))?;
            pts.extend(a..=b);
        } else {
            pts.push(part.parse().map_err(|_| invalid(format!("bad neighborhood cell `{part}`")))?);
        }
    }
    Ok(Window::from_points(&pts))
}

fn parse_symbols(s: &str) -> Result<Vec<Symbol>> {
    if s.contains(',') {
        s.split(',')
            .map(|t| t.trim().parse().map_err(|_| invalid(format!("bad symbol `{t}`"))))
            .collect()
    } else {
        s.chars()
            .map(|c| c.to_digit(10).map(|d| d as Symbol).ok_or_else(|| invalid(format!("bad symbol `{c}`"))))
            .collect()
    }
}

fn symbols_string(s: &[Symbol], wide: bool) -> String {
    if wide {
        s.iter().map(|a| a.to_string()).collect::<Vec<_>>().join(",")
    } else {
        s.iter().map(|a| a.to_string()).collect()
    }
}

pub(crate) fn word_string(w: &[Symbol]) -> String {
    symbols_string(w, w.iter().any(|&a| a > 9))
}

#[cfg(test)]
mod tests;
