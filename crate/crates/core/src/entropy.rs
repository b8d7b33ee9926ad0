//! Topological entropy of one-dimensional subshifts (natural logarithm).

use num_bigint::BigUint;
use num_traits::{ToPrimitive, Zero};
use serde::{Serialize, Serializer};

use crate::error::{invalid, EdenError, Result};
use crate::lattice::{metric_radius, Symbol};
use crate::specification::gluing_analysis;
use crate::subshift::{Dfa, Subshift};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum EntropyMethod {
    ExactPerron,
    SepEstimate { n: u64 },
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EntropyValue {
    pub value: f64,
    pub method: EntropyMethod,
    pub error_bound: f64,
}

/// Iteration cap for the eigenvalue enclosure.
const MAX_ITER: usize = 200_000;
const TARGET_WIDTH: f64 = 1e-10;

/// Collatz–Wielandt enclosure `[lo, hi]` of the Perron root of an
/// irreducible nonnegative matrix, given as adjacency lists with
/// multiplicity. Iterates with `M + I` so periodic components converge.
fn perron_enclosure(adj: &[Vec<usize>]) -> (f64, f64) {
    let n = adj.len();
    let mut v = vec![1.0f64; n];
    let mut w = vec![0.0f64; n];
    let (mut lo, mut hi) = (0.0f64, f64::INFINITY);
    for _ in 0..MAX_ITER {
        for (i, out) in adj.iter().enumerate() {
            w[i] = out.iter().map(|&j| v[j]).sum();
        }
        let (mut a, mut b) = (f64::INFINITY, 0.0f64);
        for i in 0..n {
            let r = w[i] / v[i];
            a = a.min(r);
            b = b.max(r);
        }
        lo = lo.max(a);
        hi = hi.min(b);
        if lo > 0.0 && hi.ln() - lo.ln() <= TARGET_WIDTH {
            break;
        }
        let mut norm = 0.0f64;
        for i in 0..n {
            v[i] += w[i];
            norm = norm.max(v[i]);
        }
        v.iter_mut().for_each(|x| *x /= norm);
    }
    (lo, hi)
}

/// Bounds on the spectral radius of the edge-count matrix of `g`.
fn spectral_radius(g: &Dfa) -> (f64, f64) {
    let comp = g.components();
    let ncomp = comp.iter().copied().max().map_or(0, |m| m + 1);
    let mut best = (0.0f64, 0.0f64);
    for c in 0..ncomp {
        let members: Vec<usize> = (0..g.n).filter(|&q| comp[q] == c).collect();
        let local = |q: usize| members.binary_search(&q).ok();
        let adj: Vec<Vec<usize>> = members
            .iter()
            .map(|&q| (0..g.k).filter_map(|a| g.step(q, a as Symbol).and_then(local)).collect())
            .collect();
        if adj.iter().all(Vec::is_empty) {
            continue;
        }
        let (lo, hi) = perron_enclosure(&adj);
        best = (best.0.max(lo), best.1.max(hi));
    }
    best
}

/// `log λ` for the right-resolving presentation's transition matrix.
pub fn entropy_exact_1d(x: &Subshift) -> Result<EntropyValue> {
    x.require_dim1("exact entropy")?;
    let pres = x.presentation()?;
    if pres.rr.n == 0 {
        return Err(invalid("the subshift is empty"));
    }
    let (lo, hi) = spectral_radius(&pres.rr);
    let (a, b) = (lo.ln(), hi.ln());
    Ok(EntropyValue { value: ((a + b) / 2.0).max(0.0), method: EntropyMethod::ExactPerron, error_bound: (b - a) / 2.0 })
}

pub(crate) fn ln_big(n: &BigUint) -> f64 {
    let bits = n.bits();
    if bits <= 1000 {
        return n.to_f64().expect("finite").ln();
    }
    let shift = bits - 64;
    (n >> shift).to_f64().expect("finite").ln() + shift as f64 * std::f64::consts::LN_2
}

/// `|L(X, [-n, n] + [-m, m])|` with `m` the metric radius of `eps`: the
/// number of agreement classes of `ρ_{F_n}` at scale `eps`.
pub fn sep_count(x: &Subshift, n: u64, eps: f64) -> Result<BigUint> {
    x.require_dim1("separated-set counts")?;
    let m = metric_radius(eps)? as u64;
    let len = 2 * (n + m) + 1;
    crate::capacity::check(len as usize, "separated-set window length")?;
    x.count_words(len as usize)
}

/// `log sep_count(X, n, eps) / (2n + 1)`, with error bound
/// `log|A| · (2m + 1) / max(n, 1)`.
pub fn entropy_estimate(x: &Subshift, n: u64, eps: f64) -> Result<EntropyValue> {
    let count = sep_count(x, n, eps)?;
    if count.is_zero() {
        return Err(invalid("the subshift is empty"));
    }
    let m = metric_radius(eps)? as f64;
    let value = ln_big(&count) / (2 * n + 1) as f64;
    let error_bound = (x.alphabet_size() as f64).ln() * (2.0 * m + 1.0) / n.max(1) as f64;
    Ok(EntropyValue { value, method: EntropyMethod::SepEstimate { n }, error_bound })
}

fn big_string<S: Serializer>(n: &BigUint, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&n.to_string())
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EntropyGapBound {
    /// `log(1 + 1/sep) / |F|`.
    pub bound: f64,
    pub eta: f64,
    /// `F = [-half_width, half_width]`.
    pub half_width: u64,
    /// Strong-irreducibility gap of `Y` the window is built from.
    pub gap: usize,
    #[serde(serialize_with = "big_string")]
    pub sep: BigUint,
    /// A shortest word of `Y` that `Z` forbids.
    pub separating_word: Vec<Symbol>,
}

/// Largest `2^{-k}` below both a tenth of the expansive constant (1 for
/// subshifts) and the distance from `Z` of a point of `Y` carrying the
/// shortest word `w` of `Y` outside `Z` centered at the origin.
pub fn gap_eta(y: &Subshift, z: &Subshift) -> Result<(f64, Vec<Symbol>)> {
    if z.inclusion_witness(y)?.is_some() {
        return Err(invalid("Z is not contained in Y"));
    }
    let w = y
        .inclusion_witness(z)?
        .ok_or_else(|| invalid("Z equals Y; the gap bound needs a proper subshift"))?;
    // Centered, `w` reaches `⌈(|w| - 1) / 2⌉` from the origin.
    let k = 4.max(w.len() as i32 / 2);
    Ok((2f64.powi(-k), w))
}

/// Lower bound on `h(Y) - h(Z)` for a proper subshift `Z` of a strongly
/// irreducible `Y`. The window is `F = [-g', g']` with `g' = g + 2m`, `g`
/// the gluing gap of `Y` and `m` the metric radius of `eta / 4`; `eta`
/// must not exceed the value from [`gap_eta`].
pub fn entropy_gap_bound(y: &Subshift, z: &Subshift, eta: f64) -> Result<EntropyGapBound> {
    y.require_dim1("entropy gap bounds")?;
    z.require_dim1("entropy gap bounds")?;
    if y.is_empty()? || z.is_empty()? {
        return Err(invalid("both subshifts must be nonempty"));
    }
    let (max_eta, w) = gap_eta(y, z)?;
    if !(eta > 0.0 && eta <= max_eta) {
        return Err(invalid(format!("eta must lie in (0, {max_eta}]")));
    }
    let (gap, _, _) = gluing_analysis(y)?;
    let gap = gap.ok_or_else(|| EdenError::Inconclusive("Y is not strongly irreducible".into()))?;
    let m = metric_radius(eta / 4.0)? as u64;
    let half_width = gap as u64 + 2 * m;
    let sep = sep_count(z, half_width, eta)?;
    let inv = 1.0 / sep.to_f64().unwrap_or(f64::INFINITY);
    let bound = inv.ln_1p() / (2 * half_width + 1) as f64;
    Ok(EntropyGapBound { bound, eta, half_width, gap, sep, separating_word: w })
}

#[cfg(test)]
mod tests;
