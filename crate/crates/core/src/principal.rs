//! Principal algebraic actions of `ℤ`: the shift on `X_f`, the set of
//! `x ∈ (ℝ/ℤ)^ℤ` with `f·x ≡ 0`, for a Laurent polynomial `f`.
//!
//! When `f` has no root on the unit circle its inverse `w` in `ℓ¹(ℤ)`
//! decays geometrically, `w mod 1` is a homoclinic point, and integer
//! combinations of its translates can be glued to shadow finitely many
//! targets at once.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rustfft::FftPlanner;
use serde::Serialize;

use crate::error::{capacity, invalid, EdenError, Result};
use crate::poly::LaurentPoly;

/// Distance from `a` to the nearest integer.
pub fn dist_mod1(a: f64) -> f64 {
    let r = a - a.floor();
    r.min(1.0 - r)
}

fn frac(a: f64) -> f64 {
    let r = a - a.floor();
    if r >= 1.0 {
        0.0
    } else {
        r
    }
}

/// Roots of `t^{-offset} f` (all nonzero), from the companion matrix.
pub fn roots(f: &LaurentPoly) -> Result<Vec<Complex64>> {
    if f.is_zero() {
        return Err(invalid("the zero polynomial"));
    }
    let c = f.coeffs();
    let d = c.len() - 1;
    if d == 0 {
        return Ok(Vec::new());
    }
    let lead = c[d] as f64;
    let m = DMatrix::from_fn(d, d, |i, j| {
        if j == d - 1 {
            -(c[i] as f64) / lead
        } else if i == j + 1 {
            1.0
        } else {
            0.0
        }
    });
    let mut r: Vec<Complex64> = m.complex_eigenvalues().iter().copied().collect();
    r.sort_by(|a, b| a.norm().total_cmp(&b.norm()).then(a.arg().total_cmp(&b.arg())));
    Ok(r)
}

#[derive(Clone, Copy, Debug)]
struct Span {
    lower: f64,
    lo: f64,
    hi: f64,
}

impl PartialEq for Span {
    fn eq(&self, o: &Self) -> bool {
        self.lower == o.lower
    }
}
impl Eq for Span {}
impl PartialOrd for Span {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}
impl Ord for Span {
    fn cmp(&self, o: &Self) -> Ordering {
        o.lower.total_cmp(&self.lower)
    }
}

/// Certified enclosure of `min |f|` on the circle `|z| = r`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct CircleMin {
    pub lower: f64,
    pub upper: f64,
    /// Argument where `upper` is attained.
    pub theta: f64,
}

/// Branch and bound over arcs, using `|d/dθ f(re^{iθ})| ≤ Σ |k c_k| r^k`.
pub fn circle_min(f: &LaurentPoly, r: f64) -> CircleMin {
    let lip: f64 = f.terms().map(|(k, c)| (k as f64).abs() * (c as f64).abs() * r.powi(k as i32)).sum();
    let scale: f64 = f.terms().map(|(k, c)| (c as f64).abs() * r.powi(k as i32)).sum();
    let slack = 1e-13 * scale;
    let at = |t: f64| f.eval(Complex64::from_polar(r, t)).norm();
    let tau = std::f64::consts::TAU;
    let pieces = 256;
    let mut heap = BinaryHeap::new();
    let (mut upper, mut theta) = (f64::INFINITY, 0.0);
    let push = |heap: &mut BinaryHeap<Span>, lo: f64, hi: f64, upper: &mut f64, theta: &mut f64| {
        let mid = (lo + hi) / 2.0;
        let v = at(mid);
        if v < *upper {
            *upper = v;
            *theta = mid;
        }
        heap.push(Span { lower: v - lip * (hi - lo) / 2.0 - slack, lo, hi });
    };
    for i in 0..pieces {
        let (lo, hi) = (tau * i as f64 / pieces as f64, tau * (i + 1) as f64 / pieces as f64);
        push(&mut heap, lo, hi, &mut upper, &mut theta);
    }
    for _ in 0..2_000_000 {
        let a = heap.pop().expect("arcs remain");
        if upper - a.lower <= 1e-3 * upper || a.hi - a.lo < 1e-13 {
            return CircleMin { lower: a.lower, upper, theta };
        }
        let mid = (a.lo + a.hi) / 2.0;
        push(&mut heap, a.lo, mid, &mut upper, &mut theta);
        push(&mut heap, mid, a.hi, &mut upper, &mut theta);
    }
    let lower = heap.peek().map_or(upper, |a| a.lower);
    CircleMin { lower, upper, theta }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Invertibility {
    pub invertible: bool,
    /// Certified lower bound on `|f|` over the unit circle (0 when not invertible).
    pub margin: f64,
    /// A root on (or numerically at) the unit circle.
    pub witness: Option<[f64; 2]>,
    pub roots: Vec<[f64; 2]>,
}

/// Whether `f` is invertible in `ℓ¹(ℤ)`, i.e. has no zero on the unit circle.
pub fn is_l1_invertible(f: &LaurentPoly) -> Result<Invertibility> {
    let rs = roots(f)?;
    let m = circle_min(f, 1.0);
    let pairs = rs.iter().map(|z| [z.re, z.im]).collect();
    if m.lower > 0.0 {
        return Ok(Invertibility { invertible: true, margin: m.lower, witness: None, roots: pairs });
    }
    let near = rs
        .iter()
        .min_by(|a, b| (a.norm() - 1.0).abs().total_cmp(&(b.norm() - 1.0).abs()))
        .map(|z| z / z.norm())
        .unwrap_or_else(|| Complex64::from_polar(1.0, m.theta));
    let snap = |v: f64| if (v - v.round()).abs() < 1e-9 { v.round() + 0.0 } else { v };
    Ok(Invertibility { invertible: false, margin: 0.0, witness: Some([snap(near.re), snap(near.im)]), roots: pairs })
}

/// Certified decay of the inverse: `|w_n| ≤ C ρ^{|n|}` for every listed
/// `(ρ, C)`; `rate` and `constant` are the pair with the smallest `ρ`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Decay {
    pub rate: f64,
    pub constant: f64,
    pub bounds: Vec<(f64, f64)>,
}

impl Decay {
    pub fn at(&self, n: i64) -> f64 {
        let n = n.unsigned_abs().min(i32::MAX as u64) as i32;
        self.bounds.iter().map(|&(r, c)| c * r.powi(n)).fold(f64::INFINITY, f64::min)
    }

    /// Bound on `Σ_{|n| > m} |w_n|`.
    pub fn tail(&self, m: u64) -> f64 {
        self.bounds
            .iter()
            .map(|&(r, c)| if r == 0.0 { 0.0 } else { 2.0 * c * r.powf(m as f64 + 1.0) / (1.0 - r) })
            .fold(f64::INFINITY, f64::min)
    }
}

/// Fractions of the gap between the root annulus and the unit circle used
/// as candidate decay rates.
const RATE_STEPS: [f64; 8] = [1e-6, 1e-3, 0.01, 0.03, 0.1, 0.2, 0.35, 0.5];

/// Decay from the root annulus. For `ρ` above the largest root modulus
/// inside the disk and the inverse smallest outside, Cauchy's estimate on
/// `|z| = ρ^{∓1}` gives `|w_n| ≤ ρ^{|n|} / min |f|` there.
pub fn certified_decay(f: &LaurentPoly) -> Result<Decay> {
    let inv = is_l1_invertible(f)?;
    if !inv.invertible {
        return Err(invalid(format!("{f} has a root on the unit circle")));
    }
    let rs = roots(f)?;
    if rs.is_empty() {
        let c = 1.0 / (f.coeffs()[0] as f64).abs();
        return Ok(Decay { rate: 0.0, constant: c, bounds: vec![(0.0, c)] });
    }
    let inner = rs.iter().map(|z| z.norm()).filter(|&m| m < 1.0).fold(0.0, f64::max);
    let outer = rs.iter().map(|z| z.norm()).filter(|&m| m > 1.0).fold(f64::INFINITY, f64::min);
    let base = inner.max(1.0 / outer);
    let mut bounds = Vec::new();
    for t in RATE_STEPS {
        let rate = base + t * (1.0 - base);
        let m_out = circle_min(f, 1.0 / rate).lower;
        let m_in = circle_min(f, rate).lower;
        if m_out > 0.0 && m_in > 0.0 {
            bounds.push((rate, (1.0 / m_out).max(1.0 / m_in)));
        }
    }
    let &(rate, constant) = bounds
        .first()
        .ok_or_else(|| EdenError::Invariant(format!("no decay circle of {f} separates the roots")))?;
    Ok(Decay { rate, constant, bounds })
}

/// Truncated inverse `w` of `f` in `ℓ¹(ℤ)` on `[-range, range]`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SummableHomoclinic {
    pub poly: String,
    pub range: u64,
    /// `w_{-range}, …, w_{range}`.
    pub coefficients: Vec<f64>,
    /// Certified bound on `Σ_{|n| > range} |w_n|`.
    pub tail_bound: f64,
    /// `‖f * w − δ₀‖₁` for the truncation.
    pub residual: f64,
    pub decay: Decay,
    pub fft_size: usize,
}

impl SummableHomoclinic {
    pub fn at(&self, n: i64) -> f64 {
        if n.unsigned_abs() > self.range {
            0.0
        } else {
            self.coefficients[(n + self.range as i64) as usize]
        }
    }

    pub fn l1_norm(&self) -> f64 {
        self.coefficients.iter().map(|c| c.abs()).sum()
    }
}

/// `‖f * w − δ₀‖₁` for `w` given on `[-m, m]`.
fn inverse_residual(f: &LaurentPoly, w: &[f64], m: i64) -> f64 {
    let mut conv = vec![0.0f64; w.len() + f.coeffs().len() - 1];
    let base = -m + f.offset();
    for (i, &c) in f.coeffs().iter().enumerate() {
        for (j, &x) in w.iter().enumerate() {
            conv[i + j] += c as f64 * x;
        }
    }
    conv.iter()
        .enumerate()
        .map(|(i, &v)| if base + i as i64 == 0 { (v - 1.0).abs() } else { v.abs() })
        .sum()
}

/// Inverse by discrete Fourier analysis of `1/f` on the unit circle, with
/// `range` chosen from the certified decay so that the error terms fit in `tol`.
pub fn l1_inverse(f: &LaurentPoly, tol: f64) -> Result<SummableHomoclinic> {
    l1_inverse_with_range(f, tol, None)
}

pub fn l1_inverse_with_range(f: &LaurentPoly, tol: f64, range: Option<u64>) -> Result<SummableHomoclinic> {
    if !(tol > 0.0) {
        return Err(invalid("the tolerance must be positive"));
    }
    let decay = certified_decay(f)?;
    let norm = f.l1_norm();
    let mut m = 0u64;
    while decay.tail(m) * (1.0 + norm) > tol / 2.0 {
        m += 1;
        crate::capacity::check(4 * m as usize, "inverse truncation range")?;
    }
    if let Some(r) = range {
        m = m.max(r);
    }
    let mut n = (4 * m as usize).max(16).next_power_of_two();
    loop {
        crate::capacity::check(n, "Fourier sample count")?;
        let mut buf: Vec<Complex64> = (0..n)
            .map(|j| Complex64::new(1.0, 0.0) / f.eval(Complex64::from_polar(1.0, std::f64::consts::TAU * j as f64 / n as f64)))
            .collect();
        FftPlanner::new().plan_fft_forward(n).process(&mut buf);
        let mi = m as i64;
        let coefficients: Vec<f64> = (-mi..=mi).map(|k| buf[k.rem_euclid(n as i64) as usize].re / n as f64).collect();
        let residual = inverse_residual(f, &coefficients, mi);
        let tail_bound = decay.tail(m);
        if residual + tail_bound <= tol {
            return Ok(SummableHomoclinic {
                poly: f.to_string(),
                range: m,
                coefficients,
                tail_bound,
                residual,
                decay,
                fft_size: n,
            });
        }
        if n >= 1 << 24 {
            return Err(capacity(format!("tolerance {tol} not reached: residual {residual:e}")));
        }
        n *= 2;
    }
}

/// A point `x = (w * g) mod 1` of `X_f` for an integer combination `g` of
/// translates, given on `[start, start + values.len())`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PrincipalPoint {
    pub poly: String,
    /// `(shift k, coefficient c)`: `g = Σ c t^k`.
    pub generator: Vec<(i64, i64)>,
    pub start: i64,
    /// Representatives in `[0, 1)`.
    pub values: Vec<f64>,
    /// `max dist((f * x)_n, ℤ)` over `n` whose stencil is represented.
    pub relation_residual: f64,
    /// `Σ dist(x_n, 0)` over the represented range.
    pub summed_distance: f64,
    /// Bound on `Σ dist(x_n, 0)` outside the represented range.
    pub tail_bound: f64,
}

impl PrincipalPoint {
    pub fn at(&self, n: i64) -> Option<f64> {
        let i = n - self.start;
        (i >= 0 && (i as usize) < self.values.len()).then(|| self.values[i as usize])
    }
}

/// `Σ_k c_k w_{n-k}`.
fn combine(w: &SummableHomoclinic, g: &[(i64, i64)], n: i64) -> f64 {
    g.iter().map(|&(k, c)| c as f64 * w.at(n - k)).sum()
}

fn build_point(f: &LaurentPoly, w: &SummableHomoclinic, g: &[(i64, i64)], lo: i64, hi: i64) -> PrincipalPoint {
    let raw: Vec<f64> = (lo..=hi).map(|n| combine(w, g, n)).collect();
    let values: Vec<f64> = raw.iter().map(|&v| frac(v)).collect();
    let mut relation_residual = 0.0f64;
    for n in lo + f.top()..=hi + f.offset() {
        let s: f64 = f.terms().map(|(k, c)| c as f64 * raw[(n - k - lo) as usize]).sum();
        relation_residual = relation_residual.max(dist_mod1(s));
    }
    let gnorm: f64 = g.iter().map(|&(_, c)| (c as f64).abs()).sum();
    let (gmin, gmax) = (g.iter().map(|p| p.0).min().unwrap_or(0), g.iter().map(|p| p.0).max().unwrap_or(0));
    let reach = (gmin - lo).min(hi - gmax).max(0) as u64;
    PrincipalPoint {
        poly: f.to_string(),
        generator: g.to_vec(),
        start: lo,
        summed_distance: values.iter().map(|&v| dist_mod1(v)).sum(),
        values,
        relation_residual,
        tail_bound: gnorm * (w.decay.tail(reach) + w.tail_bound),
    }
}

/// `w mod 1` on `[-range, range]`.
pub fn fundamental_homoclinic(f: &LaurentPoly, tol: f64, range: Option<u64>) -> Result<PrincipalPoint> {
    let w = l1_inverse_with_range(f, tol, range)?;
    let m = w.range as i64;
    let p = build_point(f, &w, &[(0, 1)], -m, m);
    if p.relation_residual > tol {
        return Err(EdenError::Invariant(format!("relation residual {} exceeds {tol}", p.relation_residual)));
    }
    Ok(p)
}

/// A gluing target: the window `[lo, hi]` of the point `(w * g) mod 1`.
#[derive(Clone, Debug, PartialEq, Serialize, serde::Deserialize)]
pub struct Target {
    pub lo: i64,
    pub hi: i64,
    /// `(shift, integer coefficient)` pairs defining `g`.
    pub combination: Vec<(i64, i64)>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GluedWindow {
    pub lo: i64,
    pub hi: i64,
    /// Target values on the window, in `[0, 1)`.
    pub target: Vec<f64>,
    /// Integer coefficients placed on `[lo - margin, hi + margin]`.
    pub margin: u64,
    pub coefficients: Vec<i64>,
    /// `max dist(x_s − target_s, ℤ)` over the window, including truncation error.
    pub achieved: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GlueResult {
    pub eps: f64,
    pub point: PrincipalPoint,
    pub windows: Vec<GluedWindow>,
    /// Smallest gap between windows.
    pub separation: i64,
    /// Gap beyond which the decay bound alone keeps interference below `eps / 2`.
    pub required_separation: i64,
}

/// Glues the targets into one point of `X_f` within `eps` on every window.
///
/// Each window's coefficients are the rounded solution of the Toeplitz
/// system `Σ_k c_k w_{s−k} = x̃_s` over the window widened by a margin,
/// `x̃ = w * g` the real lift of the target point; the margin grows until rounding
/// costs at most `eps / 4` on the window. Everything is re-verified.
pub fn glue_specification(f: &LaurentPoly, targets: &[Target], eps: f64) -> Result<GlueResult> {
    if !(eps > 0.0 && eps < 0.5) {
        return Err(invalid("eps must lie in (0, 1/2)"));
    }
    if targets.is_empty() {
        return Err(invalid("no targets"));
    }
    let mut order: Vec<&Target> = targets.iter().collect();
    order.sort_by_key(|t| t.lo);
    for t in &order {
        if t.lo > t.hi || t.combination.is_empty() {
            return Err(invalid("a target needs lo <= hi and a nonempty combination"));
        }
    }
    let separation = order.windows(2).map(|p| p[1].lo - p[0].hi - 1).min().unwrap_or(i64::MAX);
    if separation < 0 {
        return Err(invalid("target windows overlap"));
    }
    let tol = (eps * 1e-6).min(1e-10);
    let w = l1_inverse(f, tol)?;
    let decay = w.decay.clone();
    let mut windows = Vec::new();
    for t in targets {
        let target: Vec<f64> = (t.lo..=t.hi).map(|s| frac(combine(&w, &t.combination, s))).collect();
        let mut margin = 1u64;
        let coefficients = loop {
            let c = solve_window(&w, t, margin)?;
            let g: Vec<(i64, i64)> = c.iter().enumerate().map(|(i, &v)| (t.lo - margin as i64 + i as i64, v)).collect();
            let err = (t.lo..=t.hi)
                .zip(&target)
                .map(|(s, &v)| dist_mod1(combine(&w, &g, s) - v))
                .fold(0.0, f64::max);
            if err <= eps / 4.0 {
                break c;
            }
            margin += 1;
            crate::capacity::check(margin as usize, "gluing margin")?;
            if margin > 4096 {
                return Err(capacity("gluing margin exceeds 4096"));
            }
        };
        windows.push(GluedWindow { lo: t.lo, hi: t.hi, target, margin, coefficients, achieved: 0.0 });
    }
    let generator: Vec<(i64, i64)> = windows
        .iter()
        .flat_map(|gw| {
            let base = gw.lo - gw.margin as i64;
            gw.coefficients.iter().enumerate().filter(|(_, &c)| c != 0).map(move |(i, &c)| (base + i as i64, c))
        })
        .collect();
    let gnorm: f64 = generator.iter().map(|&(_, c)| (c as f64).abs()).sum();
    let tnorm = targets.iter().flat_map(|t| &t.combination).map(|&(_, c)| (c as f64).abs()).fold(0.0, f64::max);
    let trunc = (gnorm + tnorm) * decay.at(w.range as i64 + 1);
    for gw in &mut windows {
        gw.achieved = (gw.lo..=gw.hi)
            .zip(&gw.target)
            .map(|(s, &v)| dist_mod1(combine(&w, &generator, s) - v))
            .fold(0.0, f64::max)
            + trunc;
    }
    let max_margin = windows.iter().map(|g| g.margin).max().unwrap_or(0) as i64;
    let interference = |d: i64| -> f64 {
        windows
            .iter()
            .map(|g| {
                // How far the nonzero coefficients reach past the window.
                let base = g.lo - g.margin as i64;
                let reach = g
                    .coefficients
                    .iter()
                    .enumerate()
                    .filter(|(_, &c)| c != 0)
                    .map(|(i, _)| (g.lo - (base + i as i64)).max(base + i as i64 - g.hi).max(0))
                    .max()
                    .unwrap_or(0);
                g.coefficients.iter().map(|c| c.unsigned_abs() as f64).sum::<f64>() * decay.at((d + 1 - reach).max(0))
            })
            .sum()
    };
    let mut required_separation = 0i64;
    while interference(required_separation) > eps / 2.0 && required_separation < 1 << 20 {
        required_separation += 1;
    }
    let lo = windows.iter().map(|g| g.lo).min().expect("targets") - max_margin;
    let hi = windows.iter().map(|g| g.hi).max().expect("targets") + max_margin;
    let point = build_point(f, &w, &generator, lo, hi);
    if let Some(bad) = windows.iter().find(|g| g.achieved > eps) {
        return Err(invalid(format!(
            "windows too close for eps = {eps}: window [{}, {}] is off by {:.3e}; separation {separation} < required {required_separation}",
            bad.lo, bad.hi, bad.achieved
        )));
    }
    Ok(GlueResult { eps, point, windows, separation, required_separation })
}

/// Rounded solution of the Toeplitz system over the widened window.
fn solve_window(w: &SummableHomoclinic, t: &Target, margin: u64) -> Result<Vec<i64>> {
    let lo = t.lo - margin as i64;
    let len = (t.hi - t.lo + 1) as usize + 2 * margin as usize;
    crate::capacity::check(len * len, "Toeplitz system size")?;
    let a = DMatrix::from_fn(len, len, |i, j| w.at(i as i64 - j as i64));
    // The lift is the real sequence `w * g`, not its reduction mod 1.
    let b = DVector::from_fn(len, |i, _| combine(w, &t.combination, lo + i as i64));
    let c = a
        .lu()
        .solve(&b)
        .ok_or_else(|| EdenError::Invariant("singular Toeplitz system".into()))?;
    Ok(c.iter().map(|v| v.round() as i64).collect())
}

#[cfg(test)]
mod tests;
