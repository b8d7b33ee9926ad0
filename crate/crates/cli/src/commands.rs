use std::path::Path;

use eden_core::ca::{
    bounded_erasable_search, bounded_goe_search, classify, parse_shorthand, survey, BlockCode, ErasablePair, Verdict,
};
use eden_core::entropy::{entropy_estimate, entropy_exact_1d, entropy_gap_bound, gap_eta};
use eden_core::poly::LaurentPoly;
use eden_core::principal::{
    fundamental_homoclinic, glue_specification, is_l1_invertible, l1_inverse_with_range, Target,
};
use eden_core::specification::{
    gluing_analysis, ie_density_bound, independence_density, strong_irreducibility_gap, strong_irreducibility_report,
    weak_specification_check, weak_specification_gap, WspecBounds,
};
use eden_core::subshift::parse_subshift;
use eden_core::{corpus, Pattern, ShiftKind, Subshift, Symbol, Window};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use crate::args::{CaCommand, ClassifyArgs, Command, EntropyArgs, PrincipalCommand, ShiftCommand, SpecCommand, SurveyArgs};
use crate::{Failure, Outcome};

type Run = Result<Outcome, Failure>;

pub fn run(cmd: &Command) -> Run {
    match cmd {
        Command::Ca(CaCommand::Classify(a)) => ca_classify(a),
        Command::Ca(CaCommand::Survey(a)) => ca_survey(a),
        Command::Shift(ShiftCommand::Info { shift, words }) => shift_info(shift, *words),
        Command::Spec(SpecCommand::Gap { shift, max_gap, max_len }) => spec_gap(shift, *max_gap, *max_len),
        Command::Spec(SpecCommand::Wspec { shift, eps, gap, max_gap, max_box_len }) => {
            spec_wspec(shift, eps, *gap, *max_gap, *max_box_len)
        }
        Command::Spec(SpecCommand::Independence { shift, window, cylinders }) => {
            spec_independence(shift, window, cylinders)
        }
        Command::Entropy(a) => entropy(a),
        Command::Principal(PrincipalCommand::Check { poly }) => principal_check(poly),
        Command::Principal(PrincipalCommand::Homoclinic { poly, tol, range }) => principal_homoclinic(poly, tol, *range),
        Command::Principal(PrincipalCommand::Glue { poly, targets, eps }) => principal_glue(poly, targets, eps),
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| Failure::invalid(format!("cannot read {}: {e}", path.display())))
}

/// A corpus name (`-shift` suffix optional) or a subshift file.
pub fn load_shift(s: &str) -> Result<Subshift, Failure> {
    if let Ok(x) = corpus::get(s) {
        return Ok(x);
    }
    if let Some(x) = s.strip_suffix("-shift").and_then(|n| corpus::get(n).ok()) {
        return Ok(x);
    }
    let path = Path::new(s);
    if path.exists() {
        return Ok(parse_subshift(&read(path)?)?);
    }
    let names: Vec<&str> = corpus::names().collect();
    Err(Failure::invalid(format!("`{s}` is neither a corpus subshift ({}) nor a file", names.join(", "))))
}

/// `0.25`, `1e-3`, `1/64` or `2^-6`.
pub fn parse_real(s: &str) -> Result<f64, Failure> {
    let bad = || Failure::invalid(format!("cannot read `{s}` as a number"));
    let s = s.trim();
    if let Some((b, e)) = s.split_once('^') {
        let b: f64 = b.trim().parse().map_err(|_| bad())?;
        let e: i32 = e.trim().parse().map_err(|_| bad())?;
        return Ok(b.powi(e));
    }
    if let Some((p, q)) = s.split_once('/') {
        let p: f64 = p.trim().parse().map_err(|_| bad())?;
        let q: f64 = q.trim().parse().map_err(|_| bad())?;
        return Ok(p / q);
    }
    s.parse().map_err(|_| bad())
}

/// `lo..hi` or a comma-separated list of cells.
fn parse_window(s: &str) -> Result<Window, Failure> {
    let bad = || Failure::invalid(format!("cannot read `{s}` as a window"));
    if let Some((lo, hi)) = s.split_once("..") {
        let lo: i64 = lo.trim().parse().map_err(|_| bad())?;
        let hi: i64 = hi.trim().parse().map_err(|_| bad())?;
        if lo > hi {
            return Err(bad());
        }
        return Ok(Window::interval(lo, hi));
    }
    let points = s.split(',').map(|p| p.trim().parse::<i64>()).collect::<Result<Vec<_>, _>>().map_err(|_| bad())?;
    Ok(Window::from_points(&points))
}

fn to_value<T: serde::Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("serializable")
}

fn load_code(a: &ClassifyArgs) -> Result<BlockCode, Failure> {
    if let Some(code) = parse_shorthand(&a.rule)? {
        return Ok(code);
    }
    let domain = a
        .shift
        .as_deref()
        .ok_or_else(|| Failure::invalid(format!("`{}` is not a shorthand; a rule file needs --shift", a.rule)))
        .and_then(load_shift)?;
    let codomain = match &a.codomain {
        Some(c) => load_shift(c)?,
        None => domain.clone(),
    };
    Ok(BlockCode::parse_rule(&read(Path::new(&a.rule))?, domain, codomain)?)
}

/// Number of random admissible surroundings (out of 20 wanted) in which the
/// pair's images agree; `None` if some surrounding separates them.
fn replay_pair(code: &BlockCode, pair: &ErasablePair, seed: u64) -> Result<Option<usize>, Failure> {
    let (Some((_, w1)), Some((_, w2))) = (pair.first.as_word(), pair.second.as_word()) else {
        return Ok(Some(0));
    };
    let x = code.domain();
    let (lo, hi) = code.neighborhood().as_interval().unwrap_or((0, 0));
    let side = 2 * (hi - lo).max(1) as usize;
    let k = x.alphabet_size() as Symbol;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut agreed = 0;
    for _ in 0..100_000 {
        let l: Vec<Symbol> = (0..side).map(|_| rng.gen_range(0..k)).collect();
        let r: Vec<Symbol> = (0..side).map(|_| rng.gen_range(0..k)).collect();
        let z1: Vec<Symbol> = l.iter().chain(w1).chain(&r).copied().collect();
        let z2: Vec<Symbol> = l.iter().chain(w2).chain(&r).copied().collect();
        if !x.allows_word(&z1)? || !x.allows_word(&z2)? {
            continue;
        }
        if code.apply_pattern(&Pattern::word(0, &z1))? != code.apply_pattern(&Pattern::word(0, &z2))? {
            return Ok(None);
        }
        agreed += 1;
        if agreed == 20 {
            break;
        }
    }
    Ok(Some(agreed))
}

fn ca_classify(a: &ClassifyArgs) -> Run {
    let code = load_code(a)?;
    let mut result = json!({
        "subject": a.rule,
        "domain": code.domain().label(),
        "codomain": code.codomain().label(),
        "neighborhood": to_value(code.neighborhood()),
        "rule_id": code.rule_id().to_string(),
    });
    if code.domain().dim() == 1 {
        let c = classify(&code)?;
        let mut replay = Value::Null;
        if let Some(pair) = &c.erasable {
            match replay_pair(&code, pair, a.seed)? {
                Some(n) => replay = json!({ "seed": a.seed, "agreeing_surroundings": n }),
                None => return Err(Failure { code: 5, message: "erasable pair separated by a random surrounding".into() }),
            }
        }
        merge(&mut result, to_value(&c));
        result["method"] = json!("exact");
        result["replay"] = replay;
        return Ok(Outcome::ok("ca classify", result));
    }
    let side = a
        .bounded
        .ok_or_else(|| Failure::invalid("two-dimensional codes need --bounded <side> for the bounded searches"))?;
    let goe = bounded_goe_search(&code, side)?;
    let erasable = bounded_erasable_search(&code, side)?;
    let found = |b: bool| if b { Verdict::No } else { Verdict::Inconclusive };
    let surjective = found(goe.witness.is_some());
    let pre = found(erasable.witness.is_some());
    merge(
        &mut result,
        json!({
            "surjective": surjective,
            "pre_injective": pre,
            "injective": pre,
            "goe": goe.witness,
            "erasable": erasable.witness,
            "flags": [],
            "method": "bounded",
            "bounded": {
                "max_side": side,
                "goe_sides_completed": goe.sides_completed,
                "erasable_sides_completed": erasable.sides_completed,
                "stopped_by_capacity": goe.stopped_by_capacity || erasable.stopped_by_capacity,
            },
        }),
    );
    let mut out = Outcome::ok("ca classify", result);
    if surjective == Verdict::Inconclusive || pre == Verdict::Inconclusive {
        out.code = 4;
        out.note = Some("bounded search found no witness for at least one property".into());
    }
    Ok(out)
}

fn merge(into: &mut Value, from: Value) {
    if let (Value::Object(a), Value::Object(b)) = (into, from) {
        a.extend(b);
    }
}

/// Full shifts and strongly irreducible SFTs, where both implications hold.
fn covered(x: &Subshift) -> Result<bool, Failure> {
    if x.is_full() {
        return Ok(true);
    }
    Ok(x.is_sft() && x.dim() == 1 && matches!(gluing_analysis(x), Ok((Some(_), _, _))))
}

fn ca_survey(a: &SurveyArgs) -> Run {
    let x = load_shift(&a.shift)?;
    let n = match (&a.neighborhood, a.radius) {
        (Some(s), _) => parse_window(s)?,
        (None, Some(r)) if r >= 0 => Window::interval(-r, r),
        (None, Some(_)) => return Err(Failure::invalid("the radius must be nonnegative")),
        (None, None) => Window::interval(-1, 1),
    };
    let s = survey(&x, &n)?;
    let covered = covered(&x)?;
    let sm = &s.summary;
    let flagged = sm.moore_violations + sm.myhill_violations;
    let mut note = format!(
        "{} codes: {} surjective, {} pre-injective, {} injective, {} Moore and {} Myhill violations",
        sm.codes, sm.surjective, sm.pre_injective, sm.injective, sm.moore_violations, sm.myhill_violations
    );
    let code = if covered && flagged > 0 {
        note.push_str("; the theorem covers this subshift, so a flag means a defect");
        5
    } else {
        if flagged > 0 {
            note.push_str("; the theorem does not cover this subshift");
        }
        0
    };
    let result = json!({
        "shift": s.shift,
        "neighborhood": to_value(&s.neighborhood),
        "covered": covered,
        "summary": to_value(&s.summary),
        "rows": to_value(&s.rows),
    });
    Ok(Outcome { command: "ca survey", result, text: Some(s.to_tsv()), code, note: Some(note) })
}

fn shift_info(name: &str, words: usize) -> Run {
    let x = load_shift(name)?;
    let kind = match x.kind() {
        ShiftKind::Full => "full",
        ShiftKind::Sft { .. } => "sft",
        ShiftKind::Sofic { .. } => "sofic",
    };
    let mut result = json!({
        "shift": x.label(),
        "kind": kind,
        "alphabet": x.alphabet_size(),
        "dim": x.dim(),
        "block_length": x.block_length(),
    });
    if x.dim() == 1 {
        let counts = x.word_counts(words)?;
        let presentation = x.determinize()?.graph().map_or(0, |g| g.vertices().len());
        let (gap, _, _) = gluing_analysis(&x)?;
        let h = entropy_exact_1d(&x).ok();
        merge(
            &mut result,
            json!({
                "empty": x.is_empty()?,
                "two_points": x.has_two_points()?,
                "presentation_vertices": presentation,
                "word_counts": counts.iter().skip(1).map(|c| c.to_string()).collect::<Vec<_>>(),
                "gap": gap,
                "entropy": h.map(|h| h.value),
            }),
        );
    } else {
        let sides: Vec<String> = (1..=3i64)
            .map(|s| Ok(x.language_size(&Window::rect(2, &[0, 0], &[s - 1, s - 1])?)?.to_string()))
            .collect::<Result<_, eden_core::EdenError>>()?;
        merge(&mut result, json!({ "box_counts": sides }));
    }
    Ok(Outcome::ok("shift info", result))
}

fn spec_gap(name: &str, max_gap: usize, max_len: usize) -> Run {
    let x = load_shift(name)?;
    let r = strong_irreducibility_report(&x, max_gap, max_len)?;
    let result = json!({
        "shift": x.label(),
        "gap": r.certificate.as_ref().map(|c| c.gap),
        "exact_gap": r.exact_gap,
        "strongly_irreducible": r.exact_gap.is_some(),
        "certificate": to_value(&r.certificate),
        "checked_length": r.checked_length,
        "failures": to_value(&r.failures.iter().take(10).collect::<Vec<_>>()),
    });
    Ok(Outcome::ok("spec gap", result))
}

fn spec_wspec(name: &str, eps: &str, gap: Option<usize>, max_gap: usize, max_box_len: usize) -> Run {
    let x = load_shift(name)?;
    let eps = parse_real(eps)?;
    let bounds = WspecBounds { max_box_len, ..WspecBounds::default() };
    let mut result = json!({ "shift": x.label(), "eps": eps, "bounds": to_value(&bounds) });
    match gap {
        Some(g) => {
            let o = weak_specification_check(&x, eps, g, bounds)?;
            merge(&mut result, json!({ "gap": g, "holds": o.holds, "counterexample": to_value(&o.counterexample) }));
        }
        None => {
            let g = weak_specification_gap(&x, eps, max_gap, bounds)?;
            merge(&mut result, json!({ "gap": g, "holds": g.is_some(), "max_gap": max_gap }));
        }
    }
    Ok(Outcome::ok("spec wspec", result))
}

fn spec_independence(name: &str, window: &str, cylinders: &str) -> Run {
    let x = load_shift(name)?;
    let k = parse_window(window)?;
    let tuple = cylinders
        .split('|')
        .map(|w| {
            let syms = w
                .trim()
                .chars()
                .map(|c| c.to_digit(36).map(|d| d as Symbol))
                .collect::<Option<Vec<_>>>()
                .filter(|s| !s.is_empty())
                .ok_or_else(|| Failure::invalid(format!("bad cylinder word `{w}`")))?;
            Ok(Pattern::word(0, &syms))
        })
        .collect::<Result<Vec<_>, Failure>>()?;
    let r = independence_density(&x, &tuple, &k)?;
    let bound = strong_irreducibility_gap(&x, 10, 16).ok().flatten().map(|c| ie_density_bound(&c));
    let mut result = to_value(&r);
    merge(
        &mut result,
        json!({
            "shift": x.label(),
            "bound": bound.map(|b| format!("{}/{}", b.numer(), b.denom())),
            "meets_bound": bound.map(|b| r.density >= b),
        }),
    );
    Ok(Outcome::ok("spec independence", result))
}

fn entropy(a: &EntropyArgs) -> Run {
    let y = load_shift(&a.shift)?;
    if let Some(z) = &a.below {
        let z = load_shift(z)?;
        let eta = match &a.eta {
            Some(e) => parse_real(e)?,
            None => gap_eta(&y, &z)?.0,
        };
        let b = entropy_gap_bound(&y, &z, eta)?;
        let (hy, hz) = (entropy_exact_1d(&y)?, entropy_exact_1d(&z)?);
        let result = json!({
            "shift": y.label(),
            "subshift": z.label(),
            "value": hy.value,
            "subshift_value": hz.value,
            "difference": hy.value - hz.value,
            "gap_bound": to_value(&b),
        });
        return Ok(Outcome::ok("entropy", result));
    }
    let v = match a.estimate {
        Some(n) => entropy_estimate(&y, n, parse_real(&a.eps)?)?,
        None => entropy_exact_1d(&y)?,
    };
    let mut result = to_value(&v);
    result["shift"] = json!(y.label());
    Ok(Outcome::ok("entropy", result))
}

fn parse_poly(s: &str) -> Result<LaurentPoly, Failure> {
    Ok(s.parse::<LaurentPoly>()?)
}

fn principal_check(poly: &str) -> Run {
    let f = parse_poly(poly)?;
    let r = is_l1_invertible(&f)?;
    let mut result = to_value(&r);
    result["poly"] = json!(f.to_string());
    Ok(Outcome::ok("principal check", result))
}

fn principal_homoclinic(poly: &str, tol: &str, range: Option<u64>) -> Run {
    let f = parse_poly(poly)?;
    let tol = parse_real(tol)?;
    let w = l1_inverse_with_range(&f, tol, range)?;
    let x = fundamental_homoclinic(&f, tol, range)?;
    let result = json!({
        "poly": f.to_string(),
        "tol": tol,
        "inverse": {
            "range": w.range,
            "residual": w.residual,
            "tail_bound": w.tail_bound,
            "l1_norm": w.l1_norm(),
            "decay": to_value(&w.decay),
            "fft_size": w.fft_size,
            "coefficients": w.coefficients,
        },
        "point": to_value(&x),
    });
    Ok(Outcome::ok("principal homoclinic", result))
}

fn principal_glue(poly: &str, targets: &Path, eps: &str) -> Run {
    let f = parse_poly(poly)?;
    let eps = parse_real(eps)?;
    let text = read(targets)?;
    let targets: Vec<Target> = serde_json::from_str(&text)
        .map_err(|e| Failure::invalid(format!("{}: expected a list of targets: {e}", targets.display())))?;
    let r = glue_specification(&f, &targets, eps)?;
    let mut result = to_value(&r);
    result["poly"] = json!(f.to_string());
    result["worst"] = json!(r.windows.iter().map(|w| w.achieved).fold(0.0, f64::max));
    Ok(Outcome::ok("principal glue", result))
}
