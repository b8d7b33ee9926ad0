use super::*;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn poly(s: &str) -> LaurentPoly {
    s.parse().unwrap()
}

fn golden_ratio_poly() -> LaurentPoly {
    poly("-1,3,-1@-1")
}

/// Fourier coefficients of `1/f` by a plain Riemann sum over `n` points.
fn naive_inverse(f: &LaurentPoly, n: usize, k: i64) -> f64 {
    let mut acc = Complex64::new(0.0, 0.0);
    for j in 0..n {
        let th = std::f64::consts::TAU * j as f64 / n as f64;
        acc += Complex64::from_polar(1.0, -(k as f64) * th) / f.eval(Complex64::from_polar(1.0, th));
    }
    acc.re / n as f64
}

#[test]
fn invertibility() {
    let c = is_l1_invertible(&poly("3@0")).unwrap();
    assert!(c.invertible);
    assert!((c.margin - 3.0).abs() < 1e-9);
    let t = is_l1_invertible(&poly("-1,1@0")).unwrap();
    assert!(!t.invertible);
    assert_eq!(t.witness, Some([1.0, 0.0]));
    let g = is_l1_invertible(&golden_ratio_poly()).unwrap();
    assert!(g.invertible);
    // |f(e^{iθ})| = 3 - 2 cos θ ≥ 1.
    assert!(g.margin <= 1.0 && g.margin > 0.99);
    let mut moduli: Vec<f64> = g.roots.iter().map(|z| (z[0] * z[0] + z[1] * z[1]).sqrt()).collect();
    moduli.sort_by(f64::total_cmp);
    let s5 = 5f64.sqrt();
    assert!((moduli[0] - (3.0 - s5) / 2.0).abs() < 1e-12);
    assert!((moduli[1] - (3.0 + s5) / 2.0).abs() < 1e-12);
    assert!(is_l1_invertible(&LaurentPoly::new(vec![], 0)).is_err());
    // t^2 + 1 has roots ±i.
    let q = is_l1_invertible(&poly("1,0,1@0")).unwrap();
    assert!(!q.invertible);
    let w = q.witness.unwrap();
    assert!(w[0].abs() < 1e-9 && (w[1].abs() - 1.0).abs() < 1e-9);
}

#[test]
fn downstream_constructors_refuse_unit_circle_roots() {
    for f in ["-1,1@0", "1,1@0", "1,-1,1@-1"] {
        let f = poly(f);
        assert!(matches!(l1_inverse(&f, 1e-9), Err(EdenError::InvalidInput(_))));
        assert!(fundamental_homoclinic(&f, 1e-9, None).is_err());
        let t = Target { lo: 0, hi: 0, combination: vec![(0, 1)] };
        assert!(glue_specification(&f, &[t], 0.1).is_err());
    }
}

#[test]
fn constant_inverse() {
    let w = l1_inverse(&poly("3@0"), 1e-12).unwrap();
    assert_eq!(w.range, 0);
    assert!((w.at(0) - 1.0 / 3.0).abs() < 1e-15);
    assert!(w.residual < 1e-15);
    assert_eq!(w.tail_bound, 0.0);
    let x = fundamental_homoclinic(&poly("3@0"), 1e-12, Some(2)).unwrap();
    assert_eq!(x.start, -2);
    for n in -2..=2 {
        let want = if n == 0 { 1.0 / 3.0 } else { 0.0 };
        assert!(dist_mod1(x.at(n).unwrap() - want) < 1e-12);
    }
}

#[test]
fn golden_inverse() {
    let f = golden_ratio_poly();
    let s5 = 5f64.sqrt();
    let rho = (3.0 - s5) / 2.0;
    let w = l1_inverse(&f, 1e-10).unwrap();
    assert!(w.residual <= 1e-8, "{}", w.residual);
    assert!(w.residual + w.tail_bound <= 1e-10);
    assert!((w.at(0) - 1.0 / s5).abs() < 1e-9);
    for n in -20i64..=20 {
        let closed = rho.powi(n.abs() as i32) / s5;
        assert!((w.at(n) - closed).abs() < 1e-10, "n = {n}");
        assert!((naive_inverse(&f, 4096, n) - closed).abs() < 1e-10, "n = {n}");
    }
    // Brute-force convolution on |n| ≤ 20.
    for n in -20i64..=20 {
        let v: f64 = f.terms().map(|(k, c)| c as f64 * w.at(n - k)).sum();
        let want = if n == 0 { 1.0 } else { 0.0 };
        assert!((v - want).abs() < 1e-10);
    }
    assert!(w.decay.rate > rho && w.decay.rate < rho + 1e-5);
    for n in [10i64, 20, 40, -10, -20, -40] {
        assert!(w.at(n).abs() <= w.decay.at(n));
    }
}

#[test]
fn one_sided_inverse() {
    let f = poly("2,-1@0");
    let w = l1_inverse(&f, 1e-9).unwrap();
    assert!(w.residual + w.tail_bound <= 1e-9);
    for n in -(w.range as i64)..=w.range as i64 {
        let want = if n >= 0 { 0.5f64.powi(n as i32 + 1) } else { 0.0 };
        assert!((w.at(n) - want).abs() < 1e-12, "n = {n}");
    }
    let x = fundamental_homoclinic(&f, 1e-9, Some(30)).unwrap();
    assert!(x.relation_residual < 1e-9);
    for n in 0..30 {
        assert!(dist_mod1(x.at(n).unwrap() - 0.5f64.powi(n as i32 + 1)) < 1e-12);
    }
}

#[test]
fn summability_and_homoclinicity() {
    let f = golden_ratio_poly();
    let x = fundamental_homoclinic(&f, 1e-10, Some(60)).unwrap();
    let w = l1_inverse_with_range(&f, 1e-10, Some(60)).unwrap();
    let rho = (3.0 - 5f64.sqrt()) / 2.0;
    let closed_sum = (1.0 + 2.0 * rho / (1.0 - rho)) / 5f64.sqrt();
    assert!((x.summed_distance + x.tail_bound - w.l1_norm()).abs() < 1e-6);
    assert!((w.l1_norm() - closed_sum).abs() < 1e-6);
    assert!(x.summed_distance <= w.l1_norm() + 1e-12);
    assert!(x.relation_residual < 1e-10);
    for n in [10i64, 20, 40, -10, -20, -40] {
        assert!(dist_mod1(x.at(n).unwrap()) <= w.decay.at(n));
    }
}

#[test]
fn gluing_single_site_support() {
    let f = poly("3@0");
    let targets = [
        Target { lo: 0, hi: 0, combination: vec![(0, 1)] },
        Target { lo: 10, hi: 10, combination: vec![(10, 2)] },
    ];
    let r = glue_specification(&f, &targets, 1e-3).unwrap();
    assert!(r.windows.iter().all(|w| w.achieved < 1e-12));
    assert!((r.point.at(0).unwrap() - 1.0 / 3.0).abs() < 1e-12);
    assert!((r.point.at(10).unwrap() - 2.0 / 3.0).abs() < 1e-12);
    assert!(dist_mod1(r.point.at(5).unwrap()) < 1e-12);
    assert_eq!(r.required_separation, 0);
}

#[test]
fn gluing_resynthesizes_one_window() {
    let f = golden_ratio_poly();
    let t = Target { lo: -3, hi: 3, combination: vec![(-1, 2), (2, -1)] };
    let r = glue_specification(&f, &[t], 1e-4).unwrap();
    assert!(r.windows[0].achieved < 1e-8);
}

#[test]
fn gluing_two_golden_windows() {
    let f = golden_ratio_poly();
    let targets = [
        Target { lo: -2, hi: 0, combination: vec![(-1, 1)] },
        Target { lo: 8, hi: 10, combination: vec![(9, 1)] },
    ];
    let eps = 2f64.powi(-6);
    let r = glue_specification(&f, &targets, eps).unwrap();
    assert_eq!(r.separation, 7);
    for gw in &r.windows {
        assert!(gw.achieved <= eps);
        for (s, &v) in (gw.lo..=gw.hi).zip(&gw.target) {
            assert!(dist_mod1(r.point.at(s).unwrap() - v) <= eps);
        }
    }
    // Overlapping windows are rejected.
    let bad = [Target { lo: 0, hi: 3, combination: vec![(0, 1)] }, Target { lo: 3, hi: 4, combination: vec![(3, 1)] }];
    assert!(glue_specification(&f, &bad, eps).is_err());
}

#[test]
fn gluing_too_close_reports_required_separation() {
    // Opposite targets one site apart cannot both be met at a tiny eps.
    let f = poly("-1,3,-1@-1");
    let targets = [
        Target { lo: 0, hi: 0, combination: vec![(0, 3)] },
        Target { lo: 2, hi: 2, combination: vec![(2, -3)] },
    ];
    match glue_specification(&f, &targets, 1e-6) {
        Err(EdenError::InvalidInput(m)) => assert!(m.contains("required"), "{m}"),
        Ok(r) => assert!(r.windows.iter().all(|w| w.achieved <= 1e-6)),
        Err(e) => panic!("{e}"),
    }
}

fn random_target(rng: &mut ChaCha8Rng, lo: i64) -> Target {
    let len = rng.gen_range(1..=4);
    let terms = rng.gen_range(1..=3);
    let combination = (0..terms)
        .map(|_| {
            let mut c = rng.gen_range(-3..=2);
            if c >= 0 {
                c += 1;
            }
            (lo + rng.gen_range(0..len), c)
        })
        .collect();
    Target { lo, hi: lo + len - 1, combination }
}

fn shifted(t: &Target, by: i64) -> Target {
    Target { lo: t.lo + by, hi: t.hi + by, combination: t.combination.iter().map(|&(k, c)| (k + by, c)).collect() }
}

#[test]
fn gluing_at_reported_separation() {
    let polys = ["-1,3,-1@-1", "2,-1@0", "-2,4,-1@-1", "3@0", "1,-1,4,-1@-1"];
    let eps = 2f64.powi(-6);
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut ok = 0;
    for trial in 0..100 {
        let f = poly(polys[trial % polys.len()]);
        let a = random_target(&mut rng, 0);
        let b0 = random_target(&mut rng, 0);
        let far = glue_specification(&f, &[a.clone(), shifted(&b0, a.hi + 200)], eps).unwrap();
        let d = far.required_separation;
        let b = shifted(&b0, a.hi + 1 + d);
        let r = glue_specification(&f, &[a.clone(), b.clone()], eps).unwrap();
        assert_eq!(r.separation, d);
        assert_eq!(r.required_separation, d);
        // Independent replay: rebuild x from the coefficients with a finer inverse.
        let fine = l1_inverse(&f, 1e-13).unwrap();
        let x = |s: i64| r.point.generator.iter().map(|&(k, c)| c as f64 * fine.at(s - k)).sum::<f64>();
        let tv = |t: &Target, s: i64| t.combination.iter().map(|&(k, c)| c as f64 * fine.at(s - k)).sum::<f64>();
        let worst = [&a, &b]
            .iter()
            .flat_map(|t| (t.lo..=t.hi).map(move |s| dist_mod1(x(s) - tv(t, s))))
            .fold(0.0, f64::max);
        if worst <= eps {
            ok += 1;
        }
    }
    assert_eq!(ok, 100);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]
    #[test]
    fn residual_within_tolerance(a in 3i64..8, b in -1i64..=1, c in -1i64..=1) {
        // |a| > |b| + |c| keeps roots off the circle.
        let f = LaurentPoly::new(vec![b, a, c], -1);
        let w = l1_inverse(&f, 1e-9).unwrap();
        prop_assert!(w.residual + w.tail_bound <= 1e-9);
        for n in -10i64..=10 {
            prop_assert!((w.at(n) - naive_inverse(&f, 2048, n)).abs() < 1e-9);
        }
    }
}
