use super::*;
use crate::corpus;
use crate::lattice::Pattern;

fn phi() -> f64 {
    (1.0 + 5f64.sqrt()) / 2.0
}

/// Integer characteristic polynomial (Faddeev–LeVerrier), highest degree first.
fn char_poly(a: &[Vec<i128>]) -> Vec<i128> {
    let n = a.len();
    let mut c = vec![0i128; n + 1];
    c[0] = 1;
    let mut m = vec![vec![0i128; n]; n];
    for k in 1..=n {
        let mut next = vec![vec![0i128; n]; n];
        for i in 0..n {
            for j in 0..n {
                next[i][j] = (0..n).map(|l| a[i][l] * m[l][j]).sum::<i128>() + if i == j { c[k - 1] } else { 0 };
            }
        }
        m = next;
        let tr: i128 = (0..n).map(|i| (0..n).map(|l| a[i][l] * m[l][i]).sum::<i128>()).sum();
        assert_eq!(tr % k as i128, 0);
        c[k] = -tr / k as i128;
    }
    c
}

/// Largest real root by a downward scan and bisection.
fn largest_root(p: &[i128]) -> f64 {
    let eval = |x: f64| p.iter().fold(0.0, |acc, &c| acc * x + c as f64);
    let mut hi = p.iter().map(|c| c.abs() as f64).sum::<f64>() + 1.0;
    let step = 1e-3;
    while eval(hi - step) > 0.0 {
        hi -= step;
        if hi < -1.0 {
            return 0.0;
        }
    }
    let mut lo = hi - step;
    for _ in 0..200 {
        let mid = (lo + hi) / 2.0;
        if eval(mid) > 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    (lo + hi) / 2.0
}

fn oracle_entropy(x: &Subshift) -> f64 {
    let rr = &x.presentation().unwrap().rr;
    let mut a = vec![vec![0i128; rr.n]; rr.n];
    for q in 0..rr.n {
        for s in 0..rr.k {
            if let Some(t) = rr.step(q, s as Symbol) {
                a[q][t] += 1;
            }
        }
    }
    largest_root(&char_poly(&a)).max(1.0).ln()
}

fn one_dim() -> Vec<Subshift> {
    corpus::all().into_iter().filter(|x| x.dim() == 1).collect()
}

#[test]
fn exact_values() {
    let full = entropy_exact_1d(&corpus::get("full-2").unwrap()).unwrap();
    assert!((full.value - 2f64.ln()).abs() < 1e-12);
    assert_eq!(full.method, EntropyMethod::ExactPerron);
    for name in ["golden-mean", "even"] {
        let h = entropy_exact_1d(&corpus::get(name).unwrap()).unwrap();
        assert!((h.value - phi().ln()).abs() < 1e-9, "{name}");
        assert!(h.error_bound <= 1e-10);
    }
    assert!((phi().ln() - 0.4812118).abs() < 1e-7);
    assert!(entropy_exact_1d(&Subshift::sft_words(2, &[&[0], &[1]]).unwrap()).is_err());
    assert!(entropy_exact_1d(&Subshift::full(2, 2).unwrap()).is_err());
}

#[test]
fn exact_values_match_characteristic_polynomial() {
    for x in one_dim() {
        let h = entropy_exact_1d(&x).unwrap();
        let o = oracle_entropy(&x);
        assert!((h.value - o).abs() < 1e-9, "{}: {} vs {}", x.label(), h.value, o);
        assert!(h.error_bound <= 1e-10, "{}", x.label());
    }
}

#[test]
fn separated_counts() {
    let full = corpus::get("full-2").unwrap();
    let golden = corpus::get("golden-mean").unwrap();
    assert_eq!(sep_count(&full, 1, 1.0).unwrap(), BigUint::from(8u8));
    assert_eq!(sep_count(&golden, 1, 1.0).unwrap(), BigUint::from(5u8));
    let zero = corpus::get("zero").unwrap();
    assert_eq!(sep_count(&zero, 0, 1.0).unwrap(), BigUint::from(1u8));
    assert_eq!(sep_count(&full, 1, 0.5).unwrap(), BigUint::from(32u8));

    let e = entropy_estimate(&full, 10, 1.0).unwrap();
    assert!((e.value - 2f64.ln()).abs() < 1e-12);
    let e = entropy_estimate(&golden, 15, 1.0).unwrap();
    // |L_31| is the Fibonacci number F(33) = 3524578.
    assert_eq!(sep_count(&golden, 15, 1.0).unwrap(), BigUint::from(3_524_578u32));
    assert!((e.value - (3_524_578f64).ln() / 31.0).abs() < 1e-12);
    assert!((e.value - phi().ln()).abs() < 0.05);
    assert_eq!(entropy_estimate(&zero, 7, 0.5).unwrap().value, 0.0);
}

#[test]
fn estimates_within_error_bound() {
    for x in one_dim() {
        let h = entropy_exact_1d(&x).unwrap().value;
        for eps in [1.0, 0.5, 0.25] {
            for n in [5, 10, 20, 40] {
                let e = entropy_estimate(&x, n, eps).unwrap();
                assert!((e.value - h).abs() <= e.error_bound, "{} n={n} eps={eps}", x.label());
            }
        }
    }
}

#[test]
fn scale_does_not_change_the_limit() {
    for x in one_dim() {
        let h = entropy_exact_1d(&x).unwrap().value;
        for eps in [1.0, 0.5, 0.25] {
            let a = ln_big(&sep_count(&x, 200, eps).unwrap());
            let b = ln_big(&sep_count(&x, 201, eps).unwrap());
            assert!(((b - a) / 2.0 - h).abs() < 1e-9, "{} eps={eps}", x.label());
        }
    }
}

#[test]
fn gap_bounds_on_corpus_pairs() {
    let xs = one_dim();
    let mut pairs = 0;
    for y in &xs {
        let Ok((Some(_), _, _)) = gluing_analysis(y) else { continue };
        for z in &xs {
            if z.alphabet_size() != y.alphabet_size() || !z.is_subshift_of(y).unwrap() || y.is_subshift_of(z).unwrap() {
                continue;
            }
            let (eta, _) = gap_eta(y, z).unwrap();
            let b = entropy_gap_bound(y, z, eta).unwrap();
            let (hy, hz) = (entropy_exact_1d(y).unwrap().value, entropy_exact_1d(z).unwrap().value);
            assert!(hz < hy, "{} in {}", z.label(), y.label());
            assert!(b.bound > 0.0 && b.bound <= hy - hz, "{} in {}", z.label(), y.label());
            pairs += 1;
        }
    }
    assert!(pairs >= 8, "{pairs}");
}

#[test]
fn gap_bound_full_over_golden() {
    let y = corpus::get("full-2").unwrap();
    let z = corpus::get("golden-mean").unwrap();
    let (eta, w) = gap_eta(&y, &z).unwrap();
    assert_eq!((eta, w), (1.0 / 16.0, vec![1, 1]));
    let b = entropy_gap_bound(&y, &z, eta).unwrap();
    // g = 0 and the metric radius of 1/64 is 6.
    assert_eq!((b.gap, b.half_width), (0, 12));
    let diff = 2f64.ln() - phi().ln();
    assert!((diff - 0.2119).abs() < 1e-4);
    assert!(b.bound < diff);
    assert!(entropy_gap_bound(&y, &y, eta).is_err());
    assert!(entropy_gap_bound(&z, &y, eta).is_err());
    assert!(entropy_gap_bound(&y, &z, 0.5).is_err());
    let single = Subshift::sft(2, 1, vec![Pattern::word(0, &[1])]).unwrap();
    let b = entropy_gap_bound(&y, &single, eta).unwrap();
    assert_eq!(b.sep, BigUint::from(1u8));
    assert!((b.bound - 2f64.ln() / 25.0).abs() < 1e-15);
}
