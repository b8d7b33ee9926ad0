use std::collections::HashMap;

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::*;
use crate::corpus;

fn eca_image(rule: u8, w: &[Symbol]) -> Vec<Symbol> {
    w.windows(3).map(|t| (rule >> (4 * t[0] + 2 * t[1] + t[2])) & 1).collect()
}

fn words(k: usize, n: usize) -> impl Iterator<Item = Vec<Symbol>> {
    (0..k.pow(n as u32)).map(move |mut i| {
        let mut w = vec![0; n];
        for s in w.iter_mut().rev() {
            *s = (i % k) as Symbol;
            i /= k;
        }
        w
    })
}

/// Every word of length `n ≤ 10` has exactly four preimages of length `n + 2`.
fn balanced(rule: u8) -> bool {
    (1..=10).all(|n| {
        let mut count = vec![0u32; 1 << n];
        for w in words(2, n + 2) {
            let img = eca_image(rule, &w);
            let idx = img.iter().fold(0usize, |a, &b| 2 * a + b as usize);
            count[idx] += 1;
        }
        count.iter().all(|&c| c == 4)
    })
}

/// Distinct words on a window of length `len ≤ 4` whose images agree in
/// every two-cell surrounding.
fn brute_erasable(rule: u8) -> bool {
    (1..=4).any(|len| {
        let ws: Vec<Vec<Symbol>> = words(2, len).collect();
        let ctx: Vec<Vec<Symbol>> = words(2, 4).collect();
        let img = |w: &[Symbol], c: &[Symbol]| {
            let z: Vec<Symbol> = c[..2].iter().chain(w).chain(&c[2..]).copied().collect();
            eca_image(rule, &z)
        };
        ws.iter().enumerate().any(|(i, a)| ws[i + 1..].iter().any(|b| ctx.iter().all(|c| img(a, c) == img(b, c))))
    })
}

#[test]
fn elementary_rules_against_oracles() {
    let mut surjective = 0;
    for rule in 0..=255u8 {
        let code = BlockCode::eca(rule);
        assert_eq!(code.rule_id(), BigUint::from(rule));
        let c = classify(&code).unwrap();
        let bal = balanced(rule);
        assert_eq!(c.surjective == Verdict::Yes, bal, "rule {rule}");
        surjective += bal as usize;
        assert_eq!(c.surjective, c.pre_injective, "rule {rule}");
        assert!(c.flags.is_empty());
        if brute_erasable(rule) {
            assert_eq!(c.pre_injective, Verdict::No, "rule {rule}");
        }
        if c.injective == Verdict::Yes {
            assert_eq!(c.surjective, Verdict::Yes);
        }
    }
    assert_eq!(surjective, 30);
}

#[test]
fn injective_elementary_rules() {
    let inj: Vec<u8> = (0..=255u8).filter(|&r| is_injective(&BlockCode::eca(r)).unwrap()).collect();
    assert_eq!(inj, vec![15, 51, 85, 170, 204, 240]);
    // Collisions on short periodic points for every other surjective rule.
    for rule in (0..=255u8).filter(|r| !inj.contains(r) && balanced(*r)) {
        let code = BlockCode::eca(rule);
        let hit = (1..=8).any(|p| {
            let mut seen = HashMap::new();
            words(2, p).any(|u| {
                let img = code.apply(&Configuration::periodic_word(&u).unwrap()).unwrap().restrict(&Window::interval(0, 15));
                seen.insert(img, u).is_some()
            })
        });
        assert!(hit, "rule {rule}");
    }
}

#[test]
fn goe_witnesses_are_minimal_and_sound() {
    for rule in 0..=255u8 {
        let (surj, goe) = is_surjective(&BlockCode::eca(rule)).unwrap();
        if surj {
            assert!(goe.is_none());
            continue;
        }
        let goe = goe.unwrap();
        let (start, w) = goe.as_word().unwrap();
        assert_eq!(start, 0);
        let preimages = |w: &[Symbol]| words(2, w.len() + 2).filter(|z| eca_image(rule, z) == w).count();
        assert_eq!(preimages(w), 0, "rule {rule}");
        for shorter in 1..w.len() {
            assert!(words(2, shorter).all(|u| preimages(&u) > 0), "rule {rule}");
        }
        assert!(words(2, w.len()).take_while(|u| u.as_slice() < w).all(|u| preimages(&u) > 0));
    }
}

fn replay(code: &BlockCode, pair: &ErasablePair, rng: &mut ChaCha8Rng) {
    let (_, w1) = pair.first.as_word().unwrap();
    let (_, w2) = pair.second.as_word().unwrap();
    let x = code.domain();
    let k = x.alphabet_size() as Symbol;
    let mut done = 0;
    let mut tries = 0;
    while done < 5 {
        tries += 1;
        assert!(tries < 100_000, "no admissible surrounding found");
        let l: Vec<Symbol> = (0..6).map(|_| rng.gen_range(0..k)).collect();
        let r: Vec<Symbol> = (0..6).map(|_| rng.gen_range(0..k)).collect();
        let z1: Vec<Symbol> = l.iter().chain(w1).chain(&r).copied().collect();
        let z2: Vec<Symbol> = l.iter().chain(w2).chain(&r).copied().collect();
        if !x.allows_word(&z1).unwrap() || !x.allows_word(&z2).unwrap() {
            continue;
        }
        let img = |z: &[Symbol]| code.apply_pattern(&Pattern::word(0, z)).unwrap();
        assert_eq!(img(&z1), img(&z2));
        done += 1;
    }
}

#[test]
fn erasable_pairs_replay() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for rule in 0..=255u8 {
        let code = BlockCode::eca(rule);
        let (pre, pair) = is_pre_injective(&code).unwrap();
        assert_eq!(pre, pair.is_none());
        if let Some(pair) = pair {
            assert_ne!(pair.first, pair.second);
            assert!(pair.first.symbols() < pair.second.symbols());
            assert!(verify_erasable(&code, &pair).unwrap().is_some());
            replay(&code, &pair, &mut rng);
        }
    }
}

#[test]
fn small_examples() {
    let id = BlockCode::eca(204);
    let c = classify(&id).unwrap();
    assert_eq!((c.surjective, c.pre_injective, c.injective), (Verdict::Yes, Verdict::Yes, Verdict::Yes));
    assert!(c.flags.is_empty());

    let zero = BlockCode::eca(0);
    let c = classify(&zero).unwrap();
    assert_eq!((c.surjective, c.pre_injective, c.injective), (Verdict::No, Verdict::No, Verdict::No));
    assert_eq!(c.goe.unwrap().to_string(), Pattern::word(0, &[1]).to_string());
    let pair = c.erasable.unwrap();
    assert_eq!((pair.first.symbols(), pair.second.symbols()), (&[0][..], &[1][..]));
    assert_eq!(pair.window, Window::interval(0, 0));

    let r90 = BlockCode::eca(90);
    let c = classify(&r90).unwrap();
    assert_eq!((c.surjective, c.pre_injective, c.injective), (Verdict::Yes, Verdict::Yes, Verdict::No));
    let alt = Configuration::periodic_word(&[0, 1]).unwrap();
    assert_eq!(r90.apply(&alt).unwrap().restrict(&Window::interval(-3, 3)).symbols(), &[0; 7]);
    assert_eq!(r90.apply(&Configuration::constant(1, 0)).unwrap(), Configuration::constant(1, 0));
    assert_eq!(r90.apply_pattern(&Pattern::word(0, &[0, 0, 0])).unwrap(), Pattern::word(1, &[0]));
    assert_eq!(r90.apply_pattern(&Pattern::word(0, &[1, 1, 1])).unwrap(), Pattern::word(1, &[0]));
    assert!(matches!(r90.apply_pattern(&Pattern::word(0, &[1, 1])), Err(EdenError::Capacity(_))));

    let r110 = classify(&BlockCode::eca(110)).unwrap();
    assert_eq!(r110.surjective, Verdict::No);
    assert!(r110.goe.is_some());
}

#[test]
fn identity_and_finite_support() {
    let x = corpus::get("golden-mean").unwrap();
    let id = BlockCode::identity(x).unwrap();
    let p = Pattern::word(0, &[1, 0, 1]);
    assert_eq!(id.apply_pattern(&p).unwrap(), p);
    let c = Configuration::finite_support(0, Pattern::word(3, &[1, 0, 1]));
    assert_eq!(id.apply(&c).unwrap(), c);

    // Rule 1 sends the background 0 to 1.
    let r1 = BlockCode::eca(1);
    let img = r1.apply(&Configuration::finite_support(0, Pattern::word(0, &[1]))).unwrap();
    assert_eq!(img, Configuration::finite_support(1, Pattern::word(-1, &[0, 0, 0])));
    // Golden mean forbids the constant block 11.
    let g = corpus::get("golden-mean").unwrap();
    let shift = BlockCode::new(g.clone(), g, Window::interval(0, 1), |p| p.symbols()[1]).unwrap();
    let ones = Configuration::finite_support(1, Pattern::word(0, &[0]));
    assert!(matches!(shift.apply(&ones), Err(EdenError::Representation(_))));
}

#[test]
fn radius_zero_enumerations() {
    let full = corpus::get("full-2").unwrap();
    let zero = Window::interval(0, 0);
    assert_eq!(enumerate_endomorphisms(&full, &zero).unwrap().len(), 4);
    assert_eq!(enumerate_endomorphisms(&full, &Window::interval(-1, 1)).unwrap().len(), 256);
    let golden = corpus::get("golden-mean").unwrap();
    let codes = enumerate_endomorphisms(&golden, &zero).unwrap();
    let tables: Vec<&[Symbol]> = codes.iter().map(|c| c.table()).collect();
    assert_eq!(tables, vec![&[0, 0][..], &[0, 1][..]]);
}

/// Brute-force table filter: the image of every allowed word of length `n`
/// is allowed, for all `n ≤ 8`.
fn brute_consistent(x: &Subshift, n: &Window, table: &[Symbol]) -> bool {
    let idx = PatternIndex::new(x, n).unwrap();
    let (lo, hi) = n.as_interval().unwrap();
    let s = (hi - lo + 1) as usize;
    (s..=s + 8).all(|len| {
        x.language(&Window::interval(0, len as i64 - 1)).unwrap().iter().all(|p| {
            let img: Vec<Symbol> = p.symbols().windows(s).map(|w| table[idx.index[w]]).collect();
            x.allows_word(&img).unwrap()
        })
    })
}

#[test]
fn enumeration_matches_brute_filter() {
    for name in ["golden-mean", "even", "sep-12"] {
        let x = corpus::get(name).unwrap();
        let n = Window::interval(0, 1);
        let idx = PatternIndex::new(&x, &n).unwrap();
        let k = x.alphabet_size();
        let brute: Vec<Vec<Symbol>> = words(k, idx.patterns.len()).filter(|t| brute_consistent(&x, &n, t)).collect();
        let mut got: Vec<Vec<Symbol>> = enumerate_endomorphisms(&x, &n).unwrap().iter().map(|c| c.table().to_vec()).collect();
        got.sort();
        let mut brute = brute;
        brute.sort();
        assert_eq!(got, brute, "{name}");
    }
}

#[test]
fn golden_mean_survey_has_no_myhill_violation() {
    let x = corpus::get("golden-mean").unwrap();
    for r in 0..=1 {
        let s = survey(&x, &Window::interval(-r, r)).unwrap();
        assert_eq!(s.summary.myhill_violations, 0);
        for row in &s.rows {
            let code = BlockCode::from_table(x.clone(), x.clone(), Window::interval(-r, r), row.table.clone()).unwrap();
            if let Some(g) = &row.classification.goe {
                let (_, w) = g.as_word().unwrap();
                let pre = x
                    .language(&Window::interval(0, w.len() as i64 + 2 * r - 1))
                    .unwrap()
                    .into_iter()
                    .filter(|p| code.apply_pattern(p).unwrap().symbols() == w)
                    .count();
                assert_eq!(pre, 0);
            }
        }
    }
}

#[test]
fn codes_between_different_shifts() {
    let full = corpus::get("full-2").unwrap();
    let golden = corpus::get("golden-mean").unwrap();
    let n = Window::interval(0, 1);
    let t = BlockCode::new(full.clone(), golden.clone(), n.clone(), |p| p.symbols()[0] & (1 - p.symbols()[1])).unwrap();
    let c = classify(&t).unwrap();
    assert_eq!(c.surjective, Verdict::Yes);
    assert_eq!(c.pre_injective, Verdict::No);
    assert!(matches!(BlockCode::identity(full.clone()).and_then(|i| {
        BlockCode::from_table(full.clone(), golden.clone(), Window::interval(0, 0), i.table().to_vec())
    }), Err(EdenError::InvalidInput(_))));
}

#[test]
fn linear_codes() {
    let one = linear_code(&LaurentPoly::constant(1), 2).unwrap();
    assert_eq!(one.table(), &[0, 1]);
    let c = classify(&one).unwrap();
    assert_eq!(c.injective, Verdict::Yes);

    let g: LaurentPoly = "1,1 @ 0".parse().unwrap();
    let c = classify(&linear_code(&g, 2).unwrap()).unwrap();
    assert_eq!((c.surjective, c.pre_injective), (Verdict::Yes, Verdict::Yes));

    let two = linear_code(&LaurentPoly::constant(2), 4).unwrap();
    let c = classify(&two).unwrap();
    assert_eq!((c.surjective, c.pre_injective), (Verdict::No, Verdict::No));
    assert_eq!(c.goe.unwrap().symbols(), &[1]);
    let pair = c.erasable.unwrap();
    assert_eq!((pair.first.symbols(), pair.second.symbols()), (&[0][..], &[2][..]));
    assert!(linear_code(&LaurentPoly::constant(4), 4).is_err());
    assert_eq!(parse_shorthand("linear:1,1@0%2").unwrap().unwrap().table(), &[0, 1, 1, 0]);
}

#[test]
fn rule_text_roundtrip() {
    let r = BlockCode::eca(30);
    let x = r.domain().clone();
    let back = BlockCode::parse_rule(&r.to_rule_text(), x.clone(), x.clone()).unwrap();
    assert_eq!(back.table(), r.table());
    assert!(BlockCode::parse_rule("N=-1,0,1\n000->0\n", x.clone(), x.clone()).is_err());
    let g = corpus::get("golden-mean").unwrap();
    let t = BlockCode::parse_rule("N=0..1\n00->0\n01->1\n10->0\n", g.clone(), g.clone()).unwrap();
    assert_eq!(t.table(), &[0, 1, 0]);
    assert!(BlockCode::parse_rule("N=0..1\n00->0\n01->1\n10->0\n11->1\n", g.clone(), g).is_err());
}

#[test]
fn bounded_searches_in_two_dimensions() {
    let x = Subshift::full(2, 2).unwrap();
    let n = Window::from_cells(2, [[0, 0], [1, 0]]).unwrap();
    let xor = BlockCode::new(x.clone(), x.clone(), n.clone(), |p| p.symbols()[0] ^ p.symbols()[1]).unwrap();
    let r = bounded_goe_search(&xor, 2).unwrap();
    assert_eq!((r.witness.is_none(), r.sides_completed), (true, 2));
    let and = BlockCode::new(x.clone(), x.clone(), n, |p| p.symbols()[0] & p.symbols()[1]).unwrap();
    let r = bounded_erasable_search(&and, 1).unwrap();
    assert!(r.witness.is_none());
    let zero = BlockCode::new(x.clone(), x, Window::rect(2, &[0, 0], &[0, 0]).unwrap(), |_| 0).unwrap();
    let g = bounded_goe_search(&zero, 2).unwrap().witness.unwrap();
    assert_eq!(g.symbols(), &[1]);
    let e = bounded_erasable_search(&zero, 1).unwrap().witness.unwrap();
    assert_eq!((e.first.symbols(), e.second.symbols()), (&[0][..], &[1][..]));
    assert!(classify(&zero).is_err());
}

proptest! {
    #[test]
    fn apply_commutes_with_translation(rule in 0u8..=255, u in prop::collection::vec(0u8..2, 1..7), v in -5i64..5) {
        let code = BlockCode::eca(rule);
        let x = Configuration::periodic_word(&u).unwrap();
        let a = code.apply(&x.translate(&[v]).unwrap()).unwrap();
        let b = code.apply(&x).unwrap().translate(&[v]).unwrap();
        let w = Window::interval(-10, 10);
        prop_assert_eq!(a.restrict(&w), b.restrict(&w));
        let f = Configuration::finite_support(0, Pattern::word(0, &u));
        if let Ok(a) = code.apply(&f.translate(&[v]).unwrap()) {
            let b = code.apply(&f).unwrap().translate(&[v]).unwrap();
            prop_assert_eq!(a.restrict(&w), b.restrict(&w));
        }
    }

    #[test]
    fn linear_codes_are_additive(g in prop::collection::vec(0i64..5, 1..4), u in prop::collection::vec(0u8..5, 6), v in prop::collection::vec(0u8..5, 6)) {
        let Ok(code) = linear_code(&LaurentPoly::new(g, -1), 5) else { return Ok(()) };
        let sum: Vec<Symbol> = u.iter().zip(&v).map(|(a, b)| (a + b) % 5).collect();
        let w = Window::interval(0, 5);
        let img = |s: &[Symbol]| code.apply(&Configuration::periodic_word(s).unwrap()).unwrap().restrict(&w).symbols().to_vec();
        let lhs = img(&sum);
        let rhs: Vec<Symbol> = img(&u).iter().zip(img(&v)).map(|(a, b)| (a + b) % 5).collect();
        prop_assert_eq!(lhs, rhs);
    }
}
