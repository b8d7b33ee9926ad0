use super::*;
use crate::error::EdenError;
use crate::corpus;
use proptest::prelude::*;

/// Brute force: words of length n over k symbols that sit inside a word
/// with no forbidden factor reaching `pad` cells further on each side. A
/// pad beyond the number of (m-1)-blocks forces a cycle, hence a point.
fn brute_sft_words(k: usize, forbidden: &[Vec<Symbol>], n: usize) -> usize {
    let m = forbidden.iter().map(Vec::len).max().unwrap_or(1);
    let pad = k.pow(m as u32) + m;
    let ends_ok = |w: &[Symbol]| !forbidden.iter().any(|f| w.len() >= f.len() && w.ends_with(f));
    let starts_ok = |w: &[Symbol]| !forbidden.iter().any(|f| w.len() >= f.len() && w.starts_with(f));
    fn grow(w: &mut Vec<Symbol>, left: bool, k: usize, depth: usize, ok: &dyn Fn(&[Symbol]) -> bool, then: &dyn Fn(&mut Vec<Symbol>) -> bool) -> bool {
        if depth == 0 {
            return then(w);
        }
        for a in 0..k as Symbol {
            if left {
                w.insert(0, a);
            } else {
                w.push(a);
            }
            let good = ok(w) && grow(w, left, k, depth - 1, ok, then);
            if left {
                w.remove(0);
            } else {
                w.pop();
            }
            if good {
                return true;
            }
        }
        false
    }
    let mut count = 0;
    for code in 0..k.pow(n as u32) {
        let mut c = code;
        let mut w: Vec<Symbol> = (0..n).map(|_| { let a = (c % k) as Symbol; c /= k; a }).collect();
        let clean = (0..=n).all(|i| ends_ok(&w[..i]));
        if clean && grow(&mut w, true, k, pad, &starts_ok, &|w: &mut Vec<Symbol>| grow(w, false, k, pad, &ends_ok, &|_| true)) {
            count += 1;
        }
    }
    count
}

#[test]
fn full_shift_window_of_three() {
    let x = Subshift::full(2, 1).unwrap();
    assert_eq!(x.language(&Window::interval(0, 2)).unwrap().len(), 8);
}

#[test]
fn golden_mean_window_of_three() {
    let x = corpus::get("golden-mean").unwrap();
    let lang = x.language(&Window::interval(0, 2)).unwrap();
    assert_eq!(lang.len(), 5);
    assert!(lang.windows(2).all(|p| p[0] < p[1]));
}

#[test]
fn even_shift_four_words() {
    // Brute force over {0,1}^4 for words whose interior zero-runs between ones are even,
    // which for bi-infinite extension is the whole constraint.
    let even_ok = |w: &[Symbol]| {
        let ones: Vec<usize> = (0..w.len()).filter(|&i| w[i] == 1).collect();
        ones.windows(2).all(|p| (p[1] - p[0] - 1) % 2 == 0)
    };
    let expected = (0..16u32)
        .filter(|c| even_ok(&(0..4).map(|i| ((c >> i) & 1) as Symbol).collect::<Vec<_>>()))
        .count();
    let x = corpus::get("even").unwrap();
    assert_eq!(x.language(&Window::interval(0, 3)).unwrap().len(), expected);
    assert_eq!(expected, 12);
}

#[test]
fn language_with_gaps() {
    let x = corpus::get("golden-mean").unwrap();
    let w = Window::from_points(&[0, 2]);
    assert_eq!(x.language(&w).unwrap().len(), 4);
    let alt = corpus::get("alternating").unwrap();
    assert_eq!(alt.language(&w).unwrap().len(), 2);
    assert_eq!(alt.language(&Window::from_points(&[0, 1])).unwrap().len(), 2);
}

#[test]
fn membership() {
    let g = corpus::get("golden-mean").unwrap();
    assert!(g.contains(&Configuration::constant(1, 0)).unwrap());
    assert!(!g.contains(&Configuration::constant(1, 1)).unwrap());
    let e = corpus::get("even").unwrap();
    assert!(!e.contains(&Configuration::periodic_word(&[1, 0]).unwrap()).unwrap());
    assert!(e.contains(&Configuration::periodic_word(&[1, 0, 0]).unwrap()).unwrap());
    assert!(e.contains(&Configuration::constant(1, 0)).unwrap());
    let one = Configuration::finite_support(0, Pattern::word(0, &[1]));
    assert!(e.contains(&one).unwrap());
    let two = Configuration::finite_support(0, Pattern::word(0, &[1, 0, 1]));
    assert!(!e.contains(&two).unwrap());
    assert!(!g.contains(&Configuration::finite_support(0, Pattern::word(5, &[1, 1]))).unwrap());
    assert!(e.contains(&Configuration::finite_support(1, Pattern::word(0, &[0, 0]))).unwrap());
    assert!(!e.contains(&Configuration::finite_support(1, Pattern::word(0, &[0]))).unwrap());
}

#[test]
fn determinize_even_from_nondeterministic_graph() {
    let g = LabeledGraph::from_named_edges(&[("a", 1, "a"), ("a", 0, "b"), ("b", 0, "a")]);
    let nondet = LabeledGraph::from_named_edges(&[("a", 1, "a"), ("a", 0, "b"), ("b", 0, "a"), ("b", 0, "c"), ("c", 0, "b"), ("c", 1, "c")]);
    assert!(!nondet.is_right_resolving());
    let x = Subshift::sofic(2, nondet).unwrap();
    let d = x.determinize().unwrap();
    assert!(d.is_right_resolving());
    assert_eq!(d.graph().unwrap().vertices().len(), 2);
    let y = Subshift::sofic(2, g).unwrap();
    for n in 1..=8 {
        assert_eq!(d.count_words(n).unwrap(), y.count_words(n).unwrap());
    }
    assert!(equal_language(&x, &y).unwrap().equal);
}

#[test]
fn full_shift_with_duplicate_edges() {
    let g = LabeledGraph::from_named_edges(&[("a", 0, "a"), ("a", 1, "b"), ("b", 0, "a"), ("b", 1, "b"), ("a", 0, "b")]);
    let x = Subshift::sofic(2, g).unwrap();
    let d = x.determinize().unwrap();
    assert_eq!(d.graph().unwrap().vertices().len(), 1);
    assert!(equal_language(&x, &Subshift::full(2, 1).unwrap()).unwrap().equal);
}

#[test]
fn equality_witnesses() {
    let g = corpus::get("golden-mean").unwrap();
    let f = Subshift::full(2, 1).unwrap();
    assert!(equal_language(&g, &g).unwrap().equal);
    let c = equal_language(&g, &f).unwrap();
    assert_eq!(c.witness, Some((vec![1, 1], WitnessSide::OnlySecond)));
    assert_eq!(f.inclusion_witness(&g).unwrap(), Some(vec![1, 1]));
    assert_eq!(g.inclusion_witness(&f).unwrap(), None);
    let e = corpus::get("even").unwrap();
    let o = corpus::get("odd").unwrap();
    assert_eq!(equal_language(&e, &o).unwrap().witness, Some((vec![1, 1], WitnessSide::OnlyFirst)));
}

#[test]
fn sft_counts_match_brute_force() {
    let cases: Vec<(usize, Vec<Vec<Symbol>>)> = vec![
        (2, vec![vec![1, 1]]),
        (2, vec![vec![1, 1], vec![0, 0, 0, 0]]),
        (2, vec![vec![1, 0, 1]]),
        (3, vec![vec![1, 2], vec![2, 1]]),
        (2, vec![vec![0, 0], vec![1, 1]]),
    ];
    for (k, f) in cases {
        let words: Vec<&[Symbol]> = f.iter().map(Vec::as_slice).collect();
        let x = Subshift::sft_words(k, &words).unwrap();
        let max_n = if k == 3 { 5 } else { 8 };
        for n in 1..=max_n {
            assert_eq!(x.count_words(n).unwrap(), BigUint::from(brute_sft_words(k, &f, n)), "{f:?} n={n}");
        }
    }
}

#[test]
fn parse_and_print_round_trip() {
    for name in corpus::names() {
        let x = corpus::get(name).unwrap();
        let y = parse_subshift(&x.to_string()).unwrap();
        assert!(equal_language(&x, &y).unwrap().equal, "{name}");
    }
    assert!(parse_subshift("alphabet=2\na -0-> b\ndim=1; cells=(0):1").is_err());
    assert!(parse_subshift("dim=1").is_err());
}

#[test]
fn two_dimensional_strip_language() {
    let full = Subshift::full(2, 2).unwrap();
    let w = Window::rect(2, &[0, 0], &[1, 1]).unwrap();
    assert_eq!(full.language(&w).unwrap().len(), 16);
    // Hard squares: no two horizontally or vertically adjacent ones.
    let h: Pattern = "dim=2; cells=(0,0):1,(1,0):1".parse().unwrap();
    let v: Pattern = "dim=2; cells=(0,0):1,(0,1):1".parse().unwrap();
    let x = Subshift::sft(2, 2, vec![h, v]).unwrap();
    assert_eq!(x.language(&w).unwrap().len(), 7);
    let tall = Window::rect(2, &[0, 0], &[0, 9]).unwrap();
    assert!(matches!(x.language(&tall), Err(EdenError::Capacity(_))));
}

#[test]
fn two_dimensional_allows_and_contains() {
    let h: Pattern = "dim=2; cells=(0,0):1,(1,0):1".parse().unwrap();
    let v: Pattern = "dim=2; cells=(0,0):1,(0,1):1".parse().unwrap();
    let x = Subshift::sft(2, 2, vec![h.clone(), v]).unwrap();
    assert!(!x.allows(&h).unwrap());
    assert!(x.allows(&"dim=2; cells=(0,0):1,(1,1):1".parse().unwrap()).unwrap());
    let checker = Configuration::periodic(2, &[2, 2], vec![1, 0, 0, 1]).unwrap();
    assert!(x.contains(&checker).unwrap());
    let stripes = Configuration::periodic(2, &[1, 2], vec![1, 0]).unwrap();
    assert!(!x.contains(&stripes).unwrap());
}

/// Brute force over paths of the raw graph: a word is allowed when it labels a
/// path whose start has an incoming walk and whose end has an outgoing walk of
/// length at least the vertex count (hence bi-infinite ones).
fn brute_graph_words(g: &LabeledGraph, n: usize) -> std::collections::BTreeSet<Vec<Symbol>> {
    let v = g.vertices().len();
    let walk = |forward: bool| -> Vec<bool> {
        let mut alive = vec![true; v];
        for _ in 0..v {
            let mut next = vec![false; v];
            for e in g.edges() {
                let (from, to) = if forward { (e.source, e.target) } else { (e.target, e.source) };
                if alive[to] {
                    next[from] = true;
                }
            }
            alive = next;
        }
        alive
    };
    let (fwd, back) = (walk(true), walk(false));
    let mut out = std::collections::BTreeSet::new();
    let mut stack: Vec<(usize, Vec<Symbol>)> = (0..v).filter(|&q| back[q]).map(|q| (q, vec![])).collect();
    while let Some((q, w)) = stack.pop() {
        if w.len() == n {
            if fwd[q] {
                out.insert(w);
            }
            continue;
        }
        for e in g.edges().iter().filter(|e| e.source == q) {
            let mut w2 = w.clone();
            w2.push(e.label);
            stack.push((e.target, w2));
        }
    }
    out
}

fn arb_forbidden() -> impl Strategy<Value = Vec<Vec<Symbol>>> {
    prop::collection::vec(prop::collection::vec(0u8..2, 1..4), 0..3)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn sft_count_matches_brute(f in arb_forbidden(), n in 1usize..7) {
        let words: Vec<&[Symbol]> = f.iter().map(Vec::as_slice).collect();
        let x = Subshift::sft_words(2, &words).unwrap();
        prop_assert_eq!(x.count_words(n).unwrap(), BigUint::from(brute_sft_words(2, &f, n)));
    }

    #[test]
    fn extra_forbidden_word_never_grows_language(f in arb_forbidden(), extra in prop::collection::vec(0u8..2, 1..4), n in 1usize..9) {
        let words: Vec<&[Symbol]> = f.iter().map(Vec::as_slice).collect();
        let x = Subshift::sft_words(2, &words).unwrap();
        let mut more = words.clone();
        more.push(&extra);
        let y = Subshift::sft_words(2, &more).unwrap();
        prop_assert!(y.count_words(n).unwrap() <= x.count_words(n).unwrap());
        prop_assert!(y.is_subshift_of(&x).unwrap());
    }

    #[test]
    fn determinize_preserves_language(edges in prop::collection::vec((0usize..3, 0u8..2, 0usize..3), 1..8)) {
        let names = ["a", "b", "c"];
        let triples: Vec<(&str, Symbol, &str)> = edges.iter().map(|&(s, l, t)| (names[s], l, names[t])).collect();
        let x = Subshift::sofic(2, LabeledGraph::from_named_edges(&triples)).unwrap();
        let d = x.determinize().unwrap();
        prop_assert!(d.is_right_resolving());
        for n in 1..=10 {
            let w = Window::interval(0, n as i64 - 1);
            let got: std::collections::BTreeSet<Vec<Symbol>> =
                d.language(&w).unwrap().iter().map(|p| p.symbols().to_vec()).collect();
            prop_assert_eq!(got, brute_graph_words(x.graph().unwrap(), n));
        }
    }
}
