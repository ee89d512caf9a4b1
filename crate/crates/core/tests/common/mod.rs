//! Checks shared by the acceptance report and the property suites. Each
//! returns a one-line detail on success and a description of the failure
//! otherwise.

#![allow(dead_code)]

use std::cell::Cell;
use std::collections::BTreeSet;
use std::time::{Duration, Instant};

use num_bigint::BigUint;
use proptest::prelude::*;
use proptest::test_runner::{Config, TestCaseError, TestRunner};

use gapcalc::catalog::{self, VerifyOptions, VerifyReport};
use gapcalc::embed::{
    build_domination_map, build_max_scheme, build_strong_scheme, build_subdomination_map, build_subdomination_scheme,
    builtin_101_map, chi_scheme, full_action, partial_action, plain_morphism, restriction_scheme, TypeMap,
    DEFAULT_COUNT, DEFAULT_GROWTH, DEFAULT_WINDOW,
};
use gapcalc::gaps::{self, admissible_violations, Budget};
use gapcalc::tree::{self, block_decompose, closure, Node, NodeSet};
use gapcalc::types::{self, enumerate_types, frak, CountMethod, Frak, GapType};
use gapcalc::witness::{generate_set, infer_type};

pub type Check = Result<String, String>;

/// Randomized cases per property.
pub const CASES: u32 = 10_000;

pub fn t(s: &str) -> GapType {
    s.parse().unwrap_or_else(|e| panic!("type {s}: {e}"))
}

fn runner() -> TestRunner {
    TestRunner::new(Config { cases: CASES, failure_persistence: None, ..Config::default() })
}

fn timed(limit: Duration, start: Instant, what: &str) -> Result<(), String> {
    let took = start.elapsed();
    if took > limit {
        Err(format!("{what} took {took:.1?}, limit {limit:?}"))
    } else {
        Ok(())
    }
}

// ---- counting ----

pub fn counting() -> Check {
    let expected: [u32; 7] = [1, 8, 61, 480, 3881, 31976, 266981];
    for (i, &e) in expected.iter().enumerate() {
        let n = i + 1;
        let got = types::count_types(n, CountMethod::Formula).map_err(|e| e.to_string())?;
        if got != BigUint::from(e) {
            return Err(format!("formula J({n}) = {got}, expected {e}"));
        }
    }
    let start = Instant::now();
    for n in 1..=5 {
        let got = types::count_types(n, CountMethod::Enum).map_err(|e| e.to_string())?;
        if got != BigUint::from(expected[n - 1]) {
            return Err(format!("enumeration J({n}) = {got}"));
        }
    }
    let took = start.elapsed();
    timed(Duration::from_secs(30), start, "enumeration n <= 5")?;
    for n in 1..=4 {
        let got = types::count_types(n, CountMethod::Matrix).map_err(|e| e.to_string())?;
        if got != BigUint::from(expected[n - 1]) {
            return Err(format!("matrix J({n}) = {got}"));
        }
    }
    Ok(format!("formula n<=7, enumeration n<=5 ({took:.1?}), matrix n<=4 agree"))
}

pub fn asymptotics() -> Check {
    let mut parts = Vec::new();
    for n in [6, 7] {
        let r = types::asymptotic_ratio(n);
        // Independent evaluation from the exact count.
        let j: f64 = types::count_formula(n).to_string().parse().expect("fits f64");
        let oracle = j * 8.0 * (2.0 * std::f64::consts::PI * n as f64).sqrt() / (3.0 * 9f64.powi(n as i32));
        if (r - oracle).abs() > 1e-9 || !(0.9..=1.1).contains(&r) {
            return Err(format!("n={n}: ratio {r}, recomputed {oracle}"));
        }
        parts.push(format!("n={n}: {r:.4}"));
    }
    Ok(parts.join(", "))
}

pub fn roster() -> Check {
    let table: [(&str, &[usize], bool); 8] = [
        ("[0]", &[0], false),
        ("[1]", &[1], false),
        ("[01]", &[1], false),
        ("[^1 _0]", &[0, 1], true),
        ("[^1 _0 _1]", &[1], false),
        ("[_0 ^1 _1]", &[1], true),
        ("[^0 _1]", &[1], true),
        ("[^0 ^1 _1]", &[1], true),
    ];
    let listed: BTreeSet<GapType> = enumerate_types(2).map_err(|e| e.to_string())?.into_iter().collect();
    let expected: BTreeSet<GapType> = table.iter().map(|(s, _, _)| t(s)).collect();
    if listed != expected {
        return Err(format!("enumeration gives {} types differing from the table", listed.len()));
    }
    for (s, strength, top) in table {
        let p = t(s).profile();
        if p.strength != strength.iter().copied().collect::<BTreeSet<_>>() || p.top_comb != top {
            return Err(format!("{s}: strength {:?}, top-comb {}", p.strength, p.top_comb));
        }
    }
    Ok("8 types, strength and top-comb columns match".into())
}

pub fn frak_operators() -> Check {
    let tau = t("[_1 ^4 _2 _3 ^9 _6 _7 _8]");
    let examples = [
        (Frak::K, t("[^2 ^3 _1 _6 _7]"), t("[^2 _1 _6 ^3 _7]")),
        (Frak::P, tau.clone(), t("[^7 ^8 ^9 _0]")),
        (Frak::S, tau.clone(), t("[^7 ^8 ^9 _0 _7 _8]")),
        (Frak::Z, tau.clone(), t("[^7 _0 _7 ^8 ^9 _8]")),
        (Frak::W, tau, t("[_7 ^0 ^7 ^8 ^9 _8]")),
    ];
    for (k, src, want) in &examples {
        let got = frak(*k, src).map_err(|e| e.to_string())?;
        if &got != want {
            return Err(format!("{k:?}({src}) = {got}, expected {want}"));
        }
    }
    let mut eligible = 0;
    for n in 1..=3 {
        for s in enumerate_types(n).map_err(|e| e.to_string())? {
            if s.is_comb() && !s.is_top_comb() {
                eligible += 1;
                let once = frak(Frak::S, &s).map_err(|e| format!("{s}: {e}"))?;
                let twice = frak(Frak::S, &once).map_err(|e| format!("{once}: {e}"))?;
                if once != twice {
                    return Err(format!("s not idempotent at {s}: {once} then {twice}"));
                }
            }
        }
    }
    Ok(format!("5 worked examples; s idempotent on {eligible} eligible types over n<=3"))
}

// ---- action tables ----

/// The seven cases of the χ action, stated directly.
pub fn chi_oracle(s: &GapType, m: usize) -> GapType {
    let top0 = s.max_lower() == m;
    let top1 = s.max_upper() == Some(m);
    let name = if GapType::max(s) < m {
        "[0]"
    } else if !s.is_top_comb() && (s.is_chain() || s.max_upper() < Some(m)) {
        "[01]"
    } else if s.is_top_comb() && s.max_upper() < Some(m) {
        "[^0 _1]"
    } else if !top0 && top1 {
        "[^1 _0]"
    } else if !s.is_top_comb() {
        "[^1 _0 _1]"
    } else if !s.is_top2_comb() {
        "[_0 ^1 _1]"
    } else {
        "[^0 ^1 _1]"
    };
    t(name)
}

fn table_matches(map: &TypeMap, rows: &[(&str, &str)], what: &str) -> Result<(), String> {
    for (a, b) in rows {
        let got = map.get(&t(a)).ok_or_else(|| format!("{what}: {a} missing"))?;
        if got != &t(b) {
            return Err(format!("{what}: {a} -> {got}, expected {b}"));
        }
    }
    Ok(())
}

pub fn action_tables() -> Check {
    let limit = Duration::from_secs(10);
    let mut times = Vec::new();

    let start = Instant::now();
    let map_101 = [
        ("[0]", "[0]"),
        ("[1]", "[^1 _0 _1]"),
        ("[01]", "[^1 _0 _1]"),
        ("[^1 _0]", "[^1 _0]"),
        ("[^1 _0 _1]", "[^1 _0 _1]"),
        ("[_0 ^1 _1]", "[_0 ^1 _1]"),
        ("[^0 _1]", "[_0 ^1 _1]"),
        ("[^0 ^1 _1]", "[^0 ^1 _1]"),
    ];
    table_matches(&builtin_101_map(), &map_101, "101 map")?;
    let s = build_max_scheme(&[t("[0]"), t("[^1 _0 _1]")], 2).map_err(|e| e.to_string())?;
    let computed = full_action(&s).map_err(|e| e.to_string())?;
    table_matches(&computed, &map_101, "101 transducer")?;
    timed(limit, start, "(a)")?;
    times.push(start.elapsed());

    let start = Instant::now();
    let psi = plain_morphism(2, &[vec![0, 1], vec![1, 1]]).map_err(|e| e.to_string())?;
    let psi_rows = [
        ("[0]", "[01]"),
        ("[1]", "[1]"),
        ("[01]", "[01]"),
        ("[^0 _1]", "[^0 ^1 _1]"),
        ("[^0 ^1 _1]", "[^0 ^1 _1]"),
        ("[^1 _0]", "[_0 ^1 _1]"),
        ("[_0 ^1 _1]", "[_0 ^1 _1]"),
        ("[^1 _0 _1]", "[_0 ^1 _1]"),
    ];
    table_matches(&full_action(&psi).map_err(|e| e.to_string())?, &psi_rows, "ψ table")?;
    timed(limit, start, "(b)")?;
    times.push(start.elapsed());

    let start = Instant::now();
    let chi = full_action(&chi_scheme(2)).map_err(|e| e.to_string())?;
    let mut seen = 0;
    for s in enumerate_types(3).map_err(|e| e.to_string())? {
        let got = chi.get(&s).ok_or_else(|| format!("χ: {s} missing"))?;
        if got != &chi_oracle(&s, 2) {
            return Err(format!("χ: {s} -> {got}, expected {}", chi_oracle(&s, 2)));
        }
        seen += 1;
    }
    timed(limit, start, "(c)")?;
    times.push(start.elapsed());

    let start = Instant::now();
    let phi = plain_morphism(3, &[vec![0, 0], vec![0, 1], vec![2, 2]]).map_err(|e| e.to_string())?;
    let chains: Vec<GapType> = enumerate_types(3).map_err(|e| e.to_string())?.into_iter().filter(|x| x.is_chain()).collect();
    let phi_map = full_action(&phi).map_err(|e| e.to_string())?;
    for c in &chains {
        // φ maps 1 to 01, so a chain gains 0 exactly when it contains 1.
        let mut vals = c.lower();
        if vals.contains(&1) && !vals.contains(&0) {
            vals.insert(0, 0);
        }
        let want = GapType::chain(&vals).map_err(|e| e.to_string())?;
        if phi_map.get(c) != Some(&want) {
            return Err(format!("φ on chains: {c} -> {:?}, expected {want}", phi_map.get(c).map(|x| x.to_string())));
        }
    }
    timed(limit, start, "(d)")?;
    times.push(start.elapsed());
    Ok(format!("(a) 101 map, (b) 8 rows, (c) {seen} χ types, (d) {} chains; times {times:.2?}", chains.len()))
}

// ---- constructed maps ----

fn monotone_tuples(types: &[GapType], k: usize) -> Vec<Vec<GapType>> {
    let mut out: Vec<Vec<GapType>> = vec![Vec::new()];
    for _ in 0..k {
        out = out
            .into_iter()
            .flat_map(|c| {
                types
                    .iter()
                    .filter(|x| c.last().is_none_or(|l| GapType::max(l) <= GapType::max(x)))
                    .map(|x| {
                        let mut y = c.clone();
                        y.push(x.clone());
                        y
                    })
                    .collect::<Vec<_>>()
            })
            .collect();
    }
    out
}

pub fn max_scheme_hits() -> Check {
    let mut checked = 0;
    for m in 1..=3 {
        let types = enumerate_types(m).map_err(|e| e.to_string())?;
        let kmax = if m <= 2 { 3 } else { 2 };
        for k in 1..=kmax {
            for taus in monotone_tuples(&types, k) {
                let s = build_max_scheme(&taus, m).map_err(|e| format!("{taus:?}: {e}"))?;
                let basis: Vec<GapType> = (0..k).map(|i| GapType::chain(&[i]).expect("singleton")).collect();
                for (b, got) in partial_action(&s, &basis, DEFAULT_COUNT, DEFAULT_GROWTH).map_err(|e| e.to_string())? {
                    let i = b.lower()[0];
                    if got.as_ref().ok() != Some(&taus[i]) {
                        let names: Vec<String> = taus.iter().map(|x| x.to_string()).collect();
                        return Err(format!("[{}] -> {got:?} for {names:?}", i));
                    }
                }
                checked += 1;
            }
        }
    }
    Ok(format!("{checked} monotone tuples"))
}

/// Compares the subdomination type map with the transducer action on every
/// source type.
pub fn subdomination_agreement() -> Check {
    let pairs = [
        (restriction_scheme(&[0, 1], 2).expect("valid"), t("[^1 _0 _1]")),
        (restriction_scheme(&[0, 2], 3).expect("valid"), t("[^2 _0 _1]")),
        (plain_morphism(3, &[vec![0, 1], vec![1, 1]]).expect("valid"), t("[^1 _0 _2]")),
    ];
    let mut agree_pairs = 0;
    let mut issues = Vec::new();
    for (inner, tau) in &pairs {
        let inner_map = full_action(inner).map_err(|e| e.to_string())?;
        let expected = build_subdomination_map(&inner_map, tau).map_err(|e| e.to_string())?;
        let scheme = build_subdomination_scheme(inner, tau).map_err(|e| e.to_string())?;
        let types = enumerate_types(inner.from + 1).map_err(|e| e.to_string())?;
        let mut bad = Vec::new();
        for (s, got) in partial_action(&scheme, &types, DEFAULT_COUNT, DEFAULT_GROWTH).map_err(|e| e.to_string())? {
            if got.as_ref().ok() != Some(expected.apply(&s)) {
                bad.push(s.to_string());
            }
        }
        if bad.is_empty() {
            agree_pairs += 1;
        } else {
            issues.push(format!("τ={tau}: {} of {} disagree (e.g. {})", bad.len(), types.len(), bad[0]));
        }
    }
    if agree_pairs >= 2 {
        Ok(format!("{agree_pairs} pairs agree on all source types"))
    } else {
        Err(format!("{agree_pairs} pairs agree; {}", issues.join("; ")))
    }
}

pub fn strong_scheme_on_chains() -> Check {
    let mut families = 0;
    let pool: Vec<GapType> = enumerate_types(2).map_err(|e| e.to_string())?;
    let extra = [vec!["[^2 _1]", "[^0 ^2 _1]", "[^2 _0 _1]"], vec!["[2]", "[^0 _2]", "[12]"]];
    let mut all: Vec<(Vec<GapType>, usize)> = Vec::new();
    for n in 1..=3 {
        for tuple in monotone_tuples(&pool, n).into_iter().chain(reorderings(&pool, n)) {
            if tuple.iter().all(|x| x.strength() == tuple[0].strength()) {
                all.push((tuple, 2));
            }
        }
    }
    for fam in extra {
        all.push((fam.iter().map(|x| t(x)).collect(), 3));
    }
    all.sort();
    all.dedup();
    for (taus, to) in all {
        let n = taus.len();
        let s = build_strong_scheme(&taus, to).map_err(|e| e.to_string())?;
        let chains: Vec<GapType> = enumerate_types(n).map_err(|e| e.to_string())?.into_iter().filter(|x| x.is_chain()).collect();
        for (sigma, img) in partial_action(&s, &chains, DEFAULT_COUNT, DEFAULT_GROWTH).map_err(|e| e.to_string())? {
            let want = &taus[sigma.lower()[0]];
            if img.as_ref().ok() != Some(want) {
                let names: Vec<String> = taus.iter().map(|x| x.to_string()).collect();
                return Err(format!("{names:?}: {sigma} -> {img:?}, expected {want}"));
            }
        }
        families += 1;
    }
    Ok(format!("{families} families with a common strength"))
}

fn reorderings(pool: &[GapType], n: usize) -> Vec<Vec<GapType>> {
    let mut out: Vec<Vec<GapType>> = vec![Vec::new()];
    for _ in 0..n {
        out = out
            .into_iter()
            .flat_map(|c| {
                pool.iter()
                    .map(|x| {
                        let mut y = c.clone();
                        y.push(x.clone());
                        y
                    })
                    .collect::<Vec<_>>()
            })
            .collect();
    }
    out
}

pub fn constructed_maps() -> Check {
    let parts = [
        ("max", max_scheme_hits()),
        ("subdomination", subdomination_agreement()),
        ("strong", strong_scheme_on_chains()),
    ];
    let text: Vec<String> = parts
        .iter()
        .map(|(n, r)| match r {
            Ok(d) => format!("{n}: ok ({d})"),
            Err(d) => format!("{n}: FAIL ({d})"),
        })
        .collect();
    if parts.iter().all(|(_, r)| r.is_ok()) {
        Ok(text.join("; "))
    } else {
        Err(text.join("; "))
    }
}

// ---- catalog ----

pub fn verify_report() -> VerifyReport {
    catalog::verify_catalog(&catalog::default_dir(), &VerifyOptions::default()).expect("catalogs load")
}

pub fn facts(report: &VerifyReport, names: &[&str]) -> Check {
    let mut failed = Vec::new();
    for name in names {
        match report.fact(name) {
            Some(f) if f.pass => {}
            Some(f) => failed.push(format!("{name} ({})", f.detail)),
            None => failed.push(format!("{name} (missing)")),
        }
    }
    if failed.is_empty() {
        Ok(format!("{} facts pass", names.len()))
    } else {
        Err(failed.join("; "))
    }
}

pub const CATALOG_FACTS: [&str; 13] = [
    "2-gap count",
    "3-gap count",
    "2-gap entries validate",
    "3-gap entries validate",
    "2-gap permutation total",
    "3-gap permutation total",
    "2-gap manifest agrees",
    "3-gap manifest agrees",
    "2-gap strong set",
    "3-gap strong set",
    "entries 1-63 = free family",
    "entries 105-119 = MNO extensions",
    "entries 103,104,163 = strong constructions",
];

pub const BREAKING_FACTS: [&str; 4] = [
    "every 3-gap has two breakable pairs sharing an index",
    "break witnesses are sound",
    "break witnesses pass admissibility filters",
    "entries 1-104 not {0,1}-broken within budget",
];

pub fn bounds() -> Check {
    let mut parts = Vec::new();
    for (n, count) in [(2usize, 5u32), (3, 163)] {
        let b = gaps::n_bounds(n).map_err(|e| e.to_string())?;
        // Independent evaluation of both sides.
        let jn = types::count_formula(n);
        let jn1 = types::count_formula(n - 1);
        let upper = BigUint::from(n).pow(u32::try_from(&jn - BigUint::from(n)).expect("small"));
        let lower_exp = i64::try_from(&jn1).expect("small") - n as i64 - 1;
        let c = BigUint::from(count);
        let above_lower = if lower_exp < 0 { true } else { BigUint::from(2u32).pow(lower_exp as u32) < c };
        if !b.brackets(&c) || !above_lower || c >= upper || b.upper != upper.to_string() {
            return Err(format!("n={n}: bounds {b:?} do not bracket {count}"));
        }
        parts.push(format!("2^{} < {count} < {n}^{}", lower_exp, jn - BigUint::from(n)));
    }
    Ok(parts.join(", "))
}

// ---- property suites ----

fn run<S: Strategy>(
    strategy: S,
    test: impl Fn(S::Value) -> Result<(), TestCaseError>,
) -> Result<(), String> {
    runner().run(&strategy, test).map_err(|e| e.to_string())
}

/// Splits of `w` into pieces each starting with its largest letter, with
/// strictly increasing first letters.
fn brute_force_decompositions(w: &[usize]) -> Vec<Vec<Vec<usize>>> {
    let n = w.len();
    let mut out = Vec::new();
    for mask in 0u32..(1 << (n - 1)) {
        let mut pieces: Vec<Vec<usize>> = vec![vec![w[0]]];
        for i in 1..n {
            if mask & (1 << (i - 1)) != 0 {
                pieces.push(Vec::new());
            }
            pieces.last_mut().expect("nonempty").push(w[i]);
        }
        let blocks_ok = pieces.iter().all(|p| p.iter().all(|&l| l <= p[0]));
        let heads_ok = pieces.windows(2).all(|x| x[0][0] < x[1][0]);
        if blocks_ok && heads_ok {
            out.push(pieces);
        }
    }
    out
}

pub fn prop_blocks() -> Check {
    run((1usize..=5).prop_flat_map(|m| (Just(m), prop::collection::vec(0..m, 1..=11))), |(m, letters)| {
        let w = Node::new(m, letters.clone()).expect("letters below alphabet");
        let blocks = block_decompose(&w).expect("nonempty");
        let joined: Vec<usize> = blocks.iter().flat_map(|b| b.word.letters().to_vec()).collect();
        prop_assert_eq!(&joined, &letters);
        let pieces: Vec<Vec<usize>> = blocks.iter().map(|b| b.word.letters().to_vec()).collect();
        let all = brute_force_decompositions(&letters);
        prop_assert_eq!(all.len(), 1);
        prop_assert_eq!(&all[0], &pieces);
        for b in &blocks {
            prop_assert_eq!(b.word.letters()[0], b.head);
        }
        Ok(())
    })?;
    Ok(format!("{CASES} words: reconstruction and uniqueness"))
}

fn node_set(alphabet: usize, max_nodes: usize, max_len: usize) -> impl Strategy<Value = NodeSet> {
    prop::collection::vec(prop::collection::vec(0..alphabet, 0..=max_len), 1..=max_nodes).prop_map(move |ws| {
        NodeSet::new(alphabet, ws.into_iter().map(|w| Node::new(alphabet, w).expect("letters below alphabet")))
            .expect("one alphabet")
    })
}

pub fn prop_closure() -> Check {
    run((2usize..=4).prop_flat_map(|m| node_set(m, 6, 6)), |f| {
        let c = closure(&f);
        prop_assert_eq!(&closure(&c), &c);
        prop_assert!(tree::is_closed(&c));
        for n in f.sorted() {
            prop_assert!(c.contains(&n));
        }
        Ok(())
    })?;
    Ok(format!("{CASES} families: closure idempotent and extensive"))
}

/// Replaces each letter `i` by a word of `W_i`, then prefixes a stem.
fn substitute(f: &NodeSet, words: &[Vec<usize>], stem: &[usize]) -> Option<NodeSet> {
    let m = f.alphabet();
    let nodes: Vec<Node> = f
        .sorted()
        .iter()
        .map(|x| {
            let mut out = stem.to_vec();
            for &l in x.letters() {
                out.extend_from_slice(&words[l]);
            }
            Node::new(m, out).expect("letters below alphabet")
        })
        .collect();
    let set = NodeSet::new(m, nodes).ok()?;
    (set.len() == f.len()).then_some(set)
}

fn w_word(head: usize) -> impl Strategy<Value = Vec<usize>> {
    prop::collection::vec(0..=head, 0..=2).prop_map(move |mut tail| {
        tail.insert(0, head);
        tail
    })
}

pub fn prop_equivalence() -> Check {
    let m = 3;
    let x = tree::equivalent(
        &NodeSet::parse(m, &["110", "1111", "20000", "211111"]).expect("nodes"),
        &NodeSet::parse(m, &["100", "1111", "22000", "221111"]).expect("nodes"),
    );
    if x {
        return Err("the counterexample pair is reported equivalent".into());
    }
    let equivalent_cases = Cell::new(0usize);
    let strategy = (
        node_set(m, 7, 5),
        prop::collection::vec(w_word(0), 1),
        w_word(1),
        w_word(2),
        prop::collection::vec(0..m, 0..=3),
        node_set(m, 7, 5),
        any::<bool>(),
    );
    run(strategy, |(f, w0, w1, w2, stem, other, mapped)| {
        let g = if mapped {
            let words = vec![w0[0].clone(), w1, w2];
            match substitute(&f, &words, &stem) {
                Some(g) => g,
                None => return Ok(()),
            }
        } else if other.len() == f.len() {
            other
        } else {
            return Ok(());
        };
        let direct = tree::equivalent(&f, &g);
        let quads = tree::equivalent_by_quadruples(&f, &g).expect("equal sizes");
        prop_assert_eq!(direct, quads, "families {:?} and {:?}", f.sorted(), g.sorted());
        if direct {
            equivalent_cases.set(equivalent_cases.get() + 1);
        }
        Ok(())
    })?;
    let hits = equivalent_cases.get();
    if hits < (CASES / 20) as usize {
        return Err(format!("only {hits} equivalent pairs generated"));
    }
    Ok(format!("{CASES} pairs of families up to 7 nodes ({hits} equivalent); counterexample pair separated"))
}

pub fn prop_infer_generate() -> Check {
    let all = enumerate_types(3).map_err(|e| e.to_string())?;
    if all.len() != 61 {
        return Err(format!("{} types of 3^<ω", all.len()));
    }
    for x in &all {
        for growth in 2..=6 {
            let set = generate_set(x, DEFAULT_COUNT, growth, &Node::root(3)).map_err(|e| e.to_string())?;
            let got = infer_type(&set.nodes, DEFAULT_WINDOW).map_err(|e| format!("{x} growth {growth}: {e}"))?;
            if &got != x {
                return Err(format!("{x} growth {growth}: inferred {got}"));
            }
        }
    }
    let types = all.clone();
    run((0..types.len(), 2usize..=6, prop::collection::vec(0usize..3, 0..=6), 5usize..=10), |(i, growth, stem, count)| {
        let stem = Node::new(3, stem).expect("letters below alphabet");
        let set = generate_set(&types[i], count, growth, &stem).expect("valid parameters");
        let got = infer_type(&set.nodes, DEFAULT_WINDOW);
        prop_assert_eq!(got.as_ref().ok(), Some(&types[i]));
        Ok(())
    })?;
    Ok(format!("61 types x growth 2..6 exhaustively, plus {CASES} random stems"))
}

pub fn prop_filters() -> Check {
    let mut maps: Vec<(String, TypeMap)> = vec![("101 map".into(), builtin_101_map())];
    for m in 2..=3 {
        let types = enumerate_types(m).map_err(|e| e.to_string())?;
        for a in &types {
            if let Ok(map) = build_domination_map(std::slice::from_ref(a), m) {
                maps.push((format!("domination {a}"), map));
            }
            for b in &types {
                if a != b && types::dominates(b, a) {
                    let map = build_domination_map(&[a.clone(), b.clone()], m).map_err(|e| e.to_string())?;
                    maps.push((format!("domination {a} << {b}"), map));
                }
            }
        }
    }
    for tau in enumerate_types(2).map_err(|e| e.to_string())?.into_iter().filter(|x| x.is_comb() && !x.is_top_comb()) {
        let map = build_subdomination_map(&TypeMap::identity(2), &tau).map_err(|e| e.to_string())?;
        maps.push((format!("subdomination {tau}"), map));
    }
    let constructed_maps = maps.len();
    let budget = Budget::default();
    for (k, m) in [(1, 2), (1, 3), (2, 2)] {
        for c in gaps::candidates(k, m, &budget).iter() {
            maps.push((c.label.clone(), c.map.clone()));
        }
    }
    let catalog_dir = catalog::default_dir();
    let two = catalog::load_catalog(&catalog_dir, 2).map_err(|e| e.to_string())?;
    let mut witnesses = 0;
    for e in &two.entries {
        for f in &two.entries {
            if let Some(c) = gaps::search_leq(&e.gap, &f.gap, &budget) {
                if !gaps::witnesses_leq(&c.map, &e.gap, &f.gap) {
                    return Err(format!("{} does not witness {} <= {}", c.label, e.id, f.id));
                }
                maps.push((format!("{} <= {}: {}", e.id, f.id, c.label), c.map));
                witnesses += 1;
            }
        }
    }
    for (label, map) in &maps {
        let r = admissible_violations(map);
        if !r.is_empty() {
            return Err(format!("{label}: {:?}", r.rules()));
        }
    }
    Ok(format!("{} maps ({constructed_maps} constructed maps, {witnesses} order witnesses)", maps.len()))
}

pub fn prop_rigidity() -> Check {
    let mut parts = Vec::new();
    for (m, budget) in [(2, Budget::default()), (3, Budget::small())] {
        let r = gaps::rigidity_check(m, &budget);
        if !r.counterexamples.is_empty() {
            return Err(format!("m={m}: {:?}", r.counterexamples));
        }
        parts.push(format!(
            "m={m}: {} schemes, {} fix the basis, {} of those without a type action",
            r.schemes, r.fixing_basis, r.unstable
        ));
    }
    Ok(parts.join("; "))
}

pub fn property_suites() -> Check {
    let suites: [(&str, fn() -> Check); 6] = [
        ("blocks", prop_blocks),
        ("closure", prop_closure),
        ("equivalence", prop_equivalence),
        ("infer/generate", prop_infer_generate),
        ("filters", prop_filters),
        ("rigidity", prop_rigidity),
    ];
    let mut failed = Vec::new();
    for (name, f) in suites {
        if let Err(e) = f() {
            failed.push(format!("{name}: {e}"));
        }
    }
    if failed.is_empty() {
        Ok("6 suites pass".into())
    } else {
        Err(failed.join("; "))
    }
}
