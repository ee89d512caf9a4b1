//! Standard gaps as assignments of type sets: validity, density, strength,
//! permutations, order witnesses, admissibility filters, bounded searches for
//! order and breaking witnesses, and the gap constructors.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::str::FromStr;
use std::sync::{Arc, Mutex, OnceLock};

use num_bigint::BigUint;
use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::embed::{
    build_domination_map, build_max_scheme, builtin_101_map, full_action_with, morphism_scheme, EmbedError, Scheme, TypeMap,
    DEFAULT_COUNT, DEFAULT_GROWTH,
};
use crate::types::{
    compose_chains, count_formula, dominates, enumerate_types, sort_canonical, type_set_mno, GapType, Mno,
    TypeError,
};

/// Errors raised by gap operations.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GapError {
    #[error("arity mismatch: {0} vs {1}")]
    Arity(usize, usize),
    #[error("not a permutation of {n}: {perm:?}")]
    NotPermutation { perm: Vec<usize>, n: usize },
    #[error("invalid gap: {0}")]
    Invalid(String),
    #[error("bad parameters: {0}")]
    Parameters(String),
    #[error("the gap is already dense")]
    AlreadyDense,
    #[error("the gap is not dense")]
    NotDense,
    #[error("family too large: 2^{0} members")]
    TooLarge(usize),
    #[error(transparent)]
    Type(#[from] TypeError),
    #[error(transparent)]
    Embed(#[from] EmbedError),
}

/// A list of type sets `S_0, …, S_{n−1}` over `ambient^{<ω}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StandardGap {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub ambient: usize,
    pub ideals: Vec<Vec<GapType>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub perm_count: Option<usize>,
}

impl StandardGap {
    /// Builds a gap with each ideal in canonical order.
    pub fn new(ambient: usize, ideals: Vec<Vec<GapType>>) -> Self {
        let ideals = ideals
            .into_iter()
            .map(|mut s| {
                sort_canonical(&mut s);
                s
            })
            .collect();
        StandardGap { name: None, ambient, ideals, perm_count: None }
    }

    /// Builds a gap from type strings.
    pub fn parse(ambient: usize, ideals: &[&[&str]]) -> Result<Self, TypeError> {
        let ideals = ideals
            .iter()
            .map(|s| s.iter().map(|t| t.parse()).collect::<Result<Vec<GapType>, _>>())
            .collect::<Result<Vec<_>, _>>()?;
        Ok(StandardGap::new(ambient, ideals))
    }

    pub fn named(mut self, name: &str) -> Self {
        self.name = Some(name.to_string());
        self
    }

    pub fn from_json(text: &str) -> anyhow::Result<Self> {
        let g: StandardGap = serde_json::from_str(text)?;
        let (name, perm_count) = (g.name.clone(), g.perm_count);
        let mut out = StandardGap::new(g.ambient, g.ideals);
        out.name = name;
        out.perm_count = perm_count;
        Ok(out)
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("gaps serialize")
    }

    pub fn arity(&self) -> usize {
        self.ideals.len()
    }

    /// Index of the first ideal containing `t`.
    pub fn ideal_of(&self, t: &GapType) -> Option<usize> {
        self.ideals.iter().position(|s| s.contains(t))
    }

    /// Types of the ambient tree outside every ideal.
    pub fn orthogonal(&self) -> Vec<GapType> {
        enumerate_types(self.ambient.max(1))
            .expect("positive alphabet")
            .into_iter()
            .filter(|t| self.ideal_of(t).is_none())
            .collect()
    }

    /// True iff both gaps carry the same ideals in the same order.
    pub fn same_ideals(&self, other: &StandardGap) -> bool {
        self.ambient == other.ambient && self.ideals == other.ideals
    }
}

impl fmt::Display for StandardGap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .ideals
            .iter()
            .map(|s| s.iter().map(|t| t.to_string()).collect::<Vec<_>>().join(","))
            .collect();
        write!(f, "{}", parts.join(" | "))
    }
}

/// One defect found by [`validate_gap`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "SCREAMING_SNAKE_CASE")]
pub enum GapProblem {
    ZeroAmbient,
    NoIdeals,
    EmptyIdeal { ideal: usize },
    OutsideAmbient { ideal: usize, ty: GapType },
    Overlap { ty: GapType, first: usize, second: usize },
}

/// Outcome of [`validate_gap`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GapReport {
    /// Nonempty, pairwise disjoint ideals within the ambient tree.
    pub valid: bool,
    /// Nonempty ideals within the ambient tree, overlaps allowed.
    pub star_valid: bool,
    /// Arity equals the ambient size and some `ε` has `[ε(i)] ∈ S_i`.
    pub standard: bool,
    pub basis_permutation: Option<Vec<usize>>,
    pub problems: Vec<GapProblem>,
}

/// Checks nonemptiness, disjointness and the ambient bound, and flags standardness.
pub fn validate_gap(g: &StandardGap) -> GapReport {
    let mut problems = Vec::new();
    if g.ambient == 0 {
        problems.push(GapProblem::ZeroAmbient);
    }
    if g.ideals.is_empty() {
        problems.push(GapProblem::NoIdeals);
    }
    let mut seen: BTreeMap<&GapType, usize> = BTreeMap::new();
    let mut overlap = false;
    for (i, s) in g.ideals.iter().enumerate() {
        if s.is_empty() {
            problems.push(GapProblem::EmptyIdeal { ideal: i });
        }
        for t in s {
            if t.check_alphabet(g.ambient).is_err() {
                problems.push(GapProblem::OutsideAmbient { ideal: i, ty: t.clone() });
            }
            match seen.get(t) {
                Some(&first) if first != i => {
                    overlap = true;
                    problems.push(GapProblem::Overlap { ty: t.clone(), first, second: i });
                }
                _ => {
                    seen.insert(t, i);
                }
            }
        }
    }
    let star_valid = problems.iter().all(|p| matches!(p, GapProblem::Overlap { .. }));
    let basis_permutation = if g.arity() == g.ambient && star_valid { basis_permutation(g) } else { None };
    GapReport {
        valid: star_valid && !overlap,
        star_valid,
        standard: basis_permutation.is_some(),
        basis_permutation,
        problems,
    }
}

fn basis_permutation(g: &StandardGap) -> Option<Vec<usize>> {
    let n = g.arity();
    let mut eps = vec![usize::MAX; n];
    let mut used = vec![false; n];
    fn rec(i: usize, g: &StandardGap, eps: &mut Vec<usize>, used: &mut Vec<bool>) -> bool {
        if i == eps.len() {
            return true;
        }
        for j in 0..eps.len() {
            let basic = GapType::chain(&[j]).expect("singleton chain");
            if !used[j] && g.ideals[i].contains(&basic) {
                used[j] = true;
                eps[i] = j;
                if rec(i + 1, g, eps, used) {
                    return true;
                }
                used[j] = false;
            }
        }
        false
    }
    rec(0, g, &mut eps, &mut used).then_some(eps)
}

/// Density, strength and per-ideal invariants.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GapProfile {
    pub dense: bool,
    pub strong: bool,
    /// A strength shared by every ideal, when one exists.
    pub common_strength: Option<BTreeSet<usize>>,
    pub strength_profiles: Vec<Vec<BTreeSet<usize>>>,
    pub max_profiles: Vec<BTreeSet<usize>>,
}

pub fn gap_profile(g: &StandardGap) -> GapProfile {
    let strength_profiles: Vec<Vec<BTreeSet<usize>>> = g
        .ideals
        .iter()
        .map(|s| {
            let set: BTreeSet<BTreeSet<usize>> = s.iter().map(|t| t.strength()).collect();
            set.into_iter().collect()
        })
        .collect();
    let common_strength = strength_profiles
        .first()
        .and_then(|first| first.iter().find(|st| strength_profiles.iter().all(|p| p.contains(st))).cloned());
    GapProfile {
        dense: g.orthogonal().is_empty(),
        strong: common_strength.is_some(),
        common_strength,
        strength_profiles,
        max_profiles: g.ideals.iter().map(|s| s.iter().map(GapType::max).collect()).collect(),
    }
}

/// `εΓ = (S_{ε(0)}, …, S_{ε(n−1)})`.
pub fn permute_gap(g: &StandardGap, eps: &[usize]) -> Result<StandardGap, GapError> {
    let n = g.arity();
    if eps.len() != n {
        return Err(GapError::Arity(eps.len(), n));
    }
    let set: BTreeSet<usize> = eps.iter().copied().collect();
    if set.len() != n || eps.iter().any(|&e| e >= n) {
        return Err(GapError::NotPermutation { perm: eps.to_vec(), n });
    }
    Ok(StandardGap {
        name: g.name.clone(),
        ambient: g.ambient,
        ideals: eps.iter().map(|&e| g.ideals[e].clone()).collect(),
        perm_count: g.perm_count,
    })
}

/// All permutations of `n` in lexicographic order.
pub fn permutations(n: usize) -> Vec<Vec<usize>> {
    fn rec(cur: &mut Vec<usize>, used: &mut Vec<bool>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == used.len() {
            out.push(cur.clone());
            return;
        }
        for i in 0..used.len() {
            if !used[i] {
                used[i] = true;
                cur.push(i);
                rec(cur, used, out);
                cur.pop();
                used[i] = false;
            }
        }
    }
    let mut out = Vec::new();
    rec(&mut Vec::new(), &mut vec![false; n], &mut out);
    out
}

/// True iff `f` sends each `S'_i` into `S_i` and orthogonal types to orthogonal types.
pub fn witnesses_leq(f: &TypeMap, lower: &StandardGap, upper: &StandardGap) -> bool {
    if f.from != lower.ambient || f.to != upper.ambient || lower.arity() != upper.arity() {
        return false;
    }
    f.iter().all(|(s, img)| {
        let mut inside = false;
        for (i, ideal) in lower.ideals.iter().enumerate() {
            if ideal.contains(s) {
                inside = true;
                if !upper.ideals[i].contains(img) {
                    return false;
                }
            }
        }
        inside || upper.ideal_of(img).is_none()
    })
}

/// The six necessary conditions on type maps induced by normal embeddings.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Rule {
    Max,
    Dom,
    Strength,
    ChainComp,
    Collapse,
    Basis,
}

/// A rule and the source types exhibiting its failure.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub rule: Rule,
    pub types: Vec<GapType>,
}

/// Violations of the admissibility filters; empty iff all pass.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct AdmissibilityReport {
    pub violations: Vec<Violation>,
}

impl AdmissibilityReport {
    pub fn is_empty(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn rules(&self) -> BTreeSet<Rule> {
        self.violations.iter().map(|v| v.rule).collect()
    }
}

/// Violations kept per rule.
const VIOLATION_CAP: usize = 8;

/// Evaluates the six filters exhaustively over the source types of `f`.
pub fn admissible_violations(f: &TypeMap) -> AdmissibilityReport {
    let pairs: Vec<(&GapType, &GapType)> = f.iter().collect();
    let mut out: Vec<Violation> = Vec::new();
    let mut push = |rule: Rule, types: Vec<GapType>| {
        if out.iter().filter(|v| v.rule == rule).count() < VIOLATION_CAP {
            out.push(Violation { rule, types });
        }
    };
    for &(a, fa) in &pairs {
        for &(b, fb) in &pairs {
            if GapType::max(a) <= GapType::max(b) && GapType::max(fa) > GapType::max(fb) {
                push(Rule::Max, vec![a.clone(), b.clone()]);
            }
            if dominates(a, b) && fa != fb && !dominates(fa, fb) {
                push(Rule::Dom, vec![a.clone(), b.clone()]);
            }
            if a < b && a.strength() == b.strength() && fa.strength() != fb.strength() {
                push(Rule::Strength, vec![a.clone(), b.clone()]);
            }
            if a.is_chain() && b.is_chain() && fa.is_chain() && fb.is_chain() {
                let ab = compose_chains(a, b).expect("chains");
                let fab = compose_chains(fa, fb).expect("chains");
                if f.get(&ab) != Some(&fab) {
                    push(Rule::ChainComp, vec![a.clone(), b.clone()]);
                }
            }
        }
    }
    for k in 1..=f.from {
        let trigger = pairs.iter().find(|(t, ft)| t.is_comb() && t.max_upper() == Some(k - 1) && ft.is_chain());
        if let Some((t, ft)) = trigger {
            for &(s, fs) in &pairs {
                if GapType::max(s) < k && fs != *ft {
                    push(Rule::Collapse, vec![(*t).clone(), s.clone()]);
                }
            }
        }
    }
    let basis_images: BTreeSet<&GapType> =
        (0..f.from).map(|i| f.apply(&GapType::chain(&[i]).expect("singleton chain"))).collect();
    for &(s, fs) in &pairs {
        if fs.entries().len() == 1 && !basis_images.contains(fs) {
            push(Rule::Basis, vec![s.clone()]);
        }
    }
    out.sort_by(|x, y| x.rule.cmp(&y.rule));
    AdmissibilityReport { violations: out }
}

/// Bounds of the scheme space explored by searches.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Budget {
    /// Longest word a morphism may attach to one letter.
    pub max_word_len: usize,
    /// Largest source alphabet tried when breaking.
    pub max_source: usize,
    /// Allow a pad letter after each word.
    pub pads: bool,
    /// Include domination maps, max-scheme actions and relabelled copies of the 101 map.
    pub builtins: bool,
}

impl Default for Budget {
    fn default() -> Self {
        Budget { max_word_len: 3, max_source: 2, pads: true, builtins: true }
    }
}

impl Budget {
    /// The budget used for three-letter sources: short words, no pads.
    pub fn small() -> Self {
        Budget { max_word_len: 2, max_source: 2, pads: false, builtins: true }
    }
}

/// A type map found by a search, with the scheme realizing it when it comes
/// from a transducer.
#[derive(Clone, Debug)]
pub struct Candidate {
    pub label: String,
    pub scheme: Option<Scheme>,
    pub map: TypeMap,
}

impl Candidate {
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "label": self.label,
            "scheme": self.scheme,
            "map": self.map.to_json(),
        })
    }
}

/// Words over `m` letters with lengths `1..=len`, by length then lexicographically.
fn words_up_to(m: usize, len: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut layer: Vec<Vec<usize>> = vec![Vec::new()];
    for _ in 0..len {
        layer = layer
            .iter()
            .flat_map(|w| {
                (0..m).map(move |l| {
                    let mut x = w.clone();
                    x.push(l);
                    x
                })
            })
            .collect();
        out.extend(layer.iter().cloned());
    }
    out
}

fn word_label(w: &[usize], pad: Option<usize>) -> String {
    let mut s: String = w.iter().map(|d| d.to_string()).collect();
    if let Some(p) = pad {
        s.push_str(&format!("+{p}*"));
    }
    s
}

/// Letter images `(word, pad)` of every morphism in the budget, in
/// lexicographic order; only prefix codes are kept, so images are injective.
pub fn morphism_space(k: usize, m: usize, budget: &Budget) -> Vec<Vec<(Vec<usize>, Option<usize>)>> {
    let mut letter: Vec<(Vec<usize>, Option<usize>)> = Vec::new();
    for w in words_up_to(m, budget.max_word_len) {
        letter.push((w.clone(), None));
        if budget.pads {
            for p in 0..m {
                letter.push((w.clone(), Some(p)));
            }
        }
    }
    let effective = |(w, p): &(Vec<usize>, Option<usize>)| -> Vec<usize> {
        let mut e = w.clone();
        e.extend(p.iter());
        e
    };
    let mut out = Vec::new();
    let mut idx = vec![0usize; k];
    loop {
        let choice: Vec<(Vec<usize>, Option<usize>)> = idx.iter().map(|&i| letter[i].clone()).collect();
        let eff: Vec<Vec<usize>> = choice.iter().map(effective).collect();
        let prefix_code =
            (0..k).all(|a| (0..k).all(|b| a == b || !(eff[a].len() <= eff[b].len() && eff[b].starts_with(&eff[a]))));
        if prefix_code {
            out.push(choice);
        }
        let mut pos = k;
        loop {
            if pos == 0 {
                return out;
            }
            pos -= 1;
            idx[pos] += 1;
            if idx[pos] < letter.len() {
                break;
            }
            idx[pos] = 0;
        }
    }
}

type CacheKey = (usize, usize, Budget);

fn cache() -> &'static Mutex<HashMap<CacheKey, Arc<Vec<Candidate>>>> {
    static CACHE: OnceLock<Mutex<HashMap<CacheKey, Arc<Vec<Candidate>>>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

/// Stable type maps from `k^{<ω}` to `m^{<ω}` within the budget that pass
/// the admissibility filters: morphism actions in lexicographic order, then
/// built-ins. Cached per arguments.
pub fn candidates(k: usize, m: usize, budget: &Budget) -> Arc<Vec<Candidate>> {
    let key = (k, m, *budget);
    if let Some(c) = cache().lock().expect("cache lock").get(&key) {
        return c.clone();
    }
    let computed = Arc::new(compute_candidates(k, m, budget));
    cache().lock().expect("cache lock").entry(key).or_insert(computed).clone()
}

fn compute_candidates(k: usize, m: usize, budget: &Budget) -> Vec<Candidate> {
    let space = morphism_space(k, m, budget);
    let mut out: Vec<Candidate> = space
        .par_iter()
        .filter_map(|choice| {
            let words: Vec<Vec<usize>> = choice.iter().map(|(w, _)| w.clone()).collect();
            let pads: Vec<Option<usize>> = choice.iter().map(|(_, p)| *p).collect();
            let scheme = morphism_scheme(m, &words, &pads).ok()?;
            let map = full_action_with(&scheme, DEFAULT_COUNT, DEFAULT_GROWTH).ok()?;
            if !admissible_violations(&map).is_empty() {
                return None;
            }
            let label = choice
                .iter()
                .enumerate()
                .map(|(i, (w, p))| format!("{i}->{}", word_label(w, *p)))
                .collect::<Vec<_>>()
                .join(" ");
            Some(Candidate { label: format!("morphism {label}"), scheme: Some(scheme), map })
        })
        .collect();
    if budget.builtins {
        out.extend(builtin_candidates(k, m).into_iter().filter(|c| admissible_violations(&c.map).is_empty()));
    }
    out
}

fn builtin_candidates(k: usize, m: usize) -> Vec<Candidate> {
    let mut out = Vec::new();
    let types = enumerate_types(m).expect("positive alphabet");
    let mut chains: Vec<Vec<GapType>> = types.iter().map(|t| vec![t.clone()]).collect();
    for _ in 1..k {
        chains = chains
            .into_iter()
            .flat_map(|c| {
                let last = c.last().expect("nonempty").clone();
                types
                    .iter()
                    .filter(move |t| **t != last && dominates(t, &last))
                    .map(move |t| {
                        let mut x = c.clone();
                        x.push(t.clone());
                        x
                    })
                    .collect::<Vec<_>>()
            })
            .collect();
    }
    for c in chains {
        if let Ok(map) = build_domination_map(&c, m) {
            let names: Vec<String> = c.iter().map(|t| t.to_string()).collect();
            out.push(Candidate { label: format!("domination {}", names.join(" << ")), scheme: None, map });
        }
    }
    if k == 2 {
        let pairs: Vec<(&GapType, &GapType)> = types
            .iter()
            .flat_map(|a| types.iter().map(move |b| (a, b)))
            .filter(|(a, b)| GapType::max(a) <= GapType::max(b))
            .collect();
        let found: Vec<Candidate> = pairs
            .par_iter()
            .filter_map(|(a, b)| {
                let scheme = build_max_scheme(&[(*a).clone(), (*b).clone()], m).ok()?;
                let map = full_action_with(&scheme, DEFAULT_COUNT, DEFAULT_GROWTH).ok()?;
                Some(Candidate { label: format!("max-scheme [0]->{a} [1]->{b}"), scheme: Some(scheme), map })
            })
            .collect();
        out.extend(found);
        for a in 0..m {
            for b in a + 1..m {
                let relabel = TypeMap::relabel(&[a, b], m).expect("increasing letters");
                let map = TypeMap::compose(&relabel, &builtin_101_map()).expect("matching alphabets");
                out.push(Candidate { label: format!("101-map on letters {a},{b}"), scheme: None, map });
            }
        }
    }
    out
}

/// The first candidate witnessing `lower ≤ upper`, if any within the budget.
pub fn search_leq(lower: &StandardGap, upper: &StandardGap, budget: &Budget) -> Option<Candidate> {
    if lower.arity() != upper.arity() || lower.ambient == 0 || upper.ambient == 0 {
        return None;
    }
    candidates(lower.ambient, upper.ambient, budget)
        .iter()
        .find(|c| witnesses_leq(&c.map, lower, upper))
        .cloned()
}

/// Outcome of a bounded search.
#[derive(Clone, Debug)]
pub enum SearchOutcome {
    Found(Candidate),
    NotFoundWithinBudget,
}

impl SearchOutcome {
    pub fn found(&self) -> Option<&Candidate> {
        match self {
            SearchOutcome::Found(c) => Some(c),
            SearchOutcome::NotFoundWithinBudget => None,
        }
    }

    pub fn to_json(&self) -> serde_json::Value {
        match self {
            SearchOutcome::Found(c) => serde_json::json!({"status": "FOUND", "witness": c.to_json()}),
            SearchOutcome::NotFoundWithinBudget => serde_json::json!({"status": "NOT_FOUND_WITHIN_BUDGET"}),
        }
    }
}

/// Indices of the ideals met by the range of `f`.
pub fn ideals_met(f: &TypeMap, g: &StandardGap) -> BTreeSet<usize> {
    f.range().iter().filter_map(|t| g.ideal_of(t)).collect()
}

/// A candidate whose range meets `S_i` exactly for `i ∈ b`.
pub fn break_search(g: &StandardGap, b: &BTreeSet<usize>, budget: &Budget) -> SearchOutcome {
    for k in 1..=budget.max_source {
        if let Some(c) = candidates(k, g.ambient, budget).iter().find(|c| ideals_met(&c.map, g) == *b) {
            return SearchOutcome::Found(c.clone());
        }
    }
    SearchOutcome::NotFoundWithinBudget
}

/// Pairs `{i, j}` for which [`break_search`] finds a witness.
pub fn breakable_pairs(g: &StandardGap, budget: &Budget) -> BTreeMap<(usize, usize), Candidate> {
    let mut out = BTreeMap::new();
    for i in 0..g.arity() {
        for j in i + 1..g.arity() {
            if let SearchOutcome::Found(c) = break_search(g, &[i, j].into_iter().collect(), budget) {
                out.insert((i, j), c);
            }
        }
    }
    out
}

/// True iff two of the pairs share an index.
pub fn pairs_share_index(pairs: &BTreeSet<(usize, usize)>) -> bool {
    let v: Vec<&(usize, usize)> = pairs.iter().collect();
    v.iter().enumerate().any(|(x, p)| {
        v[x + 1..].iter().any(|q| p.0 == q.0 || p.0 == q.1 || p.1 == q.0 || p.1 == q.1)
    })
}

/// Outcome of checking that schemes fixing every `[i]` act as the identity.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct RigidityReport {
    pub schemes: usize,
    pub fixing_basis: usize,
    pub unstable: usize,
    pub counterexamples: Vec<String>,
}

/// Runs the rigidity check over the morphisms of the budget from `m` to `m` letters.
pub fn rigidity_check(m: usize, budget: &Budget) -> RigidityReport {
    let space = morphism_space(m, m, budget);
    let basis: Vec<GapType> = (0..m).map(|i| GapType::chain(&[i]).expect("singleton chain")).collect();
    let results: Vec<(bool, Option<bool>, String)> = space
        .par_iter()
        .filter_map(|choice| {
            let words: Vec<Vec<usize>> = choice.iter().map(|(w, _)| w.clone()).collect();
            let pads: Vec<Option<usize>> = choice.iter().map(|(_, p)| *p).collect();
            let scheme = morphism_scheme(m, &words, &pads).ok()?;
            let compiled = scheme.compile().ok()?;
            let fixes = basis.iter().all(|b| {
                crate::embed::type_action_compiled(&compiled, b, DEFAULT_COUNT, DEFAULT_GROWTH).ok().as_ref() == Some(b)
            });
            if !fixes {
                return Some((false, None, String::new()));
            }
            let label = choice.iter().map(|(w, p)| word_label(w, *p)).collect::<Vec<_>>().join(" ");
            let identity = full_action_with(&scheme, DEFAULT_COUNT, DEFAULT_GROWTH).ok().map(|f| f == TypeMap::identity(m));
            Some((true, identity, label))
        })
        .collect();
    let mut report = RigidityReport { schemes: results.len(), ..RigidityReport::default() };
    for (fixes, identity, label) in results {
        if !fixes {
            continue;
        }
        report.fixing_basis += 1;
        match identity {
            None => report.unstable += 1,
            Some(false) => report.counterexamples.push(label),
            Some(true) => {}
        }
    }
    report
}

/// Types that are chains with the given minimum.
fn chains_with_min(m: usize, min: usize) -> Vec<GapType> {
    enumerate_types(m)
        .expect("positive alphabet")
        .into_iter()
        .filter(|t| t.is_chain() && t.lower()[0] == min)
        .collect()
}

/// The strong gap `Σ^(A,B,ψ)` over `|A|` letters. `psi` sends ordered pairs
/// `(a, a')` of distinct elements of `A` to an element of `B`; missing
/// pairs are `∞`.
pub fn build_sigma(
    a: &[usize],
    b: &[usize],
    psi: &BTreeMap<(usize, usize), usize>,
) -> Result<StandardGap, GapError> {
    let n = a.len() + b.len();
    let all: BTreeSet<usize> = a.iter().chain(b).copied().collect();
    if a.is_empty() || all.len() != n || all.iter().any(|&x| x >= n) {
        return Err(GapError::Parameters("A and B must partition n with A nonempty".into()));
    }
    let xi: Vec<usize> = a.iter().copied().collect::<BTreeSet<_>>().into_iter().collect();
    let bset: BTreeSet<usize> = b.iter().copied().collect();
    for (&(x, y), v) in psi {
        if x == y || !xi.contains(&x) || !xi.contains(&y) || !bset.contains(v) {
            return Err(GapError::Parameters(format!("psi({x},{y}) = {v} is outside A×A → B")));
        }
    }
    let covered: BTreeSet<usize> = psi.values().copied().collect();
    if covered != bset {
        return Err(GapError::Parameters("psi does not cover B".into()));
    }
    let m = xi.len();
    let mut ideals = vec![Vec::new(); n];
    for (pos, &i) in xi.iter().enumerate() {
        ideals[i] = chains_with_min(m, pos);
    }
    for t in enumerate_types(m)? {
        if t.is_comb() {
            let key = (xi[t.lower()[0]], xi[t.upper()[0]]);
            if let Some(&i) = psi.get(&key) {
                ideals[i].push(t);
            }
        }
    }
    Ok(StandardGap::new(m, ideals))
}

/// `S_i` = types of `n^{<ω}` with maximum `i`.
pub fn build_m_gap(n: usize) -> Result<StandardGap, GapError> {
    let types = enumerate_types(n)?;
    let ideals = (0..n).map(|i| types.iter().filter(|t| GapType::max(t) == i).cloned().collect()).collect();
    Ok(StandardGap::new(n, ideals))
}

/// Appends `𝓜_m`, `𝓝_m` or `𝓞_m` as a new ideal over `(m+1)^{<ω}`.
pub fn extend_mno(g: &StandardGap, kind: Mno) -> StandardGap {
    let mut ideals = g.ideals.clone();
    ideals.push(type_set_mno(kind, g.ambient));
    StandardGap::new(g.ambient + 1, ideals)
}

/// `S_i = {[i]}` for `i < m`, followed by the given ideals.
pub fn build_free_gap(m: usize, rest: &[Vec<GapType>]) -> Result<StandardGap, GapError> {
    let mut ideals: Vec<Vec<GapType>> = (0..m).map(|i| vec![GapType::chain(&[i]).expect("singleton")]).collect();
    ideals.extend(rest.iter().cloned());
    let g = StandardGap::new(m, ideals);
    let report = validate_gap(&g);
    if !report.valid {
        return Err(GapError::Invalid(format!("{:?}", report.problems)));
    }
    Ok(g)
}

/// Types of `m^{<ω}` other than the `[i]`, in canonical order.
pub fn non_basis_types(m: usize) -> Result<Vec<GapType>, GapError> {
    Ok(enumerate_types(m)?.into_iter().filter(|t| t.entries().len() > 1).collect())
}

/// Free `(m+1)`-gaps whose last ideal is a nonempty set of non-basis types,
/// ordered by the bitmask of the set over the canonical order.
pub fn free_family(m: usize) -> Result<Vec<StandardGap>, GapError> {
    let rest = non_basis_types(m)?;
    if rest.len() > 20 {
        return Err(GapError::TooLarge(rest.len()));
    }
    (1u64..1 << rest.len())
        .map(|mask| {
            let chosen = rest.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, t)| t.clone()).collect();
            build_free_gap(m, &[chosen])
        })
        .collect()
}

/// Ways to extend a gap to a dense one.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum DenseProcedure {
    /// Adds the orthogonal types as a new ideal.
    Ortho,
    /// Adds `𝓜_m` over one more letter.
    M,
}

impl FromStr for DenseProcedure {
    type Err = GapError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_uppercase().as_str() {
            "ORTHO" => Ok(DenseProcedure::Ortho),
            "M" => Ok(DenseProcedure::M),
            _ => Err(GapError::Parameters(format!("unknown procedure `{s}`"))),
        }
    }
}

pub fn build_dense_extension(g: &StandardGap, procedure: DenseProcedure) -> Result<StandardGap, GapError> {
    let orth = g.orthogonal();
    match procedure {
        DenseProcedure::Ortho => {
            if orth.is_empty() {
                return Err(GapError::AlreadyDense);
            }
            let mut ideals = g.ideals.clone();
            ideals.push(orth);
            Ok(StandardGap::new(g.ambient, ideals))
        }
        DenseProcedure::M => {
            if !orth.is_empty() {
                return Err(GapError::NotDense);
            }
            Ok(extend_mno(g, Mno::M))
        }
    }
}

/// One singleton ideal per type of `k^{<ω}`, the `[i]` first.
pub fn build_jk_gap(k: usize) -> Result<StandardGap, GapError> {
    Ok(StandardGap::new(k, enumerate_types(k)?.into_iter().map(|t| vec![t]).collect()))
}

/// `2^{J(n−1)−n−1} < N(n) < n^{J(n)−n}` as exact values.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct NBounds {
    pub n: usize,
    /// Exponent `J(n−1) − n − 1` of the lower bound.
    pub lower_exponent: i64,
    /// `2^{lower_exponent}` when the exponent is nonnegative.
    pub lower: Option<String>,
    /// Exponent `J(n) − n` of the upper bound `n^{J(n)−n}`.
    pub upper_exponent: String,
    pub upper: String,
}

/// Bounds on the number of minimal `n`-gaps, for `n ≥ 2`.
pub fn n_bounds(n: usize) -> Result<NBounds, GapError> {
    if n < 2 {
        return Err(GapError::Parameters("bounds need n ≥ 2".into()));
    }
    let jprev = count_formula(n - 1);
    let jn = count_formula(n);
    let lower_exponent = i64::try_from(&jprev).map_err(|_| GapError::Parameters("exponent too large".into()))?
        - n as i64
        - 1;
    let lower = (lower_exponent >= 0).then(|| (BigUint::one() << lower_exponent as usize).to_string());
    let up_exp = jn - BigUint::from(n);
    let exp = u32::try_from(&up_exp).map_err(|_| GapError::Parameters("exponent too large".into()))?;
    Ok(NBounds {
        n,
        lower_exponent,
        lower,
        upper_exponent: up_exp.to_string(),
        upper: BigUint::from(n).pow(exp).to_string(),
    })
}

impl NBounds {
    /// True iff the bounds hold strictly for `count`.
    pub fn brackets(&self, count: &BigUint) -> bool {
        let above = if self.lower_exponent >= 0 {
            *count > BigUint::one() << self.lower_exponent as usize
        } else {
            !count.is_zero()
        };
        let upper: BigUint = self.upper.parse().expect("decimal");
        above && *count < upper
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::embed::plain_morphism;
    use crate::embed::full_action;

    fn t(s: &str) -> GapType {
        s.parse().unwrap()
    }

    fn gamma(i: usize) -> StandardGap {
        let rows: [&[&[&str]]; 5] = [
            &[&["[0]"], &["[1]", "[01]", "[^1 _0]", "[^1 _0 _1]", "[_0 ^1 _1]", "[^0 _1]", "[^0 ^1 _1]"]],
            &[&["[0]"], &["[1]"]],
            &[&["[0]"], &["[1]", "[01]"]],
            &[&["[0]", "[01]"], &["[1]"]],
            &[&["[0]"], &["[1]", "[01]", "[^1 _0 _1]"]],
        ];
        StandardGap::parse(2, rows[i - 1]).unwrap()
    }

    #[test]
    fn validation() {
        let r = validate_gap(&gamma(5));
        assert!(r.valid && r.standard);
        let bad = StandardGap::parse(2, &[&["[0]", "[1]"], &["[1]"]]).unwrap();
        let r = validate_gap(&bad);
        assert!(!r.valid && r.star_valid);
        let empty = StandardGap::parse(2, &[&["[0]"], &[]]).unwrap();
        assert!(!validate_gap(&empty).valid);
        let outside = StandardGap::parse(2, &[&["[0]"], &["[2]"]]).unwrap();
        assert!(!validate_gap(&outside).valid);
        let swapped = StandardGap::parse(2, &[&["[1]"], &["[0]"]]).unwrap();
        assert_eq!(validate_gap(&swapped).basis_permutation, Some(vec![1, 0]));
    }

    #[test]
    fn profiles() {
        assert!(gap_profile(&gamma(4)).strong);
        for i in [1, 2, 3, 5] {
            assert!(!gap_profile(&gamma(i)).strong, "{i}");
        }
        assert!(gap_profile(&gamma(1)).dense);
        for i in 2..=5 {
            assert!(!gap_profile(&gamma(i)).dense, "{i}");
        }
    }

    #[test]
    fn permutations_compose() {
        let g = build_m_gap(3).unwrap();
        let e = [1, 2, 0];
        let twice = permute_gap(&permute_gap(&g, &e).unwrap(), &e).unwrap();
        let composed: Vec<usize> = (0..3).map(|i| e[e[i]]).collect();
        assert_eq!(twice, permute_gap(&g, &composed).unwrap());
        assert_eq!(permute_gap(&g, &[0, 1, 2]).unwrap(), g);
        assert!(permute_gap(&g, &[0, 0, 1]).is_err());
        assert_eq!(permutations(3).len(), 6);
    }

    #[test]
    fn order_witnesses() {
        for i in 1..=5 {
            assert!(witnesses_leq(&TypeMap::identity(2), &gamma(i), &gamma(i)));
        }
        assert!(witnesses_leq(&builtin_101_map(), &gamma(5), &gamma(5)));
        let psi = full_action(&plain_morphism(2, &[vec![0, 1], vec![1, 1]]).unwrap()).unwrap();
        assert!(!witnesses_leq(&psi, &gamma(2), &gamma(2)));
    }

    #[test]
    fn filters() {
        assert!(admissible_violations(&builtin_101_map()).is_empty());
        assert!(admissible_violations(&TypeMap::identity(3)).is_empty());
        let swap = TypeMap::from_fn(2, 2, |s| if *s == t("[0]") { t("[1]") } else if *s == t("[1]") { t("[0]") } else { s.clone() }).unwrap();
        assert!(admissible_violations(&swap).rules().contains(&Rule::Max));
        let bad = TypeMap::from_fn(2, 2, |s| if *s == t("[^1 _0 _1]") { t("[01]") } else { s.clone() }).unwrap();
        let rules = admissible_violations(&bad).rules();
        assert!(rules.contains(&Rule::Collapse) || rules.contains(&Rule::ChainComp), "{rules:?}");
    }

    #[test]
    fn searches() {
        let b = Budget::default();
        let found = search_leq(&gamma(5), &gamma(5), &b).unwrap();
        assert!(witnesses_leq(&found.map, &gamma(5), &gamma(5)));
        assert!(search_leq(&gamma(2), &gamma(3), &b).is_none());
        let target = StandardGap::parse(2, &[&["[0]"], &["[1]", "[^1 _0]"]]).unwrap();
        assert!(search_leq(&gamma(1), &target, &b).is_some());
    }

    #[test]
    fn sigma_gaps() {
        let g = build_sigma(&[0, 1, 2], &[], &BTreeMap::new()).unwrap();
        assert_eq!(g.to_string(), "[_0],[_0 _1],[_0 _2],[_0 _1 _2] | [_1],[_1 _2] | [_2]");
        assert!(gap_profile(&g).strong);
        let all: BTreeMap<_, _> = [((0, 1), 2), ((1, 0), 2)].into_iter().collect();
        let g = build_sigma(&[0, 1], &[2], &all).unwrap();
        assert_eq!(g.ideals[2].len(), 5);
        let one: BTreeMap<_, _> = [((1, 0), 2)].into_iter().collect();
        let g = build_sigma(&[0, 1], &[2], &one).unwrap();
        assert_eq!(g.ideals[2], vec![t("[^0 _1]"), t("[^0 ^1 _1]")]);
        assert!(build_sigma(&[0, 1], &[2], &BTreeMap::new()).is_err());
    }

    #[test]
    fn constructors() {
        assert_eq!(build_m_gap(2).unwrap(), gamma(1));
        assert_eq!(build_m_gap(1).unwrap().ideals, vec![vec![t("[0]")]]);
        for n in 1..=4 {
            assert!(gap_profile(&build_m_gap(n).unwrap()).dense);
        }
        for kind in [Mno::N, Mno::O] {
            assert!(!gap_profile(&extend_mno(&gamma(1), kind)).dense);
        }
        assert_eq!(free_family(2).unwrap().len(), 63);
        assert!(build_free_gap(2, &[vec![t("[0]")]]).is_err());
        let d = build_dense_extension(&gamma(2), DenseProcedure::Ortho).unwrap();
        assert_eq!(d.ideals[2].len(), 6);
        assert!(free_family(2).unwrap().contains(&d));
        assert_eq!(build_dense_extension(&gamma(1), DenseProcedure::Ortho), Err(GapError::AlreadyDense));
        assert_eq!(build_dense_extension(&gamma(1), DenseProcedure::M).unwrap(), extend_mno(&gamma(1), Mno::M));
        let jk = build_jk_gap(2).unwrap();
        assert_eq!(jk.arity(), 8);
        assert_eq!(jk.ideals[0], vec![t("[0]")]);
        assert_eq!(jk.ideals[1], vec![t("[1]")]);
        assert_eq!(build_jk_gap(1).unwrap().arity(), 1);
    }

    #[test]
    fn bounds() {
        let b = n_bounds(3).unwrap();
        assert_eq!(b.lower.as_deref(), Some("16"));
        assert_eq!(b.upper, BigUint::from(3u32).pow(58).to_string());
        assert!(b.brackets(&BigUint::from(163u32)));
        assert!(n_bounds(2).unwrap().brackets(&BigUint::from(5u32)));
        for n in 2..=7 {
            let b = n_bounds(n).unwrap();
            let just_above = (BigUint::one() << b.lower_exponent.max(0) as usize) + BigUint::one();
            assert!(b.brackets(&just_above));
        }
    }
}
