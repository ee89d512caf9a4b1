//! Types `τ = (τ⁰, τ¹, ◁)`: notation, enumeration and counting, profiles,
//! chain composition, the comb operators and the domination relations.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

/// Errors raised while building or transforming types.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TypeError {
    #[error("syntax error in type `{0}`")]
    Syntax(String),
    #[error("a type needs at least one entry")]
    Empty,
    #[error("the last entry must be in the lower row")]
    LastNotLower,
    #[error("lower row values must strictly increase")]
    LowerNotIncreasing,
    #[error("upper row values must strictly increase")]
    UpperNotIncreasing,
    #[error("the minima of the two rows must differ")]
    EqualMinima,
    #[error("expected a chain type, got {0}")]
    NotChain(String),
    #[error("expected a comb type that is not a top-comb, got {0}")]
    NotSubcomb(String),
    #[error("value {value} does not fit alphabet {n}")]
    ValueOutOfRange { value: usize, n: usize },
    #[error("alphabet size must be positive")]
    ZeroAlphabet,
    #[error("matrix is not the encoding of a comb type")]
    BadMatrix,
}

/// Row of an entry.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Row {
    Lower,
    Upper,
}

/// One entry `(value, row)` of a type, in ◁ order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Entry {
    pub value: usize,
    pub row: Row,
}

impl Entry {
    pub fn lower(value: usize) -> Self {
        Entry { value, row: Row::Lower }
    }
    pub fn upper(value: usize) -> Self {
        Entry { value, row: Row::Upper }
    }
}

/// A type, stored as its entries in ◁ order.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct GapType {
    entries: Vec<Entry>,
}

/// Chain or comb.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Class {
    Chain,
    Comb,
}

/// Invariants of a type.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TypeProfile {
    pub max: usize,
    pub strength: BTreeSet<usize>,
    pub class: Class,
    pub top_comb: bool,
    pub top2_comb: bool,
    pub chain_min: Option<usize>,
}

/// The five operators attached to a comb that is not a top-comb.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Frak {
    K,
    P,
    S,
    Z,
    W,
}

impl FromStr for Frak {
    type Err = TypeError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_uppercase().as_str() {
            "K" => Ok(Frak::K),
            "P" => Ok(Frak::P),
            "S" => Ok(Frak::S),
            "Z" => Ok(Frak::Z),
            "W" => Ok(Frak::W),
            _ => Err(TypeError::Syntax(s.to_string())),
        }
    }
}

/// Families of types with a fixed maximum.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Mno {
    M,
    N,
    O,
}

impl FromStr for Mno {
    type Err = TypeError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_uppercase().as_str() {
            "M" => Ok(Mno::M),
            "N" => Ok(Mno::N),
            "O" => Ok(Mno::O),
            _ => Err(TypeError::Syntax(s.to_string())),
        }
    }
}

/// Counting method for [`count_types`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CountMethod {
    Formula,
    Enum,
    Matrix,
}

impl FromStr for CountMethod {
    type Err = TypeError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "formula" => Ok(CountMethod::Formula),
            "enum" => Ok(CountMethod::Enum),
            "matrix" => Ok(CountMethod::Matrix),
            _ => Err(TypeError::Syntax(s.to_string())),
        }
    }
}

impl GapType {
    /// Builds a type from entries in ◁ order, checking every invariant.
    pub fn new(entries: Vec<Entry>) -> Result<Self, TypeError> {
        let last = entries.last().ok_or(TypeError::Empty)?;
        if last.row != Row::Lower {
            return Err(TypeError::LastNotLower);
        }
        let row_values = |r: Row| entries.iter().filter(move |e| e.row == r).map(|e| e.value);
        let lowers: Vec<usize> = row_values(Row::Lower).collect();
        let uppers: Vec<usize> = row_values(Row::Upper).collect();
        if lowers.windows(2).any(|w| w[0] >= w[1]) {
            return Err(TypeError::LowerNotIncreasing);
        }
        if uppers.windows(2).any(|w| w[0] >= w[1]) {
            return Err(TypeError::UpperNotIncreasing);
        }
        if uppers.first().is_some_and(|u| *u == lowers[0]) {
            return Err(TypeError::EqualMinima);
        }
        Ok(GapType { entries })
    }

    /// The chain type with the given increasing values.
    pub fn chain(values: &[usize]) -> Result<Self, TypeError> {
        GapType::new(values.iter().map(|&v| Entry::lower(v)).collect())
    }

    pub fn entries(&self) -> &[Entry] {
        &self.entries
    }

    /// Lower row `τ⁰`, increasing.
    pub fn lower(&self) -> Vec<usize> {
        self.row(Row::Lower)
    }

    /// Upper row `τ¹`, increasing.
    pub fn upper(&self) -> Vec<usize> {
        self.row(Row::Upper)
    }

    fn row(&self, r: Row) -> Vec<usize> {
        self.entries.iter().filter(|e| e.row == r).map(|e| e.value).collect()
    }

    pub fn is_chain(&self) -> bool {
        self.entries.iter().all(|e| e.row == Row::Lower)
    }

    pub fn is_comb(&self) -> bool {
        !self.is_chain()
    }

    /// Largest value in either row.
    pub fn max(&self) -> usize {
        self.entries.iter().map(|e| e.value).max().expect("nonempty")
    }

    pub fn max_lower(&self) -> usize {
        self.entries.last().expect("nonempty").value
    }

    pub fn max_upper(&self) -> Option<usize> {
        self.upper().last().copied()
    }

    /// Penultimate entry is in the upper row.
    pub fn is_top_comb(&self) -> bool {
        let n = self.entries.len();
        n >= 2 && self.entries[n - 2].row == Row::Upper
    }

    /// The two entries before the last are both in the upper row.
    pub fn is_top2_comb(&self) -> bool {
        let n = self.entries.len();
        n >= 3 && self.entries[n - 2].row == Row::Upper && self.entries[n - 3].row == Row::Upper
    }

    /// `{max τ⁰} ∪ {k ∈ τ¹ : k > max τ⁰}`.
    pub fn strength(&self) -> BTreeSet<usize> {
        let m = self.max_lower();
        std::iter::once(m).chain(self.upper().into_iter().filter(|&k| k > m)).collect()
    }

    pub fn profile(&self) -> TypeProfile {
        let chain = self.is_chain();
        TypeProfile {
            max: self.max(),
            strength: self.strength(),
            class: if chain { Class::Chain } else { Class::Comb },
            top_comb: self.is_top_comb(),
            top2_comb: self.is_top2_comb(),
            chain_min: if chain { Some(self.entries[0].value) } else { None },
        }
    }

    /// Applies a strictly increasing relabelling `k ↦ f[k]` to every value.
    pub fn relabel(&self, f: &[usize]) -> Result<Self, TypeError> {
        let entries = self
            .entries
            .iter()
            .map(|e| {
                f.get(e.value)
                    .map(|&v| Entry { value: v, row: e.row })
                    .ok_or(TypeError::ValueOutOfRange { value: e.value, n: f.len() })
            })
            .collect::<Result<Vec<_>, _>>()?;
        GapType::new(entries)
    }

    /// Checks that every value is below `n`.
    pub fn check_alphabet(&self, n: usize) -> Result<(), TypeError> {
        match self.entries.iter().find(|e| e.value >= n) {
            Some(e) => Err(TypeError::ValueOutOfRange { value: e.value, n }),
            None => Ok(()),
        }
    }
}

fn render_value(v: usize) -> String {
    if v < 10 {
        v.to_string()
    } else {
        format!("({v})")
    }
}

impl fmt::Display for GapType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .entries
            .iter()
            .map(|e| {
                let sign = if e.row == Row::Lower { '_' } else { '^' };
                format!("{sign}{}", render_value(e.value))
            })
            .collect();
        write!(f, "[{}]", parts.join(" "))
    }
}

impl FromStr for GapType {
    type Err = TypeError;

    /// Accepts `[_1 ^6 _3]`, `[^1 _0 _1]`, `[01]`, `[^{789} _0]` and `_(12)`.
    /// A run of digits denotes one value per digit.
    fn from_str(text: &str) -> Result<Self, Self::Err> {
        let syntax = || TypeError::Syntax(text.to_string());
        let inner = text
            .trim()
            .strip_prefix('[')
            .and_then(|s| s.strip_suffix(']'))
            .ok_or_else(syntax)?;
        let chars: Vec<char> = inner.chars().collect();
        let mut entries = Vec::new();
        let mut i = 0;
        while i < chars.len() {
            let c = chars[i];
            if c.is_whitespace() || c == ',' {
                i += 1;
                continue;
            }
            let row = match c {
                '^' => {
                    i += 1;
                    Row::Upper
                }
                '_' => {
                    i += 1;
                    Row::Lower
                }
                _ => Row::Lower,
            };
            let close = match chars.get(i) {
                Some('{') => Some('}'),
                Some('(') => Some(')'),
                Some(d) if d.is_ascii_digit() => None,
                _ => return Err(syntax()),
            };
            match close {
                Some(close) => {
                    let end = chars[i..].iter().position(|&x| x == close).ok_or_else(syntax)? + i;
                    let body: String = chars[i + 1..end].iter().collect();
                    if close == ')' {
                        let v = body.trim().parse::<usize>().map_err(|_| syntax())?;
                        entries.push(Entry { value: v, row });
                    } else {
                        let digits: Vec<char> = body.chars().filter(|c| !c.is_whitespace()).collect();
                        if digits.is_empty() || !digits.iter().all(|c| c.is_ascii_digit()) {
                            return Err(syntax());
                        }
                        entries.extend(digits.iter().map(|d| Entry { value: d.to_digit(10).unwrap() as usize, row }));
                    }
                    i = end + 1;
                }
                None => {
                    while i < chars.len() && chars[i].is_ascii_digit() {
                        entries.push(Entry { value: chars[i].to_digit(10).unwrap() as usize, row });
                        i += 1;
                    }
                }
            }
        }
        GapType::new(entries)
    }
}

/// Parses a type string.
pub fn parse_type(text: &str) -> Result<GapType, TypeError> {
    text.parse()
}

/// Canonical rendering.
pub fn render_type(t: &GapType) -> String {
    t.to_string()
}

impl Serialize for GapType {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for GapType {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

fn subsets(n: usize) -> impl Iterator<Item = Vec<usize>> {
    (1u64..(1u64 << n)).map(move |mask| (0..n).filter(|i| mask >> i & 1 == 1).collect())
}

fn interleavings(lowers: &[usize], uppers: &[usize], out: &mut Vec<GapType>) {
    let (last, rest) = lowers.split_last().expect("nonempty lower row");
    let mut cur = Vec::with_capacity(lowers.len() + uppers.len());
    fn rec(a: &[usize], b: &[usize], cur: &mut Vec<Entry>, last: usize, out: &mut Vec<GapType>) {
        if a.is_empty() && b.is_empty() {
            let mut e = cur.clone();
            e.push(Entry::lower(last));
            out.push(GapType { entries: e });
            return;
        }
        if let Some((&x, r)) = a.split_first() {
            cur.push(Entry::lower(x));
            rec(r, b, cur, last, out);
            cur.pop();
        }
        if let Some((&x, r)) = b.split_first() {
            cur.push(Entry::upper(x));
            rec(a, r, cur, last, out);
            cur.pop();
        }
    }
    rec(rest, uppers, &mut cur, *last, out);
}

/// Sort key of the canonical type order: (number of entries, rendering).
pub fn canonical_key(t: &GapType) -> (usize, String) {
    (t.entries.len(), t.to_string())
}

/// Sorts types into canonical order and removes duplicates.
pub fn sort_canonical(types: &mut Vec<GapType>) {
    types.sort_by_cached_key(canonical_key);
    types.dedup();
}

/// All types with values below `n`, ordered by (number of entries, rendering).
pub fn enumerate_types(n: usize) -> Result<Vec<GapType>, TypeError> {
    if n == 0 {
        return Err(TypeError::ZeroAlphabet);
    }
    let mut out = Vec::new();
    for lowers in subsets(n) {
        interleavings(&lowers, &[], &mut out);
        for uppers in subsets(n) {
            if uppers[0] != lowers[0] {
                interleavings(&lowers, &uppers, &mut out);
            }
        }
    }
    let mut keyed: Vec<(usize, String, GapType)> =
        out.into_iter().map(|t| (t.entries.len(), t.to_string(), t)).collect();
    keyed.sort_by(|a, b| (a.0, &a.1).cmp(&(b.0, &b.1)));
    Ok(keyed.into_iter().map(|(_, _, t)| t).collect())
}

/// Exact binomial coefficient.
pub fn binomial(n: usize, k: usize) -> BigUint {
    if k > n {
        return BigUint::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigUint::one();
    for i in 0..k {
        acc = acc * BigUint::from(n - i) / BigUint::from(i + 1);
    }
    acc
}

/// Pairs of subsets of `n` with sizes `i`, `j` and distinct minima.
pub fn pairs_with_distinct_minima(i: usize, j: usize, n: usize) -> BigUint {
    let all = binomial(n, i) * binomial(n, j);
    let same: BigUint = (0..=n.saturating_sub(i.max(j)))
        .map(|p| {
            let r = n - p;
            if r == 0 {
                BigUint::zero()
            } else {
                binomial(r - 1, j - 1) * binomial(r - 1, i - 1)
            }
        })
        .sum();
    all - same
}

/// Closed formula for the number of types with values below `n`.
pub fn count_formula(n: usize) -> BigUint {
    let mut total = (BigUint::one() << n) - BigUint::one();
    for i in 1..=n {
        for j in 1..=n {
            total += binomial(i + j - 1, j) * pairs_with_distinct_minima(i, j, n);
        }
    }
    total
}

/// Number of types with values below `n` by the chosen method.
pub fn count_types(n: usize, method: CountMethod) -> Result<BigUint, TypeError> {
    if n == 0 {
        return Err(TypeError::ZeroAlphabet);
    }
    Ok(match method {
        CountMethod::Formula => count_formula(n),
        CountMethod::Enum => BigUint::from(enumerate_types(n)?.len()),
        CountMethod::Matrix => count_matrix(n),
    })
}

/// `J(n)·8·√(2πn) / (3·9ⁿ)`, which tends to 1.
pub fn asymptotic_ratio(n: usize) -> f64 {
    let j = count_formula(n).to_f64().expect("finite");
    let nf = n as f64;
    j * 8.0 * (2.0 * std::f64::consts::PI * nf).sqrt() / (3.0 * 9f64.powi(n as i32))
}

/// Two-row matrix `[lower, upper]` over {−1, 0, 1}.
pub type Matrix = [Vec<i8>; 2];

/// Encodes a type: 0 for absent values, 1 if the ◁-predecessor is in the
/// same row, −1 otherwise.
pub fn type_to_matrix(t: &GapType, n: usize) -> Result<Matrix, TypeError> {
    t.check_alphabet(n)?;
    let mut m: Matrix = [vec![0; n], vec![0; n]];
    for (k, e) in t.entries.iter().enumerate() {
        let same = k > 0 && t.entries[k - 1].row == e.row;
        let r = if e.row == Row::Lower { 0 } else { 1 };
        m[r][e.value] = if same { 1 } else { -1 };
    }
    Ok(m)
}

fn runs_of(row: &[i8]) -> Vec<Vec<usize>> {
    let mut runs: Vec<Vec<usize>> = Vec::new();
    for (v, &x) in row.iter().enumerate() {
        match x {
            -1 => runs.push(vec![v]),
            1 => runs.last_mut().expect("checked").push(v),
            _ => {}
        }
    }
    runs
}

fn first_nonzero(row: &[i8]) -> Option<(usize, i8)> {
    row.iter().enumerate().find(|(_, &x)| x != 0).map(|(i, &x)| (i, x))
}

/// Membership in `M_n^{≠}(0)[−1,−1] ∪ M_n^{≠}(−1)[−1,−1]`.
pub fn is_comb_matrix(m: &Matrix) -> bool {
    let (Some((c0, x0)), Some((c1, x1))) = (first_nonzero(&m[0]), first_nonzero(&m[1])) else {
        return false;
    };
    if x0 != -1 || x1 != -1 || c0 == c1 {
        return false;
    }
    let neg = |r: &[i8]| r.iter().filter(|&&x| x == -1).count() as i64;
    let p = neg(&m[1]) - neg(&m[0]);
    p == 0 || p == -1
}

/// Inverse of [`type_to_matrix`] on comb encodings: runs alternate, starting
/// with the upper row when both rows have equally many runs.
pub fn matrix_to_comb(m: &Matrix) -> Result<GapType, TypeError> {
    if !is_comb_matrix(m) {
        return Err(TypeError::BadMatrix);
    }
    let lower_runs = runs_of(&m[0]);
    let upper_runs = runs_of(&m[1]);
    let mut upper_turn = upper_runs.len() == lower_runs.len();
    let (mut li, mut ui) = (lower_runs.iter(), upper_runs.iter());
    let mut entries = Vec::new();
    loop {
        let next = if upper_turn { ui.next().map(|r| (r, Row::Upper)) } else { li.next().map(|r| (r, Row::Lower)) };
        match next {
            Some((run, row)) => entries.extend(run.iter().map(|&value| Entry { value, row })),
            None => break,
        }
        upper_turn = !upper_turn;
    }
    GapType::new(entries).map_err(|_| TypeError::BadMatrix)
}

/// Counts comb encodings by brute force over all matrices, plus `2ⁿ − 1` chains.
pub fn count_matrix(n: usize) -> BigUint {
    let cells = 2 * n;
    let total = 3usize.pow(cells as u32);
    let mut combs = 0usize;
    let mut m: Matrix = [vec![0; n], vec![0; n]];
    for code in 0..total {
        let mut c = code;
        for k in 0..cells {
            m[k / n][k % n] = (c % 3) as i8 - 1;
            c /= 3;
        }
        if is_comb_matrix(&m) {
            combs += 1;
        }
    }
    BigUint::from(combs) + (BigUint::one() << n) - BigUint::one()
}

/// `τ ∗ σ` on increasing value lists.
pub fn compose_values(a: &[usize], b: &[usize]) -> Vec<usize> {
    let top = *a.last().expect("nonempty");
    a.iter().copied().chain(b.iter().copied().filter(|&x| x > top)).collect()
}

/// Chain composition: `τ` followed by the values of `σ` above `max τ`.
pub fn compose_chains(t: &GapType, s: &GapType) -> Result<GapType, TypeError> {
    for x in [t, s] {
        if !x.is_chain() {
            return Err(TypeError::NotChain(x.to_string()));
        }
    }
    GapType::chain(&compose_values(&t.lower(), &s.lower()))
}

fn require_subcomb(t: &GapType) -> Result<(), TypeError> {
    if t.is_chain() || t.is_top_comb() {
        Err(TypeError::NotSubcomb(t.to_string()))
    } else {
        Ok(())
    }
}

/// Lower values strictly above the least lower value that comes after
/// every upper entry.
pub fn tilde_lower(t: &GapType) -> Result<Vec<usize>, TypeError> {
    require_subcomb(t)?;
    let last_upper = t.entries.iter().rposition(|e| e.row == Row::Upper).expect("comb");
    let pivot = t.entries[last_upper + 1].value;
    Ok(t.lower().into_iter().filter(|&k| k > pivot).collect())
}

/// Applies one of the five comb operators.
pub fn frak(kind: Frak, t: &GapType) -> Result<GapType, TypeError> {
    let tilde = tilde_lower(t)?;
    let (&top, rest) = tilde.split_last().expect("nonempty under the precondition");
    let ups = compose_values(&tilde, &t.upper());
    let uppers = |v: &[usize]| v.iter().map(|&x| Entry::upper(x)).collect::<Vec<_>>();
    let lowers = |v: &[usize]| v.iter().map(|&x| Entry::lower(x)).collect::<Vec<_>>();
    let entries = match kind {
        Frak::K => {
            let mut e = t.entries.clone();
            let last_upper = e.iter().rposition(|x| x.row == Row::Upper).expect("comb");
            let moved = e.remove(last_upper);
            let at = e.len() - 1;
            e.insert(at, moved);
            e
        }
        Frak::P => [uppers(&ups), lowers(&[0])].concat(),
        Frak::S => [uppers(&ups), lowers(&[0]), lowers(&tilde)].concat(),
        Frak::Z => {
            let late: Vec<usize> = ups.iter().copied().filter(|x| !rest.contains(x)).collect();
            [uppers(rest), lowers(&[0]), lowers(rest), uppers(&late), lowers(&[top])].concat()
        }
        Frak::W => [lowers(rest), uppers(&[0]), uppers(&ups), lowers(&[top])].concat(),
    };
    GapType::new(entries)
}

/// `τ` is a top-comb and `max τ¹ ≥ max σ`.
pub fn dominates(t: &GapType, s: &GapType) -> bool {
    t.is_top_comb() && t.max_upper().is_some_and(|m| m >= s.max())
}

/// `τ` is a comb, not a top-comb, and `max τ¹ ≥ max σ`.
pub fn subdominates(t: &GapType, s: &GapType) -> bool {
    t.is_comb() && !t.is_top_comb() && t.max_upper().is_some_and(|m| m >= s.max())
}

/// Types with maximum `m` (kind M), minus top-combs (N), further restricted
/// to chains or combs whose upper row stays below `m` (O).
pub fn type_set_mno(kind: Mno, m: usize) -> Vec<GapType> {
    enumerate_types(m + 1)
        .expect("positive alphabet")
        .into_iter()
        .filter(|s| s.max() == m)
        .filter(|s| kind == Mno::M || !s.is_top_comb())
        .filter(|s| kind != Mno::O || s.is_chain() || s.max_upper().is_some_and(|u| u < m))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn t(s: &str) -> GapType {
        s.parse().unwrap()
    }

    #[test]
    fn parse_and_render() {
        let x = t("[_1 ^6 _3 _6 ^9 _7]");
        assert_eq!(x.lower(), vec![1, 3, 6, 7]);
        assert_eq!(x.upper(), vec![6, 9]);
        assert_eq!(x.to_string(), "[_1 ^6 _3 _6 ^9 _7]");
        assert_eq!(t("[0]").to_string(), "[_0]");
        assert_eq!(t("[^1 _0 _1]"), t("[^1 _01]"));
        assert_eq!(t("[^{789} _0 _7 _8]").to_string(), "[^7 ^8 ^9 _0 _7 _8]");
        assert_eq!(t("[_3, _(12)]").to_string(), "[_3 _(12)]");
        assert_eq!(t("[_3 _(12)]").lower(), vec![3, 12]);
        assert_eq!("[^0 _0]".parse::<GapType>(), Err(TypeError::EqualMinima));
        assert_eq!("[_0 ^1]".parse::<GapType>(), Err(TypeError::LastNotLower));
        assert_eq!("[_1 _0]".parse::<GapType>(), Err(TypeError::LowerNotIncreasing));
        assert!("[]".parse::<GapType>().is_err());
        assert!("[a]".parse::<GapType>().is_err());
    }

    #[test]
    fn enumeration_sizes() {
        assert_eq!(enumerate_types(1).unwrap(), vec![t("[0]")]);
        assert_eq!(enumerate_types(2).unwrap().len(), 8);
        assert_eq!(enumerate_types(3).unwrap().len(), 61);
        assert!(enumerate_types(0).is_err());
    }

    #[test]
    fn counts() {
        assert_eq!(count_formula(4), BigUint::from(480u32));
        assert_eq!(count_formula(6), BigUint::from(31976u32));
        assert_eq!(count_formula(7), BigUint::from(266981u32));
        assert_eq!(count_matrix(3), BigUint::from(61u32));
    }

    #[test]
    fn profiles() {
        let p = t("[^1 _0]").profile();
        assert_eq!((p.max, p.class, p.top_comb), (1, Class::Comb, true));
        assert_eq!(p.strength, BTreeSet::from([0, 1]));
        let p = t("[0]").profile();
        assert_eq!((p.max, p.class, p.chain_min), (0, Class::Chain, Some(0)));
        let p = t("[^1 _0 _1]").profile();
        assert_eq!((p.strength, p.top_comb), (BTreeSet::from([1]), false));
        assert!(t("[^0 ^1 _1]").is_top2_comb());
    }

    #[test]
    fn composition() {
        assert_eq!(compose_chains(&t("[0]"), &t("[1]")).unwrap(), t("[01]"));
        assert_eq!(compose_chains(&t("[1]"), &t("[0]")).unwrap(), t("[1]"));
        assert_eq!(compose_chains(&t("[78]"), &t("[49]")).unwrap(), t("[789]"));
        assert!(compose_chains(&t("[^1 _0]"), &t("[1]")).is_err());
    }

    #[test]
    fn operators() {
        let tau = t("[_1 ^4 _2 _3 ^9 _6 _7 _8]");
        assert_eq!(tilde_lower(&tau).unwrap(), vec![7, 8]);
        assert_eq!(tilde_lower(&t("[^1 _0 _1]")).unwrap(), vec![1]);
        assert_eq!(tilde_lower(&t("[^2 ^3 _1 _6 _7]")).unwrap(), vec![6, 7]);
        assert_eq!(frak(Frak::K, &t("[^2 ^3 _1 _6 _7]")).unwrap(), t("[^2 _1 _6 ^3 _7]"));
        assert_eq!(frak(Frak::P, &tau).unwrap(), t("[^7 ^8 ^9 _0]"));
        assert_eq!(frak(Frak::S, &tau).unwrap(), t("[^7 ^8 ^9 _0 _7 _8]"));
        assert_eq!(frak(Frak::Z, &tau).unwrap(), t("[^7 _0 _7 ^8 ^9 _8]"));
        assert_eq!(frak(Frak::W, &tau).unwrap(), t("[_7 ^0 ^7 ^8 ^9 _8]"));
        let s = frak(Frak::S, &tau).unwrap();
        assert_eq!(frak(Frak::S, &s).unwrap(), s);
        assert!(frak(Frak::K, &t("[01]")).is_err());
        assert!(frak(Frak::K, &t("[^1 _0]")).is_err());
    }

    #[test]
    fn domination() {
        assert!(dominates(&t("[^0 _1]"), &t("[0]")));
        for s in enumerate_types(2).unwrap() {
            assert!(subdominates(&t("[^1 _0 _1]"), &s));
            assert!(!dominates(&t("[01]"), &s));
        }
    }

    #[test]
    fn mno_sets() {
        assert!(type_set_mno(Mno::O, 2).contains(&t("[2]")));
        assert!(type_set_mno(Mno::O, 2).contains(&t("[^1 _0 _2]")));
        assert!(type_set_mno(Mno::M, 2).contains(&t("[^0 _2]")));
        assert!(!type_set_mno(Mno::N, 2).contains(&t("[^0 _2]")));
    }

    #[test]
    fn matrices() {
        assert_eq!(type_to_matrix(&t("[0]"), 2).unwrap(), [vec![-1, 0], vec![0, 0]]);
        assert_eq!(type_to_matrix(&t("[^1 _0]"), 2).unwrap(), [vec![-1, 0], vec![0, -1]]);
        assert!(type_to_matrix(&t("[2]"), 2).is_err());
        let combs: Vec<GapType> = enumerate_types(2).unwrap().into_iter().filter(|x| x.is_comb()).collect();
        assert_eq!(combs.len(), 5);
        for c in combs {
            let m = type_to_matrix(&c, 2).unwrap();
            assert_eq!(matrix_to_comb(&m).unwrap(), c);
        }
    }
}
