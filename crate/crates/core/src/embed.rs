//! Tree transducers (register machines over paths), the type maps they
//! induce, and the standard embedding constructions.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_bigint::BigUint;
use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::tree::Node;
use crate::types::{
    dominates, enumerate_types, frak, subdominates, tilde_lower, Frak, GapType, TypeError,
};
use crate::witness::{canonical_rung, infer_type_words, stretched_rung, WitnessError};
use crate::word::{Rope, Word};

/// Default number of set elements used to infer a type action.
pub const DEFAULT_COUNT: usize = 8;
/// Default growth of input rungs and of fresh pads.
pub const DEFAULT_GROWTH: usize = 4;
/// First block end of the input rungs used to infer type actions.
pub const DEFAULT_STRETCH: usize = 1;
/// Rungs that must agree when inferring an image type.
pub const DEFAULT_WINDOW: usize = 3;

/// Errors raised by schemes and type maps.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EmbedError {
    #[error("malformed scheme: {0}")]
    Scheme(String),
    #[error("input letter {letter} outside source alphabet {from}")]
    Letter { letter: usize, from: usize },
    #[error("type {0} does not belong to the source alphabet")]
    Domain(String),
    #[error("image of {ty} is unstable: {cause}")]
    Unstable { ty: String, cause: WitnessError },
    #[error("unstable types: {0:?}")]
    UnstableTypes(Vec<String>),
    #[error("alphabet mismatch: {0} vs {1}")]
    Alphabet(usize, usize),
    #[error("maxima must be nondecreasing: {0}")]
    NotMonotone(String),
    #[error("domination chain broken at index {0}")]
    DominationBroken(usize),
    #[error("{tau} does not subdominate {sigma}")]
    NotSubdominating { tau: String, sigma: String },
    #[error("strengths differ: {0} vs {1}")]
    StrengthMismatch(String, String),
    #[error(transparent)]
    Type(#[from] TypeError),
}

/// One item of a register expression.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Item {
    /// The value of a register before the current letter.
    Reg(String),
    /// The value a register received earlier while reading the current letter.
    Cur(String),
    /// A literal word written as digits.
    Lit(String),
    /// A run of the letter whose length exceeds growth times the total length so far.
    Pad(usize),
    /// A run of the letter as long as the word the inner items evaluate to.
    Fill(usize, Vec<Item>),
}

impl Item {
    pub fn reg(name: &str) -> Self {
        Item::Reg(name.to_string())
    }

    pub fn cur(name: &str) -> Self {
        Item::Cur(name.to_string())
    }

    pub fn lit(word: &[usize]) -> Self {
        Item::Lit(word.iter().map(|d| d.to_string()).collect())
    }
}

/// One register assignment; the assignments of a letter run in order.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Assign {
    pub set: String,
    pub to: Vec<Item>,
}

impl Assign {
    pub fn new(set: &str, to: Vec<Item>) -> Self {
        Assign { set: set.to_string(), to }
    }
}

/// A register machine mapping words over `from` letters to words over `to` letters.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Scheme {
    pub from: usize,
    pub to: usize,
    pub registers: Vec<String>,
    #[serde(default)]
    pub init: BTreeMap<String, Vec<Item>>,
    pub rules: BTreeMap<String, Vec<Assign>>,
    pub output: Vec<Item>,
}

#[derive(Clone, Debug)]
enum CItem {
    Reg(usize),
    Cur(usize),
    Lit(Rope),
    Pad(usize),
    Fill(usize, Vec<CItem>),
}

impl CItem {
    fn any(&self, pred: &dyn Fn(&CItem) -> bool) -> bool {
        pred(self) || matches!(self, CItem::Fill(_, inner) if inner.iter().any(|i| i.any(pred)))
    }
}

type Assignments = Vec<(usize, Vec<CItem>)>;

/// A validated scheme with registers resolved to indices.
#[derive(Clone, Debug)]
pub struct Compiled {
    from: usize,
    to: usize,
    init: Assignments,
    rules: Vec<Assignments>,
    output: Vec<CItem>,
    registers: usize,
}

fn compile_items(
    list: &[Item],
    to: usize,
    reg: &dyn Fn(&str) -> Result<usize, EmbedError>,
) -> Result<Vec<CItem>, EmbedError> {
    let err = |m: String| EmbedError::Scheme(m);
    list.iter()
        .map(|it| match it {
            Item::Reg(r) => reg(r).map(CItem::Reg),
            Item::Cur(r) => reg(r).map(CItem::Cur),
            Item::Lit(s) => {
                let letters: Vec<usize> = s
                    .chars()
                    .map(|c| c.to_digit(10).map(|d| d as usize))
                    .collect::<Option<_>>()
                    .ok_or_else(|| err(format!("bad literal `{s}`")))?;
                if letters.iter().any(|&l| l >= to) {
                    return Err(err(format!("literal `{s}` outside target alphabet")));
                }
                Ok(CItem::Lit(Rope::leaf(Word::from_letters(&letters))))
            }
            Item::Pad(l) | Item::Fill(l, _) if *l >= to => Err(err(format!("letter {l} outside target alphabet"))),
            Item::Pad(l) => Ok(CItem::Pad(*l)),
            Item::Fill(l, inner) => {
                let inner = compile_items(inner, to, reg)?;
                if inner.iter().any(|i| i.any(&|x| matches!(x, CItem::Pad(_)))) {
                    return Err(err("fill lengths cannot contain pads".into()));
                }
                Ok(CItem::Fill(*l, inner))
            }
        })
        .collect()
}

impl Scheme {
    /// Checks register references and letters and resolves names.
    pub fn compile(&self) -> Result<Compiled, EmbedError> {
        let err = |m: String| EmbedError::Scheme(m);
        let index: BTreeMap<&str, usize> =
            self.registers.iter().enumerate().map(|(i, r)| (r.as_str(), i)).collect();
        if index.len() != self.registers.len() {
            return Err(err("duplicate register names".into()));
        }
        let reg = |name: &str| index.get(name).copied().ok_or_else(|| err(format!("unknown register `{name}`")));
        let items = |list: &[Item]| compile_items(list, self.to, &reg);
        let init: Assignments =
            self.init.iter().map(|(r, list)| Ok((reg(r)?, items(list)?))).collect::<Result<_, EmbedError>>()?;
        if init.iter().any(|(_, l)| l.iter().any(|i| i.any(&|x| matches!(x, CItem::Reg(_) | CItem::Cur(_))))) {
            return Err(err("init expressions cannot reference registers".into()));
        }
        let assignments = |list: &[Assign]| -> Result<Assignments, EmbedError> {
            let mut done = BTreeSet::new();
            let mut out = Vec::with_capacity(list.len());
            for a in list {
                let compiled = items(&a.to)?;
                if let Some(i) = (0..self.registers.len())
                    .find(|i| !done.contains(i) && compiled.iter().any(|c| c.any(&|x| matches!(x, CItem::Cur(j) if j == i))))
                {
                    return Err(err(format!("`{}` read before it is set", self.registers[i])));
                }
                let target = reg(&a.set)?;
                if !done.insert(target) {
                    return Err(err(format!("`{}` set twice for one letter", a.set)));
                }
                out.push((target, compiled));
            }
            Ok(out)
        };
        let mut rules = vec![Vec::new(); self.from];
        for (letter, m) in &self.rules {
            let l: usize = letter.parse().map_err(|_| err(format!("bad letter key `{letter}`")))?;
            if l >= self.from {
                return Err(err(format!("rule letter {l} outside source alphabet")));
            }
            rules[l] = assignments(m)?;
        }
        let output = items(&self.output)?;
        if output.iter().any(|i| i.any(&|x| matches!(x, CItem::Cur(_)))) {
            return Err(err("output cannot read current-step values".into()));
        }
        Ok(Compiled {
            from: self.from,
            to: self.to,
            init,
            rules,
            output,
            registers: self.registers.len(),
        })
    }

    pub fn from_json(text: &str) -> anyhow::Result<Self> {
        let s: Scheme = serde_json::from_str(text)?;
        s.compile()?;
        Ok(s)
    }
}

/// Register contents while reading an input word.
#[derive(Clone, Debug)]
pub struct Machine<'a> {
    scheme: &'a Compiled,
    growth: BigUint,
    regs: Vec<Rope>,
}

impl<'a> Machine<'a> {
    pub fn new(scheme: &'a Compiled, growth: usize) -> Self {
        let growth = BigUint::from(growth);
        let empty = vec![Rope::empty(); scheme.registers];
        let base: BigUint = scheme
            .init
            .iter()
            .flat_map(|(_, l)| l.iter())
            .map(|i| match i {
                CItem::Lit(r) => r.len().clone(),
                _ => BigUint::zero(),
            })
            .sum();
        let mut m = Machine { scheme, growth, regs: empty.clone() };
        let mut running = base;
        let mut regs = empty;
        for (r, list) in &scheme.init {
            regs[*r] = m.build(list, &[], &mut running, false);
        }
        m.regs = regs;
        m
    }

    fn total(&self) -> BigUint {
        self.regs.iter().map(|r| r.len()).sum()
    }

    fn measure(&self, item: &CItem, cur: &[Rope]) -> BigUint {
        match item {
            CItem::Reg(i) => self.regs[*i].len().clone(),
            CItem::Cur(i) => cur[*i].len().clone(),
            CItem::Lit(r) => r.len().clone(),
            CItem::Pad(_) => BigUint::zero(),
            CItem::Fill(_, inner) => inner.iter().map(|i| self.measure(i, cur)).sum(),
        }
    }

    fn build(&self, list: &[CItem], cur: &[Rope], running: &mut BigUint, count_lits: bool) -> Rope {
        let mut parts = Vec::with_capacity(list.len());
        for it in list {
            let piece = match it {
                CItem::Fill(l, inner) => {
                    let n: BigUint = inner.iter().map(|i| self.measure(i, cur)).sum();
                    Rope::leaf(Word::repeat(*l, n))
                }
                CItem::Reg(i) => self.regs[*i].clone(),
                CItem::Cur(i) => cur[*i].clone(),
                CItem::Lit(r) => r.clone(),
                CItem::Pad(l) => {
                    let n = &self.growth * &*running + BigUint::one();
                    *running += &n;
                    parts.push(Rope::leaf(Word::repeat(*l, n)));
                    continue;
                }
            };
            if count_lits {
                *running += piece.len();
            }
            parts.push(piece);
        }
        Rope::concat(parts)
    }

    /// Reads one input letter, running its assignments in order.
    pub fn step(&mut self, letter: usize) -> Result<(), EmbedError> {
        if letter >= self.scheme.from {
            return Err(EmbedError::Letter { letter, from: self.scheme.from });
        }
        let mut running = self.total();
        let mut next = self.regs.clone();
        for (r, list) in &self.scheme.rules[letter] {
            let value = self.build(list, &next, &mut running, true);
            next[*r] = value;
        }
        self.regs = next;
        Ok(())
    }

    pub fn feed(&mut self, letters: &[usize]) -> Result<(), EmbedError> {
        letters.iter().try_for_each(|&l| self.step(l))
    }

    /// The output expression evaluated on the current registers.
    pub fn output(&self) -> Word {
        let mut running = self.total();
        self.build(&self.scheme.output, &[], &mut running, true).to_word()
    }
}

impl Compiled {
    pub fn from(&self) -> usize {
        self.from
    }

    pub fn to(&self) -> usize {
        self.to
    }
}

/// Image of one node.
pub fn evaluate_scheme(s: &Scheme, x: &Node, growth: usize) -> Result<Word, EmbedError> {
    let c = s.compile()?;
    let mut m = Machine::new(&c, growth);
    m.feed(x.letters())?;
    Ok(m.output())
}

/// Images of the first `count` elements of the canonical set of type `t`.
pub fn image_set(c: &Compiled, t: &GapType, count: usize, growth: usize) -> Result<Vec<Word>, EmbedError> {
    t.check_alphabet(c.from).map_err(|_| EmbedError::Domain(t.to_string()))?;
    let rung =
        stretched_rung(t, growth, DEFAULT_STRETCH).map_err(|e| EmbedError::Unstable { ty: t.to_string(), cause: e })?;
    let mut m = Machine::new(c, growth);
    let mut out = Vec::with_capacity(count);
    for _ in 0..count {
        let mut branch = m.clone();
        branch.feed(rung.v.letters())?;
        out.push(branch.output());
        m.feed(rung.u.letters())?;
    }
    Ok(out)
}

fn infer_image(c: &Compiled, t: &GapType, count: usize, growth: usize) -> Result<GapType, EmbedError> {
    let mut images = image_set(c, t, count, growth)?;
    images.sort();
    images.dedup();
    infer_type_words(&images, DEFAULT_WINDOW).map_err(|cause| EmbedError::Unstable { ty: t.to_string(), cause })
}

/// The type of the image of a set of type `t`; retries once with a longer
/// prefix and faster growth before reporting instability.
pub fn type_action_compiled(c: &Compiled, t: &GapType, count: usize, growth: usize) -> Result<GapType, EmbedError> {
    match infer_image(c, t, count, growth) {
        Err(EmbedError::Unstable { .. }) => infer_image(c, t, count + 4, growth + 1),
        other => other,
    }
}

pub fn type_action(s: &Scheme, t: &GapType, count: usize, growth: usize) -> Result<GapType, EmbedError> {
    type_action_compiled(&s.compile()?, t, count, growth)
}

/// A total map from the types of `from^{<ω}` to types of `to^{<ω}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TypeMap {
    pub from: usize,
    pub to: usize,
    map: BTreeMap<GapType, GapType>,
}

impl TypeMap {
    /// Builds a map, checking totality and the target alphabet.
    pub fn new(from: usize, to: usize, map: BTreeMap<GapType, GapType>) -> Result<Self, EmbedError> {
        for t in enumerate_types(from)? {
            let img = map.get(&t).ok_or_else(|| EmbedError::Domain(t.to_string()))?;
            img.check_alphabet(to)?;
        }
        if map.len() != enumerate_types(from)?.len() {
            return Err(EmbedError::Scheme("map has types outside the source alphabet".into()));
        }
        Ok(TypeMap { from, to, map })
    }

    /// Builds a map from a function on types.
    pub fn from_fn(from: usize, to: usize, f: impl Fn(&GapType) -> GapType) -> Result<Self, EmbedError> {
        let map = enumerate_types(from)?.into_iter().map(|t| {
            let img = f(&t);
            (t, img)
        });
        TypeMap::new(from, to, map.collect())
    }

    pub fn identity(n: usize) -> Self {
        TypeMap::from_fn(n, n, |t| t.clone()).expect("identity is total")
    }

    /// Value relabelling along an increasing list of target letters.
    pub fn relabel(letters: &[usize], to: usize) -> Result<Self, EmbedError> {
        TypeMap::from_fn(letters.len(), to, |t| t.relabel(letters).expect("increasing relabelling"))
    }

    pub fn get(&self, t: &GapType) -> Option<&GapType> {
        self.map.get(t)
    }

    pub fn apply(&self, t: &GapType) -> &GapType {
        &self.map[t]
    }

    pub fn iter(&self) -> impl Iterator<Item = (&GapType, &GapType)> {
        self.map.iter()
    }

    /// Types where the two maps disagree, with both images.
    pub fn diff(&self, other: &TypeMap) -> Vec<(GapType, GapType, Option<GapType>)> {
        self.map
            .iter()
            .filter(|(k, v)| other.get(k) != Some(v))
            .map(|(k, v)| (k.clone(), v.clone(), other.get(k).cloned()))
            .collect()
    }

    /// Image set of the map.
    pub fn range(&self) -> BTreeSet<GapType> {
        self.map.values().cloned().collect()
    }

    /// `g ∘ f`.
    pub fn compose(g: &TypeMap, f: &TypeMap) -> Result<TypeMap, EmbedError> {
        if f.to != g.from {
            return Err(EmbedError::Alphabet(f.to, g.from));
        }
        let map = f.map.iter().map(|(k, v)| (k.clone(), g.apply(v).clone())).collect();
        Ok(TypeMap { from: f.from, to: g.to, map })
    }

    pub fn to_json(&self) -> serde_json::Value {
        let m: serde_json::Map<String, serde_json::Value> =
            self.map.iter().map(|(k, v)| (k.to_string(), serde_json::Value::String(v.to_string()))).collect();
        serde_json::Value::Object(m)
    }

    /// Reads a JSON object type-string → type-string.
    pub fn from_json(text: &str, from: usize, to: usize) -> anyhow::Result<Self> {
        let raw: BTreeMap<String, String> = serde_json::from_str(text)?;
        let map = raw
            .into_iter()
            .map(|(k, v)| Ok((k.parse::<GapType>()?, v.parse::<GapType>()?)))
            .collect::<Result<BTreeMap<_, _>, TypeError>>()?;
        Ok(TypeMap::new(from, to, map)?)
    }
}

impl fmt::Display for TypeMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for t in enumerate_types(self.from).map_err(|_| fmt::Error)? {
            writeln!(f, "{:<24} -> {}", t.to_string(), self.apply(&t))?;
        }
        Ok(())
    }
}

/// Type action of a scheme on every type of the source alphabet.
pub fn full_action_with(s: &Scheme, count: usize, growth: usize) -> Result<TypeMap, EmbedError> {
    let c = s.compile()?;
    let types = enumerate_types(c.from)?;
    let results: Vec<(GapType, Result<GapType, EmbedError>)> = types
        .into_par_iter()
        .map(|t| {
            let r = type_action_compiled(&c, &t, count, growth);
            (t, r)
        })
        .collect();
    let mut map = BTreeMap::new();
    let mut unstable = Vec::new();
    for (t, r) in results {
        match r {
            Ok(img) => {
                map.insert(t, img);
            }
            Err(EmbedError::Unstable { .. }) => unstable.push(t.to_string()),
            Err(e) => return Err(e),
        }
    }
    if !unstable.is_empty() {
        return Err(EmbedError::UnstableTypes(unstable));
    }
    TypeMap::new(c.from, c.to, map)
}

pub fn full_action(s: &Scheme) -> Result<TypeMap, EmbedError> {
    full_action_with(s, DEFAULT_COUNT, DEFAULT_GROWTH)
}

/// Pointwise composition `g ∘ f`.
pub fn compose_type_maps(g: &TypeMap, f: &TypeMap) -> Result<TypeMap, EmbedError> {
    TypeMap::compose(g, f)
}

fn rules_of(pairs: Vec<(usize, Vec<(String, Vec<Item>)>)>) -> BTreeMap<String, Vec<Assign>> {
    pairs
        .into_iter()
        .map(|(l, m)| (l.to_string(), m.into_iter().map(|(r, to)| Assign { set: r, to }).collect()))
        .collect()
}

/// The scheme `x⌢i ↦ image(x) ⌢ words[i] ⌢ pad(pads[i])`.
pub fn morphism_scheme(to: usize, words: &[Vec<usize>], pads: &[Option<usize>]) -> Result<Scheme, EmbedError> {
    if words.len() != pads.len() {
        return Err(EmbedError::Scheme("one pad option per letter".into()));
    }
    if words.iter().zip(pads).all(|(w, p)| w.is_empty() && p.is_none()) {
        return Err(EmbedError::Scheme("every letter maps to the empty word".into()));
    }
    let rules = words
        .iter()
        .zip(pads)
        .enumerate()
        .map(|(i, (w, p))| {
            let mut items = vec![Item::reg("x")];
            if !w.is_empty() {
                items.push(Item::lit(w));
            }
            if let Some(l) = p {
                items.push(Item::Pad(*l));
            }
            (i, vec![("x".to_string(), items)])
        })
        .collect();
    let s = Scheme {
        from: words.len(),
        to,
        registers: vec!["x".into()],
        init: BTreeMap::new(),
        rules: rules_of(rules),
        output: vec![Item::reg("x")],
    };
    s.compile()?;
    Ok(s)
}

/// Letterwise morphism without pads.
pub fn plain_morphism(to: usize, words: &[Vec<usize>]) -> Result<Scheme, EmbedError> {
    morphism_scheme(to, words, &vec![None; words.len()])
}

/// Sends the k-th letter to `letters[k]`.
pub fn restriction_scheme(letters: &[usize], to: usize) -> Result<Scheme, EmbedError> {
    if letters.is_empty() || letters.windows(2).any(|w| w[0] >= w[1]) {
        return Err(EmbedError::Scheme("restriction letters must be nonempty and increasing".into()));
    }
    plain_morphism(to, &letters.iter().map(|&l| vec![l]).collect::<Vec<_>>())
}

/// The map from `(m+1)^{<ω}` to `2^{<ω}` sending the letter `m` to `0 1^k`
/// and the other letters to `0^{k+1}`, with `k` fresh at every step.
pub fn chi_scheme(m: usize) -> Scheme {
    let words: Vec<Vec<usize>> = vec![vec![0]; m + 1];
    let pads: Vec<Option<usize>> = (0..=m).map(|i| Some(if i == m { 1 } else { 0 })).collect();
    morphism_scheme(2, &words, &pads).expect("valid morphism")
}

/// Split of a canonical rung `u = ŭ ⌢ u⃗` with `|ŭ| = |v|`.
struct SplitRung {
    breve: Vec<usize>,
    arrow: Vec<usize>,
    v: Vec<usize>,
}

fn split_rung(t: &GapType, growth: usize) -> SplitRung {
    let r = canonical_rung(t, growth).expect("growth at least 2");
    let cut = r.v.len();
    SplitRung { breve: r.u.letters()[..cut].to_vec(), arrow: r.u.letters()[cut..].to_vec(), v: r.v.letters().to_vec() }
}

/// Register scheme realizing `[i] ↦ τ_i` for a family with nondecreasing maxima.
pub fn build_max_scheme(taus: &[GapType], to: usize) -> Result<Scheme, EmbedError> {
    if taus.is_empty() {
        return Err(EmbedError::Scheme("empty family".into()));
    }
    for w in taus.windows(2) {
        if GapType::max(&w[0]) > GapType::max(&w[1]) {
            return Err(EmbedError::NotMonotone(format!("{} then {}", w[0], w[1])));
        }
    }
    for t in taus {
        t.check_alphabet(to)?;
    }
    let n = taus.len();
    let rungs: Vec<SplitRung> = taus.iter().map(|t| split_rung(t, 2)).collect();
    let mut js: Vec<usize> = (0..n).filter(|&i| taus[i].is_comb()).collect();
    js.sort_by(|&a, &b| {
        let (ma, mb) = (taus[a].max_upper(), taus[b].max_upper());
        mb.cmp(&ma).then(b.cmp(&a))
    });
    let p = js.len();
    let lo = |i: usize| format!("lo{i}");
    let hi = |i: usize| format!("hi{i}");
    let vs = |from: usize, to: usize| -> Vec<usize> { js[from..to].iter().flat_map(|&j| rungs[j].v.clone()).collect() };
    let mut registers = vec!["phi".to_string(), "base".to_string()];
    for &j in &js {
        registers.push(lo(j));
        registers.push(hi(j));
    }
    let mut init = BTreeMap::new();
    init.insert("phi".to_string(), vec![Item::lit(&vs(0, p))]);
    for (r, &j) in js.iter().enumerate() {
        init.insert(lo(j), vec![Item::lit(&vs(0, r))]);
        init.insert(hi(j), vec![Item::lit(&vs(0, r)), Item::lit(&rungs[j].breve), Item::Pad(0)]);
    }
    let mut rules = Vec::new();
    for k in 0..n {
        let q = (0..p)
            .find(|&r| taus[js[r]].max_upper().expect("comb") < GapType::max(&taus[k]) || js[r] <= k)
            .unwrap_or(p);
        let base = if taus[k].is_comb() { hi(k) } else { "phi".to_string() };
        let head = |end: usize| -> Vec<Item> {
            let mut it = vec![Item::cur("base")];
            let tail = vs(q, end);
            if !tail.is_empty() {
                it.push(Item::lit(&tail));
            }
            it
        };
        let mut assign = vec![
            ("base".to_string(), vec![Item::Reg(base.clone()), Item::lit(&rungs[k].arrow), Item::Pad(0)]),
            ("phi".to_string(), head(p)),
        ];
        for (r, &j) in js.iter().enumerate() {
            let (low, high_base) =
                if r < q { (vec![Item::Reg(lo(j))], Item::Reg(lo(j))) } else { (head(r), Item::Cur(lo(j))) };
            assign.push((lo(j), low));
            assign.push((hi(j), vec![high_base, Item::lit(&rungs[j].breve), Item::Pad(0)]));
        }
        rules.push((k, assign));
    }
    let s = Scheme {
        from: n,
        to,
        registers,
        init,
        rules: rules_of(rules),
        output: vec![Item::reg("phi")],
    };
    s.compile()?;
    Ok(s)
}

/// The map on `2^{<ω}` fixing `[0]`, sending `[1]`, `[01]`, `[^1 _0 _1]` to
/// `[^1 _0 _1]`, `[^0 _1]` to `[_0 ^1 _1]` and fixing every other type.
pub fn builtin_101_map() -> TypeMap {
    let t = |s: &str| s.parse::<GapType>().expect("literal type");
    let target = t("[^1 _0 _1]");
    TypeMap::from_fn(2, 2, |x| {
        if *x == t("[1]") || *x == t("[01]") {
            target.clone()
        } else if *x == t("[^0 _1]") {
            t("[_0 ^1 _1]")
        } else {
            x.clone()
        }
    })
    .expect("total on 2")
}

/// `σ ↦ τ_{max σ}` for a chain of dominations `τ_0 ≪ τ_1 ≪ ⋯`.
pub fn build_domination_map(taus: &[GapType], to: usize) -> Result<TypeMap, EmbedError> {
    if taus.is_empty() {
        return Err(EmbedError::Scheme("empty family".into()));
    }
    for (k, w) in taus.windows(2).enumerate() {
        if w[0] == w[1] || !dominates(&w[1], &w[0]) {
            return Err(EmbedError::DominationBroken(k + 1));
        }
    }
    TypeMap::from_fn(taus.len(), to, |s| taus[s.max()].clone())
}

/// Extends `inner` to one more letter using a type `τ` that subdominates
/// every inner image.
pub fn build_subdomination_map(inner: &TypeMap, tau: &GapType) -> Result<TypeMap, EmbedError> {
    tau.check_alphabet(inner.to)?;
    for (sigma, img) in inner.iter() {
        if !subdominates(tau, img) {
            return Err(EmbedError::NotSubdominating { tau: tau.to_string(), sigma: sigma.to_string() });
        }
    }
    let n = inner.from;
    TypeMap::from_fn(n + 1, inner.to, |s| subdomination_case(inner, tau, n, s).expect("checked precondition"))
}

/// The image of `σ` under the extension by `τ`.
pub fn subdomination_case(inner: &TypeMap, tau: &GapType, n: usize, s: &GapType) -> Result<GapType, EmbedError> {
    if s.max() < n {
        return Ok(inner.apply(s).clone());
    }
    tilde_lower(tau)?;
    let top = s.max_upper();
    let kind = if s.is_chain() || (top < Some(n) && !s.is_top_comb()) {
        None
    } else if top < Some(n) {
        Some(Frak::K)
    } else if s.max_lower() < n {
        Some(Frak::P)
    } else if !s.is_top_comb() {
        Some(Frak::S)
    } else if !s.is_top2_comb() {
        Some(Frak::Z)
    } else {
        Some(Frak::W)
    };
    Ok(match kind {
        None => tau.clone(),
        Some(k) => frak(k, tau)?,
    })
}

fn rename(items: &[Item], prefix: &str) -> Vec<Item> {
    items
        .iter()
        .map(|it| match it {
            Item::Reg(r) => Item::Reg(format!("{prefix}{r}")),
            Item::Cur(r) => Item::Cur(format!("{prefix}{r}")),
            Item::Fill(l, inner) => Item::Fill(*l, rename(inner, prefix)),
            other => other.clone(),
        })
        .collect()
}

/// Realizes [`build_subdomination_map`] over `inner` by the two base
/// functions: `β₀` jumps on the new top letter, while the inner scheme is
/// restarted and its output hangs below `β₀ ⌢ v`.
pub fn build_subdomination_scheme(inner: &Scheme, tau: &GapType) -> Result<Scheme, EmbedError> {
    tilde_lower(tau)?;
    tau.check_alphabet(inner.to)?;
    let n = inner.from;
    let rung = canonical_rung(tau, 2).map_err(|e| EmbedError::Unstable { ty: tau.to_string(), cause: e })?;
    let u = rung.u.letters();
    let ends = Word::from_letters(u).block_ends();
    let last_upper = tau.entries().iter().rposition(|e| !matches!(e.row, crate::types::Row::Lower)).expect("comb");
    let lowers_before = tau.entries()[..=last_upper].iter().filter(|e| matches!(e.row, crate::types::Row::Lower)).count();
    let cut: usize = num_traits::ToPrimitive::to_usize(&ends[lowers_before].1).expect("small rung");
    let (breve, arrow) = u.split_at(cut);
    let pre = "in_";
    let mut registers = vec!["b0".to_string()];
    registers.extend(inner.registers.iter().map(|r| format!("{pre}{r}")));
    let init: BTreeMap<String, Vec<Item>> =
        inner.init.iter().map(|(r, l)| (format!("{pre}{r}"), rename(l, pre))).collect();
    let mut rules: BTreeMap<String, Vec<Assign>> = BTreeMap::new();
    for (letter, m) in &inner.rules {
        rules.insert(
            letter.clone(),
            m.iter().map(|a| Assign { set: format!("{pre}{}", a.set), to: rename(&a.to, pre) }).collect(),
        );
    }
    let inner_out = rename(&inner.output, pre);
    if inner_out.iter().any(|i| matches!(i, Item::Pad(_))) {
        return Err(EmbedError::Scheme("inner output cannot contain pads".into()));
    }
    let mut top = vec![Assign::new(
        "b0",
        vec![Item::reg("b0"), Item::lit(breve), Item::Fill(0, inner_out), Item::lit(arrow)],
    )];
    for r in &inner.registers {
        let reset = init.get(&format!("{pre}{r}")).cloned().unwrap_or_default();
        top.push(Assign { set: format!("{pre}{r}"), to: reset });
    }
    rules.insert(n.to_string(), top);
    let mut output = vec![Item::reg("b0"), Item::lit(rung.v.letters())];
    output.extend(rename(&inner.output, pre));
    let s = Scheme { from: n + 1, to: inner.to, registers, init, rules, output };
    s.compile()?;
    Ok(s)
}

/// Places the entries of `t` (in ◁ order) at strictly increasing block ends.
/// `fixed` pins some entries; the others are spread evenly between pins.
fn layout(t: &GapType, fixed: &BTreeMap<usize, usize>) -> (Vec<usize>, Vec<usize>) {
    let n = t.entries().len();
    let mut ends = vec![0usize; n];
    let mut anchors: Vec<(isize, usize)> = vec![(-1, 0)];
    anchors.extend(fixed.iter().map(|(&i, &p)| (i as isize, p)));
    for w in anchors.windows(2) {
        let ((i0, p0), (i1, p1)) = (w[0], w[1]);
        let gap = (i1 - i0) as usize;
        for k in 1..gap {
            ends[(i0 + k as isize) as usize] = p0 + (p1 - p0) * k / gap;
        }
        ends[i1 as usize] = p1;
    }
    let mut u = Vec::new();
    let mut v = Vec::new();
    for (e, &end) in t.entries().iter().zip(&ends) {
        let row = if matches!(e.row, crate::types::Row::Lower) { &mut u } else { &mut v };
        row.push(e.value);
        row.resize(end, 0);
    }
    (u, v)
}

/// Rungs sharing a common upper tail, as required by the strong construction.
struct StrongRung {
    u: Vec<usize>,
    breve_v: Vec<usize>,
    breve_len: usize,
}

/// A scheme sending every chain type `σ` to `τ_{min σ}`, for a family of
/// types with a common strength.
pub fn build_strong_scheme(taus: &[GapType], to: usize) -> Result<Scheme, EmbedError> {
    let first = taus.first().ok_or_else(|| EmbedError::Scheme("empty family".into()))?;
    let eta: Vec<usize> = first.strength().into_iter().collect();
    for t in taus {
        t.check_alphabet(to)?;
        if t.strength() != first.strength() {
            return Err(EmbedError::StrengthMismatch(first.to_string(), t.to_string()));
        }
    }
    let eta1 = eta[0];
    let d = eta.len();
    let longest = taus.iter().map(|t| t.entries().len()).max().expect("nonempty");
    let l = 8 * (longest + 2) * d.max(2);
    let step = if d > 1 { l / (d - 1) } else { l };
    let arrow_v: Vec<usize> = if d == 1 {
        vec![0; l]
    } else {
        let mut w = Vec::with_capacity(l);
        for &h in &eta[1..] {
            w.push(h);
            w.resize(w.len() + step - 1, 0);
        }
        w
    };
    let mut rungs = Vec::with_capacity(taus.len());
    for t in taus {
        let n = t.entries().len();
        let mut fixed = BTreeMap::new();
        let upper_idx: Vec<usize> = (0..n).filter(|&i| !matches!(t.entries()[i].row, crate::types::Row::Lower)).collect();
        let low: Vec<usize> = upper_idx.iter().copied().filter(|&i| t.entries()[i].value <= eta1).collect();
        let high: Vec<usize> = upper_idx.iter().copied().filter(|&i| t.entries()[i].value > eta1).collect();
        let rung = if t.is_chain() {
            fixed.insert(n - 1, l);
            let (u, _) = layout(t, &fixed);
            StrongRung { u, breve_v: Vec::new(), breve_len: 0 }
        } else if low.is_empty() {
            for (k, &i) in high.iter().enumerate() {
                fixed.insert(i, (k + 1) * step);
            }
            fixed.insert(n - 1, 2 * l);
            let (u, _) = layout(t, &fixed);
            StrongRung { u, breve_v: Vec::new(), breve_len: 0 }
        } else {
            let last_low = *low.last().expect("nonempty");
            if d == 1 {
                let spread = l - 2;
                for (k, &i) in low[..low.len() - 1].iter().enumerate() {
                    fixed.insert(i, (k + 1) * spread / low.len());
                }
                fixed.insert(last_low, 2 * l);
            } else {
                fixed.insert(last_low, l);
                for (k, &i) in high.iter().enumerate() {
                    fixed.insert(i, l + (k + 1) * step);
                }
            }
            fixed.insert(n - 1, 3 * l);
            let (u, v) = layout(t, &fixed);
            StrongRung { u, breve_v: v[..l].to_vec(), breve_len: l }
        };
        rungs.push(rung);
    }
    let mut js: Vec<usize> = (0..taus.len()).filter(|&i| rungs[i].breve_len > 0).collect();
    js.sort_by(|&a, &b| {
        let ma = rungs[a].breve_v.iter().max();
        let mb = rungs[b].breve_v.iter().max();
        mb.cmp(&ma).then(a.cmp(&b))
    });
    let p = js.len();
    let breves = |upto: usize| -> Vec<usize> { js[..upto].iter().flat_map(|&j| rungs[j].breve_v.clone()).collect() };
    let all_breves = breves(p);
    let mut rules = Vec::new();
    for (i, t) in taus.iter().enumerate() {
        let items = if t.is_chain() {
            vec![Item::reg("beta"), Item::lit(&all_breves), Item::lit(&arrow_v), Item::lit(&rungs[i].u)]
        } else if let Some(r) = js.iter().position(|&j| j == i) {
            let cut = rungs[i].breve_len;
            vec![
                Item::reg("beta"),
                Item::lit(&breves(r)),
                Item::lit(&rungs[i].u[..cut]),
                Item::lit(&vec![0; l * (p - r - 1)]),
                Item::lit(&rungs[i].u[cut..]),
            ]
        } else {
            vec![Item::reg("beta"), Item::lit(&all_breves), Item::lit(&rungs[i].u)]
        };
        let items: Vec<Item> = items.into_iter().filter(|it| !matches!(it, Item::Lit(s) if s.is_empty())).collect();
        rules.push((i, vec![("beta".to_string(), items)]));
    }
    let s = Scheme {
        from: taus.len(),
        to,
        registers: vec!["beta".into()],
        init: BTreeMap::new(),
        rules: rules_of(rules),
        output: vec![Item::reg("beta"), Item::lit(&all_breves), Item::lit(&arrow_v)]
            .into_iter()
            .filter(|it| !matches!(it, Item::Lit(s) if s.is_empty()))
            .collect(),
    };
    s.compile()?;
    Ok(s)
}

/// Type actions on a chosen list of source types; failures are kept per type.
pub fn partial_action(
    s: &Scheme,
    types: &[GapType],
    count: usize,
    growth: usize,
) -> Result<Vec<(GapType, Result<GapType, EmbedError>)>, EmbedError> {
    let c = s.compile()?;
    Ok(types.par_iter().map(|t| (t.clone(), type_action_compiled(&c, t, count, growth))).collect())
}
