//! Rungs, canonical prefixes of sets of a given type, membership checks and
//! type inference from finite node sequences.

use serde::Serialize;
use thiserror::Error;

use crate::tree::Node;
use crate::types::{Entry, GapType, Row};
use crate::word::{cmp_prefixes, Word};

/// Errors and outcomes of witness operations.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum WitnessError {
    #[error("need at least {need} nodes, got {got}")]
    TooShort { need: usize, got: usize },
    #[error("consecutive meets do not form a strictly increasing chain")]
    MeetsNotChain,
    #[error("rung types do not stabilize")]
    Unstable,
    #[error("growth must be at least 2 and the first block nonempty")]
    BadGrowth,
}

/// A rung `(u, v)` of type `of_type`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Rung {
    pub u: Node,
    pub v: Node,
    pub of_type: GapType,
}

/// The nodes `stem ⌢ u^k ⌢ v` for `k < count`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TypedSetPrefix {
    #[serde(rename = "type")]
    pub of_type: GapType,
    pub stem: Node,
    pub u: Node,
    pub v: Node,
    pub nodes: Vec<Node>,
}

/// The type realized by the pair `(u, v)`, if any.
pub fn rung_type(u: &Word, v: &Word) -> Option<GapType> {
    if u.is_empty() {
        return None;
    }
    let lows = u.block_ends();
    let ups = v.block_ends();
    let mut entries = Vec::with_capacity(lows.len() + ups.len());
    let (mut i, mut j) = (0, 0);
    while i < lows.len() || j < ups.len() {
        let take_lower = match (lows.get(i), ups.get(j)) {
            (Some((_, lu)), Some((_, lv))) => cmp_prefixes(u, lu, v, lv).is_lt(),
            (Some(_), None) => true,
            _ => false,
        };
        if take_lower {
            entries.push(Entry::lower(lows[i].0));
            i += 1;
        } else {
            entries.push(Entry::upper(ups[j].0));
            j += 1;
        }
    }
    GapType::new(entries).ok()
}

/// True iff `(u, v)` is a rung of type `t`.
pub fn is_rung(u: &Node, v: &Node, t: &GapType) -> bool {
    rung_type(&Word::from_node(u), &Word::from_node(v)).as_ref() == Some(t)
}

/// Cumulative prefix lengths along ◁: `P₁ = first`, `P_{k+1} = growth·P_k + 1`.
fn prefix_targets(len: usize, growth: usize, first: usize) -> Vec<usize> {
    let mut out = Vec::with_capacity(len);
    let mut p = first;
    for _ in 0..len {
        out.push(p);
        p = p.saturating_mul(growth).saturating_add(1);
    }
    out
}

/// A rung of type `t` whose blocks are a head letter followed by zeros,
/// with cumulative prefix lengths growing geometrically along ◁.
pub fn canonical_rung(t: &GapType, growth: usize) -> Result<Rung, WitnessError> {
    stretched_rung(t, growth, 1)
}

/// As [`canonical_rung`], with the first block end at `first`.
pub fn stretched_rung(t: &GapType, growth: usize, first: usize) -> Result<Rung, WitnessError> {
    if growth < 2 || first == 0 {
        return Err(WitnessError::BadGrowth);
    }
    let alphabet = t.max() + 1;
    let targets = prefix_targets(t.entries().len(), growth, first);
    let (mut u, mut v) = (Vec::new(), Vec::new());
    for (e, &target) in t.entries().iter().zip(&targets) {
        let row = if e.row == Row::Lower { &mut u } else { &mut v };
        row.push(e.value);
        row.resize(target, 0);
    }
    Ok(Rung {
        u: Node::new(alphabet, u).expect("letters below alphabet"),
        v: Node::new(alphabet, v).expect("letters below alphabet"),
        of_type: t.clone(),
    })
}

/// The first `count` nodes of the set `stem ⌢ u^k ⌢ v`.
pub fn generate_with_rung(stem: &Node, rung: &Rung, count: usize) -> TypedSetPrefix {
    let alphabet = stem.alphabet().max(rung.u.alphabet());
    let mut base = stem.letters().to_vec();
    let mut nodes = Vec::with_capacity(count);
    for _ in 0..count {
        let mut x = base.clone();
        x.extend_from_slice(rung.v.letters());
        nodes.push(Node::new(alphabet, x).expect("letters below alphabet"));
        base.extend_from_slice(rung.u.letters());
    }
    TypedSetPrefix {
        of_type: rung.of_type.clone(),
        stem: Node::new(alphabet, stem.letters().to_vec()).expect("letters below alphabet"),
        u: Node::new(alphabet, rung.u.letters().to_vec()).expect("letters below alphabet"),
        v: Node::new(alphabet, rung.v.letters().to_vec()).expect("letters below alphabet"),
        nodes,
    }
}

/// The first `count` nodes of a set of type `t` built from the canonical rung.
pub fn generate_set(t: &GapType, count: usize, growth: usize, stem: &Node) -> Result<TypedSetPrefix, WitnessError> {
    if count < 3 {
        return Err(WitnessError::TooShort { need: 3, got: count });
    }
    Ok(generate_with_rung(stem, &canonical_rung(t, growth)?, count))
}

/// Rung types `(r_{k+1} ∖ r_k, x_k ∖ r_k)` along consecutive meets
/// `r_k = x_k ∧ x_{k+1}`; `None` marks a pair that is not a rung.
pub fn rung_types(xs: &[Word]) -> Result<Vec<Option<GapType>>, WitnessError> {
    if xs.len() < 3 {
        return Err(WitnessError::TooShort { need: 3, got: xs.len() });
    }
    let meets: Vec<Word> = xs.windows(2).map(|w| w[0].common_prefix(&w[1])).collect();
    let mut out = Vec::with_capacity(meets.len() - 1);
    for k in 0..meets.len() - 1 {
        let u = meets[k + 1].strip_prefix(&meets[k]).ok_or(WitnessError::MeetsNotChain)?;
        if u.is_empty() {
            return Err(WitnessError::MeetsNotChain);
        }
        let v = xs[k].strip_prefix(&meets[k]).expect("meet is a prefix");
        out.push(rung_type(&u, &v));
    }
    Ok(out)
}

/// Infers the type of a ≺-increasing sequence from its last `window` rungs.
pub fn infer_type_words(xs: &[Word], window: usize) -> Result<GapType, WitnessError> {
    let window = window.max(1);
    if xs.len() < window + 2 {
        return Err(WitnessError::TooShort { need: window + 2, got: xs.len() });
    }
    let tail = &xs[xs.len() - window - 2..];
    let found = rung_types(tail)?;
    match found.first() {
        Some(Some(t)) if found.iter().all(|x| x.as_ref() == Some(t)) => Ok(t.clone()),
        _ => Err(WitnessError::Unstable),
    }
}

/// Infers the type of a ≺-increasing node sequence.
pub fn infer_type(xs: &[Node], window: usize) -> Result<GapType, WitnessError> {
    let words: Vec<Word> = xs.iter().map(Word::from_node).collect();
    infer_type_words(&words, window)
}

/// True iff every extracted rung of the sequence has type `t`.
pub fn check_typed_set(xs: &[Node], t: &GapType) -> Result<bool, WitnessError> {
    let words: Vec<Word> = xs.iter().map(Word::from_node).collect();
    if words.windows(2).any(|w| w[0] >= w[1]) {
        return Ok(false);
    }
    match rung_types(&words) {
        Ok(found) => Ok(found.iter().all(|x| x.as_ref() == Some(t))),
        Err(WitnessError::MeetsNotChain) => Ok(false),
        Err(e) => Err(e),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::types::enumerate_types;

    fn node(s: &str) -> Node {
        Node::parse(s, 6).unwrap()
    }

    fn t(s: &str) -> GapType {
        s.parse().unwrap()
    }

    #[test]
    fn rung_examples() {
        assert!(is_rung(&node("213"), &Node::root(6), &t("[23]")));
        assert!(is_rung(&node("213"), &node("5"), &t("[^5 _2 _3]")));
        for x in enumerate_types(2).unwrap() {
            assert!(!is_rung(&node("0"), &node("0"), &x));
        }
    }

    #[test]
    fn worked_sets() {
        let chain: Vec<Node> = ["00", "00213", "00213213", "00213213213"].iter().map(|s| node(s)).collect();
        assert_eq!(infer_type(&chain, 2).unwrap(), t("[23]"));
        assert!(check_typed_set(&chain, &t("[23]")).unwrap());
        assert!(!check_typed_set(&chain, &t("[2]")).unwrap());
        let comb: Vec<Node> = ["005", "002135", "002132135", "002132132135"].iter().map(|s| node(s)).collect();
        assert_eq!(infer_type(&comb, 2).unwrap(), t("[^5 _2 _3]"));
        assert!(check_typed_set(&comb, &t("[^5 _2 _3]")).unwrap());
        assert!(check_typed_set(&chain[..2], &t("[23]")).is_err());
    }

    #[test]
    fn generated_sets() {
        let stem = Node::parse("00", 4).unwrap();
        let rung = Rung { u: Node::parse("213", 4).unwrap(), v: Node::root(4), of_type: t("[23]") };
        let s = generate_with_rung(&stem, &rung, 3);
        assert_eq!(s.nodes, vec![node_in("00", 4), node_in("00213", 4), node_in("00213213", 4)]);
        let s = generate_set(&t("[0]"), 3, 2, &Node::root(1)).unwrap();
        assert_eq!(s.nodes, vec![Node::root(1), node_in("0", 1), node_in("00", 1)]);
        let r = canonical_rung(&t("[^5 _2 _3]"), 2).unwrap();
        assert!(is_rung(&r.u, &r.v, &t("[^5 _2 _3]")));
        assert_eq!((r.v.len(), r.u.len()), (1, 7));
    }

    fn node_in(s: &str, m: usize) -> Node {
        Node::parse(s, m).unwrap()
    }

    #[test]
    fn roundtrip_all_types_of_three() {
        for x in enumerate_types(3).unwrap() {
            for g in [2, 3] {
                let r = canonical_rung(&x, g).unwrap();
                assert!(is_rung(&r.u, &r.v, &x), "{x}");
            }
            let s = generate_set(&x, 8, 2, &Node::root(3)).unwrap();
            assert_eq!(infer_type(&s.nodes, 3).unwrap(), x);
        }
    }
}
