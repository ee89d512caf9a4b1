//! Finite words of the m-adic tree: the length-then-lex order, meets,
//! W-block decomposition, closed sets and equivalence of finite families.

use std::cmp::Ordering;
use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Errors raised by tree operations.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TreeError {
    #[error("alphabet mismatch: {0} vs {1}")]
    AlphabetMismatch(usize, usize),
    #[error("letter {letter} out of range for alphabet {alphabet}")]
    LetterOutOfRange { letter: usize, alphabet: usize },
    #[error("operation requires a nonempty word")]
    EmptyWord,
    #[error("cannot parse node `{0}`")]
    Parse(String),
    #[error("families differ in size: {0} vs {1}")]
    SizeMismatch(usize, usize),
}

/// A finite word over `{0..alphabet-1}`.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Node {
    alphabet: usize,
    letters: Vec<usize>,
}

impl Node {
    /// Builds a node, checking every letter against the alphabet.
    pub fn new(alphabet: usize, letters: Vec<usize>) -> Result<Self, TreeError> {
        if let Some(&letter) = letters.iter().find(|&&l| l >= alphabet) {
            return Err(TreeError::LetterOutOfRange { letter, alphabet });
        }
        Ok(Node { alphabet, letters })
    }

    /// The empty word (the root).
    pub fn root(alphabet: usize) -> Self {
        Node { alphabet, letters: Vec::new() }
    }

    pub fn alphabet(&self) -> usize {
        self.alphabet
    }

    pub fn letters(&self) -> &[usize] {
        &self.letters
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    /// Concatenation `self ⌢ other`.
    pub fn concat(&self, other: &Node) -> Result<Node, TreeError> {
        same_alphabet(self, other)?;
        let mut letters = self.letters.clone();
        letters.extend_from_slice(&other.letters);
        Ok(Node { alphabet: self.alphabet, letters })
    }

    /// True iff `self` is a (not necessarily proper) prefix of `other`.
    pub fn is_prefix_of(&self, other: &Node) -> bool {
        other.letters.starts_with(&self.letters)
    }

    /// The suffix `self ∖ prefix`, if `prefix` is a prefix of `self`.
    pub fn strip_prefix(&self, prefix: &Node) -> Option<Node> {
        self.letters
            .strip_prefix(prefix.letters.as_slice())
            .map(|rest| Node { alphabet: self.alphabet, letters: rest.to_vec() })
    }

    /// Parses `"(0 2 11)"` or, for alphabets of at most ten letters, `"0211"`.
    pub fn parse(text: &str, alphabet: usize) -> Result<Node, TreeError> {
        let t = text.trim();
        let letters: Vec<usize> = if let Some(inner) = t.strip_prefix('(').and_then(|s| s.strip_suffix(')')) {
            let parts: Vec<&str> = inner.split_whitespace().collect();
            if parts.len() == 1 && alphabet <= 10 && parts[0].len() > 1 {
                digits(parts[0]).ok_or_else(|| TreeError::Parse(text.to_string()))?
            } else {
                parts
                    .iter()
                    .map(|p| p.parse::<usize>().map_err(|_| TreeError::Parse(text.to_string())))
                    .collect::<Result<_, _>>()?
            }
        } else if alphabet <= 10 {
            digits(t).ok_or_else(|| TreeError::Parse(text.to_string()))?
        } else {
            return Err(TreeError::Parse(text.to_string()));
        };
        Node::new(alphabet, letters)
    }
}

fn digits(s: &str) -> Option<Vec<usize>> {
    s.chars().map(|c| c.to_digit(10).map(|d| d as usize)).collect()
}

impl fmt::Display for Node {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.letters.iter().map(|l| l.to_string()).collect();
        write!(f, "({})", parts.join(" "))
    }
}

impl Ord for Node {
    fn cmp(&self, other: &Self) -> Ordering {
        self.letters
            .len()
            .cmp(&other.letters.len())
            .then_with(|| self.letters.cmp(&other.letters))
    }
}

impl PartialOrd for Node {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Serialize for Node {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

fn same_alphabet(a: &Node, b: &Node) -> Result<(), TreeError> {
    if a.alphabet != b.alphabet {
        Err(TreeError::AlphabetMismatch(a.alphabet, b.alphabet))
    } else {
        Ok(())
    }
}

/// Longest common prefix `s ∧ t`.
pub fn meet(s: &Node, t: &Node) -> Result<Node, TreeError> {
    same_alphabet(s, t)?;
    let k = s.letters.iter().zip(&t.letters).take_while(|(a, b)| a == b).count();
    Ok(Node { alphabet: s.alphabet, letters: s.letters[..k].to_vec() })
}

/// `s ≺ t`: shorter first, lexicographic at equal length.
pub fn precedes(s: &Node, t: &Node) -> Result<bool, TreeError> {
    same_alphabet(s, t)?;
    Ok(s < t)
}

/// One block of a W-decomposition: a word in `W_head`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Block {
    pub head: usize,
    pub word: Node,
}

/// Splits a nonempty word before each strict running maximum.
pub fn block_decompose(w: &Node) -> Result<Vec<Block>, TreeError> {
    if w.is_empty() {
        return Err(TreeError::EmptyWord);
    }
    let mut blocks: Vec<Block> = Vec::new();
    for &l in &w.letters {
        match blocks.last_mut() {
            Some(b) if l <= b.head => b.word.letters.push(l),
            _ => blocks.push(Block { head: l, word: Node { alphabet: w.alphabet, letters: vec![l] } }),
        }
    }
    Ok(blocks)
}

/// A finite set of nodes over one alphabet.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NodeSet {
    alphabet: usize,
    nodes: BTreeSet<Node>,
}

#[derive(Serialize, Deserialize)]
struct NodeSetFile {
    alphabet: usize,
    nodes: Vec<String>,
}

impl NodeSet {
    pub fn new(alphabet: usize, nodes: impl IntoIterator<Item = Node>) -> Result<Self, TreeError> {
        let mut set = BTreeSet::new();
        for n in nodes {
            if n.alphabet != alphabet {
                return Err(TreeError::AlphabetMismatch(alphabet, n.alphabet));
            }
            set.insert(n);
        }
        Ok(NodeSet { alphabet, nodes: set })
    }

    /// Parses each string with [`Node::parse`].
    pub fn parse<S: AsRef<str>>(alphabet: usize, items: &[S]) -> Result<Self, TreeError> {
        let nodes = items
            .iter()
            .map(|s| Node::parse(s.as_ref(), alphabet))
            .collect::<Result<Vec<_>, _>>()?;
        NodeSet::new(alphabet, nodes)
    }

    /// Reads the JSON form `{"alphabet": m, "nodes": [...]}`.
    pub fn from_json(text: &str) -> anyhow::Result<Self> {
        let f: NodeSetFile = serde_json::from_str(text)?;
        Ok(NodeSet::parse(f.alphabet, &f.nodes)?)
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "alphabet": self.alphabet,
            "nodes": self.nodes.iter().map(|n| n.to_string()).collect::<Vec<_>>(),
        })
    }

    pub fn alphabet(&self) -> usize {
        self.alphabet
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn contains(&self, n: &Node) -> bool {
        self.nodes.contains(n)
    }

    /// Nodes in ≺-increasing order.
    pub fn sorted(&self) -> Vec<Node> {
        self.nodes.iter().cloned().collect()
    }
}

/// Least superset closed under meets and under adding `t ⌢ r₁` for
/// comparable `t < s`, where `r₁` is the first block of `s ∖ t`.
pub fn closure(f: &NodeSet) -> NodeSet {
    let mut set = f.nodes.clone();
    loop {
        let items: Vec<Node> = set.iter().cloned().collect();
        let mut added = Vec::new();
        for (i, a) in items.iter().enumerate() {
            for b in &items[i + 1..] {
                let m = meet(a, b).expect("one alphabet");
                if !set.contains(&m) {
                    added.push(m);
                }
            }
        }
        for t in &items {
            for s in &items {
                if t.len() < s.len() && t.is_prefix_of(s) {
                    let rest = s.strip_prefix(t).expect("prefix");
                    let first = &block_decompose(&rest).expect("nonempty")[0];
                    let p = t.concat(&first.word).expect("one alphabet");
                    if !set.contains(&p) {
                        added.push(p);
                    }
                }
            }
        }
        if added.is_empty() {
            return NodeSet { alphabet: f.alphabet, nodes: set };
        }
        set.extend(added);
    }
}

/// True iff the set equals its closure.
pub fn is_closed(f: &NodeSet) -> bool {
    closure(f).len() == f.len()
}

/// Decides equivalence of two finite families; on success returns the
/// ≺-order-preserving bijection between their closures.
pub fn equivalence_witness(x: &NodeSet, y: &NodeSet) -> Option<Vec<(Node, Node)>> {
    if x.len() != y.len() {
        return None;
    }
    let cx = closure(x).sorted();
    let cy = closure(y).sorted();
    if cx.len() != cy.len() {
        return None;
    }
    let index = |n: &Node| cx.binary_search(n).expect("member of closure");
    for n in x.nodes.iter() {
        if !y.contains(&cy[index(n)]) {
            return None;
        }
    }
    for i in 0..cx.len() {
        for j in i + 1..cx.len() {
            let m = meet(&cx[i], &cx[j]).expect("one alphabet");
            let gm = meet(&cy[i], &cy[j]).expect("one alphabet");
            if cy[index(&m)] != gm {
                return None;
            }
        }
    }
    for (i, s) in cx.iter().enumerate() {
        let pred = cx
            .iter()
            .enumerate()
            .filter(|(_, t)| t.len() < s.len() && t.is_prefix_of(s))
            .max_by_key(|(_, t)| t.len());
        if let Some((j, t)) = pred {
            let d = s.strip_prefix(t).expect("prefix");
            let gd = match cy[i].strip_prefix(&cy[j]) {
                Some(gd) if !gd.is_empty() => gd,
                _ => return None,
            };
            let (b, gb) = (block_decompose(&d).ok()?, block_decompose(&gd).ok()?);
            if b.len() != 1 || gb.len() != 1 || b[0].head != gb[0].head {
                return None;
            }
        }
    }
    Some(cx.into_iter().zip(cy).collect())
}

/// Equivalence of finite families.
pub fn equivalent(x: &NodeSet, y: &NodeSet) -> bool {
    equivalence_witness(x, y).is_some()
}

/// Equivalence decided through all aligned subfamilies of size at most four.
pub fn equivalent_by_quadruples(x: &NodeSet, y: &NodeSet) -> Result<bool, TreeError> {
    if x.len() != y.len() {
        return Err(TreeError::SizeMismatch(x.len(), y.len()));
    }
    let (xs, ys) = (x.sorted(), y.sorted());
    let n = xs.len();
    let mut idx = Vec::with_capacity(4);
    Ok(subsets_upto(n, 4, 0, &mut idx, &mut |ix: &[usize]| {
        let sx = NodeSet::new(x.alphabet, ix.iter().map(|&i| xs[i].clone())).expect("one alphabet");
        let sy = NodeSet::new(y.alphabet, ix.iter().map(|&i| ys[i].clone())).expect("one alphabet");
        equivalent(&sx, &sy)
    }))
}

fn subsets_upto(
    n: usize,
    k: usize,
    start: usize,
    cur: &mut Vec<usize>,
    check: &mut dyn FnMut(&[usize]) -> bool,
) -> bool {
    if !cur.is_empty() && !check(cur) {
        return false;
    }
    if cur.len() == k {
        return true;
    }
    for i in start..n {
        cur.push(i);
        let ok = subsets_upto(n, k, i + 1, cur, check);
        cur.pop();
        if !ok {
            return false;
        }
    }
    true
}
