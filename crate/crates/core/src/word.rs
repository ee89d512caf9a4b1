//! Run-length encoded words with exact big-integer run lengths, and
//! persistent ropes used as transducer registers.

use std::cmp::Ordering;
use std::fmt;
use std::sync::Arc;

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};

use crate::tree::Node;

/// A maximal run `letter^count`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Run {
    pub letter: usize,
    pub count: Arc<BigUint>,
}

/// A word stored as maximal runs; adjacent runs carry different letters.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Word {
    runs: Vec<Run>,
}

impl Word {
    pub fn empty() -> Self {
        Word { runs: Vec::new() }
    }

    pub fn from_letters(letters: &[usize]) -> Self {
        let mut w = Word::empty();
        for &l in letters {
            w.push_run(l, Arc::new(BigUint::one()));
        }
        w
    }

    pub fn from_node(n: &Node) -> Self {
        Word::from_letters(n.letters())
    }

    /// `letter^count`.
    pub fn repeat(letter: usize, count: BigUint) -> Self {
        let mut w = Word::empty();
        w.push_run(letter, Arc::new(count));
        w
    }

    pub fn runs(&self) -> &[Run] {
        &self.runs
    }

    pub fn is_empty(&self) -> bool {
        self.runs.is_empty()
    }

    pub fn len(&self) -> BigUint {
        self.runs.iter().map(|r| r.count.as_ref()).sum()
    }

    pub fn first_letter(&self) -> Option<usize> {
        self.runs.first().map(|r| r.letter)
    }

    pub fn max_letter(&self) -> Option<usize> {
        self.runs.iter().map(|r| r.letter).max()
    }

    /// Appends a run, merging with the last one when letters agree.
    pub fn push_run(&mut self, letter: usize, count: Arc<BigUint>) {
        if count.is_zero() {
            return;
        }
        match self.runs.last_mut() {
            Some(last) if last.letter == letter => {
                last.count = Arc::new(last.count.as_ref() + count.as_ref());
            }
            _ => self.runs.push(Run { letter, count }),
        }
    }

    pub fn append(&mut self, other: &Word) {
        for r in &other.runs {
            self.push_run(r.letter, r.count.clone());
        }
    }

    /// Expands to a plain letter vector when the length fits `limit`.
    pub fn to_letters(&self, limit: usize) -> Option<Vec<usize>> {
        let n = self.len().to_usize()?;
        if n > limit {
            return None;
        }
        let mut out = Vec::with_capacity(n);
        for r in &self.runs {
            let c = r.count.to_usize()?;
            out.extend(std::iter::repeat(r.letter).take(c));
        }
        Some(out)
    }

    /// Longest common prefix.
    pub fn common_prefix(&self, other: &Word) -> Word {
        let mut out = Word::empty();
        for (a, b) in self.runs.iter().zip(&other.runs) {
            if a.letter != b.letter {
                break;
            }
            if a.count == b.count {
                out.runs.push(a.clone());
                continue;
            }
            let c = if a.count < b.count { a.count.clone() } else { b.count.clone() };
            out.runs.push(Run { letter: a.letter, count: c });
            break;
        }
        out
    }

    /// The suffix after `prefix`, or `None` if `prefix` is not a prefix.
    pub fn strip_prefix(&self, prefix: &Word) -> Option<Word> {
        let k = prefix.runs.len();
        if k == 0 {
            return Some(self.clone());
        }
        if self.runs.len() < k || self.runs[..k - 1] != prefix.runs[..k - 1] {
            return None;
        }
        let (a, p) = (&self.runs[k - 1], &prefix.runs[k - 1]);
        if a.letter != p.letter || a.count < p.count {
            return None;
        }
        let mut out = Word::empty();
        out.push_run(a.letter, Arc::new(a.count.as_ref() - p.count.as_ref()));
        for r in &self.runs[k..] {
            out.push_run(r.letter, r.count.clone());
        }
        Some(out)
    }

    pub fn is_prefix_of(&self, other: &Word) -> bool {
        other.strip_prefix(self).is_some()
    }

    /// W-blocks as (head, cumulative length at the end of the block).
    pub fn block_ends(&self) -> Vec<(usize, BigUint)> {
        let mut out: Vec<(usize, BigUint)> = Vec::new();
        let mut total = BigUint::zero();
        for r in &self.runs {
            total += r.count.as_ref();
            match out.last_mut() {
                Some((head, end)) if r.letter <= *head => *end = total.clone(),
                _ => out.push((r.letter, total.clone())),
            }
        }
        out
    }

    /// Lexicographic comparison of the first `len` letters of two words.
    pub fn lex_cmp_prefix(&self, other: &Word, len: &BigUint) -> Ordering {
        let (mut i, mut j) = (0usize, 0usize);
        let (mut used_a, mut used_b) = (BigUint::zero(), BigUint::zero());
        let mut pos = BigUint::zero();
        while &pos < len {
            let (Some(a), Some(b)) = (self.runs.get(i), other.runs.get(j)) else {
                return Ordering::Equal;
            };
            if a.letter != b.letter {
                return a.letter.cmp(&b.letter);
            }
            let ra = a.count.as_ref() - &used_a;
            let rb = b.count.as_ref() - &used_b;
            let step = ra.clone().min(rb.clone());
            pos += &step;
            if step == ra {
                i += 1;
                used_a = BigUint::zero();
            } else {
                used_a += &step;
            }
            if step == rb {
                j += 1;
                used_b = BigUint::zero();
            } else {
                used_b += &step;
            }
        }
        Ordering::Equal
    }
}

/// Compares prefixes `a[..la]` and `b[..lb]` in the order ≺.
pub fn cmp_prefixes(a: &Word, la: &BigUint, b: &Word, lb: &BigUint) -> Ordering {
    la.cmp(lb).then_with(|| a.lex_cmp_prefix(b, la))
}

impl Ord for Word {
    fn cmp(&self, other: &Self) -> Ordering {
        let (la, lb) = (self.len(), other.len());
        cmp_prefixes(self, &la, other, &lb)
    }
}

impl PartialOrd for Word {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Word {
    /// Runs of length one print as the letter, longer runs as `letter^count`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .runs
            .iter()
            .map(|r| if r.count.is_one() { r.letter.to_string() } else { format!("{}^{}", r.letter, r.count) })
            .collect();
        write!(f, "({})", parts.join(" "))
    }
}

/// Persistent concatenation tree with cached length.
#[derive(Clone, Debug)]
pub struct Rope(Arc<RopeNode>);

#[derive(Debug)]
enum RopeNode {
    Leaf(Word, BigUint),
    Cat(Vec<Rope>, BigUint),
}

impl Rope {
    pub fn empty() -> Self {
        Rope(Arc::new(RopeNode::Leaf(Word::empty(), BigUint::zero())))
    }

    pub fn leaf(w: Word) -> Self {
        let n = w.len();
        Rope(Arc::new(RopeNode::Leaf(w, n)))
    }

    pub fn concat(parts: Vec<Rope>) -> Self {
        let parts: Vec<Rope> = parts.into_iter().filter(|p| !p.len().is_zero()).collect();
        if parts.len() == 1 {
            return parts.into_iter().next().expect("one part");
        }
        let n = parts.iter().map(|p| p.len()).sum();
        Rope(Arc::new(RopeNode::Cat(parts, n)))
    }

    pub fn len(&self) -> &BigUint {
        match self.0.as_ref() {
            RopeNode::Leaf(_, n) | RopeNode::Cat(_, n) => n,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len().is_zero()
    }

    /// Flattens into a word without recursion.
    pub fn to_word(&self) -> Word {
        let mut out = Word::empty();
        let mut stack: Vec<&Rope> = vec![self];
        while let Some(r) = stack.pop() {
            match r.0.as_ref() {
                RopeNode::Leaf(w, _) => out.append(w),
                RopeNode::Cat(parts, _) => stack.extend(parts.iter().rev()),
            }
        }
        out
    }
}

impl Drop for RopeNode {
    /// Releases deep ropes without recursion.
    fn drop(&mut self) {
        let RopeNode::Cat(parts, _) = self else { return };
        let mut stack = std::mem::take(parts);
        while let Some(Rope(arc)) = stack.pop() {
            if let Ok(mut node) = Arc::try_unwrap(arc) {
                if let RopeNode::Cat(inner, _) = &mut node {
                    stack.append(inner);
                }
            }
        }
    }
}
