//! Permutations in one-line notation: pattern containment, intervals and
//! simplicity, inflation and substitution decomposition, separability, the
//! exceptional family, and the encoding as bichains.
//!
//! Values are 1-based; the empty permutation is allowed everywhere.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use thiserror::Error;

use crate::structure::{FiniteStructure, Kind};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum PermError {
    #[error("values are not a permutation of 1..={n}")]
    NotBijection { n: usize },
    #[error("cannot parse {0:?} as a permutation entry")]
    BadToken(String),
    #[error("inflation: quotient has length {expected}, got {got} blocks")]
    BlockCount { expected: usize, got: usize },
    #[error("inflation: block {index} is empty")]
    EmptyBlock { index: usize },
    #[error("exceptional permutations need m >= 2, got {0}")]
    ExceptionalTooSmall(usize),
    #[error("structure is not a bichain: {0}")]
    NotABichain(&'static str),
}

/// A permutation of {1..n} in one-line notation.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Permutation {
    values: Vec<usize>,
}

impl Permutation {
    pub fn new(values: Vec<usize>) -> Result<Self, PermError> {
        let n = values.len();
        let mut seen = vec![false; n];
        for &v in &values {
            if v == 0 || v > n || seen[v - 1] {
                return Err(PermError::NotBijection { n });
            }
            seen[v - 1] = true;
        }
        Ok(Permutation { values })
    }

    pub fn empty() -> Self {
        Permutation { values: Vec::new() }
    }

    pub fn identity(n: usize) -> Self {
        Permutation {
            values: (1..=n).collect(),
        }
    }

    /// The permutation with the same relative order as `values` (all distinct).
    pub fn pattern_of(values: &[usize]) -> Self {
        let mut order: Vec<usize> = (0..values.len()).collect();
        order.sort_unstable_by_key(|&i| values[i]);
        let mut out = vec![0; values.len()];
        for (rank, &i) in order.iter().enumerate() {
            out[i] = rank + 1;
        }
        Permutation { values: out }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[usize] {
        &self.values
    }

    /// Removes position `i` (0-based) and renormalizes the values.
    pub fn delete_point(&self, i: usize) -> Permutation {
        let rest: Vec<usize> = self
            .values
            .iter()
            .enumerate()
            .filter(|&(j, _)| j != i)
            .map(|(_, &v)| v)
            .collect();
        Permutation::pattern_of(&rest)
    }

    /// True iff some subsequence of `self` has the same relative order as
    /// `pattern`.
    pub fn contains(&self, pattern: &Permutation) -> bool {
        fn extend(text: &[usize], pat: &[usize], chosen: &mut Vec<usize>) -> bool {
            let q = chosen.len();
            if q == pat.len() {
                return true;
            }
            let start = chosen.last().map_or(0, |&p| p + 1);
            // enough positions must remain for the rest of the pattern
            for t in start..=text.len().saturating_sub(pat.len() - q) {
                if t >= text.len() {
                    break;
                }
                let fits = chosen
                    .iter()
                    .enumerate()
                    .all(|(u, &pu)| (pat[u] < pat[q]) == (text[pu] < text[t]));
                if fits {
                    chosen.push(t);
                    if extend(text, pat, chosen) {
                        return true;
                    }
                    chosen.pop();
                }
            }
            false
        }
        if pattern.len() > self.len() {
            return false;
        }
        extend(&self.values, &pattern.values, &mut Vec::new())
    }

    /// All index intervals, as 0-based half-open ranges (start, end), whose
    /// image is an interval of values. Includes the trivial ones: (0, 0)
    /// stands for the empty interval, every singleton, and the whole line.
    pub fn intervals(&self) -> Vec<(usize, usize)> {
        let n = self.len();
        let mut out = vec![(0, 0)];
        for i in 0..n {
            let (mut lo, mut hi) = (self.values[i], self.values[i]);
            out.push((i, i + 1));
            for j in i + 1..n {
                lo = lo.min(self.values[j]);
                hi = hi.max(self.values[j]);
                if hi - lo == j - i {
                    out.push((i, j + 1));
                }
            }
        }
        out.sort_unstable();
        out
    }

    /// True iff every interval is trivial.
    pub fn is_simple(&self) -> bool {
        let n = self.len();
        for i in 0..n {
            let (mut lo, mut hi) = (self.values[i], self.values[i]);
            for j in i + 1..n {
                lo = lo.min(self.values[j]);
                hi = hi.max(self.values[j]);
                let len = j - i + 1;
                if len < n && hi - lo == len - 1 {
                    return false;
                }
            }
        }
        true
    }

    /// Replaces each point i of `self` by a value interval shaped like
    /// `blocks[i]`.
    pub fn inflate(&self, blocks: &[Permutation]) -> Result<Permutation, PermError> {
        if blocks.len() != self.len() {
            return Err(PermError::BlockCount {
                expected: self.len(),
                got: blocks.len(),
            });
        }
        if let Some(index) = blocks.iter().position(Permutation::is_empty) {
            return Err(PermError::EmptyBlock { index });
        }
        let offsets: Vec<usize> = (0..self.len())
            .map(|i| {
                (0..self.len())
                    .filter(|&j| self.values[j] < self.values[i])
                    .map(|j| blocks[j].len())
                    .sum()
            })
            .collect();
        let mut values = Vec::with_capacity(blocks.iter().map(Permutation::len).sum());
        for (i, block) in blocks.iter().enumerate() {
            values.extend(block.values.iter().map(|v| v + offsets[i]));
        }
        Ok(Permutation { values })
    }

    /// The canonical substitution decomposition tree.
    pub fn decompose(&self) -> DecompositionTree {
        assert!(!self.is_empty(), "cannot decompose the empty permutation");
        decompose_slice(&self.values)
    }

    /// True iff `self` is built from singletons by direct and skew sums,
    /// equivalently contains neither 2413 nor 3142.
    pub fn is_separable(&self) -> bool {
        separable_slice(&self.values)
    }

    /// The bichain on positions 0..n-1: intrinsic order is the position
    /// order, the relation puts x before y when the value at x is smaller.
    pub fn to_bichain(&self) -> FiniteStructure {
        let n = self.len();
        let rows: Vec<u64> = (0..n)
            .map(|x| {
                (0..n)
                    .filter(|&y| self.values[x] <= self.values[y])
                    .fold(0u64, |acc, y| acc | 1 << y)
            })
            .collect();
        FiniteStructure::from_bit_rows(n, 1, true, Kind::Bichain, vec![rows])
            .expect("a permutation always yields a valid bichain")
    }

    /// Inverse of [`to_bichain`](Self::to_bichain): reads the permutation off
    /// any ordered single-relation structure whose relation is a total order.
    pub fn from_bichain(r: &FiniteStructure) -> Result<Permutation, PermError> {
        if !r.ordered() {
            return Err(PermError::NotABichain("structure is unordered"));
        }
        if r.k() != 1 {
            return Err(PermError::NotABichain("structure has more than one relation"));
        }
        if !r.is_total_order(0) {
            return Err(PermError::NotABichain("relation is not a total order"));
        }
        let values: Vec<usize> = (0..r.n())
            .map(|x| (0..r.n()).filter(|&y| r.get(0, y, x)).count())
            .collect();
        Ok(Permutation { values })
    }
}

/// Counts simple permutations of length n by exhaustive enumeration, pruning
/// every prefix that already closed a nontrivial interval.
pub fn count_simple(n: usize) -> u64 {
    if n == 0 {
        return 1;
    }
    (1..=n)
        .into_par_iter()
        .map(|first| {
            let mut buf = vec![first];
            let mut remaining: Vec<usize> = (1..=n).filter(|&v| v != first).collect();
            count_simple_rec(&mut buf, &mut remaining, n)
        })
        .sum()
}

fn count_simple_rec(buf: &mut Vec<usize>, remaining: &mut Vec<usize>, n: usize) -> u64 {
    if !prefix_still_simple(buf, n) {
        return 0;
    }
    if remaining.is_empty() {
        return 1;
    }
    let mut total = 0;
    for i in 0..remaining.len() {
        let v = remaining.remove(i);
        buf.push(v);
        total += count_simple_rec(buf, remaining, n);
        buf.pop();
        remaining.insert(i, v);
    }
    total
}

/// Checks only the windows ending at the last pushed position; earlier
/// windows were checked when their own endpoint was pushed.
fn prefix_still_simple(buf: &[usize], n: usize) -> bool {
    let p = buf.len();
    let (mut lo, mut hi) = (buf[p - 1], buf[p - 1]);
    for i in (0..p - 1).rev() {
        lo = lo.min(buf[i]);
        hi = hi.max(buf[i]);
        if (i > 0 || p < n) && hi - lo == p - i - 1 {
            return false;
        }
    }
    true
}

fn separable_slice(v: &[usize]) -> bool {
    if v.len() <= 1 {
        return true;
    }
    if let Some(p) = sum_split(v, false).or_else(|| sum_split(v, true)) {
        separable_slice(&v[..p]) && separable_slice(&v[p..])
    } else {
        false
    }
}

/// The smallest proper prefix length where the line splits as a direct sum
/// (prefix below suffix) or, with `skew`, a skew sum (prefix above suffix).
/// Works on raw value slices, so the recursion never renormalizes.
fn sum_split(v: &[usize], skew: bool) -> Option<usize> {
    let n = v.len();
    if n < 2 {
        return None;
    }
    let mut suf_min = vec![usize::MAX; n + 1];
    let mut suf_max = vec![0; n + 1];
    for i in (0..n).rev() {
        suf_min[i] = suf_min[i + 1].min(v[i]);
        suf_max[i] = suf_max[i + 1].max(v[i]);
    }
    let mut hi = 0;
    let mut lo = usize::MAX;
    for p in 1..n {
        hi = hi.max(v[p - 1]);
        lo = lo.min(v[p - 1]);
        if !skew && hi < suf_min[p] {
            return Some(p);
        }
        if skew && lo > suf_max[p] {
            return Some(p);
        }
    }
    None
}

fn decompose_slice(v: &[usize]) -> DecompositionTree {
    let n = v.len();
    if n == 1 {
        return DecompositionTree {
            quotient: Permutation::identity(1),
            blocks: Vec::new(),
        };
    }
    // minimal first block keeps the quotient-2 trees on a right spine
    if let Some(p) = sum_split(v, false) {
        return two_block_tree(Permutation::new(vec![1, 2]).unwrap(), v, p);
    }
    if let Some(p) = sum_split(v, true) {
        return two_block_tree(Permutation::new(vec![2, 1]).unwrap(), v, p);
    }
    // no sum split: the maximal proper intervals are pairwise disjoint and
    // the quotient they induce is simple of length >= 4
    let spans = maximal_proper_spans(v);
    let reps: Vec<usize> = spans.iter().map(|&(i, _)| v[i]).collect();
    let quotient = Permutation::pattern_of(&reps);
    debug_assert!(quotient.len() >= 4 && quotient.is_simple());
    let blocks = spans
        .iter()
        .map(|&(i, j)| decompose_slice(&v[i..j]))
        .collect();
    DecompositionTree { quotient, blocks }
}

fn two_block_tree(quotient: Permutation, v: &[usize], p: usize) -> DecompositionTree {
    let left = Permutation::pattern_of(&v[..p]);
    let right = Permutation::pattern_of(&v[p..]);
    DecompositionTree {
        quotient,
        blocks: vec![left.decompose(), right.decompose()],
    }
}

fn maximal_proper_spans(v: &[usize]) -> Vec<(usize, usize)> {
    let n = v.len();
    let mut spans = Vec::new();
    let mut next = 0;
    while next < n {
        // widest value-interval window starting at next, excluding the whole
        let mut best = next + 1;
        let (mut lo, mut hi) = (v[next], v[next]);
        for j in next + 1..n {
            lo = lo.min(v[j]);
            hi = hi.max(v[j]);
            let len = j - next + 1;
            if len < n && hi - lo == len - 1 {
                best = j + 1;
            }
        }
        spans.push((next, best));
        next = best;
    }
    spans
}

/// A substitution decomposition tree. Leaves are single points; every
/// internal quotient is simple of length at least 4, or has length 2 with a
/// first block that the same sum direction cannot split further.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct DecompositionTree {
    quotient: Permutation,
    blocks: Vec<DecompositionTree>,
}

impl DecompositionTree {
    pub fn quotient(&self) -> &Permutation {
        &self.quotient
    }

    pub fn blocks(&self) -> &[DecompositionTree] {
        &self.blocks
    }

    pub fn is_leaf(&self) -> bool {
        self.blocks.is_empty()
    }

    /// Rebuilds the permutation the tree was made from.
    pub fn reinflate(&self) -> Permutation {
        if self.is_leaf() {
            return self.quotient.clone();
        }
        let parts: Vec<Permutation> = self.blocks.iter().map(Self::reinflate).collect();
        self.quotient
            .inflate(&parts)
            .expect("a decomposition tree reinflates")
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum ExceptionalVariant {
    I,
    II,
    III,
    IV,
}

impl ExceptionalVariant {
    pub const ALL: [ExceptionalVariant; 4] = [
        ExceptionalVariant::I,
        ExceptionalVariant::II,
        ExceptionalVariant::III,
        ExceptionalVariant::IV,
    ];

    pub fn tag(self) -> &'static str {
        match self {
            ExceptionalVariant::I => "i",
            ExceptionalVariant::II => "ii",
            ExceptionalVariant::III => "iii",
            ExceptionalVariant::IV => "iv",
        }
    }

    pub fn from_tag(tag: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|v| v.tag() == tag)
    }
}

/// The exceptional permutation of length 2m of the given variant: the four
/// families whose members stay simple only as long as no point is deleted.
pub fn exceptional(m: usize, variant: ExceptionalVariant) -> Result<Permutation, PermError> {
    if m < 2 {
        return Err(PermError::ExceptionalTooSmall(m));
    }
    let values = match variant {
        // 2 4 6 .. 2m 1 3 5 .. 2m-1
        ExceptionalVariant::I => (1..=m).map(|i| 2 * i).chain((1..=m).map(|i| 2 * i - 1)).collect(),
        // 2m-1 2m-3 .. 1 2m 2m-2 .. 2
        ExceptionalVariant::II => (1..=m)
            .map(|i| 2 * (m - i) + 1)
            .chain((1..=m).map(|i| 2 * (m - i + 1)))
            .collect(),
        // m+1 1 m+2 2 .. 2m m
        ExceptionalVariant::III => (1..=m).flat_map(|i| [m + i, i]).collect(),
        // m 2m m-1 2m-1 .. 1 m+1
        ExceptionalVariant::IV => (1..=m).flat_map(|i| [m - i + 1, 2 * m - i + 1]).collect(),
    };
    Permutation::new(values)
}

impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.len() <= 9 {
            for v in &self.values {
                write!(f, "{v}")?;
            }
        } else {
            for (i, v) in self.values.iter().enumerate() {
                if i > 0 {
                    f.write_str(",")?;
                }
                write!(f, "{v}")?;
            }
        }
        Ok(())
    }
}

impl FromStr for Permutation {
    type Err = PermError;

    fn from_str(s: &str) -> Result<Self, PermError> {
        let s = s.trim();
        if s.is_empty() {
            return Ok(Permutation::empty());
        }
        let values: Vec<usize> = if s.contains(',') {
            s.split(',')
                .map(|t| t.trim().parse().map_err(|_| PermError::BadToken(t.into())))
                .collect::<Result<_, _>>()?
        } else {
            s.chars()
                .map(|c| {
                    c.to_digit(10)
                        .filter(|&d| d > 0)
                        .map(|d| d as usize)
                        .ok_or_else(|| PermError::BadToken(c.to_string()))
                })
                .collect::<Result<_, _>>()?
        };
        Permutation::new(values)
    }
}
