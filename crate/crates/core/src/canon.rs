//! Canonical codes.
//!
//! Two structures receive equal codes exactly when they are isomorphic. For
//! ordered structures the only candidate map is the identity, so the code is
//! the row-major serialization of all tables. For unordered structures the
//! code is the lexicographically minimal serialization over all vertex
//! orderings, found by branch-and-bound over a growing vertex prefix with
//! twin-class pruning. Minimization is exact; no heuristic shortcut is taken.

use crate::structure::FiniteStructure;

/// Canonical byte code of a structure. Equal codes mean isomorphic
/// structures; the kind tag does not participate.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct CanonicalCode(Vec<u8>);

impl CanonicalCode {
    pub fn as_bytes(&self) -> &[u8] {
        &self.0
    }
}

/// Computes the canonical code of `r`.
pub fn canonical_code(r: &FiniteStructure) -> CanonicalCode {
    let (n, k) = (r.n(), r.k());
    let mut sink = BitSink::with_header(r);
    if r.ordered() {
        for i in 0..k {
            for x in 0..n {
                for y in 0..n {
                    sink.push(r.get(i, x, y));
                }
            }
        }
    } else if k == 1 {
        emit_levels::<u128>(r, &mut sink);
    } else {
        emit_levels::<Vec<u128>>(r, &mut sink);
    }
    CanonicalCode(sink.into_bytes())
}

struct BitSink {
    bytes: Vec<u8>,
    cur: u8,
    fill: u8,
}

impl BitSink {
    fn with_header(r: &FiniteStructure) -> Self {
        BitSink {
            bytes: vec![r.n() as u8, r.k() as u8, r.ordered() as u8],
            cur: 0,
            fill: 0,
        }
    }

    fn push(&mut self, bit: bool) {
        self.cur = self.cur << 1 | bit as u8;
        self.fill += 1;
        if self.fill == 8 {
            self.bytes.push(self.cur);
            self.cur = 0;
            self.fill = 0;
        }
    }

    fn into_bytes(mut self) -> Vec<u8> {
        if self.fill > 0 {
            self.bytes.push(self.cur << (8 - self.fill));
        }
        self.bytes
    }
}

/// Per-level serialization segment. At level m (prefix p[0..m] fixed, vertex
/// v appended) the segment holds, per relation, the 2m+1 bits
/// rho(p[0], v), ..., rho(p[m-1], v), rho(v, v), rho(v, p[0]), ...,
/// rho(v, p[m-1]). All segments of one level have equal width, so comparing
/// them as integers is the lexicographic bit comparison.
trait Segment: Ord + Clone {
    fn compute(r: &FiniteStructure, prefix: &[usize], v: usize) -> Self;
    fn emit(&self, level: usize, k: usize, sink: &mut BitSink);
}

fn relation_segment(r: &FiniteStructure, i: usize, prefix: &[usize], v: usize) -> u128 {
    let mut acc = 0u128;
    for &p in prefix {
        acc = acc << 1 | r.get(i, p, v) as u128;
    }
    acc = acc << 1 | r.get(i, v, v) as u128;
    for &p in prefix {
        acc = acc << 1 | r.get(i, v, p) as u128;
    }
    acc
}

impl Segment for u128 {
    fn compute(r: &FiniteStructure, prefix: &[usize], v: usize) -> u128 {
        relation_segment(r, 0, prefix, v)
    }

    fn emit(&self, level: usize, _k: usize, sink: &mut BitSink) {
        let width = 2 * level + 1;
        for b in (0..width).rev() {
            sink.push(self >> b & 1 == 1);
        }
    }
}

impl Segment for Vec<u128> {
    fn compute(r: &FiniteStructure, prefix: &[usize], v: usize) -> Vec<u128> {
        (0..r.k())
            .map(|i| relation_segment(r, i, prefix, v))
            .collect()
    }

    fn emit(&self, level: usize, k: usize, sink: &mut BitSink) {
        debug_assert_eq!(self.len(), k);
        let width = 2 * level + 1;
        for seg in self {
            for b in (0..width).rev() {
                sink.push(seg >> b & 1 == 1);
            }
        }
    }
}

fn emit_levels<S: Segment>(r: &FiniteStructure, sink: &mut BitSink) {
    let best = minimize::<S>(r);
    for (level, seg) in best.iter().enumerate() {
        seg.emit(level, r.k(), sink);
    }
}

/// Vertices u, v are twins when the transposition (u v) is an automorphism:
/// equal diagonals, rho_i(u, v) = rho_i(v, u), and equal rows and columns
/// outside {u, v}, for every relation. Being conjugate automorphisms, twin
/// swaps compose, so this is an equivalence; one representative per class is
/// enough at every search level.
fn twin_classes(r: &FiniteStructure) -> Vec<usize> {
    let n = r.n();
    let mut class: Vec<usize> = (0..n).collect();
    for v in 1..n {
        for u in 0..v {
            if class[u] == u && are_twins(r, u, v) {
                class[v] = u;
                break;
            }
        }
    }
    class
}

fn are_twins(r: &FiniteStructure, u: usize, v: usize) -> bool {
    let pair = !(1u64 << u | 1u64 << v);
    for i in 0..r.k() {
        if r.get(i, u, u) != r.get(i, v, v) || r.get(i, u, v) != r.get(i, v, u) {
            return false;
        }
        if (r.row(i, u) ^ r.row(i, v)) & pair != 0 {
            return false;
        }
        for w in 0..r.n() {
            if w != u && w != v && r.get(i, w, u) != r.get(i, w, v) {
                return false;
            }
        }
    }
    true
}

struct Search<'a, S> {
    r: &'a FiniteStructure,
    twin: Vec<usize>,
    prefix: Vec<usize>,
    used: u64,
    best: Vec<S>,
}

/// Lexicographically minimal level segments over all vertex orderings.
fn minimize<S: Segment>(r: &FiniteStructure) -> Vec<S> {
    let n = r.n();
    if n == 0 {
        return Vec::new();
    }
    let mut search = Search {
        r,
        twin: twin_classes(r),
        prefix: Vec::with_capacity(n),
        used: 0,
        best: Vec::new(),
    };
    search.descend(false);
    search.best
}

impl<S: Segment> Search<'_, S> {
    /// `tight` means the current prefix produces exactly best[0..level].
    /// Candidates are sorted, so once one compares above best the rest do
    /// too. After the first subtree of a non-tight call completes, best
    /// matches our prefix again and the remaining siblings run tight.
    fn descend(&mut self, mut tight: bool) {
        let level = self.prefix.len();
        if level == self.r.n() {
            return;
        }
        let mut taken_roots = 0u64;
        let mut cands: Vec<(S, usize)> = Vec::new();
        for v in 0..self.r.n() {
            if self.used >> v & 1 == 1 || taken_roots >> self.twin[v] & 1 == 1 {
                continue;
            }
            taken_roots |= 1 << self.twin[v];
            cands.push((S::compute(self.r, &self.prefix, v), v));
        }
        cands.sort_unstable();

        for (seg, v) in cands {
            if tight {
                match seg.cmp(&self.best[level]) {
                    std::cmp::Ordering::Greater => break,
                    std::cmp::Ordering::Equal => {
                        self.place(v);
                        self.descend(true);
                        self.unplace(v);
                    }
                    std::cmp::Ordering::Less => {
                        self.best[level] = seg;
                        self.place(v);
                        self.descend(false);
                        self.unplace(v);
                    }
                }
            } else {
                if self.best.len() == level {
                    self.best.push(seg);
                } else {
                    self.best[level] = seg;
                }
                self.place(v);
                self.descend(false);
                self.unplace(v);
                tight = true;
            }
        }
    }

    fn place(&mut self, v: usize) {
        self.prefix.push(v);
        self.used |= 1 << v;
    }

    fn unplace(&mut self, v: usize) {
        self.prefix.pop();
        self.used &= !(1 << v);
    }
}
