//! Vertex equivalence and monomorphic decomposition.
//!
//! Two vertices are depth-k equivalent when swapping one for the other in any
//! k-point context leaves the restriction isomorphic. The classes of the
//! cumulative relation partition the structure into its coarsest monomorphic
//! blocks, and for the common kinds a fixed sweep depth is already exhaustive
//! (graphs 1, ordered binary 2, tournaments and loopless digraphs 3).
//! [`equivalence_classes`] exploits those thresholds and can re-verify them.
//!
//! The module also provides the four block notions on vertex subsets
//! ([`block_report`]), chainability tests, and structural witness oracles
//! that certify non-equivalence in tournaments and loopless digraphs by
//! exhibiting a small configuration instead of a failed sweep.

use std::fmt;

use rayon::prelude::*;
use thiserror::Error;

use crate::canon::{canonical_code, CanonicalCode};
use crate::families;
use crate::moddec;
use crate::structure::{FiniteStructure, Kind, StructureError};
use crate::util::{permutations, subsets_of_size};

#[derive(Debug, Error)]
pub enum MonomorphError {
    #[error("vertex arguments must be distinct, got {v} twice")]
    IdenticalVertices { v: usize },
    #[error("sweep size {requested} exceeds the {available} available vertices")]
    SweepTooDeep { requested: usize, available: usize },
    #[error("{op} requires {expected}, got {got:?}")]
    WrongKind {
        op: &'static str,
        expected: &'static str,
        got: Kind,
    },
    #[error("{op} requires an ordered structure")]
    UnorderedInput { op: &'static str },
    #[error(
        "classes at sweep depth {threshold} differ from the exhaustive ones: \
         {at_threshold:?} vs {exhaustive:?}"
    )]
    ThresholdViolation {
        threshold: usize,
        at_threshold: Vec<Vec<usize>>,
        exhaustive: Vec<Vec<usize>>,
    },
    #[error(transparent)]
    Structure(#[from] StructureError),
    #[error(transparent)]
    Family(#[from] families::FamilyError),
}

/// Sweep depths above this vertex count fan out across threads.
const SEQUENTIAL_LIMIT: usize = 16;

fn check_pair(r: &FiniteStructure, x: usize, y: usize) -> Result<(), MonomorphError> {
    let n = r.n();
    for v in [x, y] {
        if v >= n {
            return Err(StructureError::VertexOutOfRange { vertex: v, n }.into());
        }
    }
    if x == y {
        return Err(MonomorphError::IdenticalVertices { v: x });
    }
    Ok(())
}

/// Whether every k-subset F of the remaining vertices yields isomorphic
/// restrictions to F with x and to F with y.
pub fn k_equivalent(
    r: &FiniteStructure,
    x: usize,
    y: usize,
    k: usize,
) -> Result<bool, MonomorphError> {
    check_pair(r, x, y)?;
    let n = r.n();
    if k > n - 2 {
        return Err(MonomorphError::SweepTooDeep { requested: k, available: n - 2 });
    }
    let others: Vec<usize> = (0..n).filter(|&v| v != x && v != y).collect();
    let swap_preserves = |m: u64| {
        let mut fx = 1u64 << x;
        let mut fy = 1u64 << y;
        for (j, &v) in others.iter().enumerate() {
            if m >> j & 1 == 1 {
                fx |= 1 << v;
                fy |= 1 << v;
            }
        }
        canonical_code(&r.restrict_mask(fx)) == canonical_code(&r.restrict_mask(fy))
    };
    if others.len() <= SEQUENTIAL_LIMIT {
        Ok(subsets_of_size(others.len(), k).all(swap_preserves))
    } else {
        Ok(subsets_of_size(others.len(), k).par_bridge().all(swap_preserves))
    }
}

/// Depth-j equivalence for every j up to and including `k`.
pub fn equivalent_up_to(
    r: &FiniteStructure,
    x: usize,
    y: usize,
    k: usize,
) -> Result<bool, MonomorphError> {
    for j in 0..=k {
        if !k_equivalent(r, x, y, j)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Exhaustive equivalence: every context size up to n-2 is swept.
pub fn fully_equivalent(
    r: &FiniteStructure,
    x: usize,
    y: usize,
) -> Result<bool, MonomorphError> {
    check_pair(r, x, y)?;
    equivalent_up_to(r, x, y, r.n() - 2)
}

/// Sweep depth that is provably exhaustive for the given kind, capped at the
/// trivial bound n-2.
pub fn default_threshold(kind: Kind, n: usize) -> usize {
    let cap = n.saturating_sub(2);
    let t = match kind {
        Kind::Graph => 1,
        Kind::Bichain | Kind::OrderedBinary => 2,
        Kind::Tournament | Kind::Digraph => 3,
        Kind::Generic => cap,
    };
    t.min(cap)
}

/// Classes of the cumulative depth-k equivalence, each sorted, ordered by
/// their minimum. The pairwise relation is transitive, so pairs already
/// joined through a third vertex are skipped.
pub fn equivalence_classes_up_to(
    r: &FiniteStructure,
    k: usize,
) -> Result<Vec<Vec<usize>>, MonomorphError> {
    let n = r.n();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut [usize], mut v: usize) -> usize {
        while parent[v] != v {
            parent[v] = parent[parent[v]];
            v = parent[v];
        }
        v
    }
    for x in 0..n {
        for y in x + 1..n {
            if find(&mut parent, x) == find(&mut parent, y) {
                continue;
            }
            if equivalent_up_to(r, x, y, k)? {
                let (a, b) = (find(&mut parent, x), find(&mut parent, y));
                parent[a.max(b)] = a.min(b);
            }
        }
    }
    let mut classes: Vec<Vec<usize>> = vec![Vec::new(); n];
    for v in 0..n {
        let root = find(&mut parent, v);
        classes[root].push(v);
    }
    classes.retain(|c| !c.is_empty());
    Ok(classes)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EquivMode {
    /// Sweep only to the depth the kind guarantees exhaustive.
    Threshold,
    /// Additionally sweep to depth n-2 and fail loudly on any difference.
    Verify,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EquivLevel {
    AtMost(usize),
    Full,
}

/// Partition of the vertices into equivalence classes, together with the
/// sweep depth that produced it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EquivalenceResult {
    level: EquivLevel,
    classes: Vec<Vec<usize>>,
    threshold_used: usize,
}

impl EquivalenceResult {
    pub fn level(&self) -> EquivLevel {
        self.level
    }

    /// Sorted classes, ordered by their minimum vertex.
    pub fn classes(&self) -> &[Vec<usize>] {
        &self.classes
    }

    /// Number of blocks in the decomposition.
    pub fn dim_mon(&self) -> usize {
        self.classes.len()
    }

    pub fn threshold_used(&self) -> usize {
        self.threshold_used
    }
}

/// Partitions the vertices into monomorphic components via the kind's sweep
/// threshold. `Verify` mode recomputes the partition exhaustively and errors
/// if the threshold missed anything.
pub fn equivalence_classes(
    r: &FiniteStructure,
    mode: EquivMode,
) -> Result<EquivalenceResult, MonomorphError> {
    let cap = r.n().saturating_sub(2);
    let t = default_threshold(r.kind(), r.n());
    let classes = equivalence_classes_up_to(r, t)?;
    let level = if t == cap { EquivLevel::Full } else { EquivLevel::AtMost(t) };
    match mode {
        EquivMode::Threshold => Ok(EquivalenceResult { level, classes, threshold_used: t }),
        EquivMode::Verify => {
            if t < cap {
                let exhaustive = equivalence_classes_up_to(r, cap)?;
                if exhaustive != classes {
                    return Err(MonomorphError::ThresholdViolation {
                        threshold: t,
                        at_threshold: classes,
                        exhaustive,
                    });
                }
            }
            Ok(EquivalenceResult { level: EquivLevel::Full, classes, threshold_used: t })
        }
    }
}

/// Shape of one relation restricted to an equivalence class of an ordered
/// structure: classes are constant on increasing pairs, so a single pair
/// type describes the whole restriction.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ClassShape {
    /// Increasing pairs carry the arc forward: the relation is the index
    /// order (strict or reflexive) on the class.
    ChainCoinciding,
    /// Increasing pairs carry the arc backward.
    ChainOpposed,
    /// Every pair is joined both ways.
    Clique,
    /// No pair is joined.
    Antichain,
}

impl fmt::Display for ClassShape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ClassShape::ChainCoinciding => "chain-coinciding",
            ClassShape::ChainOpposed => "chain-opposed",
            ClassShape::Clique => "clique",
            ClassShape::Antichain => "antichain",
        })
    }
}

/// Per-relation shape of a class of an ordered structure, or `None` when the
/// input is unordered, the class has fewer than two vertices, or some
/// relation is not constant on its increasing pairs.
pub fn class_shapes(r: &FiniteStructure, class: &[usize]) -> Option<Vec<ClassShape>> {
    if !r.ordered() || class.len() < 2 || class.iter().any(|&v| v >= r.n()) {
        return None;
    }
    let mut sorted = class.to_vec();
    sorted.sort_unstable();
    (0..r.k())
        .map(|i| {
            let d0 = r.d(i, sorted[0], sorted[1]);
            for (a, &x) in sorted.iter().enumerate() {
                for &y in &sorted[a + 1..] {
                    if r.d(i, x, y) != d0 {
                        return None;
                    }
                }
            }
            Some(match d0 {
                (true, false) => ClassShape::ChainCoinciding,
                (false, true) => ClassShape::ChainOpposed,
                (true, true) => ClassShape::Clique,
                (false, false) => ClassShape::Antichain,
            })
        })
        .collect()
}

/// The four block notions evaluated on one vertex subset.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BlockReport {
    /// Restrictions with equal traces on the subset and identical remainders
    /// are isomorphic.
    pub monomorphic_block: bool,
    /// As above, via an isomorphism fixing everything outside the subset.
    pub strong_block: bool,
    /// Every partial isomorphism inside the subset extends by the identity
    /// to a partial isomorphism of the whole structure.
    pub fraisse_interval: bool,
    /// Fraisse interval whose restriction is monomorphic.
    pub fraisse_monomorphic: bool,
    /// Index interval that is a monomorphic block; `None` when unordered.
    pub interval_monomorphic: Option<bool>,
}

/// Evaluates all block notions on `a` by their quantifier definitions.
/// Exponential in n; intended for small structures.
pub fn block_report(r: &FiniteStructure, a: &[usize]) -> Result<BlockReport, MonomorphError> {
    let n = r.n();
    let mut set = a.to_vec();
    set.sort_unstable();
    set.dedup();
    if let Some(&v) = set.iter().find(|&&v| v >= n) {
        return Err(StructureError::VertexOutOfRange { vertex: v, n }.into());
    }
    let outside: Vec<usize> = (0..n).filter(|&v| !set.contains(&v)).collect();
    let monomorphic_block = is_monomorphic_block(r, &set, &outside);
    let strong_block = is_strong_block(r, &set, &outside);
    let fraisse_interval = is_fraisse_interval(r, &set, &outside);
    let fraisse_monomorphic = fraisse_interval && is_monomorphic_block(r, &set, &[]);
    let interval_monomorphic =
        r.ordered().then(|| is_index_interval(&set) && monomorphic_block);
    Ok(BlockReport {
        monomorphic_block,
        strong_block,
        fraisse_interval,
        fraisse_monomorphic,
        interval_monomorphic,
    })
}

fn is_index_interval(sorted: &[usize]) -> bool {
    match (sorted.first(), sorted.last()) {
        (Some(&lo), Some(&hi)) => hi - lo + 1 == sorted.len(),
        _ => true,
    }
}

fn vertex_mask(list: &[usize], bits: u64) -> u64 {
    list.iter()
        .enumerate()
        .filter(|(j, _)| bits >> j & 1 == 1)
        .fold(0u64, |acc, (_, &v)| acc | 1 << v)
}

fn members(list: &[usize], bits: u64) -> Vec<usize> {
    list.iter()
        .enumerate()
        .filter(|(j, _)| bits >> j & 1 == 1)
        .map(|(_, &v)| v)
        .collect()
}

fn is_monomorphic_block(r: &FiniteStructure, set: &[usize], outside: &[usize]) -> bool {
    for out_bits in 0..1u64 << outside.len() {
        let base = vertex_mask(outside, out_bits);
        let mut reference: Vec<Option<CanonicalCode>> = vec![None; set.len() + 1];
        for in_bits in 0..1u64 << set.len() {
            let size = in_bits.count_ones() as usize;
            let code = canonical_code(&r.restrict_mask(base | vertex_mask(set, in_bits)));
            match &reference[size] {
                None => reference[size] = Some(code),
                Some(c) if *c != code => return false,
                _ => {}
            }
        }
    }
    true
}

/// Checks that mapping `from[i]` to `img[i]` and fixing `fixed` pointwise
/// preserves every relation and, on ordered structures, relative position.
fn extension_preserves(
    r: &FiniteStructure,
    from: &[usize],
    img: &[usize],
    fixed: &[usize],
) -> bool {
    let pair_ok = |u: usize, v: usize, u2: usize, v2: usize| {
        if r.ordered() && u != v && (u < v) != (u2 < v2) {
            return false;
        }
        (0..r.k()).all(|i| r.get(i, u, v) == r.get(i, u2, v2))
    };
    for (a, (&u, &u2)) in from.iter().zip(img).enumerate() {
        if !pair_ok(u, u, u2, u2) {
            return false;
        }
        for (&v, &v2) in from[a + 1..].iter().zip(&img[a + 1..]) {
            if !pair_ok(u, v, u2, v2) || !pair_ok(v, u, v2, u2) {
                return false;
            }
        }
        for &w in fixed {
            if !pair_ok(u, w, u2, w) || !pair_ok(w, u, w, u2) {
                return false;
            }
        }
    }
    true
}

fn identity_extension_exists(
    r: &FiniteStructure,
    from: &[usize],
    to: &[usize],
    fixed: &[usize],
) -> bool {
    if r.ordered() {
        // an ordered isomorphism is forced to be the sorted-to-sorted map
        return extension_preserves(r, from, to, fixed);
    }
    permutations(from.len()).any(|p| {
        let img: Vec<usize> = p.iter().map(|&j| to[j]).collect();
        extension_preserves(r, from, &img, fixed)
    })
}

fn is_strong_block(r: &FiniteStructure, set: &[usize], outside: &[usize]) -> bool {
    for size in 1..=set.len() {
        let subs: Vec<Vec<usize>> =
            subsets_of_size(set.len(), size).map(|m| members(set, m)).collect();
        // identity-fixing isomorphisms compose, so one reference per size
        // suffices
        for other in &subs[1..] {
            if !identity_extension_exists(r, &subs[0], other, outside) {
                return false;
            }
        }
    }
    true
}

fn is_fraisse_interval(r: &FiniteStructure, set: &[usize], outside: &[usize]) -> bool {
    let subsets: Vec<Vec<usize>> =
        (0..1u64 << set.len()).map(|bits| members(set, bits)).collect();
    for a1 in &subsets {
        for a2 in &subsets {
            if a1.len() != a2.len() || a1.is_empty() {
                continue;
            }
            if r.ordered() {
                if extension_preserves(r, a1, a2, &[]) && !extension_preserves(r, a1, a2, outside)
                {
                    return false;
                }
            } else {
                let escapes = permutations(a1.len()).any(|p| {
                    let img: Vec<usize> = p.iter().map(|&j| a2[j]).collect();
                    extension_preserves(r, a1, &img, &[])
                        && !extension_preserves(r, a1, &img, outside)
                });
                if escapes {
                    return false;
                }
            }
        }
    }
    true
}

/// Whether all p-element restrictions are pairwise isomorphic.
pub fn is_p_monomorphic(r: &FiniteStructure, p: usize) -> Result<bool, MonomorphError> {
    let n = r.n();
    if p > n {
        return Err(MonomorphError::SweepTooDeep { requested: p, available: n });
    }
    let mut it = subsets_of_size(n, p);
    let first = match it.next() {
        Some(m) => canonical_code(&r.restrict_mask(m)),
        None => return Ok(true),
    };
    Ok(it.all(|m| canonical_code(&r.restrict_mask(m)) == first))
}

/// p-monomorphy for every size from 1 up to `p`.
pub fn is_monomorphic_up_to(r: &FiniteStructure, p: usize) -> Result<bool, MonomorphError> {
    for q in 1..=p {
        if !is_p_monomorphic(r, q)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Whether the structure is chained by its own index order: each relation is
/// constant on the diagonal and constant on increasing pairs. Equivalent to
/// being monomorphic up to size 2.
pub fn is_chainable_ordered(r: &FiniteStructure) -> Result<bool, MonomorphError> {
    if !r.ordered() {
        return Err(MonomorphError::UnorderedInput { op: "is_chainable_ordered" });
    }
    let n = r.n();
    Ok((0..r.k()).all(|i| {
        if (1..n).any(|x| r.get(i, x, x) != r.get(i, 0, 0)) {
            return false;
        }
        if n < 2 {
            return true;
        }
        let d0 = r.d(i, 0, 1);
        (0..n).all(|x| (x + 1..n).all(|y| r.d(i, x, y) == d0))
    }))
}

/// Searches for a vertex order under which every relation is diagonal
/// constant and constant on increasing pairs. Complete without enumerating
/// orders: any non-constant relation pins the candidate chain up to
/// reversal.
pub fn find_chaining_order(r: &FiniteStructure) -> Option<Vec<usize>> {
    moddec::chainable_order(r)
}

/// Configuration certifying that two tournament vertices are inequivalent.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TournamentWitness {
    /// {x, y, u, v} induces the strong 4-tournament, two 3-cycles sharing an
    /// arc, and the pair lies on exactly one of them.
    SharedArcCycles { u: usize, v: usize },
    /// {x, y, u, v} induces a diamond (3-cycle plus an apex beating or
    /// beaten by all of it) and the pair is not inside the 3-cycle.
    DiamondBorder { u: usize, v: usize },
    /// A 3-cycle sits strictly between the pair: one end beats the cycle,
    /// the cycle beats the other end, and the ends' own arc agrees.
    CycleBetweenEnds { cycle: [usize; 3] },
    /// The pair's arc closes a 3-cycle through every vertex of a 3-cycle
    /// disjoint from it.
    CycleFan { cycle: [usize; 3] },
}

/// Searches a tournament for a configuration proving x and y inequivalent.
/// Absence of a witness certifies equivalence; the four-vertex cases refute
/// depth-2 equivalence, the five-vertex cases depth 3.
pub fn tournament_witness(
    t: &FiniteStructure,
    x: usize,
    y: usize,
) -> Result<Option<TournamentWitness>, MonomorphError> {
    if t.kind() != Kind::Tournament {
        return Err(MonomorphError::WrongKind {
            op: "tournament_witness",
            expected: "a tournament",
            got: t.kind(),
        });
    }
    check_pair(t, x, y)?;
    let n = t.n();
    let arc = |u: usize, v: usize| t.get(0, u, v);
    let cyclic = |a: usize, b: usize, c: usize| {
        (arc(a, b) && arc(b, c) && arc(c, a)) || (arc(a, c) && arc(c, b) && arc(b, a))
    };
    let others: Vec<usize> = (0..n).filter(|&v| v != x && v != y).collect();

    for (i, &u) in others.iter().enumerate() {
        for &v in &others[i + 1..] {
            let quad = [x, y, u, v];
            let mut cycles: Vec<[usize; 3]> = Vec::new();
            for a in 0..4 {
                for b in a + 1..4 {
                    for c in b + 1..4 {
                        if cyclic(quad[a], quad[b], quad[c]) {
                            cycles.push([quad[a], quad[b], quad[c]]);
                        }
                    }
                }
            }
            let through_pair = cycles
                .iter()
                .filter(|c| c.contains(&x) && c.contains(&y))
                .count();
            match cycles.len() {
                2 if through_pair == 1 => {
                    return Ok(Some(TournamentWitness::SharedArcCycles { u, v }));
                }
                1 if through_pair == 0 => {
                    return Ok(Some(TournamentWitness::DiamondBorder { u, v }));
                }
                _ => {}
            }
        }
    }

    for (i, &a) in others.iter().enumerate() {
        for (j, &b) in others.iter().enumerate().skip(i + 1) {
            for &c in &others[j + 1..] {
                if !cyclic(a, b, c) {
                    continue;
                }
                let beats_all = |p: usize| arc(p, a) && arc(p, b) && arc(p, c);
                let beaten_by_all = |p: usize| arc(a, p) && arc(b, p) && arc(c, p);
                if (arc(x, y) && beats_all(x) && beaten_by_all(y))
                    || (arc(y, x) && beats_all(y) && beaten_by_all(x))
                {
                    return Ok(Some(TournamentWitness::CycleBetweenEnds { cycle: [a, b, c] }));
                }
                if (arc(x, y) && beats_all(y) && beaten_by_all(x))
                    || (arc(y, x) && beats_all(x) && beaten_by_all(y))
                {
                    return Ok(Some(TournamentWitness::CycleFan { cycle: [a, b, c] }));
                }
            }
        }
    }
    Ok(None)
}

/// Configuration certifying that two vertices of a loopless digraph are
/// inequivalent. Squares refute depth 2, the five-vertex shapes depth 3.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DigraphWitness {
    /// z is joined to x and to y by different pair kinds (none, one-way,
    /// two-way).
    PairKind { z: usize },
    /// The pair is a diagonal of a directed 4-circuit whose other diagonal
    /// {z, t} is one-way.
    CircuitSquare { z: usize, t: usize },
    /// One-way path through z plus a vertex t joined two-way to both ends,
    /// with {z, t} not two-way.
    SymmetricSquare { z: usize, t: usize },
    /// One-way path through z plus a vertex t joined to neither end, with
    /// {z, t} not disjoint.
    EmptySquare { z: usize, t: usize },
    /// Two internally disjoint one-way paths from one end to the other,
    /// through z and t, with {z, t} not one-way.
    ParallelSquare { z: usize, t: usize },
    /// One-way path through z plus a common one-way successor t of both
    /// ends. Any diagonal {z, t} separates except the lone arc from z to t;
    /// the others leave a 3-circuit on one side of the square only.
    CommonSinkSquare { z: usize, t: usize },
    /// Mirror of the sink square: t is a common one-way predecessor and the
    /// excluded diagonal is the lone arc from t to z.
    CommonSourceSquare { z: usize, t: usize },
    /// A directed 3-circuit joined one-way to both ends, towards one and
    /// away from the other.
    OpposedDiamonds { cycle: [usize; 3] },
    /// Two directed 4-circuits through the pair sharing the return vertex t,
    /// middles {z, u} one-way, both {z, t} and {u, t} not one-way.
    Prism { z: usize, t: usize, u: usize },
}

/// Searches a loopless single-relation structure for a configuration proving
/// x and y inequivalent. Checks the cheapest depth first, so the returned
/// case identifies the least sweep depth that separates the pair.
pub fn digraph_witness(
    g: &FiniteStructure,
    x: usize,
    y: usize,
) -> Result<Option<DigraphWitness>, MonomorphError> {
    match g.kind() {
        Kind::Graph | Kind::Tournament | Kind::Digraph => {}
        got => {
            return Err(MonomorphError::WrongKind {
                op: "digraph_witness",
                expected: "a loopless single-relation structure",
                got,
            });
        }
    }
    check_pair(g, x, y)?;
    let n = g.n();
    let d = |u: usize, v: usize| g.d(0, u, v);
    let category = |p: (bool, bool)| match p {
        (false, false) => 0u8,
        (true, true) => 2,
        _ => 1,
    };
    let fwd = (true, false);
    let others: Vec<usize> = (0..n).filter(|&v| v != x && v != y).collect();

    if let Some(&z) = others.iter().find(|&&z| category(d(x, z)) != category(d(y, z))) {
        return Ok(Some(DigraphWitness::PairKind { z }));
    }

    for (p, q) in [(x, y), (y, x)] {
        for &z in &others {
            if d(p, z) != fwd || d(z, q) != fwd {
                continue;
            }
            for &t in &others {
                if t == z {
                    continue;
                }
                if d(q, t) == fwd && d(t, p) == fwd && category(d(z, t)) == 1 {
                    return Ok(Some(DigraphWitness::CircuitSquare { z, t }));
                }
                if d(q, t) == (true, true) && d(t, p) == (true, true) && d(z, t) != (true, true)
                {
                    return Ok(Some(DigraphWitness::SymmetricSquare { z, t }));
                }
                if d(q, t) == (false, false)
                    && d(t, p) == (false, false)
                    && d(z, t) != (false, false)
                {
                    return Ok(Some(DigraphWitness::EmptySquare { z, t }));
                }
                if d(q, t) == (false, true) && d(t, p) == (false, true) && category(d(z, t)) != 1
                {
                    return Ok(Some(DigraphWitness::ParallelSquare { z, t }));
                }
                if d(q, t) == fwd && d(p, t) == fwd && d(z, t) != fwd {
                    return Ok(Some(DigraphWitness::CommonSinkSquare { z, t }));
                }
                if d(t, q) == fwd && d(t, p) == fwd && d(z, t) != (false, true) {
                    return Ok(Some(DigraphWitness::CommonSourceSquare { z, t }));
                }
            }
        }
    }

    for (i, &a) in others.iter().enumerate() {
        for (j, &b) in others.iter().enumerate().skip(i + 1) {
            for &c in &others[j + 1..] {
                let circuit = (d(a, b) == fwd && d(b, c) == fwd && d(c, a) == fwd)
                    || (d(b, a) == fwd && d(c, b) == fwd && d(a, c) == fwd);
                if !circuit {
                    continue;
                }
                let beats_cycle = |p: usize| [a, b, c].iter().all(|&w| d(p, w) == fwd);
                let cycle_beats = |p: usize| [a, b, c].iter().all(|&w| d(w, p) == fwd);
                if (beats_cycle(x) && cycle_beats(y)) || (cycle_beats(x) && beats_cycle(y)) {
                    return Ok(Some(DigraphWitness::OpposedDiamonds { cycle: [a, b, c] }));
                }
            }
        }
    }

    for (p, q) in [(x, y), (y, x)] {
        for (i, &z) in others.iter().enumerate() {
            if d(p, z) != fwd || d(z, q) != fwd {
                continue;
            }
            for &u in &others[i + 1..] {
                if d(p, u) != fwd || d(u, q) != fwd || category(d(z, u)) != 1 {
                    continue;
                }
                for &t in &others {
                    if t == z || t == u {
                        continue;
                    }
                    if d(q, t) == fwd
                        && d(t, p) == fwd
                        && category(d(z, t)) != 1
                        && category(d(u, t)) != 1
                    {
                        return Ok(Some(DigraphWitness::Prism { z, t, u }));
                    }
                }
            }
        }
    }
    Ok(None)
}

/// Classifies the profile growth of an ordered family by watching the
/// monomorphic dimension of growing truncations: a stabilized dimension is a
/// finite decomposition, which forces a polynomially bounded profile, while
/// a dimension that keeps growing past any bound leaves only at-least
/// exponential growth.
///
/// Unordered families are rejected: without the intrinsic order the
/// polynomial-or-exponential dichotomy fails (several of the two-row graph
/// families in the catalog sit strictly between), so a stabilized dimension
/// would prove nothing.
///
/// Uses a stabilization window of 3 truncation stages and a dimension cap of
/// `2 * nmax`; see [`growth_classify_with`] to change either.
pub fn growth_classify(
    family: &families::FamilySpec,
    nmax: usize,
) -> Result<families::GrowthReport, MonomorphError> {
    growth_classify_with(family, nmax, 3, 2 * nmax.max(1))
}

/// [`growth_classify`] with an explicit stabilization window (consecutive
/// stages with equal dimension that count as stabilized) and dimension cap.
/// If the vertex budget runs out before either trigger, the report comes
/// back `Unclassified` with the dimensions seen so far.
pub fn growth_classify_with(
    family: &families::FamilySpec,
    nmax: usize,
    window: usize,
    cap: usize,
) -> Result<families::GrowthReport, MonomorphError> {
    let window = window.max(2);
    let probe = families::materialize(family, 1)?;
    if !probe.ordered() {
        return Err(MonomorphError::UnorderedInput {
            op: "growth classification",
        });
    }
    let mut dims: Vec<(usize, usize)> = Vec::new();
    let mut exponential = false;
    let mut stage = 1;
    loop {
        let r = families::materialize(family, stage)?;
        let dim = equivalence_classes(&r, EquivMode::Threshold)?.dim_mon();
        dims.push((r.n(), dim));
        if dim > cap {
            exponential = true;
            break;
        }
        if dims.len() >= window && dims[dims.len() - window..].iter().all(|&(_, d)| d == dim) {
            break;
        }
        if families::truncation_vertices(family, stage + 1) > crate::structure::MAX_VERTICES {
            // Budget exhausted with no verdict; reported, not guessed.
            let mut report = families::profile(family, nmax)?;
            report.dim_mon = Some(dims);
            return Ok(report);
        }
        stage += 1;
    }
    let mut report = families::profile(family, nmax)?;
    report.classification = if exponential {
        let lo = (nmax / 2).max(1);
        let ratio = (lo..nmax)
            .map(|n| report.phi[n + 1] as f64 / report.phi[n] as f64)
            .fold(f64::INFINITY, f64::min);
        families::GrowthClass::ExponentialLowerBound {
            ratio: if ratio.is_finite() { ratio } else { 1.0 },
        }
    } else {
        families::GrowthClass::PolynomialCandidate
    };
    report.dim_mon = Some(dims);
    Ok(report)
}
