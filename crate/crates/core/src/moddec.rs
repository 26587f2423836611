//! Gallai interval theory: intervals, strong intervals, the Gallai partition
//! and its quotient, lexicographic sums, and indecomposability.
//!
//! An interval is a vertex set that every external vertex sees uniformly, in
//! both directions of every relation. For ordered structures the intrinsic
//! order takes part, so intervals are additionally index-contiguous.
//!
//! Subset sweeps are brute force over the 2^n masks; callers stay below
//! n = 20 where this is practical.

use std::collections::BTreeSet;

use rayon::prelude::*;
use thiserror::Error;

use crate::canon::{canonical_code, CanonicalCode};
use crate::structure::{mask, FiniteStructure, Kind, StructureError};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ModdecError {
    #[error("operation needs at least one vertex")]
    Empty,
    #[error("vertex {vertex} out of range for n={n}")]
    VertexOutOfRange { vertex: usize, n: usize },
    #[error("expected {expected} blocks, got {got}")]
    BlockCount { expected: usize, got: usize },
    #[error("block {index} is empty")]
    EmptyBlock { index: usize },
    #[error(transparent)]
    Structure(#[from] StructureError),
}

/// How the Gallai quotient decomposes further.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum QuotientKind {
    /// The quotient has only trivial intervals (and is not chainable).
    Indecomposable,
    /// Some ordering of the blocks makes every relation constant per order
    /// class, so the structure is a lexicographic sum along a chain.
    Chainable,
    /// One vertex; there is no proper partition.
    TrivialSingleton,
}

impl QuotientKind {
    pub fn tag(self) -> &'static str {
        match self {
            QuotientKind::Indecomposable => "indecomposable",
            QuotientKind::Chainable => "chainable",
            QuotientKind::TrivialSingleton => "trivial-singleton",
        }
    }
}

/// The Gallai partition of a structure into maximal proper strong intervals,
/// with the quotient induced on block representatives.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct IntervalPartition {
    blocks: Vec<Vec<usize>>,
    quotient: FiniteStructure,
    quotient_kind: QuotientKind,
}

impl IntervalPartition {
    pub fn blocks(&self) -> &[Vec<usize>] {
        &self.blocks
    }

    pub fn quotient(&self) -> &FiniteStructure {
        &self.quotient
    }

    pub fn quotient_kind(&self) -> QuotientKind {
        self.quotient_kind
    }
}

fn column_masks(r: &FiniteStructure) -> Vec<Vec<u64>> {
    (0..r.k())
        .map(|i| {
            (0..r.n())
                .map(|z| (0..r.n()).fold(0u64, |acc, x| acc | ((r.get(i, x, z) as u64) << x)))
                .collect()
        })
        .collect()
}

fn interval_mask(r: &FiniteStructure, cols: &[Vec<u64>], m: u64) -> bool {
    if m == 0 {
        return true;
    }
    if r.ordered() {
        let t = m >> m.trailing_zeros();
        if t & (t + 1) != 0 {
            return false;
        }
    }
    let mut outside = mask(r.n()) & !m;
    while outside != 0 {
        let z = outside.trailing_zeros() as usize;
        outside &= outside - 1;
        for i in 0..r.k() {
            let row = r.row(i, z) & m;
            if row != 0 && row != m {
                return false;
            }
            let col = cols[i][z] & m;
            if col != 0 && col != m {
                return false;
            }
        }
    }
    true
}

fn verts_to_mask(r: &FiniteStructure, verts: &[usize]) -> Result<u64, ModdecError> {
    let mut m = 0u64;
    for &v in verts {
        if v >= r.n() {
            return Err(ModdecError::VertexOutOfRange { vertex: v, n: r.n() });
        }
        m |= 1 << v;
    }
    Ok(m)
}

/// True iff every vertex outside `verts` relates to all of `verts` the same
/// way, in every relation and both directions.
pub fn is_gallai_interval(r: &FiniteStructure, verts: &[usize]) -> Result<bool, ModdecError> {
    let m = verts_to_mask(r, verts)?;
    Ok(interval_mask(r, &column_masks(r), m))
}

fn mask_to_verts(m: u64) -> Vec<usize> {
    (0..64).filter(|&v| m >> v & 1 == 1).collect()
}

fn interval_masks(r: &FiniteStructure) -> Vec<u64> {
    let cols = column_masks(r);
    (1u64..1 << r.n())
        .filter(|&m| interval_mask(r, &cols, m))
        .collect()
}

/// All nonempty intervals that overlap no other interval. Singletons and the
/// whole vertex set are always strong.
pub fn strong_intervals(r: &FiniteStructure) -> Result<Vec<Vec<usize>>, ModdecError> {
    Ok(strong_interval_masks(r)?.into_iter().map(mask_to_verts).collect())
}

fn strong_interval_masks(r: &FiniteStructure) -> Result<Vec<u64>, ModdecError> {
    if r.n() == 0 {
        return Err(ModdecError::Empty);
    }
    let intervals = interval_masks(r);
    let strong: Vec<u64> = intervals
        .iter()
        .filter(|&&a| {
            !intervals
                .iter()
                .any(|&b| a & b != 0 && a & !b != 0 && b & !a != 0)
        })
        .copied()
        .collect();
    Ok(strong)
}

/// Splits the structure into its maximal proper strong intervals and builds
/// the quotient on one representative per block.
pub fn gallai_partition(r: &FiniteStructure) -> Result<IntervalPartition, ModdecError> {
    if r.n() == 0 {
        return Err(ModdecError::Empty);
    }
    if r.n() == 1 {
        return Ok(IntervalPartition {
            blocks: vec![vec![0]],
            quotient: r.clone(),
            quotient_kind: QuotientKind::TrivialSingleton,
        });
    }
    let full = mask(r.n());
    let strong = strong_interval_masks(r)?;
    let proper: Vec<u64> = strong.into_iter().filter(|&m| m != full).collect();
    let mut maximal: Vec<u64> = proper
        .iter()
        .filter(|&&a| !proper.iter().any(|&b| b != a && a & !b == 0))
        .copied()
        .collect();
    maximal.sort_unstable_by_key(|m| m.trailing_zeros());
    debug_assert_eq!(maximal.iter().fold(0, |acc, m| acc | m), full);
    debug_assert_eq!(maximal.iter().map(|m| m.count_ones()).sum::<u32>() as usize, r.n());
    let reps: Vec<usize> = maximal.iter().map(|m| m.trailing_zeros() as usize).collect();
    let quotient = r.restrict(&reps)?;
    let quotient_kind = if chainable_order(&quotient).is_some() {
        QuotientKind::Chainable
    } else {
        QuotientKind::Indecomposable
    };
    Ok(IntervalPartition {
        blocks: maximal.into_iter().map(mask_to_verts).collect(),
        quotient,
        quotient_kind,
    })
}

/// Finds a vertex ordering under which every relation is constant on
/// increasing pairs, constant on decreasing pairs, and constant on the
/// diagonal. Returns the chain as a vertex sequence.
pub fn chainable_order(r: &FiniteStructure) -> Option<Vec<usize>> {
    let n = r.n();
    for i in 0..r.k() {
        if (1..n).any(|x| r.get(i, x, x) != r.get(i, 0, 0)) {
            return None;
        }
    }
    if r.ordered() {
        // the intrinsic order is part of the structure, so only the index
        // order or its reverse can serve as the chain
        let forward: Vec<usize> = (0..n).collect();
        let backward: Vec<usize> = (0..n).rev().collect();
        return [forward, backward].into_iter().find(|c| order_fits(r, c));
    }
    let identity: Vec<usize> = (0..n).collect();
    if order_fits(r, &identity) {
        return Some(identity);
    }
    // some relation separates the two order classes; its win counts expose
    // the only candidate chain (up to reversal)
    let i = (0..r.k()).find(|&i| {
        (0..n).any(|x| (0..n).any(|y| x != y && r.get(i, x, y) != r.get(i, 0, usize::from(n > 1))))
    })?;
    let mut wins: Vec<usize> = (0..n).collect();
    wins.sort_unstable_by_key(|&x| (0..n).filter(|&y| y != x && r.get(i, x, y)).count());
    if order_fits(r, &wins) {
        return Some(wins);
    }
    wins.reverse();
    order_fits(r, &wins).then_some(wins)
}

fn order_fits(r: &FiniteStructure, chain: &[usize]) -> bool {
    for i in 0..r.k() {
        for (a, &x) in chain.iter().enumerate() {
            for &y in &chain[a + 1..] {
                if r.get(i, x, y) != r.get(i, chain[0], *chain.last().unwrap())
                    || r.get(i, y, x) != r.get(i, *chain.last().unwrap(), chain[0])
                {
                    return false;
                }
            }
        }
    }
    true
}

/// Substitutes `s` for vertex `v` of `r`: external vertices see all of `s`
/// exactly as they saw `v`, and the loop at `v` does not propagate.
pub fn compose(
    r: &FiniteStructure,
    v: usize,
    s: &FiniteStructure,
) -> Result<FiniteStructure, ModdecError> {
    if v >= r.n() {
        return Err(ModdecError::VertexOutOfRange { vertex: v, n: r.n() });
    }
    if r.k() != s.k() {
        return Err(StructureError::ArityMismatch { left: r.k(), right: s.k() }.into());
    }
    if r.ordered() != s.ordered() {
        return Err(StructureError::OrderedMismatch {
            left: r.ordered(),
            right: s.ordered(),
        }
        .into());
    }
    let sizes: Vec<usize> = (0..r.n()).map(|x| if x == v { s.n() } else { 1 }).collect();
    build_sum(r, &sizes, |b| {
        if b == v {
            s.clone()
        } else {
            r.restrict(&[b]).unwrap()
        }
    })
}

/// The lexicographic sum of `blocks` along `quotient`: pairs inside block i
/// follow blocks[i], pairs across blocks i != j follow quotient(i, j).
pub fn lex_sum(
    quotient: &FiniteStructure,
    blocks: &[FiniteStructure],
) -> Result<FiniteStructure, ModdecError> {
    if blocks.len() != quotient.n() {
        return Err(ModdecError::BlockCount {
            expected: quotient.n(),
            got: blocks.len(),
        });
    }
    for (index, b) in blocks.iter().enumerate() {
        if b.n() == 0 {
            return Err(ModdecError::EmptyBlock { index });
        }
        if b.k() != quotient.k() {
            return Err(StructureError::ArityMismatch {
                left: quotient.k(),
                right: b.k(),
            }
            .into());
        }
        if b.ordered() != quotient.ordered() {
            return Err(StructureError::OrderedMismatch {
                left: quotient.ordered(),
                right: b.ordered(),
            }
            .into());
        }
    }
    let sizes: Vec<usize> = blocks.iter().map(FiniteStructure::n).collect();
    build_sum(quotient, &sizes, |b| blocks[b].clone())
}

fn build_sum(
    quotient: &FiniteStructure,
    sizes: &[usize],
    block: impl Fn(usize) -> FiniteStructure,
) -> Result<FiniteStructure, ModdecError> {
    let total: usize = sizes.iter().sum();
    if total > 64 {
        return Err(StructureError::TooManyVertices(total).into());
    }
    let mut offsets = vec![0usize; sizes.len()];
    for b in 1..sizes.len() {
        offsets[b] = offsets[b - 1] + sizes[b - 1];
    }
    let k = quotient.k();
    let mut rel = vec![vec![0u64; total]; k];
    for (b, &size) in sizes.iter().enumerate() {
        let inner = block(b);
        debug_assert_eq!(inner.n(), size);
        for i in 0..k {
            for x in 0..size {
                rel[i][offsets[b] + x] |= inner.row(i, x) << offsets[b];
            }
            for c in 0..sizes.len() {
                if c != b && quotient.get(i, b, c) {
                    let cm = (mask(sizes[c])) << offsets[c];
                    for x in 0..size {
                        rel[i][offsets[b] + x] |= cm;
                    }
                }
            }
        }
    }
    FiniteStructure::from_bit_rows(total, k, quotient.ordered(), quotient.kind(), rel.clone())
        .or_else(|_| {
            FiniteStructure::from_bit_rows(total, k, quotient.ordered(), Kind::Generic, rel)
        })
        .map_err(Into::into)
}

/// True iff the structure has no interval other than the empty set, the
/// singletons, and the whole vertex set.
pub fn is_indecomposable(r: &FiniteStructure) -> bool {
    let n = r.n();
    if n <= 2 {
        return true;
    }
    let cols = column_masks(r);
    let full = mask(n);
    (1u64..full)
        .all(|m| m.count_ones() < 2 || !interval_mask(r, &cols, m))
}

/// The isomorphism types of all induced indecomposable substructures, of
/// every size from 1 up.
pub fn indecomposable_substructures(r: &FiniteStructure) -> BTreeSet<CanonicalCode> {
    let full = mask(r.n());
    (1u64..=full)
        .into_par_iter()
        .fold(BTreeSet::new, |mut acc, m| {
            let sub = r.restrict_mask(m);
            if is_indecomposable(&sub) {
                acc.insert(canonical_code(&sub));
            }
            acc
        })
        .reduce(BTreeSet::new, |mut a, mut b| {
            a.append(&mut b);
            a
        })
}

/// True when some relation carries both a loop and a non-loop on its
/// diagonal; quotient classification is only guaranteed without this.
pub fn mixed_diagonal(r: &FiniteStructure) -> bool {
    (0..r.k()).any(|i| (1..r.n()).any(|x| r.get(i, x, x) != r.get(i, 0, 0)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::perm::Permutation;

    fn p4() -> FiniteStructure {
        FiniteStructure::graph_from_edges(4, &[(0, 1), (1, 2), (2, 3)]).unwrap()
    }

    fn complete(n: usize) -> FiniteStructure {
        let mut edges = Vec::new();
        for x in 0..n {
            for y in x + 1..n {
                edges.push((x, y));
            }
        }
        FiniteStructure::graph_from_edges(n, &edges).unwrap()
    }

    fn bichain_of(s: &str) -> FiniteStructure {
        s.parse::<Permutation>().unwrap().to_bichain()
    }

    #[test]
    fn interval_membership() {
        assert!(!is_gallai_interval(&p4(), &[1, 2]).unwrap());
        let k5 = complete(5);
        assert!(is_gallai_interval(&k5, &[0, 2, 4]).unwrap());
        assert!(is_gallai_interval(&k5, &[1]).unwrap());
        assert!(is_gallai_interval(&bichain_of("2647513"), &[1, 2, 3, 4]).unwrap());
        assert!(!is_gallai_interval(&bichain_of("2647513"), &[1, 2, 4]).unwrap());
        assert!(is_gallai_interval(&p4(), &[]).unwrap());
        assert!(is_gallai_interval(&p4(), &[0, 1, 2, 3]).unwrap());
        assert!(is_gallai_interval(&p4(), &[4]).is_err());
    }

    #[test]
    fn strong_intervals_of_a_path() {
        // indecomposable, so only singletons and the whole set are intervals
        let s = strong_intervals(&p4()).unwrap();
        assert_eq!(s.len(), 5);
        assert!(s.contains(&vec![0, 1, 2, 3]));
    }

    #[test]
    fn partition_of_an_inflated_bichain() {
        let part = gallai_partition(&bichain_of("479832156")).unwrap();
        let sizes: Vec<usize> = part.blocks().iter().map(Vec::len).collect();
        assert_eq!(sizes, vec![1, 3, 3, 2]);
        assert_eq!(
            canonical_code(part.quotient()),
            canonical_code(&bichain_of("2413"))
        );
        assert_eq!(part.quotient_kind(), QuotientKind::Indecomposable);
    }

    #[test]
    fn partition_of_a_clique() {
        let part = gallai_partition(&complete(4)).unwrap();
        assert_eq!(part.blocks().len(), 4);
        assert_eq!(part.quotient_kind(), QuotientKind::Chainable);
    }

    #[test]
    fn partition_of_a_path() {
        let part = gallai_partition(&p4()).unwrap();
        assert_eq!(part.blocks().len(), 4);
        assert_eq!(part.quotient_kind(), QuotientKind::Indecomposable);
    }

    #[test]
    fn singleton_partition() {
        let one = FiniteStructure::graph_from_edges(1, &[]).unwrap();
        let part = gallai_partition(&one).unwrap();
        assert_eq!(part.quotient_kind(), QuotientKind::TrivialSingleton);
        assert!(gallai_partition(&FiniteStructure::graph_from_edges(0, &[]).unwrap()).is_err());
    }

    #[test]
    fn composing_cliques() {
        let k2 = complete(2);
        let k3 = compose(&k2, 1, &k2).unwrap();
        assert_eq!(canonical_code(&k3), canonical_code(&complete(3)));
    }

    #[test]
    fn lexicographic_sum_matches_inflation() {
        let blocks: Vec<FiniteStructure> = ["1", "132", "321", "12"]
            .iter()
            .map(|s| bichain_of(s))
            .collect();
        let sum = lex_sum(&bichain_of("2413"), &blocks).unwrap();
        assert_eq!(sum, bichain_of("479832156"));
        assert!(lex_sum(&bichain_of("2413"), &blocks[..3]).is_err());
    }

    #[test]
    fn rebuilding_from_the_partition() {
        for g in [p4(), complete(4), bichain_of("479832156")] {
            let part = gallai_partition(&g).unwrap();
            let blocks: Vec<FiniteStructure> = part
                .blocks()
                .iter()
                .map(|b| g.restrict(b).unwrap())
                .collect();
            assert_eq!(lex_sum(part.quotient(), &blocks).unwrap(), g);
        }
    }

    #[test]
    fn indecomposability_flags() {
        let c5 = FiniteStructure::graph_from_edges(5, &[(0, 1), (1, 2), (2, 3), (3, 4), (0, 4)])
            .unwrap();
        assert!(is_indecomposable(&c5));
        assert!(is_indecomposable(&complete(2)));
        assert!(is_indecomposable(&p4()));
        assert!(!is_indecomposable(&complete(3)));
    }

    #[test]
    fn cographs_have_tiny_indecomposable_parts() {
        let c4 = FiniteStructure::graph_from_edges(4, &[(0, 1), (1, 2), (2, 3), (0, 3)]).unwrap();
        let ind = indecomposable_substructures(&c4);
        assert_eq!(ind.len(), 3);
        let ind_p4 = indecomposable_substructures(&p4());
        assert!(ind_p4.contains(&canonical_code(&p4())));
    }

    #[test]
    fn simple_permutations_give_indecomposable_bichains() {
        fn gen(remaining: &mut Vec<usize>, cur: &mut Vec<usize>, out: &mut Vec<Permutation>) {
            if remaining.is_empty() {
                out.push(Permutation::new(cur.clone()).unwrap());
                return;
            }
            for i in 0..remaining.len() {
                let v = remaining.remove(i);
                cur.push(v);
                gen(remaining, cur, out);
                cur.pop();
                remaining.insert(i, v);
            }
        }
        for n in 1..=5 {
            let mut remaining: Vec<usize> = (1..=n).collect();
            let mut perms = Vec::new();
            gen(&mut remaining, &mut Vec::new(), &mut perms);
            assert_eq!(perms.len(), (1..=n).product::<usize>());
            for pi in perms {
                assert_eq!(
                    pi.is_simple(),
                    is_indecomposable(&pi.to_bichain()),
                    "{pi}"
                );
            }
        }
    }

    #[test]
    fn mixed_diagonal_detection() {
        let rows = vec![vec![0b01, 0b00]];
        let r = FiniteStructure::from_bit_rows(2, 1, false, Kind::Generic, rows).unwrap();
        assert!(mixed_diagonal(&r));
        assert!(!mixed_diagonal(&complete(3)));
        // a two-element structure with one loop is indecomposable yet not
        // chainable, so the partition reports it as indecomposable
        let one_loop =
            FiniteStructure::from_bit_rows(2, 1, false, Kind::Generic, vec![vec![0b01, 0b00]])
                .unwrap();
        let part = gallai_partition(&one_loop).unwrap();
        assert_eq!(part.quotient_kind(), QuotientKind::Indecomposable);
    }
}
