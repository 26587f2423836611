//! Separable ordered structures: the closure of singletons under
//! two-element lexicographic sums. Provides the catalog of sum operations,
//! a Gallai-based recognizer, the forbidden-pattern set for the reflexive
//! single-relation case, exact counting by exhaustive enumeration, and a
//! labeled-tree code that is bijective on reflexive single-relation inputs.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use thiserror::Error;

use crate::canon::{canonical_code, CanonicalCode};
use crate::moddec::{gallai_partition, lex_sum, ModdecError, QuotientKind};
use crate::structure::{FiniteStructure, Kind, StructureError};

/// Ceiling on free relation bits for exhaustive enumeration.
pub const ENUM_BUDGET_BITS: usize = 26;

/// Off-diagonal pair types d(0,1) in catalog order; index + 1 is the label.
const D_PAIRS: [(bool, bool); 4] = [(true, false), (false, true), (true, true), (false, false)];

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SeparableError {
    #[error("at least one relation is required")]
    ZeroArity,
    #[error("structure must be ordered")]
    Unordered,
    #[error("tree codes cover reflexive structures with a single relation")]
    NotTreeEncodable,
    #[error("structure is not separable")]
    NotSeparable,
    #[error("structure must have at least one vertex")]
    EmptyInput,
    #[error("enumeration needs {bits} free bits, the budget is {budget}")]
    BudgetExceeded { bits: usize, budget: usize },
    #[error("the forbidden set needs a fixed diagonal mode")]
    MixedForbiddenSet,
    #[error("invalid labeled tree: {0}")]
    InvalidTree(&'static str),
    #[error(transparent)]
    Decomposition(#[from] ModdecError),
    #[error(transparent)]
    Structure(#[from] StructureError),
}

/// How loops are fixed during enumeration and catalog construction.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub enum DiagonalMode {
    Reflexive,
    Irreflexive,
    Mixed,
}

impl DiagonalMode {
    pub const ALL: [DiagonalMode; 3] = [
        DiagonalMode::Reflexive,
        DiagonalMode::Irreflexive,
        DiagonalMode::Mixed,
    ];

    pub fn tag(self) -> &'static str {
        match self {
            DiagonalMode::Reflexive => "reflexive",
            DiagonalMode::Irreflexive => "irreflexive",
            DiagonalMode::Mixed => "mixed",
        }
    }

    pub fn from_tag(tag: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|m| m.tag() == tag)
    }
}

impl fmt::Display for DiagonalMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

/// A two-element ordered structure used as a sum shape, with its position
/// in the catalog enumeration.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct TwoElementOp {
    structure: FiniteStructure,
    index: usize,
}

impl TwoElementOp {
    pub fn structure(&self) -> &FiniteStructure {
        &self.structure
    }

    pub fn index(&self) -> usize {
        self.index
    }
}

fn two_element(k: usize, off_idx: usize, diag_idx: usize, index: usize) -> TwoElementOp {
    let mut rel = vec![vec![0u64; 2]; k];
    for (i, rows) in rel.iter_mut().enumerate() {
        let (fwd, bwd) = D_PAIRS[(off_idx >> (2 * i)) & 3];
        if fwd {
            rows[0] |= 0b10;
        }
        if bwd {
            rows[1] |= 0b01;
        }
        if diag_idx >> (2 * i) & 1 == 1 {
            rows[0] |= 0b01;
        }
        if diag_idx >> (2 * i + 1) & 1 == 1 {
            rows[1] |= 0b10;
        }
    }
    let structure = FiniteStructure::from_bit_rows(2, k, true, Kind::OrderedBinary, rel)
        .expect("two-element tables are always valid");
    TwoElementOp { structure, index }
}

/// All two-element sum shapes with k relations: 4^k off-diagonal patterns,
/// ordered with relation 0 varying fastest; mixed mode appends one loop bit
/// per relation and point (off-diagonal index varying fastest).
pub fn two_element_catalog(
    k: usize,
    mode: DiagonalMode,
) -> Result<Vec<TwoElementOp>, SeparableError> {
    if k == 0 {
        return Err(SeparableError::ZeroArity);
    }
    let bits = 2 * k * if mode == DiagonalMode::Mixed { 2 } else { 1 };
    if bits > ENUM_BUDGET_BITS {
        return Err(SeparableError::BudgetExceeded {
            bits,
            budget: ENUM_BUDGET_BITS,
        });
    }
    let offs = 1usize << (2 * k);
    let ops = match mode {
        DiagonalMode::Reflexive => (0..offs).map(|o| two_element(k, o, offs - 1, o)).collect(),
        DiagonalMode::Irreflexive => (0..offs).map(|o| two_element(k, o, 0, o)).collect(),
        DiagonalMode::Mixed => (0..offs * offs)
            .map(|i| two_element(k, i % offs, i / offs, i))
            .collect(),
    };
    Ok(ops)
}

/// The lexicographic sum of two blocks along `op`; the left block occupies
/// the lower positions.
pub fn sum2(
    left: &FiniteStructure,
    op: &TwoElementOp,
    right: &FiniteStructure,
) -> Result<FiniteStructure, SeparableError> {
    Ok(lex_sum(&op.structure, &[left.clone(), right.clone()])?)
}

/// True iff every indecomposable restriction of `r` has at most two
/// elements, checked by recursing through the Gallai partition: a node
/// fails exactly when its quotient is prime with three or more blocks.
/// Primality here reads only the off-diagonal pair types, because a
/// two-element sum takes every diagonal bit from its blocks: a quotient
/// with one pair type everywhere is an iterated sum even when its loops
/// vary and so no chain order exists.
pub fn is_separable_structure(r: &FiniteStructure) -> Result<bool, SeparableError> {
    if !r.ordered() {
        return Err(SeparableError::Unordered);
    }
    Ok(separable_rec(r))
}

fn off_diagonal_constant(r: &FiniteStructure) -> bool {
    let n = r.n();
    let c = r.pair_code(0, 1);
    (0..n).all(|x| (x + 1..n).all(|y| r.pair_code(x, y) == c))
}

fn separable_rec(r: &FiniteStructure) -> bool {
    if r.n() <= 2 {
        return true;
    }
    let part = gallai_partition(r).expect("n >= 3");
    if part.quotient_kind() == QuotientKind::Indecomposable
        && part.blocks().len() >= 3
        && !off_diagonal_constant(part.quotient())
    {
        return false;
    }
    part.blocks()
        .iter()
        .all(|b| separable_rec(&r.restrict(b).expect("block vertices are in range")))
}

fn pattern(n: usize, assign: &[(usize, usize, (bool, bool))], diag: bool) -> FiniteStructure {
    let mut rel = vec![vec![0u64; n]];
    for &(x, y, (fwd, bwd)) in assign {
        if fwd {
            rel[0][x] |= 1 << y;
        }
        if bwd {
            rel[0][y] |= 1 << x;
        }
    }
    if diag {
        for (x, row) in rel[0].iter_mut().enumerate() {
            *row |= 1 << x;
        }
    }
    FiniteStructure::from_bit_rows(n, 1, true, Kind::OrderedBinary, rel)
        .expect("pattern tables are always valid")
}

/// The minimal obstructions to separability for single-relation structures
/// with the chosen diagonal: 36 three-element patterns (no uniform cut at
/// either split point) followed by 12 four-element patterns (two pair types
/// interleaved so that every split mixes them).
pub fn forbidden_set_type1(
    mode: DiagonalMode,
) -> Result<Vec<FiniteStructure>, SeparableError> {
    let diag = match mode {
        DiagonalMode::Reflexive => true,
        DiagonalMode::Irreflexive => false,
        DiagonalMode::Mixed => return Err(SeparableError::MixedForbiddenSet),
    };
    let mut out = Vec::with_capacity(48);
    for a in D_PAIRS {
        for b in D_PAIRS {
            if b == a {
                continue;
            }
            for c in D_PAIRS {
                if c == b {
                    continue;
                }
                out.push(pattern(3, &[(0, 1, a), (0, 2, b), (1, 2, c)], diag));
            }
        }
    }
    for v in D_PAIRS {
        for w in D_PAIRS {
            if w == v {
                continue;
            }
            out.push(pattern(
                4,
                &[
                    (0, 1, v),
                    (0, 3, v),
                    (2, 3, v),
                    (0, 2, w),
                    (1, 2, w),
                    (1, 3, w),
                ],
                diag,
            ));
        }
    }
    Ok(out)
}

fn structure_from_bits(n: usize, k: usize, mode: DiagonalMode, bits: u64) -> FiniteStructure {
    let mut rel = vec![vec![0u64; n]; k];
    let mut pos = 0;
    for rows in rel.iter_mut() {
        for x in 0..n {
            for y in (x + 1)..n {
                if bits >> pos & 1 == 1 {
                    rows[x] |= 1 << y;
                }
                if bits >> (pos + 1) & 1 == 1 {
                    rows[y] |= 1 << x;
                }
                pos += 2;
            }
        }
    }
    for rows in rel.iter_mut() {
        for (x, row) in rows.iter_mut().enumerate() {
            let looped = match mode {
                DiagonalMode::Reflexive => true,
                DiagonalMode::Irreflexive => false,
                DiagonalMode::Mixed => {
                    let b = bits >> pos & 1 == 1;
                    pos += 1;
                    b
                }
            };
            if looped {
                *row |= 1 << x;
            }
        }
    }
    FiniteStructure::from_bit_rows(n, k, true, Kind::OrderedBinary, rel)
        .expect("enumerated tables are always valid")
}

/// Number of isomorphism types of separable ordered structures with k
/// relations on n elements, by exhaustive enumeration of all relation
/// tables with the mode's diagonal, filtered through the recursive check
/// and deduplicated by canonical code.
pub fn count_separable(
    k: usize,
    mode: DiagonalMode,
    n: usize,
) -> Result<u64, SeparableError> {
    if k == 0 {
        return Err(SeparableError::ZeroArity);
    }
    let bits = k * n * n.saturating_sub(1)
        + if mode == DiagonalMode::Mixed { k * n } else { 0 };
    if bits > ENUM_BUDGET_BITS {
        return Err(SeparableError::BudgetExceeded {
            bits,
            budget: ENUM_BUDGET_BITS,
        });
    }
    let codes = (0u64..1 << bits)
        .into_par_iter()
        .fold(BTreeSet::new, |mut set: BTreeSet<CanonicalCode>, b| {
            let s = structure_from_bits(n, k, mode, b);
            if separable_rec(&s) {
                set.insert(canonical_code(&s));
            }
            set
        })
        .reduce(BTreeSet::new, |mut a, mut b| {
            a.append(&mut b);
            a
        });
    Ok(codes.len() as u64)
}

/// A binary tree with nodes labeled 1 through 4; a left child never repeats
/// its parent's label. Trees with n nodes code the separable reflexive
/// single-relation structures on n + 1 elements.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum LabeledTree {
    Empty,
    Node {
        label: u8,
        left: Box<LabeledTree>,
        right: Box<LabeledTree>,
    },
}

impl LabeledTree {
    pub fn node(label: u8, left: LabeledTree, right: LabeledTree) -> Self {
        LabeledTree::Node {
            label,
            left: Box::new(left),
            right: Box::new(right),
        }
    }

    pub fn node_count(&self) -> usize {
        match self {
            LabeledTree::Empty => 0,
            LabeledTree::Node { left, right, .. } => 1 + left.node_count() + right.node_count(),
        }
    }

    pub fn root_label(&self) -> Option<u8> {
        match self {
            LabeledTree::Empty => None,
            LabeledTree::Node { label, .. } => Some(*label),
        }
    }

    pub fn validate(&self) -> Result<(), SeparableError> {
        match self {
            LabeledTree::Empty => Ok(()),
            LabeledTree::Node { label, left, right } => {
                if !(1..=4).contains(label) {
                    return Err(SeparableError::InvalidTree("label must be 1 through 4"));
                }
                if left.root_label() == Some(*label) {
                    return Err(SeparableError::InvalidTree(
                        "left child repeats its parent's label",
                    ));
                }
                left.validate()?;
                right.validate()
            }
        }
    }
}

impl fmt::Display for LabeledTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LabeledTree::Empty => f.write_str("_"),
            LabeledTree::Node { label, left, right } => {
                write!(f, "({label} {left} {right})")
            }
        }
    }
}

fn parse_tree(s: &[u8], pos: &mut usize) -> Result<LabeledTree, SeparableError> {
    while s.get(*pos).is_some_and(u8::is_ascii_whitespace) {
        *pos += 1;
    }
    match s.get(*pos) {
        Some(b'_') => {
            *pos += 1;
            Ok(LabeledTree::Empty)
        }
        Some(b'(') => {
            *pos += 1;
            while s.get(*pos).is_some_and(u8::is_ascii_whitespace) {
                *pos += 1;
            }
            let label = match s.get(*pos) {
                Some(c @ b'1'..=b'4') => c - b'0',
                _ => return Err(SeparableError::InvalidTree("label must be 1 through 4")),
            };
            *pos += 1;
            let left = parse_tree(s, pos)?;
            let right = parse_tree(s, pos)?;
            while s.get(*pos).is_some_and(u8::is_ascii_whitespace) {
                *pos += 1;
            }
            if s.get(*pos) != Some(&b')') {
                return Err(SeparableError::InvalidTree("expected ')'"));
            }
            *pos += 1;
            Ok(LabeledTree::node(label, left, right))
        }
        _ => Err(SeparableError::InvalidTree("expected '(' or '_'")),
    }
}

impl FromStr for LabeledTree {
    type Err = SeparableError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bytes = s.as_bytes();
        let mut pos = 0;
        let tree = parse_tree(bytes, &mut pos)?;
        if !bytes[pos..].iter().all(u8::is_ascii_whitespace) {
            return Err(SeparableError::InvalidTree("trailing content"));
        }
        tree.validate()?;
        Ok(tree)
    }
}

fn reflexive_point() -> FiniteStructure {
    FiniteStructure::from_bit_rows(1, 1, true, Kind::OrderedBinary, vec![vec![1]])
        .expect("one reflexive point")
}

fn reflexive_op(label: u8) -> TwoElementOp {
    let off = usize::from(label) - 1;
    two_element(1, off, 0b11, off)
}

fn cut_type(r: &FiniteStructure, p: usize) -> Option<(bool, bool)> {
    let d = r.d(0, 0, p);
    for x in 0..p {
        for y in p..r.n() {
            if r.d(0, x, y) != d {
                return None;
            }
        }
    }
    Some(d)
}

fn encode_rec(r: &FiniteStructure) -> Result<LabeledTree, SeparableError> {
    let n = r.n();
    if n == 1 {
        return Ok(LabeledTree::Empty);
    }
    for p in 1..n {
        if let Some(d) = cut_type(r, p) {
            let label = D_PAIRS.iter().position(|&x| x == d).unwrap() as u8 + 1;
            let prefix: Vec<usize> = (0..p).collect();
            let suffix: Vec<usize> = (p..n).collect();
            let left = encode_rec(&r.restrict(&prefix)?)?;
            let right = encode_rec(&r.restrict(&suffix)?)?;
            return Ok(LabeledTree::node(label, left, right));
        }
    }
    Err(SeparableError::NotSeparable)
}

/// Codes a separable reflexive single-relation structure as a labeled tree
/// with n - 1 nodes. The root label is the pair type of the leftmost
/// uniform cut; the left subtree codes the prefix before that cut, which by
/// minimality never starts with the same label.
pub fn tree_encode(r: &FiniteStructure) -> Result<LabeledTree, SeparableError> {
    if !r.ordered() {
        return Err(SeparableError::Unordered);
    }
    if r.k() != 1 || !r.is_reflexive(0) {
        return Err(SeparableError::NotTreeEncodable);
    }
    if r.n() == 0 {
        return Err(SeparableError::EmptyInput);
    }
    encode_rec(r)
}

fn decode_rec(t: &LabeledTree) -> Result<FiniteStructure, SeparableError> {
    match t {
        LabeledTree::Empty => Ok(reflexive_point()),
        LabeledTree::Node { label, left, right } => {
            let op = reflexive_op(*label);
            sum2(&decode_rec(left)?, &op, &decode_rec(right)?)
        }
    }
}

/// Inverse of `tree_encode`: a tree with n nodes yields a separable
/// reflexive single-relation structure on n + 1 elements.
pub fn tree_decode(t: &LabeledTree) -> Result<FiniteStructure, SeparableError> {
    t.validate()?;
    decode_rec(t)
}

/// Number of labeled trees with the given node count, by the convolution
/// the tree shape satisfies: a root with one of 4 labels, a left subtree
/// avoiding that label (3 of 4 root choices when nonempty), and an
/// unrestricted right subtree.
pub fn count_labeled_trees(nodes: usize) -> u64 {
    let mut free = vec![0u64; nodes + 1];
    let mut constrained = vec![0u64; nodes + 1];
    free[0] = 1;
    constrained[0] = 1;
    for m in 1..=nodes {
        let mut split_sum = 0u64;
        for l in 0..m {
            let term = constrained[l]
                .checked_mul(free[m - 1 - l])
                .expect("tree count overflows u64");
            split_sum = split_sum.checked_add(term).expect("tree count overflows u64");
        }
        free[m] = split_sum.checked_mul(4).expect("tree count overflows u64");
        constrained[m] = split_sum * 3;
    }
    free[nodes]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::embed::avoids_all;
    use crate::perm::Permutation;

    fn code(s: &FiniteStructure) -> CanonicalCode {
        canonical_code(s)
    }

    #[test]
    fn catalog_sizes_and_order() {
        let refl = two_element_catalog(1, DiagonalMode::Reflexive).unwrap();
        assert_eq!(refl.len(), 4);
        for (j, op) in refl.iter().enumerate() {
            assert_eq!(op.index(), j);
            assert_eq!(op.structure().d(0, 0, 1), D_PAIRS[j]);
            assert!(op.structure().is_reflexive(0));
        }
        let irr = two_element_catalog(1, DiagonalMode::Irreflexive).unwrap();
        assert_eq!(irr.len(), 4);
        assert!(irr.iter().all(|op| op.structure().is_irreflexive(0)));
        assert_eq!(two_element_catalog(2, DiagonalMode::Reflexive).unwrap().len(), 16);
        let mixed = two_element_catalog(1, DiagonalMode::Mixed).unwrap();
        assert_eq!(mixed.len(), 16);
        let fifth = &mixed[5];
        assert_eq!(fifth.structure().d(0, 0, 1), D_PAIRS[1]);
        assert!(fifth.structure().get(0, 0, 0));
        assert!(!fifth.structure().get(0, 1, 1));
        assert_eq!(two_element_catalog(0, DiagonalMode::Reflexive), Err(SeparableError::ZeroArity));
    }

    #[test]
    fn sum_of_singletons_is_the_operation() {
        let pt = reflexive_point();
        for op in two_element_catalog(1, DiagonalMode::Reflexive).unwrap() {
            let s = sum2(&pt, &op, &pt).unwrap();
            assert_eq!(code(&s), code(op.structure()));
        }
    }

    #[test]
    fn three_element_sums_cover_everything_separable() {
        let pt = reflexive_point();
        let ops = two_element_catalog(1, DiagonalMode::Reflexive).unwrap();
        let mut codes = BTreeSet::new();
        for op in &ops {
            for two in &ops {
                let pair = two.structure();
                codes.insert(code(&sum2(&pt, op, pair).unwrap()));
                codes.insert(code(&sum2(pair, op, &pt).unwrap()));
            }
        }
        assert_eq!(codes.len(), 28);
        assert_eq!(count_separable(1, DiagonalMode::Reflexive, 3).unwrap(), 28);
    }

    #[test]
    fn forbidden_set_shape() {
        let forb = forbidden_set_type1(DiagonalMode::Reflexive).unwrap();
        assert_eq!(forb.len(), 48);
        assert_eq!(forb.iter().filter(|s| s.n() == 3).count(), 36);
        assert_eq!(forb.iter().filter(|s| s.n() == 4).count(), 12);
        for s in &forb {
            assert!(s.is_reflexive(0));
            assert!(!is_separable_structure(s).unwrap());
        }
        assert_eq!(
            forbidden_set_type1(DiagonalMode::Mixed),
            Err(SeparableError::MixedForbiddenSet)
        );
    }

    #[test]
    fn forbidden_members_are_minimal() {
        for s in forbidden_set_type1(DiagonalMode::Irreflexive).unwrap() {
            let n = s.n();
            for dropped in 0..n {
                let rest: Vec<usize> = (0..n).filter(|&v| v != dropped).collect();
                let sub = s.restrict(&rest).unwrap();
                assert!(is_separable_structure(&sub).unwrap(), "dropping {dropped} of {s}");
            }
        }
    }

    #[test]
    fn forbidden_set_contains_the_two_simple_bichains() {
        let forb = forbidden_set_type1(DiagonalMode::Reflexive).unwrap();
        let four: BTreeSet<CanonicalCode> =
            forb.iter().filter(|s| s.n() == 4).map(code).collect();
        for p in ["2413", "3142"] {
            let b = p.parse::<Permutation>().unwrap().to_bichain();
            assert!(four.contains(&code(&b)), "{p} missing from the forbidden set");
        }
    }

    #[test]
    fn separability_agrees_with_avoidance() {
        let forb = forbidden_set_type1(DiagonalMode::Reflexive).unwrap();
        for n in 1..=4usize {
            let bits = n * (n - 1);
            for b in 0u64..1 << bits {
                let s = structure_from_bits(n, 1, DiagonalMode::Reflexive, b);
                assert_eq!(
                    is_separable_structure(&s).unwrap(),
                    avoids_all(&s, &forb).unwrap(),
                    "disagreement on {s}"
                );
            }
        }
    }

    #[test]
    fn separability_requires_ordered_input() {
        let k3 = FiniteStructure::graph_from_edges(3, &[(0, 1), (1, 2), (0, 2)]).unwrap();
        assert_eq!(is_separable_structure(&k3), Err(SeparableError::Unordered));
    }

    #[test]
    fn bichain_separability_matches_the_permutation_test() {
        for p in ["2413", "3142", "362514", "479832156"] {
            let b = p.parse::<Permutation>().unwrap().to_bichain();
            assert!(!is_separable_structure(&b).unwrap(), "{p}");
        }
        for p in ["1", "21", "132", "2143", "546231"] {
            let b = p.parse::<Permutation>().unwrap().to_bichain();
            assert!(is_separable_structure(&b).unwrap(), "{p}");
        }
        for p in ["2413", "3142", "362514", "479832156", "1", "21", "132", "2143", "546231"] {
            let perm = p.parse::<Permutation>().unwrap();
            assert_eq!(
                perm.is_separable(),
                is_separable_structure(&perm.to_bichain()).unwrap(),
                "{p}"
            );
        }
    }

    #[test]
    fn counts_match_the_known_prefixes() {
        let reflexive: Vec<u64> = (1..=4)
            .map(|n| count_separable(1, DiagonalMode::Reflexive, n).unwrap())
            .collect();
        assert_eq!(reflexive, [1, 4, 28, 244]);
        let mixed: Vec<u64> = (1..=4)
            .map(|n| count_separable(1, DiagonalMode::Mixed, n).unwrap())
            .collect();
        assert_eq!(mixed, [2, 16, 224, 3904]);
        assert_eq!(count_separable(1, DiagonalMode::Irreflexive, 3).unwrap(), 28);
        assert_eq!(count_separable(2, DiagonalMode::Reflexive, 2).unwrap(), 16);
        assert_eq!(
            count_separable(1, DiagonalMode::Reflexive, 6),
            Err(SeparableError::BudgetExceeded { bits: 30, budget: 26 })
        );
    }

    #[test]
    fn tree_codes_round_trip() {
        let pt = reflexive_point();
        assert_eq!(tree_encode(&pt).unwrap(), LabeledTree::Empty);
        assert_eq!(code(&tree_decode(&LabeledTree::Empty).unwrap()), code(&pt));
        for (j, op) in two_element_catalog(1, DiagonalMode::Reflexive)
            .unwrap()
            .iter()
            .enumerate()
        {
            let t = tree_encode(op.structure()).unwrap();
            assert_eq!(t, LabeledTree::node(j as u8 + 1, LabeledTree::Empty, LabeledTree::Empty));
            assert_eq!(code(&tree_decode(&t).unwrap()), code(op.structure()));
        }
        for n in 3..=4usize {
            let mut trees = BTreeSet::new();
            for b in 0u64..1 << (n * (n - 1)) {
                let s = structure_from_bits(n, 1, DiagonalMode::Reflexive, b);
                if !separable_rec(&s) {
                    assert_eq!(tree_encode(&s), Err(SeparableError::NotSeparable));
                    continue;
                }
                let t = tree_encode(&s).unwrap();
                t.validate().unwrap();
                assert_eq!(t.node_count(), n - 1);
                assert_eq!(code(&tree_decode(&t).unwrap()), code(&s), "{s}");
                trees.insert(t.to_string());
            }
            assert_eq!(trees.len() as u64, count_labeled_trees(n - 1));
        }
    }

    #[test]
    fn tree_counts_follow_the_convolution() {
        let counts: Vec<u64> = (0..=4).map(count_labeled_trees).collect();
        assert_eq!(counts, [1, 4, 28, 244, 2380]);
    }

    #[test]
    fn tree_encode_rejects_bad_inputs() {
        let k3 = FiniteStructure::graph_from_edges(3, &[(0, 1), (1, 2), (0, 2)]).unwrap();
        assert_eq!(tree_encode(&k3), Err(SeparableError::Unordered));
        let irr = two_element_catalog(1, DiagonalMode::Irreflexive).unwrap();
        assert_eq!(
            tree_encode(irr[0].structure()),
            Err(SeparableError::NotTreeEncodable)
        );
        let member = &forbidden_set_type1(DiagonalMode::Reflexive).unwrap()[0];
        assert_eq!(tree_encode(member), Err(SeparableError::NotSeparable));
    }

    #[test]
    fn tree_notation_round_trips() {
        let t = LabeledTree::node(
            2,
            LabeledTree::node(1, LabeledTree::Empty, LabeledTree::Empty),
            LabeledTree::node(2, LabeledTree::Empty, LabeledTree::Empty),
        );
        assert_eq!(t.to_string(), "(2 (1 _ _) (2 _ _))");
        assert_eq!("(2 (1 _ _) (2 _ _))".parse::<LabeledTree>().unwrap(), t);
        assert_eq!(" _ ".parse::<LabeledTree>().unwrap(), LabeledTree::Empty);
        assert!(matches!(
            "(1 (1 _ _) _)".parse::<LabeledTree>(),
            Err(SeparableError::InvalidTree(_))
        ));
        assert!(matches!(
            "(5 _ _)".parse::<LabeledTree>(),
            Err(SeparableError::InvalidTree(_))
        ));
        assert!(matches!(
            "(1 _ _) junk".parse::<LabeledTree>(),
            Err(SeparableError::InvalidTree(_))
        ));
        assert!(matches!(
            "".parse::<LabeledTree>(),
            Err(SeparableError::InvalidTree(_))
        ));
    }
}
