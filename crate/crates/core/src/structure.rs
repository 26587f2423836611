//! Finite binary relational structures.
//!
//! A [`FiniteStructure`] has vertices `0..n` (n at most 64) and `k` binary
//! relations stored as packed bit matrices, diagonal included. When the
//! structure is ordered, the vertex index order is the intrinsic total order;
//! it is never stored as one of the k relations. The [`Kind`] tag records
//! which classical class the structure belongs to and is used only to select
//! default equivalence thresholds; it does not take part in isomorphism.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

/// Largest supported vertex count. Vertex subsets are machine-word bitmasks.
pub const MAX_VERTICES: usize = 64;

/// Largest supported relation count, so a relation index also fits a mask.
pub const MAX_RELATIONS: usize = 64;

/// Structure class tag. Selects default equivalence thresholds; carries no
/// structural content of its own beyond the invariants checked at build time.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub enum Kind {
    /// Symmetric irreflexive, k = 1, unordered.
    Graph,
    /// Irreflexive, antisymmetric, total, k = 1, unordered.
    Tournament,
    /// Irreflexive (loops excluded), k = 1, unordered.
    Digraph,
    /// Ordered, k = 1, and the relation is itself a total order.
    Bichain,
    /// Ordered, any k.
    OrderedBinary,
    /// No constraints.
    Generic,
}

impl Kind {
    pub const ALL: [Kind; 6] = [
        Kind::Graph,
        Kind::Tournament,
        Kind::Digraph,
        Kind::Bichain,
        Kind::OrderedBinary,
        Kind::Generic,
    ];

    pub fn tag(self) -> &'static str {
        match self {
            Kind::Graph => "graph",
            Kind::Tournament => "tournament",
            Kind::Digraph => "digraph",
            Kind::Bichain => "bichain",
            Kind::OrderedBinary => "ordered-binary",
            Kind::Generic => "generic",
        }
    }

    pub fn from_tag(tag: &str) -> Option<Kind> {
        Kind::ALL.into_iter().find(|k| k.tag() == tag)
    }
}

impl fmt::Display for Kind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum StructureError {
    #[error("vertex count {0} exceeds the supported maximum of {MAX_VERTICES}")]
    TooManyVertices(usize),
    #[error("relation count {0} exceeds the supported maximum of {MAX_RELATIONS}")]
    TooManyRelations(usize),
    #[error("expected {expected} relation tables, got {got}")]
    TableCount { expected: usize, got: usize },
    #[error("relation {relation}: table is {rows}x{cols}, expected {n}x{n}")]
    Dimension {
        relation: usize,
        rows: usize,
        cols: usize,
        n: usize,
    },
    #[error("relation {relation}: row {row} has bits set beyond column {n}")]
    StrayBits { relation: usize, row: usize, n: usize },
    #[error("{kind}: loop at vertex {vertex}")]
    ForbiddenLoop { kind: Kind, vertex: usize },
    #[error("graph: asymmetric pair ({x},{y})")]
    GraphAsymmetric { x: usize, y: usize },
    #[error("tournament: non-total pair ({x},{y})")]
    TournamentNonTotal { x: usize, y: usize },
    #[error("tournament: antisymmetry violated at ({x},{y})")]
    TournamentBothArcs { x: usize, y: usize },
    #[error("{kind}: k must be 1, got {k}")]
    SingleRelationRequired { kind: Kind, k: usize },
    #[error("{kind}: structure must be ordered")]
    OrderedRequired { kind: Kind },
    #[error("{kind}: structure must not be ordered")]
    UnorderedRequired { kind: Kind },
    #[error("bichain: relation is not a total order ({reason} at ({x},{y}))")]
    BichainNotTotalOrder { reason: &'static str, x: usize, y: usize },
    #[error("vertex {vertex} out of range for n={n}")]
    VertexOutOfRange { vertex: usize, n: usize },
    #[error("arity mismatch: k={left} vs k={right}")]
    ArityMismatch { left: usize, right: usize },
    #[error("ordered flag mismatch: {left} vs {right}")]
    OrderedMismatch { left: bool, right: bool },
}

/// A finite binary relational structure on vertices `0..n`.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct FiniteStructure {
    n: usize,
    k: usize,
    ordered: bool,
    kind: Kind,
    /// rel[i][x] holds row x of relation i; bit y is rho_i(x, y).
    rel: Vec<Vec<u64>>,
}

/// All-ones mask over the low `n` bits.
#[inline]
pub(crate) fn mask(n: usize) -> u64 {
    debug_assert!(n <= 64);
    if n == 64 {
        u64::MAX
    } else {
        (1u64 << n) - 1
    }
}

impl FiniteStructure {
    /// Builds and validates a structure from n x n boolean tables.
    pub fn build(
        n: usize,
        k: usize,
        ordered: bool,
        kind: Kind,
        tables: &[Vec<Vec<bool>>],
    ) -> Result<Self, StructureError> {
        if tables.len() != k {
            return Err(StructureError::TableCount {
                expected: k,
                got: tables.len(),
            });
        }
        for (i, table) in tables.iter().enumerate() {
            let cols = table.iter().map(Vec::len).max().unwrap_or(n);
            if table.len() != n || table.iter().any(|row| row.len() != n) {
                return Err(StructureError::Dimension {
                    relation: i,
                    rows: table.len(),
                    cols,
                    n,
                });
            }
        }
        if n > MAX_VERTICES {
            return Err(StructureError::TooManyVertices(n));
        }
        let rel = tables
            .iter()
            .map(|table| {
                table
                    .iter()
                    .map(|row| {
                        row.iter()
                            .enumerate()
                            .fold(0u64, |acc, (y, &b)| acc | ((b as u64) << y))
                    })
                    .collect()
            })
            .collect();
        Self::from_bit_rows(n, k, ordered, kind, rel)
    }

    /// Builds and validates a structure from packed bit rows.
    pub fn from_bit_rows(
        n: usize,
        k: usize,
        ordered: bool,
        kind: Kind,
        rel: Vec<Vec<u64>>,
    ) -> Result<Self, StructureError> {
        if n > MAX_VERTICES {
            return Err(StructureError::TooManyVertices(n));
        }
        if k > MAX_RELATIONS {
            return Err(StructureError::TooManyRelations(k));
        }
        if rel.len() != k {
            return Err(StructureError::TableCount {
                expected: k,
                got: rel.len(),
            });
        }
        let m = mask(n);
        for (i, rows) in rel.iter().enumerate() {
            if rows.len() != n {
                return Err(StructureError::Dimension {
                    relation: i,
                    rows: rows.len(),
                    cols: n,
                    n,
                });
            }
            for (x, &row) in rows.iter().enumerate() {
                if row & !m != 0 {
                    return Err(StructureError::StrayBits {
                        relation: i,
                        row: x,
                        n,
                    });
                }
            }
        }
        let s = FiniteStructure {
            n,
            k,
            ordered,
            kind,
            rel,
        };
        s.check_kind()?;
        Ok(s)
    }

    fn check_kind(&self) -> Result<(), StructureError> {
        let kind = self.kind;
        match kind {
            Kind::Graph | Kind::Tournament | Kind::Digraph => {
                if self.k != 1 {
                    return Err(StructureError::SingleRelationRequired { kind, k: self.k });
                }
                if self.ordered {
                    return Err(StructureError::UnorderedRequired { kind });
                }
                if let Some(vertex) = self.first_loop(0) {
                    return Err(StructureError::ForbiddenLoop { kind, vertex });
                }
            }
            Kind::Bichain | Kind::OrderedBinary => {
                if !self.ordered {
                    return Err(StructureError::OrderedRequired { kind });
                }
                if kind == Kind::Bichain && self.k != 1 {
                    return Err(StructureError::SingleRelationRequired { kind, k: self.k });
                }
            }
            Kind::Generic => {}
        }
        match kind {
            Kind::Graph => {
                for x in 0..self.n {
                    for y in (x + 1)..self.n {
                        if self.get(0, x, y) != self.get(0, y, x) {
                            return Err(StructureError::GraphAsymmetric { x, y });
                        }
                    }
                }
            }
            Kind::Tournament => {
                for x in 0..self.n {
                    for y in (x + 1)..self.n {
                        match (self.get(0, x, y), self.get(0, y, x)) {
                            (false, false) => {
                                return Err(StructureError::TournamentNonTotal { x, y })
                            }
                            (true, true) => {
                                return Err(StructureError::TournamentBothArcs { x, y })
                            }
                            _ => {}
                        }
                    }
                }
            }
            Kind::Bichain => self.check_total_order(0)?,
            _ => {}
        }
        Ok(())
    }

    fn first_loop(&self, i: usize) -> Option<usize> {
        (0..self.n).find(|&x| self.get(i, x, x))
    }

    fn check_total_order(&self, i: usize) -> Result<(), StructureError> {
        let fail = |reason, x, y| StructureError::BichainNotTotalOrder { reason, x, y };
        for x in 0..self.n {
            if !self.get(i, x, x) {
                return Err(fail("not reflexive", x, x));
            }
            for y in (x + 1)..self.n {
                match (self.get(i, x, y), self.get(i, y, x)) {
                    (false, false) => return Err(fail("not total", x, y)),
                    (true, true) => return Err(fail("not antisymmetric", x, y)),
                    _ => {}
                }
            }
        }
        for x in 0..self.n {
            for y in 0..self.n {
                if !self.get(i, x, y) {
                    continue;
                }
                // everything above y must be above x
                for z in 0..self.n {
                    if self.get(i, y, z) && !self.get(i, x, z) {
                        return Err(fail("not transitive", x, z));
                    }
                }
            }
        }
        Ok(())
    }

    /// Graph from an undirected edge list.
    pub fn graph_from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Self, StructureError> {
        let mut rows = vec![0u64; n];
        for &(x, y) in edges {
            let v = x.max(y);
            if v >= n {
                return Err(StructureError::VertexOutOfRange { vertex: v, n });
            }
            rows[x] |= 1 << y;
            rows[y] |= 1 << x;
        }
        Self::from_bit_rows(n, 1, false, Kind::Graph, vec![rows])
    }

    /// Tournament from an arc list; totality and antisymmetry are checked.
    pub fn tournament_from_arcs(
        n: usize,
        arcs: &[(usize, usize)],
    ) -> Result<Self, StructureError> {
        Self::directed_from_arcs(n, arcs, Kind::Tournament)
    }

    /// Loopless directed graph from an arc list.
    pub fn digraph_from_arcs(n: usize, arcs: &[(usize, usize)]) -> Result<Self, StructureError> {
        Self::directed_from_arcs(n, arcs, Kind::Digraph)
    }

    fn directed_from_arcs(
        n: usize,
        arcs: &[(usize, usize)],
        kind: Kind,
    ) -> Result<Self, StructureError> {
        let mut rows = vec![0u64; n];
        for &(x, y) in arcs {
            let v = x.max(y);
            if v >= n {
                return Err(StructureError::VertexOutOfRange { vertex: v, n });
            }
            rows[x] |= 1 << y;
        }
        Self::from_bit_rows(n, 1, false, kind, vec![rows])
    }

    /// Re-tags the structure, re-checking the new kind's invariants.
    pub fn with_kind(self, kind: Kind) -> Result<Self, StructureError> {
        let s = FiniteStructure { kind, ..self };
        s.check_kind()?;
        Ok(s)
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn k(&self) -> usize {
        self.k
    }

    #[inline]
    pub fn ordered(&self) -> bool {
        self.ordered
    }

    #[inline]
    pub fn kind(&self) -> Kind {
        self.kind
    }

    /// rho_i(x, y).
    #[inline]
    pub fn get(&self, i: usize, x: usize, y: usize) -> bool {
        self.rel[i][x] >> y & 1 == 1
    }

    /// Row x of relation i as a bitmask (bit y is rho_i(x, y)).
    #[inline]
    pub fn row(&self, i: usize, x: usize) -> u64 {
        self.rel[i][x]
    }

    /// The pair type d_i(x, y) := (rho_i(x, y), rho_i(y, x)).
    #[inline]
    pub fn d(&self, i: usize, x: usize, y: usize) -> (bool, bool) {
        (self.get(i, x, y), self.get(i, y, x))
    }

    /// All k pair types of (x, y) packed into 2k bits, rho_i(x, y) low.
    #[inline]
    pub fn pair_code(&self, x: usize, y: usize) -> u128 {
        let mut code = 0u128;
        for i in 0..self.k {
            code |= (self.get(i, x, y) as u128) << (2 * i);
            code |= (self.get(i, y, x) as u128) << (2 * i + 1);
        }
        code
    }

    /// All k diagonal values at x packed into k bits.
    #[inline]
    pub fn loop_code(&self, x: usize) -> u64 {
        (0..self.k).fold(0u64, |acc, i| acc | ((self.get(i, x, x) as u64) << i))
    }

    pub fn is_symmetric(&self, i: usize) -> bool {
        (0..self.n).all(|x| (x + 1..self.n).all(|y| self.get(i, x, y) == self.get(i, y, x)))
    }

    pub fn is_irreflexive(&self, i: usize) -> bool {
        self.first_loop(i).is_none()
    }

    pub fn is_reflexive(&self, i: usize) -> bool {
        (0..self.n).all(|x| self.get(i, x, x))
    }

    pub fn is_total_order(&self, i: usize) -> bool {
        self.check_total_order(i).is_ok()
    }

    /// Induced restriction to the vertices in `m` (a bitmask), relabeled in
    /// increasing original order. Preserves the intrinsic order when ordered.
    pub fn restrict_mask(&self, m: u64) -> FiniteStructure {
        debug_assert_eq!(m & !mask(self.n), 0);
        let verts: Vec<usize> = (0..self.n).filter(|&v| m >> v & 1 == 1).collect();
        let nn = verts.len();
        let rel = self
            .rel
            .iter()
            .map(|rows| {
                verts
                    .iter()
                    .map(|&x| {
                        verts
                            .iter()
                            .enumerate()
                            .fold(0u64, |acc, (j, &y)| acc | (((rows[x] >> y) & 1) << j))
                    })
                    .collect()
            })
            .collect();
        FiniteStructure {
            n: nn,
            k: self.k,
            ordered: self.ordered,
            kind: self.kind,
            rel,
        }
    }

    /// Induced restriction to a vertex subset given as a slice.
    pub fn restrict(&self, verts: &[usize]) -> Result<FiniteStructure, StructureError> {
        let mut m = 0u64;
        for &v in verts {
            if v >= self.n {
                return Err(StructureError::VertexOutOfRange { vertex: v, n: self.n });
            }
            m |= 1 << v;
        }
        Ok(self.restrict_mask(m))
    }

    /// Applies a vertex relabeling: vertex v of `self` becomes `sigma[v]`.
    pub fn relabel(&self, sigma: &[usize]) -> FiniteStructure {
        assert_eq!(sigma.len(), self.n);
        let rel = self
            .rel
            .iter()
            .map(|rows| {
                let mut out = vec![0u64; self.n];
                for x in 0..self.n {
                    for y in 0..self.n {
                        if rows[x] >> y & 1 == 1 {
                            out[sigma[x]] |= 1 << sigma[y];
                        }
                    }
                }
                out
            })
            .collect();
        FiniteStructure { rel, ..self.clone() }
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ParseError {
    #[error("missing header line")]
    MissingHeader,
    #[error("bad header field `{0}`")]
    BadHeaderField(String),
    #[error("header is missing field `{0}`")]
    MissingField(&'static str),
    #[error("unknown kind tag `{0}`")]
    UnknownKind(String),
    #[error("relation {relation}, row {row}: expected {n} characters of 0/1, got `{line}`")]
    BadRow {
        relation: usize,
        row: usize,
        n: usize,
        line: String,
    },
    #[error("relation {relation}: missing row {row}")]
    MissingRow { relation: usize, row: usize },
    #[error("trailing content after relation tables")]
    TrailingContent,
    #[error(transparent)]
    Invalid(#[from] StructureError),
}

impl fmt::Display for FiniteStructure {
    /// Text format: header `n=<n> k=<k> ordered=<0|1> kind=<tag>`, then for
    /// each relation an n-line block of n characters in {0,1}; row x, column
    /// y is rho_i(x, y). Round-trips bit-exactly through `FromStr`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "n={} k={} ordered={} kind={}",
            self.n,
            self.k,
            self.ordered as u8,
            self.kind.tag()
        )?;
        for rows in &self.rel {
            for &row in rows {
                for y in 0..self.n {
                    f.write_str(if row >> y & 1 == 1 { "1" } else { "0" })?;
                }
                f.write_str("\n")?;
            }
        }
        Ok(())
    }
}

impl FromStr for FiniteStructure {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Self, ParseError> {
        let mut lines = s.lines();
        let header = lines.next().ok_or(ParseError::MissingHeader)?;
        let (mut n, mut k, mut ordered, mut kind) = (None, None, None, None);
        for field in header.split_whitespace() {
            let (key, value) = field
                .split_once('=')
                .ok_or_else(|| ParseError::BadHeaderField(field.to_string()))?;
            let bad = || ParseError::BadHeaderField(field.to_string());
            match key {
                "n" => n = Some(value.parse::<usize>().map_err(|_| bad())?),
                "k" => k = Some(value.parse::<usize>().map_err(|_| bad())?),
                "ordered" => {
                    ordered = Some(match value {
                        "0" => false,
                        "1" => true,
                        _ => return Err(bad()),
                    })
                }
                "kind" => {
                    kind = Some(
                        Kind::from_tag(value)
                            .ok_or_else(|| ParseError::UnknownKind(value.to_string()))?,
                    )
                }
                _ => return Err(bad()),
            }
        }
        let n = n.ok_or(ParseError::MissingField("n"))?;
        let k = k.ok_or(ParseError::MissingField("k"))?;
        let ordered = ordered.ok_or(ParseError::MissingField("ordered"))?;
        let kind = kind.ok_or(ParseError::MissingField("kind"))?;
        if n > MAX_VERTICES {
            return Err(StructureError::TooManyVertices(n).into());
        }

        let mut rel = Vec::with_capacity(k);
        for relation in 0..k {
            let mut rows = Vec::with_capacity(n);
            for row in 0..n {
                let line = lines
                    .next()
                    .ok_or(ParseError::MissingRow { relation, row })?;
                if line.len() != n || line.bytes().any(|b| b != b'0' && b != b'1') {
                    return Err(ParseError::BadRow {
                        relation,
                        row,
                        n,
                        line: line.to_string(),
                    });
                }
                rows.push(
                    line.bytes()
                        .enumerate()
                        .fold(0u64, |acc, (y, b)| acc | (((b == b'1') as u64) << y)),
                );
            }
            rel.push(rows);
        }
        if lines.any(|l| !l.trim().is_empty()) {
            return Err(ParseError::TrailingContent);
        }
        Ok(FiniteStructure::from_bit_rows(n, k, ordered, kind, rel)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_structure_accepted() {
        let s = FiniteStructure::from_bit_rows(0, 1, false, Kind::Graph, vec![vec![]]).unwrap();
        assert_eq!(s.n(), 0);
    }

    #[test]
    fn triangle_is_a_valid_graph() {
        let s = FiniteStructure::graph_from_edges(3, &[(0, 1), (1, 2), (0, 2)]).unwrap();
        assert!(s.is_symmetric(0));
        assert!(s.is_irreflexive(0));
    }

    #[test]
    fn tournament_rejects_two_way_pair() {
        let err = FiniteStructure::tournament_from_arcs(2, &[(0, 1), (1, 0)]).unwrap_err();
        assert_eq!(err, StructureError::TournamentBothArcs { x: 0, y: 1 });
        assert!(err.to_string().contains("antisymmetry"));
    }

    #[test]
    fn tournament_rejects_missing_pair() {
        let err = FiniteStructure::tournament_from_arcs(3, &[(0, 1)]).unwrap_err();
        assert_eq!(err, StructureError::TournamentNonTotal { x: 0, y: 2 });
    }

    #[test]
    fn restriction_of_path_is_path() {
        let p4 = FiniteStructure::graph_from_edges(4, &[(0, 1), (1, 2), (2, 3)]).unwrap();
        let p3 = p4.restrict(&[0, 1, 2]).unwrap();
        let expect = FiniteStructure::graph_from_edges(3, &[(0, 1), (1, 2)]).unwrap();
        assert_eq!(p3, expect);
    }

    #[test]
    fn restriction_to_empty_set() {
        let p4 = FiniteStructure::graph_from_edges(4, &[(0, 1), (1, 2), (2, 3)]).unwrap();
        assert_eq!(p4.restrict(&[]).unwrap().n(), 0);
    }

    #[test]
    fn restriction_out_of_range() {
        let p4 = FiniteStructure::graph_from_edges(4, &[(0, 1)]).unwrap();
        assert_eq!(
            p4.restrict(&[0, 5]).unwrap_err(),
            StructureError::VertexOutOfRange { vertex: 5, n: 4 }
        );
    }

    #[test]
    fn text_round_trip() {
        let s = FiniteStructure::digraph_from_arcs(3, &[(0, 1), (1, 2), (2, 0)]).unwrap();
        let text = s.to_string();
        assert!(text.starts_with("n=3 k=1 ordered=0 kind=digraph\n"));
        let back: FiniteStructure = text.parse().unwrap();
        assert_eq!(back, s);
    }

    #[test]
    fn parse_rejects_invalid_tournament() {
        let text = "n=2 k=1 ordered=0 kind=tournament\n00\n00\n";
        let err = text.parse::<FiniteStructure>().unwrap_err();
        assert!(matches!(err, ParseError::Invalid(_)));
    }

    #[test]
    fn bichain_requires_total_order_relation() {
        // index order with rel = index order itself
        let chain: Vec<Vec<bool>> = (0..3)
            .map(|x| (0..3).map(|y| x <= y).collect())
            .collect();
        assert!(FiniteStructure::build(3, 1, true, Kind::Bichain, &[chain.clone()]).is_ok());
        let mut broken = chain;
        broken[0][0] = false;
        let err = FiniteStructure::build(3, 1, true, Kind::Bichain, &[broken]).unwrap_err();
        assert!(err.to_string().contains("reflexive"));
    }
}
