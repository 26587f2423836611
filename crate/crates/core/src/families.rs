//! A catalog of infinite structures with computable profiles.
//!
//! Every family fixes an infinite vertex rule. [`materialize`] builds the
//! induced structure on the first `m` slices of that rule, and truncations
//! are nested: each one is an induced prefix of the next, so growing `m`
//! only ever adds vertices at the end. [`profile`] counts isomorphism types
//! of n-vertex substructures by sweeping all n-subsets of a truncation and
//! grows the truncation until two consecutive stages agree on every count.
//! The registered families are flat enough (rows, chains, and sums of
//! cliques) that the counts are eventually constant in the stage, so the
//! double-stage check is self-verifying; running out of vertex budget is
//! reported as an error, never truncated silently.

use std::collections::BTreeSet;

use num_traits::ToPrimitive;
use rayon::prelude::*;
use thiserror::Error;

use crate::canon::canonical_code;
use crate::canon::CanonicalCode;
use crate::moddec;
use crate::series;
use crate::structure::{FiniteStructure, Kind, StructureError, MAX_VERTICES};
use crate::util::subsets_of_size;

#[derive(Debug, Error)]
pub enum FamilyError {
    #[error("unknown family `{0}`")]
    Unknown(String),
    #[error("order type {0} is not implemented; only the interleaved order (type 1) is")]
    UnsupportedOrderType(u8),
    #[error("template case {0} is outside the curated set {{1, 4, 7, 13, 16}}")]
    UnsupportedCase(u8),
    #[error("chain-sum block count {0} is outside 1..=4")]
    BadBlockCount(u8),
    #[error("clique blocks must have positive size")]
    ZeroBlockSize,
    #[error("no closed profile formula registered for `{0}`")]
    NoFormula(String),
    #[error(
        "profile of `{family}` did not saturate: stage {stage} needs {vertices} vertices, \
         the cap is {cap}"
    )]
    Unsaturated {
        family: String,
        stage: usize,
        vertices: usize,
        cap: usize,
    },
    #[error("word of length {len} cannot support factors of length {n}; need at least {need}")]
    WordTooShort { len: usize, n: usize, need: usize },
    #[error(
        "profile sweep of `{family}` at stage {stage} would canonicalize about {estimated} \
         subsets, the budget is {budget}; lower nmax"
    )]
    SweepBudget {
        family: String,
        stage: usize,
        estimated: u64,
        budget: u64,
    },
    #[error(transparent)]
    Structure(#[from] StructureError),
}

/// One infinite structure with a deterministic truncation scheme.
///
/// The two-row graph families live on pairs (i, 0) and (j, 1), drawn as a
/// bottom and a top row; some carry fixed extra vertices, numbered before
/// the rows. The ordered templates live on the same pairs under the
/// interleaved order (0,0) < (0,1) < (1,0) < ..., with the extra vertex (if
/// any) first. The remaining families are described by their builder below.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FamilySpec {
    /// Two-row graphs g0..g6; g3 and g5 carry an apex over the top row, g6
    /// carries an attached clique vertex and a pendant.
    Ch6 { index: u8 },
    /// Two-row graphs h1..h10: every combination of stable/clique rows with
    /// an equality, half-graph, or inequality cross rule.
    Fig { index: u8 },
    /// Ordered digraph templates on interleaved pairs. Only order type 1 is
    /// implemented and only the five curated cases 1, 4, 7, 13, 16.
    OrderedTemplate { order_type: u8, case: u8 },
    /// Direct sum of cliques, one of sizes 1, 2, 3, ... (capped at
    /// `block_size` when given).
    CliqueSum { block_size: Option<usize> },
    /// The one-way infinite path.
    InfinitePath,
    /// Positions of the Fibonacci word with consecutivity arcs and a loop on
    /// every position carrying letter 1.
    FibonacciWordCoding,
    /// `blocks - 1` special leading vertices, each relating to everything
    /// after it by its own fixed pattern, followed by a chain tail.
    LexChainSum { blocks: u8 },
}

pub struct FamilyEntry {
    pub name: &'static str,
    pub spec: FamilySpec,
    pub description: &'static str,
}

/// Families addressable by name. `clique-sum:<b>` and `lexsum<1..=4>` are
/// also accepted by [`FamilySpec::parse`] for block sizes not listed here.
pub const REGISTRY: &[FamilyEntry] = &[
    FamilyEntry {
        name: "g0",
        spec: FamilySpec::Ch6 { index: 0 },
        description: "two stable rows; cross edge between (i,0) and (j,1) exactly when i != j",
    },
    FamilyEntry {
        name: "g1",
        spec: FamilySpec::Ch6 { index: 1 },
        description: "two stable rows; cross edge exactly when i <= j (a half graph)",
    },
    FamilyEntry {
        name: "g2",
        spec: FamilySpec::Ch6 { index: 2 },
        description: "the infinite path drawn on two rows: (0,0)-(0,1)-(1,0)-(1,1)-...",
    },
    FamilyEntry {
        name: "g3",
        spec: FamilySpec::Ch6 { index: 3 },
        description: "perfect matching between two stable rows plus an apex joined to the top row",
    },
    FamilyEntry {
        name: "g4",
        spec: FamilySpec::Ch6 { index: 4 },
        description: "bottom row a clique, top row stable; cross edge exactly when i = j",
    },
    FamilyEntry {
        name: "g5",
        spec: FamilySpec::Ch6 { index: 5 },
        description: "bottom clique, top stable, cross edge when i <= j, plus an apex joined to \
                      the top row",
    },
    FamilyEntry {
        name: "g6",
        spec: FamilySpec::Ch6 { index: 6 },
        description: "bottom clique extended by a vertex a, top stable row plus a vertex b seeing \
                      only a, cross edge when i <= j",
    },
    FamilyEntry {
        name: "h1",
        spec: FamilySpec::Fig { index: 1 },
        description: "two stable rows; cross edges form a perfect matching",
    },
    FamilyEntry {
        name: "h2",
        spec: FamilySpec::Fig { index: 2 },
        description: "two stable rows; cross edge when i <= j",
    },
    FamilyEntry {
        name: "h3",
        spec: FamilySpec::Fig { index: 3 },
        description: "two stable rows; cross edge when i != j",
    },
    FamilyEntry {
        name: "h4",
        spec: FamilySpec::Fig { index: 4 },
        description: "bottom clique, top stable; cross edges form a perfect matching",
    },
    FamilyEntry {
        name: "h5",
        spec: FamilySpec::Fig { index: 5 },
        description: "bottom clique, top stable; cross edge when i <= j",
    },
    FamilyEntry {
        name: "h6",
        spec: FamilySpec::Fig { index: 6 },
        description: "bottom stable, top clique; cross edge when i <= j",
    },
    FamilyEntry {
        name: "h7",
        spec: FamilySpec::Fig { index: 7 },
        description: "bottom clique, top stable; cross edge when i != j",
    },
    FamilyEntry {
        name: "h8",
        spec: FamilySpec::Fig { index: 8 },
        description: "two cliques; cross edges form a perfect matching",
    },
    FamilyEntry {
        name: "h9",
        spec: FamilySpec::Fig { index: 9 },
        description: "two cliques; cross edge when i <= j",
    },
    FamilyEntry {
        name: "h10",
        spec: FamilySpec::Fig { index: 10 },
        description: "two cliques; cross edge when i != j",
    },
    FamilyEntry {
        name: "t-fib",
        spec: FamilySpec::OrderedTemplate { order_type: 1, case: 1 },
        description: "ordered interleaved pairs; one arc (n,0) -> (n,1) inside each pair",
    },
    FamilyEntry {
        name: "t-gap",
        spec: FamilySpec::OrderedTemplate { order_type: 1, case: 4 },
        description: "ordered interleaved pairs; arc (n,0) -> (n',1) whenever n <= n'",
    },
    FamilyEntry {
        name: "t-pow",
        spec: FamilySpec::OrderedTemplate { order_type: 1, case: 7 },
        description: "ordered interleaved pairs; arc from every bottom vertex to every top vertex",
    },
    FamilyEntry {
        name: "t-half",
        spec: FamilySpec::OrderedTemplate { order_type: 1, case: 13 },
        description: "ordered interleaved pairs behind a first vertex sending an arc to every \
                      top vertex; no other arcs",
    },
    FamilyEntry {
        name: "t-half1",
        spec: FamilySpec::OrderedTemplate { order_type: 1, case: 16 },
        description: "ordered interleaved pairs behind a first vertex a; arcs a -> (n,0) and \
                      (n,1) -> a",
    },
    FamilyEntry {
        name: "clique-sum",
        spec: FamilySpec::CliqueSum { block_size: None },
        description: "direct sum of one clique of every finite size",
    },
    FamilyEntry {
        name: "path",
        spec: FamilySpec::InfinitePath,
        description: "the one-way infinite path",
    },
    FamilyEntry {
        name: "fib-word",
        spec: FamilySpec::FibonacciWordCoding,
        description: "Fibonacci word positions with consecutivity arcs and loops on the ones",
    },
    FamilyEntry {
        name: "lexsum2",
        spec: FamilySpec::LexChainSum { blocks: 2 },
        description: "one special vertex linked both ways to a trailing chain",
    },
    FamilyEntry {
        name: "lexsum3",
        spec: FamilySpec::LexChainSum { blocks: 3 },
        description: "two special vertices with distinct link patterns before a trailing chain",
    },
    FamilyEntry {
        name: "lexsum4",
        spec: FamilySpec::LexChainSum { blocks: 4 },
        description: "three special vertices with distinct link patterns before a trailing chain",
    },
];

impl FamilySpec {
    pub fn parse(name: &str) -> Result<FamilySpec, FamilyError> {
        if let Some(entry) = REGISTRY.iter().find(|e| e.name == name) {
            return Ok(entry.spec);
        }
        if let Some(rest) = name.strip_prefix("clique-sum:") {
            let b: usize = rest
                .parse()
                .map_err(|_| FamilyError::Unknown(name.to_string()))?;
            if b == 0 {
                return Err(FamilyError::ZeroBlockSize);
            }
            return Ok(FamilySpec::CliqueSum { block_size: Some(b) });
        }
        if let Some(rest) = name.strip_prefix("lexsum") {
            if let Ok(b) = rest.parse::<u8>() {
                if !(1..=4).contains(&b) {
                    return Err(FamilyError::BadBlockCount(b));
                }
                return Ok(FamilySpec::LexChainSum { blocks: b });
            }
        }
        Err(FamilyError::Unknown(name.to_string()))
    }

    pub fn name(&self) -> String {
        match *self {
            FamilySpec::Ch6 { index } => format!("g{index}"),
            FamilySpec::Fig { index } => format!("h{index}"),
            FamilySpec::OrderedTemplate { order_type, case } => match (order_type, case) {
                (1, 1) => "t-fib".to_string(),
                (1, 4) => "t-gap".to_string(),
                (1, 7) => "t-pow".to_string(),
                (1, 13) => "t-half".to_string(),
                (1, 16) => "t-half1".to_string(),
                (ot, c) => format!("ot-{ot}-{c}"),
            },
            FamilySpec::CliqueSum { block_size: None } => "clique-sum".to_string(),
            FamilySpec::CliqueSum { block_size: Some(b) } => format!("clique-sum:{b}"),
            FamilySpec::InfinitePath => "path".to_string(),
            FamilySpec::FibonacciWordCoding => "fib-word".to_string(),
            FamilySpec::LexChainSum { blocks } => format!("lexsum{blocks}"),
        }
    }

    fn validate(&self) -> Result<(), FamilyError> {
        match *self {
            FamilySpec::Ch6 { index } if index > 6 => {
                Err(FamilyError::Unknown(format!("g{index}")))
            }
            FamilySpec::Fig { index } if !(1..=10).contains(&index) => {
                Err(FamilyError::Unknown(format!("h{index}")))
            }
            FamilySpec::OrderedTemplate { order_type, .. } if order_type != 1 => {
                Err(FamilyError::UnsupportedOrderType(order_type))
            }
            FamilySpec::OrderedTemplate { case, .. }
                if !matches!(case, 1 | 4 | 7 | 13 | 16) =>
            {
                Err(FamilyError::UnsupportedCase(case))
            }
            FamilySpec::CliqueSum { block_size: Some(0) } => Err(FamilyError::ZeroBlockSize),
            FamilySpec::LexChainSum { blocks } if !(1..=4).contains(&blocks) => {
                Err(FamilyError::BadBlockCount(blocks))
            }
            _ => Ok(()),
        }
    }
}

/// Vertex count of `materialize(family, m)`.
pub fn truncation_vertices(family: &FamilySpec, m: usize) -> usize {
    match *family {
        FamilySpec::Ch6 { index } => 2 * m + ch6_config(index).extras as usize,
        FamilySpec::Fig { .. } => 2 * m,
        FamilySpec::OrderedTemplate { case, .. } => 2 * m + matches!(case, 13 | 16) as usize,
        FamilySpec::CliqueSum { block_size } => {
            let b = block_size.unwrap_or(m);
            if m <= b {
                m * (m + 1) / 2
            } else {
                b * (b + 1) / 2 + (m - b) * b
            }
        }
        FamilySpec::InfinitePath
        | FamilySpec::FibonacciWordCoding
        | FamilySpec::LexChainSum { .. } => m,
    }
}

/// Builds the truncation of `family` to its first `m` slices: m pairs for
/// the two-row families (extra vertices first), m blocks for clique sums, m
/// vertices otherwise. Truncations are nested under increasing `m`.
pub fn materialize(family: &FamilySpec, m: usize) -> Result<FiniteStructure, FamilyError> {
    family.validate()?;
    match *family {
        FamilySpec::Ch6 { index } => build_two_row(&ch6_config(index), m),
        FamilySpec::Fig { index } => build_two_row(&fig_config(index), m),
        FamilySpec::OrderedTemplate { case, .. } => build_template(case, m),
        FamilySpec::CliqueSum { block_size } => build_clique_sum(block_size, m),
        FamilySpec::InfinitePath => {
            let edges: Vec<(usize, usize)> = (1..m).map(|v| (v - 1, v)).collect();
            Ok(FiniteStructure::graph_from_edges(m, &edges)?)
        }
        FamilySpec::FibonacciWordCoding => word_structure(&fibonacci_word(m)),
        FamilySpec::LexChainSum { blocks } => build_lex_chain(blocks, m),
    }
}

/// Two-row graph shape: optional extra vertices, row kinds, and the cross
/// rule between bottom vertex (i,0) and top vertex (j,1).
struct TwoRowGraph {
    extras: u8,
    bottom_clique: bool,
    top_clique: bool,
    cross: Cross,
    wiring: Wiring,
}

#[derive(Clone, Copy)]
enum Cross {
    Equal,
    AtMost,
    Distinct,
    /// Path steps: top j matches bottom i when j = i or j = i - 1.
    Step,
}

#[derive(Clone, Copy)]
enum Wiring {
    None,
    /// One apex adjacent to the whole top row.
    ApexOverTop,
    /// Extra 0 joins the bottom clique; extra 1 is adjacent to extra 0 only.
    CliqueApexPlusPendant,
}

fn ch6_config(index: u8) -> TwoRowGraph {
    let (extras, bottom_clique, cross, wiring) = match index {
        0 => (0, false, Cross::Distinct, Wiring::None),
        1 => (0, false, Cross::AtMost, Wiring::None),
        2 => (0, false, Cross::Step, Wiring::None),
        3 => (1, false, Cross::Equal, Wiring::ApexOverTop),
        4 => (0, true, Cross::Equal, Wiring::None),
        5 => (1, true, Cross::AtMost, Wiring::ApexOverTop),
        6 => (2, true, Cross::AtMost, Wiring::CliqueApexPlusPendant),
        _ => unreachable!("validated"),
    };
    TwoRowGraph {
        extras,
        bottom_clique,
        top_clique: false,
        cross,
        wiring,
    }
}

fn fig_config(index: u8) -> TwoRowGraph {
    let (bottom_clique, top_clique, cross) = match index {
        1 => (false, false, Cross::Equal),
        2 => (false, false, Cross::AtMost),
        3 => (false, false, Cross::Distinct),
        4 => (true, false, Cross::Equal),
        5 => (true, false, Cross::AtMost),
        6 => (false, true, Cross::AtMost),
        7 => (true, false, Cross::Distinct),
        8 => (true, true, Cross::Equal),
        9 => (true, true, Cross::AtMost),
        10 => (true, true, Cross::Distinct),
        _ => unreachable!("validated"),
    };
    TwoRowGraph {
        extras: 0,
        bottom_clique,
        top_clique,
        cross,
        wiring: Wiring::None,
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Slot {
    Extra(u8),
    Cell { pair: usize, top: bool },
}

fn slot(extras: u8, v: usize) -> Slot {
    if v < extras as usize {
        Slot::Extra(v as u8)
    } else {
        let c = v - extras as usize;
        Slot::Cell {
            pair: c / 2,
            top: c % 2 == 1,
        }
    }
}

fn two_row_adjacent(cfg: &TwoRowGraph, a: Slot, b: Slot) -> bool {
    use Slot::*;
    match (a, b) {
        (Extra(_), Extra(_)) => matches!(cfg.wiring, Wiring::CliqueApexPlusPendant),
        (Extra(x), Cell { top, .. }) | (Cell { top, .. }, Extra(x)) => match cfg.wiring {
            Wiring::None => false,
            Wiring::ApexOverTop => top,
            Wiring::CliqueApexPlusPendant => x == 0 && !top,
        },
        (Cell { pair: p, top: false }, Cell { pair: q, top: false }) => {
            cfg.bottom_clique && p != q
        }
        (Cell { pair: p, top: true }, Cell { pair: q, top: true }) => cfg.top_clique && p != q,
        (Cell { pair: i, top: false }, Cell { pair: j, top: true })
        | (Cell { pair: j, top: true }, Cell { pair: i, top: false }) => match cfg.cross {
            Cross::Equal => i == j,
            Cross::AtMost => i <= j,
            Cross::Distinct => i != j,
            Cross::Step => j == i || j + 1 == i,
        },
    }
}

fn build_two_row(cfg: &TwoRowGraph, m: usize) -> Result<FiniteStructure, FamilyError> {
    let n = cfg.extras as usize + 2 * m;
    let mut edges = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            if two_row_adjacent(cfg, slot(cfg.extras, u), slot(cfg.extras, v)) {
                edges.push((u, v));
            }
        }
    }
    Ok(FiniteStructure::graph_from_edges(n, &edges)?)
}

fn build_template(case: u8, m: usize) -> Result<FiniteStructure, FamilyError> {
    let off = matches!(case, 13 | 16) as usize;
    let n = off + 2 * m;
    let cell = |v: usize| -> Option<(usize, bool)> {
        (v >= off).then(|| ((v - off) / 2, (v - off) % 2 == 1))
    };
    let arc = |u: usize, v: usize| -> bool {
        match (cell(u), cell(v)) {
            (Some((p, ut)), Some((q, vt))) => match case {
                1 => p == q && !ut && vt,
                4 => p <= q && !ut && vt,
                7 => !ut && vt,
                _ => false,
            },
            (None, Some((_, vt))) => match case {
                13 => vt,
                16 => !vt,
                _ => unreachable!("cases without an extra vertex"),
            },
            (Some((_, ut)), None) => case == 16 && ut,
            (None, None) => false,
        }
    };
    let mut rows = vec![0u64; n];
    for (u, row) in rows.iter_mut().enumerate() {
        for v in 0..n {
            if u != v && arc(u, v) {
                *row |= 1 << v;
            }
        }
    }
    Ok(FiniteStructure::from_bit_rows(
        n,
        1,
        true,
        Kind::OrderedBinary,
        vec![rows],
    )?)
}

fn build_clique_sum(
    block_size: Option<usize>,
    m: usize,
) -> Result<FiniteStructure, FamilyError> {
    // Stage m holds blocks of sizes min(1, b), ..., min(m, b) in order. Any
    // multiset of component sizes summing to n <= m fits: sort it
    // descending and serve part i from block m - i.
    let n = truncation_vertices(&FamilySpec::CliqueSum { block_size }, m);
    let mut edges = Vec::new();
    let mut base = 0;
    for t in 1..=m {
        let size = t.min(block_size.unwrap_or(t));
        for u in base..base + size {
            for v in u + 1..base + size {
                edges.push((u, v));
            }
        }
        base += size;
    }
    debug_assert_eq!(base, n);
    Ok(FiniteStructure::graph_from_edges(n, &edges)?)
}

fn build_lex_chain(blocks: u8, m: usize) -> Result<FiniteStructure, FamilyError> {
    // Vertex t has category min(t, blocks - 1); the last category is the
    // chain tail. A vertex relates to every later vertex by its category's
    // pattern, so the truncations are nested and the tail is an interval of
    // the whole structure.
    let pattern = |v: usize| -> (bool, bool) {
        let c = v.min(blocks as usize - 1);
        if c + 1 < blocks as usize {
            [(true, true), (false, true), (false, false)][c]
        } else {
            (true, false)
        }
    };
    let mut rows = vec![0u64; m];
    for u in 0..m {
        let (fwd, back) = pattern(u);
        for v in u + 1..m {
            if fwd {
                rows[u] |= 1 << v;
            }
            if back {
                rows[v] |= 1 << u;
            }
        }
    }
    Ok(FiniteStructure::from_bit_rows(
        m,
        1,
        true,
        Kind::OrderedBinary,
        vec![rows],
    )?)
}

/// Profile of a family together with how it was obtained.
#[derive(Debug, Clone)]
pub struct GrowthReport {
    pub family: String,
    /// Isomorphism type counts for n = 0..=nmax.
    pub phi: Vec<u64>,
    /// Per n, the first stage whose sweep already produced the final count.
    pub m_used: Vec<usize>,
    /// Monomorphic dimension per truncation prefix, as (vertices, dim_mon)
    /// pairs. Only filled by the growth classifier, and only for ordered
    /// families.
    pub dim_mon: Option<Vec<(usize, usize)>>,
    pub classification: GrowthClass,
}

#[derive(Debug, Clone, PartialEq)]
pub enum GrowthClass {
    Unclassified,
    PolynomialCandidate,
    ExponentialLowerBound {
        /// Smallest observed phi(n+1)/phi(n) over the tail window, a
        /// per-step growth factor the profile provably exceeds.
        ratio: f64,
    },
}

/// Counts isomorphism types of n-vertex substructures for every n <= nmax.
///
/// Sweeps all n-subsets of `materialize(family, m)` starting at m = nmax and
/// grows m until two consecutive stages agree on every count. Counts are
/// non-decreasing in m because truncations are nested, so agreement means
/// the sweep stopped finding new types.
pub fn profile(family: &FamilySpec, nmax: usize) -> Result<GrowthReport, FamilyError> {
    family.validate()?;
    let m0 = nmax.max(1);
    // Saturation always compares two stages, so stage m0 + 1 must fit the
    // vertex cap before the first sweep is worth starting.
    ensure_fits(family, m0)?;
    ensure_fits(family, m0 + 1)?;
    ensure_affordable(family, m0, nmax)?;
    ensure_affordable(family, m0 + 1, nmax)?;
    let mut history = vec![stage_counts(family, m0, nmax)?];
    let mut stage = m0;
    loop {
        ensure_fits(family, stage + 1)?;
        ensure_affordable(family, stage + 1, nmax)?;
        let next = stage_counts(family, stage + 1, nmax)?;
        let done = next == *history.last().unwrap();
        history.push(next);
        if done {
            break;
        }
        stage += 1;
    }
    let phi = history.last().unwrap().clone();
    let m_used = (0..=nmax)
        .map(|n| {
            m0 + history
                .iter()
                .position(|counts| counts[n] == phi[n])
                .unwrap()
        })
        .collect();
    Ok(GrowthReport {
        family: family.name(),
        phi,
        m_used,
        dim_mon: None,
        classification: GrowthClass::Unclassified,
    })
}

fn ensure_fits(family: &FamilySpec, stage: usize) -> Result<(), FamilyError> {
    let vertices = truncation_vertices(family, stage);
    if vertices > MAX_VERTICES {
        return Err(FamilyError::Unsaturated {
            family: family.name(),
            stage,
            vertices,
            cap: MAX_VERTICES,
        });
    }
    Ok(())
}

/// Cap on canonicalizations a single stage sweep may schedule.
const SWEEP_BUDGET: u64 = 100_000_000;

fn ensure_affordable(
    family: &FamilySpec,
    stage: usize,
    nmax: usize,
) -> Result<(), FamilyError> {
    let estimated = sweep_cost(truncation_vertices(family, stage), nmax);
    if estimated > SWEEP_BUDGET {
        return Err(FamilyError::SweepBudget {
            family: family.name(),
            stage,
            estimated,
            budget: SWEEP_BUDGET,
        });
    }
    Ok(())
}

fn sweep_cost(vertices: usize, nmax: usize) -> u64 {
    (0..=nmax.min(vertices)).map(|n| binomial(vertices, n)).sum()
}

fn binomial(n: usize, r: usize) -> u64 {
    let r = r.min(n - r);
    let mut acc: u128 = 1;
    for i in 0..r {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    u64::try_from(acc).unwrap_or(u64::MAX)
}

fn stage_counts(
    family: &FamilySpec,
    stage: usize,
    nmax: usize,
) -> Result<Vec<u64>, FamilyError> {
    let r = materialize(family, stage)?;
    Ok((0..=nmax)
        .map(|n| {
            if n > r.n() {
                return 0;
            }
            let codes = subsets_of_size(r.n(), n)
                .par_bridge()
                .fold(BTreeSet::new, |mut acc: BTreeSet<CanonicalCode>, mask| {
                    acc.insert(canonical_code(&r.restrict_mask(mask)));
                    acc
                })
                .reduce(BTreeSet::new, |mut a, b| {
                    a.extend(b);
                    a
                });
            codes.len() as u64
        })
        .collect())
}

/// The registered closed form for phi(n), exceptions included.
pub fn closed_form(family: &FamilySpec, n: usize) -> Result<u64, FamilyError> {
    family.validate()?;
    let value = match *family {
        FamilySpec::Ch6 { index } => match index {
            0 => two_stable_distinct(n),
            1 => half_graph_phi(n),
            2 => partition_count(n),
            3 => match n {
                0 | 1 => 1,
                2 => 2,
                _ if n % 2 == 0 => (n * n + 4 * n - 8) as u64 / 4,
                _ => (n * n + 4 * n - 9) as u64 / 4,
            },
            4 => matching_clique_phi(n),
            5 => match n {
                0..=4 => [1, 1, 2, 4, 11][n],
                _ => (1u64 << n) - 6,
            },
            6 => match n {
                0 | 1 => 1,
                _ => (1u64 << (n - 1)) + (1u64 << (n - 2)) - n as u64 + 1,
            },
            _ => unreachable!("validated"),
        },
        FamilySpec::Fig { index } => match index {
            1 | 10 => n as u64 / 2 + 1,
            2 | 9 => half_graph_phi(n),
            3 | 8 => two_stable_distinct(n),
            4 | 7 => matching_clique_phi(n),
            5 | 6 => {
                if n == 0 {
                    1
                } else {
                    1u64 << (n - 1)
                }
            }
            _ => unreachable!("validated"),
        },
        FamilySpec::OrderedTemplate { case, .. } => match case {
            1 => {
                let (mut a, mut b) = (1u64, 1u64);
                for _ in 1..n {
                    let c = a + b;
                    a = b;
                    b = c;
                }
                b
            }
            4 => match n {
                0 | 1 => 1,
                2 => 2,
                _ => (1u64 << n) - n as u64,
            },
            7 => {
                if n == 0 {
                    1
                } else {
                    (1u64 << n) - 1
                }
            }
            13 => {
                if n == 0 {
                    1
                } else {
                    1u64 << (n - 1)
                }
            }
            16 => match n {
                0 | 1 => 1,
                _ => (1u64 << (n - 1)) + 1,
            },
            _ => unreachable!("validated"),
        },
        FamilySpec::CliqueSum { block_size: None } | FamilySpec::InfinitePath => {
            partition_count(n)
        }
        FamilySpec::CliqueSum {
            block_size: Some(b),
        } => series::partition_at_most(n, b)
            .coeff(n)
            .to_u64()
            .expect("partition counts at checked sizes fit u64"),
        FamilySpec::FibonacciWordCoding | FamilySpec::LexChainSum { .. } => {
            return Err(FamilyError::NoFormula(family.name()))
        }
    };
    Ok(value)
}

/// Two stable rows with the i != j cross rule: quadratic, split by parity,
/// with the single exception phi(2) = 2.
fn two_stable_distinct(n: usize) -> u64 {
    match n {
        0 | 1 => 1,
        2 => 2,
        _ if n % 2 == 0 => ((n * n + 6 * n + 8) / 8) as u64,
        _ => ((n * n + 4 * n + 3) / 8) as u64,
    }
}

/// Half graph on two stable rows: phi steps by 2^(n-3), plus 2^((n-4)/2) at
/// even n.
fn half_graph_phi(n: usize) -> u64 {
    let mut phi = 1u64;
    for i in 2..=n {
        phi = match i {
            2 => 2,
            _ if i % 2 == 1 => phi + (1 << (i - 3)),
            _ => phi + (1 << (i - 3)) + (1 << ((i - 4) / 2)),
        };
    }
    phi
}

/// Clique row matched onto a stable row: quadratic, split by parity.
fn matching_clique_phi(n: usize) -> u64 {
    match n {
        0 | 1 => 1,
        2 => 2,
        _ if n % 2 == 1 => ((n * n + 4 * n - 5) / 4) as u64,
        _ => ((n * n + 4 * n - 4) / 4) as u64,
    }
}

fn partition_count(n: usize) -> u64 {
    series::partition_numbers(n)
        .coeff(n)
        .to_u64()
        .expect("partition counts at checked sizes fit u64")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FormulaCheck {
    pub n: usize,
    pub expected: u64,
    pub observed: u64,
    pub pass: bool,
}

/// Compares the computed profile against the registered closed form for
/// every n <= nmax.
pub fn closed_form_check(
    family: &FamilySpec,
    nmax: usize,
) -> Result<Vec<FormulaCheck>, FamilyError> {
    let report = profile(family, nmax)?;
    (0..=nmax)
        .map(|n| {
            let expected = closed_form(family, n)?;
            let observed = report.phi[n];
            Ok(FormulaCheck {
                n,
                expected,
                observed,
                pass: expected == observed,
            })
        })
        .collect()
}

/// Prefix of the Fibonacci word: iterate 0 -> 01, 1 -> 0 from "0" and cut.
pub fn fibonacci_word(length: usize) -> Vec<u8> {
    if length == 0 {
        return Vec::new();
    }
    let mut w = vec![0u8];
    while w.len() < length {
        let mut next = Vec::with_capacity(2 * w.len());
        for &c in &w {
            if c == 0 {
                next.extend_from_slice(&[0, 1]);
            } else {
                next.push(0);
            }
        }
        w = next;
    }
    w.truncate(length);
    w
}

/// Number of distinct length-n factors of `word`. The word must be at least
/// 3n long (margin 2n beyond the last window) so an under-sampled count is
/// rejected instead of silently returned.
pub fn factor_count(word: &[u8], n: usize) -> Result<usize, FamilyError> {
    if n == 0 {
        return Ok(1);
    }
    let need = 3 * n;
    if word.len() < need {
        return Err(FamilyError::WordTooShort {
            len: word.len(),
            n,
            need,
        });
    }
    Ok(word.windows(n).collect::<BTreeSet<_>>().len())
}

/// The word as a structure: one vertex per position, consecutivity arcs
/// i -> i+1 in the first relation, and the letter stored as a loop in the
/// second (position i loops exactly when word[i] = 1).
pub fn word_structure(word: &[u8]) -> Result<FiniteStructure, FamilyError> {
    let n = word.len();
    let mut step = vec![0u64; n];
    let mut letter = vec![0u64; n];
    for (i, &c) in word.iter().enumerate() {
        if i + 1 < n {
            step[i] |= 1 << (i + 1);
        }
        if c != 0 {
            letter[i] |= 1 << i;
        }
    }
    Ok(FiniteStructure::from_bit_rows(
        n,
        2,
        false,
        Kind::Generic,
        vec![step, letter],
    )?)
}

/// Number of isomorphism types of indecomposable n-vertex substructures of
/// `word_structure(word)`, skipping pairs with no relation between their two
/// vertices (such a pair is a direct sum of singletons and corresponds to no
/// factor). Only runs of consecutive positions can qualify: any other subset
/// is disconnected, and a disconnected structure on 3 or more vertices has a
/// component as a proper interval.
pub fn word_prime_type_count(word: &[u8], n: usize) -> Result<usize, FamilyError> {
    if n == 0 || word.is_empty() {
        return Ok((n == 0) as usize);
    }
    if n > word.len() {
        return Ok(0);
    }
    let r = word_structure(word)?;
    let ones = if n >= 64 { u64::MAX } else { (1u64 << n) - 1 };
    let mut codes = BTreeSet::new();
    for start in 0..=word.len() - n {
        let sub = r.restrict_mask(ones << start);
        if moddec::is_indecomposable(&sub) {
            codes.insert(canonical_code(&sub));
        }
    }
    Ok(codes.len())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn by_name(name: &str) -> FamilySpec {
        FamilySpec::parse(name).unwrap()
    }

    fn edge_set(r: &FiniteStructure) -> BTreeSet<(usize, usize)> {
        let mut edges = BTreeSet::new();
        for u in 0..r.n() {
            for v in u + 1..r.n() {
                if r.get(0, u, v) {
                    edges.insert((u, v));
                }
            }
        }
        edges
    }

    #[test]
    fn registry_names_parse_back_to_their_specs() {
        assert!(REGISTRY.len() >= 20);
        for entry in REGISTRY {
            let spec = by_name(entry.name);
            assert_eq!(spec, entry.spec, "{}", entry.name);
            assert_eq!(spec.name(), entry.name);
            assert!(!entry.description.is_empty());
        }
        assert_eq!(
            by_name("clique-sum:3"),
            FamilySpec::CliqueSum { block_size: Some(3) }
        );
        assert!(FamilySpec::parse("clique-sum:0").is_err());
        assert!(FamilySpec::parse("lexsum7").is_err());
        assert!(FamilySpec::parse("nonesuch").is_err());
    }

    #[test]
    fn unimplemented_template_parameters_are_rejected() {
        let bad_order = FamilySpec::OrderedTemplate {
            order_type: 3,
            case: 1,
        };
        assert!(matches!(
            materialize(&bad_order, 2),
            Err(FamilyError::UnsupportedOrderType(3))
        ));
        let bad_case = FamilySpec::OrderedTemplate {
            order_type: 1,
            case: 5,
        };
        assert!(matches!(
            materialize(&bad_case, 2),
            Err(FamilyError::UnsupportedCase(5))
        ));
    }

    #[test]
    fn g0_on_two_pairs_is_a_double_edge() {
        let r = materialize(&by_name("g0"), 2).unwrap();
        assert_eq!(r.n(), 4);
        assert_eq!(r.kind(), Kind::Graph);
        // vertices 0 = (0,0), 1 = (0,1), 2 = (1,0), 3 = (1,1)
        assert_eq!(edge_set(&r), BTreeSet::from([(0, 3), (1, 2)]));
    }

    #[test]
    fn g2_truncations_are_paths() {
        for m in 1..=4 {
            let r = materialize(&by_name("g2"), m).unwrap();
            let expected: BTreeSet<(usize, usize)> =
                (1..r.n()).map(|v| (v - 1, v)).collect();
            assert_eq!(edge_set(&r), expected, "m = {m}");
        }
    }

    #[test]
    fn g6_extras_wire_up_as_described() {
        let r = materialize(&by_name("g6"), 2).unwrap();
        // 0 = a, 1 = b, then (0,0), (0,1), (1,0), (1,1)
        assert_eq!(r.n(), 6);
        let edges = edge_set(&r);
        assert!(edges.contains(&(0, 1)), "the edge ab");
        assert!(edges.contains(&(0, 2)) && edges.contains(&(0, 4)), "a in the clique");
        assert!(!edges.contains(&(1, 2)) && !edges.contains(&(1, 3)), "b pendant");
        assert!(edges.contains(&(2, 4)), "bottom row clique");
        assert!(!edges.contains(&(3, 5)), "top row stable");
        assert!(edges.contains(&(2, 3)) && edges.contains(&(2, 5)), "cross i <= j");
        assert!(!edges.contains(&(3, 4)), "no cross from a later bottom to an earlier top");
    }

    #[test]
    fn t_fib_single_pair_is_one_arc() {
        let r = materialize(&by_name("t-fib"), 1).unwrap();
        assert_eq!((r.n(), r.k(), r.ordered()), (2, 1, true));
        assert_eq!(r.kind(), Kind::OrderedBinary);
        assert!(r.get(0, 0, 1));
        assert!(!r.get(0, 1, 0));
        assert!(r.is_irreflexive(0));
    }

    #[test]
    fn template_extras_come_first() {
        let r = materialize(&by_name("t-half"), 2).unwrap();
        assert_eq!(r.n(), 5);
        // 0 = a, then (0,0), (0,1), (1,0), (1,1); arcs a -> top only
        for v in 1..5 {
            assert_eq!(r.get(0, 0, v), v % 2 == 0, "v = {v}");
            assert!(!r.get(0, v, 0));
        }
        let r1 = materialize(&by_name("t-half1"), 2).unwrap();
        for v in 1..5 {
            assert_eq!(r1.get(0, 0, v), v % 2 == 1, "a sends to bottom");
            assert_eq!(r1.get(0, v, 0), v % 2 == 0, "top sends to a");
        }
    }

    #[test]
    fn truncations_are_nested() {
        for entry in REGISTRY {
            let m = 3;
            let small = materialize(&entry.spec, m).unwrap();
            let big = materialize(&entry.spec, m + 1).unwrap();
            let prefix = big
                .restrict(&(0..small.n()).collect::<Vec<_>>())
                .unwrap();
            for i in 0..small.k() {
                for x in 0..small.n() {
                    for y in 0..small.n() {
                        assert_eq!(
                            small.get(i, x, y),
                            prefix.get(i, x, y),
                            "{} i={i} x={x} y={y}",
                            entry.name
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn g0_profile_matches_known_values() {
        let report = profile(&by_name("g0"), 7).unwrap();
        assert_eq!(report.phi, vec![1, 1, 2, 3, 6, 6, 10, 10]);
        assert!(report.m_used.iter().all(|&m| m <= 8));
    }

    #[test]
    fn clique_sum_profile_is_the_partition_sequence() {
        let report = profile(&by_name("clique-sum"), 5).unwrap();
        let expected: Vec<u64> = (0..=5).map(partition_count).collect();
        assert_eq!(report.phi, expected);
        assert_eq!(report.phi[5], 7);
    }

    #[test]
    fn capped_clique_sum_counts_partitions_with_bounded_parts() {
        let report = profile(&by_name("clique-sum:2"), 6).unwrap();
        // partitions of n into parts of size at most 2
        assert_eq!(report.phi, vec![1, 1, 2, 2, 3, 3, 4]);
        let checks = closed_form_check(&by_name("clique-sum:2"), 6).unwrap();
        assert!(checks.iter().all(|c| c.pass));
    }

    #[test]
    fn profile_rejects_sweeps_beyond_the_budget() {
        let err = profile(&by_name("path"), 30).unwrap_err();
        assert!(matches!(err, FamilyError::SweepBudget { stage: 30, .. }));
    }

    #[test]
    fn profile_reports_saturation_failure_instead_of_truncating() {
        let err = profile(&by_name("clique-sum"), 10).unwrap_err();
        match err {
            FamilyError::Unsaturated { stage, vertices, cap, .. } => {
                assert_eq!(stage, 11);
                assert_eq!(vertices, 66);
                assert_eq!(cap, 64);
            }
            other => panic!("expected saturation failure, got {other}"),
        }
    }

    #[test]
    fn lexsum3_profile_is_eventually_constant_four() {
        let report = profile(&by_name("lexsum3"), 5).unwrap();
        assert_eq!(report.phi, vec![1, 1, 3, 4, 4, 4]);
    }

    #[test]
    fn half_graph_closed_form_matches_its_first_values() {
        let expected = [1u64, 1, 2, 3, 6, 10, 20, 36, 72, 136];
        for (n, &e) in expected.iter().enumerate() {
            assert_eq!(half_graph_phi(n), e, "n = {n}");
        }
    }

    #[test]
    fn g6_closed_form_check_passes() {
        let checks = closed_form_check(&by_name("g6"), 6).unwrap();
        let observed: Vec<u64> = checks.iter().map(|c| c.observed).collect();
        assert_eq!(observed, vec![1, 1, 2, 4, 9, 20, 43]);
        assert!(checks.iter().all(|c| c.pass));
    }

    #[test]
    fn formulas_are_not_registered_for_word_families() {
        assert!(matches!(
            closed_form(&by_name("fib-word"), 3),
            Err(FamilyError::NoFormula(_))
        ));
        assert!(matches!(
            closed_form(&by_name("lexsum3"), 3),
            Err(FamilyError::NoFormula(_))
        ));
    }

    #[test]
    fn fibonacci_word_prefix_is_correct() {
        assert_eq!(
            fibonacci_word(13),
            vec![0, 1, 0, 0, 1, 0, 1, 0, 0, 1, 0, 0, 1]
        );
        assert!(fibonacci_word(0).is_empty());
        assert_eq!(fibonacci_word(1), vec![0]);
    }

    #[test]
    fn factor_counts_with_margin() {
        let w = fibonacci_word(20);
        assert_eq!(factor_count(&w, 0).unwrap(), 1);
        assert_eq!(factor_count(&w, 1).unwrap(), 2);
        assert_eq!(factor_count(&w, 2).unwrap(), 3);
        assert!(matches!(
            factor_count(&w, 7),
            Err(FamilyError::WordTooShort { need: 21, .. })
        ));
    }

    #[test]
    fn word_structure_places_arcs_and_loops() {
        let r = word_structure(&[0, 1, 0]).unwrap();
        assert_eq!((r.n(), r.k(), r.ordered()), (3, 2, false));
        assert!(r.get(0, 0, 1) && r.get(0, 1, 2));
        assert!(!r.get(0, 1, 0) && !r.get(0, 0, 2));
        assert!(r.get(1, 1, 1));
        assert!(!r.get(1, 0, 0) && !r.get(1, 2, 2));
    }

    #[test]
    fn word_prime_types_match_factor_counts_on_a_short_prefix() {
        let w = fibonacci_word(30);
        for n in 1..=4 {
            assert_eq!(
                word_prime_type_count(&w, n).unwrap(),
                n + 1,
                "n = {n}"
            );
        }
    }
}
