//! Embeddings between structures.
//!
//! `S` embeds in `R` when some injection of the vertices of `S` into the
//! vertices of `R` is an isomorphism onto the induced restriction of `R`,
//! all k relations and diagonals included. For ordered structures only
//! index-increasing injections qualify.

use crate::structure::{FiniteStructure, StructureError};

/// An injective vertex map witnessing an embedding; index is the source
/// vertex, value the target vertex.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Embedding {
    map: Vec<usize>,
}

impl Embedding {
    pub fn map(&self) -> &[usize] {
        &self.map
    }

    pub fn apply(&self, v: usize) -> usize {
        self.map[v]
    }
}

/// Finds the lexicographically first embedding of `s` into `r`, if any.
/// Errors when the arity counts or ordered flags differ.
pub fn embeds(
    s: &FiniteStructure,
    r: &FiniteStructure,
) -> Result<Option<Embedding>, StructureError> {
    if s.k() != r.k() {
        return Err(StructureError::ArityMismatch {
            left: s.k(),
            right: r.k(),
        });
    }
    if s.ordered() != r.ordered() {
        return Err(StructureError::OrderedMismatch {
            left: s.ordered(),
            right: r.ordered(),
        });
    }
    if s.n() > r.n() {
        return Ok(None);
    }
    let mut map = Vec::with_capacity(s.n());
    let mut used = 0u64;
    Ok(if extend(s, r, &mut map, &mut used) {
        Some(Embedding { map })
    } else {
        None
    })
}

fn extend(s: &FiniteStructure, r: &FiniteStructure, map: &mut Vec<usize>, used: &mut u64) -> bool {
    let q = map.len();
    if q == s.n() {
        return true;
    }
    // remaining source vertices still need room above the last image
    let lo = if s.ordered() {
        map.last().map_or(0, |&t| t + 1)
    } else {
        0
    };
    let hi = if s.ordered() { r.n() - (s.n() - q) + 1 } else { r.n() };
    for t in lo..hi {
        if *used >> t & 1 == 1 || !consistent(s, r, map, q, t) {
            continue;
        }
        map.push(t);
        *used |= 1 << t;
        if extend(s, r, map, used) {
            return true;
        }
        map.pop();
        *used &= !(1 << t);
    }
    false
}

fn consistent(
    s: &FiniteStructure,
    r: &FiniteStructure,
    map: &[usize],
    q: usize,
    t: usize,
) -> bool {
    for i in 0..s.k() {
        if s.get(i, q, q) != r.get(i, t, t) {
            return false;
        }
        for (u, &tu) in map.iter().enumerate() {
            if s.get(i, u, q) != r.get(i, tu, t) || s.get(i, q, u) != r.get(i, t, tu) {
                return false;
            }
        }
    }
    true
}

/// True when no member of `basis` embeds into `r`.
pub fn avoids_all(
    r: &FiniteStructure,
    basis: &[FiniteStructure],
) -> Result<bool, StructureError> {
    for b in basis {
        if embeds(b, r)?.is_some() {
            return Ok(false);
        }
    }
    Ok(true)
}
