//! Enumeration, decomposition, and profile verification for finite binary
//! relational structures.
//!
//! The base objects are structures with at most 64 vertices carrying k binary
//! relations, optionally equipped with an intrinsic total order (the vertex
//! index order). On top of that the crate provides canonical forms and
//! embedding tests ([`canon`], [`embed`]), permutations and their encoding as
//! bichains ([`perm`]), Gallai decomposition ([`moddec`]), separable
//! structures and their tree codes ([`separable`]), monomorphic decomposition
//! and k-equivalence ([`monomorph`]), a catalog of infinite structures with
//! computable profiles ([`families`]), and exact integer power series for
//! checking counting sequences and generating functions ([`series`]).

pub mod canon;
pub mod embed;
pub mod families;
pub mod moddec;
pub mod monomorph;
pub mod perm;
pub mod separable;
pub mod series;
pub mod structure;

pub(crate) mod util;

pub use canon::{canonical_code, CanonicalCode};
pub use embed::{avoids_all, embeds, Embedding};
pub use structure::{FiniteStructure, Kind, ParseError, StructureError};
