//! Cyclic-quasi-injectivity of finite abelian groups.
//!
//! A finite abelian group `G` is cyclic-quasi-injective when every
//! homomorphism from every cyclic subgroup `H <= G` into `G` extends to an
//! endomorphism of `G`. This crate decides that property, enumerates the set
//! `X(G)` of cyclic subgroups carrying non-extendable homomorphisms, counts
//! `X(G)` and its profile classes `X(G)/~` by closed forms, and cross-checks
//! every formula against brute-force search.
//!
//! Module map:
//! - [`group`]: signatures, elements, valuations, cyclic subgroups, CRT.
//! - [`extension`]: extendability of homomorphisms, by valuation criterion
//!   and by exhaustive search over the endomorphism ring.
//! - [`counting`]: profile enumeration, orbit sizes, closed-form counts,
//!   the cyclic-quasi-injectivity decision, and inclusion-exclusion for
//!   composite orders.
//! - [`permstat`]: the permutation-code bijection and the max-jump identity
//!   tying the staircase group's class count to a sum over permutations.
//! - [`parse`]: the text and JSON grammars for group specs.

pub mod counting;
pub mod error;
pub mod extension;
pub mod group;
pub mod parse;
pub mod permstat;

pub use error::{Error, Result};
