//! Exact solving and counting for the Rummikub puzzle: arrange a bounded
//! multiset of tiles into valid runs and groups so that the sum of used
//! tile values is maximal.
//!
//! The crate is organized around five pieces:
//!
//! - [`tileset`]: parameters, tiles, hands and problems, with parsing and
//!   canonical encodings.
//! - [`groups`]: combinatorics of group formation at a single tile value.
//! - [`solver`]: the polynomial dynamic program over per-suit run states,
//!   with table-constraint and joker support, reconstruction and an
//!   independent arrangement verifier.
//! - [`oracle`]: an exhaustive reference solver used to validate the
//!   dynamic program on small instances.
//! - [`counting`]: exact counts of hands and winning hands per hand size.

pub mod counting;
pub mod groups;
pub mod oracle;
pub mod solver;
pub mod tileset;
