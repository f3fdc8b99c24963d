//! Laboratory for desk-scale statistics of the aliquot map s(n) = sigma(n) - n.
//!
//! The library is organized around a segmented sigma sieve: `sieve` produces
//! per-segment divisor sums, factorizations and k-free flags, `experiments`
//! folds mergeable accumulators over those segments, and `report` freezes the
//! results into deterministic JSON/CSV artifacts. `arith` holds the exact
//! single-integer arithmetic both routes share, and `oracle` is a deliberately
//! naive reference implementation used to cross-check every statistic.

pub mod arith;
pub mod experiments;
pub mod oracle;
pub mod report;
pub mod sieve;

pub(crate) mod util;
