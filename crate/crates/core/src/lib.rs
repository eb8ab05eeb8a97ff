//! Exact-arithmetic toolkit for bounding the number of columns of generic
//! two-row integer matrices with bounded minors.
//!
//! Everything is certified: arithmetic functions and their summatories are
//! exact, linear programs are solved over big rationals, and every use of a
//! transcendental constant goes through interval enclosures with outward
//! rounding, so each reported inequality is rigorous.
//!
//! Module map:
//! - [`interval`]: rational intervals, enclosed `sqrt`/`ln`, decimal parsing.
//! - [`consts`]: frozen enclosures of pi, gamma, zeta'(2) and derived values.
//! - [`numtheory`]: sieve tables, interval coprime counts, summatory checks.
//! - [`model`]: the two-row column-system matrices, their families, and
//!   exact minor statistics.
//! - [`reduction`]: normal form for arbitrary generic two-row matrices.
//! - [`lp`]: exact rational simplex plus the primal/dual/restricted builders.
//! - [`bounds`]: the certification layer, from per-m optima to the final
//!   threshold inequality.
//! - [`casecheck`]: finite residue-system refutations.
//! - [`oracle`]: independent brute-force search over typed matrices.

pub mod bounds;
pub mod casecheck;
pub mod consts;
pub mod error;
pub mod interval;
pub mod lp;
pub mod model;
pub mod numtheory;
pub mod oracle;
pub mod reduction;

pub use error::{Error, Result};
