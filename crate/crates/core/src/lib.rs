//! Numerical q-calculus and q-order-statistics toolkit.
//!
//! The crate provides, in dependency order:
//!
//! - [`qcore`]: q-arithmetic, q-special functions, the q-difference
//!   operator, and Jackson/Fermat q-integration (scalar and nested);
//! - [`qidentity`]: brute-force combinatorial oracles verifying the
//!   q-series identities the rest of the crate relies on;
//! - [`qorderstat`]: the q-uniform law and the distribution/density
//!   functions of q-ordered random variables, in both generic-CDF and
//!   closed q-uniform form, with normalization and consistency verifiers;
//! - [`heine`]: Heine-process simulation, its pmf with a Poisson-binomial
//!   dynamic-programming oracle, and the conditional waiting-time checks;
//! - [`suite`]: the full verification suite, aggregating everything above
//!   into a machine-readable report;
//! - [`cli`]: the `qstat` command-line front end.
//!
//! Every computation is parameterized by a validated [`QParam`]; infinite
//! products and sums carry explicit [`TruncationBound`]s. All evaluation is
//! pure; sampling takes an explicitly seeded random source.

pub mod cli;
pub mod error;
pub mod heine;
pub mod param;
pub mod qcore;
pub mod qidentity;
pub mod qorderstat;
pub mod report;
pub mod suite;

pub use error::{QError, Result};
pub use param::{QGrid, QParam, TruncationBound};
