//! Numerical toolkit for the limit q-Bernstein operator `B_q`.
//!
//! The crate is organised in three layers:
//!
//! - [`qseries`]: q-Pochhammer symbols, the weights `p_k(q;x)`, their full and
//!   strided sums, and the weight-domination margin `p_k(q^m;x) - p_{mk}(q;x)`.
//! - [`quadrature`]: the equal-weight open rule `Q_m`, its Peano kernel, composite
//!   errors on finite and semi-infinite intervals, kernel moments and the small
//!   family of inequalities built on top of them.
//! - [`operator`]: application of `B_q` to continuous functions, extremal test
//!   functions, power-relation detection and estimates of `||B_q - B_r||`.
//!
//! The [`cli`] module holds the command implementations behind the `qbern`
//! binary; each command returns a serialisable report.

#![allow(clippy::neg_cmp_op_on_partial_ord)] // `!(x > 0.0)` also rejects NaN
pub mod cli;
pub mod error;
pub mod integrate;
pub mod operator;
pub mod qseries;
pub mod quadrature;
pub mod sum;

pub use error::{Error, Result};
pub use qseries::{QParam, TruncationPolicy};
