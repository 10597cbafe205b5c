//! Balanced graph partitioning with heat-kernel walk embeddings.
//!
//! The crate provides a CSR graph type with cut statistics, CG-based shifted
//! inverses, Lanczos and rational Krylov matrix exponentials, Chebyshev
//! approximation tools for `e^{-x}` and `1/x`, and the partitioning loop that
//! either finds a balanced sparse cut or certifies that none exists.

// `!(x > t)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod expmv;
pub mod graph;
pub mod linalg;
pub mod operators;
pub mod partition;
pub mod polyapprox;
pub mod report;

#[cfg(test)]
mod testutil;

pub use error::{Error, Result};
