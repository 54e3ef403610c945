#![cfg_attr(not(feature = "std"), no_std)]

//! Fusion frames built from oblique (non-orthogonal) projections.
//!
//! A fusion frame here is a finite family of weighted idempotent matrices
//! `{(P_i, v_i)}` on real N-space. The associated operator
//! `S = sum_i v_i^2 P_i' P_i` is symmetric positive semidefinite; the family
//! is a frame when the smallest eigenvalue of `S` is positive, tight when
//! `S` is a multiple of the identity, and Parseval when `S = I`. Dropping
//! the usual requirement that each `P_i` be an *orthogonal* projection buys
//! structure that orthogonal families cannot have: single-column analysis
//! operators, prescribed diagonal Gram matrices, block-sparse or triangular
//! projection matrices.
//!
//! The crate is organised bottom up:
//!
//! * [`matrix`], [`linalg`]: dense row-major `f64` matrices and the small
//!   factorization kit used everywhere (pivoted Householder QR, modified
//!   Gram-Schmidt, cyclic Jacobi eigendecomposition, pivoted elimination).
//! * [`subspace`]: subspaces as explicit basis matrices.
//! * [`projection`]: oblique projections determined by a range and a
//!   nullspace, plus the structured constructions (block-sparse,
//!   triangular, tilted-axes).
//! * [`fusion`]: weighted families, the frame operator, bounds and
//!   structure reports.
//! * [`construct`]: Parseval families from an arbitrary spanning set,
//!   diagonal-Gram searches, prescribed diagonals and tight families built
//!   from coordinate chains.
//! * [`pffs`]: pseudoframes for subspaces (analysis vectors perturbed off
//!   the subspace, synthesis by duals inside it).
//!
//! Everything is deterministic: ties in pivot selection always resolve to
//! the lowest index, search orders are lexicographic, and no randomness is
//! used anywhere in the library.
//!
//! The crate is `no_std`-compatible (`alloc` required): disable the default
//! `std` feature and enable `libm` instead.

extern crate alloc;

#[cfg(all(not(feature = "std"), not(feature = "libm")))]
compile_error!("fusionframes needs either the `std` feature or the `libm` feature");

pub mod construct;
mod error;
pub mod fusion;
pub mod linalg;
pub mod matrix;
pub mod pffs;
pub mod projection;
mod scalar;
pub mod subspace;
mod tol;

pub use error::Error;
pub use fusion::{FusionFrame, OperatorReport, WeightedProjection};
pub use matrix::Matrix;
pub use projection::{GramMatrix, ObliqueProjection};
pub use subspace::Subspace;
pub use tol::Tolerances;

/// Crate-wide result type.
pub type Result<T> = core::result::Result<T, Error>;
