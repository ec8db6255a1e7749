//! Dimensionality reduction and clustering on graph Laplacians.
//!
//! Everything in this crate is built around one pipeline: construct a
//! neighborhood graph from data points ([`graph`]), derive a Laplacian or
//! normalized kernel from it ([`laplacian`]), and solve a symmetric or
//! generalized-symmetric eigenvalue problem ([`linalg`]) whose extreme
//! eigenvectors give the embedding. The method modules differ only in which
//! matrices enter the eigenproblem:
//!
//! | Module | Problem | Output |
//! |--------|---------|--------|
//! | [`cluster`] | `(L, I)` or `(L, D)` | spectral embedding + k-means / sign split |
//! | [`eigenmap`] | `(L, I)` or `(L, D)` | nonlinear embedding + Nyström extension |
//! | [`lpp`] | `(X L Xᵀ, X D Xᵀ)` | linear projection directions |
//! | [`ge`] | pluggable `(L, B)` | unified framework covering ten classical methods |
//! | [`diffusion`] | random-walk operator spectrum | diffusion embeddings and distances |
//!
//! All solvers are dense, single-path, and deterministic: identical inputs
//! produce bit-identical outputs across runs and thread counts.

pub mod cluster;
pub mod datasets;
pub mod diffusion;
mod error;
pub mod ge;
pub mod graph;
pub mod laplacian;
pub mod linalg;
pub mod lpp;
pub mod eigenmap;
pub mod persist;
#[doc(hidden)]
pub mod testutil;

pub use error::{Error, Result};

/// Library version, recorded in run manifests.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
