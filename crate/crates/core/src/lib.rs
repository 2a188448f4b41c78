// SPDX-License-Identifier: AGPL-3.0-only

//! Quasiperiodic quantum graphs with Maryland-type vertex couplings.
//!
//! A quantum graph on ℤ^d carries −d²/dt² + U_j on every edge of direction j
//! and δ-type vertex conditions f′(m) = α(m)f(m) with
//! α(m) = −g·tan(π⟨ω,m⟩ + φ). Outside the Dirichlet spectrum of the edges the
//! eigenvalue problem reduces to a lattice operator M(λ) − A that can be
//! conjugated to a pure frequency shift, which makes the point spectrum
//! explicit:
//!
//! - [`edge`]: fundamental solutions, Hill discriminant, Dirichlet spectrum.
//! - [`lattice`]: sites, couplings, the symbol M(z,θ) and spectral gaps.
//! - [`torus`]: the phase σ(λ), its derivative and the conjugator t(λ,θ).
//! - [`spectrum`]: eigenvalues λ(m), lattice eigenvectors, graph eigenfunctions.
//! - [`oracle`]: dense box truncations used to certify all of the above.
//! - [`config`], [`report`] and [`commands`]: run configuration, file
//!   formats and the commands of the `quasigraph` binary.

// `!(x < y)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod commands;
pub mod config;
pub mod dense;
pub mod edge;
pub mod error;
pub mod lattice;
pub mod oracle;
pub mod report;
pub mod spectrum;
pub mod torus;

pub use edge::{EdgeBasis, EdgeProfile, Segment};
pub use error::{Error, Result};
pub use lattice::{Gap, GraphModel, LatticeSeq, MarylandParams, Site};
pub use spectrum::{EigenRecord, GraphEigenfunction, LatticeVector, SpectralSolver};
pub use torus::{QuadratureGrid, SigmaEvaluator, SigmaValue};
