// SPDX-License-Identifier: AGPL-3.0-only

//! Error type shared by every module of the crate.

use thiserror::Error;

use crate::lattice::Site;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// Malformed input: bad edge profile, wrong dimension, non-positive tolerance.
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// π⟨ω,m⟩+φ lands on π/2 mod π, so the coupling constant is infinite.
    #[error("degenerate phase at m = {site}: distance to pi/2 mod pi is {distance:e}")]
    DegeneratePhase { site: Site, distance: f64 },

    /// ⟨ω,m⟩ is an integer for some non-zero m.
    #[error("rational frequency: <omega, m> = {value} is an integer at m = {site}")]
    Rational { site: Site, value: f64 },

    /// The energy sits on (or within the guard of) a Dirichlet eigenvalue of an edge.
    #[error("energy {energy} is within the Dirichlet guard of direction {direction} (|s(l)| = {s_end:e})")]
    NearDirichlet {
        direction: usize,
        energy: f64,
        s_end: f64,
    },

    #[error("quadrature did not converge at lambda = {lambda}: {detail}")]
    Convergence { lambda: f64, detail: String },

    #[error("small divisor |1 - exp(2 pi i <omega,n>)| = {divisor:e} at n = {mode}")]
    SmallDivisor { mode: Site, divisor: f64 },

    #[error("root solver failed: {0}")]
    Solver(String),

    #[error("resource limit: dimension {dimension} exceeds cap {cap}")]
    Resource { dimension: usize, cap: usize },

    #[error("numerical failure: {0}")]
    Numerical(String),

    /// A quantity that must hold by construction (e.g. σ′ > 0) was violated.
    #[error("internal consistency violated: {0}")]
    InternalConsistency(String),

    #[error("configuration error: {0}")]
    Config(String),
}

impl Error {
    /// `true` for errors caused by the user's parameters rather than numerics.
    pub fn is_invalid_input(&self) -> bool {
        matches!(
            self,
            Error::InvalidInput(_)
                | Error::DegeneratePhase { .. }
                | Error::Rational { .. }
                | Error::Config(_)
        )
    }
}
