// SPDX-License-Identifier: AGPL-3.0-only

//! The conjugator t(λ,θ) solving (1 − U)t = f − f₀: small divisors, Fourier
//! decay and the reconstruction residual on the quadrature grid.
//!
//!     cargo run --release --example conjugator

use std::f64::consts::PI;

use quasigraph::lattice::spectral_gaps;
use quasigraph::{GraphModel, MarylandParams, QuadratureGrid, Result, SigmaEvaluator};

fn main() -> Result<()> {
    let model = GraphModel::free(1, 1.0)?;
    let params = MarylandParams::new(1.0, vec![(5f64.sqrt() - 1.0) / 2.0], 0.0)?;
    let eval = SigmaEvaluator::new(&model, &params)?;
    let gap = spectral_gaps(&model, 0.0, PI * PI + 1.0)?[0];

    for lambda in gap.interior_grid(5) {
        let grid = QuadratureGrid::new(1024, 1)?;
        let c = eval.conjugator(lambda, 511, grid)?;
        let shells = c.shell_maxima();
        println!(
            "lambda {lambda:.4}: sigma {:+.8}, min divisor {:.2e}, residual {:.2e}, |t(8)| {:.2e}, |t(64)| {:.2e}, |t(256)| {:.2e}",
            c.sigma(),
            c.min_divisor,
            c.cocycle_residual,
            shells[8],
            shells[64],
            shells[256]
        );
    }
    Ok(())
}
