// SPDX-License-Identifier: AGPL-3.0-only

//! Eigenvalues of the free chain (d = 1, l = 1, g = 1, golden ω, φ = 0) in
//! the first gap. λ(0) = π²/4 exactly, since σ(π²/4) = 0 by symmetry.
//!
//!     cargo run --release --example canonical_spectrum

use std::f64::consts::PI;

use quasigraph::lattice::spectral_gaps;
use quasigraph::{GraphModel, MarylandParams, Result, SpectralSolver};

fn main() -> Result<()> {
    let model = GraphModel::free(1, 1.0)?;
    let params = MarylandParams::new(1.0, vec![(5f64.sqrt() - 1.0) / 2.0], 0.0)?;
    let solver = SpectralSolver::new(&model, &params)?;
    let gap = spectral_gaps(&model, 0.0, PI * PI + 1.0)?[0];
    println!("gap ({:.6}, {:.6})", gap.lo, gap.hi);

    let run = solver.enumerate(&gap, 8)?;
    for r in &run.records {
        println!(
            "m = {:>3}  lambda = {:.12}  target {:+.6}  sigma - target {:+.1e}  residual {:.1e}",
            r.m.to_string(),
            r.lambda,
            r.target,
            r.sigma_at_lambda - r.target,
            r.residual
        );
    }
    let zero = run.records.iter().find(|r| r.m.is_origin()).expect("m = 0 is in range");
    println!("lambda(0) - pi^2/4 = {:+.2e}", zero.lambda - PI * PI / 4.0);
    Ok(())
}
