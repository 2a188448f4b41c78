// SPDX-License-Identifier: AGPL-3.0-only

//! Certifies every eigenvalue λ(m), |m| ≤ 8, of the canonical chain against a
//! dense truncation of M(λ) − A on |n| ≤ 32.
//!
//!     cargo run --release --example oracle_certification

use std::f64::consts::PI;

use quasigraph::lattice::spectral_gaps;
use quasigraph::oracle::build_truncated;
use quasigraph::{GraphModel, MarylandParams, Result, Site, SpectralSolver};

fn main() -> Result<()> {
    let omega = (5f64.sqrt() - 1.0) / 2.0;
    let model = GraphModel::free(1, 1.0)?;
    let params = MarylandParams::new(1.0, vec![omega], 0.0)?;
    let solver = SpectralSolver::new(&model, &params)?;
    let gap = spectral_gaps(&model, 0.0, PI * PI + 1.0)?[0];

    let n = 32;
    let run = solver.enumerate(&gap, 8)?;
    println!("{:>4} {:>14} {:>12} {:>10} {:>10}", "m", "lambda", "defect", "cosine", "grid");
    for r in &run.records {
        let op = build_truncated(&model, &params, r.lambda, n)?;
        let u = solver.lattice_eigenvector_around(r, &Site::origin(1), n)?;
        println!(
            "{:>4} {:>14.9} {:>12.3e} {:>10.6} {:>10}",
            r.m.to_string(),
            r.lambda,
            op.defect()?,
            u.similarity_with(&op)?,
            u.grid_used
        );
    }
    for (m, _, e) in &run.failures {
        println!("m = {m}: {e}");
    }
    Ok(())
}
