// SPDX-License-Identifier: AGPL-3.0-only

//! Two-dimensional lattice with the frequency pair (golden mean, √2 − 1):
//! σ vanishes at π²/4, λ((0,0)) = π²/4, and a 13 × 13 dense truncation
//! confirms it.
//!
//!     cargo run --release --example square_lattice

use std::f64::consts::PI;
use std::time::Instant;

use quasigraph::lattice::spectral_gaps;
use quasigraph::oracle::build_truncated;
use quasigraph::{GraphModel, MarylandParams, Result, Site, SpectralSolver};

fn main() -> Result<()> {
    let start = Instant::now();
    let omega = vec![(5f64.sqrt() - 1.0) / 2.0, 2f64.sqrt() - 1.0];
    let model = GraphModel::free(2, 1.0)?;
    let params = MarylandParams::new(1.0, omega, 0.0)?;
    let solver = SpectralSolver::new(&model, &params)?;

    let s = solver.evaluator().sigma(PI * PI / 4.0)?;
    println!("sigma(pi^2/4) = {:+.3e} (N = {})", s.sigma, s.grid_used);

    let gap = spectral_gaps(&model, 0.0, PI * PI + 1.0)?[0];
    let r = solver
        .eigenvalue_for_index(&gap, &Site::origin(2))?
        .expect("the level 0 is inside sigma(gap)");
    println!("lambda((0,0)) = {:.12}  residual {:.2e}", r.lambda, r.residual);

    let op = build_truncated(&model, &params, r.lambda, 6)?;
    println!("defect on |n| <= 6 ({} sites): {:.3e}", op.dim(), op.defect()?);

    for m in [Site::new(&[1, 0]), Site::new(&[0, 1]), Site::new(&[1, -1])] {
        match solver.eigenvalue_for_index(&gap, &m)? {
            Some(r) => println!("lambda({m}) = {:.10}  residual {:.2e}", r.lambda, r.residual),
            None => println!("lambda({m}): level outside sigma(gap)"),
        }
    }
    println!("elapsed {:.1?}", start.elapsed());
    Ok(())
}
