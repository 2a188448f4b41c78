// SPDX-License-Identifier: AGPL-3.0-only

//! The eigenvalues λ(m) fill the gap densely: the largest spacing between
//! neighbours in (0.1, 9.5) shrinks as the index box grows.
//!
//!     cargo run --release --example denseness

use std::f64::consts::PI;

use quasigraph::lattice::spectral_gaps;
use quasigraph::{GraphModel, MarylandParams, Result, SpectralSolver};

fn main() -> Result<()> {
    let model = GraphModel::free(1, 1.0)?;
    let params = MarylandParams::new(1.0, vec![(5f64.sqrt() - 1.0) / 2.0], 0.0)?;
    let solver = SpectralSolver::new(&model, &params)?;
    let gap = spectral_gaps(&model, 0.0, PI * PI + 1.0)?[0];
    let (lo, hi) = (0.1, 9.5);

    for radius in [2, 4, 8, 16] {
        let run = solver.enumerate(&gap, radius)?;
        let mut pts = vec![lo];
        pts.extend(run.records.iter().map(|r| r.lambda).filter(|&l| l > lo && l < hi));
        pts.push(hi);
        let spacing = pts.windows(2).map(|w| w[1] - w[0]).fold(0.0, f64::max);
        println!(
            "index radius {radius:>2}: {:>3} eigenvalues, max spacing {spacing:.4}, {} unresolved",
            pts.len() - 2,
            run.failures.len()
        );
    }
    Ok(())
}
