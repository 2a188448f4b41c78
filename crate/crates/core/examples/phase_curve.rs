// SPDX-License-Identifier: AGPL-3.0-only

//! The phase σ(λ) across the first two gaps of the canonical chain, with its
//! derivative and a finite-difference cross-check.
//!
//!     cargo run --release --example phase_curve

use std::f64::consts::PI;

use quasigraph::lattice::spectral_gaps;
use quasigraph::{GraphModel, MarylandParams, Result, SigmaEvaluator};

fn main() -> Result<()> {
    let model = GraphModel::free(1, 1.0)?;
    let params = MarylandParams::new(1.0, vec![(5f64.sqrt() - 1.0) / 2.0], 0.0)?;
    let eval = SigmaEvaluator::new(&model, &params)?;

    for gap in spectral_gaps(&model, 0.0, 4.0 * PI * PI + 1.0)?.iter().take(2) {
        println!("gap {} = ({:.6}, {:.6})", gap.id, gap.lo, gap.hi);
        println!("{:>12} {:>14} {:>12} {:>12} {:>6}", "lambda", "sigma", "sigma'", "fd", "N");
        for lambda in gap.interior_grid(11) {
            let s = eval.sigma(lambda)?;
            let sp = eval.sigma_prime(lambda, gap)?;
            let h = 1e-5 * gap.width();
            let fd = (eval.sigma(lambda + h)?.sigma - eval.sigma(lambda - h)?.sigma) / (2.0 * h);
            println!("{lambda:>12.6} {:>14.10} {sp:>12.6} {fd:>12.6} {:>6}", s.sigma, s.grid_used);
        }
    }
    Ok(())
}
