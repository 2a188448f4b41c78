// SPDX-License-Identifier: AGPL-3.0-only

//! Resolvent of the lattice operator off the real axis: solve on a box, then
//! apply the untruncated M(z) − A and measure what is left.
//!
//!     cargo run --release --example krein_round_trip

use num_complex::Complex64;
use quasigraph::oracle::krein_check;
use quasigraph::{GraphModel, MarylandParams, Result, Site};

fn main() -> Result<()> {
    let model = GraphModel::free(1, 1.0)?;
    let params = MarylandParams::new(1.0, vec![(5f64.sqrt() - 1.0) / 2.0], 0.0)?;
    let z = Complex64::new(1.0, 1.0);
    for n in [4, 8, 16, 32] {
        let r = krein_check(&model, &params, z, &Site::new(&[0]), n)?;
        println!(
            "N = {n:>2}: discrepancy {:.3e}, in-box {:.1e}, cond {:.1e}",
            r.discrepancy, r.interior_discrepancy, r.condition_estimate
        );
    }
    Ok(())
}
