// SPDX-License-Identifier: AGPL-3.0-only

//! Builds graph eigenfunctions of the canonical chain and checks vertex
//! continuity, the δ-coupling flux condition, the edge ODE and the decay of
//! the lattice eigenvector.
//!
//!     cargo run --release --example eigenfunction_profile

use std::f64::consts::PI;

use quasigraph::lattice::spectral_gaps;
use quasigraph::{GraphModel, MarylandParams, Result, SpectralSolver};

fn main() -> Result<()> {
    let omega = (5f64.sqrt() - 1.0) / 2.0;
    let model = GraphModel::free(1, 1.0)?;
    let params = MarylandParams::new(1.0, vec![omega], 0.0)?;
    let solver = SpectralSolver::new(&model, &params)?;
    let gap = spectral_gaps(&model, 0.0, PI * PI + 1.0)?[0];

    let mut records = solver.enumerate(&gap, 8)?.records;
    records.sort_by_key(|r| (r.m.norm_inf(), r.m));
    println!(
        "{:>4} {:>12} {:>10} {:>10} {:>10} {:>10} {:>8} {:>10}",
        "m", "lambda", "continuity", "flux", "ode(h)", "ode(h/2)", "slope", "R^2"
    );
    for r in &records {
        let u = solver.lattice_eigenvector(r, 24)?;
        let f = solver.graph_eigenfunction(&u)?;
        let a = f.ode_check(&r.m, 3, 1e-3, 7)?;
        let b = f.ode_check(&r.m, 3, 5e-4, 7)?;
        let fit = u.decay.expect("decay fit");
        println!(
            "{:>4} {:>12.8} {:>10.2e} {:>10.2e} {:>10.2e} {:>10.2e} {:>8.4} {:>10.5}",
            r.m.to_string(),
            r.lambda,
            f.continuity_error()?,
            f.flux_residual()?,
            a.max_residual,
            b.max_residual,
            fit.slope,
            fit.r2
        );
    }

    // edge profile around the m = 0 vertex
    if let Some(r) = records.iter().find(|r| r.m.is_origin()) {
        let f = solver.graph_eigenfunction(&solver.lattice_eigenvector(r, 24)?)?;
        for (t, v) in f.sample_edge(&r.m, 0, 5)? {
            println!("f_(0,0)({t:.2}) = {:+.6}", v.re);
        }
    }
    Ok(())
}
