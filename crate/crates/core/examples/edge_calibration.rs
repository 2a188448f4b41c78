// SPDX-License-Identifier: AGPL-3.0-only

//! Fundamental solutions of −y″ + Uy = zy on one edge: Wronskian, Hill
//! discriminant and Dirichlet eigenvalues for a free and a stepped edge.
//!
//!     cargo run --release --example edge_calibration

use std::f64::consts::PI;

use num_complex::Complex64;
use quasigraph::edge::{dirichlet_spectrum, solve_edge};
use quasigraph::{EdgeProfile, Result, Segment};

fn main() -> Result<()> {
    let free = EdgeProfile::free(1.0)?;
    println!("free edge, l = 1");
    for (k, d) in dirichlet_spectrum(&free, 0.0, 26.0 * PI * PI)?.iter().enumerate() {
        let exact = ((k + 1) as f64 * PI).powi(2);
        println!("  D{} = {d:.12}  (k^2 pi^2 {:+.1e})", k + 1, d - exact);
    }

    let stepped = EdgeProfile::new(vec![
        Segment { width: 0.3, value: 0.0 },
        Segment { width: 0.4, value: 12.0 },
        Segment { width: 0.3, value: 0.0 },
    ])?;
    println!("stepped edge: U = 12 on [0.3, 0.7]");
    for d in dirichlet_spectrum(&stepped, 0.0, 120.0)? {
        println!("  Dirichlet eigenvalue {d:.10}");
    }
    for z in [Complex64::new(2.0, 0.0), Complex64::new(5.0, 1.5), Complex64::new(-3.0, -0.7)] {
        let b = solve_edge(&stepped, z);
        println!(
            "  z = {z:>9}: eta = {:.6}, |W - 1| = {:.1e}",
            b.hill_discriminant(),
            (b.wronskian() - 1.0).norm()
        );
    }
    Ok(())
}
