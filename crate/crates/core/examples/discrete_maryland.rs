// SPDX-License-Identifier: AGPL-3.0-only

//! The classical discrete Maryland model ψ(n±1) + c·tan(ωn − a)ψ(n):
//! eigenvectors localize, measured by the inverse participation ratio.
//!
//!     cargo run --release --example discrete_maryland

use std::f64::consts::PI;

use quasigraph::oracle::{discrete_maryland, mean_inverse_participation};
use quasigraph::Result;

fn main() -> Result<()> {
    let omega = PI * (5f64.sqrt() - 1.0) / 2.0;
    let n = 64;
    for coupling in [0.0, 0.25, 1.0, 4.0] {
        let op = discrete_maryland(coupling, omega, 0.0, n)?;
        println!("coupling {coupling:>4}: mean IPR {:.4} on {} sites", mean_inverse_participation(&op)?, op.dim());
    }
    Ok(())
}
