// SPDX-License-Identifier: AGPL-3.0-only

//! Diophantine diagnostics of frequency vectors: record lows of
//! dist(⟨ω,m⟩, ℤ) and an estimate of C, β in |⟨ω,m⟩ − r| ≥ C|m|^{−β}.
//!
//!     cargo run --release --example diophantine_scan

use quasigraph::lattice::validate_params;
use quasigraph::{MarylandParams, Result};

fn main() -> Result<()> {
    let golden = (5f64.sqrt() - 1.0) / 2.0;
    let cases = [
        ("golden", vec![golden]),
        ("sqrt2 - 1", vec![2f64.sqrt() - 1.0]),
        ("golden, sqrt2 - 1", vec![golden, 2f64.sqrt() - 1.0]),
        ("1/2", vec![0.5]),
    ];
    for (name, omega) in cases {
        let p = MarylandParams::new(1.0, omega, 0.1)?;
        match validate_params(&p, 64) {
            Ok(r) => {
                let lows: Vec<String> = r.record_lows.iter().map(|(s, _)| s.to_string()).collect();
                println!(
                    "{name}: C ~ {:.3e}, beta ~ {:.2}, record lows at {}",
                    r.c_est,
                    r.beta_est,
                    lows.join(" ")
                );
            }
            Err(e) => println!("{name}: rejected ({e})"),
        }
    }
    Ok(())
}
