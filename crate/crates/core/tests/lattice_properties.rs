// SPDX-License-Identifier: AGPL-3.0-only

use std::f64::consts::PI;

use num_complex::Complex64;
use proptest::prelude::*;
use quasigraph::lattice::symbol;
use quasigraph::oracle::build_truncated;
use quasigraph::{EdgeProfile, GraphModel, MarylandParams, Segment, Site};

const GOLDEN: f64 = 0.6180339887498949;

fn stepped_model() -> GraphModel {
    GraphModel::new(vec![
        EdgeProfile::new(vec![Segment { width: 0.4, value: 1.5 }, Segment { width: 0.6, value: -0.5 }]).unwrap(),
        EdgeProfile::constant(1.2, 0.8).unwrap(),
    ])
    .unwrap()
}

fn unit(x: f64) -> Complex64 {
    Complex64::from_polar(1.0, x)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn symbol_even_in_theta(re in 0.5f64..30.0, im in -2.0f64..2.0, a in 0.5f64..2.0, x in 0.0f64..6.3, b in 0.5f64..2.0, y in 0.0f64..6.3) {
        let m = stepped_model();
        let z = Complex64::new(re, im);
        let th = [Complex64::from_polar(a, x), Complex64::from_polar(b, y)];
        let inv = [th[0].inv(), th[1].inv()];
        let (p, q) = (symbol(&m, z, &th).unwrap(), symbol(&m, z, &inv).unwrap());
        prop_assert!((p - q).norm() < 1e-12 * p.norm().max(1.0));
    }

    #[test]
    fn symbol_real_on_real_axis(lambda in 0.5f64..30.0, x in 0.0f64..6.3, y in 0.0f64..6.3) {
        let m = stepped_model();
        let v = match symbol(&m, Complex64::new(lambda, 0.0), &[unit(x), unit(y)]) {
            Ok(v) => v,
            Err(_) => return Ok(()), // Dirichlet guard
        };
        prop_assert!(v.im.abs() < 1e-12 * v.norm().max(1.0));
    }

    #[test]
    fn symbol_is_herglotz(re in 0.5f64..30.0, im in 0.01f64..3.0, x in 0.0f64..6.3, y in 0.0f64..6.3) {
        let m = stepped_model();
        let th = [unit(x), unit(y)];
        let up = symbol(&m, Complex64::new(re, im), &th).unwrap();
        let down = symbol(&m, Complex64::new(re, -im), &th).unwrap();
        prop_assert!(up.im > 0.0, "Im M = {} at z = {re} + {im}i", up.im);
        prop_assert!((down - up.conj()).norm() < 1e-12 * up.norm().max(1.0));
    }

    #[test]
    fn coupling_shift_covariance(k in -20i64..20, n in -20i64..20, phi in -1.5f64..1.5, g in 0.1f64..4.0) {
        let p = MarylandParams::new(g, vec![GOLDEN], phi).unwrap();
        let shifted = MarylandParams::new(g, vec![GOLDEN], phi + PI * GOLDEN * k as f64).unwrap();
        let a = p.coupling(&Site::new(&[n + k])).unwrap();
        let b = shifted.coupling(&Site::new(&[n])).unwrap();
        prop_assert!((a - b).abs() < 1e-9 * a.abs().max(1.0), "{a} vs {b}");
    }

    #[test]
    fn truncation_is_symmetric(lambda in 0.3f64..9.5, phi in -1.0f64..1.0, n in 2usize..10) {
        let model = GraphModel::free(1, 1.0).unwrap();
        let params = MarylandParams::new(1.0, vec![GOLDEN], phi).unwrap();
        let op = match build_truncated(&model, &params, lambda, n) {
            Ok(op) => op,
            Err(_) => return Ok(()),
        };
        prop_assert_eq!(op.dim(), 2 * n + 1);
        prop_assert_eq!(op.max_asymmetry(), 0.0);
    }
}

#[test]
fn square_truncation_is_symmetric() {
    let model = GraphModel::free(2, 1.0).unwrap();
    let params = MarylandParams::new(1.0, vec![GOLDEN, 2f64.sqrt() - 1.0], 0.2).unwrap();
    let op = build_truncated(&model, &params, 3.7, 4).unwrap();
    assert_eq!(op.dim(), 81);
    assert!(op.max_asymmetry() < 1e-14);
}

#[test]
fn free_symbol_at_trivial_character() {
    // unit free edge: M(k², 1) = 2k(1 − cos k)/sin k
    let model = GraphModel::free(1, 1.0).unwrap();
    for k in [0.7f64, 1.3, 2.9] {
        let v = symbol(&model, Complex64::new(k * k, 0.0), &[Complex64::new(1.0, 0.0)]).unwrap();
        let exact = 2.0 * k * (1.0 - k.cos()) / k.sin();
        assert!((v.re - exact).abs() < 1e-12, "{} vs {exact}", v.re);
    }
}
