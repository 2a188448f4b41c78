// SPDX-License-Identifier: AGPL-3.0-only

//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.

use std::f64::consts::PI;
use std::time::{Duration, Instant};

use num_complex::Complex64;
use quasigraph::edge::{dirichlet_spectrum, solve_edge};
use quasigraph::lattice::spectral_gaps;
use quasigraph::oracle::{build_truncated, build_truncated_around};
use quasigraph::spectrum::EigenRecord;
use quasigraph::{EdgeProfile, Gap, GraphModel, MarylandParams, Result, Segment, Site, SpectralSolver};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const GOLDEN: f64 = 0.6180339887498949;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Result<Outcome> {
    Ok(Outcome { pass, detail })
}

fn canonical() -> Result<SpectralSolver> {
    let model = GraphModel::free(1, 1.0)?;
    let params = MarylandParams::new(1.0, vec![(5f64.sqrt() - 1.0) / 2.0], 0.0)?;
    SpectralSolver::new(&model, &params)
}

/// The gap (0, π²) of the free unit chain, minus the guard.
fn first_gap(s: &SpectralSolver) -> Result<Gap> {
    Ok(spectral_gaps(s.model(), 0.0, PI * PI + 1.0)?[0])
}

fn criterion_1() -> Result<Outcome> {
    let start = Instant::now();
    let s = canonical()?;
    let r = s.eigenvalue_for_index(&first_gap(&s)?, &Site::new(&[0]))?;
    let elapsed = start.elapsed();
    let Some(r) = r else {
        return outcome(false, "no root for m = 0".into());
    };
    let err = (r.lambda - PI * PI / 4.0).abs();
    outcome(
        err < 1e-9 && elapsed < Duration::from_secs(5),
        format!("|lambda(0) - pi^2/4| = {err:.2e}, {elapsed:.2?}"),
    )
}

fn criterion_2() -> Result<Outcome> {
    let start = Instant::now();
    let s = canonical()?;
    let run = s.enumerate(&first_gap(&s)?, 8)?;
    let n = 32;
    let mut bad = Vec::new();
    let mut worst_defect: f64 = 0.0;
    let mut worst_cos: f64 = 1.0;
    for r in &run.records {
        let op = build_truncated(s.model(), s.params(), r.lambda, n)?;
        let defect = op.defect()?;
        let u = s.lattice_eigenvector_around(r, &Site::origin(1), n)?;
        let cos = u.similarity_with(&op)?;
        worst_defect = worst_defect.max(defect);
        worst_cos = worst_cos.min(cos);
        if !(defect < 1e-4 && cos > 0.999) {
            bad.push(format!("m = {} (lambda {:.6}): defect {defect:.2e}, cosine {cos:.6}", r.m, r.lambda));
        }
    }
    let elapsed = start.elapsed();
    let mut detail = format!(
        "{} records, {} unresolved, max defect {worst_defect:.2e}, min cosine {worst_cos:.6}, {elapsed:.1?}",
        run.records.len(),
        run.failures.len()
    );
    for b in &bad {
        detail.push_str(&format!("\n      {b}"));
    }
    outcome(bad.is_empty() && run.failures.is_empty() && elapsed < Duration::from_secs(120), detail)
}

fn criterion_3() -> Result<Outcome> {
    let s = canonical()?;
    let eval = s.evaluator();
    let gaps = spectral_gaps(s.model(), 0.0, 4.0 * PI * PI + 1.0)?;
    let mut fails = Vec::new();
    let mut worst_rel: f64 = 0.0;
    for gap in gaps.iter().take(2) {
        let mut prev = f64::NEG_INFINITY;
        for lambda in gap.interior_grid(200) {
            let sigma = eval.sigma(lambda)?.sigma;
            let sp = eval.sigma_prime(lambda, gap)?;
            let h = 1e-5 * gap.width();
            let fd = (eval.sigma(lambda + h)?.sigma - eval.sigma(lambda - h)?.sigma) / (2.0 * h);
            let rel = (sp - fd).abs() / sp.abs().max(1.0);
            worst_rel = worst_rel.max(rel);
            if !(sigma > prev && sigma.abs() < PI / 2.0 && sp > 0.0 && rel < 1e-5) {
                fails.push(format!("gap {} lambda {lambda:.6}: sigma {sigma}, sigma' {sp}, fd {fd}", gap.id));
            }
            prev = sigma;
        }
    }
    let mut detail = format!("2 gaps x 200 points, max |sigma' - fd| / max(1, sigma') = {worst_rel:.2e}");
    for f in fails.iter().take(5) {
        detail.push_str(&format!("\n      {f}"));
    }
    outcome(fails.is_empty(), detail)
}

fn criterion_4() -> Result<Outcome> {
    let s = canonical()?;
    let gaps = spectral_gaps(s.model(), 0.0, 4.0 * PI * PI + 1.0)?;
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut worst: f64 = 0.0;
    let mut grids = Vec::new();
    for _ in 0..10 {
        let gap = gaps[rng.gen_range(0..2)];
        let lambda = gap.lo + gap.width() * rng.gen_range(0.01..0.99);
        let e = s.exponential_coefficients(lambda, 0)?;
        worst = worst.max(e.cocycle_residual);
        grids.push(e.grid.points_per_dim());
    }
    outcome(worst < 1e-8, format!("max reconstruction residual {worst:.2e} on grids {grids:?}"))
}

fn criterion_5() -> Result<Outcome> {
    let s = canonical()?;
    let mut records: Vec<EigenRecord> = s.enumerate(&first_gap(&s)?, 3)?.records;
    records.sort_by_key(|r| (r.m.norm_inf(), r.m));
    records.truncate(5);
    let mut pass = records.len() == 5;
    let mut lines = Vec::new();
    for r in &records {
        let u = s.lattice_eigenvector(r, s.options().box_radius)?;
        let f = s.graph_eigenfunction(&u)?;
        let cont = f.continuity_error()?;
        let flux = f.flux_residual()?;
        let a = f.ode_check(&r.m, 3, 1e-3, 7)?;
        let b = f.ode_check(&r.m, 3, 5e-4, 7)?;
        let order = a.max_residual / b.max_residual;
        let fit = u.decay;
        let ok = cont < 1e-8
            && flux < 1e-6
            && a.points > 0
            && a.max_residual <= a.bound
            && b.max_residual <= b.bound
            && (3.0..5.0).contains(&order)
            && fit.is_some_and(|d| d.slope < 0.0 && d.r2 > 0.9);
        pass &= ok;
        lines.push(format!(
            "m = {:>2}: continuity {cont:.1e}, flux {flux:.1e}, ode {:.1e} (bound {:.1e}, h-ratio {order:.2}), slope {:.3}, R^2 {:.3}",
            r.m.to_string(),
            a.max_residual,
            a.bound,
            fit.map_or(f64::NAN, |d| d.slope),
            fit.map_or(f64::NAN, |d| d.r2)
        ));
    }
    let mut detail = format!("{} records", records.len());
    for l in lines {
        detail.push_str(&format!("\n      {l}"));
    }
    outcome(pass, detail)
}

fn max_spacing(s: &SpectralSolver, gap: &Gap, radius: usize) -> Result<(f64, usize)> {
    let (lo, hi) = (0.1, 9.5);
    let run = s.enumerate(gap, radius)?;
    let mut pts = vec![lo];
    pts.extend(run.records.iter().map(|r| r.lambda).filter(|&l| l > lo && l < hi));
    pts.push(hi);
    Ok((pts.windows(2).map(|w| w[1] - w[0]).fold(0.0, f64::max), pts.len() - 2))
}

fn criterion_6() -> Result<Outcome> {
    let s = canonical()?;
    let gap = first_gap(&s)?;
    let (a, na) = max_spacing(&s, &gap, 4)?;
    let (b, nb) = max_spacing(&s, &gap, 8)?;
    outcome(b < a, format!("radius 4: {na} eigenvalues, max spacing {a:.4}; radius 8: {nb} eigenvalues, max spacing {b:.4}"))
}

fn criterion_7() -> Result<Outcome> {
    let s = canonical()?;
    let run = s.enumerate(&first_gap(&s)?, 8)?;
    let min_sep = run.records.windows(2).map(|w| w[1].lambda - w[0].lambda).fold(f64::INFINITY, f64::min);
    let mut simple = 0;
    let mut bad = Vec::new();
    for r in &run.records {
        let op = build_truncated_around(s.model(), s.params(), r.lambda, &r.m, s.options().box_radius)?;
        let e = op.eigen(false)?;
        let smallest = e.values.iter().map(|v| v.abs()).fold(f64::INFINITY, f64::min);
        let near = e.values.iter().filter(|v| v.abs() <= 10.0 * smallest).count();
        if near == 1 {
            simple += 1;
        } else {
            bad.push(format!("m = {}: {near} eigenvalues within 10 x {smallest:.1e}", r.m));
        }
    }
    let mut detail = format!("{} records, min separation {min_sep:.3e}, {simple} simple", run.records.len());
    for b in &bad {
        detail.push_str(&format!("\n      {b}"));
    }
    outcome(min_sep > 1e-9 && bad.is_empty(), detail)
}

fn criterion_8() -> Result<Outcome> {
    // edges of length 0.25–1.5 cut into 1–4 pieces, U ∈ [−5, 15], Re z ∈ [−5, 4π² + 1], |Im z| ≤ 1
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut worst: f64 = 0.0;
    for _ in 0..1000 {
        let length: f64 = rng.gen_range(0.25..1.5);
        let cuts: Vec<f64> = (0..rng.gen_range(1..5)).map(|_| rng.gen_range(0.2..1.0)).collect();
        let total: f64 = cuts.iter().sum();
        let segments = cuts
            .iter()
            .map(|c| Segment { width: length * c / total, value: rng.gen_range(-5.0..15.0) })
            .collect();
        let profile = EdgeProfile::new(segments)?;
        let z = Complex64::new(rng.gen_range(-5.0..4.0 * PI * PI + 1.0), rng.gen_range(-1.0..1.0));
        worst = worst.max((solve_edge(&profile, z).wronskian() - 1.0).norm());
    }
    let d = dirichlet_spectrum(&EdgeProfile::free(1.0)?, 0.0, 26.0 * PI * PI)?;
    let dir_err = (1..=5)
        .map(|k| (d.get(k - 1).copied().unwrap_or(f64::NAN) - (k as f64 * PI).powi(2)).abs())
        .fold(0.0, f64::max);
    outcome(
        worst < 1e-10 && d.len() == 5 && dir_err < 1e-8,
        format!("max |W - 1| over 1000 samples {worst:.2e}; Dirichlet k^2 pi^2 (k <= 5) max error {dir_err:.2e}"),
    )
}

fn criterion_9() -> Result<Outcome> {
    let start = Instant::now();
    let model = GraphModel::free(2, 1.0)?;
    let params = MarylandParams::new(1.0, vec![GOLDEN, 2f64.sqrt() - 1.0], 0.0)?;
    let s = SpectralSolver::new(&model, &params)?;
    let sigma = s.evaluator().sigma(PI * PI / 4.0)?;
    let gap = spectral_gaps(&model, 0.0, PI * PI + 1.0)?[0];
    let Some(r) = s.eigenvalue_for_index(&gap, &Site::origin(2))? else {
        return outcome(false, "no root for m = (0,0)".into());
    };
    let defect = build_truncated(&model, &params, r.lambda, 6)?.defect()?;
    let elapsed = start.elapsed();
    outcome(
        sigma.sigma.abs() <= s.options().quadrature.tol && defect < 1e-3 && elapsed < Duration::from_secs(300),
        format!(
            "lambda((0,0)) = {:.10}, sigma(pi^2/4) = {:.1e}, N = 6 defect {defect:.2e}, {elapsed:.1?}",
            r.lambda, sigma.sigma
        ),
    )
}

fn main() {
    let criteria: [(&str, fn() -> Result<Outcome>); 9] = [
        ("canonical eigenvalue lambda(0) = pi^2/4", criterion_1),
        ("oracle certification, |m| <= 8, N = 32", criterion_2),
        ("monotone sigma and sigma' on two gaps", criterion_3),
        ("conjugation identity (1 - U)t = f - f0", criterion_4),
        ("graph eigenfunction certification", criterion_5),
        ("denseness proxy, index radius 4 -> 8", criterion_6),
        ("distinctness and simplicity", criterion_7),
        ("edge solver calibration", criterion_8),
        ("d = 2 smoke test", criterion_9),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let (pass, detail) = match f() {
            Ok(o) => (o.pass, o.detail),
            Err(e) => (false, format!("error: {e}")),
        };
        failed += usize::from(!pass);
        println!("criterion {}: {} - {name}: {detail}", i + 1, if pass { "PASS" } else { "FAIL" });
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
