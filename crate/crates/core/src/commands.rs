// SPDX-License-Identifier: AGPL-3.0-only

//! The five commands of the `quasigraph` binary, as library calls that
//! produce a [`Report`].

use std::path::PathBuf;

use crate::config::RunConfig;
use crate::error::{Error, Result};
use crate::lattice::{spectral_gaps, validate_params, DiophantineReport, Gap, GraphModel, MarylandParams, Site};
use crate::oracle::{build_truncated_around, defect_scan as scan_defects};
use crate::report::{Cell, Report};
use crate::spectrum::SpectralSolver;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Validate,
    Spectrum,
    SigmaCurve,
    Eigenfunction,
    DefectScan,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Self::Validate => "validate",
            Self::Spectrum => "spectrum",
            Self::SigmaCurve => "sigma-curve",
            Self::Eigenfunction => "eigenfunction",
            Self::DefectScan => "defect-scan",
        }
    }
}

/// A finished command: the report, its file stem and lines for the terminal.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub report: Report,
    pub stem: String,
    pub summary: Vec<String>,
}

impl Outcome {
    pub fn write(&self, cfg: &RunConfig) -> Result<PathBuf> {
        self.report.write(&cfg.output.directory, &self.stem, cfg.output.format)
    }
}

pub fn run(cmd: Command, cfg: &RunConfig) -> Result<Outcome> {
    match cmd {
        Command::Validate => validate(cfg),
        Command::Spectrum => spectrum(cfg),
        Command::SigmaCurve => sigma_curve(cfg),
        Command::Eigenfunction => eigenfunction(cfg),
        Command::DefectScan => defect_scan(cfg),
    }
}

struct Setup {
    model: GraphModel,
    params: MarylandParams,
    diophantine: DiophantineReport,
    hash: String,
}

fn setup(cfg: &RunConfig) -> Result<Setup> {
    let model = cfg.graph_model()?;
    let params = cfg.params()?;
    let diophantine = validate_params(&params, cfg.compute.diophantine_radius)?;
    Ok(Setup { model, params, diophantine, hash: cfg.hash() })
}

fn selected_gap(cfg: &RunConfig, model: &GraphModel) -> Result<Gap> {
    let [lo, hi] = cfg.compute.window;
    let gaps = spectral_gaps(model, lo, hi)?;
    gaps.get(cfg.compute.gap).copied().ok_or_else(|| {
        Error::Config(format!(
            "gap {} does not exist; the window [{lo}, {hi}] has {} gaps",
            cfg.compute.gap,
            gaps.len()
        ))
    })
}

fn solver(cfg: &RunConfig, s: &Setup) -> Result<SpectralSolver> {
    SpectralSolver::with_options(&s.model, &s.params, cfg.solver_options())
}

fn common_notes(r: &mut Report, cfg: &RunConfig) {
    r.note(format!("d = {}, lengths = {:?}", cfg.model.d, cfg.model.lengths));
    r.note(format!("g = {}, omega = {:?}, phi = {}", cfg.maryland.g, cfg.maryland.omega, cfg.maryland.phi));
}

fn file_safe(m: &Site) -> String {
    m.to_string().replace(':', "_")
}

/// Diophantine and phase-condition scan.
pub fn validate(cfg: &RunConfig) -> Result<Outcome> {
    let s = setup(cfg)?;
    let d = &s.diophantine;
    let mut r = Report::new(Command::Validate.name(), &s.hash, &["m", "dist_to_integer"]);
    common_notes(&mut r, cfg);
    r.note(format!("record lows of dist(<omega,m>, Z) for 0 < |m| <= {}", d.radius_checked));
    for (m, dist) in &d.record_lows {
        r.push(vec![m.to_string().into(), (*dist).into()])?;
    }
    r.footer("radius_checked", d.radius_checked);
    r.footer("c_est", d.c_est);
    r.footer("beta_est", d.beta_est);
    r.footer("worst_site", d.worst_site.to_string());
    r.footer("worst_margin", d.worst_margin);
    r.footer("phase_margin", d.phase_margin);
    r.footer("phase_worst_site", d.phase_worst_site.to_string());
    let summary = vec![format!(
        "diophantine scan passed: C ~ {:.3e}, beta ~ {:.3}, phase margin {:.3e} at m = {}",
        d.c_est, d.beta_est, d.phase_margin, d.phase_worst_site
    )];
    Ok(Outcome { report: r, stem: "validate".into(), summary })
}

/// All λ(m), |m|∞ ≤ index_radius, in every gap of the window.
pub fn spectrum(cfg: &RunConfig) -> Result<Outcome> {
    let s = setup(cfg)?;
    let solver = solver(cfg, &s)?;
    let [lo, hi] = cfg.compute.window;
    let run = solver.enumerate_window(lo, hi, cfg.compute.index_radius)?;
    let n = cfg.oracle_box();
    let mut r = Report::new(
        Command::Spectrum.name(),
        &s.hash,
        &["m", "gap_id", "lambda", "sigma", "target", "residual", "defect_at_lambda"],
    );
    common_notes(&mut r, cfg);
    r.note(format!("window [{lo}, {hi}], index radius {}, oracle box {n}", cfg.compute.index_radius));
    let mut summary = Vec::new();
    for rec in &run.records {
        let defect = build_truncated_around(&s.model, &s.params, rec.lambda, &rec.m, n)?.defect()?;
        r.push(vec![
            rec.m.to_string().into(),
            rec.gap.id.into(),
            rec.lambda.into(),
            rec.sigma_at_lambda.into(),
            rec.target.into(),
            rec.residual.into(),
            defect.into(),
        ])?;
    }
    for (m, gap, e) in &run.failures {
        let line = format!("unresolved m = {m} in gap {}: {e}", gap.id);
        r.note(line.clone());
        summary.push(line);
    }
    r.footer("records", run.records.len());
    r.footer("failures", run.failures.len());
    summary.push(format!("{} eigenvalues, {} unresolved indices", run.records.len(), run.failures.len()));
    Ok(Outcome { report: r, stem: "spectrum".into(), summary })
}

/// σ, σ′ and the quadrature error on a uniform grid inside one gap.
pub fn sigma_curve(cfg: &RunConfig) -> Result<Outcome> {
    let s = setup(cfg)?;
    let gap = selected_gap(cfg, &s.model)?;
    let solver = solver(cfg, &s)?;
    let eval = solver.evaluator();
    let mut r = Report::new(Command::SigmaCurve.name(), &s.hash, &["lambda", "sigma", "sigma_prime", "quad_error"]);
    common_notes(&mut r, cfg);
    r.note(format!("gap {} = ({}, {}), {} interior points", gap.id, gap.lo, gap.hi, cfg.compute.samples));
    let mut prev = f64::NEG_INFINITY;
    let mut monotone = true;
    for lambda in gap.interior_grid(cfg.compute.samples) {
        let v = eval.sigma(lambda)?;
        let sp = eval.sigma_prime(lambda, &gap)?;
        monotone &= v.sigma > prev;
        prev = v.sigma;
        r.push(vec![lambda.into(), v.sigma.into(), sp.into(), v.error_estimate.into()])?;
    }
    r.footer("strictly_increasing", if monotone { "true" } else { "false" });
    if !monotone {
        return Err(Error::InternalConsistency(format!("sigma is not increasing on gap {}", gap.id)));
    }
    let summary = vec![format!("{} samples of sigma on gap {}", cfg.compute.samples, gap.id)];
    Ok(Outcome { report: r, stem: format!("sigma_curve_gap{}", gap.id), summary })
}

/// Vertex values and edge samples of the eigenfunction for one index.
pub fn eigenfunction(cfg: &RunConfig) -> Result<Outcome> {
    let s = setup(cfg)?;
    let gap = selected_gap(cfg, &s.model)?;
    let solver = solver(cfg, &s)?;
    let m = match &cfg.compute.index {
        Some(c) => Site::new(c),
        None => Site::origin(cfg.dim()),
    };
    let rec = solver
        .eigenvalue_for_index(&gap, &m)?
        .ok_or_else(|| Error::Config(format!("no eigenvalue for m = {m} in gap {}", gap.id)))?;
    let u = solver.lattice_eigenvector(&rec, cfg.box_radius())?;
    let f = solver.graph_eigenfunction(&u)?;
    let per_edge = cfg.compute.samples_per_edge.max(2);

    let mut r = Report::new(
        Command::Eigenfunction.name(),
        &s.hash,
        &["kind", "site", "direction", "t", "re", "im", "continuity", "flux_residual"],
    );
    common_notes(&mut r, cfg);
    r.note(format!("m = {m}, gap {}, lambda = {}, box radius {}", gap.id, rec.lambda, u.box_radius));
    r.note("vertex rows: u(n); edge rows: f on edge (n, direction) at t; continuity is |f(end) - u(end vertex)|");

    let scale = u.amplitudes.values().map(|v| v.norm()).fold(0.0, f64::max);
    let mut flux_scale: f64 = 0.0;
    let mut defects = Vec::new();
    for n in u.amplitudes.keys() {
        let defect = f.flux_defect(n)?;
        let fu = f.vertex_value(n).expect("box vertex");
        flux_scale = flux_scale.max(f.flux(n)?.norm());
        defects.push((*n, fu, defect));
    }
    let edges: Vec<(Site, usize)> = f.edges().into_iter().filter(|(n, _)| u.amplitudes.contains_key(n)).collect();
    for (n, fu, defect) in &defects {
        let continuity = edges
            .iter()
            .filter(|(a, _)| a == n)
            .map(|(a, j)| f.edge_eval(a, *j, 0.0).map(|(v, _)| (v - fu).norm()))
            .collect::<Result<Vec<f64>>>()?
            .into_iter()
            .fold(0.0, f64::max);
        r.push(vec![
            "vertex".into(),
            n.to_string().into(),
            Cell::Empty,
            Cell::Empty,
            fu.re.into(),
            fu.im.into(),
            (continuity / scale).into(),
            (defect.norm() / flux_scale).into(),
        ])?;
    }
    for (n, j) in &edges {
        let end = f.vertex_value(&n.shifted(*j, 1)).expect("edge end carries a value");
        for (t, v) in f.sample_edge(n, *j, per_edge)? {
            let continuity = if t == 0.0 {
                Cell::from((v - f.vertex_value(n).expect("box vertex")).norm() / scale)
            } else if t == f.edge_length(*j) {
                Cell::from((v - end).norm() / scale)
            } else {
                Cell::Empty
            };
            r.push(vec!["edge".into(), n.to_string().into(), (*j).into(), t.into(), v.re.into(), v.im.into(), continuity, Cell::Empty])?;
        }
    }
    let continuity = f.continuity_error()?;
    let flux = f.flux_residual()?;
    r.footer("lambda", rec.lambda);
    r.footer("lattice_residual", u.residual);
    r.footer("imag_ratio", u.imag_ratio);
    r.footer("continuity_error", continuity);
    r.footer("flux_residual", flux);
    match u.decay {
        Some(fit) => {
            r.footer("decay_slope", fit.slope);
            r.footer("decay_r2", fit.r2);
            r.footer("decay_shells", fit.shells);
        }
        None => r.footer("decay_slope", Cell::Empty),
    }
    r.footer("concentration", u.concentration);
    r.footer("decay_warning", if u.decay_warning { "true" } else { "false" });
    let summary = vec![format!(
        "lambda({m}) = {:.12}, continuity {continuity:.1e}, flux residual {flux:.1e}, decay slope {}",
        rec.lambda,
        u.decay.map_or("n/a".to_string(), |d| format!("{:.4}", d.slope))
    )];
    Ok(Outcome { report: r, stem: format!("eigenfunction_m{}_gap{}", file_safe(&m), gap.id), summary })
}

/// Smallest |eigenvalue| of the box truncation across a gap, matched against λ(m).
pub fn defect_scan(cfg: &RunConfig) -> Result<Outcome> {
    let s = setup(cfg)?;
    let gap = selected_gap(cfg, &s.model)?;
    let n = cfg.oracle_box();
    let curve = scan_defects(&s.model, &s.params, &gap, cfg.compute.samples, n)?;
    let mut r = Report::new(Command::DefectScan.name(), &s.hash, &["lambda", "defect"]);
    common_notes(&mut r, cfg);
    r.note(format!("gap {} = ({}, {}), box radius {n}, {} points", gap.id, gap.lo, gap.hi, cfg.compute.samples));
    for (l, d) in curve.lambdas.iter().zip(&curve.defects) {
        r.push(vec![(*l).into(), (*d).into()])?;
    }

    let run = solver(cfg, &s)?.enumerate(&gap, cfg.compute.index_radius)?;
    let step = curve.step();
    let mut matched = 0;
    for rec in &run.records {
        let dip = curve.nearest_minimum(rec.lambda);
        let ok = dip.is_some_and(|x| (x - rec.lambda).abs() <= step);
        matched += usize::from(ok);
        r.footer(
            &format!("record m={}", rec.m),
            format!(
                "lambda={} dip={} matched={}",
                rec.lambda,
                dip.map_or("none".to_string(), |x| x.to_string()),
                ok
            ),
        );
    }
    r.footer("records", run.records.len());
    r.footer("matched", matched);
    r.footer("grid_step", step);
    let summary = vec![format!("{matched} of {} eigenvalues matched by a defect dip", run.records.len())];
    Ok(Outcome { report: r, stem: format!("defect_scan_gap{}", gap.id), summary })
}
