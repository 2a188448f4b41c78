// SPDX-License-Identifier: AGPL-3.0-only

//! Eigenvalues, lattice eigenvectors and graph eigenfunctions.
//!
//! Inside a gap of the Dirichlet spectrum λ is an eigenvalue exactly when
//! σ(λ) + φ + π⟨ω,m⟩ ≡ 0 (mod π) for some m ∈ ℤ^d. Since σ is strictly
//! increasing there is at most one such λ per (m, gap), found by bisection.
//! The eigenvector of M(λ) − A is u = (1 + χU)e^{t(λ)}θ^m, i.e.
//! u(n) = (1 + χe^{2πi⟨ω,n⟩})·Ê(n − m) with E = e^t, and the eigenfunction
//! of the graph is recovered edge by edge from the fundamental solutions.

use std::collections::BTreeMap;
use std::f64::consts::{FRAC_PI_2, PI};

use num_complex::Complex64;
use rayon::prelude::*;

use crate::edge::{solve_edge_real, EdgeBasis};
use crate::error::{Error, Result};
use crate::lattice::{box_sites, least_squares, spectral_gaps, Gap, GraphModel, LatticeOperator, LatticeSeq, MarylandParams, Site};
use crate::oracle::TruncatedOperator;
use crate::torus::{analyze, QuadratureConfig, QuadratureGrid, SigmaEvaluator};

/// Fewest shells for which a decay fit is considered meaningful.
pub const MIN_DECAY_SHELLS: usize = 6;

/// Envelope values below this fraction of the peak are rounding noise and
/// are left out of the decay fit.
pub const DECAY_FLOOR: f64 = 1e-13;

/// Relative size of the discarded Fourier tail accepted for e^t.
const FOURIER_TAIL: f64 = 1e-13;

/// Largest distance from a gap end at which σ is still tried when the
/// quadrature cannot resolve the end itself, as a fraction of the gap width.
const END_OFFSETS: [f64; 10] = [0.0, 1e-9, 1e-8, 1e-7, 1e-6, 1e-5, 1e-4, 1e-3, 1e-2, 5e-2];

/// Default lattice box radius per dimension.
pub fn default_box_radius(d: usize) -> usize {
    match d {
        1 => 24,
        2 => 12,
        _ => 6,
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverOptions {
    /// Bisection stops once the bracket is shorter than lambda_tol·max(1, |λ|).
    pub lambda_tol: f64,
    /// Interior σ samples per gap used to bracket roots.
    pub initial_scan: usize,
    pub max_bisection: usize,
    pub box_radius: usize,
    pub quadrature: QuadratureConfig,
}

impl SolverOptions {
    pub fn for_dim(d: usize) -> Self {
        Self {
            lambda_tol: 1e-13,
            initial_scan: 8,
            max_bisection: 200,
            box_radius: default_box_radius(d),
            quadrature: QuadratureConfig::for_dim(d),
        }
    }
}

/// One solution λ(m) of the quantization condition.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenRecord {
    pub m: Site,
    pub lambda: f64,
    pub gap: Gap,
    /// −φ − π⟨ω,m⟩ folded into (−π/2, π/2).
    pub target: f64,
    pub sigma_at_lambda: f64,
    /// ‖(M(λ) − A)u‖₂/‖u‖₂ on the default box.
    pub residual: f64,
    pub bisection_steps: usize,
}

/// σ sampled across a gap, with information on whether the ends were reached.
#[derive(Debug, Clone, PartialEq)]
pub struct GapScan {
    pub gap: Gap,
    /// (λ, σ) in increasing λ.
    pub samples: Vec<(f64, f64)>,
    /// False if σ at the lower end could not be resolved and a point further
    /// inside stands in for it.
    pub lo_exact: bool,
    pub hi_exact: bool,
}

/// Result of solving for every index in a box.
#[derive(Debug, Clone)]
pub struct Enumeration {
    pub records: Vec<EigenRecord>,
    /// Indices whose solve failed, with the reason.
    pub failures: Vec<(Site, Gap, Error)>,
}

/// Folds x into (−π/2, π/2] modulo π.
pub fn fold_phase(x: f64) -> f64 {
    let y = x - PI * (x / PI).round();
    if y <= -FRAC_PI_2 {
        y + PI
    } else {
        y
    }
}

#[derive(Debug, Clone)]
pub struct SpectralSolver {
    model: GraphModel,
    params: MarylandParams,
    evaluator: SigmaEvaluator,
    options: SolverOptions,
}

impl SpectralSolver {
    pub fn new(model: &GraphModel, params: &MarylandParams) -> Result<Self> {
        Self::with_options(model, params, SolverOptions::for_dim(model.dim()))
    }

    pub fn with_options(model: &GraphModel, params: &MarylandParams, options: SolverOptions) -> Result<Self> {
        if !(options.lambda_tol > 0.0) {
            return Err(Error::InvalidInput("lambda tolerance must be positive".into()));
        }
        if options.initial_scan == 0 || options.max_bisection == 0 {
            return Err(Error::InvalidInput("scan and bisection counts must be positive".into()));
        }
        let evaluator = SigmaEvaluator::with_config(model, params, options.quadrature)?;
        Ok(Self { model: model.clone(), params: params.clone(), evaluator, options })
    }

    pub fn model(&self) -> &GraphModel {
        &self.model
    }

    pub fn params(&self) -> &MarylandParams {
        &self.params
    }

    pub fn options(&self) -> &SolverOptions {
        &self.options
    }

    pub fn evaluator(&self) -> &SigmaEvaluator {
        &self.evaluator
    }

    pub fn target(&self, m: &Site) -> f64 {
        fold_phase(-self.params.phi() - PI * m.dot(self.params.omega()))
    }

    fn gap_end(&self, gap: &Gap, upper: bool) -> Result<(f64, f64, bool)> {
        let mut last = None;
        for off in END_OFFSETS {
            let lambda = if upper { gap.hi - off * gap.width() } else { gap.lo + off * gap.width() };
            match self.evaluator.sigma(lambda) {
                Ok(v) => return Ok((lambda, v.sigma, off == 0.0)),
                Err(e @ Error::Convergence { .. }) => last = Some(e),
                Err(e) => return Err(e),
            }
        }
        Err(last.expect("at least one offset tried"))
    }

    /// σ at both (reachable) ends of the gap and at `initial_scan` interior points.
    pub fn scan_gap(&self, gap: &Gap) -> Result<GapScan> {
        let (lo, s_lo, lo_exact) = self.gap_end(gap, false)?;
        let (hi, s_hi, hi_exact) = self.gap_end(gap, true)?;
        let mut samples = vec![(lo, s_lo)];
        let interior: Vec<f64> = gap.interior_grid(self.options.initial_scan).into_iter().filter(|&x| x > lo && x < hi).collect();
        let values = interior
            .par_iter()
            .map(|&x| self.evaluator.sigma(x).map(|v| (x, v.sigma)))
            .collect::<Result<Vec<_>>>()?;
        samples.extend(values);
        samples.push((hi, s_hi));
        if let Some(w) = samples.windows(2).find(|w| !(w[1].1 > w[0].1)) {
            return Err(Error::InternalConsistency(format!(
                "sigma not increasing between {} and {} ({} vs {})",
                w[0].0, w[1].0, w[0].1, w[1].1
            )));
        }
        Ok(GapScan { gap: *gap, samples, lo_exact, hi_exact })
    }

    /// λ(m) in `gap`, or `None` if the quantization level is outside σ(gap).
    pub fn eigenvalue_for_index(&self, gap: &Gap, m: &Site) -> Result<Option<EigenRecord>> {
        let scan = self.scan_gap(gap)?;
        self.eigenvalue_from_scan(&scan, m)
    }

    pub fn eigenvalue_from_scan(&self, scan: &GapScan, m: &Site) -> Result<Option<EigenRecord>> {
        self.params.coupling(m)?;
        let target = self.target(m);
        let (first, last) = (scan.samples[0], *scan.samples.last().expect("non-empty scan"));
        let unresolved = |lambda: f64| Error::Convergence {
            lambda,
            detail: format!("level {target} lies between the gap end and the last resolvable sigma"),
        };
        if target <= first.1 {
            return if scan.lo_exact { Ok(None) } else { Err(unresolved(first.0)) };
        }
        if target >= last.1 {
            return if scan.hi_exact { Ok(None) } else { Err(unresolved(last.0)) };
        }
        let i = scan.samples.partition_point(|&(_, s)| s < target);
        let (mut a, mut b) = (scan.samples[i - 1].0, scan.samples[i].0);

        let mut steps = 0;
        loop {
            let mid = 0.5 * (a + b);
            if b - a <= self.options.lambda_tol * mid.abs().max(1.0) || mid <= a || mid >= b {
                break;
            }
            if steps == self.options.max_bisection {
                return Err(Error::Solver(format!(
                    "bisection for m = {m} did not reach {:e} in {} steps",
                    self.options.lambda_tol, self.options.max_bisection
                )));
            }
            steps += 1;
            if self.evaluator.sigma(mid)?.sigma < target {
                a = mid;
            } else {
                b = mid;
            }
        }
        let lambda = 0.5 * (a + b);
        let sigma_at_lambda = self.evaluator.sigma(lambda)?.sigma;
        let mut record = EigenRecord {
            m: *m,
            lambda,
            gap: scan.gap,
            target,
            sigma_at_lambda,
            residual: f64::NAN,
            bisection_steps: steps,
        };
        record.residual = self.lattice_eigenvector(&record, self.options.box_radius)?.residual;
        Ok(Some(record))
    }

    /// Solves for all |m|∞ ≤ index_radius in one gap; records sorted by λ.
    pub fn enumerate(&self, gap: &Gap, index_radius: usize) -> Result<Enumeration> {
        let scan = self.scan_gap(gap)?;
        let indices = box_sites(&Site::origin(self.model.dim()), index_radius);
        let outcomes: Vec<(Site, Result<Option<EigenRecord>>)> =
            indices.par_iter().map(|m| (*m, self.eigenvalue_from_scan(&scan, m))).collect();
        let mut records = Vec::new();
        let mut failures = Vec::new();
        for (m, out) in outcomes {
            match out {
                Ok(Some(r)) => records.push(r),
                Ok(None) => {}
                Err(e) => failures.push((m, *gap, e)),
            }
        }
        records.sort_by(|a, b| a.lambda.total_cmp(&b.lambda));
        check_distinct(&records)?;
        Ok(Enumeration { records, failures })
    }

    /// Enumerates every gap of the window; records sorted by λ.
    pub fn enumerate_window(&self, lo: f64, hi: f64, index_radius: usize) -> Result<Enumeration> {
        let mut all = Enumeration { records: Vec::new(), failures: Vec::new() };
        for gap in spectral_gaps(&self.model, lo, hi)? {
            let e = self.enumerate(&gap, index_radius)?;
            all.records.extend(e.records);
            all.failures.extend(e.failures);
        }
        all.records.sort_by(|a, b| a.lambda.total_cmp(&b.lambda));
        check_distinct(&all.records)?;
        Ok(all)
    }

    /// Fourier coefficients of e^{t(λ)} resolved at least out to `reach`.
    ///
    /// The grid is doubled until both f̂ and the coefficients of e^t are
    /// negligible beyond N/4, so that aliasing does not reach |k|∞ ≤ reach.
    /// At the FFT cap the last grid is returned with its tail recorded; the
    /// eigenvector residual then shows what the truncation costs.
    pub fn exponential_coefficients(&self, lambda: f64, reach: usize) -> Result<ExpCoefficients> {
        let d = self.model.dim();
        let cap = self.options.quadrature.max_fft_points;
        let mut n = (4 * (reach + 1)).next_power_of_two().max(64);
        if n > cap {
            return Err(Error::Resource { dimension: n, cap });
        }
        loop {
            let grid = QuadratureGrid::new(n, d)?;
            let conj = self.evaluator.conjugator(lambda, n / 2 - 1, grid)?;
            let e_nodes: Vec<Complex64> = conj.t_nodes().iter().map(|t| t.exp()).collect();
            let ehat = analyze(&e_nodes, grid);
            let peak = ehat.iter().map(|c| c.norm()).fold(0.0, f64::max);
            let tail = (0..grid.total())
                .filter(|&k| grid.mode(k).norm_inf() as usize >= n / 4)
                .map(|k| ehat[k].norm())
                .fold(0.0, f64::max);
            let fourier_tail = f64::max(tail / peak, conj.tail_ratio);
            if fourier_tail <= FOURIER_TAIL || 2 * n > cap {
                return Ok(ExpCoefficients {
                    lambda,
                    grid,
                    ehat,
                    fourier_tail,
                    cocycle_residual: conj.cocycle_residual,
                    min_divisor: conj.min_divisor,
                });
            }
            n *= 2;
        }
    }

    /// u on the box |n − m|∞ ≤ box_radius, plus the next shell as halo.
    pub fn lattice_eigenvector(&self, record: &EigenRecord, box_radius: usize) -> Result<LatticeVector> {
        self.lattice_eigenvector_around(record, &record.m, box_radius)
    }

    /// u on the box |n − center|∞ ≤ box_radius, plus the next shell as halo.
    pub fn lattice_eigenvector_around(&self, record: &EigenRecord, center: &Site, box_radius: usize) -> Result<LatticeVector> {
        let m = record.m;
        let offset = m.sub(center).norm_inf() as usize;
        let exp = self.exponential_coefficients(record.lambda, box_radius + 1 + offset)?;
        let chi = self.params.chi();
        let value = |n: &Site| (1.0 + chi * self.params.rotation(n)) * exp.ehat[exp.grid.bin(&n.sub(&m))];

        let mut amplitudes: LatticeSeq = box_sites(center, box_radius).into_iter().map(|n| (n, value(&n))).collect();
        let mut halo: LatticeSeq = box_sites(center, box_radius + 1)
            .into_iter()
            .filter(|n| n.sub(center).norm_inf() as usize == box_radius + 1)
            .map(|n| (n, value(&n)))
            .collect();

        // rotate to real and normalize on the box
        let (_, peak) = amplitudes
            .iter()
            .max_by(|a, b| a.1.norm().total_cmp(&b.1.norm()))
            .map(|(s, v)| (*s, *v))
            .expect("non-empty box");
        let norm = amplitudes.values().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
        let rot = peak.conj() / (peak.norm() * norm);
        amplitudes.values_mut().for_each(|v| *v *= rot);
        halo.values_mut().for_each(|v| *v *= rot);
        let max_abs = amplitudes.values().map(|v| v.norm()).fold(0.0, f64::max);
        let imag_ratio = amplitudes.values().map(|v| v.im.abs()).fold(0.0, f64::max) / max_abs;

        let op = LatticeOperator::real(&self.model, &self.params, record.lambda)?;
        let lookup = |n: &Site| {
            amplitudes.get(n).or_else(|| halo.get(n)).copied().unwrap_or(Complex64::new(0.0, 0.0))
        };
        let mut res2 = 0.0;
        for n in amplitudes.keys() {
            res2 += op.apply_at(n, lookup)?.norm_sqr();
        }
        let residual = res2.sqrt();

        let decay = decay_fit(&amplitudes, &m, box_radius.saturating_sub(offset));
        let (tail_estimate, concentration) = match &decay {
            Some(fit) if fit.slope < 0.0 => {
                let t = envelope_tail(fit, self.model.dim(), box_radius.saturating_sub(offset));
                (t, 1.0 / (1.0 + t))
            }
            _ => (f64::INFINITY, 0.0),
        };
        let decay_warning = decay.as_ref().is_none_or(|f| f.shells < MIN_DECAY_SHELLS || !(f.slope < 0.0));

        Ok(LatticeVector {
            m,
            lambda: record.lambda,
            center: *center,
            box_radius,
            amplitudes,
            halo,
            phase_aligned: true,
            imag_ratio,
            residual,
            decay,
            decay_warning,
            tail_estimate,
            concentration,
            grid_used: exp.grid.points_per_dim(),
            fourier_tail: exp.fourier_tail,
            cocycle_residual: exp.cocycle_residual,
        })
    }

    /// Graph eigenfunction assembled from `u` edge by edge.
    pub fn graph_eigenfunction(&self, u: &LatticeVector) -> Result<GraphEigenfunction> {
        let coeffs = self.model.coefficients(Complex64::new(u.lambda, 0.0))?;
        debug_assert_eq!(coeffs.hop.len(), self.model.dim());
        let bases = self.model.profiles().iter().map(|p| solve_edge_real(p, u.lambda)).collect();
        let mut values = u.amplitudes.clone();
        values.extend(u.halo.iter().map(|(k, v)| (*k, *v)));
        let couplings = u
            .amplitudes
            .keys()
            .map(|m| self.params.coupling(m).map(|a| (*m, a)))
            .collect::<Result<BTreeMap<_, _>>>()?;
        Ok(GraphEigenfunction { lambda: u.lambda, bases, values, vertices: u.amplitudes.keys().copied().collect(), couplings })
    }
}

fn check_distinct(records: &[EigenRecord]) -> Result<()> {
    if let Some(w) = records.windows(2).find(|w| w[1].lambda - w[0].lambda <= 1e-9) {
        return Err(Error::InternalConsistency(format!(
            "eigenvalues for m = {} and m = {} coincide ({} vs {})",
            w[0].m, w[1].m, w[0].lambda, w[1].lambda
        )));
    }
    Ok(())
}

/// Fourier data of E = e^{t(λ)} on one grid.
#[derive(Debug, Clone)]
pub struct ExpCoefficients {
    pub lambda: f64,
    pub grid: QuadratureGrid,
    /// Ê by FFT bin.
    pub ehat: Vec<Complex64>,
    /// Largest coefficient of e^t or f beyond N/4, relative to the largest one.
    pub fourier_tail: f64,
    pub cocycle_residual: f64,
    pub min_divisor: f64,
}

impl ExpCoefficients {
    pub fn get(&self, k: &Site) -> Complex64 {
        self.ehat[self.grid.bin(k)]
    }
}

/// Least-squares line through ln(envelope) against shell index.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecayFit {
    pub slope: f64,
    pub intercept: f64,
    pub r2: f64,
    pub shells: usize,
}

/// Largest |u(n)| over |n − m|∞ ≥ k within the box, k = 0..=max_shell.
pub fn tail_envelope(u: &LatticeSeq, m: &Site, max_shell: usize) -> Vec<f64> {
    let mut shell_max = vec![0.0; max_shell + 1];
    for (n, v) in u {
        let k = n.sub(m).norm_inf() as usize;
        if k <= max_shell {
            shell_max[k] = f64::max(shell_max[k], v.norm());
        }
    }
    let mut env = shell_max;
    for k in (0..max_shell).rev() {
        env[k] = f64::max(env[k], env[k + 1]);
    }
    env
}

/// Fits ln(tail envelope) against k, ignoring values under the rounding floor.
pub fn decay_fit(u: &LatticeSeq, m: &Site, max_shell: usize) -> Option<DecayFit> {
    let env = tail_envelope(u, m, max_shell);
    let peak = env.first().copied().unwrap_or(0.0);
    let pts: Vec<(f64, f64)> = env
        .iter()
        .enumerate()
        .take_while(|(_, &e)| e > DECAY_FLOOR * peak)
        .map(|(k, e)| (k as f64, e.ln()))
        .collect();
    if pts.len() < 3 {
        return None;
    }
    let (slope, intercept, r2) = least_squares(&pts);
    Some(DecayFit { slope, intercept, r2, shells: pts.len() })
}

/// Σ over shells beyond `from` of (shell size)·(fitted envelope)².
fn envelope_tail(fit: &DecayFit, d: usize, from: usize) -> f64 {
    let mut total = 0.0;
    let mut k = from + 1;
    loop {
        let size = ((2 * k + 1).pow(d as u32) - (2 * k - 1).pow(d as u32)) as f64;
        let term = size * (2.0 * (fit.intercept + fit.slope * k as f64)).exp();
        total += term;
        if term < 1e-20 * total.max(1e-300) || k > from + 1_000_000 {
            break;
        }
        k += 1;
    }
    total
}

/// Eigenvector of M(λ) − A on a box.
#[derive(Debug, Clone)]
pub struct LatticeVector {
    pub m: Site,
    pub lambda: f64,
    pub center: Site,
    pub box_radius: usize,
    /// Unit ℓ² norm on the box, largest entry real and positive.
    pub amplitudes: LatticeSeq,
    /// The shell just outside the box, same normalization.
    pub halo: LatticeSeq,
    pub phase_aligned: bool,
    /// max |Im u| / max |u| after alignment.
    pub imag_ratio: f64,
    /// ‖(M(λ) − A)u‖₂ over the box (‖u‖₂ = 1).
    pub residual: f64,
    pub decay: Option<DecayFit>,
    /// Set when the box holds fewer than six fit shells or u does not decay.
    pub decay_warning: bool,
    /// Squared norm outside the box predicted by the decay fit.
    pub tail_estimate: f64,
    /// Share of the total (box + predicted tail) squared norm inside the box.
    pub concentration: f64,
    pub grid_used: usize,
    pub fourier_tail: f64,
    pub cocycle_residual: f64,
}

impl LatticeVector {
    pub fn get(&self, n: &Site) -> Option<Complex64> {
        self.amplitudes.get(n).or_else(|| self.halo.get(n)).copied()
    }

    /// |⟨u, v⟩| / (‖u‖‖v‖) against a real vector indexed by `sites`.
    pub fn cosine_similarity(&self, sites: &[Site], v: &[f64]) -> Result<f64> {
        let mut dot = Complex64::new(0.0, 0.0);
        let mut nu = 0.0;
        let mut nv = 0.0;
        for (s, &x) in sites.iter().zip(v) {
            let u = self
                .amplitudes
                .get(s)
                .ok_or_else(|| Error::InvalidInput(format!("site {s} outside the eigenvector box")))?;
            dot += u.conj() * x;
            nu += u.norm_sqr();
            nv += x * x;
        }
        Ok(dot.norm() / (nu * nv).sqrt())
    }

    /// Cosine similarity with the near-zero eigenvector of a truncation.
    pub fn similarity_with(&self, op: &TruncatedOperator) -> Result<f64> {
        let (_, seq, _) = op.nearest_zero()?;
        let v: Vec<f64> = op.sites().iter().map(|s| seq[s].re).collect();
        self.cosine_similarity(op.sites(), &v)
    }
}

/// Result of the finite-difference check of −f″ + Uf = λf.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OdeCheck {
    pub step: f64,
    /// Largest |−Δ²f/h² + (U − λ)f| over the sampled points.
    pub max_residual: f64,
    /// h²·max(λ − U)²·max|f|/12 plus a rounding allowance.
    pub bound: f64,
    pub points: usize,
}

/// Eigenfunction of the quantum graph on the edges of a box.
#[derive(Debug, Clone)]
pub struct GraphEigenfunction {
    pub lambda: f64,
    bases: Vec<EdgeBasis>,
    /// u on box and halo; these are the vertex values.
    values: LatticeSeq,
    /// Box vertices where the flux condition is checked.
    vertices: Vec<Site>,
    couplings: BTreeMap<Site, f64>,
}

impl GraphEigenfunction {
    pub fn dim(&self) -> usize {
        self.bases.len()
    }

    pub fn vertex_value(&self, m: &Site) -> Option<Complex64> {
        self.values.get(m).copied()
    }

    pub fn vertices(&self) -> &[Site] {
        &self.vertices
    }

    pub fn edge_length(&self, j: usize) -> f64 {
        self.bases[j].profile().length()
    }

    /// Edges (n, j) whose both endpoints carry values.
    pub fn edges(&self) -> Vec<(Site, usize)> {
        let mut out = Vec::new();
        for n in self.values.keys() {
            for j in 0..self.dim() {
                if self.values.contains_key(&n.shifted(j, 1)) {
                    out.push((*n, j));
                }
            }
        }
        out
    }

    fn ends(&self, n: &Site, j: usize) -> Result<(Complex64, Complex64)> {
        let a = self.values.get(n);
        let b = self.values.get(&n.shifted(j, 1));
        match (a, b) {
            (Some(a), Some(b)) => Ok((*a, *b)),
            _ => Err(Error::InvalidInput(format!("edge ({n}, {j}) leaves the evaluated box"))),
        }
    }

    /// (f, f′) on edge (n, j) at t ∈ [0, l_j].
    pub fn edge_eval(&self, n: &Site, j: usize, t: f64) -> Result<(Complex64, Complex64)> {
        let (xa, xb) = self.ends(n, j)?;
        let basis = &self.bases[j];
        let st = basis.state_at(t);
        let (sl, cl) = (basis.s_end(), basis.c_end());
        let f = (xb * st.s + xa * (sl * st.c - cl * st.s)) / sl;
        let fp = (xb * st.sp + xa * (sl * st.cp - cl * st.sp)) / sl;
        Ok((f, fp))
    }

    /// Σ_j f′_{m,j}(0) − Σ_j f′_{m−h_j,j}(l_j).
    pub fn flux(&self, m: &Site) -> Result<Complex64> {
        let mut total = Complex64::new(0.0, 0.0);
        for j in 0..self.dim() {
            total += self.edge_eval(m, j, 0.0)?.1;
            total -= self.edge_eval(&m.shifted(j, -1), j, self.edge_length(j))?.1;
        }
        Ok(total)
    }

    fn scale(&self) -> f64 {
        self.values.values().map(|v| v.norm()).fold(0.0, f64::max)
    }

    /// max over edges of |f(0) − u(n)|, |f(l) − u(n + h_j)|, relative to max |u|.
    pub fn continuity_error(&self) -> Result<f64> {
        let mut worst: f64 = 0.0;
        for (n, j) in self.edges() {
            let (xa, xb) = self.ends(&n, j)?;
            let f0 = self.edge_eval(&n, j, 0.0)?.0;
            let fl = self.edge_eval(&n, j, self.edge_length(j))?.0;
            worst = worst.max((f0 - xa).norm()).max((fl - xb).norm());
        }
        Ok(worst / self.scale())
    }

    /// max_m |f′(m) − α(m)f(m)| relative to the largest |f′(m)|, |α(m)f(m)| on the box.
    pub fn flux_residual(&self) -> Result<f64> {
        let mut worst: f64 = 0.0;
        let mut scale: f64 = 0.0;
        for m in &self.vertices {
            let fm = self.values[m];
            let af = self.couplings[m] * fm;
            let fp = self.flux(m)?;
            worst = worst.max((fp - af).norm());
            scale = scale.max(fp.norm()).max(af.norm());
        }
        Ok(worst / scale)
    }

    /// Per-vertex flux residual f′(m) − α(m)f(m).
    pub fn flux_defect(&self, m: &Site) -> Result<Complex64> {
        let a = self
            .couplings
            .get(m)
            .ok_or_else(|| Error::InvalidInput(format!("vertex {m} outside the box")))?;
        Ok(self.flux(m)? - a * self.values[m])
    }

    /// `count` equally spaced samples (t, f) along edge (n, j), ends included.
    pub fn sample_edge(&self, n: &Site, j: usize, count: usize) -> Result<Vec<(f64, Complex64)>> {
        let l = self.edge_length(j);
        let count = count.max(2);
        (0..count)
            .map(|i| {
                let t = l * i as f64 / (count - 1) as f64;
                self.edge_eval(n, j, t).map(|(f, _)| (t, f))
            })
            .collect()
    }

    /// Centered second differences at `per_edge` interior points of each
    /// edge within `radius` of `around`, away from potential breakpoints.
    pub fn ode_check(&self, around: &Site, radius: usize, step: f64, per_edge: usize) -> Result<OdeCheck> {
        let mut max_residual: f64 = 0.0;
        let mut bound: f64 = 0.0;
        let mut points = 0;
        for (n, j) in self.edges() {
            if n.sub(around).norm_inf() as usize > radius {
                continue;
            }
            let basis = &self.bases[j];
            let profile = basis.profile();
            let l = profile.length();
            let breaks = profile.breakpoints();
            let max_q = profile.segments().iter().map(|s| (self.lambda - s.value).abs()).fold(0.0, f64::max);
            let samples = self.sample_edge(&n, j, 65)?;
            let max_f = samples.iter().map(|(_, f)| f.norm()).fold(0.0, f64::max);
            let allowance = step * step * max_q * max_q * max_f / 12.0 + 16.0 * f64::EPSILON * max_f / (step * step);
            for i in 1..=per_edge {
                let t = l * i as f64 / (per_edge + 1) as f64;
                if t - step <= 0.0 || t + step >= l || breaks.iter().any(|b| (b - t).abs() <= step) {
                    continue;
                }
                let f = |x: f64| self.edge_eval(&n, j, x).map(|(v, _)| v);
                let (fm, f0, fp) = (f(t - step)?, f(t)?, f(t + step)?);
                let second = (fp - 2.0 * f0 + fm) / (step * step);
                let r = (-second + (profile.potential_at(t) - self.lambda) * f0).norm();
                max_residual = max_residual.max(r);
                bound = bound.max(allowance);
                points += 1;
            }
        }
        Ok(OdeCheck { step, max_residual, bound, points })
    }
}
