// SPDX-License-Identifier: AGPL-3.0-only

//! The ℤ^d lattice reduction of the quantum graph.
//!
//! Vertices are sites m ∈ ℤ^d, the edge (m, j) joins m to m + h_j and carries
//! a copy of profile j. Eliminating the edge functions leaves the lattice
//! operator
//!
//! ```text
//!   (M(z)ξ)(m) = Σ_j [ξ(m − h_j) + ξ(m + h_j) − η_j(z) ξ(m)] / s_j(l_j; z)
//! ```
//!
//! and the graph eigenvalue problem outside the Dirichlet set becomes
//! (M(z) − A)ξ = 0 with A = diag(α(m)), α(m) = −g·tan(π⟨ω,m⟩ + φ).

use std::collections::BTreeMap;
use std::f64::consts::{FRAC_PI_2, PI};
use std::fmt;

use num_complex::Complex64;

use crate::edge::{dirichlet_spectrum, solve_edge, EdgeBasis, EdgeProfile};
use crate::error::{Error, Result};

pub const MAX_DIM: usize = 3;

/// |s_j(l_j; z)| below this is treated as sitting on a Dirichlet point.
pub const NEAR_DIRICHLET: f64 = 1e-9;

/// Guard removed from each side of a spectral gap.
pub const GAP_GUARD: f64 = 1e-6;

/// Minimal distance of π⟨ω,m⟩ + φ from π/2 mod π.
pub const PHASE_MARGIN: f64 = 1e-8;

/// |⟨ω,m⟩ − r| below this counts as an exact integer.
pub const RATIONAL_MARGIN: f64 = 1e-12;

/// Default radius for the Diophantine scan.
pub const DIOPHANTINE_RADIUS: usize = 64;

/// A lattice site m ∈ ℤ^d, d ≤ 3. Unused coordinates are zero.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Site {
    coords: [i64; MAX_DIM],
    dim: u8,
}

impl Site {
    pub fn new(coords: &[i64]) -> Self {
        assert!(
            !coords.is_empty() && coords.len() <= MAX_DIM,
            "site dimension must be 1..=3"
        );
        let mut c = [0; MAX_DIM];
        c[..coords.len()].copy_from_slice(coords);
        Self { coords: c, dim: coords.len() as u8 }
    }

    pub fn origin(dim: usize) -> Self {
        Self::new(&vec![0; dim])
    }

    pub fn dim(&self) -> usize {
        self.dim as usize
    }

    pub fn coords(&self) -> &[i64] {
        &self.coords[..self.dim()]
    }

    /// m + delta·h_j.
    pub fn shifted(&self, j: usize, delta: i64) -> Self {
        let mut out = *self;
        out.coords[j] += delta;
        out
    }

    pub fn add(&self, other: &Site) -> Self {
        let mut out = *self;
        for j in 0..self.dim() {
            out.coords[j] += other.coords[j];
        }
        out
    }

    pub fn sub(&self, other: &Site) -> Self {
        let mut out = *self;
        for j in 0..self.dim() {
            out.coords[j] -= other.coords[j];
        }
        out
    }

    pub fn norm_inf(&self) -> i64 {
        self.coords().iter().map(|c| c.abs()).max().unwrap_or(0)
    }

    pub fn dot(&self, omega: &[f64]) -> f64 {
        self.coords().iter().zip(omega).map(|(&m, &w)| m as f64 * w).sum()
    }

    pub fn is_origin(&self) -> bool {
        self.coords().iter().all(|&c| c == 0)
    }

    /// Parses `"3"`, `"-1:2"` or `"(1,-2)"`.
    pub fn parse(text: &str) -> Result<Self> {
        let trimmed = text.trim().trim_start_matches('(').trim_end_matches(')');
        let parts: std::result::Result<Vec<i64>, _> = trimmed
            .split([':', ',', ';'])
            .map(|p| p.trim().parse::<i64>())
            .collect();
        match parts {
            Ok(v) if !v.is_empty() && v.len() <= MAX_DIM => Ok(Site::new(&v)),
            _ => Err(Error::InvalidInput(format!("cannot parse lattice index '{text}'"))),
        }
    }
}

impl fmt::Display for Site {
    /// Coordinates joined by ':' (CSV-safe).
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.coords().iter().map(|c| c.to_string()).collect();
        write!(f, "{}", parts.join(":"))
    }
}

impl fmt::Debug for Site {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Site({self})")
    }
}

/// All sites with |n − center|∞ ≤ radius, in lexicographic order.
pub fn box_sites(center: &Site, radius: usize) -> Vec<Site> {
    let d = center.dim();
    let r = radius as i64;
    let side = (2 * radius + 1) as i64;
    let total = side.pow(d as u32);
    let mut out = Vec::with_capacity(total as usize);
    for flat in 0..total {
        let mut rem = flat;
        let mut offs = [0i64; MAX_DIM];
        for j in (0..d).rev() {
            offs[j] = rem % side - r;
            rem /= side;
        }
        out.push(center.add(&Site::new(&offs[..d])));
    }
    out
}

/// Sites with |n − center|∞ == k.
pub fn shell_sites(center: &Site, k: usize) -> Vec<Site> {
    box_sites(center, k)
        .into_iter()
        .filter(|s| s.sub(center).norm_inf() == k as i64)
        .collect()
}

/// Graph geometry: one edge profile per lattice direction.
#[derive(Debug, Clone, PartialEq)]
pub struct GraphModel {
    profiles: Vec<EdgeProfile>,
}

impl GraphModel {
    pub fn new(profiles: Vec<EdgeProfile>) -> Result<Self> {
        if profiles.is_empty() || profiles.len() > MAX_DIM {
            return Err(Error::InvalidInput(format!(
                "lattice dimension must be 1..=3, got {}",
                profiles.len()
            )));
        }
        Ok(Self { profiles })
    }

    /// d identical free edges of length `length`.
    pub fn free(d: usize, length: f64) -> Result<Self> {
        let p = EdgeProfile::free(length)?;
        Self::new(vec![p; d])
    }

    pub fn dim(&self) -> usize {
        self.profiles.len()
    }

    pub fn profiles(&self) -> &[EdgeProfile] {
        &self.profiles
    }

    pub fn bases(&self, z: Complex64) -> Vec<EdgeBasis> {
        self.profiles.iter().map(|p| solve_edge(p, z)).collect()
    }

    /// Hopping 1/s_j and on-site η_j/s_j for every direction at energy z.
    pub fn coefficients(&self, z: Complex64) -> Result<EdgeCoefficients> {
        let mut hop = Vec::with_capacity(self.dim());
        let mut onsite = Vec::with_capacity(self.dim());
        for (j, p) in self.profiles.iter().enumerate() {
            let b = solve_edge(p, z);
            let s = b.s_end();
            if s.norm() < NEAR_DIRICHLET {
                return Err(Error::NearDirichlet { direction: j, energy: z.re, s_end: s.norm() });
            }
            hop.push(1.0 / s);
            onsite.push(b.hill_discriminant() / s);
        }
        Ok(EdgeCoefficients { z, hop, onsite })
    }

    /// Sorted union of the Dirichlet spectra of all directions in the window.
    pub fn dirichlet_points(&self, lo: f64, hi: f64) -> Result<Vec<f64>> {
        let mut pts = Vec::new();
        for p in &self.profiles {
            pts.extend(dirichlet_spectrum(p, lo, hi)?);
        }
        pts.sort_by(|a, b| a.partial_cmp(b).expect("finite roots"));
        pts.dedup_by(|a, b| (*a - *b).abs() < 1e-9);
        Ok(pts)
    }
}

/// Per-direction coefficients of M(z): hopping 1/s_j(l_j;z) and η_j/s_j.
#[derive(Debug, Clone, PartialEq)]
pub struct EdgeCoefficients {
    pub z: Complex64,
    pub hop: Vec<Complex64>,
    pub onsite: Vec<Complex64>,
}

impl EdgeCoefficients {
    /// −Σ_j η_j/s_j, the diagonal of M(z).
    pub fn diagonal(&self) -> Complex64 {
        -self.onsite.iter().sum::<Complex64>()
    }

    /// M(z, θ) = Σ_j (θ_j + θ_j⁻¹)/s_j − Σ_j η_j/s_j.
    pub fn symbol(&self, theta: &[Complex64]) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for ((h, e), t) in self.hop.iter().zip(&self.onsite).zip(theta) {
            acc += h * (t + t.inv()) - e;
        }
        acc
    }
}

/// Maryland coupling parameters (g, ω, φ).
#[derive(Debug, Clone, PartialEq)]
pub struct MarylandParams {
    g: f64,
    omega: Vec<f64>,
    phi: f64,
}

impl MarylandParams {
    pub fn new(g: f64, omega: Vec<f64>, phi: f64) -> Result<Self> {
        if !(g > 0.0) || !g.is_finite() {
            return Err(Error::InvalidInput(format!("coupling strength g = {g} must be positive")));
        }
        if omega.is_empty() || omega.len() > MAX_DIM {
            return Err(Error::InvalidInput("omega must have 1..=3 components".into()));
        }
        if omega.iter().any(|w| !w.is_finite()) || !phi.is_finite() {
            return Err(Error::InvalidInput("omega and phi must be finite".into()));
        }
        Ok(Self { g, omega, phi })
    }

    pub fn g(&self) -> f64 {
        self.g
    }

    pub fn omega(&self) -> &[f64] {
        &self.omega
    }

    pub fn phi(&self) -> f64 {
        self.phi
    }

    pub fn dim(&self) -> usize {
        self.omega.len()
    }

    /// χ = e^{2iφ}.
    pub fn chi(&self) -> Complex64 {
        Complex64::from_polar(1.0, 2.0 * self.phi)
    }

    pub fn with_g(&self, g: f64) -> Result<Self> {
        Self::new(g, self.omega.clone(), self.phi)
    }

    /// π⟨ω,m⟩ + φ.
    pub fn phase(&self, m: &Site) -> f64 {
        PI * m.dot(&self.omega) + self.phi
    }

    /// Distance of π⟨ω,m⟩ + φ from π/2 + πℤ.
    pub fn phase_margin(&self, m: &Site) -> f64 {
        let x = self.phase(m) - FRAC_PI_2;
        (x - PI * (x / PI).round()).abs()
    }

    /// α(m) = −g·tan(π⟨ω,m⟩ + φ).
    pub fn coupling(&self, m: &Site) -> Result<f64> {
        let margin = self.phase_margin(m);
        if margin < PHASE_MARGIN {
            return Err(Error::DegeneratePhase { site: *m, distance: margin });
        }
        Ok(-self.g * self.phase(m).tan())
    }

    /// e^{2πi⟨ω,n⟩}, the eigenvalue of the frequency shift on θ^n.
    pub fn rotation(&self, n: &Site) -> Complex64 {
        Complex64::from_polar(1.0, 2.0 * PI * n.dot(&self.omega))
    }
}

/// Finite-radius evidence for the Diophantine condition and the phase condition.
#[derive(Debug, Clone, PartialEq)]
pub struct DiophantineReport {
    pub radius_checked: usize,
    /// Largest C with |⟨ω,m⟩ − r| ≥ C·|m|∞^{−β} on the scanned set.
    pub c_est: f64,
    pub beta_est: f64,
    pub worst_site: Site,
    pub worst_integer: i64,
    pub worst_margin: f64,
    /// Sites (up to sign) where the margin reaches a new minimum, in scan order.
    pub record_lows: Vec<(Site, f64)>,
    /// Smallest distance of π⟨ω,m⟩+φ from π/2 mod π over |m|∞ ≤ radius.
    pub phase_margin: f64,
    pub phase_worst_site: Site,
}

fn is_positive_half(m: &Site) -> bool {
    m.coords().iter().find(|&&c| c != 0).is_some_and(|&c| c > 0)
}

/// Scans 0 < |m|∞ ≤ radius for rational resonances and the phase condition.
pub fn validate_params(params: &MarylandParams, radius: usize) -> Result<DiophantineReport> {
    if radius == 0 {
        return Err(Error::InvalidInput("Diophantine radius must be at least 1".into()));
    }
    let d = params.dim();
    let origin = Site::origin(d);

    let mut phase_margin = params.phase_margin(&origin);
    let mut phase_worst_site = origin;
    if phase_margin < PHASE_MARGIN {
        return Err(Error::DegeneratePhase { site: origin, distance: phase_margin });
    }

    let mut shell_min = Vec::with_capacity(radius);
    let mut worst = (origin, 0i64, f64::INFINITY);
    let mut record_lows = Vec::new();
    let mut samples: Vec<(f64, f64)> = Vec::new();

    for k in 1..=radius {
        let mut this_shell = f64::INFINITY;
        for m in shell_sites(&origin, k) {
            let pm = params.phase_margin(&m);
            if pm < phase_margin {
                phase_margin = pm;
                phase_worst_site = m;
            }
            if pm < PHASE_MARGIN {
                return Err(Error::DegeneratePhase { site: m, distance: pm });
            }
            // margins of m and −m coincide
            if !is_positive_half(&m) {
                continue;
            }
            let p = m.dot(params.omega());
            let r = p.round();
            let margin = (p - r).abs();
            if margin < RATIONAL_MARGIN {
                return Err(Error::Rational { site: m, value: p });
            }
            samples.push((k as f64, margin));
            this_shell = this_shell.min(margin);
            if margin < worst.2 {
                worst = (m, r as i64, margin);
                record_lows.push((m, margin));
            }
        }
        shell_min.push(this_shell);
    }

    // Fit the running-minimum envelope ln ρ_k ≈ ln C − β ln k.
    let mut running = f64::INFINITY;
    let pts: Vec<(f64, f64)> = shell_min
        .iter()
        .enumerate()
        .map(|(i, &mu)| {
            running = running.min(mu);
            (((i + 1) as f64).ln(), running.ln())
        })
        .collect();
    let beta_fit = if pts.len() >= 2 { -least_squares_slope(&pts) } else { 0.0 };
    // Dirichlet's approximation theorem forces β ≥ d for infinitely many m.
    let beta_est = beta_fit.max(d as f64);
    let c_est = samples
        .iter()
        .map(|&(k, margin)| margin * k.powf(beta_est))
        .fold(f64::INFINITY, f64::min);

    Ok(DiophantineReport {
        radius_checked: radius,
        c_est,
        beta_est,
        worst_site: worst.0,
        worst_integer: worst.1,
        worst_margin: worst.2,
        record_lows,
        phase_margin,
        phase_worst_site,
    })
}

pub(crate) fn least_squares_slope(pts: &[(f64, f64)]) -> f64 {
    least_squares(pts).0
}

/// Returns (slope, intercept, R²).
pub(crate) fn least_squares(pts: &[(f64, f64)]) -> (f64, f64, f64) {
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let syy: f64 = pts.iter().map(|p| (p.1 - my).powi(2)).sum();
    if sxx == 0.0 {
        return (0.0, my, 0.0);
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let r2 = if syy == 0.0 { 1.0 } else { (sxy * sxy) / (sxx * syy) };
    (slope, intercept, r2)
}

/// M(z, θ) for the given geometry.
pub fn symbol(model: &GraphModel, z: Complex64, theta: &[Complex64]) -> Result<Complex64> {
    if theta.len() != model.dim() {
        return Err(Error::InvalidInput("theta dimension does not match the model".into()));
    }
    Ok(model.coefficients(z)?.symbol(theta))
}

/// Finitely supported lattice sequence.
pub type LatticeSeq = BTreeMap<Site, Complex64>;

/// The lattice operator M(z) − A at a fixed energy.
#[derive(Debug, Clone)]
pub struct LatticeOperator {
    coeffs: EdgeCoefficients,
    params: MarylandParams,
}

impl LatticeOperator {
    pub fn new(model: &GraphModel, params: &MarylandParams, z: Complex64) -> Result<Self> {
        if model.dim() != params.dim() {
            return Err(Error::InvalidInput(format!(
                "model has d = {} but omega has {} components",
                model.dim(),
                params.dim()
            )));
        }
        Ok(Self { coeffs: model.coefficients(z)?, params: params.clone() })
    }

    pub fn real(model: &GraphModel, params: &MarylandParams, lambda: f64) -> Result<Self> {
        Self::new(model, params, Complex64::new(lambda, 0.0))
    }

    pub fn coefficients(&self) -> &EdgeCoefficients {
        &self.coeffs
    }

    pub fn params(&self) -> &MarylandParams {
        &self.params
    }

    /// Diagonal entry −Σ_j η_j/s_j − α(m).
    pub fn diagonal(&self, m: &Site) -> Result<Complex64> {
        Ok(self.coeffs.diagonal() - self.params.coupling(m)?)
    }

    /// ((M − A)ξ)(m) for a single m, reading ξ through `xi`.
    pub fn apply_at<F>(&self, m: &Site, xi: F) -> Result<Complex64>
    where
        F: Fn(&Site) -> Complex64,
    {
        let mut acc = self.diagonal(m)? * xi(m);
        for (j, h) in self.coeffs.hop.iter().enumerate() {
            acc += h * (xi(&m.shifted(j, -1)) + xi(&m.shifted(j, 1)));
        }
        Ok(acc)
    }

    /// (M − A)ξ on the support of ξ grown by one shell.
    pub fn apply(&self, xi: &LatticeSeq) -> Result<LatticeSeq> {
        let zero = Complex64::new(0.0, 0.0);
        let mut support: Vec<Site> = Vec::with_capacity(xi.len() * (1 + 2 * MAX_DIM));
        for m in xi.keys() {
            support.push(*m);
            for j in 0..self.coeffs.hop.len() {
                support.push(m.shifted(j, -1));
                support.push(m.shifted(j, 1));
            }
        }
        support.sort();
        support.dedup();
        let lookup = |s: &Site| xi.get(s).copied().unwrap_or(zero);
        support
            .into_iter()
            .map(|m| Ok((m, self.apply_at(&m, lookup)?)))
            .collect()
    }
}

/// Applies M(λ) − A to a finitely supported sequence.
pub fn apply_m_minus_a(
    model: &GraphModel,
    params: &MarylandParams,
    lambda: f64,
    xi: &LatticeSeq,
) -> Result<LatticeSeq> {
    LatticeOperator::real(model, params, lambda)?.apply(xi)
}

/// An open interval of ℝ ∖ spec H⁰ intersected with a window, guard removed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Gap {
    pub id: usize,
    pub lo: f64,
    pub hi: f64,
}

impl Gap {
    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn contains(&self, lambda: f64) -> bool {
        lambda >= self.lo && lambda <= self.hi
    }

    pub fn midpoint(&self) -> f64 {
        0.5 * (self.lo + self.hi)
    }

    /// `count` points uniformly spaced strictly inside the gap.
    pub fn interior_grid(&self, count: usize) -> Vec<f64> {
        let h = self.width() / (count + 1) as f64;
        (1..=count).map(|i| self.lo + i as f64 * h).collect()
    }
}

/// Components of window ∖ (Dirichlet set), each shrunk by [`GAP_GUARD`].
pub fn spectral_gaps(model: &GraphModel, lo: f64, hi: f64) -> Result<Vec<Gap>> {
    if !(lo < hi) {
        return Err(Error::InvalidInput(format!("empty window [{lo}, {hi}]")));
    }
    let pts = model.dirichlet_points(lo, hi)?;
    let mut edges = vec![lo];
    edges.extend(pts.iter().copied().filter(|&p| p > lo && p < hi));
    edges.push(hi);
    let gaps = edges
        .windows(2)
        .map(|w| (w[0] + GAP_GUARD, w[1] - GAP_GUARD))
        .filter(|(a, b)| a < b)
        .enumerate()
        .map(|(id, (lo, hi))| Gap { id, lo, hi })
        .collect();
    Ok(gaps)
}

#[cfg(test)]
mod tests {
    use super::*;

    const GOLDEN: f64 = 0.6180339887498949;

    fn canonical() -> (GraphModel, MarylandParams) {
        (
            GraphModel::free(1, 1.0).unwrap(),
            MarylandParams::new(1.0, vec![GOLDEN], 0.0).unwrap(),
        )
    }

    #[test]
    fn coupling_values() {
        let p = MarylandParams::new(1.0, vec![0.6180339887], 0.0).unwrap();
        assert_eq!(p.coupling(&Site::new(&[0])).unwrap(), 0.0);
        // −tan(π·0.6180339887) evaluated in 50-digit arithmetic
        let a1 = p.coupling(&Site::new(&[1])).unwrap();
        assert!((a1 - 2.572_011_609_410_334_5).abs() < 1e-12, "{a1}");
        let p2 = p.with_g(2.0).unwrap();
        for k in -5..=5 {
            let m = Site::new(&[k]);
            assert_eq!(p2.coupling(&m).unwrap(), 2.0 * p.coupling(&m).unwrap());
        }
    }

    #[test]
    fn coupling_rejects_degenerate_phase() {
        let p = MarylandParams::new(1.0, vec![GOLDEN], FRAC_PI_2).unwrap();
        assert!(matches!(p.coupling(&Site::new(&[0])), Err(Error::DegeneratePhase { .. })));
    }

    #[test]
    fn rational_frequency_is_rejected_at_two() {
        let p = MarylandParams::new(1.0, vec![0.5], 0.1).unwrap();
        match validate_params(&p, 2) {
            Err(Error::Rational { site, .. }) => assert_eq!(site, Site::new(&[2])),
            other => panic!("expected rationality error, got {other:?}"),
        }
    }

    #[test]
    fn golden_record_lows_are_fibonacci() {
        let p = MarylandParams::new(1.0, vec![GOLDEN], 0.0).unwrap();
        let r = validate_params(&p, 64).unwrap();
        let lows: Vec<i64> = r.record_lows.iter().map(|(s, _)| s.coords()[0]).collect();
        assert_eq!(lows, vec![1, 2, 3, 5, 8, 13, 21, 34, 55]);
        assert!(r.c_est > 0.0);
        assert_eq!(r.worst_site, Site::new(&[55]));
        assert_eq!(r.worst_integer, 34);
    }

    #[test]
    fn two_frequency_scan_passes() {
        let p = MarylandParams::new(1.0, vec![GOLDEN, 2f64.sqrt() - 1.0], 0.0).unwrap();
        let r = validate_params(&p, 16).unwrap();
        assert!(r.c_est > 0.0);
        assert!(r.beta_est >= 2.0);
    }

    #[test]
    fn phase_condition_at_origin() {
        let p = MarylandParams::new(1.0, vec![GOLDEN], FRAC_PI_2).unwrap();
        match validate_params(&p, 4) {
            Err(Error::DegeneratePhase { site, .. }) => assert!(site.is_origin()),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn symbol_free_values() {
        let model = GraphModel::free(1, 1.0).unwrap();
        let z = Complex64::new(PI * PI / 4.0, 0.0);
        let one = Complex64::new(1.0, 0.0);
        let i = Complex64::new(0.0, 1.0);
        assert!((symbol(&model, z, &[one]).unwrap() - PI).norm() < 1e-13);
        assert!(symbol(&model, z, &[i]).unwrap().norm() < 1e-13);
        let model2 = GraphModel::free(2, 1.0).unwrap();
        assert!((symbol(&model2, z, &[one, one]).unwrap() - 2.0 * PI).norm() < 1e-13);
    }

    #[test]
    fn symbol_near_dirichlet_errors() {
        let model = GraphModel::free(1, 1.0).unwrap();
        let z = Complex64::new(PI * PI, 0.0);
        let r = symbol(&model, z, &[Complex64::new(1.0, 0.0)]);
        assert!(matches!(r, Err(Error::NearDirichlet { .. })));
    }

    #[test]
    fn apply_to_delta() {
        let (model, params) = canonical();
        let lam = PI * PI / 4.0;
        let mut xi = LatticeSeq::new();
        xi.insert(Site::new(&[0]), Complex64::new(1.0, 0.0));
        let out = apply_m_minus_a(&model, &params, lam, &xi).unwrap();
        assert_eq!(out.len(), 3);
        assert!((out[&Site::new(&[1])] - PI / 2.0).norm() < 1e-13);
        assert!((out[&Site::new(&[-1])] - PI / 2.0).norm() < 1e-13);
        assert!(out[&Site::new(&[0])].norm() < 1e-13);

        let shifted = MarylandParams::new(1.0, vec![GOLDEN], PI / 4.0).unwrap();
        let out = apply_m_minus_a(&model, &shifted, lam, &xi).unwrap();
        assert!((out[&Site::new(&[0])] - 1.0).norm() < 1e-13);
    }

    #[test]
    fn gaps_free_edge() {
        let model = GraphModel::free(1, 1.0).unwrap();
        let gaps = spectral_gaps(&model, 0.0, 50.0).unwrap();
        let want = [(0.0, PI * PI), (PI * PI, 4.0 * PI * PI), (4.0 * PI * PI, 50.0)];
        assert_eq!(gaps.len(), 3);
        for (g, (a, b)) in gaps.iter().zip(want) {
            assert!((g.lo - a - GAP_GUARD).abs() < 1e-9);
            assert!((g.hi - b + GAP_GUARD).abs() < 1e-9);
        }
        let gaps2 = spectral_gaps(&GraphModel::free(2, 1.0).unwrap(), 0.0, 50.0).unwrap();
        assert_eq!(gaps, gaps2);
    }

    #[test]
    fn gaps_shifted_edge() {
        let model = GraphModel::new(vec![EdgeProfile::constant(1.0, 5.0).unwrap()]).unwrap();
        let gaps = spectral_gaps(&model, 0.0, 20.0).unwrap();
        assert_eq!(gaps.len(), 2);
        assert!((gaps[0].hi - (5.0 + PI * PI) + GAP_GUARD).abs() < 1e-9);
    }

    #[test]
    fn box_and_shells() {
        let c = Site::new(&[1, -1]);
        assert_eq!(box_sites(&c, 2).len(), 25);
        assert_eq!(shell_sites(&c, 0), vec![c]);
        assert_eq!(shell_sites(&c, 2).len(), 16);
        assert_eq!(box_sites(&Site::origin(3), 1).len(), 27);
    }

    #[test]
    fn site_parse_and_display() {
        assert_eq!(Site::parse("3").unwrap(), Site::new(&[3]));
        assert_eq!(Site::parse("(1,-2)").unwrap(), Site::new(&[1, -2]));
        let s = Site::new(&[-1, 2]);
        assert_eq!(Site::parse(&s.to_string()).unwrap(), s);
        assert!(Site::parse("x").is_err());
    }
}
