// SPDX-License-Identifier: AGPL-3.0-only

//! Brute-force certification by finite truncation.
//!
//! M(λ) − A is restricted to a box |n − c|∞ ≤ N, dropping couplings that
//! leave the box, and diagonalized densely. A true eigenvalue λ(m) of the
//! graph shows up as a near-zero eigenvalue of the truncated operator once
//! the box contains the localization region of the eigenvector.

use std::collections::BTreeMap;
use std::f64::consts::{FRAC_PI_2, PI};

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::dense::{inverse_norm1_estimate_symmetric, symmetric_eigen, ComplexLu, SymmetricEigen};
use crate::lattice::{box_sites, Gap, GraphModel, LatticeOperator, LatticeSeq, MarylandParams, Site};

/// Largest dense dimension the oracle will assemble.
pub const MAX_ORACLE_DIM: usize = 4096;

/// Krein round trip refuses matrices with a larger 1-norm condition estimate.
pub const MAX_CONDITION: f64 = 1e12;

/// Dense real symmetric restriction of a lattice operator to a box.
#[derive(Debug, Clone)]
pub struct TruncatedOperator {
    pub center: Site,
    pub box_radius: usize,
    sites: Vec<Site>,
    index: BTreeMap<Site, usize>,
    /// Row-major.
    matrix: Vec<f64>,
}

fn check_size(d: usize, radius: usize) -> Result<usize> {
    let side = 2 * radius + 1;
    let dim = side.checked_pow(d as u32).unwrap_or(usize::MAX);
    if dim > MAX_ORACLE_DIM {
        return Err(Error::Resource { dimension: dim, cap: MAX_ORACLE_DIM });
    }
    Ok(dim)
}

impl TruncatedOperator {
    fn from_parts(center: Site, box_radius: usize, diag: impl Fn(&Site) -> Result<f64>, hop: &[f64]) -> Result<Self> {
        let n = check_size(center.dim(), box_radius)?;
        let sites = box_sites(&center, box_radius);
        let index: BTreeMap<Site, usize> = sites.iter().enumerate().map(|(i, s)| (*s, i)).collect();
        let mut matrix = vec![0.0; n * n];
        for (i, s) in sites.iter().enumerate() {
            matrix[i * n + i] = diag(s)?;
            for (j, &h) in hop.iter().enumerate() {
                if let Some(&k) = index.get(&s.shifted(j, 1)) {
                    matrix[i * n + k] = h;
                    matrix[k * n + i] = h;
                }
            }
        }
        Ok(Self { center, box_radius, sites, index, matrix })
    }

    pub fn dim(&self) -> usize {
        self.sites.len()
    }

    pub fn sites(&self) -> &[Site] {
        &self.sites
    }

    pub fn position(&self, s: &Site) -> Option<usize> {
        self.index.get(s).copied()
    }

    pub fn entry(&self, i: usize, j: usize) -> f64 {
        self.matrix[i * self.dim() + j]
    }

    pub fn matrix(&self) -> &[f64] {
        &self.matrix
    }

    pub fn max_asymmetry(&self) -> f64 {
        let n = self.dim();
        let mut worst: f64 = 0.0;
        for i in 0..n {
            for j in 0..i {
                worst = worst.max((self.entry(i, j) - self.entry(j, i)).abs());
            }
        }
        worst
    }

    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        let n = self.dim();
        (0..n)
            .map(|i| self.matrix[i * n..(i + 1) * n].iter().zip(x).map(|(a, b)| a * b).sum())
            .collect()
    }

    pub fn eigen(&self, want_vectors: bool) -> Result<SymmetricEigen> {
        symmetric_eigen(&self.matrix, self.dim(), want_vectors)
    }

    /// Smallest |eigenvalue|.
    pub fn defect(&self) -> Result<f64> {
        let e = self.eigen(false)?;
        Ok(e.values.iter().map(|v| v.abs()).fold(f64::INFINITY, f64::min))
    }

    /// Near-zero eigenpair: (eigenvalue, eigenvector as a lattice sequence, full decomposition).
    pub fn nearest_zero(&self) -> Result<(f64, LatticeSeq, SymmetricEigen)> {
        let e = self.eigen(true)?;
        let k = e.nearest_zero();
        let v = e.vector(k).expect("vectors requested");
        let seq = self
            .sites
            .iter()
            .zip(v)
            .map(|(s, &x)| (*s, Complex64::new(x, 0.0)))
            .collect();
        Ok((e.values[k], seq, e))
    }

    pub fn to_sequence(&self, x: &[f64]) -> LatticeSeq {
        self.sites.iter().zip(x).map(|(s, &v)| (*s, Complex64::new(v, 0.0))).collect()
    }
}

/// M(λ) − A restricted to |n|∞ ≤ N around the origin.
pub fn build_truncated(
    model: &GraphModel,
    params: &MarylandParams,
    lambda: f64,
    box_radius: usize,
) -> Result<TruncatedOperator> {
    build_truncated_around(model, params, lambda, &Site::origin(model.dim()), box_radius)
}

/// M(λ) − A restricted to |n − center|∞ ≤ N.
pub fn build_truncated_around(
    model: &GraphModel,
    params: &MarylandParams,
    lambda: f64,
    center: &Site,
    box_radius: usize,
) -> Result<TruncatedOperator> {
    check_size(model.dim(), box_radius)?;
    let op = LatticeOperator::real(model, params, lambda)?;
    let hop: Vec<f64> = op.coefficients().hop.iter().map(|h| h.re).collect();
    TruncatedOperator::from_parts(*center, box_radius, |s| Ok(op.diagonal(s)?.re), &hop)
}

/// Smallest |eigenvalue| of the truncation over a λ grid.
#[derive(Debug, Clone, PartialEq)]
pub struct DefectCurve {
    pub lambdas: Vec<f64>,
    pub defects: Vec<f64>,
}

impl DefectCurve {
    /// λ values at strict interior local minima of the defect.
    pub fn local_minima(&self) -> Vec<f64> {
        let d = &self.defects;
        (1..d.len().saturating_sub(1))
            .filter(|&i| d[i] < d[i - 1] && d[i] <= d[i + 1])
            .map(|i| self.lambdas[i])
            .collect()
    }

    /// Local minimum closest to `lambda`.
    pub fn nearest_minimum(&self, lambda: f64) -> Option<f64> {
        self.local_minima()
            .into_iter()
            .min_by(|a, b| (a - lambda).abs().total_cmp(&(b - lambda).abs()))
    }

    pub fn step(&self) -> f64 {
        if self.lambdas.len() < 2 {
            0.0
        } else {
            self.lambdas[1] - self.lambdas[0]
        }
    }
}

/// Defect on `grid_size` uniformly spaced energies covering the gap.
pub fn defect_scan(
    model: &GraphModel,
    params: &MarylandParams,
    gap: &Gap,
    grid_size: usize,
    box_radius: usize,
) -> Result<DefectCurve> {
    if grid_size < 2 {
        return Err(Error::InvalidInput("defect scan needs at least two points".into()));
    }
    check_size(model.dim(), box_radius)?;
    let h = gap.width() / (grid_size - 1) as f64;
    let lambdas: Vec<f64> = (0..grid_size).map(|i| gap.lo + i as f64 * h).collect();
    let defects = lambdas
        .par_iter()
        .map(|&lam| build_truncated(model, params, lam, box_radius)?.defect())
        .collect::<Result<Vec<f64>>>()?;
    Ok(DefectCurve { lambdas, defects })
}

/// Classical Maryland operator ψ(n+1) + ψ(n−1) + c·tan(ωn − a)ψ(n) on [−N, N].
pub fn discrete_maryland(coupling: f64, omega: f64, phase: f64, box_radius: usize) -> Result<TruncatedOperator> {
    let diag = |s: &Site| -> Result<f64> {
        let x = omega * s.coords()[0] as f64 - phase - FRAC_PI_2;
        let margin = (x - PI * (x / PI).round()).abs();
        if margin < 1e-8 {
            return Err(Error::DegeneratePhase { site: *s, distance: margin });
        }
        Ok(coupling * (omega * s.coords()[0] as f64 - phase).tan())
    };
    TruncatedOperator::from_parts(Site::origin(1), box_radius, diag, &[1.0])
}

/// Σ|v|⁴ / (Σ|v|²)².
pub fn inverse_participation_ratio(v: &[f64]) -> f64 {
    let n2: f64 = v.iter().map(|x| x * x).sum();
    let n4: f64 = v.iter().map(|x| x.powi(4)).sum();
    n4 / (n2 * n2)
}

/// Mean IPR over all eigenvectors of a truncated operator.
pub fn mean_inverse_participation(op: &TruncatedOperator) -> Result<f64> {
    let e = op.eigen(true)?;
    let n = e.dim();
    Ok((0..n).map(|k| inverse_participation_ratio(e.vector(k).unwrap())).sum::<f64>() / n as f64)
}

/// Outcome of the resolvent round trip.
#[derive(Debug, Clone)]
pub struct KreinReport {
    pub z: Complex64,
    pub probe: Site,
    pub box_radius: usize,
    /// ‖(M(z) − A)x − δ_probe‖₂ over the whole lattice, x the box solution extended by zero.
    pub discrepancy: f64,
    /// Same residual restricted to the box (pure solve accuracy).
    pub interior_discrepancy: f64,
    pub condition_estimate: f64,
    /// x = (M(z) − A)_box⁻¹ δ_probe.
    pub solution: LatticeSeq,
}

/// Solves (M(z) − A)x = δ_probe on a box around the probe and measures how
/// well the zero-extended x solves the untruncated lattice equation.
pub fn krein_check(
    model: &GraphModel,
    params: &MarylandParams,
    z: Complex64,
    probe: &Site,
    box_radius: usize,
) -> Result<KreinReport> {
    if z.im.abs() < 0.1 {
        return Err(Error::InvalidInput(format!("|Im z| = {} must be at least 0.1", z.im.abs())));
    }
    let n = check_size(model.dim(), box_radius)?;
    let op = LatticeOperator::new(model, params, z)?;
    let sites = box_sites(probe, box_radius);
    let index: BTreeMap<Site, usize> = sites.iter().enumerate().map(|(i, s)| (*s, i)).collect();
    let mut a = vec![Complex64::new(0.0, 0.0); n * n];
    for (i, s) in sites.iter().enumerate() {
        a[i * n + i] = op.diagonal(s)?;
        for (j, h) in op.coefficients().hop.iter().enumerate() {
            if let Some(&k) = index.get(&s.shifted(j, 1)) {
                a[i * n + k] = *h;
                a[k * n + i] = *h;
            }
        }
    }
    let norm1 = (0..n)
        .map(|j| (0..n).map(|i| a[i * n + j].norm()).sum::<f64>())
        .fold(0.0, f64::max);
    let lu = ComplexLu::factor(&a, n)?;
    let condition_estimate = norm1 * inverse_norm1_estimate_symmetric(&lu)?;
    if condition_estimate > MAX_CONDITION {
        return Err(Error::Numerical(format!(
            "Krein solve ill-conditioned (estimate {condition_estimate:e})"
        )));
    }

    let mut rhs = vec![Complex64::new(0.0, 0.0); n];
    rhs[index[probe]] = Complex64::new(1.0, 0.0);
    let x = lu.solve(&rhs)?;
    let solution: LatticeSeq = sites.iter().zip(&x).map(|(s, v)| (*s, *v)).collect();

    let mut image = op.apply(&solution)?;
    *image.entry(*probe).or_insert(Complex64::new(0.0, 0.0)) -= 1.0;
    let mut total = 0.0;
    let mut interior = 0.0;
    for (s, v) in &image {
        let sq = v.norm_sqr();
        total += sq;
        if index.contains_key(s) {
            interior += sq;
        }
    }
    Ok(KreinReport {
        z,
        probe: *probe,
        box_radius,
        discrepancy: total.sqrt(),
        interior_discrepancy: interior.sqrt(),
        condition_estimate,
        solution,
    })
}
