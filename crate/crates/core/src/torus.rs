// SPDX-License-Identifier: AGPL-3.0-only

//! Torus averages of the lattice symbol.
//!
//! On the real axis M(λ,θ) is real, so f(λ,θ) = 2i·arctan(M(λ,θ)/g) is
//! purely imaginary and its torus mean is f₀(λ) = 2iσ(λ). The conjugator t
//! solves the cohomological equation (1 − U)t = f − f₀ where U is the
//! frequency shift θ ↦ e^{2πiω}θ; on Fourier modes this is division by
//! 1 − e^{2πi⟨ω,n⟩}.
//!
//! All torus integrals use the uniform N^d grid θ_k = exp(2πik/N), which is
//! spectrally accurate for the analytic periodic integrands involved. Grids
//! are nested under doubling, so each refinement only evaluates new nodes.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};
use crate::lattice::{box_sites, EdgeCoefficients, Gap, GraphModel, MarylandParams, Site, GAP_GUARD};

/// Divisors below this abort the conjugator.
pub const SMALL_DIVISOR_FLOOR: f64 = 1e-8;

/// Default Fourier truncation radius for the conjugator.
pub const DEFAULT_CONJUGATOR_RADIUS: usize = 32;

/// Uniform tensor grid on 𝕋^d with N points per dimension.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct QuadratureGrid {
    points_per_dim: usize,
    dim: usize,
}

impl QuadratureGrid {
    pub fn new(points_per_dim: usize, dim: usize) -> Result<Self> {
        if points_per_dim < 16 || !points_per_dim.is_power_of_two() {
            return Err(Error::InvalidInput(format!(
                "grid size {points_per_dim} must be a power of two and at least 16"
            )));
        }
        if dim == 0 || dim > 3 {
            return Err(Error::InvalidInput(format!("grid dimension {dim} out of range")));
        }
        Ok(Self { points_per_dim, dim })
    }

    pub fn points_per_dim(&self) -> usize {
        self.points_per_dim
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn total(&self) -> usize {
        self.points_per_dim.pow(self.dim as u32)
    }

    /// Multi-index of flat node `flat` (row-major, last index fastest).
    pub fn index(&self, mut flat: usize) -> [usize; 3] {
        let mut out = [0; 3];
        for j in (0..self.dim).rev() {
            out[j] = flat % self.points_per_dim;
            flat /= self.points_per_dim;
        }
        out
    }

    pub fn node(&self, flat: usize) -> Vec<Complex64> {
        let idx = self.index(flat);
        (0..self.dim)
            .map(|j| Complex64::from_polar(1.0, 2.0 * PI * idx[j] as f64 / self.points_per_dim as f64))
            .collect()
    }

    /// Flat position of Fourier mode `n` (requires |n_j| < N/2).
    pub fn bin(&self, n: &Site) -> usize {
        let big = self.points_per_dim as i64;
        n.coords()
            .iter()
            .fold(0usize, |acc, &c| acc * self.points_per_dim + c.rem_euclid(big) as usize)
    }

    /// Fourier mode stored at flat bin `flat`, in (−N/2, N/2].
    pub fn mode(&self, flat: usize) -> Site {
        let idx = self.index(flat);
        let n = self.points_per_dim as i64;
        let coords: Vec<i64> = (0..self.dim)
            .map(|j| {
                let k = idx[j] as i64;
                if k > n / 2 {
                    k - n
                } else {
                    k
                }
            })
            .collect();
        Site::new(&coords)
    }
}

/// Quadrature controls.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureConfig {
    /// Stop when successive doublings differ by less than this.
    pub tol: f64,
    pub start_points: usize,
    /// Largest N per dimension for the doubling loops.
    pub max_points: usize,
    /// Largest N per dimension for FFT-based work (conjugator, eigenvectors).
    pub max_fft_points: usize,
}

impl QuadratureConfig {
    pub fn for_dim(d: usize) -> Self {
        let (max_points, max_fft_points) = match d {
            1 => (1 << 16, 1 << 16),
            2 => (4096, 1024),
            _ => (4096, 128),
        };
        Self { tol: 1e-12, start_points: 64, max_points, max_fft_points }
    }
}

/// σ(λ) with its convergence record.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SigmaValue {
    pub lambda: f64,
    pub sigma: f64,
    /// |σ_N − σ_{N/2}| at the accepted grid.
    pub error_estimate: f64,
    pub grid_used: usize,
}

/// Neumaier-compensated accumulator.
#[derive(Debug, Clone, Copy, Default)]
pub(crate) struct CompensatedSum {
    sum: f64,
    comp: f64,
}

impl CompensatedSum {
    pub(crate) fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub(crate) fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

/// Sum of `f(2cos θ_1, …, 2cos θ_d)` over the N^d grid; with `skip_even`
/// nodes whose indices are all even (the N/2 grid) are left out.
///
/// The reduction order is fixed, so results do not depend on thread count.
fn torus_sum<F>(d: usize, n: usize, skip_even: bool, f: &F) -> f64
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    let cos2: Vec<f64> = (0..n).map(|k| 2.0 * (2.0 * PI * k as f64 / n as f64).cos()).collect();
    let inner = n.pow(d as u32 - 1);
    let row = |first: usize| -> f64 {
        let mut acc = CompensatedSum::default();
        let mut c = [0.0; 3];
        c[0] = cos2[first];
        for flat in 0..inner {
            let mut rem = flat;
            let mut all_even = first.is_multiple_of(2);
            for j in (1..d).rev() {
                let k = rem % n;
                rem /= n;
                all_even &= k.is_multiple_of(2);
                c[j] = cos2[k];
            }
            if skip_even && all_even {
                continue;
            }
            acc.add(f(&c[..d]));
        }
        acc.value()
    };
    let partials: Vec<f64> = if d == 1 || n < 64 {
        (0..n).map(row).collect()
    } else {
        (0..n).into_par_iter().map(row).collect()
    };
    let mut total = CompensatedSum::default();
    for p in partials {
        total.add(p);
    }
    total.value()
}

/// Real parts of the edge coefficients at a real energy.
#[derive(Debug, Clone)]
struct RealCoefficients {
    hop: Vec<f64>,
    diag: f64,
}

impl RealCoefficients {
    fn from(c: &EdgeCoefficients) -> Self {
        Self { hop: c.hop.iter().map(|h| h.re).collect(), diag: c.diagonal().re }
    }

    fn symbol(&self, cos2: &[f64]) -> f64 {
        self.hop.iter().zip(cos2).map(|(h, c)| h * c).sum::<f64>() + self.diag
    }
}

/// Evaluates σ, σ′ and the conjugator for one model.
#[derive(Debug, Clone)]
pub struct SigmaEvaluator {
    model: GraphModel,
    params: MarylandParams,
    config: QuadratureConfig,
}

impl SigmaEvaluator {
    pub fn new(model: &GraphModel, params: &MarylandParams) -> Result<Self> {
        Self::with_config(model, params, QuadratureConfig::for_dim(model.dim()))
    }

    pub fn with_config(
        model: &GraphModel,
        params: &MarylandParams,
        config: QuadratureConfig,
    ) -> Result<Self> {
        if model.dim() != params.dim() {
            return Err(Error::InvalidInput(format!(
                "model has d = {} but omega has {} components",
                model.dim(),
                params.dim()
            )));
        }
        if !(config.tol > 0.0) {
            return Err(Error::InvalidInput("quadrature tolerance must be positive".into()));
        }
        QuadratureGrid::new(config.start_points, model.dim())?;
        Ok(Self { model: model.clone(), params: params.clone(), config })
    }

    pub fn model(&self) -> &GraphModel {
        &self.model
    }

    pub fn params(&self) -> &MarylandParams {
        &self.params
    }

    pub fn config(&self) -> &QuadratureConfig {
        &self.config
    }

    pub fn dim(&self) -> usize {
        self.model.dim()
    }

    fn real_coefficients(&self, lambda: f64) -> Result<RealCoefficients> {
        Ok(RealCoefficients::from(&self.model.coefficients(Complex64::new(lambda, 0.0))?))
    }

    /// Doubles N from `start_points` until two successive means agree to `tol`.
    fn converged_mean<F>(&self, lambda: f64, tol_scale: impl Fn(f64) -> f64, f: &F) -> Result<SigmaValue>
    where
        F: Fn(&[f64]) -> f64 + Sync,
    {
        let d = self.dim();
        let mut n = self.config.start_points;
        let mut sum = torus_sum(d, n, false, f);
        let mut prev = sum / n.pow(d as u32) as f64;
        loop {
            let next = 2 * n;
            if next > self.config.max_points {
                return Err(Error::Convergence {
                    lambda,
                    detail: format!(
                        "grid cap {} per dimension reached before tolerance {:e}",
                        self.config.max_points, self.config.tol
                    ),
                });
            }
            sum += torus_sum(d, next, true, f);
            let value = sum / next.pow(d as u32) as f64;
            let err = (value - prev).abs();
            if err < self.config.tol * tol_scale(value) {
                return Ok(SigmaValue { lambda, sigma: value, error_estimate: err, grid_used: next });
            }
            prev = value;
            n = next;
        }
    }

    /// σ(λ) = torus mean of arctan(M(λ,θ)/g).
    pub fn sigma(&self, lambda: f64) -> Result<SigmaValue> {
        let coeffs = self.real_coefficients(lambda)?;
        let g = self.params.g();
        let v = self.converged_mean(lambda, |_| 1.0, &|c: &[f64]| (coeffs.symbol(c) / g).atan())?;
        if v.sigma.abs() >= PI / 2.0 {
            return Err(Error::InternalConsistency(format!(
                "sigma({lambda}) = {} outside (-pi/2, pi/2)",
                v.sigma
            )));
        }
        Ok(v)
    }

    /// σ on one fixed grid, no refinement.
    pub fn sigma_on_grid(&self, lambda: f64, grid: QuadratureGrid) -> Result<f64> {
        let coeffs = self.real_coefficients(lambda)?;
        let g = self.params.g();
        let n = grid.points_per_dim();
        let f = |c: &[f64]| (coeffs.symbol(c) / g).atan();
        Ok(torus_sum(self.dim(), n, false, &f) / grid.total() as f64)
    }

    /// σ′(λ) = torus mean of g·∂_λM/(M² + g²), with ∂_λM from centered
    /// differences of the edge coefficients (step 1e-6·gap width).
    pub fn sigma_prime(&self, lambda: f64, gap: &Gap) -> Result<f64> {
        let inside = (lambda - gap.lo).min(gap.hi - lambda).max(0.0);
        let h = (1e-6 * gap.width()).min(0.5 * (GAP_GUARD + inside));
        self.sigma_prime_with_step(lambda, h)
    }

    pub fn sigma_prime_with_step(&self, lambda: f64, h: f64) -> Result<f64> {
        if !(h > 0.0) {
            return Err(Error::InvalidInput(format!("difference step {h} must be positive")));
        }
        let c0 = self.real_coefficients(lambda)?;
        let cp = self.real_coefficients(lambda + h)?;
        let cm = self.real_coefficients(lambda - h)?;
        let deriv = RealCoefficients {
            hop: cp.hop.iter().zip(&cm.hop).map(|(a, b)| (a - b) / (2.0 * h)).collect(),
            diag: (cp.diag - cm.diag) / (2.0 * h),
        };
        let g = self.params.g();
        let f = |c: &[f64]| {
            let m = c0.symbol(c);
            g * deriv.symbol(c) / (m * m + g * g)
        };
        let v = self.converged_mean(lambda, |x: f64| x.abs().max(1.0), &f)?;
        if !(v.sigma > 0.0) {
            return Err(Error::InternalConsistency(format!(
                "sigma'({lambda}) = {} is not positive; M'(lambda) > 0 is violated",
                v.sigma
            )));
        }
        Ok(v.sigma)
    }

    /// f(λ,θ) = 2i·arctan(M(λ,θ)/g) on every node of `grid`.
    pub fn phase_samples(&self, lambda: f64, grid: QuadratureGrid) -> Result<Vec<Complex64>> {
        if grid.dim() != self.dim() {
            return Err(Error::InvalidInput("grid dimension does not match the model".into()));
        }
        let coeffs = self.model.coefficients(Complex64::new(lambda, 0.0))?;
        let g = self.params.g();
        let two_i = Complex64::new(0.0, 2.0);
        let samples = (0..grid.total())
            .into_par_iter()
            .map(|k| two_i * (coeffs.symbol(&grid.node(k)) / g).atan())
            .collect();
        Ok(samples)
    }

    /// Fourier coefficients of t = (1 − U)⁻¹(f − f₀), truncated to |n|∞ ≤ radius.
    pub fn conjugator(
        &self,
        lambda: f64,
        radius: usize,
        grid: QuadratureGrid,
    ) -> Result<ConjugatorCoeffs> {
        let n = grid.points_per_dim();
        if 2 * radius >= n {
            return Err(Error::InvalidInput(format!(
                "radius {radius} needs more than {n} grid points per dimension"
            )));
        }
        let f = self.phase_samples(lambda, grid)?;
        let max_real_part = f.iter().map(|v| v.re.abs()).fold(0.0, f64::max);
        let fhat = analyze(&f, grid);
        let f0 = fhat[0];

        let origin = Site::origin(self.dim());
        let mut coeffs = BTreeMap::new();
        let mut min_divisor = f64::INFINITY;
        let mut t_bins = vec![Complex64::new(0.0, 0.0); grid.total()];
        let mut ut_bins = t_bins.clone();
        for mode in box_sites(&origin, radius) {
            if mode.is_origin() {
                coeffs.insert(mode, Complex64::new(0.0, 0.0));
                continue;
            }
            let rot = self.params.rotation(&mode);
            let divisor = (Complex64::new(1.0, 0.0) - rot).norm();
            if divisor < SMALL_DIVISOR_FLOOR {
                return Err(Error::SmallDivisor { mode, divisor });
            }
            min_divisor = min_divisor.min(divisor);
            let bin = grid.bin(&mode);
            let t = fhat[bin] / (1.0 - rot);
            coeffs.insert(mode, t);
            t_bins[bin] = t;
            ut_bins[bin] = t * rot;
        }

        // (1 − U)t + f₀ − f on the nodes
        let t_nodes = synthesize(&t_bins, grid);
        let ut_nodes = synthesize(&ut_bins, grid);
        let cocycle_residual = (0..grid.total())
            .map(|k| (t_nodes[k] - ut_nodes[k] + f0 - f[k]).norm())
            .fold(0.0, f64::max);

        let peak = fhat.iter().map(|c| c.norm()).fold(0.0, f64::max);
        let tail = (0..grid.total())
            .filter(|&k| grid.mode(k).norm_inf() as usize >= n / 4)
            .map(|k| fhat[k].norm())
            .fold(0.0, f64::max);

        Ok(ConjugatorCoeffs {
            lambda,
            radius,
            grid,
            f0,
            coeffs,
            min_divisor,
            max_real_part,
            cocycle_residual,
            tail_ratio: if peak > 0.0 { tail / peak } else { 0.0 },
            t_nodes,
        })
    }
}

/// Truncated Fourier data of the conjugator at one energy.
#[derive(Debug, Clone)]
pub struct ConjugatorCoeffs {
    pub lambda: f64,
    pub radius: usize,
    pub grid: QuadratureGrid,
    /// Torus mean of f; equals 2iσ on the grid.
    pub f0: Complex64,
    /// t̂(n) for |n|∞ ≤ radius; t̂(0) = 0.
    pub coeffs: BTreeMap<Site, Complex64>,
    /// Smallest |1 − e^{2πi⟨ω,n⟩}| over retained n ≠ 0.
    pub min_divisor: f64,
    /// max |Re f| over the grid; zero on the real axis up to rounding.
    pub max_real_part: f64,
    /// max over nodes of |t − Ut + f₀ − f|.
    pub cocycle_residual: f64,
    /// Largest |f̂(n)| with |n|∞ ≥ N/4, relative to the largest coefficient.
    pub tail_ratio: f64,
    t_nodes: Vec<Complex64>,
}

impl ConjugatorCoeffs {
    pub fn get(&self, n: &Site) -> Option<Complex64> {
        self.coeffs.get(n).copied()
    }

    /// σ recovered from the mean coefficient.
    pub fn sigma(&self) -> f64 {
        self.f0.im / 2.0
    }

    /// t on the grid nodes.
    pub fn t_nodes(&self) -> &[Complex64] {
        &self.t_nodes
    }

    /// Largest |t̂(n)| over each shell |n|∞ = k, k = 0..=radius.
    pub fn shell_maxima(&self) -> Vec<f64> {
        let mut out = vec![0.0; self.radius + 1];
        for (n, c) in &self.coeffs {
            let k = n.norm_inf() as usize;
            out[k] = f64::max(out[k], c.norm());
        }
        out
    }
}

fn fft_axes(data: &mut [Complex64], grid: QuadratureGrid, fft: Arc<dyn Fft<f64>>) {
    let n = grid.points_per_dim();
    let d = grid.dim();
    let mut line = vec![Complex64::new(0.0, 0.0); n];
    for axis in 0..d {
        let stride = n.pow((d - 1 - axis) as u32);
        let outer = grid.total() / (n * stride);
        for o in 0..outer {
            for s in 0..stride {
                let base = o * n * stride + s;
                for k in 0..n {
                    line[k] = data[base + k * stride];
                }
                fft.process(&mut line);
                for k in 0..n {
                    data[base + k * stride] = line[k];
                }
            }
        }
    }
}

/// Fourier coefficients ĥ(n) = N^{−d} Σ_k h(θ_k) θ_k^{−n}, stored by bin.
pub(crate) fn analyze(values: &[Complex64], grid: QuadratureGrid) -> Vec<Complex64> {
    let mut data = values.to_vec();
    let fft = FftPlanner::new().plan_fft_forward(grid.points_per_dim());
    fft_axes(&mut data, grid, fft);
    let scale = 1.0 / grid.total() as f64;
    data.iter_mut().for_each(|v| *v *= scale);
    data
}

/// Node values h(θ_k) = Σ_n ĥ(n) θ_k^n from binned coefficients.
pub(crate) fn synthesize(coeffs: &[Complex64], grid: QuadratureGrid) -> Vec<Complex64> {
    let mut data = coeffs.to_vec();
    let fft = FftPlanner::new().plan_fft_inverse(grid.points_per_dim());
    fft_axes(&mut data, grid, fft);
    data
}

/// σ(λ) to tolerance `tol` with default grid limits.
pub fn sigma(model: &GraphModel, params: &MarylandParams, lambda: f64, tol: f64) -> Result<SigmaValue> {
    let mut config = QuadratureConfig::for_dim(model.dim());
    config.tol = tol;
    SigmaEvaluator::with_config(model, params, config)?.sigma(lambda)
}

pub fn sigma_prime(model: &GraphModel, params: &MarylandParams, lambda: f64, gap: &Gap) -> Result<f64> {
    SigmaEvaluator::new(model, params)?.sigma_prime(lambda, gap)
}

pub fn conjugator_coeffs(
    model: &GraphModel,
    params: &MarylandParams,
    lambda: f64,
    radius: usize,
    grid: QuadratureGrid,
) -> Result<ConjugatorCoeffs> {
    SigmaEvaluator::new(model, params)?.conjugator(lambda, radius, grid)
}
