// SPDX-License-Identifier: AGPL-3.0-only

//! TOML run configuration.
//!
//! ```toml
//! [model]
//! d = 1
//! lengths = [1.0]
//! # optional, one list per direction; widths must add up to the length
//! # segments = [[{ width = 0.5, value = 0.0 }, { width = 0.5, value = 3.0 }]]
//!
//! [maryland]
//! g = 1.0
//! omega = [0.6180339887498949]
//! phi = 0.0
//!
//! [compute]
//! window = [0.0, 10.3]
//! index_radius = 8
//!
//! [output]
//! directory = "out"
//! format = "csv"
//! ```

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::edge::{EdgeProfile, Segment};
use crate::error::{Error, Result};
use crate::lattice::{GraphModel, MarylandParams, DIOPHANTINE_RADIUS, MAX_DIM};
use crate::spectrum::{default_box_radius, SolverOptions};
use crate::torus::QuadratureConfig;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SegmentSpec {
    pub width: f64,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelBlock {
    pub d: usize,
    pub lengths: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub segments: Option<Vec<Vec<SegmentSpec>>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MarylandBlock {
    pub g: f64,
    pub omega: Vec<f64>,
    pub phi: f64,
}

fn default_window() -> [f64; 2] {
    [0.0, 10.3]
}
fn default_index_radius() -> usize {
    4
}
fn default_sigma_tol() -> f64 {
    1e-12
}
fn default_lambda_tol() -> f64 {
    1e-13
}
fn default_initial_scan() -> usize {
    8
}
fn default_diophantine_radius() -> usize {
    DIOPHANTINE_RADIUS
}
fn default_samples() -> usize {
    200
}
fn default_samples_per_edge() -> usize {
    9
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ComputeBlock {
    #[serde(default = "default_window")]
    pub window: [f64; 2],
    #[serde(default = "default_index_radius")]
    pub index_radius: usize,
    /// Lattice box for eigenvectors; defaults to 24, 12, 6 for d = 1, 2, 3.
    #[serde(default)]
    pub box_radius: Option<usize>,
    /// Box for the dense oracle; defaults to box_radius.
    #[serde(default)]
    pub oracle_box: Option<usize>,
    #[serde(default = "default_sigma_tol")]
    pub sigma_tol: f64,
    #[serde(default = "default_lambda_tol")]
    pub lambda_tol: f64,
    #[serde(default = "default_initial_scan")]
    pub initial_scan: usize,
    #[serde(default)]
    pub max_grid_points: Option<usize>,
    #[serde(default)]
    pub max_fft_points: Option<usize>,
    #[serde(default = "default_diophantine_radius")]
    pub diophantine_radius: usize,
    /// Gap used by sigma-curve, eigenfunction and defect-scan.
    #[serde(default)]
    pub gap: usize,
    /// Grid size for sigma-curve and defect-scan.
    #[serde(default = "default_samples")]
    pub samples: usize,
    #[serde(default = "default_samples_per_edge")]
    pub samples_per_edge: usize,
    /// Lattice index for the eigenfunction command.
    #[serde(default)]
    pub index: Option<Vec<i64>>,
}

impl Default for ComputeBlock {
    fn default() -> Self {
        toml::from_str("").expect("all compute fields have defaults")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Csv,
    Json,
}

impl OutputFormat {
    pub fn extension(self) -> &'static str {
        match self {
            Self::Csv => "csv",
            Self::Json => "json",
        }
    }

    pub fn parse(text: &str) -> Result<Self> {
        match text {
            "csv" => Ok(Self::Csv),
            "json" => Ok(Self::Json),
            other => Err(Error::Config(format!("unknown format '{other}' (expected csv or json)"))),
        }
    }
}

fn default_directory() -> PathBuf {
    PathBuf::from("out")
}
fn default_format() -> OutputFormat {
    OutputFormat::Csv
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputBlock {
    #[serde(default = "default_directory")]
    pub directory: PathBuf,
    #[serde(default = "default_format")]
    pub format: OutputFormat,
}

impl Default for OutputBlock {
    fn default() -> Self {
        Self { directory: default_directory(), format: default_format() }
    }
}

/// Command-line values that replace file values.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Overrides {
    pub gap: Option<usize>,
    pub index_radius: Option<usize>,
    /// Sets both the eigenvector box and the oracle box.
    pub box_radius: Option<usize>,
    /// Grid size for curves and scans, samples per edge for eigenfunctions.
    pub samples: Option<usize>,
    pub index: Option<Vec<i64>>,
    pub format: Option<OutputFormat>,
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub model: ModelBlock,
    pub maryland: MarylandBlock,
    #[serde(default)]
    pub compute: ComputeBlock,
    #[serde(default)]
    pub output: OutputBlock,
}

impl RunConfig {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let cfg: Self = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.check()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_toml_str(&text)
    }

    /// Structural checks that do not need the numerics.
    pub fn check(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::Config(msg));
        let m = &self.model;
        if m.d == 0 || m.d > MAX_DIM {
            return bad(format!("model.d = {} must be between 1 and {MAX_DIM}", m.d));
        }
        if m.lengths.len() != m.d {
            return bad(format!("model.lengths has {} entries, expected {}", m.lengths.len(), m.d));
        }
        if m.lengths.iter().any(|l| !(l.is_finite() && *l > 0.0)) {
            return bad("model.lengths must be positive".into());
        }
        if let Some(segs) = &m.segments {
            if segs.len() != m.d {
                return bad(format!("model.segments has {} lists, expected {}", segs.len(), m.d));
            }
        }
        let p = &self.maryland;
        if p.omega.len() != m.d {
            return bad(format!("maryland.omega has {} entries, expected {}", p.omega.len(), m.d));
        }
        if !(p.g.is_finite() && p.g > 0.0) {
            return bad(format!("maryland.g = {} must be positive", p.g));
        }
        if !p.phi.is_finite() || p.omega.iter().any(|w| !w.is_finite()) {
            return bad("maryland.phi and maryland.omega must be finite".into());
        }
        let c = &self.compute;
        if !(c.window[0] < c.window[1]) || c.window.iter().any(|w| !w.is_finite()) {
            return bad(format!("compute.window {:?} is empty", c.window));
        }
        if !(c.sigma_tol > 0.0) || !(c.lambda_tol > 0.0) {
            return bad("tolerances must be positive".into());
        }
        if c.initial_scan == 0 || c.samples < 2 {
            return bad("compute.initial_scan must be positive and compute.samples at least 2".into());
        }
        if c.index_radius > c.diophantine_radius {
            return bad(format!(
                "compute.index_radius = {} exceeds compute.diophantine_radius = {}",
                c.index_radius, c.diophantine_radius
            ));
        }
        for cap in [c.max_grid_points, c.max_fft_points].into_iter().flatten() {
            if !cap.is_power_of_two() || cap < 64 {
                return bad(format!("grid cap {cap} must be a power of two, at least 64"));
            }
        }
        if let Some(idx) = &c.index {
            if idx.len() != m.d {
                return bad(format!("compute.index has {} entries, expected {}", idx.len(), m.d));
            }
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.model.d
    }

    pub fn graph_model(&self) -> Result<GraphModel> {
        let m = &self.model;
        let profiles = match &m.segments {
            None => m.lengths.iter().map(|&l| EdgeProfile::free(l)).collect::<Result<Vec<_>>>(),
            Some(segs) => m
                .lengths
                .iter()
                .zip(segs)
                .map(|(&l, s)| {
                    EdgeProfile::with_length(l, s.iter().map(|x| Segment { width: x.width, value: x.value }).collect())
                })
                .collect(),
        };
        GraphModel::new(profiles.map_err(|e| Error::Config(e.to_string()))?)
            .map_err(|e| Error::Config(e.to_string()))
    }

    pub fn params(&self) -> Result<MarylandParams> {
        let p = &self.maryland;
        MarylandParams::new(p.g, p.omega.clone(), p.phi).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn box_radius(&self) -> usize {
        self.compute.box_radius.unwrap_or_else(|| default_box_radius(self.dim()))
    }

    pub fn oracle_box(&self) -> usize {
        self.compute.oracle_box.unwrap_or_else(|| self.box_radius())
    }

    pub fn quadrature(&self) -> QuadratureConfig {
        let mut q = QuadratureConfig::for_dim(self.dim());
        q.tol = self.compute.sigma_tol;
        if let Some(n) = self.compute.max_grid_points {
            q.max_points = n;
        }
        if let Some(n) = self.compute.max_fft_points {
            q.max_fft_points = n;
        }
        q
    }

    pub fn solver_options(&self) -> SolverOptions {
        let mut o = SolverOptions::for_dim(self.dim());
        o.lambda_tol = self.compute.lambda_tol;
        o.initial_scan = self.compute.initial_scan;
        o.box_radius = self.box_radius();
        o.quadrature = self.quadrature();
        o
    }

    /// Applies command-line overrides, then re-runs the structural checks.
    pub fn apply(&mut self, o: &Overrides) -> Result<()> {
        if let Some(g) = o.gap {
            self.compute.gap = g;
        }
        if let Some(r) = o.index_radius {
            self.compute.index_radius = r;
        }
        if let Some(b) = o.box_radius {
            self.compute.box_radius = Some(b);
            self.compute.oracle_box = Some(b);
        }
        if let Some(n) = o.samples {
            self.compute.samples = n;
            self.compute.samples_per_edge = n;
        }
        if let Some(m) = &o.index {
            self.compute.index = Some(m.clone());
        }
        if let Some(f) = o.format {
            self.output.format = f;
        }
        if let Some(dir) = &o.out {
            self.output.directory = dir.clone();
        }
        self.check()
    }

    /// SHA-256 of the canonical JSON form of the effective configuration.
    /// The output directory is left out so relocated runs hash the same.
    pub fn hash(&self) -> String {
        let mut c = self.clone();
        c.output.directory = PathBuf::new();
        let canonical = serde_json::to_string(&c).expect("config serializes");
        let digest = Sha256::digest(canonical.as_bytes());
        digest.iter().map(|b| format!("{b:02x}")).collect()
    }
}
