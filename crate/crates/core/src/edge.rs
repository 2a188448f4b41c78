// SPDX-License-Identifier: AGPL-3.0-only

//! Edge problem −y″ + U y = z y on [0, l] with a piecewise-constant potential.
//!
//! Each constant segment of width w and height U has the exact transfer
//! matrix acting on (y, y′):
//!
//! ```text
//!   [ cos(kw)        w·sinc(kw) ]
//!   [ −q·w·sinc(kw)  cos(kw)    ]      q = z − U,  k = √q
//! ```
//!
//! Both entries are entire in q, so the branch of √q is irrelevant and
//! q ≤ 0 continues to cosh/sinh automatically through complex arithmetic.
//! The fundamental pair is s (s(0)=0, s′(0)=1) and c (c(0)=1, c′(0)=0).

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Below this |kw| the sinc factor is evaluated by its Taylor series.
const SINC_SERIES_CUTOFF: f64 = 1e-4;

/// Default number of scan intervals for the Dirichlet root search.
pub const DIRICHLET_SCAN_STEPS: usize = 2048;

/// Absolute bisection tolerance on Dirichlet eigenvalues.
pub const DIRICHLET_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Segment {
    pub width: f64,
    pub value: f64,
}

/// One edge type: its length and a piecewise-constant potential.
#[derive(Debug, Clone, PartialEq)]
pub struct EdgeProfile {
    length: f64,
    segments: Vec<Segment>,
}

impl EdgeProfile {
    /// Builds a profile whose length is the sum of the segment widths.
    pub fn new(segments: Vec<Segment>) -> Result<Self> {
        if segments.is_empty() {
            return Err(Error::InvalidInput("edge profile needs at least one segment".into()));
        }
        for (i, seg) in segments.iter().enumerate() {
            if !(seg.width > 0.0) || !seg.width.is_finite() {
                return Err(Error::InvalidInput(format!(
                    "segment {i} has non-positive width {}",
                    seg.width
                )));
            }
            if !seg.value.is_finite() {
                return Err(Error::InvalidInput(format!("segment {i} has non-finite potential")));
            }
        }
        let length = segments.iter().map(|s| s.width).sum();
        Ok(Self { length, segments })
    }

    /// Builds a profile and checks that the widths add up to `length`.
    pub fn with_length(length: f64, segments: Vec<Segment>) -> Result<Self> {
        if !(length > 0.0) {
            return Err(Error::InvalidInput(format!("edge length {length} must be positive")));
        }
        let profile = Self::new(segments)?;
        if (profile.length - length).abs() > 1e-12 * length {
            return Err(Error::InvalidInput(format!(
                "segment widths sum to {} but edge length is {length}",
                profile.length
            )));
        }
        Ok(Self { length, ..profile })
    }

    /// Edge of length `length` carrying the constant potential `value`.
    pub fn constant(length: f64, value: f64) -> Result<Self> {
        Self::new(vec![Segment { width: length, value }])
    }

    pub fn free(length: f64) -> Result<Self> {
        Self::constant(length, 0.0)
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    pub fn segments(&self) -> &[Segment] {
        &self.segments
    }

    /// Potential at `t`; at a breakpoint the value of the right-hand segment is returned.
    pub fn potential_at(&self, t: f64) -> f64 {
        let mut start = 0.0;
        for seg in &self.segments {
            if t < start + seg.width {
                return seg.value;
            }
            start += seg.width;
        }
        self.segments.last().map(|s| s.value).unwrap_or(0.0)
    }

    /// Interior breakpoints (segment boundaries strictly inside (0, l)).
    pub fn breakpoints(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.segments.len().saturating_sub(1));
        let mut pos = 0.0;
        for seg in &self.segments[..self.segments.len() - 1] {
            pos += seg.width;
            out.push(pos);
        }
        out
    }
}

/// Values of s, s′, c, c′ at one point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EdgeState {
    pub s: Complex64,
    pub sp: Complex64,
    pub c: Complex64,
    pub cp: Complex64,
}

impl EdgeState {
    fn initial() -> Self {
        let one = Complex64::new(1.0, 0.0);
        let zero = Complex64::new(0.0, 0.0);
        Self { s: zero, sp: one, c: one, cp: zero }
    }

    /// s′c − s c′, identically 1.
    pub fn wronskian(&self) -> Complex64 {
        self.sp * self.c - self.s * self.cp
    }

    fn propagate(&self, z: Complex64, seg_value: f64, width: f64) -> Self {
        let t = transfer(z - seg_value, width);
        let (s, sp) = t.apply(self.s, self.sp);
        let (c, cp) = t.apply(self.c, self.cp);
        Self { s, sp, c, cp }
    }
}

#[derive(Debug, Clone, Copy)]
struct Transfer {
    cos: Complex64,
    wsinc: Complex64,
    q: Complex64,
}

impl Transfer {
    fn apply(&self, y: Complex64, yp: Complex64) -> (Complex64, Complex64) {
        (
            self.cos * y + self.wsinc * yp,
            -self.q * self.wsinc * y + self.cos * yp,
        )
    }
}

fn transfer(q: Complex64, width: f64) -> Transfer {
    let k = q.sqrt();
    let x = k * width;
    let (cos, sinc) = if x.norm() < SINC_SERIES_CUTOFF {
        let x2 = x * x;
        (
            1.0 - x2 / 2.0 + x2 * x2 / 24.0,
            1.0 - x2 / 6.0 + x2 * x2 / 120.0,
        )
    } else {
        (x.cos(), x.sin() / x)
    };
    Transfer { cos, wsinc: sinc * width, q }
}

/// Fundamental solutions of one edge at a fixed complex energy.
#[derive(Debug, Clone)]
pub struct EdgeBasis {
    z: Complex64,
    profile: EdgeProfile,
    /// Segment start positions; `starts[i]` is where segment i begins.
    starts: Vec<f64>,
    /// State at each segment start, plus the final state at t = l.
    states: Vec<EdgeState>,
}

impl EdgeBasis {
    pub fn z(&self) -> Complex64 {
        self.z
    }

    pub fn profile(&self) -> &EdgeProfile {
        &self.profile
    }

    pub fn end(&self) -> EdgeState {
        *self.states.last().expect("basis always has a final state")
    }

    pub fn s_end(&self) -> Complex64 {
        self.end().s
    }

    pub fn sp_end(&self) -> Complex64 {
        self.end().sp
    }

    pub fn c_end(&self) -> Complex64 {
        self.end().c
    }

    pub fn cp_end(&self) -> Complex64 {
        self.end().cp
    }

    /// η(z) = c(l;z) + s′(l;z).
    pub fn hill_discriminant(&self) -> Complex64 {
        let e = self.end();
        e.c + e.sp
    }

    pub fn wronskian(&self) -> Complex64 {
        self.end().wronskian()
    }

    /// s, s′, c, c′ at any t ∈ [0, l] (clamped).
    pub fn state_at(&self, t: f64) -> EdgeState {
        let l = self.profile.length();
        let t = t.clamp(0.0, l);
        if t >= l {
            return self.end();
        }
        let idx = self.starts.partition_point(|&s| s <= t).saturating_sub(1);
        let seg = self.profile.segments()[idx];
        let local = t - self.starts[idx];
        if local == 0.0 {
            return self.states[idx];
        }
        self.states[idx].propagate(self.z, seg.value, local)
    }

    pub fn s(&self, t: f64) -> Complex64 {
        self.state_at(t).s
    }

    pub fn c(&self, t: f64) -> Complex64 {
        self.state_at(t).c
    }
}

/// Propagates the fundamental pair across `profile` at energy `z`.
pub fn solve_edge(profile: &EdgeProfile, z: Complex64) -> EdgeBasis {
    let mut states = Vec::with_capacity(profile.segments().len() + 1);
    let mut starts = Vec::with_capacity(profile.segments().len());
    let mut state = EdgeState::initial();
    let mut pos = 0.0;
    for seg in profile.segments() {
        starts.push(pos);
        states.push(state);
        state = state.propagate(z, seg.value, seg.width);
        pos += seg.width;
    }
    states.push(state);
    EdgeBasis { z, profile: profile.clone(), starts, states }
}

pub fn solve_edge_real(profile: &EdgeProfile, lambda: f64) -> EdgeBasis {
    solve_edge(profile, Complex64::new(lambda, 0.0))
}

pub fn hill_discriminant(profile: &EdgeProfile, z: Complex64) -> Complex64 {
    solve_edge(profile, z).hill_discriminant()
}

fn s_end_real(profile: &EdgeProfile, lambda: f64) -> f64 {
    solve_edge_real(profile, lambda).s_end().re
}

/// Zeros of λ ↦ s(l;λ) in `[lo, hi]` using the default scan resolution.
pub fn dirichlet_spectrum(profile: &EdgeProfile, lo: f64, hi: f64) -> Result<Vec<f64>> {
    dirichlet_spectrum_with_steps(profile, lo, hi, DIRICHLET_SCAN_STEPS)
}

/// Zeros of λ ↦ s(l;λ) in `[lo, hi]`.
///
/// Completeness assumes no two Dirichlet eigenvalues fall inside one scan
/// interval of width (hi − lo)/steps.
pub fn dirichlet_spectrum_with_steps(
    profile: &EdgeProfile,
    lo: f64,
    hi: f64,
    steps: usize,
) -> Result<Vec<f64>> {
    if !(lo.is_finite() && hi.is_finite()) || hi < lo {
        return Err(Error::InvalidInput(format!("bad window [{lo}, {hi}]")));
    }
    if steps == 0 {
        return Err(Error::InvalidInput("scan needs at least one step".into()));
    }
    let h = (hi - lo) / steps as f64;
    let mut roots: Vec<f64> = Vec::new();
    let push = |r: f64, roots: &mut Vec<f64>| {
        if roots.last().is_none_or(|&last| (r - last).abs() > 10.0 * DIRICHLET_TOL) {
            roots.push(r);
        }
    };
    let mut a = lo;
    let mut fa = s_end_real(profile, a);
    for i in 1..=steps {
        let b = if i == steps { hi } else { lo + i as f64 * h };
        let fb = s_end_real(profile, b);
        if fa == 0.0 {
            push(a, &mut roots);
        } else if fa * fb < 0.0 {
            push(bisect_sign_change(profile, a, b, fa), &mut roots);
        }
        if i == steps && fb == 0.0 {
            push(b, &mut roots);
        }
        a = b;
        fa = fb;
    }
    Ok(roots)
}

fn bisect_sign_change(profile: &EdgeProfile, mut a: f64, mut b: f64, mut fa: f64) -> f64 {
    while b - a > DIRICHLET_TOL {
        let mid = 0.5 * (a + b);
        let fm = s_end_real(profile, mid);
        if fm == 0.0 {
            return mid;
        }
        if fa * fm < 0.0 {
            b = mid;
        } else {
            a = mid;
            fa = fm;
        }
    }
    0.5 * (a + b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn close(a: Complex64, b: f64, tol: f64) -> bool {
        (a.re - b).abs() < tol && a.im.abs() < tol
    }

    #[test]
    fn free_edge_at_zero_energy() {
        let basis = solve_edge_real(&EdgeProfile::free(1.0).unwrap(), 0.0);
        assert!(close(basis.s_end(), 1.0, 1e-14));
        assert!(close(basis.c_end(), 1.0, 1e-14));
        assert!(close(basis.sp_end(), 1.0, 1e-14));
        assert!(close(basis.cp_end(), 0.0, 1e-14));
    }

    #[test]
    fn free_edge_at_quarter_wave() {
        let basis = solve_edge_real(&EdgeProfile::free(1.0).unwrap(), PI * PI / 4.0);
        assert!(close(basis.s_end(), 2.0 / PI, 1e-14));
        assert!(close(basis.c_end(), 0.0, 1e-14));
        assert!(close(basis.sp_end(), 0.0, 1e-14));
        assert!(close(basis.cp_end(), -PI / 2.0, 1e-14));
    }

    #[test]
    fn energy_equal_to_constant_potential() {
        let basis = solve_edge_real(&EdgeProfile::constant(1.0, 5.0).unwrap(), 5.0);
        assert!(close(basis.s_end(), 1.0, 1e-14));
        assert!(close(basis.c_end(), 1.0, 1e-14));
        assert!(close(basis.sp_end(), 1.0, 1e-14));
        assert!(close(basis.cp_end(), 0.0, 1e-14));
    }

    #[test]
    fn hill_discriminant_free_values() {
        let p = EdgeProfile::free(1.0).unwrap();
        for (z, want) in [(0.0, 2.0), (PI * PI / 4.0, 0.0), (PI * PI, -2.0)] {
            let eta = hill_discriminant(&p, Complex64::new(z, 0.0));
            assert!(close(eta, want, 1e-13), "eta({z}) = {eta}");
        }
    }

    #[test]
    fn negative_energy_uses_hyperbolic_continuation() {
        let basis = solve_edge_real(&EdgeProfile::free(1.0).unwrap(), -4.0);
        assert!(close(basis.s_end(), 2f64.sinh() / 2.0, 1e-13));
        assert!(close(basis.c_end(), 2f64.cosh(), 1e-13));
    }

    #[test]
    fn near_zero_wavenumber_is_smooth() {
        // Straddle the series cutoff: both sides must agree with s(1) = sin(k)/k.
        let p = EdgeProfile::free(1.0).unwrap();
        for z in [1e-9, 0.99e-8, 1.01e-8, 1e-7] {
            let k = f64::sqrt(z);
            let s = solve_edge_real(&p, z).s_end().re;
            assert!((s - k.sin() / k).abs() < 1e-15);
        }
    }

    #[test]
    fn pointwise_evaluation_matches_closed_form() {
        let p = EdgeProfile::free(2.0).unwrap();
        let z = 3.0;
        let k = f64::sqrt(z);
        let basis = solve_edge_real(&p, z);
        for t in [0.0, 0.3, 1.1, 2.0] {
            let st = basis.state_at(t);
            assert!(close(st.s, (k * t).sin() / k, 1e-13));
            assert!(close(st.c, (k * t).cos(), 1e-13));
            assert!(close(st.sp, (k * t).cos(), 1e-13));
            assert!(close(st.cp, -k * (k * t).sin(), 1e-13));
        }
    }

    #[test]
    fn segments_compose() {
        // Splitting a constant edge into pieces must not change anything.
        let whole = EdgeProfile::constant(1.0, 2.5).unwrap();
        let split = EdgeProfile::new(vec![
            Segment { width: 0.25, value: 2.5 },
            Segment { width: 0.5, value: 2.5 },
            Segment { width: 0.25, value: 2.5 },
        ])
        .unwrap();
        let z = Complex64::new(7.0, 0.3);
        let a = solve_edge(&whole, z).end();
        let b = solve_edge(&split, z).end();
        assert!((a.s - b.s).norm() < 1e-13);
        assert!((a.cp - b.cp).norm() < 1e-12);
    }

    #[test]
    fn rejects_bad_profiles() {
        assert!(EdgeProfile::new(vec![]).is_err());
        assert!(EdgeProfile::new(vec![Segment { width: 0.0, value: 1.0 }]).is_err());
        assert!(EdgeProfile::new(vec![Segment { width: -1.0, value: 1.0 }]).is_err());
        assert!(EdgeProfile::with_length(1.0, vec![Segment { width: 0.5, value: 0.0 }]).is_err());
        assert!(EdgeProfile::with_length(
            1.0,
            vec![Segment { width: 0.5, value: 0.0 }, Segment { width: 0.5, value: 1.0 }]
        )
        .is_ok());
    }

    #[test]
    fn dirichlet_free_edge() {
        let p = EdgeProfile::free(1.0).unwrap();
        let roots = dirichlet_spectrum(&p, 0.0, 50.0).unwrap();
        assert_eq!(roots.len(), 2);
        assert!((roots[0] - PI * PI).abs() < 1e-9);
        assert!((roots[1] - 4.0 * PI * PI).abs() < 1e-9);
        assert!(dirichlet_spectrum(&p, -10.0, 5.0).unwrap().is_empty());
    }

    #[test]
    fn dirichlet_shifted_edge() {
        let p = EdgeProfile::constant(1.0, 5.0).unwrap();
        let roots = dirichlet_spectrum(&p, 0.0, 60.0).unwrap();
        assert_eq!(roots.len(), 2);
        assert!((roots[0] - 5.0 - PI * PI).abs() < 1e-9);
        assert!((roots[1] - 5.0 - 4.0 * PI * PI).abs() < 1e-9);
    }

    #[test]
    fn dirichlet_root_on_window_boundary() {
        let p = EdgeProfile::free(1.0).unwrap();
        let roots = dirichlet_spectrum_with_steps(&p, PI * PI, 20.0, 16).unwrap();
        assert_eq!(roots.len(), 1);
        assert!((roots[0] - PI * PI).abs() < 1e-9);
    }

    #[test]
    fn breakpoints_and_potential_lookup() {
        let p = EdgeProfile::new(vec![
            Segment { width: 0.3, value: 1.0 },
            Segment { width: 0.7, value: -2.0 },
        ])
        .unwrap();
        assert_eq!(p.breakpoints(), vec![0.3]);
        assert_eq!(p.potential_at(0.1), 1.0);
        assert_eq!(p.potential_at(0.5), -2.0);
        assert_eq!(p.potential_at(1.0), -2.0);
    }
}
