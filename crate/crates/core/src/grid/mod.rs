//! Functions sampled on uniform cubic grids in `R^d` (`d` = 2 or 3).
//!
//! A grid covers `[-L, L)^d` with `n` samples per axis, nodes at
//! `x_j = -L + j h`, `h = 2L/n`, stored row-major (last axis fastest).
//! Its dual grid (where Fourier transforms live) has spacing `π/L` and
//! half-width `π/h`.

mod fft;
pub mod fourier;
pub mod io;
pub mod maximal;

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exponents::Rational;

pub use fourier::{convolve, fourier_transform, Direction};
pub use maximal::hl_maximal;

/// Geometry of a uniform grid. Stores both half-widths so that
/// `spec.dual().dual() == spec` holds bit-for-bit.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GridSpec {
    d: usize,
    n: usize,
    half_width: f64,
    dual_half_width: f64,
}

impl GridSpec {
    pub fn new(d: usize, half_width: f64, n: usize) -> Result<Self> {
        if !(2..=3).contains(&d) {
            return Err(Error::InvalidGrid(format!("dimension {d} not in 2..=3")));
        }
        if n < 16 || n % 2 != 0 {
            return Err(Error::InvalidGrid(format!(
                "n = {n} must be even and >= 16"
            )));
        }
        if !(half_width.is_finite() && half_width > 0.0) {
            return Err(Error::InvalidGrid(format!(
                "half width {half_width} must be positive"
            )));
        }
        Ok(GridSpec {
            d,
            n,
            half_width,
            dual_half_width: n as f64 * PI / (2.0 * half_width),
        })
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// `L`.
    pub fn half_width(&self) -> f64 {
        self.half_width
    }

    /// `h = 2L/n`.
    pub fn spacing(&self) -> f64 {
        2.0 * self.half_width / self.n as f64
    }

    /// `h^d`.
    pub fn cell_volume(&self) -> f64 {
        self.spacing().powi(self.d as i32)
    }

    pub fn len(&self) -> usize {
        self.n.pow(self.d as u32)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn dual(&self) -> GridSpec {
        GridSpec {
            d: self.d,
            n: self.n,
            half_width: self.dual_half_width,
            dual_half_width: self.half_width,
        }
    }

    pub fn coord(&self, j: usize) -> f64 {
        -self.half_width + j as f64 * self.spacing()
    }

    pub fn axis(&self) -> Vec<f64> {
        (0..self.n).map(|j| self.coord(j)).collect()
    }

    /// Per-axis indices of a flat row-major index.
    pub fn unravel(&self, mut flat: usize) -> [usize; 3] {
        let mut idx = [0; 3];
        for a in (0..self.d).rev() {
            idx[a] = flat % self.n;
            flat /= self.n;
        }
        idx
    }

    pub fn ravel(&self, idx: &[usize]) -> usize {
        idx[..self.d].iter().fold(0, |acc, &i| acc * self.n + i)
    }

    pub fn point(&self, flat: usize) -> [f64; 3] {
        let idx = self.unravel(flat);
        let mut x = [0.0; 3];
        for a in 0..self.d {
            x[a] = self.coord(idx[a]);
        }
        x
    }

    /// Nearest grid index along one axis, if the coordinate lies in the box.
    pub fn nearest_index(&self, x: f64) -> Option<usize> {
        let j = ((x + self.half_width) / self.spacing()).round();
        (j >= 0.0 && j < self.n as f64).then_some(j as usize)
    }
}

/// Complex samples on a [`GridSpec`].
#[derive(Clone, Debug, PartialEq)]
pub struct GridFn {
    spec: GridSpec,
    values: Vec<Complex64>,
}

impl GridFn {
    pub fn new(spec: GridSpec, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != spec.len() {
            return Err(Error::Shape(format!(
                "{} values for a grid of {} nodes",
                values.len(),
                spec.len()
            )));
        }
        if let Some(j) = values
            .iter()
            .position(|v| !(v.re.is_finite() && v.im.is_finite()))
        {
            return Err(Error::Shape(format!("non-finite value at node {j}")));
        }
        Ok(GridFn { spec, values })
    }

    pub fn zeros(spec: GridSpec) -> Self {
        GridFn {
            spec,
            values: vec![Complex64::new(0.0, 0.0); spec.len()],
        }
    }

    /// Samples `f` at every node.
    pub fn from_fn(spec: GridSpec, f: impl Fn(&[f64]) -> Complex64) -> Self {
        let values = (0..spec.len())
            .map(|j| {
                let x = spec.point(j);
                f(&x[..spec.d])
            })
            .collect();
        GridFn { spec, values }
    }

    pub(crate) fn from_raw(spec: GridSpec, values: Vec<Complex64>) -> Self {
        debug_assert_eq!(values.len(), spec.len());
        GridFn { spec, values }
    }

    pub fn spec(&self) -> &GridSpec {
        &self.spec
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<Complex64> {
        self.values
    }

    pub fn map(&self, f: impl Fn(Complex64) -> Complex64) -> GridFn {
        GridFn {
            spec: self.spec,
            values: self.values.iter().map(|&v| f(v)).collect(),
        }
    }

    pub fn scale(&self, c: f64) -> GridFn {
        self.map(|v| v * c)
    }

    pub fn zip_with(
        &self,
        other: &GridFn,
        f: impl Fn(Complex64, Complex64) -> Complex64,
    ) -> Result<GridFn> {
        ensure_same_spec(&self.spec, &other.spec)?;
        Ok(GridFn {
            spec: self.spec,
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        })
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    /// `⟨f, g⟩ = Σ f conj(g) h^d`.
    pub fn inner(&self, other: &GridFn) -> Result<Complex64> {
        ensure_same_spec(&self.spec, &other.spec)?;
        let s: Complex64 = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| a * b.conj())
            .sum();
        Ok(s * self.spec.cell_volume())
    }

    /// Circular shift by whole grid cells (`f(x - k h)`).
    pub fn shift_cells(&self, cells: &[isize]) -> GridFn {
        let n = self.spec.n as isize;
        let mut out = vec![Complex64::new(0.0, 0.0); self.values.len()];
        for (flat, v) in self.values.iter().enumerate() {
            let idx = self.spec.unravel(flat);
            let mut dst = [0usize; 3];
            for a in 0..self.spec.d {
                dst[a] = (idx[a] as isize + cells[a]).rem_euclid(n) as usize;
            }
            out[self.spec.ravel(&dst)] = *v;
        }
        GridFn {
            spec: self.spec,
            values: out,
        }
    }
}

pub(crate) fn ensure_same_spec(a: &GridSpec, b: &GridSpec) -> Result<()> {
    if a != b {
        return Err(Error::SpecMismatch(format!("{a:?} vs {b:?}")));
    }
    Ok(())
}

/// Discrete `L^p` norm `(Σ |f|^p h^d)^{1/p}`, or the max norm for `p = ∞`.
pub fn lp_norm(f: &GridFn, p: Rational) -> Result<f64> {
    if p < Rational::integer(1) {
        return Err(Error::ExponentDomain(format!("p = {p} < 1")));
    }
    if p.is_infinite() {
        return Ok(f.max_abs());
    }
    let pf = p.to_f64();
    let sum: f64 = if pf == 1.0 {
        f.values.iter().map(|v| v.norm()).sum()
    } else if pf == 2.0 {
        f.values.iter().map(|v| v.norm_sqr()).sum()
    } else {
        f.values.iter().map(|v| v.norm().powf(pf)).sum()
    };
    Ok((sum * f.spec.cell_volume()).powf(1.0 / pf))
}

/// `χ_ε(x) = ε^{-d} exp(-π |x/ε|²)`, the unit-mass Gaussian mollifier.
pub fn mollifier(spec: GridSpec, eps: f64) -> Result<GridFn> {
    if !(eps.is_finite() && eps > 0.0) {
        return Err(Error::InvalidScale(format!(
            "mollifier scale {eps} must be positive"
        )));
    }
    let d = spec.d();
    let axis: Vec<f64> = spec
        .axis()
        .iter()
        .map(|x| (-PI * (x / eps).powi(2)).exp() / eps)
        .collect();
    Ok(separable_product(spec, &vec![axis; d]))
}

/// `χ̂(ξ) = exp(-|ξ|²/(4π))` for the Gaussian `χ`.
pub fn chi_hat(r2: f64) -> f64 {
    (-r2 / (4.0 * PI)).exp()
}

/// Tensor product of per-axis real profiles.
pub(crate) fn separable_product(spec: GridSpec, axes: &[Vec<f64>]) -> GridFn {
    let n = spec.n();
    let mut values = Vec::with_capacity(spec.len());
    match spec.d() {
        2 => {
            for i in 0..n {
                for j in 0..n {
                    values.push(Complex64::new(axes[0][i] * axes[1][j], 0.0));
                }
            }
        }
        _ => {
            for i in 0..n {
                for j in 0..n {
                    let a = axes[0][i] * axes[1][j];
                    for k in 0..n {
                        values.push(Complex64::new(a * axes[2][k], 0.0));
                    }
                }
            }
        }
    }
    GridFn::from_raw(spec, values)
}

/// `h̃(ξ) = conj(h(-ξ))`, with `-x_j` taken on the periodic grid.
pub fn reflect_conjugate(h: &GridFn) -> GridFn {
    let spec = *h.spec();
    let n = spec.n();
    let mut out = vec![Complex64::new(0.0, 0.0); spec.len()];
    for (flat, v) in h.values().iter().enumerate() {
        let idx = spec.unravel(flat);
        let mut m = [0usize; 3];
        for a in 0..spec.d() {
            m[a] = (n - idx[a]) % n;
        }
        out[spec.ravel(&m)] = v.conj();
    }
    GridFn::from_raw(spec, out)
}

/// How much of a function sits on the outer shell `max_a |x_a| >= 0.9 L`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ShellReport {
    /// `max_shell |f| / max |f|`.
    pub shell_max_rel: f64,
    /// `Σ_shell |f| / Σ |f|`.
    pub shell_mass_rel: f64,
}

pub const DECAY_THRESHOLD: f64 = 1e-9;

impl ShellReport {
    pub fn decays(&self) -> bool {
        self.shell_max_rel < DECAY_THRESHOLD
    }
}

pub fn shell_report(f: &GridFn) -> ShellReport {
    let spec = f.spec();
    let cut = 0.9 * spec.half_width();
    let (mut peak, mut shell_peak, mut mass, mut shell_mass) = (0.0f64, 0.0f64, 0.0, 0.0);
    for (flat, v) in f.values().iter().enumerate() {
        let a = v.norm();
        let x = spec.point(flat);
        peak = peak.max(a);
        mass += a;
        if x[..spec.d()].iter().any(|c| c.abs() >= cut) {
            shell_peak = shell_peak.max(a);
            shell_mass += a;
        }
    }
    if peak == 0.0 {
        return ShellReport {
            shell_max_rel: 0.0,
            shell_mass_rel: 0.0,
        };
    }
    ShellReport {
        shell_max_rel: shell_peak / peak,
        shell_mass_rel: shell_mass / mass,
    }
}

pub fn ensure_decay(f: &GridFn) -> Result<ShellReport> {
    let r = shell_report(f);
    if !r.decays() {
        return Err(Error::NoDecay {
            shell_max_rel: r.shell_max_rel,
        });
    }
    Ok(r)
}

/// Finite, strictly decreasing list of positive scales standing in for `ε > 0`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScaleLadder {
    scales: Vec<f64>,
}

impl ScaleLadder {
    pub fn new(mut scales: Vec<f64>) -> Result<Self> {
        if scales.is_empty() {
            return Err(Error::InvalidLadder("empty ladder".into()));
        }
        if scales.iter().any(|s| !(s.is_finite() && *s > 0.0)) {
            return Err(Error::InvalidLadder(
                "scales must be positive and finite".into(),
            ));
        }
        scales.sort_by(|a, b| b.total_cmp(a));
        if scales.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::InvalidLadder("repeated scale".into()));
        }
        Ok(ScaleLadder { scales })
    }

    /// `{2^{k·step}} ∩ [lo, hi]`, e.g. `step = 0.5` for the half-dyadic ladder.
    pub fn dyadic(lo: f64, hi: f64, step: f64) -> Result<Self> {
        if !(lo > 0.0 && hi >= lo && step > 0.0) {
            return Err(Error::InvalidLadder(format!(
                "bad dyadic range [{lo}, {hi}] step {step}"
            )));
        }
        let slack = 1e-12;
        let k_lo = ((lo.log2() / step) - slack).ceil() as i64;
        let k_hi = ((hi.log2() / step) + slack).floor() as i64;
        let scales: Vec<f64> = (k_lo..=k_hi).map(|k| (k as f64 * step).exp2()).collect();
        Self::new(scales)
    }

    /// The default half-dyadic ladder on `[h, L/2]` of a grid.
    pub fn for_grid(spec: &GridSpec) -> Result<Self> {
        Self::dyadic(spec.spacing(), spec.half_width() / 2.0, 0.5)
    }

    pub fn scales(&self) -> &[f64] {
        &self.scales
    }

    pub fn len(&self) -> usize {
        self.scales.len()
    }

    pub fn is_empty(&self) -> bool {
        self.scales.is_empty()
    }

    pub fn max(&self) -> f64 {
        self.scales[0]
    }

    pub fn min(&self) -> f64 {
        *self.scales.last().expect("non-empty")
    }

    /// Checks `min >= h` and `max <= L/2` for the grid the scales act on.
    pub fn validate_for(&self, spec: &GridSpec) -> Result<()> {
        let tol = 1e-12;
        if self.min() < spec.spacing() * (1.0 - tol) {
            return Err(Error::InvalidLadder(format!(
                "scale {} below grid spacing {}",
                self.min(),
                spec.spacing()
            )));
        }
        if self.max() > spec.half_width() / 2.0 * (1.0 + tol) {
            return Err(Error::InvalidLadder(format!(
                "scale {} above L/2 = {}",
                self.max(),
                spec.half_width() / 2.0
            )));
        }
        Ok(())
    }

    /// Sub-ladder of the `k` largest scales.
    pub fn largest(&self, k: usize) -> Result<Self> {
        Self::new(self.scales.iter().take(k).copied().collect())
    }

    pub fn filter(&self, keep: impl Fn(f64) -> bool) -> Result<Self> {
        Self::new(self.scales.iter().copied().filter(|&s| keep(s)).collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exponents::Rational;

    fn gaussian(spec: GridSpec) -> GridFn {
        GridFn::from_fn(spec, |x| {
            Complex64::new((-PI * x.iter().map(|c| c * c).sum::<f64>()).exp(), 0.0)
        })
    }

    #[test]
    fn spec_invariants() {
        let s = GridSpec::new(3, 8.0, 128).unwrap();
        assert_eq!(s.spacing(), 0.125);
        assert_eq!(s.dual().spacing(), PI / 8.0);
        assert_eq!(s.dual().half_width(), PI / 0.125);
        assert_eq!(s.dual().dual(), s);
        let odd = GridSpec::new(3, 1.7, 42).unwrap();
        assert_eq!(odd.dual().dual(), odd);
        assert!(GridSpec::new(3, 8.0, 15).is_err());
        assert!(GridSpec::new(3, 8.0, 14).is_err());
        assert!(GridSpec::new(4, 8.0, 16).is_err());
        assert!(GridSpec::new(2, 0.0, 16).is_err());
    }

    #[test]
    fn ravel_roundtrip() {
        let s = GridSpec::new(3, 1.0, 16).unwrap();
        for flat in [0, 1, 17, 300, s.len() - 1] {
            assert_eq!(s.ravel(&s.unravel(flat)), flat);
        }
        assert_eq!(s.point(0), [-1.0, -1.0, -1.0]);
    }

    #[test]
    fn lp_norm_gaussian() {
        let spec = GridSpec::new(3, 8.0, 128).unwrap();
        let g = gaussian(spec);
        assert!((lp_norm(&g, Rational::integer(1)).unwrap() - 1.0).abs() < 1e-8);
        let two = lp_norm(&g, Rational::integer(2)).unwrap();
        assert!((two - 2f64.powf(-0.75)).abs() < 1e-6, "{two}");
        assert_eq!(
            lp_norm(&GridFn::zeros(spec), Rational::new(4, 3)).unwrap(),
            0.0
        );
        assert!(lp_norm(&g, Rational::new(1, 2)).is_err());
        assert!((lp_norm(&g, Rational::Infinite).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn mollifier_properties() {
        let spec = GridSpec::new(2, 8.0, 128).unwrap();
        let m1 = mollifier(spec, 1.0).unwrap();
        let g = gaussian(spec);
        assert!(m1
            .values()
            .iter()
            .zip(g.values())
            .all(|(a, b)| (a - b).norm() < 1e-15));

        let half = mollifier(spec, 0.5).unwrap();
        assert!((lp_norm(&half, Rational::integer(1)).unwrap() - 1.0).abs() < 1e-6);
        let origin = spec.ravel(&[64, 64]);
        assert!((half.values()[origin].re - 0.5f64.powi(-2)).abs() < 1e-12);
        assert!(mollifier(spec, 0.0).is_err());
        assert!(mollifier(spec, -1.0).is_err());
    }

    #[test]
    fn reflect_conjugate_cases() {
        let spec = GridSpec::new(2, 4.0, 32).unwrap();
        let g = gaussian(spec);
        assert_eq!(reflect_conjugate(&g), g);

        let v = [0.7, -0.3];
        let modulated = GridFn::from_fn(spec, |x| {
            Complex64::from_polar(
                (-x[0] * x[0] - x[1] * x[1]).exp(),
                x[0] * v[0] + x[1] * v[1],
            )
        });
        let r = reflect_conjugate(&modulated);
        // Interior nodes: conj(e^{-i ξ·v}) G(ξ) = e^{i ξ·v} G(ξ).
        for (flat, val) in r.values().iter().enumerate() {
            let idx = spec.unravel(flat);
            if idx[0] == 0 || idx[1] == 0 {
                continue;
            }
            assert!((val - modulated.values()[flat]).norm() < 1e-14);
        }

        let noisy = GridFn::from_fn(spec, |x| Complex64::new(x[0].sin() + x[1], x[0] * x[1]));
        assert_eq!(reflect_conjugate(&reflect_conjugate(&noisy)), noisy);
    }

    #[test]
    fn ladder_construction() {
        let spec = GridSpec::new(3, 8.0, 128).unwrap();
        let l = ScaleLadder::for_grid(&spec).unwrap();
        assert_eq!(l.max(), 4.0);
        assert_eq!(l.min(), 0.125);
        assert_eq!(l.len(), 11);
        assert!(l.scales().windows(2).all(|w| w[0] > w[1]));
        l.validate_for(&spec).unwrap();
        assert!(ScaleLadder::new(vec![]).is_err());
        assert!(ScaleLadder::new(vec![1.0, 1.0]).is_err());
        assert!(ScaleLadder::new(vec![1.0, -1.0]).is_err());
        assert!(ScaleLadder::new(vec![0.01])
            .unwrap()
            .validate_for(&spec)
            .is_err());
        assert!(ScaleLadder::new(vec![5.0])
            .unwrap()
            .validate_for(&spec)
            .is_err());
        assert_eq!(
            l.largest(3).unwrap().scales(),
            &[4.0, 1.5f64.exp2(), 2.0][..]
        );
    }

    #[test]
    fn decay_check() {
        let spec = GridSpec::new(2, 8.0, 64).unwrap();
        assert!(shell_report(&gaussian(spec)).decays());
        let flat = GridFn::from_fn(spec, |_| Complex64::new(1.0, 0.0));
        let r = shell_report(&flat);
        assert!(!r.decays());
        assert!(matches!(ensure_decay(&flat), Err(Error::NoDecay { .. })));
        assert!(shell_report(&GridFn::zeros(spec)).decays());
    }
}
