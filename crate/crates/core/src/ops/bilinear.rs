use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::grid::GridFn;
use crate::sphere::SphereFn;

/// Multilinear interpolation of a grid function at `v`; `None` outside the
/// interpolation range `[-L, L - h]^d`.
pub fn interpolate(kernel: &GridFn, v: &[f64]) -> Option<Complex64> {
    let spec = kernel.spec();
    let (d, n, h, lo) = (spec.d(), spec.n(), spec.spacing(), -spec.half_width());
    let mut base = [0usize; 3];
    let mut frac = [0.0f64; 3];
    for a in 0..d {
        let t = (v[a] - lo) / h;
        if !(t >= 0.0 && t <= (n - 1) as f64) {
            return None;
        }
        let i = (t.floor() as usize).min(n - 2);
        base[a] = i;
        frac[a] = t - i as f64;
    }
    let vals = kernel.values();
    let mut acc = Complex64::new(0.0, 0.0);
    for corner in 0..(1usize << d) {
        let mut weight = 1.0;
        let mut flat = 0;
        for a in 0..d {
            let bit = (corner >> (d - 1 - a)) & 1;
            weight *= if bit == 1 { frac[a] } else { 1.0 - frac[a] };
            flat = flat * n + base[a] + bit;
        }
        if weight != 0.0 {
            acc += vals[flat] * weight;
        }
    }
    Some(acc)
}

/// Interpolating view of a kernel, checked to cover `|v| <= reach`.
pub struct KernelSampler<'a> {
    kernel: &'a GridFn,
}

impl<'a> KernelSampler<'a> {
    pub fn new(kernel: &'a GridFn, reach: f64) -> Result<Self> {
        let spec = kernel.spec();
        if spec.half_width() - spec.spacing() < reach {
            return Err(Error::KernelBoxTooSmall(format!(
                "kernel box [-{L}, {L}) with spacing {h} cannot interpolate at |v| = {reach}",
                L = spec.half_width(),
                h = spec.spacing()
            )));
        }
        Ok(KernelSampler { kernel })
    }

    pub fn at(&self, v: &[f64]) -> Complex64 {
        interpolate(self.kernel, v).expect("inside the checked reach")
    }
}

/// `Σ_k Σ_l w_k w_l g1(ω_k) g2(ω_l) K(ω_l - ω_k)` with `K` interpolated.
pub fn bilinear_form(g1: &SphereFn, g2: &SphereFn, kernel: &GridFn) -> Result<Complex64> {
    let rule = g1.rule();
    if rule != g2.rule() {
        return Err(Error::Shape(
            "bilinear form needs both functions on one rule".into(),
        ));
    }
    if kernel.spec().d() != rule.d() {
        return Err(Error::Shape("kernel and rule dimensions differ".into()));
    }
    let sampler = KernelSampler::new(kernel, 2.0)?;
    let d = rule.d();
    let w = rule.weights();
    let mut total = Complex64::new(0.0, 0.0);
    for k in 0..rule.len() {
        let a = g1.values()[k] * w[k];
        if a == Complex64::new(0.0, 0.0) {
            continue;
        }
        let wk = rule.node(k);
        let mut row = Complex64::new(0.0, 0.0);
        for l in 0..rule.len() {
            let wl = rule.node(l);
            let mut v = [0.0; 3];
            for c in 0..d {
                v[c] = wl[c] - wk[c];
            }
            row += g2.values()[l] * w[l] * sampler.at(&v[..d]);
        }
        total += a * row;
    }
    Ok(total)
}
