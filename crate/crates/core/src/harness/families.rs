//! Deterministic test-function families.

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use super::config::ExperimentConfig;
use crate::error::{Error, Result};
use crate::grid::{GridFn, GridSpec};
use crate::sphere::{capped_sphere_rule, circle_rule, SphereFn};

/// A family member with the parameter it was generated from.
#[derive(Clone, Debug)]
pub struct Member<T> {
    pub param: f64,
    pub value: T,
}

#[derive(Clone, Debug)]
pub enum Family {
    Grid(Vec<Member<GridFn>>),
    Sphere(Vec<Member<SphereFn>>),
}

pub const FAMILY_NAMES: [&str; 4] = ["gaussian", "modulated", "knapp_cap", "random_bumps"];

/// `e^{-|x - c|²/(2σ²)}`.
pub fn gaussian(spec: GridSpec, width: f64, center: &[f64]) -> GridFn {
    let s2 = 2.0 * width * width;
    GridFn::from_fn(spec, |x| {
        let r2: f64 = x.iter().zip(center).map(|(a, b)| (a - b).powi(2)).sum();
        Complex64::new((-r2 / s2).exp(), 0.0)
    })
}

/// `e^{-|x|²/(2σ²)} e^{i v·x}`, whose transform is the Gaussian one shifted to `v`.
pub fn modulated(spec: GridSpec, width: f64, v: &[f64]) -> GridFn {
    let s2 = 2.0 * width * width;
    GridFn::from_fn(spec, |x| {
        let r2: f64 = x.iter().map(|a| a * a).sum();
        let phase: f64 = x.iter().zip(v).map(|(a, b)| a * b).sum();
        Complex64::from_polar((-r2 / s2).exp(), phase)
    })
}

/// Indicator of `{ω : ω_d >= cos δ}` on a rule fine enough for the cap.
///
/// For `d = 3` the rule has `n_cap` Gauss rings inside the cap; for `d = 2`
/// the circle rule is refined until the node spacing is at most `δ/16`.
pub fn knapp_cap(d: usize, delta: f64, n_cap: usize, n_phi: usize) -> Result<SphereFn> {
    if !(delta > 0.0 && delta < PI) {
        return Err(Error::InvalidScale(format!(
            "cap angle {delta} not in (0, π)"
        )));
    }
    let rule = match d {
        2 => {
            let m = ((32.0 * PI / delta).ceil() as usize).max(64);
            circle_rule(m + m % 2)?
        }
        3 => capped_sphere_rule(delta, n_cap, 8, n_phi)?,
        _ => return Err(Error::InvalidRule(format!("no cap rule for d = {d}"))),
    };
    let c = delta.cos();
    let one = Complex64::new(1.0, 0.0);
    let zero = Complex64::new(0.0, 0.0);
    // Capped rules put the cap boundary between rings; the slack keeps
    // roundoff in cos δ from moving a ring across it.
    Ok(SphereFn::from_fn(Arc::new(rule), |w| {
        if w[d - 1] >= c - 1e-14 {
            one
        } else {
            zero
        }
    }))
}

/// Sums of three modulated Gaussian bumps with complex normal amplitudes.
pub fn random_bumps(spec: GridSpec, count: usize, seed: u64) -> Vec<GridFn> {
    let d = spec.d();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let bumps: Vec<(Vec<f64>, f64, Vec<f64>, Complex64)> = (0..3)
                .map(|_| {
                    let c: Vec<f64> = (0..d).map(|_| rng.gen_range(-1.0..1.0)).collect();
                    let sigma = rng.gen_range(0.6..1.0);
                    let v: Vec<f64> = (0..d).map(|_| rng.gen_range(-1.0..1.0)).collect();
                    let amp =
                        Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal));
                    (c, sigma, v, amp)
                })
                .collect();
            GridFn::from_fn(spec, |x| {
                bumps
                    .iter()
                    .map(|(c, sigma, v, amp)| {
                        let r2: f64 = x.iter().zip(c).map(|(a, b)| (a - b).powi(2)).sum();
                        let phase: f64 = x.iter().zip(v).map(|(a, b)| a * b).sum();
                        amp * Complex64::from_polar((-r2 / (2.0 * sigma * sigma)).exp(), phase)
                    })
                    .sum()
            })
        })
        .collect()
}

/// The family named in the config, on the config's grid.
pub fn make_family(cfg: &ExperimentConfig) -> Result<Family> {
    let spec = cfg.grid_spec()?;
    let fam = &cfg.family;
    let origin = vec![0.0; cfg.d];
    match fam.name.as_str() {
        "gaussian" => Ok(Family::Grid(
            fam.widths
                .iter()
                .map(|&w| Member {
                    param: w,
                    value: gaussian(spec, w, &origin),
                })
                .collect(),
        )),
        "modulated" => Ok(Family::Grid(
            fam.widths
                .iter()
                .map(|&w| Member {
                    param: w,
                    value: modulated(spec, w, &fam.modulation),
                })
                .collect(),
        )),
        "knapp_cap" => Ok(Family::Sphere(
            fam.deltas
                .iter()
                .map(|&delta| {
                    Ok(Member {
                        param: delta,
                        value: knapp_cap(cfg.d, delta, cfg.knapp.n_cap, cfg.knapp.n_phi)?,
                    })
                })
                .collect::<Result<_>>()?,
        )),
        "random_bumps" => Ok(Family::Grid(
            random_bumps(spec, fam.count, cfg.seed)
                .into_iter()
                .enumerate()
                .map(|(i, f)| Member {
                    param: i as f64,
                    value: f,
                })
                .collect(),
        )),
        other => Err(Error::UnknownFamily(other.into())),
    }
}
