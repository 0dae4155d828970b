//! Experiment harness: configuration, test families, the experiments and
//! their reports.

pub mod config;
pub mod families;
pub mod identities;
pub mod knapp;
pub mod lebesgue;
pub mod report;
pub mod suite;
pub mod sweep;

use std::sync::Arc;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub use config::ExperimentConfig;
pub use families::{make_family, Family, Member};
pub use identities::identity_suite;
pub use knapp::knapp_slope;
pub use lebesgue::{lebesgue_experiment, run_lebesgue};
pub use report::{Assertion, Report};
pub use suite::run_suite;
pub use sweep::{ratio_sweep, run_sweep, SweepOperator};

use crate::sphere::{SphereFn, SphereRule};

/// Least-squares slope of `ln y` against `ln x`; `None` with fewer than two
/// usable points or a degenerate abscissa.
pub fn fit_loglog_slope(x: &[f64], y: &[f64]) -> Option<f64> {
    let pts: Vec<(f64, f64)> = x
        .iter()
        .zip(y)
        .filter(|(a, b)| **a > 0.0 && **b > 0.0)
        .map(|(a, b)| (a.ln(), b.ln()))
        .collect();
    if pts.len() < 2 {
        return None;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}

pub fn median(values: &[f64]) -> f64 {
    if values.is_empty() {
        return f64::NAN;
    }
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let m = v.len() / 2;
    if v.len() % 2 == 1 {
        v[m]
    } else {
        0.5 * (v[m - 1] + v[m])
    }
}

/// Complex values uniform in the unit square, one per node.
pub fn seeded_sphere_fn(rule: &Arc<SphereRule>, seed: u64) -> SphereFn {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let values = (0..rule.len())
        .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
        .collect();
    SphereFn::new(rule.clone(), values).expect("one value per node")
}

/// Unit-ball volume.
pub fn ball_volume(d: usize) -> f64 {
    match d {
        2 => std::f64::consts::PI,
        _ => 4.0 * std::f64::consts::PI / 3.0,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn slope_of_power_law() {
        let x = [0.25, 0.5, 1.0, 2.0];
        let y: Vec<f64> = x.iter().map(|v: &f64| 3.0 * v.powf(-0.5)).collect();
        assert!((fit_loglog_slope(&x, &y).unwrap() + 0.5).abs() < 1e-12);
        assert_eq!(fit_loglog_slope(&[1.0], &[1.0]), None);
        assert_eq!(fit_loglog_slope(&[1.0, 1.0], &[1.0, 2.0]), None);
    }

    #[test]
    fn median_of_even_and_odd() {
        assert_eq!(median(&[3.0, 1.0, 2.0]), 2.0);
        assert_eq!(median(&[4.0, 1.0, 2.0, 3.0]), 2.5);
        assert!(median(&[]).is_nan());
    }
}
