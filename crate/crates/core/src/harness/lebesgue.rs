//! Lebesgue-point probe for `f̂` on the sphere: decay of ball oscillations
//! `ε^{-d} Σ_{|ξ_j - ω| <= ε} |f̂(ξ_j) - 𝓡f(ω)| Δξ^d` and convergence of the
//! ball averages to `𝓡f(ω)` at sampled nodes.

use std::sync::Arc;

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::config::ExperimentConfig;
use super::families::{gaussian, modulated};
use super::fit_loglog_slope;
use super::report::{Assertion, Relation, Report};
use crate::error::Result;
use crate::grid::{fourier_transform, Direction, GridFn, GridSpec, ScaleLadder};
use crate::ops::{check_dual_ladder, for_each_in_ball, restrict};
use crate::sphere::SphereRule;

#[derive(Clone, Debug, PartialEq)]
pub struct LebesgueOutcome {
    /// Ladder scales, decreasing.
    pub scales: Vec<f64>,
    /// Max over nodes of the oscillation, per scale.
    pub oscillation: Vec<f64>,
    /// Fitted exponent of oscillation against ε; `None` when it vanishes.
    pub slope: Option<f64>,
    /// Max over nodes of `|avg_ε - 𝓡f(ω)| / |𝓡f(ω)|` at the smallest scale.
    pub limit_error: f64,
    /// The same after Richardson extrapolation in `ε²` from the two smallest scales.
    pub extrapolated_error: f64,
}

/// Oscillation and ball averages of `f̂` around every node of `rule`.
pub fn lebesgue_experiment(
    f: &GridFn,
    rule: &Arc<SphereRule>,
    ladder: &ScaleLadder,
) -> Result<LebesgueOutcome> {
    let spec = f.spec();
    check_dual_ladder(spec, ladder)?;
    let d = spec.d() as i32;
    let fhat = fourier_transform(f, Direction::Forward);
    let on_sphere = restrict(f, rule)?.value;
    let dual = fhat.spec();
    let vol = dual.cell_volume();
    let scales = ladder.scales().to_vec();
    let m = scales.len();
    let mut oscillation = vec![0.0f64; m];
    let (mut limit_error, mut extrapolated_error) = (0.0f64, 0.0f64);
    for k in 0..rule.len() {
        let center = on_sphere.values()[k];
        let mut abs_dev = vec![0.0; m];
        let mut sums = vec![Complex64::new(0.0, 0.0); m];
        let mut counts = vec![0usize; m];
        for_each_in_ball(dual, rule.node(k), scales[0], |flat, r2| {
            let v = fhat.values()[flat];
            let dev = (v - center).norm();
            for (s, &e) in scales.iter().enumerate() {
                if r2 > e * e * (1.0 + 1e-12) {
                    break;
                }
                abs_dev[s] += dev;
                sums[s] += v;
                counts[s] += 1;
            }
        });
        for s in 0..m {
            oscillation[s] = oscillation[s].max(abs_dev[s] * vol / scales[s].powi(d));
        }
        let avg = |s: usize| sums[s] / counts[s].max(1) as f64;
        let scale = center.norm();
        if scale > 0.0 {
            let (e0, a0) = (scales[m - 1], avg(m - 1));
            limit_error = limit_error.max((a0 - center).norm() / scale);
            if m >= 2 {
                let (e1, a1) = (scales[m - 2], avg(m - 2));
                let rich = (a0 * e1 * e1 - a1 * e0 * e0) / (e1 * e1 - e0 * e0);
                extrapolated_error = extrapolated_error.max((rich - center).norm() / scale);
            }
        }
    }
    let slope = if oscillation.iter().all(|&o| o == 0.0) {
        None
    } else {
        fit_loglog_slope(&scales, &oscillation)
    };
    Ok(LebesgueOutcome {
        scales,
        oscillation,
        slope,
        limit_error,
        extrapolated_error,
    })
}

/// The `count` seeded nodes of `rule` probed by the experiment.
pub fn sample_nodes(rule: &SphereRule, count: usize, seed: u64) -> Result<SphereRule> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut picked =
        rand::seq::index::sample(&mut rng, rule.len(), count.min(rule.len())).into_vec();
    picked.sort_unstable();
    rule.select(&picked)
}

/// Gaussian and modulated Gaussian inputs on the configured Lebesgue grid.
pub fn run_lebesgue(cfg: &ExperimentConfig) -> Report {
    let mut report = Report::new(&cfg.id, "lebesgue", cfg);
    let lc = &cfg.lebesgue;
    let setup = (|| -> Result<(GridSpec, Arc<SphereRule>, ScaleLadder)> {
        let spec = GridSpec::new(cfg.d, lc.half_width, lc.n)?;
        let rule = Arc::new(sample_nodes(&cfg.rule()?, lc.nodes, cfg.seed)?);
        let ladder = ScaleLadder::dyadic(
            lc.eps_min_cells * spec.dual().spacing(),
            lc.eps_max,
            lc.step,
        )?;
        Ok((spec, rule, ladder))
    })();
    let (spec, rule, ladder) = match setup {
        Ok(s) => s,
        Err(e) => {
            report.assert(Assertion::failed(
                "setup",
                Relation::AtLeast,
                cfg.tolerances.lebesgue_slope,
                &e,
            ));
            return report;
        }
    };
    let origin = vec![0.0; cfg.d];
    let inputs = [
        ("gaussian", gaussian(spec, lc.sigma, &origin)),
        ("modulated", modulated(spec, lc.sigma, &lc.modulation)),
    ];
    for (name, f) in &inputs {
        record(
            &mut report,
            cfg,
            name,
            lebesgue_experiment(f, &rule, &ladder),
        );
    }
    report
}

/// Adds the rows and assertions of one input to `report`.
pub fn record(
    report: &mut Report,
    cfg: &ExperimentConfig,
    name: &str,
    outcome: Result<LebesgueOutcome>,
) {
    let tol = &cfg.tolerances;
    match outcome {
        Ok(o) => {
            for (e, osc) in o.scales.iter().zip(&o.oscillation) {
                report.row(name, *e, "oscillation", *osc);
            }
            report.diagnostic(
                &format!("{name} extrapolated limit error"),
                o.extrapolated_error,
            );
            match o.slope {
                Some(s) => {
                    report.row(name, 0.0, "decay_slope", s);
                    report.assert(Assertion::at_least(format!("{name} oscillation decay"), s, tol.lebesgue_slope));
                }
                None => report.note(format!("{name}: oscillation vanishes identically; every sampled node is a Lebesgue point")),
            }
            report.row(name, 0.0, "limit_error", o.limit_error);
            report.assert(Assertion::at_most(
                format!("{name} ball-average limit"),
                o.limit_error,
                tol.lebesgue_limit,
            ));
        }
        Err(e) => report.assert(Assertion::failed(
            format!("{name} oscillation decay"),
            Relation::AtLeast,
            tol.lebesgue_slope,
            &e,
        )),
    }
}
