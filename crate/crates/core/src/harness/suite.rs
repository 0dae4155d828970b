//! Exact and closed-form checks, and the full acceptance run.

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use serde::Serialize;

use super::config::ExperimentConfig;
use super::families::{gaussian, make_family, random_bumps, Family};
use super::identities::identity_suite;
use super::knapp::knapp_slope;
use super::lebesgue::run_lebesgue;
use super::report::{Assertion, Relation, Report};
use super::sweep::{ratio_sweep, SweepOperator};
use crate::error::Result;
use crate::exponents::{
    conjugate, endpoint_q, in_maximal_range, in_stein_tomas_range, inverted_endpoint_q,
    young_chain, RangeVerdict, Rational, YoungChain,
};
use crate::grid::{fourier_transform, lp_norm, Direction, GridSpec};
use crate::ops::{extend, restrict, Targets};
use crate::special::{circle_measure_transform, sphere_measure_transform};
use crate::sphere::{circle_rule, circular_harmonic, integrate, spherical_harmonic, SphereFn};

/// Verdicts for one `(d, p, q)`, as printed by the `exponents` command.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExponentSummary {
    pub d: u32,
    pub p: Rational,
    pub q: Rational,
    pub p_conjugate: Rational,
    pub maximal_range: RangeVerdict,
    pub stein_tomas_range: RangeVerdict,
    pub endpoint_q: Rational,
    /// The reciprocal-looking alternative `4(d+1)/(d-1)`; not used anywhere.
    pub inverted_endpoint_q_not_adopted: Rational,
    pub young_chain: Option<YoungChain>,
}

pub fn exponent_summary(d: u32, p: Rational, q: Rational) -> Result<ExponentSummary> {
    Ok(ExponentSummary {
        d,
        p,
        q,
        p_conjugate: conjugate(p)?,
        maximal_range: in_maximal_range(d, p, q)?,
        stein_tomas_range: in_stein_tomas_range(d, p, q)?,
        endpoint_q: endpoint_q(d)?,
        inverted_endpoint_q_not_adopted: inverted_endpoint_q(d)?,
        young_chain: young_chain(p).ok(),
    })
}

/// Exponent lattice used to compare the two ranges.
fn lattice() -> Vec<(Rational, Rational)> {
    let ps = (12..=24).map(|k| Rational::new(k, 12));
    ps.flat_map(|p| (4..=24).map(move |k| (p, Rational::new(k, 4))))
        .collect()
}

/// Whether the maximal range and the Stein–Tomas range agree on the lattice.
pub fn ranges_agree(d: u32) -> Result<bool> {
    for (p, q) in lattice() {
        if in_maximal_range(d, p, q)?.in_range != in_stein_tomas_range(d, p, q)?.in_range {
            return Ok(false);
        }
    }
    Ok(true)
}

fn exact(report: &mut Report, name: &str, ok: bool) {
    report.assert(Assertion::at_most(name, if ok { 0.0 } else { 1.0 }, 0.0));
}

/// Exact exponent identities; every assertion has zero tolerance.
pub fn exponent_report(cfg: &ExperimentConfig) -> Report {
    let mut report = Report::new(&cfg.id, "exponents", cfg);
    let outcome = (|| -> Result<()> {
        let (p, q) = (Rational::new(4, 3), Rational::integer(2));
        exact(
            &mut report,
            "conjugate(4/3) = 4",
            conjugate(p)? == Rational::integer(4),
        );
        let v = in_maximal_range(3, p, q)?;
        exact(
            &mut report,
            "endpoint (4/3, 2) in range with zero slacks",
            v.in_range && v.binding_constraints.iter().all(|c| c.slack.is_zero()),
        );
        exact(&mut report, "endpoint_q(3) = 2", endpoint_q(3)? == q);
        for d in 2..=5 {
            let agree = ranges_agree(d)?;
            report.row(
                "ranges_agree",
                d as f64,
                "agree",
                if agree { 1.0 } else { 0.0 },
            );
            exact(
                &mut report,
                &format!("ranges agree iff d = 3 (d = {d})"),
                agree == (d == 3),
            );
        }
        let c = young_chain(Rational::new(8, 7))?;
        exact(
            &mut report,
            "young_chain(8/7) = (4/3, 4, 8)",
            (c.s, c.s_conj, c.p_conj)
                == (
                    Rational::new(4, 3),
                    Rational::integer(4),
                    Rational::integer(8),
                ),
        );
        exact(
            &mut report,
            "young_chain rejects p > 8/7",
            young_chain(Rational::new(7, 6)).is_err(),
        );
        Ok(())
    })();
    if let Err(e) = outcome {
        report.assert(Assertion::failed(
            "exponent algebra",
            Relation::AtMost,
            0.0,
            &e,
        ));
    }
    report
}

/// Closed-form values of restriction and extension.
pub fn closed_form_report(cfg: &ExperimentConfig) -> Report {
    let mut report = Report::new(&cfg.id, "extension", cfg);
    let tol = &cfg.tolerances;
    let outcome = (|| -> Result<()> {
        // Restriction of e^{-|x|²/2} in d = 3: (2π)^{3/2} e^{-1/2} on the sphere.
        let spec = GridSpec::new(3, cfg.grid.half_width, cfg.grid.n)?;
        let rule3 = Arc::new(
            ExperimentConfig {
                d: 3,
                ..cfg.clone()
            }
            .rule()?,
        );
        let exact3 = (2.0 * PI).powf(1.5) * (-0.5f64).exp();
        let r = restrict(&gaussian(spec, 1.0, &[0.0; 3]), &rule3)?.value;
        let dev = r
            .values()
            .iter()
            .map(|v| (v - exact3).norm() / exact3)
            .fold(0.0, f64::max);
        report.row("restrict_gaussian", 0.0, "relative_error", dev);
        report.assert(Assertion::at_most(
            "restricted Gaussian constant",
            dev,
            tol.restrict_closed_form,
        ));

        // Extension of 1 on S²: 4π sin|x|/|x|, sampled along three rays.
        let one = SphereFn::constant(rule3.clone(), Complex64::new(1.0, 0.0));
        let dirs = [[1.0, 0.0, 0.0], [0.0, 0.6, 0.8], [0.48, -0.6, 0.64]];
        let mut pts = Vec::new();
        for dir in &dirs {
            for i in 0..=100 {
                let t = 0.1 * i as f64;
                pts.push([t * dir[0], t * dir[1], t * dir[2]]);
            }
        }
        let vals = extend(&one, &Targets::Points(&pts))?;
        let err = pts
            .iter()
            .zip(&vals)
            .map(|(x, v)| {
                let r = (x[0] * x[0] + x[1] * x[1] + x[2] * x[2]).sqrt();
                (v - sphere_measure_transform(r)).norm()
            })
            .fold(0.0, f64::max);
        report.row("extend_one_d3", 0.0, "max_abs_error", err);
        report.assert(Assertion::at_most(
            "extension of 1, d = 3",
            err,
            tol.extension_closed_form,
        ));

        // d = 2: 2π J0(|x|) vanishes at the first Bessel zero.
        let circle = Arc::new(circle_rule(cfg.rule.circle_nodes)?);
        let one2 = SphereFn::constant(circle, Complex64::new(1.0, 0.0));
        let z = 2.404_825_557_695_773;
        let at_zero = extend(&one2, &Targets::Points(&[[z * 0.6, z * 0.8, 0.0]]))?[0].norm();
        report.row("extend_one_d2", z, "abs_value", at_zero);
        report.row(
            "extend_one_d2",
            1.0,
            "abs_error",
            (extend(&one2, &Targets::Points(&[[1.0, 0.0, 0.0]]))?[0]
                - circle_measure_transform(1.0))
            .norm(),
        );
        report.assert(Assertion::at_most(
            "extension of 1 at the first Bessel zero, d = 2",
            at_zero,
            tol.bessel_zero,
        ));
        Ok(())
    })();
    if let Err(e) = outcome {
        report.assert(Assertion::failed("closed forms", Relation::AtMost, 0.0, &e));
    }
    report
}

/// Quadrature exactness, the transform's Plancherel constant and
/// determinism of seeded generation and report serialization.
pub fn infrastructure_report(cfg: &ExperimentConfig) -> Report {
    let mut report = Report::new(&cfg.id, "infrastructure", cfg);
    let tol = &cfg.tolerances;
    let outcome = (|| -> Result<()> {
        let rule = ExperimentConfig {
            d: 3,
            ..cfg.clone()
        }
        .rule()?;
        let rule = Arc::new(rule);
        let mut worst = 0.0f64;
        for l in 1..=15usize {
            for m in -(l as i64)..=(l as i64) {
                let y = SphereFn::from_fn(rule.clone(), |w| {
                    Complex64::new(spherical_harmonic(l, m, w), 0.0)
                });
                worst = worst.max(integrate(&y).norm());
            }
        }
        report.row("quadrature", 3.0, "max_harmonic_integral", worst);
        report.assert(Assertion::at_most(
            "harmonics of degree 1..15 integrate to zero, d = 3",
            worst,
            tol.quadrature,
        ));
        let circle = Arc::new(circle_rule(cfg.rule.circle_nodes)?);
        let mut worst2 = 0.0f64;
        for l in 1..=15usize {
            for m in [-1i64, 1] {
                let y = SphereFn::from_fn(circle.clone(), |w| {
                    Complex64::new(circular_harmonic(l, m, w), 0.0)
                });
                worst2 = worst2.max(integrate(&y).norm());
            }
        }
        report.row("quadrature", 2.0, "max_harmonic_integral", worst2);
        report.assert(Assertion::at_most(
            "harmonics of degree 1..15 integrate to zero, d = 2",
            worst2,
            tol.quadrature,
        ));

        let spec = cfg.grid_spec()?;
        let f = random_bumps(spec, 1, cfg.seed).remove(0);
        let two = Rational::integer(2);
        let lhs = lp_norm(&f, two)?.powi(2) * (2.0 * PI).powi(spec.d() as i32);
        let rhs = lp_norm(&fourier_transform(&f, Direction::Forward), two)?.powi(2);
        let rel = (lhs - rhs).abs() / rhs;
        report.row("plancherel", spec.d() as f64, "relative_error", rel);
        report.assert(Assertion::at_most(
            "plancherel constant (2π)^d",
            rel,
            tol.plancherel_constant,
        ));

        let same_family = random_bumps(spec, 2, cfg.seed) == random_bumps(spec, 2, cfg.seed);
        let same_report = exponent_report(cfg).to_json() == exponent_report(cfg).to_json();
        exact(&mut report, "seeded family is reproducible", same_family);
        exact(&mut report, "report bytes are reproducible", same_report);
        Ok(())
    })();
    if let Err(e) = outcome {
        report.assert(Assertion::failed(
            "infrastructure",
            Relation::AtMost,
            0.0,
            &e,
        ));
    }
    report
}

/// Gaussian dilation sweep of `𝓜` at the configured exponents, plus the
/// same family at an out-of-range `q` (exploratory, never asserted).
pub fn sweep_reports(cfg: &ExperimentConfig) -> Vec<Report> {
    let gauss_cfg = ExperimentConfig {
        family: super::config::FamilyConfig {
            name: "gaussian".into(),
            ..cfg.family.clone()
        },
        ..cfg.clone()
    };
    let members = match make_family(&gauss_cfg) {
        Ok(Family::Grid(m)) => m,
        Ok(Family::Sphere(_)) => unreachable!("gaussian family lives on the grid"),
        Err(e) => {
            let mut r = Report::new(&cfg.id, "sweep", cfg);
            r.assert(Assertion::failed("family", Relation::AtMost, 0.0, &e));
            return vec![r];
        }
    };
    let main = ratio_sweep(
        &gauss_cfg,
        SweepOperator::Maximal,
        &members,
        cfg.exponents.p,
        cfg.exponents.q,
    );
    let mut beyond = ratio_sweep(
        &gauss_cfg,
        SweepOperator::Maximal,
        &members,
        cfg.exponents.p,
        Rational::integer(3),
    );
    beyond.experiment = "sweep-exploratory".into();
    vec![main, beyond]
}

/// Everything, in a fixed order. The acceptance run is this on the default config.
pub fn run_suite(cfg: &ExperimentConfig) -> Vec<Report> {
    let mut reports = vec![
        exponent_report(cfg),
        closed_form_report(cfg),
        identity_suite(cfg),
    ];
    reports.extend(sweep_reports(cfg));
    reports.push(knapp_slope(cfg));
    reports.push(run_lebesgue(cfg));
    reports.push(infrastructure_report(cfg));
    reports
}

/// 0 when every report passed, 1 otherwise.
pub fn suite_exit_code(reports: &[Report]) -> i32 {
    if reports.iter().all(|r| r.passed) {
        0
    } else {
        1
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exponent_report_passes() {
        let r = exponent_report(&ExperimentConfig::default());
        assert!(r.passed, "{:#?}", r.assertions);
    }

    #[test]
    fn summary_of_endpoint() {
        let s = exponent_summary(3, Rational::new(4, 3), Rational::integer(2)).unwrap();
        assert!(s.maximal_range.in_range);
        assert!(s
            .maximal_range
            .binding_constraints
            .iter()
            .all(|c| c.slack.is_zero()));
        assert_eq!(s.p_conjugate, Rational::integer(4));
        assert_eq!(s.inverted_endpoint_q_not_adopted, Rational::integer(8));
    }
}
