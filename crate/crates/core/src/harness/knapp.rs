//! Knapp scaling: `Q(δ) = ‖ĝ_δ dσ‖_{L⁴} / ‖g_δ‖_{L^{q'}(dσ)}` for cap
//! indicators `g_δ`, with the fitted exponent of `Q ∝ δ^e` compared against
//! `(3d-5)/4 - (d-1)/q'`.
//!
//! The extension of a polar cap is axially symmetric and concentrates on
//! the slab `|x'| <~ 1/δ`, `|x_d| <~ 1/δ²`, so the L⁴ norm is integrated on
//! a cylinder in the rescaled variables `(r', z') = (δ r, δ² z)`.

use std::f64::consts::PI;

use super::config::{ExperimentConfig, KnappConfig};
use super::families::knapp_cap;
use super::fit_loglog_slope;
use super::report::{Assertion, Relation, Report};
use crate::error::{Error, Result};
use crate::exponents::{conjugate, Rational};
use crate::ops::{extend, Targets};
use crate::sphere::{lq_norm_sigma, SphereFn};

/// `‖ĝdσ‖_{L⁴(ℝ³)}` of an axially symmetric `g` by midpoint quadrature on
/// the rescaled cylinder, and the truncation tail estimate: nine times the
/// share of `|ĝdσ|⁴` in the outer tenth of the cylinder.
pub fn cylinder_l4(g: &SphereFn, delta: f64, kc: &KnappConfig) -> Result<(f64, f64)> {
    if g.rule().d() != 3 {
        return Err(Error::Shape("cylinder quadrature is for d = 3".into()));
    }
    let nr = (kc.extent / kc.dr).round() as usize;
    let nz = (2.0 * kc.extent / kc.dz).round() as usize;
    let r_scaled: Vec<f64> = (0..nr).map(|i| (i as f64 + 0.5) * kc.dr).collect();
    let z_scaled: Vec<f64> = (0..nz)
        .map(|j| -kc.extent + (j as f64 + 0.5) * kc.dz)
        .collect();
    let axes = vec![
        r_scaled.iter().map(|r| r / delta).collect::<Vec<_>>(),
        vec![0.0],
        z_scaled.iter().map(|z| z / (delta * delta)).collect(),
    ];
    let values = extend(g, &Targets::Tensor(&axes))?;
    let cell = (kc.dr / delta) * (kc.dz / (delta * delta));
    let edge = 0.9 * kc.extent;
    let (mut total, mut outer) = (0.0, 0.0);
    for (i, row) in values.chunks_exact(nz).enumerate() {
        let shell = 2.0 * PI * axes[0][i] * cell;
        for (j, v) in row.iter().enumerate() {
            let m = v.norm_sqr().powi(2) * shell;
            total += m;
            if r_scaled[i] > edge || z_scaled[j].abs() > edge {
                outer += m;
            }
        }
    }
    if total == 0.0 {
        return Err(Error::Degenerate(
            "extension vanishes on the cylinder".into(),
        ));
    }
    Ok((total.powf(0.25), 9.0 * outer / total))
}

/// `(3d-5)/4 - (d-1)/q'`.
pub fn analytic_exponent(d: usize, q: Rational) -> Result<f64> {
    let q_conj = conjugate(q)?;
    Ok((3.0 * d as f64 - 5.0) / 4.0 - (d as f64 - 1.0) / q_conj.to_f64())
}

/// Fits the Knapp exponent for every configured `q`.
pub fn knapp_slope(cfg: &ExperimentConfig) -> Report {
    let mut report = Report::new(&cfg.id, "knapp", cfg);
    match knapp_rows(cfg, &mut report) {
        Ok(()) => {}
        Err(e) => report.assert(Assertion::failed("knapp setup", Relation::AtMost, 0.0, &e)),
    }
    report
}

fn knapp_rows(cfg: &ExperimentConfig, report: &mut Report) -> Result<()> {
    let kc = &cfg.knapp;
    if cfg.d != 3 {
        return Err(Error::Shape(format!(
            "the L⁴ extension norm of a cap is infinite for d = {}; the experiment needs d = 3",
            cfg.d
        )));
    }
    if kc.log2_deltas.len() < 3 {
        return Err(Error::Degenerate(format!(
            "{} cap sizes; the fit needs at least 3",
            kc.log2_deltas.len()
        )));
    }
    let deltas: Vec<f64> = kc.log2_deltas.iter().map(|k| k.exp2()).collect();
    let mut l4 = Vec::with_capacity(deltas.len());
    let mut caps = Vec::with_capacity(deltas.len());
    let mut worst_tail = 0.0f64;
    for &delta in &deltas {
        // Node spacing on the cap must resolve the cap itself.
        let spacing = (delta / kc.n_cap as f64).max(2.0 * PI * delta.sin() / kc.n_phi as f64);
        if spacing > delta / 8.0 {
            return Err(Error::InvalidRule(format!(
                "cap rule spacing {spacing:.3e} exceeds δ/8 at δ = {delta}"
            )));
        }
        let cap = knapp_cap(3, delta, kc.n_cap, kc.n_phi)?;
        let (norm, tail) = cylinder_l4(&cap, delta, kc)?;
        report.row("extension", delta, "l4_norm", norm);
        report.row("extension", delta, "tail_estimate", tail);
        worst_tail = worst_tail.max(tail);
        l4.push(norm);
        caps.push(cap);
    }
    report.diagnostic("tail_estimate_max", worst_tail);
    report.assert(Assertion::at_most(
        "truncation tail",
        worst_tail,
        cfg.tolerances.knapp_tail,
    ));

    for &q in &kc.q_values {
        let series = format!("q={q}");
        let q_conj = conjugate(q)?;
        let mut quotients = Vec::with_capacity(deltas.len());
        for ((&delta, norm), cap) in deltas.iter().zip(&l4).zip(&caps) {
            let quotient = norm / lq_norm_sigma(cap, q_conj)?;
            report.row(&series, delta, "quotient", quotient);
            quotients.push(quotient);
        }
        let target = analytic_exponent(3, q)?;
        let slope = fit_loglog_slope(&deltas, &quotients)
            .ok_or_else(|| Error::Degenerate("Knapp quotients admit no fit".into()))?;
        report.row(&series, 0.0, "fitted_exponent", slope);
        report.row(&series, 0.0, "analytic_exponent", target);
        report.assert(Assertion::at_most(
            format!("exponent error {series}"),
            (slope - target).abs(),
            cfg.tolerances.knapp_slope,
        ));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn analytic_values() {
        assert_eq!(analytic_exponent(3, Rational::integer(2)).unwrap(), 0.0);
        assert_eq!(analytic_exponent(3, Rational::integer(4)).unwrap(), -0.5);
        assert_eq!(analytic_exponent(3, Rational::integer(1)).unwrap(), 1.0);
    }

    #[test]
    fn too_few_deltas_fail_the_report() {
        let mut cfg = ExperimentConfig::default();
        cfg.knapp.log2_deltas = vec![-2.0, -3.0];
        let r = knapp_slope(&cfg);
        assert!(!r.passed);
        assert!(r.assertions[0]
            .error
            .as_deref()
            .unwrap()
            .contains("at least 3"));
    }

    #[test]
    fn cylinder_norm_matches_bessel_quadrature() {
        // On the axis-symmetric slice the cap extension is
        // 2π ∫_{cos δ}^1 J0(r √(1-t²)) e^{-i z t} dt.
        use crate::special::bessel_j0;
        use crate::sphere::gauss_legendre_on;
        use num_complex::Complex64;
        let delta = 0.5;
        // r' <= 8 keeps the J0 argument inside the range of its power series.
        let kc = KnappConfig {
            n_cap: 64,
            n_phi: 192,
            extent: 8.0,
            dr: 0.25,
            dz: 1.0,
            ..KnappConfig::default()
        };
        let cap = knapp_cap(3, delta, kc.n_cap, kc.n_phi).unwrap();
        let (norm, _) = cylinder_l4(&cap, delta, &kc).unwrap();
        let (t, w) = gauss_legendre_on(64, delta.cos(), 1.0);
        let cell = (kc.dr / delta) * (kc.dz / (delta * delta));
        let mut total = 0.0;
        for i in 0..32 {
            let r = (i as f64 + 0.5) * kc.dr / delta;
            for j in 0..16 {
                let z = (-kc.extent + (j as f64 + 0.5) * kc.dz) / (delta * delta);
                let e: Complex64 = t
                    .iter()
                    .zip(&w)
                    .map(|(&ti, &wi)| {
                        Complex64::from_polar(
                            2.0 * PI * wi * bessel_j0(r * (1.0 - ti * ti).sqrt()),
                            -z * ti,
                        )
                    })
                    .sum();
                total += e.norm_sqr().powi(2) * 2.0 * PI * r * cell;
            }
        }
        let oracle = total.powf(0.25);
        assert!((norm - oracle).abs() / oracle < 1e-8, "{norm} vs {oracle}");
    }
}
