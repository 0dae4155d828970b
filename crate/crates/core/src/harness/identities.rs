//! Seven two-sided identity checks on seeded inputs.
//!
//! Every check evaluates both sides independently and reports the residual.
//! An error inside a check becomes a failed assertion, never a panic.

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;

use super::config::ExperimentConfig;
use super::families::{gaussian, random_bumps};
use super::report::{Assertion, Relation, Report};
use super::{ball_volume, median, seeded_sphere_fn};
use crate::error::{Error, Result};
use crate::grid::{
    chi_hat, convolve, fourier_transform, reflect_conjugate, Direction, GridFn, GridSpec,
    ScaleLadder,
};
use crate::ops::{
    adjoint_apply, autocorrelation, bilinear_form, domination_ratio, extend_grid,
    fourier_of_adjoint, linearized_apply, maximal_restrict, positive_maximal, KernelSampler,
    ScaleAssignment,
};
use crate::sphere::{SphereFn, SphereRule};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Inputs of the suite: seeded functions, or identically zero ones.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Inputs {
    Seeded,
    Zero,
}

struct Setup {
    spec: GridSpec,
    rule: Arc<SphereRule>,
    ladder: ScaleLadder,
    f: GridFn,
    g: SphereFn,
    inputs: Inputs,
}

/// `|a - b| / scale`, or zero with a degenerate mark when both sides vanish.
fn relative(diff: f64, scale: f64, degenerate: &mut bool) -> f64 {
    if scale == 0.0 {
        *degenerate = true;
        if diff == 0.0 {
            0.0
        } else {
            f64::INFINITY
        }
    } else {
        diff / scale
    }
}

fn max_diff(a: &GridFn, b: &GridFn, c: f64) -> f64 {
    a.values()
        .iter()
        .zip(b.values())
        .map(|(x, y)| (x * c - y).norm())
        .fold(0.0, f64::max)
}

/// Runs all seven checks on seeded inputs.
pub fn identity_suite(cfg: &ExperimentConfig) -> Report {
    identity_suite_with(cfg, Inputs::Seeded)
}

pub fn identity_suite_with(cfg: &ExperimentConfig, inputs: Inputs) -> Report {
    let mut report = Report::new(&cfg.id, "identities", cfg);
    if !cfg.at_acceptance_resolution() {
        report.flag("below-acceptance-resolution");
        report.note("resolution below the acceptance defaults; residuals are reported but not representative");
    }
    let setup = (|| -> Result<Setup> {
        let spec = cfg.grid_spec()?;
        let rule = Arc::new(cfg.rule()?);
        let ladder = cfg.ladder()?;
        let (f, g) = match inputs {
            Inputs::Seeded => (
                random_bumps(spec, 1, cfg.seed).remove(0),
                seeded_sphere_fn(&rule, cfg.seed.wrapping_add(1)),
            ),
            Inputs::Zero => (GridFn::zeros(spec), SphereFn::constant(rule.clone(), ZERO)),
        };
        Ok(Setup {
            spec,
            rule,
            ladder,
            f,
            g,
            inputs,
        })
    })();
    let s = match setup {
        Ok(s) => s,
        Err(e) => {
            report.assert(Assertion::failed("setup", Relation::AtMost, 0.0, &e));
            return report;
        }
    };
    let tol = &cfg.tolerances;
    let mut degenerate = Vec::new();
    let mut record =
        |report: &mut Report, name: &str, tolerance: f64, outcome: Result<f64>, deg: bool| {
            match outcome {
                Ok(v) => {
                    report.row(name, 0.0, "measured", v);
                    report.assert(Assertion::at_most(name, v, tolerance));
                }
                Err(e) => report.assert(Assertion::failed(name, Relation::AtMost, tolerance, &e)),
            }
            if deg {
                degenerate.push(name.to_string());
            }
        };

    let mut deg = false;
    let v = adjoint_pairing(&s, &mut deg);
    record(&mut report, "adjoint pairing", tol.adjoint, v, deg);
    let mut deg = false;
    let v = adjoint_transform(&s, &cfg.identities.adjoint_transform_log2_scales, &mut deg);
    record(
        &mut report,
        "fourier of adjoint",
        tol.adjoint_transform,
        v,
        deg,
    );
    let mut deg = false;
    let v = fubini_chain(&s, cfg, &mut deg).map(|(res, variant)| {
        report.diagnostic("fubini difference-argument residual", variant);
        res
    });
    record(&mut report, "fubini chain", tol.fubini, v, deg);
    let mut deg = false;
    let v = plancherel(&s, cfg, &mut deg);
    record(
        &mut report,
        "plancherel multilinearization",
        tol.plancherel,
        v,
        deg,
    );
    let mut deg = false;
    let v = autocorrelation_check(&s, &mut deg);
    record(&mut report, "autocorrelation", tol.autocorrelation, v, deg);
    domination(&s, cfg, &mut report);
    holder(&s, cfg, &mut report);

    for name in degenerate {
        report.flag("degenerate-input");
        report.note(format!("{name}: both sides vanish; passes vacuously"));
    }
    report
}

fn adjoint_pairing(s: &Setup, deg: &mut bool) -> Result<f64> {
    let picks = s.ladder.len().min(8);
    let a = ScaleAssignment::from_ladder(s.rule.clone(), &s.ladder, |k| k % picks)?;
    let lhs = linearized_apply(&s.f, &a)?.value.inner(&s.g)?;
    let rhs = s.f.inner(&adjoint_apply(&s.g, &a, &s.spec)?)?;
    Ok(relative(
        (lhs - rhs).norm(),
        lhs.norm().max(rhs.norm()),
        deg,
    ))
}

fn adjoint_transform(s: &Setup, log2_scales: &[f64], deg: &mut bool) -> Result<f64> {
    let ladder = ScaleLadder::new(log2_scales.iter().map(|k| k.exp2()).collect())?;
    let a = ScaleAssignment::from_ladder(s.rule.clone(), &ladder, |k| k % ladder.len())?;
    let direct = fourier_of_adjoint(&s.g, &a, &s.spec)?;
    let via_fft = fourier_transform(&adjoint_apply(&s.g, &a, &s.spec)?, Direction::Forward);
    let c = (2.0 * PI).powi(s.spec.d() as i32);
    Ok(relative(
        max_diff(&direct, &via_fft, c),
        via_fft.max_abs(),
        deg,
    ))
}

/// Test kernel on the frequency side: a modulated Gaussian off the origin.
fn test_kernel(kspec: GridSpec, sigma: f64) -> GridFn {
    let d = kspec.d();
    let center = &[0.25, -0.15, 0.35][..d];
    let u = &[0.7, -0.4, 0.2][..d];
    gaussian(kspec, sigma, center)
        .zip_with(
            &GridFn::from_fn(kspec, |x| {
                Complex64::from_polar(1.0, x.iter().zip(u).map(|(a, b)| a * b).sum())
            }),
            |a, b| a * b,
        )
        .expect("same spec")
}

fn kernel_specs(cfg: &ExperimentConfig) -> Result<(GridSpec, GridSpec)> {
    let id = &cfg.identities;
    let kspec = GridSpec::new(cfg.d, id.kernel_half_width, id.kernel_n)?;
    Ok((kspec, kspec.dual()))
}

/// `⟨F ∗ F, h⟩` against `Σ_k Σ_l c_k c_l (h̃ ∗ χ_{ε_k} ∗ χ_{ε_l})(-(ω_k + ω_l))`
/// with `F` the Fourier side of the adjoint and `c = w g`. Also returns the
/// residual of the variant that evaluates the kernel at `ω_l - ω_k`.
fn fubini_chain(s: &Setup, cfg: &ExperimentConfig, deg: &mut bool) -> Result<(f64, f64)> {
    let (kspec, xspec) = kernel_specs(cfg)?;
    let d = kspec.d();
    let scales: Vec<f64> = cfg
        .identities
        .fubini_log2_scales
        .iter()
        .map(|k| k.exp2())
        .collect();
    let ladder = ScaleLadder::new(scales)?;
    let a = ScaleAssignment::from_ladder(s.rule.clone(), &ladder, |k| k % ladder.len())?;
    let h = test_kernel(kspec, cfg.identities.kernel_sigma);

    let lhs = {
        let big_f = fourier_of_adjoint(&s.g, &a, &xspec)?;
        if *big_f.spec() != kspec {
            return Err(Error::SpecMismatch(
                "adjoint transform missed the kernel grid".into(),
            ));
        }
        convolve(&big_f, &big_f)?.inner(&h)?
    };

    let h_tilde_hat = fourier_transform(&reflect_conjugate(&h), Direction::Forward);
    let rule = &s.rule;
    let coeffs: Vec<Complex64> =
        s.g.values()
            .iter()
            .zip(rule.weights())
            .map(|(v, w)| v * w)
            .collect();
    let eps = a.scales();
    let distinct = ladder.scales();
    let (mut rhs, mut diff_form) = (ZERO, ZERO);
    for (i, &e1) in distinct.iter().enumerate() {
        for &e2 in &distinct[i..] {
            // χ_ε has transform χ̂(εx); the double convolution multiplies both.
            let mut prod = h_tilde_hat.values().to_vec();
            for (j, v) in prod.iter_mut().enumerate() {
                let x = xspec.point(j);
                let r2: f64 = x[..d].iter().map(|c| c * c).sum();
                *v *= chi_hat(e1 * e1 * r2) * chi_hat(e2 * e2 * r2);
            }
            let kernel = fourier_transform(&GridFn::new(xspec, prod)?, Direction::Inverse);
            let sampler = KernelSampler::new(&kernel, 2.0)?;
            for k in 0..rule.len() {
                for l in 0..rule.len() {
                    let pair = (eps[k], eps[l]);
                    if pair != (e1, e2) && pair != (e2, e1) {
                        continue;
                    }
                    let c = coeffs[k] * coeffs[l];
                    if c == ZERO {
                        continue;
                    }
                    let (wk, wl) = (rule.node(k), rule.node(l));
                    let mut sum = [0.0; 3];
                    let mut dif = [0.0; 3];
                    for t in 0..d {
                        sum[t] = -(wk[t] + wl[t]);
                        dif[t] = wl[t] - wk[t];
                    }
                    rhs += c * sampler.at(&sum[..d]);
                    diff_form += c * sampler.at(&dif[..d]);
                }
            }
        }
    }
    let scale = lhs.norm().max(rhs.norm());
    let res = relative((lhs - rhs).norm(), scale, deg);
    let mut ignore = false;
    let variant = relative((lhs - diff_form).norm(), scale, &mut ignore);
    Ok((res, variant))
}

/// `∫ |ĝdσ|² conj(ĥ) dx = (2π)^d Σ_k Σ_l w_k w_l conj(g_k) g_l conj(h)(ω_l - ω_k)`.
fn plancherel(s: &Setup, cfg: &ExperimentConfig, deg: &mut bool) -> Result<f64> {
    let (kspec, xspec) = kernel_specs(cfg)?;
    let h = test_kernel(kspec, cfg.identities.kernel_sigma);
    let h_hat = fourier_transform(&h, Direction::Forward);
    let ext = extend_grid(&s.g, &xspec)?;
    let lhs: Complex64 = ext
        .values()
        .iter()
        .zip(h_hat.values())
        .map(|(e, hh)| hh.conj() * e.norm_sqr())
        .sum::<Complex64>()
        * xspec.cell_volume();
    let conj_g = s.g.map(|v| v.conj());
    let rhs =
        bilinear_form(&conj_g, &s.g, &h.map(|v| v.conj()))? * (2.0 * PI).powi(kspec.d() as i32);
    Ok(relative(
        (lhs - rhs).norm(),
        lhs.norm().max(rhs.norm()),
        deg,
    ))
}

fn autocorrelation_check(s: &Setup, deg: &mut bool) -> Result<f64> {
    let h_hat = fourier_transform(&autocorrelation(&s.f)?, Direction::Forward);
    let f_hat = fourier_transform(&s.f, Direction::Forward);
    let diff = h_hat
        .values()
        .iter()
        .zip(f_hat.values())
        .map(|(a, b)| (a - b.norm_sqr()).norm())
        .fold(0.0, f64::max);
    Ok(relative(diff, f_hat.max_abs().powi(2), deg))
}

fn scale_pairs(spec: &GridSpec, step: f64) -> Result<Vec<(f64, f64)>> {
    let s = ScaleLadder::dyadic(2.2 * spec.spacing(), 0.9 * spec.half_width() / 2.6, step)?;
    let sc = s.scales();
    Ok((0..sc.len())
        .flat_map(|i| (i..sc.len()).map(move |j| (sc[i], sc[j])))
        .collect())
}

/// `|h̃ ∗ χ_ε ∗ χ_ε'| <= C M²h̃` with `h = f ∗ f̃`: bound and stability of `C`.
fn domination(s: &Setup, cfg: &ExperimentConfig, report: &mut Report) {
    let tol = &cfg.tolerances;
    let id = &cfg.identities;
    let outcome = (|| -> Result<(f64, f64)> {
        // `f ∗ f̃` spreads twice as far as `f`, so it gets a wider box.
        let spec = GridSpec::new(s.spec.d(), id.domination_half_width, s.spec.n())?;
        let f = match s.inputs {
            Inputs::Seeded => random_bumps(spec, 1, cfg.seed).remove(0),
            Inputs::Zero => GridFn::zeros(spec),
        };
        let h = autocorrelation(&f)?;
        let radii = ScaleLadder::dyadic(spec.spacing(), 0.5 * spec.half_width(), cfg.ladder.step)?;
        let coarse = domination_ratio(&h, &scale_pairs(&spec, id.domination_step)?, &radii)?;
        let dense = domination_ratio(&h, &scale_pairs(&spec, id.domination_dense_step)?, &radii)?;
        for p in &coarse.pairs {
            report.row(
                "domination",
                p.eps,
                &format!("ratio_with_{:.4}", p.eps2),
                p.ratio,
            );
        }
        Ok((
            coarse.max_ratio,
            (coarse.max_ratio - dense.max_ratio).abs() / dense.max_ratio,
        ))
    })();
    match outcome {
        Ok((max_ratio, change)) => {
            report.row("domination", 0.0, "max_ratio", max_ratio);
            report.assert(Assertion::at_most(
                "domination constant",
                max_ratio,
                tol.domination_max,
            ));
            report.assert(Assertion::at_most(
                "domination stability",
                change,
                tol.domination_stability,
            ));
        }
        Err(e) => {
            report.assert(Assertion::failed(
                "domination constant",
                Relation::AtMost,
                tol.domination_max,
                &e,
            ));
            report.assert(Assertion::failed(
                "domination stability",
                Relation::AtMost,
                tol.domination_stability,
                &e,
            ));
        }
    }
}

/// `𝓜⁺f <= C (𝓜h)^{1/2}` pointwise on the rule, for seeded `f` and
/// `h = f ∗ f̃`. `C` must stay below `(v_d e^π)^{1/2}` and be stable.
fn holder(s: &Setup, cfg: &ExperimentConfig, report: &mut Report) {
    let tol = &cfg.tolerances;
    let bound = (ball_volume(s.spec.d()) * PI.exp()).sqrt();
    let outcome = (|| -> Result<Vec<f64>> {
        let ladder =
            ScaleLadder::dyadic(s.spec.dual().spacing(), cfg.identities.holder_eps_max, 0.5)?;
        let fs = match s.inputs {
            Inputs::Seeded => random_bumps(
                s.spec,
                cfg.identities.holder_functions,
                cfg.seed.wrapping_add(7),
            ),
            Inputs::Zero => vec![GridFn::zeros(s.spec)],
        };
        let mut constants = Vec::with_capacity(fs.len());
        for (i, f) in fs.iter().enumerate() {
            let mp = positive_maximal(f, &s.rule, &ladder)?.value;
            let mh = maximal_restrict(&autocorrelation(f)?, &s.rule, &ladder)?.values;
            let c = mp
                .values()
                .iter()
                .zip(mh.values())
                .filter(|(a, _)| a.re > 0.0)
                .map(|(a, b)| a.re / b.re.sqrt())
                .fold(0.0, f64::max);
            report.row("holder", i as f64, "constant", c);
            constants.push(c);
        }
        Ok(constants)
    })();
    match outcome {
        Ok(cs) => {
            let med = median(&cs);
            let worst = cs.iter().copied().fold(0.0, f64::max);
            let spread = if med > 0.0 {
                cs.iter().map(|c| (c / med - 1.0).abs()).fold(0.0, f64::max)
            } else {
                0.0
            };
            report.diagnostic("holder constant median", med);
            report.assert(Assertion::at_most("holder bound", worst, bound));
            report.assert(Assertion::at_most(
                "holder constant spread",
                spread,
                tol.holder_spread,
            ));
        }
        Err(e) => {
            report.assert(Assertion::failed(
                "holder bound",
                Relation::AtMost,
                bound,
                &e,
            ));
            report.assert(Assertion::failed(
                "holder constant spread",
                Relation::AtMost,
                tol.holder_spread,
                &e,
            ));
        }
    }
}
