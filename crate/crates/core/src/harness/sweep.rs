//! Ratio sweeps `‖T f‖_{L^q(dσ)} / ‖f‖_{L^p}` over a family.
//!
//! A finite family only bounds the operator norm from below, so the sweep
//! asserts the absence of a divergence trend, never boundedness.

use std::str::FromStr;
use std::sync::Arc;

use super::config::ExperimentConfig;
use super::families::{make_family, Family, Member};
use super::median;
use super::report::{Assertion, Relation, Report};
use crate::error::{Error, Result};
use crate::exponents::{in_maximal_range, Rational};
use crate::grid::{lp_norm, GridFn, ScaleLadder};
use crate::ops::{maximal_restrict, positive_maximal, restrict};
use crate::sphere::{lq_norm_sigma, SphereFn, SphereRule};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SweepOperator {
    Maximal,
    PositiveMaximal,
    Restrict,
}

impl FromStr for SweepOperator {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "maximal" => Ok(SweepOperator::Maximal),
            "positive_maximal" => Ok(SweepOperator::PositiveMaximal),
            "restrict" => Ok(SweepOperator::Restrict),
            other => Err(Error::Config {
                line: 1,
                message: format!("unknown operator `{other}`"),
            }),
        }
    }
}

impl SweepOperator {
    pub fn name(self) -> &'static str {
        match self {
            SweepOperator::Maximal => "maximal",
            SweepOperator::PositiveMaximal => "positive_maximal",
            SweepOperator::Restrict => "restrict",
        }
    }
}

struct Applied {
    values: SphereFn,
    ladder_jump: Option<f64>,
    shell_mass: Option<f64>,
}

fn apply(
    op: SweepOperator,
    f: &GridFn,
    rule: &Arc<SphereRule>,
    ladder: &ScaleLadder,
) -> Result<Applied> {
    match op {
        SweepOperator::Maximal => {
            let m = maximal_restrict(f, rule, ladder)?;
            let ladder_jump = Some(m.ladder_jump());
            let shell_mass = m.warning.map(|w| w.shell.shell_mass_rel);
            Ok(Applied {
                values: m.values,
                ladder_jump,
                shell_mass,
            })
        }
        SweepOperator::PositiveMaximal => {
            let c = positive_maximal(f, rule, ladder)?;
            Ok(Applied {
                values: c.value,
                ladder_jump: None,
                shell_mass: c.warning.map(|w| w.shell.shell_mass_rel),
            })
        }
        SweepOperator::Restrict => {
            let c = restrict(f, rule)?;
            Ok(Applied {
                values: c.value,
                ladder_jump: None,
                shell_mass: c.warning.map(|w| w.shell.shell_mass_rel),
            })
        }
    }
}

/// Largest amount by which `𝓜f` over the top half of the ladder exceeds
/// `𝓜f` over the whole ladder; zero when enlarging the ladder is monotone.
fn subset_excess(
    f: &GridFn,
    rule: &Arc<SphereRule>,
    ladder: &ScaleLadder,
    full: &SphereFn,
) -> Result<f64> {
    let part = maximal_restrict(f, rule, &ladder.largest(ladder.len().div_ceil(2))?)?;
    Ok(part
        .values
        .values()
        .iter()
        .zip(full.values())
        .map(|(a, b)| a.re - b.re)
        .fold(0.0, f64::max))
}

/// Sweeps `op` over `family` at `(p, q)`. Members are ordered by their
/// parameter; the two smallest parameters are the finest.
pub fn ratio_sweep(
    cfg: &ExperimentConfig,
    op: SweepOperator,
    family: &[Member<GridFn>],
    p: Rational,
    q: Rational,
) -> Report {
    let mut report = Report::new(&cfg.id, "sweep", cfg);
    report.note(format!("operator {}, p = {p}, q = {q}", op.name()));
    let in_range = match in_maximal_range(cfg.d as u32, p, q) {
        Ok(v) => v.in_range,
        Err(e) => {
            report.assert(Assertion::failed("exponents", Relation::AtMost, 0.0, &e));
            return report;
        }
    };
    let exploratory = cfg.sweep.exploratory || !in_range;
    if exploratory {
        report.flag("exploratory");
        report.note(
            "(p, q) outside the proven range or run marked exploratory: no assertion applied",
        );
    }
    if !cfg.at_acceptance_resolution() {
        report.flag("below-acceptance-resolution");
    }
    let setup = cfg
        .rule()
        .map(Arc::new)
        .and_then(|r| Ok((r, cfg.ladder()?)));
    let (rule, ladder) = match setup {
        Ok(s) => s,
        Err(e) => {
            report.assert(Assertion::failed("setup", Relation::AtMost, 0.0, &e));
            return report;
        }
    };

    let mut members: Vec<&Member<GridFn>> = family.iter().collect();
    members.sort_by(|a, b| a.param.total_cmp(&b.param));
    let mut ratios: Vec<(f64, f64)> = Vec::new();
    let mut worst_jump = 0.0f64;
    let mut worst_excess = 0.0f64;
    for m in members {
        let norm = match lp_norm(&m.value, p) {
            Ok(v) => v,
            Err(e) => {
                report.assert(Assertion::failed(
                    format!("lp norm at {}", m.param),
                    Relation::AtMost,
                    0.0,
                    &e,
                ));
                continue;
            }
        };
        if norm == 0.0 {
            report.note(format!("member {} has zero norm; skipped", m.param));
            continue;
        }
        let outcome = apply(op, &m.value, &rule, &ladder).and_then(|a| {
            let top = lq_norm_sigma(&a.values, q)?;
            let excess = match op {
                SweepOperator::Maximal => Some(subset_excess(&m.value, &rule, &ladder, &a.values)?),
                _ => None,
            };
            Ok((a, top, excess))
        });
        match outcome {
            Ok((a, top, excess)) => {
                let ratio = top / norm;
                report.row(&cfg.family.name, m.param, "ratio", ratio);
                report.row(&cfg.family.name, m.param, "op_norm", top);
                report.row(&cfg.family.name, m.param, "input_norm", norm);
                if let Some(j) = a.ladder_jump {
                    report.row(&cfg.family.name, m.param, "ladder_jump", j);
                    worst_jump = worst_jump.max(j);
                }
                if let Some(s) = a.shell_mass {
                    report.row(&cfg.family.name, m.param, "truncation_shell_mass", s);
                }
                if let Some(x) = excess {
                    worst_excess = worst_excess.max(x);
                }
                ratios.push((m.param, ratio));
            }
            Err(e) => report.assert(Assertion::failed(
                format!("apply at {}", m.param),
                Relation::AtMost,
                0.0,
                &e,
            )),
        }
    }

    let values: Vec<f64> = ratios.iter().map(|r| r.1).collect();
    report.diagnostic("ratio_max", values.iter().copied().fold(f64::NAN, f64::max));
    report.diagnostic("ratio_median", median(&values));
    report.assert(Assertion::at_most(
        "non-finite ratios",
        values.iter().filter(|v| !v.is_finite()).count() as f64,
        0.0,
    ));
    if op == SweepOperator::Maximal && !ratios.is_empty() {
        report.diagnostic("ladder_jump_max", worst_jump);
        report.assert(Assertion::at_most(
            "ladder jump at the maximizer",
            worst_jump,
            cfg.tolerances.ladder_jump,
        ));
        report.assert(Assertion::at_most(
            "ladder subset excess",
            worst_excess,
            0.0,
        ));
    }
    if !exploratory && ratios.len() >= 2 {
        let (a, b) = (ratios[0].1, ratios[1].1);
        let change = (a - b).abs() / a.max(b);
        report.assert(Assertion::at_most(
            "plateau at the two finest members",
            change,
            cfg.tolerances.plateau,
        ));
    }
    report
}

/// [`ratio_sweep`] on the configured family, operator and exponents.
pub fn run_sweep(cfg: &ExperimentConfig) -> Result<Report> {
    let op: SweepOperator = cfg.sweep.operator.parse()?;
    match make_family(cfg)? {
        Family::Grid(members) => Ok(ratio_sweep(
            cfg,
            op,
            &members,
            cfg.exponents.p,
            cfg.exponents.q,
        )),
        Family::Sphere(_) => Err(Error::Config {
            line: 1,
            message: format!(
                "family `{}` lives on the sphere; sweeps need grid functions",
                cfg.family.name
            ),
        }),
    }
}
