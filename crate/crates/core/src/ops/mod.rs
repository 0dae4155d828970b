//! Restriction, extension and maximal operators between grids and sphere rules.
//!
//! Windowed restriction at scale `ε` is computed through the identity
//! `(f̂ ∗ χ_ε)(ω) = Σ_j f(x_j) χ̂(ε x_j) e^{-i x_j·ω} h^d`, which is exact in
//! `ε`; the convolution route survives as [`mollified_transform_at`].

mod bilinear;
mod domination;

use std::sync::Arc;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::grid::{
    fourier_transform, shell_report, Direction, GridFn, GridSpec, ScaleLadder, ShellReport,
};
use crate::separable::{self, Factor, Term};
use crate::sphere::{SphereFn, SphereRule};

pub use bilinear::{bilinear_form, interpolate, KernelSampler};
pub use domination::{autocorrelation, domination_ratio, Domination, PairRatio};

/// Most distinct scales a [`ScaleAssignment`] may use.
pub const MAX_DISTINCT_SCALES: usize = 8;

/// The input did not decay at the box edge, so box truncation is visible.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct TruncationWarning {
    pub shell: ShellReport,
}

/// Operator output plus an optional truncation warning about the input.
#[derive(Clone, Debug, PartialEq)]
pub struct Checked<T> {
    pub value: T,
    pub warning: Option<TruncationWarning>,
}

fn truncation(f: &GridFn) -> Option<TruncationWarning> {
    let shell = shell_report(f);
    (!shell.decays()).then_some(TruncationWarning { shell })
}

/// Per-node scales `ε(ω_k)` with at most [`MAX_DISTINCT_SCALES`] distinct values.
#[derive(Clone, Debug, PartialEq)]
pub struct ScaleAssignment {
    rule: Arc<SphereRule>,
    eps: Vec<f64>,
}

impl ScaleAssignment {
    pub fn new(rule: Arc<SphereRule>, eps: Vec<f64>) -> Result<Self> {
        if eps.len() != rule.len() {
            return Err(Error::Shape(format!(
                "{} scales for {} nodes",
                eps.len(),
                rule.len()
            )));
        }
        if let Some(e) = eps.iter().find(|e| !(e.is_finite() && **e > 0.0)) {
            return Err(Error::InvalidScale(format!(
                "assigned scale {e} must be positive"
            )));
        }
        let a = ScaleAssignment { rule, eps };
        let k = a.distinct().len();
        if k > MAX_DISTINCT_SCALES {
            return Err(Error::InvalidScale(format!(
                "{k} distinct scales, at most {MAX_DISTINCT_SCALES} allowed"
            )));
        }
        Ok(a)
    }

    pub fn constant(rule: Arc<SphereRule>, eps: f64) -> Result<Self> {
        let n = rule.len();
        Self::new(rule, vec![eps; n])
    }

    /// `ε ≡ 0`: the window `χ̂(0·x) ≡ 1`, i.e. the limit of shrinking scales.
    pub fn zero_limit(rule: Arc<SphereRule>) -> Self {
        let n = rule.len();
        ScaleAssignment {
            rule,
            eps: vec![0.0; n],
        }
    }

    /// Picks `ladder.scales()[pick(k)]` at node `k`.
    pub fn from_ladder(
        rule: Arc<SphereRule>,
        ladder: &ScaleLadder,
        pick: impl Fn(usize) -> usize,
    ) -> Result<Self> {
        let eps = (0..rule.len())
            .map(|k| {
                ladder
                    .scales()
                    .get(pick(k))
                    .copied()
                    .ok_or_else(|| Error::InvalidScale(format!("no ladder rung for node {k}")))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(rule, eps)
    }

    pub fn rule(&self) -> &Arc<SphereRule> {
        &self.rule
    }

    pub fn scales(&self) -> &[f64] {
        &self.eps
    }

    pub fn is_zero_limit(&self) -> bool {
        self.eps.iter().all(|&e| e == 0.0)
    }

    /// Distinct scales, largest first.
    pub fn distinct(&self) -> Vec<f64> {
        let mut v = self.eps.clone();
        v.sort_by(|a, b| b.total_cmp(a));
        v.dedup();
        v
    }

    /// Checks that every scale lies within the ladder's range.
    pub fn validate_for(&self, ladder: &ScaleLadder) -> Result<()> {
        match self
            .eps
            .iter()
            .find(|&&e| e < ladder.min() || e > ladder.max())
        {
            Some(e) => Err(Error::InvalidScale(format!(
                "scale {e} outside ladder [{}, {}]",
                ladder.min(),
                ladder.max()
            ))),
            None => Ok(()),
        }
    }

    fn terms(&self) -> Vec<Term> {
        self.rule
            .padded_nodes()
            .iter()
            .zip(&self.eps)
            .map(|(&omega, &eps)| Term { omega, eps })
            .collect()
    }
}

fn check_dims(spec: &GridSpec, rule: &SphereRule) -> Result<()> {
    if spec.d() != rule.d() {
        return Err(Error::Shape(format!(
            "grid dimension {} vs rule dimension {}",
            spec.d(),
            rule.d()
        )));
    }
    Ok(())
}

/// The unit sphere, thickened by `margin`, must fit inside the dual box.
fn check_dual_box(spec: &GridSpec, margin: f64) -> Result<()> {
    let reach = spec.dual().half_width();
    if 1.0 + margin >= reach {
        return Err(Error::DualBoxTooSmall(format!(
            "need 1 + {margin} < π/h = {reach}"
        )));
    }
    Ok(())
}

fn axes(spec: &GridSpec) -> Vec<Vec<f64>> {
    vec![spec.axis(); spec.d()]
}

fn windowed(f: &GridFn, rule: &Arc<SphereRule>, terms: &[Term]) -> SphereFn {
    let spec = f.spec();
    let ax = axes(spec);
    let refs: Vec<&[f64]> = ax.iter().map(|a| a.as_slice()).collect();
    let vol = spec.cell_volume();
    let vals = separable::forward(f.values(), &refs, Factor::Wave { sign: -1.0 }, terms);
    SphereFn::from_raw(rule.clone(), vals.into_iter().map(|v| v * vol).collect())
}

fn constant_terms(rule: &SphereRule, eps: f64) -> Vec<Term> {
    rule.padded_nodes()
        .iter()
        .map(|&omega| Term { omega, eps })
        .collect()
}

/// `𝓡f(ω_k) = Σ_j f(x_j) e^{-i x_j·ω_k} h^d` by direct summation.
pub fn restrict(f: &GridFn, rule: &Arc<SphereRule>) -> Result<Checked<SphereFn>> {
    check_dims(f.spec(), rule)?;
    check_dual_box(f.spec(), 0.0)?;
    Ok(Checked {
        value: windowed(f, rule, &constant_terms(rule, 0.0)),
        warning: truncation(f),
    })
}

/// `𝓐_ε f(ω_k) = Σ_j f(x_j) χ̂(ε x_j) e^{-i x_j·ω_k} h^d`.
pub fn windowed_restrict(
    f: &GridFn,
    rule: &Arc<SphereRule>,
    eps: f64,
) -> Result<Checked<SphereFn>> {
    check_dims(f.spec(), rule)?;
    check_dual_box(f.spec(), 0.0)?;
    if !(eps.is_finite() && eps >= 0.0) {
        return Err(Error::InvalidScale(format!("window scale {eps}")));
    }
    Ok(Checked {
        value: windowed(f, rule, &constant_terms(rule, eps)),
        warning: truncation(f),
    })
}

/// Windowed restriction with the node-dependent scale `ε(ω_k)`.
pub fn linearized_apply(f: &GridFn, assign: &ScaleAssignment) -> Result<Checked<SphereFn>> {
    let rule = assign.rule();
    check_dims(f.spec(), rule)?;
    check_dual_box(f.spec(), 0.0)?;
    Ok(Checked {
        value: windowed(f, rule, &assign.terms()),
        warning: truncation(f),
    })
}

/// `𝓜f` over a finite ladder, with the per-scale slices kept for diagnostics.
#[derive(Clone, Debug, PartialEq)]
pub struct MaximalRestriction {
    /// `max_ε |𝓐_ε f(ω_k)|`.
    pub values: SphereFn,
    /// `𝓐_ε f` for every ladder scale, in ladder order.
    pub slices: Vec<SphereFn>,
    /// Ladder index attaining the max at each node.
    pub argmax: Vec<usize>,
    pub warning: Option<TruncationWarning>,
}

impl MaximalRestriction {
    /// Largest relative drop from the maximizing scale to its ladder
    /// neighbours, over all nodes. Small values mean the ladder resolves the
    /// peak of `ε ↦ |𝓐_ε f|`.
    pub fn ladder_jump(&self) -> f64 {
        let mut worst = 0.0f64;
        for (k, &i) in self.argmax.iter().enumerate() {
            let top = self.slices[i].values()[k].norm();
            if top == 0.0 {
                continue;
            }
            for j in [i.checked_sub(1), Some(i + 1)].into_iter().flatten() {
                if let Some(s) = self.slices.get(j) {
                    worst = worst.max((top - s.values()[k].norm()) / top);
                }
            }
        }
        worst
    }
}

pub fn maximal_restrict(
    f: &GridFn,
    rule: &Arc<SphereRule>,
    ladder: &ScaleLadder,
) -> Result<MaximalRestriction> {
    check_dims(f.spec(), rule)?;
    check_dual_box(f.spec(), 0.0)?;
    ladder.validate_for(f.spec())?;
    let slices: Vec<SphereFn> = ladder
        .scales()
        .iter()
        .map(|&e| windowed(f, rule, &constant_terms(rule, e)))
        .collect();
    let mut best = vec![0.0f64; rule.len()];
    let mut argmax = vec![0usize; rule.len()];
    for (i, s) in slices.iter().enumerate() {
        for (k, v) in s.values().iter().enumerate() {
            let m = v.norm();
            if m > best[k] {
                best[k] = m;
                argmax[k] = i;
            }
        }
    }
    let values = SphereFn::from_raw(
        rule.clone(),
        best.into_iter().map(|m| Complex64::new(m, 0.0)).collect(),
    );
    Ok(MaximalRestriction {
        values,
        slices,
        argmax,
        warning: truncation(f),
    })
}

/// Calls `visit(flat, |ξ - c|²)` for every node of `spec` in the closed ball
/// of radius `r` about `c`. The ball must lie inside the box.
pub(crate) fn for_each_in_ball(
    spec: &GridSpec,
    c: &[f64],
    r: f64,
    mut visit: impl FnMut(usize, f64),
) {
    let d = spec.d();
    let (h, lo) = (spec.spacing(), -spec.half_width());
    let r2 = r * r * (1.0 + 1e-12);
    let mut ranges = [(0usize, 0usize); 3];
    for a in 0..d {
        let first = ((c[a] - r - lo) / h).ceil().max(0.0) as usize;
        let last = (((c[a] + r - lo) / h).floor() as usize).min(spec.n() - 1);
        ranges[a] = (first, last);
    }
    let n = spec.n();
    let coord = |j: usize| lo + j as f64 * h;
    for i0 in ranges[0].0..=ranges[0].1 {
        let d0 = (coord(i0) - c[0]).powi(2);
        if d0 > r2 {
            continue;
        }
        for i1 in ranges[1].0..=ranges[1].1 {
            let d1 = d0 + (coord(i1) - c[1]).powi(2);
            if d1 > r2 {
                continue;
            }
            if d == 2 {
                visit(i0 * n + i1, d1);
                continue;
            }
            for i2 in ranges[2].0..=ranges[2].1 {
                let d2 = d1 + (coord(i2) - c[2]).powi(2);
                if d2 <= r2 {
                    visit((i0 * n + i1) * n + i2, d2);
                }
            }
        }
    }
}

/// `ε^{-d} Σ_{|ξ_j - ω| <= ε} value(ξ_j) Δξ^d` for every ladder scale, at every node.
pub(crate) fn ball_integrals(
    on_dual: &GridFn,
    rule: &SphereRule,
    ladder: &ScaleLadder,
    node_indices: &[usize],
    value: impl Fn(usize, usize) -> f64,
) -> Vec<Vec<f64>> {
    let spec = on_dual.spec();
    let d = spec.d() as i32;
    let vol = spec.cell_volume();
    node_indices
        .iter()
        .map(|&k| {
            let mut sums = vec![0.0; ladder.len()];
            let omega = rule.node(k);
            // Scales are decreasing; a point counts for every scale it fits in.
            for_each_in_ball(spec, omega, ladder.max(), |flat, r2| {
                let v = value(k, flat);
                for (s, &e) in sums.iter_mut().zip(ladder.scales()) {
                    if r2 > e * e * (1.0 + 1e-12) {
                        break;
                    }
                    *s += v;
                }
            });
            sums.iter()
                .zip(ladder.scales())
                .map(|(s, e)| s * vol / e.powi(d))
                .collect()
        })
        .collect()
}

pub(crate) fn check_dual_ladder(spec: &GridSpec, ladder: &ScaleLadder) -> Result<()> {
    let dual = spec.dual();
    if ladder.min() < dual.spacing() * (1.0 - 1e-12) {
        return Err(Error::InvalidLadder(format!(
            "scale {} below dual spacing {}",
            ladder.min(),
            dual.spacing()
        )));
    }
    check_dual_box(spec, ladder.max() + dual.spacing())
}

/// `𝓜⁺f(ω) = max_ε ε^{-d} Σ_{|ξ_j - ω| <= ε} |f̂(ξ_j)| Δξ^d`.
pub fn positive_maximal(
    f: &GridFn,
    rule: &Arc<SphereRule>,
    ladder: &ScaleLadder,
) -> Result<Checked<SphereFn>> {
    check_dims(f.spec(), rule)?;
    check_dual_ladder(f.spec(), ladder)?;
    let fhat = fourier_transform(f, Direction::Forward);
    let moduli: Vec<f64> = fhat.values().iter().map(|v| v.norm()).collect();
    let all: Vec<usize> = (0..rule.len()).collect();
    let sums = ball_integrals(&fhat, rule, ladder, &all, |_, j| moduli[j]);
    let values = sums
        .iter()
        .map(|s| Complex64::new(s.iter().copied().fold(0.0, f64::max), 0.0))
        .collect();
    Ok(Checked {
        value: SphereFn::from_raw(rule.clone(), values),
        warning: truncation(f),
    })
}

/// `(f̂ ∗ χ_ε)(ω_k)` by quadrature of the convolution integral over the dual
/// grid, given `f̂` on that grid.
pub fn mollified_transform_at(fhat: &GridFn, rule: &Arc<SphereRule>, eps: f64) -> Result<SphereFn> {
    check_dims(fhat.spec(), rule)?;
    if !(eps.is_finite() && eps > 0.0) {
        return Err(Error::InvalidScale(format!("mollifier scale {eps}")));
    }
    let spec = fhat.spec();
    let ax = axes(spec);
    let refs: Vec<&[f64]> = ax.iter().map(|a| a.as_slice()).collect();
    let vals = separable::forward(
        fhat.values(),
        &refs,
        Factor::Bump,
        &constant_terms(rule, eps),
    );
    let vol = spec.cell_volume();
    Ok(SphereFn::from_raw(
        rule.clone(),
        vals.into_iter().map(|v| v * vol).collect(),
    ))
}

/// Where [`extend`] evaluates `ĝdσ`.
#[derive(Clone, Debug)]
pub enum Targets<'a> {
    /// Every node of a grid, row-major.
    Grid(&'a GridSpec),
    /// A tensor product of per-axis coordinate lists, row-major.
    Tensor(&'a [Vec<f64>]),
    Points(&'a [[f64; 3]]),
}

/// `ĝdσ(x) = Σ_k w_k g(ω_k) e^{-i x·ω_k}`.
pub fn extend(g: &SphereFn, targets: &Targets) -> Result<Vec<Complex64>> {
    let rule = g.rule();
    let coeffs: Vec<Complex64> = g
        .values()
        .iter()
        .zip(rule.weights())
        .map(|(v, w)| v * w)
        .collect();
    let terms = constant_terms(rule, 0.0);
    let factor = Factor::Wave { sign: -1.0 };
    match targets {
        Targets::Grid(spec) => {
            check_dims(spec, rule)?;
            let ax = axes(spec);
            let refs: Vec<&[f64]> = ax.iter().map(|a| a.as_slice()).collect();
            Ok(separable::backward(&coeffs, &refs, factor, &terms))
        }
        Targets::Tensor(ax) => {
            if ax.len() != rule.d() || ax.iter().any(|a| a.is_empty()) {
                return Err(Error::Shape(format!(
                    "need {} non-empty target axes",
                    rule.d()
                )));
            }
            let refs: Vec<&[f64]> = ax.iter().map(|a| a.as_slice()).collect();
            Ok(separable::backward(&coeffs, &refs, factor, &terms))
        }
        Targets::Points(points) => Ok(separable::at_points(
            &coeffs,
            points,
            rule.d(),
            factor,
            &terms,
        )),
    }
}

/// [`extend`] onto every node of `spec`.
pub fn extend_grid(g: &SphereFn, spec: &GridSpec) -> Result<GridFn> {
    let values = extend(g, &Targets::Grid(spec))?;
    Ok(GridFn::from_raw(*spec, values))
}

fn check_pair(g: &SphereFn, assign: &ScaleAssignment) -> Result<()> {
    if g.rule() != assign.rule() {
        return Err(Error::Shape(
            "function and assignment live on different rules".into(),
        ));
    }
    Ok(())
}

/// `𝓐*g(x_j) = Σ_k w_k g(ω_k) e^{i ω_k·x_j} χ̂(ε(ω_k) x_j)`.
pub fn adjoint_apply(g: &SphereFn, assign: &ScaleAssignment, spec: &GridSpec) -> Result<GridFn> {
    check_pair(g, assign)?;
    check_dims(spec, g.rule())?;
    let coeffs: Vec<Complex64> = g
        .values()
        .iter()
        .zip(g.rule().weights())
        .map(|(v, w)| v * w)
        .collect();
    let ax = axes(spec);
    let refs: Vec<&[f64]> = ax.iter().map(|a| a.as_slice()).collect();
    let values = separable::backward(&coeffs, &refs, Factor::Wave { sign: 1.0 }, &assign.terms());
    Ok(GridFn::from_raw(*spec, values))
}

/// `Σ_k w_k g(ω_k) χ_{ε(ω_k)}(ξ_j - ω_k)` on the dual grid of `spec`.
///
/// With the transform convention of [`crate::grid::fourier`], the transform
/// of [`adjoint_apply`] is `(2π)^d` times this.
pub fn fourier_of_adjoint(
    g: &SphereFn,
    assign: &ScaleAssignment,
    spec: &GridSpec,
) -> Result<GridFn> {
    check_pair(g, assign)?;
    check_dims(spec, g.rule())?;
    if assign.scales().contains(&0.0) {
        return Err(Error::InvalidScale(
            "the zero-limit assignment has no mollifier".into(),
        ));
    }
    let dual = spec.dual();
    let coeffs: Vec<Complex64> = g
        .values()
        .iter()
        .zip(g.rule().weights())
        .map(|(v, w)| v * w)
        .collect();
    let ax = axes(&dual);
    let refs: Vec<&[f64]> = ax.iter().map(|a| a.as_slice()).collect();
    let values = separable::backward(&coeffs, &refs, Factor::Bump, &assign.terms());
    Ok(GridFn::from_raw(dual, values))
}

#[cfg(test)]
mod tests;
