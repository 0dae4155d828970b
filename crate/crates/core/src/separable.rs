//! Direct sums `Σ_i v_i Π_a φ_{k,a}(x_{a,i_a})` over tensor grids, where every
//! term `k` (a sphere node with a scale) factors over the axes.
//!
//! Terms sharing their last-axis factor are grouped, so the expensive full
//! contraction is paid once per group (for product sphere rules: once per
//! ring and scale) and each node only pays for the remaining axes.

use std::collections::HashMap;
use std::f64::consts::PI;

use num_complex::Complex64;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// One-dimensional factor family.
#[derive(Clone, Copy, Debug, PartialEq)]
pub(crate) enum Factor {
    /// `e^{i·sign·x·ω_a} e^{-ε² x²/(4π)}`; `ε = 0` drops the window.
    Wave { sign: f64 },
    /// `ε^{-1} e^{-π (x - ω_a)²/ε²}`, so the product is `χ_ε(x - ω)`.
    Bump,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub(crate) struct Term {
    pub omega: [f64; 3],
    pub eps: f64,
}

impl Factor {
    fn eval(self, x: f64, omega: f64, eps: f64) -> Complex64 {
        match self {
            Factor::Wave { sign } => {
                let win = if eps == 0.0 {
                    1.0
                } else {
                    (-eps * eps * x * x / (4.0 * PI)).exp()
                };
                Complex64::from_polar(win, sign * x * omega)
            }
            Factor::Bump => Complex64::new((-PI * ((x - omega) / eps).powi(2)).exp() / eps, 0.0),
        }
    }

    fn along(self, axis: &[f64], omega: f64, eps: f64) -> Vec<Complex64> {
        axis.iter().map(|&x| self.eval(x, omega, eps)).collect()
    }
}

/// Groups term indices by their last-axis factor, in first-appearance order.
fn groups(terms: &[Term], last: usize, skip: impl Fn(usize) -> bool) -> Vec<Vec<usize>> {
    let mut index: HashMap<(u64, u64), usize> = HashMap::new();
    let mut out: Vec<Vec<usize>> = Vec::new();
    for (k, t) in terms.iter().enumerate() {
        if skip(k) {
            continue;
        }
        let key = (t.omega[last].to_bits(), t.eps.to_bits());
        let g = *index.entry(key).or_insert_with(|| {
            out.push(Vec::new());
            out.len() - 1
        });
        out[g].push(k);
    }
    out
}

/// Contracts the last axis of a row-major array against `v`.
fn contract_last(data: &[Complex64], v: &[Complex64]) -> Vec<Complex64> {
    data.chunks_exact(v.len())
        .map(|row| row.iter().zip(v).map(|(a, b)| a * b).sum())
        .collect()
}

/// `out_k = Σ_i values_i Π_a φ_{k,a}(axes[a][i_a])` for a row-major tensor.
pub(crate) fn forward(
    values: &[Complex64],
    axes: &[&[f64]],
    factor: Factor,
    terms: &[Term],
) -> Vec<Complex64> {
    let d = axes.len();
    debug_assert_eq!(
        values.len(),
        axes.iter().map(|a| a.len()).product::<usize>()
    );
    let mut out = vec![ZERO; terms.len()];
    for group in groups(terms, d - 1, |_| false) {
        let t0 = terms[group[0]];
        let last = factor.along(axes[d - 1], t0.omega[d - 1], t0.eps);
        let reduced = contract_last(values, &last);
        for &k in &group {
            let t = terms[k];
            let mut cur = reduced.clone();
            for a in (0..d - 1).rev() {
                let v = factor.along(axes[a], t.omega[a], t.eps);
                cur = contract_last(&cur, &v);
            }
            out[k] = cur[0];
        }
    }
    out
}

/// `out_i = Σ_k coeffs_k Π_a φ_{k,a}(axes[a][i_a])`; zero coefficients are skipped.
pub(crate) fn backward(
    coeffs: &[Complex64],
    axes: &[&[f64]],
    factor: Factor,
    terms: &[Term],
) -> Vec<Complex64> {
    let d = axes.len();
    let lens: Vec<usize> = axes.iter().map(|a| a.len()).collect();
    let lead: usize = lens[..d - 1].iter().product();
    let mut out = vec![ZERO; lead * lens[d - 1]];
    let mut partial = vec![ZERO; lead];
    for group in groups(terms, d - 1, |k| coeffs[k] == ZERO) {
        partial.iter_mut().for_each(|p| *p = ZERO);
        for &k in &group {
            let t = terms[k];
            let f0 = factor.along(axes[0], t.omega[0], t.eps);
            if d == 2 {
                for (p, a) in partial.iter_mut().zip(&f0) {
                    *p += coeffs[k] * a;
                }
            } else {
                let f1 = factor.along(axes[1], t.omega[1], t.eps);
                for (i0, a) in f0.iter().enumerate() {
                    let c = coeffs[k] * a;
                    let row = &mut partial[i0 * lens[1]..(i0 + 1) * lens[1]];
                    for (p, b) in row.iter_mut().zip(&f1) {
                        *p += c * b;
                    }
                }
            }
        }
        let t0 = terms[group[0]];
        let last = factor.along(axes[d - 1], t0.omega[d - 1], t0.eps);
        for (row, p) in out.chunks_exact_mut(lens[d - 1]).zip(&partial) {
            for (o, l) in row.iter_mut().zip(&last) {
                *o += p * l;
            }
        }
    }
    out
}

/// `out_p = Σ_k coeffs_k Π_a φ_{k,a}(points[p][a])` at scattered points.
pub(crate) fn at_points(
    coeffs: &[Complex64],
    points: &[[f64; 3]],
    d: usize,
    factor: Factor,
    terms: &[Term],
) -> Vec<Complex64> {
    points
        .iter()
        .map(|x| {
            terms
                .iter()
                .zip(coeffs)
                .filter(|(_, c)| **c != ZERO)
                .map(|(t, c)| (0..d).fold(*c, |acc, a| acc * factor.eval(x[a], t.omega[a], t.eps)))
                .sum()
        })
        .collect()
}
