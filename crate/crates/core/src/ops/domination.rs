use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::grid::{
    convolve, ensure_decay, fourier_transform, hl_maximal, mollifier, reflect_conjugate, Direction,
    GridFn, ScaleLadder,
};

/// `h = f ∗ f̃` with `f̃(x) = conj(f(-x))`, so that `ĥ = |f̂|²`.
pub fn autocorrelation(f: &GridFn) -> Result<GridFn> {
    ensure_decay(f)?;
    convolve(f, &reflect_conjugate(f))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PairRatio {
    pub eps: f64,
    pub eps2: f64,
    pub ratio: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Domination {
    /// Max over pairs of [`PairRatio::ratio`].
    pub max_ratio: f64,
    pub pairs: Vec<PairRatio>,
}

/// Empirical constant in `|h̃ ∗ χ_ε ∗ χ_ε'| <= C M²h̃`, maximized over the
/// given pairs and over nodes where `M²h̃ > 1e-9 max M²h̃`.
pub fn domination_ratio(
    h: &GridFn,
    eps_pairs: &[(f64, f64)],
    radii: &ScaleLadder,
) -> Result<Domination> {
    if h.max_abs() == 0.0 {
        return Err(Error::Degenerate("h vanishes identically".into()));
    }
    ensure_decay(h)?;
    if eps_pairs.is_empty() {
        return Err(Error::InvalidScale("no scale pairs".into()));
    }
    let spec = *h.spec();
    let tilde = reflect_conjugate(h);
    let m2 = hl_maximal(&hl_maximal(&tilde, radii)?, radii)?;
    let peak = m2.max_abs();
    let floor = 1e-9 * peak;
    let mask: Vec<bool> = m2.values().iter().map(|v| v.re > floor).collect();

    let tilde_hat = fourier_transform(&tilde, Direction::Forward);
    let mut scales: Vec<f64> = eps_pairs.iter().flat_map(|&(a, b)| [a, b]).collect();
    scales.sort_by(f64::total_cmp);
    scales.dedup();
    let mollifier_hats = scales
        .iter()
        .map(|&e| Ok(fourier_transform(&mollifier(spec, e)?, Direction::Forward)))
        .collect::<Result<Vec<_>>>()?;
    let hat_of =
        |e: f64| &mollifier_hats[scales.iter().position(|&s| s == e).expect("scale cached")];

    let mut pairs = Vec::with_capacity(eps_pairs.len());
    for &(e1, e2) in eps_pairs {
        let (c1, c2) = (hat_of(e1), hat_of(e2));
        let prod: Vec<Complex64> = tilde_hat
            .values()
            .iter()
            .zip(c1.values())
            .zip(c2.values())
            .map(|((a, b), c)| a * b * c)
            .collect();
        let conv = fourier_transform(&GridFn::new(spec.dual(), prod)?, Direction::Inverse);
        let ratio = conv
            .values()
            .iter()
            .zip(m2.values())
            .zip(&mask)
            .filter(|(_, &keep)| keep)
            .map(|((c, m), _)| c.norm() / (m.re + 1e-300))
            .fold(0.0, f64::max);
        pairs.push(PairRatio {
            eps: e1,
            eps2: e2,
            ratio,
        });
    }
    let max_ratio = pairs.iter().map(|p| p.ratio).fold(0.0, f64::max);
    Ok(Domination { max_ratio, pairs })
}
