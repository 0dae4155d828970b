//! Inputs shared by the operator benchmarks.

use num_complex::Complex64;
use restriction_lab::{GridFn, GridSpec};

/// `e^{-|x|²/2}` on a grid of side `n` over `[-8, 8)^d`.
pub fn gaussian_input(d: usize, n: usize) -> GridFn {
    let spec = GridSpec::new(d, 8.0, n).expect("valid bench grid");
    GridFn::from_fn(spec, |x| {
        Complex64::new((-x.iter().map(|c| c * c).sum::<f64>() / 2.0).exp(), 0.0)
    })
}
