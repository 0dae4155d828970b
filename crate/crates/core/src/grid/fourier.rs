//! Discrete Fourier transform between a grid and its dual.
//!
//! Forward: `f̂(ξ_k) = h^d Σ_j f(x_j) e^{-i x_j·ξ_k}`.
//! Inverse: `f(x_j) = (Δξ/2π)^d Σ_k f̂(ξ_k) e^{+i x_j·ξ_k}`.
//! For even `n`, `e^{-i x_j ξ_k} = (-1)^{n/2} (-1)^{j+k} e^{-2πi jk/n}`.

use num_complex::Complex64;
use rustfft::FftDirection;

use super::fft::fft_nd;
use super::{ensure_same_spec, GridFn, GridSpec};
use crate::error::Result;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Direction {
    Forward,
    Inverse,
}

/// Transforms `f` onto the dual grid of its spec.
pub fn fourier_transform(f: &GridFn, direction: Direction) -> GridFn {
    let spec = *f.spec();
    let mut data = f.values().to_vec();
    checkerboard(&spec, &mut data);
    let (fft_dir, scale) = match direction {
        Direction::Forward => (FftDirection::Forward, spec.cell_volume()),
        Direction::Inverse => (
            FftDirection::Inverse,
            (spec.spacing() / (2.0 * std::f64::consts::PI)).powi(spec.d() as i32),
        ),
    };
    fft_nd(&mut data, &vec![spec.n(); spec.d()], fft_dir);
    // (-1)^{n/2} per axis, combined with the output checkerboard.
    let global = if (spec.n() / 2 * spec.d()) % 2 == 1 {
        -scale
    } else {
        scale
    };
    checkerboard(&spec, &mut data);
    for v in &mut data {
        *v *= global;
    }
    GridFn::from_raw(spec.dual(), data)
}

/// Multiplies by `(-1)^{Σ_a j_a}`.
fn checkerboard(spec: &GridSpec, data: &mut [Complex64]) {
    let n = spec.n();
    for (row, chunk) in data.chunks_mut(n).enumerate() {
        // Parity of the leading indices: `i` in 2-D, `i + j` in 3-D.
        let lead = row / n + row % n;
        for (k, v) in chunk.iter_mut().enumerate() {
            if (lead + k) % 2 == 1 {
                *v = -*v;
            }
        }
    }
}

/// Centered periodic convolution `Σ_m f(x_m) g(x_j - x_m) h^d`.
pub fn convolve(f: &GridFn, g: &GridFn) -> Result<GridFn> {
    ensure_same_spec(f.spec(), g.spec())?;
    let fh = fourier_transform(f, Direction::Forward);
    let gh = fourier_transform(g, Direction::Forward);
    let prod = fh.zip_with(&gh, |a, b| a * b)?;
    Ok(fourier_transform(&prod, Direction::Inverse))
}
