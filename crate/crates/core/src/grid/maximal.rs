//! Discrete centered Hardy–Littlewood maximal function.

use num_complex::Complex64;
use rustfft::FftDirection;

use super::fft::{fast_len, fft_nd};
use super::{GridFn, ScaleLadder};
use crate::error::Result;

/// `Mf(x_j) = max(|f(x_j)|, max_r N_r^{-1} Σ_{|x_k - x_j| <= r} |f(x_k)|)`.
///
/// `f` is extended by zero outside the box and `N_r` counts every lattice
/// offset inside the ball, so constants are fixed points away from the edge.
/// The single-node term is the `r -> 0` limit of the averages; with it
/// `Mf >= |f|` and `M(Mf) >= Mf` hold at every node.
pub fn hl_maximal(f: &GridFn, radii: &ScaleLadder) -> Result<GridFn> {
    let spec = *f.spec();
    radii.validate_for(&spec)?;
    let (d, n, h) = (spec.d(), spec.n(), spec.spacing());
    let reach = (radii.max() / h * (1.0 + 1e-12)).floor() as usize;
    let p = fast_len(n + reach);
    let shape = vec![p; d];
    let padded_len = p.pow(d as u32);

    let abs: Vec<f64> = f.values().iter().map(|v| v.norm()).collect();
    let mut fhat = vec![Complex64::new(0.0, 0.0); padded_len];
    for (flat, a) in abs.iter().enumerate() {
        let idx = spec.unravel(flat);
        fhat[padded_index(&idx[..d], p)] = Complex64::new(*a, 0.0);
    }
    fft_nd(&mut fhat, &shape, FftDirection::Forward);

    let mut best = abs.clone();
    let mut work = vec![Complex64::new(0.0, 0.0); padded_len];
    for &r in radii.scales() {
        let m = (r / h * (1.0 + 1e-12)).floor() as isize;
        let r2 = (r / h).powi(2) * (1.0 + 1e-12);
        work.iter_mut().for_each(|v| *v = Complex64::new(0.0, 0.0));
        let mut count = 0usize;
        let mut off = [0isize; 3];
        ball_offsets(d, m, r2, &mut off, 0, &mut |o| {
            count += 1;
            let idx: Vec<usize> = o[..d]
                .iter()
                .map(|&c| c.rem_euclid(p as isize) as usize)
                .collect();
            work[padded_index(&idx, p)] = Complex64::new(1.0, 0.0);
        });
        fft_nd(&mut work, &shape, FftDirection::Forward);
        for (w, a) in work.iter_mut().zip(&fhat) {
            *w *= a;
        }
        fft_nd(&mut work, &shape, FftDirection::Inverse);
        let norm = 1.0 / (count as f64 * padded_len as f64);
        for (flat, b) in best.iter_mut().enumerate() {
            let idx = spec.unravel(flat);
            // Clamp FFT noise on the positive sums.
            let avg = (work[padded_index(&idx[..d], p)].re * norm).max(0.0);
            if avg > *b {
                *b = avg;
            }
        }
    }
    Ok(GridFn::from_raw(
        spec,
        best.into_iter().map(|v| Complex64::new(v, 0.0)).collect(),
    ))
}

fn padded_index(idx: &[usize], p: usize) -> usize {
    idx.iter().fold(0, |acc, &i| acc * p + i)
}

fn ball_offsets(
    d: usize,
    m: isize,
    r2: f64,
    off: &mut [isize; 3],
    axis: usize,
    visit: &mut impl FnMut(&[isize; 3]),
) {
    if axis == d {
        let s: f64 = off[..d].iter().map(|&c| (c * c) as f64).sum();
        if s <= r2 {
            visit(off);
        }
        return;
    }
    for c in -m..=m {
        off[axis] = c;
        ball_offsets(d, m, r2, off, axis + 1, visit);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::GridSpec;

    fn brute(f: &GridFn, radii: &ScaleLadder, j: usize) -> f64 {
        let spec = f.spec();
        let h = spec.spacing();
        let mut best = f.values()[j].norm();
        for &r in radii.scales() {
            let m = (r / h * (1.0 + 1e-12)).floor() as isize;
            let r2 = (r / h).powi(2) * (1.0 + 1e-12);
            let (mut sum, mut count) = (0.0, 0usize);
            for a in -m..=m {
                for b in -m..=m {
                    if ((a * a + b * b) as f64) > r2 {
                        continue;
                    }
                    count += 1;
                    let idx = spec.unravel(j);
                    let (i0, i1) = (idx[0] as isize + a, idx[1] as isize + b);
                    if (0..spec.n() as isize).contains(&i0) && (0..spec.n() as isize).contains(&i1)
                    {
                        sum += f.values()[spec.ravel(&[i0 as usize, i1 as usize])].norm();
                    }
                }
            }
            best = best.max(sum / count as f64);
        }
        best
    }

    #[test]
    fn matches_brute_force() {
        let spec = GridSpec::new(2, 4.0, 32).unwrap();
        let f = GridFn::from_fn(spec, |x| {
            Complex64::new((x[0] * 2.1).sin(), x[1].cos() * x[0])
        });
        let radii = ScaleLadder::for_grid(&spec).unwrap();
        let m = hl_maximal(&f, &radii).unwrap();
        for j in [0, 17, 500, 1023] {
            assert!((m.values()[j].re - brute(&f, &radii, j)).abs() < 1e-12);
        }
    }

    #[test]
    fn constants_are_fixed_points() {
        let spec = GridSpec::new(3, 8.0, 32).unwrap();
        let f = GridFn::from_fn(spec, |_| Complex64::new(0.7, 0.0));
        let radii = ScaleLadder::for_grid(&spec).unwrap();
        let m = hl_maximal(&f, &radii).unwrap();
        for (j, v) in m.values().iter().enumerate() {
            let x = spec.point(j);
            if x.iter().all(|c| c.abs() < 8.0 - radii.max() - 0.6) {
                assert!((v.re - 0.7).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn indicator_of_unit_ball_at_origin() {
        let spec = GridSpec::new(2, 8.0, 64).unwrap();
        let f = GridFn::from_fn(spec, |x| {
            Complex64::new(
                if x[0] * x[0] + x[1] * x[1] <= 1.0 {
                    1.0
                } else {
                    0.0
                },
                0.0,
            )
        });
        let radii = ScaleLadder::for_grid(&spec).unwrap();
        let m = hl_maximal(&f, &radii).unwrap();
        assert!((m.values()[spec.ravel(&[32, 32])].re - 1.0).abs() < 1e-12);
    }

    #[test]
    fn gaussian_against_dense_ladder() {
        let spec = GridSpec::new(2, 8.0, 128).unwrap();
        let f = GridFn::from_fn(spec, |x| {
            Complex64::new((-(x[0] * x[0] + x[1] * x[1]) / 2.0).exp(), 0.0)
        });
        let coarse = ScaleLadder::for_grid(&spec).unwrap();
        let dense = ScaleLadder::dyadic(spec.spacing(), 4.0, 0.05).unwrap();
        let j = spec.ravel(&[64 + 16, 64]);
        let a = hl_maximal(&f, &coarse).unwrap().values()[j].re;
        let b = brute(&f, &dense, j);
        assert!((a - b).abs() / b < 0.02, "{a} vs {b}");
    }
}
