//! In-place multidimensional FFT over row-major cubes of possibly unequal sides.

use num_complex::Complex64;
use rustfft::{FftDirection, FftPlanner};

/// Runs a 1-D FFT along every axis of a row-major array with the given shape.
/// Unnormalized in both directions.
pub(crate) fn fft_nd(data: &mut [Complex64], shape: &[usize], direction: FftDirection) {
    debug_assert_eq!(data.len(), shape.iter().product::<usize>());
    let mut planner = FftPlanner::new();
    let mut column = Vec::new();
    for (axis, &len) in shape.iter().enumerate() {
        if len <= 1 {
            continue;
        }
        let fft = planner.plan_fft(len, direction);
        let stride: usize = shape[axis + 1..].iter().product();
        if stride == 1 {
            fft.process(data);
            continue;
        }
        // Gather `chunk` strided columns at once to keep memory access contiguous.
        let outer = data.len() / (len * stride);
        let chunk = stride.min(64);
        column.resize(len * chunk, Complex64::new(0.0, 0.0));
        for o in 0..outer {
            let base = o * len * stride;
            let mut s0 = 0;
            while s0 < stride {
                let w = chunk.min(stride - s0);
                for k in 0..len {
                    let row = base + k * stride + s0;
                    for c in 0..w {
                        column[c * len + k] = data[row + c];
                    }
                }
                fft.process(&mut column[..w * len]);
                for k in 0..len {
                    let row = base + k * stride + s0;
                    for c in 0..w {
                        data[row + c] = column[c * len + k];
                    }
                }
                s0 += w;
            }
        }
    }
}

/// Smallest size `>= n` whose prime factors are 2, 3 and 5.
pub(crate) fn fast_len(n: usize) -> usize {
    let mut m = n.max(1);
    loop {
        let mut r = m;
        for p in [2, 3, 5] {
            while r % p == 0 {
                r /= p;
            }
        }
        if r == 1 {
            return m;
        }
        m += 1;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matches_direct_dft() {
        let shape = [4usize, 6, 5];
        let len: usize = shape.iter().product();
        let data: Vec<Complex64> = (0..len)
            .map(|i| Complex64::new((i as f64 * 0.37).sin(), (i as f64 * 0.11).cos()))
            .collect();
        let mut fast = data.clone();
        fft_nd(&mut fast, &shape, FftDirection::Forward);
        for k in [0usize, 7, 33, len - 1] {
            let kk = [k / 30, (k / 5) % 6, k % 5];
            let mut acc = Complex64::new(0.0, 0.0);
            for (j, v) in data.iter().enumerate() {
                let jj = [j / 30, (j / 5) % 6, j % 5];
                let phase: f64 = (0..3)
                    .map(|a| (jj[a] * kk[a]) as f64 / shape[a] as f64)
                    .sum();
                acc += v * Complex64::from_polar(1.0, -2.0 * std::f64::consts::PI * phase);
            }
            assert!((acc - fast[k]).norm() < 1e-10);
        }
    }

    #[test]
    fn fast_lengths() {
        assert_eq!(fast_len(128), 128);
        assert_eq!(fast_len(131), 135);
        assert_eq!(fast_len(7), 8);
    }
}
