use num_complex::Complex64;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use restriction_lab::grid::{fourier_transform, hl_maximal, lp_norm, Direction};
use restriction_lab::harness::families::random_bumps;
use restriction_lab::{GridFn, GridSpec, Rational, ScaleLadder};

fn spec(d: usize) -> GridSpec {
    match d {
        2 => GridSpec::new(2, 8.0, 64).unwrap(),
        _ => GridSpec::new(3, 8.0, 32).unwrap(),
    }
}

/// Uniform complex noise with no decay, so the maximal function sees the box edge.
fn noise(spec: GridSpec, seed: u64) -> GridFn {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let values = (0..spec.len())
        .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
        .collect();
    GridFn::new(spec, values).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn plancherel(seed in any::<u64>(), d in 2usize..=3) {
        let f = random_bumps(spec(d), 1, seed).remove(0);
        let two = Rational::integer(2);
        let lhs = lp_norm(&f, two).unwrap().powi(2) * (2.0 * std::f64::consts::PI).powi(d as i32);
        let rhs = lp_norm(&fourier_transform(&f, Direction::Forward), two).unwrap().powi(2);
        prop_assert!((lhs - rhs).abs() <= 1e-8 * rhs);
    }

    #[test]
    fn modulation_shifts_the_transform(seed in any::<u64>(), k in -6isize..=6, axis in 0usize..2) {
        let s = spec(2);
        let f = random_bumps(s, 1, seed).remove(0);
        let step = s.dual().spacing();
        let mut v = [0.0; 2];
        v[axis] = k as f64 * step;
        let g = GridFn::from_fn(s, |x| Complex64::from_polar(1.0, x[0] * v[0] + x[1] * v[1]));
        let modulated = f.zip_with(&g, |a, b| a * b).unwrap();
        let mut cells = [0isize; 2];
        cells[axis] = k;
        let want = fourier_transform(&f, Direction::Forward).shift_cells(&cells);
        let got = fourier_transform(&modulated, Direction::Forward);
        let err = got.values().iter().zip(want.values()).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
        prop_assert!(err <= 1e-6 * want.max_abs(), "err {err}");
    }

    #[test]
    fn maximal_is_sublinear(seed in any::<u64>(), d in 2usize..=3) {
        let s = spec(d);
        let ladder = ScaleLadder::for_grid(&s).unwrap();
        let (f, g) = (noise(s, seed), noise(s, seed ^ 0x9e37));
        let sum = f.zip_with(&g, |a, b| a + b).unwrap();
        let (mf, mg, ms) = (
            hl_maximal(&f, &ladder).unwrap(),
            hl_maximal(&g, &ladder).unwrap(),
            hl_maximal(&sum, &ladder).unwrap(),
        );
        for ((s, a), b) in ms.values().iter().zip(mf.values()).zip(mg.values()) {
            // FFT box sums carry roundoff of a few ulps of the summed mass.
            prop_assert!(s.re <= a.re + b.re + 1e-12 * (a.re + b.re));
        }
    }

    #[test]
    fn maximal_iterate_dominates(seed in any::<u64>(), d in 2usize..=3) {
        let s = spec(d);
        let ladder = ScaleLadder::for_grid(&s).unwrap();
        let m = hl_maximal(&noise(s, seed), &ladder).unwrap();
        let mm = hl_maximal(&m, &ladder).unwrap();
        for (a, b) in mm.values().iter().zip(m.values()) {
            prop_assert!(a.re >= b.re * (1.0 - 1e-12));
        }
    }
}
