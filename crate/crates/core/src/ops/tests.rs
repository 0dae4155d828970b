use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::*;
use crate::exponents::Rational;
use crate::grid::{lp_norm, mollifier};
use crate::sphere::{circle_rule, sphere_rule};

/// `(2π)^{3/2} e^{-1/2}`, the transform of `e^{-|x|²/2}` on the unit sphere.
fn gauss_peak() -> f64 {
    (2.0 * PI).powf(1.5) * (-0.5f64).exp()
}

fn gaussian(spec: GridSpec, sigma: f64) -> GridFn {
    GridFn::from_fn(spec, |x| {
        Complex64::new(
            (-x.iter().map(|c| c * c).sum::<f64>() / (2.0 * sigma * sigma)).exp(),
            0.0,
        )
    })
}

fn acceptance() -> (GridSpec, Arc<SphereRule>) {
    (
        GridSpec::new(3, 8.0, 128).unwrap(),
        Arc::new(sphere_rule(24, 48).unwrap()),
    )
}

fn seeded_grid(spec: GridSpec, seed: u64) -> GridFn {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let c: Vec<f64> = (0..3).map(|_| rng.gen_range(-0.5..0.5)).collect();
    let v: Vec<f64> = (0..3).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let amp = Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
    GridFn::from_fn(spec, |x| {
        let r2: f64 = x.iter().zip(&c).map(|(a, b)| (a - b).powi(2)).sum();
        let phase: f64 = x.iter().zip(&v).map(|(a, b)| a * b).sum();
        amp * Complex64::from_polar((-r2 / 1.2).exp(), phase)
    })
}

fn seeded_sphere(rule: &Arc<SphereRule>, seed: u64) -> SphereFn {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let values = (0..rule.len())
        .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
        .collect();
    SphereFn::new(rule.clone(), values).unwrap()
}

fn direct_restrict(f: &GridFn, omega: &[f64]) -> Complex64 {
    let spec = f.spec();
    let mut acc = Complex64::new(0.0, 0.0);
    for (j, v) in f.values().iter().enumerate() {
        let x = spec.point(j);
        let phase: f64 = (0..spec.d()).map(|a| x[a] * omega[a]).sum();
        acc += v * Complex64::from_polar(1.0, -phase);
    }
    acc * spec.cell_volume()
}

#[test]
fn restrict_gaussian_closed_form() {
    let (spec, rule) = acceptance();
    let f = gaussian(spec, 1.0);
    let r = restrict(&f, &rule).unwrap();
    assert!(r.warning.is_none());
    for v in r.value.values() {
        assert!((v - gauss_peak()).norm() < 1e-6, "{v}");
    }
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..10 {
        let k = rng.gen_range(0..rule.len());
        assert!((direct_restrict(&f, rule.node(k)) - r.value.values()[k]).norm() < 1e-9);
    }
}

#[test]
fn restrict_zero_and_shift() {
    let spec = GridSpec::new(3, 8.0, 64).unwrap();
    let rule = Arc::new(sphere_rule(10, 20).unwrap());
    let zero = restrict(&GridFn::zeros(spec), &rule).unwrap();
    assert!(zero
        .value
        .values()
        .iter()
        .all(|v| *v == Complex64::new(0.0, 0.0)));

    let f = seeded_grid(spec, 1);
    let shifted = f.shift_cells(&[3, -2, 5]);
    let a = restrict(&f, &rule).unwrap().value;
    let b = restrict(&shifted, &rule).unwrap().value;
    for (x, y) in a.values().iter().zip(b.values()) {
        assert!((x.norm() - y.norm()).abs() < 1e-8);
    }
}

#[test]
fn restrict_reports_truncation_and_small_dual_box() {
    let spec = GridSpec::new(2, 8.0, 64).unwrap();
    let rule = Arc::new(circle_rule(16).unwrap());
    let wide = gaussian(spec, 4.0);
    let r = restrict(&wide, &rule).unwrap();
    assert!(r.warning.unwrap().shell.shell_max_rel > 1e-9);
    let coarse = GridSpec::new(2, 8.0, 16).unwrap();
    assert!(restrict(&GridFn::zeros(coarse), &rule).is_ok());
    let too_coarse = GridSpec::new(2, 30.0, 16).unwrap();
    assert!(matches!(
        restrict(&GridFn::zeros(too_coarse), &rule),
        Err(Error::DualBoxTooSmall(_))
    ));
}

#[test]
fn extension_closed_forms() {
    let rule3 = Arc::new(sphere_rule(24, 48).unwrap());
    let one = SphereFn::constant(rule3.clone(), Complex64::new(1.0, 0.0));
    let pts = [[0.0, 0.0, 0.0], [PI * 0.6, PI * 0.8, 0.0], [0.0, 0.0, PI]];
    let e = extend(&one, &Targets::Points(&pts)).unwrap();
    assert!((e[0].re - 4.0 * PI).abs() < 1e-10);
    assert!(e[1].norm() < 1e-6 && e[2].norm() < 1e-6);

    let rule2 = Arc::new(circle_rule(64).unwrap());
    let one2 = SphereFn::constant(rule2, Complex64::new(1.0, 0.0));
    let r = 2.404826;
    let e2 = extend(
        &one2,
        &Targets::Points(&[[r, 0.0, 0.0], [r * 0.6, r * 0.8, 0.0]]),
    )
    .unwrap();
    assert!(e2.iter().all(|v| v.norm() < 1e-5));
}

#[test]
fn extension_targets_agree() {
    let rule = Arc::new(sphere_rule(8, 16).unwrap());
    let g = seeded_sphere(&rule, 5);
    let spec = GridSpec::new(3, 2.0, 16).unwrap();
    let grid = extend(&g, &Targets::Grid(&spec)).unwrap();
    let ax = vec![spec.axis(); 3];
    let tensor = extend(&g, &Targets::Tensor(&ax)).unwrap();
    let idx = [0usize, 77, 2000, 4095];
    let pts: Vec<[f64; 3]> = idx.iter().map(|&j| spec.point(j)).collect();
    let scattered = extend(&g, &Targets::Points(&pts)).unwrap();
    for (p, &j) in idx.iter().enumerate() {
        assert_eq!(grid[j], tensor[j]);
        assert!((grid[j] - scattered[p]).norm() < 1e-12);
    }
}

#[test]
fn maximal_gaussian_against_calculus() {
    let (spec, rule) = acceptance();
    let f = gaussian(spec, 1.0);
    let ladder = ScaleLadder::for_grid(&spec).unwrap();
    let m = maximal_restrict(&f, &rule, &ladder).unwrap();
    // Windowed transform of e^{-|x|²/2} is (π/a)^{3/2} e^{-1/(4a)}, a = 1/2 + ε²/(4π).
    let windowed = |e: f64| {
        let a = 0.5 + e * e / (4.0 * PI);
        (PI / a).powf(1.5) * (-1.0 / (4.0 * a)).exp()
    };
    let dense = ScaleLadder::dyadic(ladder.min(), ladder.max(), 5.0 / 200.0).unwrap();
    let oracle = dense
        .scales()
        .iter()
        .map(|&e| windowed(e))
        .fold(0.0, f64::max);
    for v in m.values.values() {
        assert!((v.re - gauss_peak()).abs() / gauss_peak() < 0.01);
        assert!((v.re - oracle).abs() / oracle < 1e-3);
    }
    let sub = maximal_restrict(&f, &rule, &ladder.largest(3).unwrap()).unwrap();
    for (a, b) in sub.values.values().iter().zip(m.values.values()) {
        assert!(a.re <= b.re);
    }
    assert!(m.ladder_jump() < 0.05);
}

#[test]
fn maximal_of_zero() {
    let spec = GridSpec::new(2, 8.0, 64).unwrap();
    let rule = Arc::new(circle_rule(32).unwrap());
    let m = maximal_restrict(
        &GridFn::zeros(spec),
        &rule,
        &ScaleLadder::for_grid(&spec).unwrap(),
    )
    .unwrap();
    assert!(m.values.values().iter().all(|v| v.re == 0.0));
    assert_eq!(m.ladder_jump(), 0.0);
}

#[test]
fn linearized_matches_slices() {
    let spec = GridSpec::new(3, 8.0, 64).unwrap();
    let rule = Arc::new(sphere_rule(10, 20).unwrap());
    let f = seeded_grid(spec, 2);
    let ladder = ScaleLadder::for_grid(&spec).unwrap();
    let m = maximal_restrict(&f, &rule, &ladder).unwrap();
    for (i, &e) in ladder.scales().iter().enumerate() {
        let a = ScaleAssignment::constant(rule.clone(), e).unwrap();
        assert_eq!(linearized_apply(&f, &a).unwrap().value, m.slices[i]);
    }
    let two =
        ScaleAssignment::from_ladder(rule.clone(), &ladder, |k| if k % 3 == 0 { 2 } else { 5 })
            .unwrap();
    let mixed = linearized_apply(&f, &two).unwrap().value;
    for (k, v) in mixed.values().iter().enumerate() {
        let i = if k % 3 == 0 { 2 } else { 5 };
        assert!((v - m.slices[i].values()[k]).norm() < 1e-12);
        assert!(v.norm() <= m.values.values()[k].re);
    }
    let zero = linearized_apply(&GridFn::zeros(spec), &two).unwrap().value;
    assert!(zero.values().iter().all(|v| v.norm() == 0.0));
}

#[test]
fn window_matches_convolution_route() {
    let spec = GridSpec::new(3, 8.0, 64).unwrap();
    let rule = Arc::new(sphere_rule(10, 20).unwrap());
    let f = gaussian(spec, 1.0)
        .zip_with(&seeded_grid(spec, 4), |a, b| a + b * 0.5)
        .unwrap();
    let fhat = fourier_transform(&f, Direction::Forward);
    for eps in [1.0, 2.0] {
        let window = windowed_restrict(&f, &rule, eps).unwrap().value;
        let conv = mollified_transform_at(&fhat, &rule, eps).unwrap();
        let scale = window.values().iter().map(|v| v.norm()).fold(0.0, f64::max);
        for (a, b) in window.values().iter().zip(conv.values()) {
            assert!((a - b).norm() / scale < 1e-5, "eps={eps}");
        }
    }
}

#[test]
fn positive_maximal_examples() {
    let spec = GridSpec::new(3, 8.0, 64).unwrap();
    let rule = Arc::new(sphere_rule(8, 16).unwrap());
    let dual = spec.dual().spacing();
    let ladder = ScaleLadder::dyadic(dual, 2.0, 0.5).unwrap();
    let z = positive_maximal(&GridFn::zeros(spec), &rule, &ladder).unwrap();
    assert!(z.value.values().iter().all(|v| v.re == 0.0));

    let f = gaussian(spec, 1.0);
    let once = positive_maximal(&f, &rule, &ladder).unwrap().value;
    let twice = positive_maximal(&f.scale(2.0), &rule, &ladder)
        .unwrap()
        .value;
    for (a, b) in once.values().iter().zip(twice.values()) {
        assert_eq!(b.re, 2.0 * a.re);
    }

    // Small-ball averages approach v_d |f̂(ω)|; lattice counting is only
    // smooth in ε once the ball holds many dual nodes, so the dense-ladder
    // comparison uses scales >= 8 Δξ.
    let ball_volume = 4.0 * PI / 3.0;
    let wide = GridSpec::new(3, 32.0, 128).unwrap();
    let g = gaussian(wide, 1.0);
    let full = ScaleLadder::dyadic(wide.dual().spacing(), 2.0, 0.5).unwrap();
    for v in positive_maximal(&g, &rule, &full).unwrap().value.values() {
        assert!(v.re >= 0.9 * ball_volume * gauss_peak());
    }
    let resolved = ScaleLadder::dyadic(1.0, 2.0, 0.5).unwrap();
    let dense = ScaleLadder::dyadic(1.0, 2.0, 0.05).unwrap();
    let coarse_vals = positive_maximal(&g, &rule, &resolved).unwrap().value;
    let dense_vals = positive_maximal(&g, &rule, &dense).unwrap().value;
    for (a, b) in coarse_vals.values().iter().zip(dense_vals.values()) {
        assert!((a.re - b.re).abs() / b.re < 0.02, "{} vs {}", a.re, b.re);
    }

    let bad = ScaleLadder::new(vec![dual / 2.0]).unwrap();
    assert!(matches!(
        positive_maximal(&f, &rule, &bad),
        Err(Error::InvalidLadder(_))
    ));
}

fn naive_adjoint(g: &SphereFn, a: &ScaleAssignment, x: &[f64]) -> Complex64 {
    let rule = g.rule();
    (0..rule.len())
        .map(|k| {
            let w = rule.node(k);
            let dot: f64 = x.iter().zip(w).map(|(p, q)| p * q).sum();
            let r2: f64 = x.iter().map(|p| p * p).sum();
            let e = a.scales()[k];
            g.values()[k]
                * rule.weights()[k]
                * Complex64::from_polar((-e * e * r2 / (4.0 * PI)).exp(), dot)
        })
        .sum()
}

#[test]
fn adjoint_examples() {
    let spec = GridSpec::new(3, 4.0, 16).unwrap();
    let rule = Arc::new(sphere_rule(8, 16).unwrap());
    let one = SphereFn::constant(rule.clone(), Complex64::new(1.0, 0.0));
    let limit = ScaleAssignment::zero_limit(rule.clone());
    let at = adjoint_apply(&one, &limit, &spec).unwrap();
    assert!((at.values()[spec.ravel(&[8, 8, 8])] - 4.0 * PI).norm() < 1e-12);

    let g = seeded_sphere(&rule, 11);
    let ladder = ScaleLadder::for_grid(&spec).unwrap();
    let a = ScaleAssignment::from_ladder(rule.clone(), &ladder, |k| k % 4).unwrap();
    let adj = adjoint_apply(&g, &a, &spec).unwrap();
    for j in [0usize, 1000, 4095] {
        assert!((adj.values()[j] - naive_adjoint(&g, &a, &spec.point(j))).norm() < 1e-11);
    }
    let zero = adjoint_apply(
        &SphereFn::constant(rule.clone(), Complex64::new(0.0, 0.0)),
        &a,
        &spec,
    )
    .unwrap();
    assert_eq!(zero.max_abs(), 0.0);
}

#[test]
fn fourier_of_adjoint_examples() {
    let spec = GridSpec::new(2, 8.0, 128).unwrap();
    let rule = Arc::new(circle_rule(40).unwrap());
    let g = seeded_sphere(&rule, 8);
    let ladder = ScaleLadder::new(vec![4.0, 2f64.powf(1.5), 2.0]).unwrap();
    let a = ScaleAssignment::from_ladder(rule.clone(), &ladder, |k| k % 3).unwrap();
    let direct = fourier_of_adjoint(&g, &a, &spec).unwrap();
    let via_fft = fourier_transform(&adjoint_apply(&g, &a, &spec).unwrap(), Direction::Forward);
    let c = (2.0 * PI).powi(2);
    let scale = via_fft.max_abs();
    for (x, y) in direct.values().iter().zip(via_fft.values()) {
        assert!((x * c - y).norm() / scale < 1e-5);
    }

    let single = Arc::new(SphereRule::new(2, vec![vec![0.6, 0.8]], vec![0.3], 0).unwrap());
    let gs = SphereFn::constant(single.clone(), Complex64::new(2.0, -1.0));
    let one =
        fourier_of_adjoint(&gs, &ScaleAssignment::constant(single, 0.7).unwrap(), &spec).unwrap();
    let peak = Complex64::new(2.0, -1.0).norm() * 0.3 / 0.49;
    for (j, v) in one.values().iter().enumerate() {
        let xi = spec.dual().point(j);
        let r2 = (xi[0] - 0.6).powi(2) + (xi[1] - 0.8).powi(2);
        let expect = Complex64::new(2.0, -1.0) * 0.3 * (-PI * r2 / 0.49).exp() / 0.49;
        assert!((v - expect).norm() <= 1e-13 * peak);
    }
    assert!(fourier_of_adjoint(&g, &ScaleAssignment::zero_limit(rule), &spec).is_err());
}

#[test]
fn assignment_validation() {
    let rule = Arc::new(circle_rule(16).unwrap());
    let many: Vec<f64> = (0..16).map(|k| 1.0 + (k % 9) as f64).collect();
    assert!(ScaleAssignment::new(rule.clone(), many).is_err());
    assert!(ScaleAssignment::new(rule.clone(), vec![1.0; 15]).is_err());
    assert!(ScaleAssignment::constant(rule.clone(), -1.0).is_err());
    let ladder = ScaleLadder::new(vec![2.0, 1.0]).unwrap();
    assert!(ScaleAssignment::constant(rule.clone(), 1.5)
        .unwrap()
        .validate_for(&ladder)
        .is_ok());
    assert!(ScaleAssignment::constant(rule, 3.0)
        .unwrap()
        .validate_for(&ladder)
        .is_err());
}

#[test]
fn bilinear_examples() {
    let rule = Arc::new(sphere_rule(12, 24).unwrap());
    let kspec = GridSpec::new(3, 4.0, 128).unwrap();
    let one = SphereFn::constant(rule.clone(), Complex64::new(1.0, 0.0));
    let flat = GridFn::from_fn(kspec, |_| Complex64::new(1.0, 0.0));
    let b = bilinear_form(&one, &one, &flat).unwrap();
    assert!((b.re - (4.0 * PI).powi(2)).abs() < 1e-8);
    let zero = SphereFn::constant(rule.clone(), Complex64::new(0.0, 0.0));
    assert_eq!(
        bilinear_form(&zero, &one, &flat).unwrap(),
        Complex64::new(0.0, 0.0)
    );

    let gauss = |v: &[f64]| (-v.iter().map(|c| c * c).sum::<f64>()).exp();
    let kernel = GridFn::from_fn(kspec, |v| Complex64::new(gauss(v), 0.0));
    let value = bilinear_form(&one, &one, &kernel).unwrap().re;
    let dense = sphere_rule(48, 96).unwrap();
    let mut oracle = 0.0;
    for k in 0..dense.len() {
        for l in 0..dense.len() {
            let v: Vec<f64> = (0..3)
                .map(|c| dense.node(l)[c] - dense.node(k)[c])
                .collect();
            oracle += dense.weights()[k] * dense.weights()[l] * gauss(&v);
        }
    }
    assert!(
        (value - oracle).abs() / oracle < 0.005,
        "{value} vs {oracle}"
    );

    let g1 = seeded_sphere(&rule, 1);
    let g2 = seeded_sphere(&rule, 2);
    let ab = bilinear_form(&g1, &g2, &kernel).unwrap();
    let ba = bilinear_form(&g2, &g1, &kernel).unwrap();
    assert!((ab - ba).norm() / ab.norm() < 1e-10);

    let small = GridSpec::new(3, 2.0, 32).unwrap();
    assert!(matches!(
        bilinear_form(&one, &one, &GridFn::zeros(small)),
        Err(Error::KernelBoxTooSmall(_))
    ));
}

#[test]
fn domination_examples() {
    let spec = GridSpec::new(2, 8.0, 128).unwrap();
    let radii = ScaleLadder::for_grid(&spec).unwrap();
    assert!(matches!(
        domination_ratio(&GridFn::zeros(spec), &[(1.0, 1.0)], &radii),
        Err(Error::Degenerate(_))
    ));

    let h = gaussian(spec, 1.0);
    let pairs = |step: f64| {
        let s =
            ScaleLadder::dyadic(2.2 * spec.spacing(), 0.9 * spec.half_width() / 2.6, step).unwrap();
        let sc = s.scales().to_vec();
        let mut out = Vec::new();
        for i in 0..sc.len() {
            for j in i..sc.len() {
                out.push((sc[i], sc[j]));
            }
        }
        out
    };
    let coarse = domination_ratio(&h, &pairs(0.5), &radii).unwrap();
    let dense = domination_ratio(&h, &pairs(0.25), &radii).unwrap();
    assert!(coarse.max_ratio <= 3.0);
    assert!((coarse.max_ratio - dense.max_ratio).abs() / dense.max_ratio <= 0.10);

    let bump = gaussian(spec, 0.8).shift_cells(&[6, -4]);
    let moved = bump.shift_cells(&[-9, 5]);
    let a = domination_ratio(&bump, &pairs(0.5), &radii)
        .unwrap()
        .max_ratio;
    let b = domination_ratio(&moved, &pairs(0.5), &radii)
        .unwrap()
        .max_ratio;
    assert!((a - b).abs() / a < 1e-6);
}

#[test]
fn autocorrelation_examples() {
    let spec = GridSpec::new(3, 8.0, 64).unwrap();
    assert_eq!(
        autocorrelation(&GridFn::zeros(spec)).unwrap().max_abs(),
        0.0
    );

    let chi = mollifier(spec, 1.0).unwrap();
    let hh = fourier_transform(&autocorrelation(&chi).unwrap(), Direction::Forward);
    for (j, v) in hh.values().iter().enumerate() {
        let xi = spec.dual().point(j);
        let r2: f64 = xi.iter().map(|c| c * c).sum();
        assert!((v - (-r2 / (2.0 * PI)).exp()).norm() < 1e-8);
    }

    let f = seeded_grid(spec, 9);
    let lhs = fourier_transform(&autocorrelation(&f).unwrap(), Direction::Forward);
    let fh = fourier_transform(&f, Direction::Forward);
    let scale = fh.max_abs().powi(2);
    for (a, b) in lhs.values().iter().zip(fh.values()) {
        assert!((a - b.norm_sqr()).norm() / scale < 1e-8);
    }
    assert!(autocorrelation(&gaussian(spec, 5.0)).is_err());
}

#[test]
fn plancherel_constant() {
    let spec = GridSpec::new(3, 8.0, 64).unwrap();
    let f = seeded_grid(spec, 21);
    let fh = fourier_transform(&f, Direction::Forward);
    let two = Rational::integer(2);
    let lhs = lp_norm(&f, two).unwrap().powi(2) * (2.0 * PI).powi(3);
    let rhs = lp_norm(&fh, two).unwrap().powi(2);
    assert!((lhs - rhs).abs() / rhs < 1e-8);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn adjoint_pairing_holds(seed in 0u64..1000, picks in proptest::collection::vec(0usize..5, 1..4)) {
        let spec = GridSpec::new(3, 4.0, 16).unwrap();
        let rule = Arc::new(sphere_rule(8, 16).unwrap());
        let ladder = ScaleLadder::for_grid(&spec).unwrap();
        let a = ScaleAssignment::from_ladder(rule.clone(), &ladder, |k| picks[k % picks.len()]).unwrap();
        let f = seeded_grid(spec, seed);
        let g = seeded_sphere(&rule, seed + 1);
        let lhs = linearized_apply(&f, &a).unwrap().value.inner(&g).unwrap();
        let rhs = f.inner(&adjoint_apply(&g, &a, &spec).unwrap()).unwrap();
        prop_assert!((lhs - rhs).norm() <= 1e-10 * lhs.norm().max(1e-12));
    }

    #[test]
    fn sup_dominates_every_assignment(seed in 0u64..1000) {
        let spec = GridSpec::new(2, 8.0, 64).unwrap();
        let rule = Arc::new(circle_rule(24).unwrap());
        let ladder = ScaleLadder::for_grid(&spec).unwrap();
        let f = seeded_grid(spec, seed);
        let m = maximal_restrict(&f, &rule, &ladder).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let picks: Vec<usize> = (0..rule.len()).map(|_| rng.gen_range(0..ladder.len().min(8))).collect();
        let a = ScaleAssignment::from_ladder(rule.clone(), &ladder, |k| picks[k]).unwrap();
        let lin = linearized_apply(&f, &a).unwrap().value;
        for (x, y) in lin.values().iter().zip(m.values.values()) {
            prop_assert!(x.norm() <= y.re);
        }
    }

    #[test]
    fn enlarging_the_ladder_never_decreases(seed in 0u64..1000, keep in 1usize..9) {
        let spec = GridSpec::new(2, 8.0, 64).unwrap();
        let rule = Arc::new(circle_rule(24).unwrap());
        let ladder = ScaleLadder::for_grid(&spec).unwrap();
        let f = seeded_grid(spec, seed);
        let full = maximal_restrict(&f, &rule, &ladder).unwrap();
        let part = maximal_restrict(&f, &rule, &ladder.largest(keep).unwrap()).unwrap();
        for (x, y) in part.values.values().iter().zip(full.values.values()) {
            prop_assert!(x.re <= y.re);
        }
    }
}
