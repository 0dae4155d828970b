//! Closed forms used as references by the experiments.

/// Bessel `J_0` by its power series; accurate to ~1e-12 for `|x| <= 10`.
pub fn bessel_j0(x: f64) -> f64 {
    let q = -(x * x) / 4.0;
    let (mut term, mut sum) = (1.0, 1.0);
    for k in 1..200 {
        term *= q / (k * k) as f64;
        sum += term;
        if term.abs() < 1e-17 * sum.abs().max(1e-300) && k > 5 {
            break;
        }
    }
    sum
}

/// `∫_{S²} e^{-i x·ω} dσ(ω) = 4π sin|x| / |x|`.
pub fn sphere_measure_transform(r: f64) -> f64 {
    if r == 0.0 {
        4.0 * std::f64::consts::PI
    } else {
        4.0 * std::f64::consts::PI * r.sin() / r
    }
}

/// `∫_{S¹} e^{-i x·ω} dσ(ω) = 2π J_0(|x|)`.
pub fn circle_measure_transform(r: f64) -> f64 {
    2.0 * std::f64::consts::PI * bessel_j0(r)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn j0_against_integral_representation() {
        // J_0(x) = (1/π) ∫_0^π cos(x sin t) dt, trapezoid on a periodic integrand.
        let oracle = |x: f64| {
            let m = 2000;
            (0..m)
                .map(|k| (x * (std::f64::consts::PI * k as f64 / m as f64).sin()).cos())
                .sum::<f64>()
                / m as f64
        };
        for x in [0.0, 0.5, 2.404825557695773, 7.3, 10.0] {
            assert!((bessel_j0(x) - oracle(x)).abs() < 1e-12, "x={x}");
        }
        assert!(bessel_j0(2.404826).abs() < 1e-6);
    }
}
