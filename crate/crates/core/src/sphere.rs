//! Quadrature for surface measure on the circle and the 2-sphere.

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::exponents::Rational;

/// Nodes `ω_k` on `S^{d-1}` with positive weights `w_k`.
///
/// Nodes are stored padded to three components; for `d = 2` the third is 0.
#[derive(Clone, Debug, PartialEq)]
pub struct SphereRule {
    d: usize,
    nodes: Vec<[f64; 3]>,
    weights: Vec<f64>,
    exactness: usize,
}

impl SphereRule {
    /// Arbitrary rule. Only unit length and positive weights are checked, so
    /// partial rules (a single node, a cap) are allowed.
    pub fn new(
        d: usize,
        nodes: Vec<Vec<f64>>,
        weights: Vec<f64>,
        exactness: usize,
    ) -> Result<Self> {
        if !(2..=3).contains(&d) {
            return Err(Error::InvalidRule(format!("dimension {d} not in 2..=3")));
        }
        if nodes.len() != weights.len() || nodes.is_empty() {
            return Err(Error::InvalidRule(format!(
                "{} nodes vs {} weights",
                nodes.len(),
                weights.len()
            )));
        }
        let mut padded = Vec::with_capacity(nodes.len());
        for (k, node) in nodes.iter().enumerate() {
            if node.len() != d {
                return Err(Error::InvalidRule(format!(
                    "node {k} has {} components",
                    node.len()
                )));
            }
            let norm = node.iter().map(|c| c * c).sum::<f64>().sqrt();
            if (norm - 1.0).abs() > 1e-12 {
                return Err(Error::InvalidRule(format!("node {k} has length {norm}")));
            }
            let mut p = [0.0; 3];
            p[..d].copy_from_slice(node);
            padded.push(p);
        }
        if let Some(k) = weights.iter().position(|w| !(w.is_finite() && *w > 0.0)) {
            return Err(Error::InvalidRule(format!("weight {k} is not positive")));
        }
        Ok(SphereRule {
            d,
            nodes: padded,
            weights,
            exactness,
        })
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn node(&self, k: usize) -> &[f64] {
        &self.nodes[k][..self.d]
    }

    pub(crate) fn padded_nodes(&self) -> &[[f64; 3]] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Spherical harmonics of degree `1..=exactness` integrate to zero.
    pub fn exactness(&self) -> usize {
        self.exactness
    }

    pub fn total_weight(&self) -> f64 {
        self.weights.iter().sum()
    }

    /// Sub-rule on the given node indices.
    pub fn select(&self, indices: &[usize]) -> Result<SphereRule> {
        if indices.is_empty() {
            return Err(Error::InvalidRule("empty selection".into()));
        }
        let nodes = indices.iter().map(|&k| self.nodes[k]).collect();
        let weights = indices.iter().map(|&k| self.weights[k]).collect();
        Ok(SphereRule {
            d: self.d,
            nodes,
            weights,
            exactness: 0,
        })
    }
}

/// Total surface measure of `S^{d-1}`.
pub fn sphere_area(d: usize) -> f64 {
    if d == 2 {
        2.0 * PI
    } else {
        4.0 * PI
    }
}

/// `m` equispaced nodes on the circle, weights `2π/m`.
pub fn circle_rule(m: usize) -> Result<SphereRule> {
    if m < 8 {
        return Err(Error::InvalidRule(format!(
            "circle rule needs m >= 8, got {m}"
        )));
    }
    let nodes = (0..m)
        .map(|k| {
            let t = 2.0 * PI * k as f64 / m as f64;
            [t.cos(), t.sin(), 0.0]
        })
        .collect();
    Ok(SphereRule {
        d: 2,
        nodes,
        weights: vec![2.0 * PI / m as f64; m],
        exactness: m - 1,
    })
}

/// Gauss–Legendre in `cos θ` times a uniform azimuthal rule.
pub fn sphere_rule(n_theta: usize, n_phi: usize) -> Result<SphereRule> {
    if n_theta < 8 || n_phi < 16 {
        return Err(Error::InvalidRule(format!(
            "sphere rule needs nθ >= 8 and nφ >= 16, got ({n_theta}, {n_phi})"
        )));
    }
    let (z, w) = gauss_legendre(n_theta);
    Ok(product_rule(
        &z,
        &w,
        n_phi,
        (2 * n_theta - 1).min(n_phi - 1),
    ))
}

/// Product rule with a separate Gauss piece on the polar cap `z >= cos δ`.
///
/// The cap gets `n_cap` rings and the rest of the sphere `n_rest`, so cap
/// indicators are integrated without a resolution penalty.
pub fn capped_sphere_rule(
    delta: f64,
    n_cap: usize,
    n_rest: usize,
    n_phi: usize,
) -> Result<SphereRule> {
    if !(delta > 0.0 && delta < PI) {
        return Err(Error::InvalidRule(format!(
            "cap angle {delta} not in (0, π)"
        )));
    }
    if n_cap < 8 || n_rest < 8 || n_phi < 16 {
        return Err(Error::InvalidRule(format!(
            "undersized capped rule ({n_cap}, {n_rest}, {n_phi})"
        )));
    }
    let c = delta.cos();
    let (zc, wc) = gauss_legendre_on(n_cap, c, 1.0);
    let (zr, wr) = gauss_legendre_on(n_rest, -1.0, c);
    let z: Vec<f64> = zr.into_iter().chain(zc).collect();
    let w: Vec<f64> = wr.into_iter().chain(wc).collect();
    Ok(product_rule(
        &z,
        &w,
        n_phi,
        (2 * n_cap.min(n_rest) - 1).min(n_phi - 1),
    ))
}

fn product_rule(z: &[f64], w: &[f64], n_phi: usize, exactness: usize) -> SphereRule {
    let dphi = 2.0 * PI / n_phi as f64;
    let mut nodes = Vec::with_capacity(z.len() * n_phi);
    let mut weights = Vec::with_capacity(z.len() * n_phi);
    for (&zi, &wi) in z.iter().zip(w) {
        let s = (1.0 - zi * zi).max(0.0).sqrt();
        for j in 0..n_phi {
            let phi = j as f64 * dphi;
            nodes.push([s * phi.cos(), s * phi.sin(), zi]);
            weights.push(wi * dphi);
        }
    }
    SphereRule {
        d: 3,
        nodes,
        weights,
        exactness,
    }
}

/// Gauss–Legendre nodes (ascending) and weights on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        // Tricomi's initial guess, then Newton.
        let mut t = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, t);
            dp = d;
            let step = p / d;
            t -= step;
            if step.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(n, t);
        dp = if d != 0.0 { d } else { dp };
        let wi = 2.0 / ((1.0 - t * t) * dp * dp);
        x[i] = -t;
        x[n - 1 - i] = t;
        w[i] = wi;
        w[n - 1 - i] = wi;
    }
    if n % 2 == 1 {
        x[n / 2] = 0.0;
    }
    (x, w)
}

/// Gauss–Legendre on `[a, b]`.
pub fn gauss_legendre_on(n: usize, a: f64, b: f64) -> (Vec<f64>, Vec<f64>) {
    let (x, w) = gauss_legendre(n);
    let (mid, half) = ((a + b) / 2.0, (b - a) / 2.0);
    (
        x.iter().map(|t| mid + half * t).collect(),
        w.iter().map(|v| v * half).collect(),
    )
}

fn legendre_with_derivative(n: usize, t: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, t);
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let p2 = ((2 * k - 1) as f64 * t * p1 - (k - 1) as f64 * p0) / k as f64;
        p0 = p1;
        p1 = p2;
    }
    (p1, n as f64 * (t * p1 - p0) / (t * t - 1.0))
}

/// Real orthonormal spherical harmonic of degree `l` and order `m` (`|m| <= l`)
/// on `S²`; `m > 0` uses `cos mφ`, `m < 0` uses `sin |m|φ`.
pub fn spherical_harmonic(l: usize, m: i64, omega: &[f64]) -> f64 {
    let am = m.unsigned_abs() as usize;
    assert!(am <= l, "order {m} exceeds degree {l}");
    let z = omega[2].clamp(-1.0, 1.0);
    let phi = omega[1].atan2(omega[0]);
    let p = normalized_legendre(l, am, z);
    match m.signum() {
        0 => p,
        1 => 2f64.sqrt() * p * (am as f64 * phi).cos(),
        _ => 2f64.sqrt() * p * (am as f64 * phi).sin(),
    }
}

/// `sqrt((2l+1)/4π (l-m)!/(l+m)!) P_l^m(z)` by the standard upward recurrence.
fn normalized_legendre(l: usize, m: usize, z: f64) -> f64 {
    let s = (1.0 - z * z).max(0.0).sqrt();
    let mut pmm = (1.0 / (4.0 * PI)).sqrt();
    for k in 1..=m {
        pmm *= -((2 * k + 1) as f64 / (2 * k) as f64).sqrt() * s;
    }
    if l == m {
        return pmm;
    }
    let mut pm1 = z * ((2 * m + 3) as f64).sqrt() * pmm;
    let mut prev = pmm;
    for k in (m + 2)..=l {
        let (kf, mf) = (k as f64, m as f64);
        let a = ((4.0 * kf * kf - 1.0) / (kf * kf - mf * mf)).sqrt();
        let b = (((kf - 1.0).powi(2) - mf * mf) / (4.0 * (kf - 1.0).powi(2) - 1.0)).sqrt();
        let next = a * (z * pm1 - b * prev);
        prev = pm1;
        pm1 = next;
    }
    pm1
}

/// Harmonic of degree `l` on the circle: `cos lθ` for `m >= 0`, else `sin lθ`.
pub fn circular_harmonic(l: usize, m: i64, omega: &[f64]) -> f64 {
    let t = omega[1].atan2(omega[0]) * l as f64;
    if m >= 0 {
        t.cos()
    } else {
        t.sin()
    }
}

/// Complex values aligned with the nodes of a rule.
#[derive(Clone, Debug, PartialEq)]
pub struct SphereFn {
    rule: Arc<SphereRule>,
    values: Vec<Complex64>,
}

impl SphereFn {
    pub fn new(rule: Arc<SphereRule>, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != rule.len() {
            return Err(Error::Shape(format!(
                "{} values for {} nodes",
                values.len(),
                rule.len()
            )));
        }
        if values
            .iter()
            .any(|v| !(v.re.is_finite() && v.im.is_finite()))
        {
            return Err(Error::Shape("non-finite sphere value".into()));
        }
        Ok(SphereFn { rule, values })
    }

    pub fn from_fn(rule: Arc<SphereRule>, f: impl Fn(&[f64]) -> Complex64) -> Self {
        let values = (0..rule.len()).map(|k| f(rule.node(k))).collect();
        SphereFn { rule, values }
    }

    pub fn constant(rule: Arc<SphereRule>, c: Complex64) -> Self {
        let values = vec![c; rule.len()];
        SphereFn { rule, values }
    }

    pub(crate) fn from_raw(rule: Arc<SphereRule>, values: Vec<Complex64>) -> Self {
        debug_assert_eq!(values.len(), rule.len());
        SphereFn { rule, values }
    }

    pub fn rule(&self) -> &Arc<SphereRule> {
        &self.rule
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn map(&self, f: impl Fn(Complex64) -> Complex64) -> SphereFn {
        SphereFn {
            rule: self.rule.clone(),
            values: self.values.iter().map(|&v| f(v)).collect(),
        }
    }

    pub fn moduli(&self) -> Vec<f64> {
        self.values.iter().map(|v| v.norm()).collect()
    }

    /// `Σ_k w_k f(ω_k) conj(g(ω_k))`.
    pub fn inner(&self, other: &SphereFn) -> Result<Complex64> {
        if self.rule != other.rule {
            return Err(Error::Shape("sphere functions on different rules".into()));
        }
        Ok(self
            .values
            .iter()
            .zip(&other.values)
            .zip(self.rule.weights())
            .map(|((a, b), w)| a * b.conj() * w)
            .sum())
    }
}

/// `Σ_k w_k g(ω_k)`.
pub fn integrate(g: &SphereFn) -> Complex64 {
    g.values
        .iter()
        .zip(g.rule.weights())
        .map(|(v, w)| v * w)
        .sum()
}

/// `(Σ_k w_k |g(ω_k)|^q)^{1/q}`, or the max for `q = ∞`.
pub fn lq_norm_sigma(g: &SphereFn, q: Rational) -> Result<f64> {
    if q < Rational::integer(1) {
        return Err(Error::ExponentDomain(format!("q = {q} < 1")));
    }
    if q.is_infinite() {
        return Ok(g.values.iter().map(|v| v.norm()).fold(0.0, f64::max));
    }
    let qf = q.to_f64();
    let s: f64 = g
        .values
        .iter()
        .zip(g.rule.weights())
        .map(|(v, w)| v.norm().powf(qf) * w)
        .sum();
    Ok(s.powf(1.0 / qf))
}

#[derive(Serialize, Deserialize)]
struct RuleDoc {
    d: usize,
    nodes: Vec<Vec<f64>>,
    weights: Vec<f64>,
    exactness: usize,
}

impl Serialize for SphereRule {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        RuleDoc {
            d: self.d,
            nodes: self.nodes.iter().map(|n| n[..self.d].to_vec()).collect(),
            weights: self.weights.clone(),
            exactness: self.exactness,
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for SphereRule {
    fn deserialize<D: Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        let doc = RuleDoc::deserialize(de)?;
        SphereRule::new(doc.d, doc.nodes, doc.weights, doc.exactness)
            .map_err(serde::de::Error::custom)
    }
}

/// JSON form `{d, nodes, values: [[re, im], ...]}`, one value per node.
impl Serialize for SphereFn {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Doc<'a> {
            d: usize,
            nodes: Vec<&'a [f64]>,
            values: Vec<[f64; 2]>,
        }
        Doc {
            d: self.rule.d,
            nodes: (0..self.rule.len()).map(|k| self.rule.node(k)).collect(),
            values: self.values.iter().map(|v| [v.re, v.im]).collect(),
        }
        .serialize(s)
    }
}
