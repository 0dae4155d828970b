//! Exact arithmetic for Lebesgue exponents.
//!
//! Every exponent relation used by the experiments (conjugates, admissible
//! ranges, the endpoint pair, the Young's-inequality chain behind the
//! Lebesgue-point threshold) is evaluated here over exact rationals with a
//! distinguished `∞`. Nothing in this module touches floating point except
//! [`Rational::to_f64`].
//!
//! Endpoint convention: at `p = 4/3` the constraint `p' >= (d+1)/(d-1) q`
//! forces `q <= 4(d-1)/(d+1)`, which is `2` in `d = 3` (the `L^{4/3} -> L^2`
//! endpoint). [`endpoint_q`] returns that value. The inverted ratio
//! `4(d+1)/(d-1)` is available as [`inverted_endpoint_q`] for comparison; it
//! violates the range constraint for every `d >= 2`.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use num_rational::Ratio;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// An exact exponent: a reduced fraction or `∞`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Rational {
    Finite(Ratio<i64>),
    Infinite,
}

impl Rational {
    pub fn new(numer: i64, denom: i64) -> Self {
        assert!(denom != 0, "zero denominator");
        Rational::Finite(Ratio::new(numer, denom))
    }

    pub fn integer(n: i64) -> Self {
        Rational::Finite(Ratio::from_integer(n))
    }

    pub const fn infinity() -> Self {
        Rational::Infinite
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, Rational::Infinite)
    }

    pub fn finite(&self) -> Option<Ratio<i64>> {
        match self {
            Rational::Finite(r) => Some(*r),
            Rational::Infinite => None,
        }
    }

    pub fn numer(&self) -> Option<i64> {
        self.finite().map(|r| *r.numer())
    }

    pub fn denom(&self) -> Option<i64> {
        self.finite().map(|r| *r.denom())
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            Rational::Finite(r) => *r.numer() as f64 / *r.denom() as f64,
            Rational::Infinite => f64::INFINITY,
        }
    }

    /// Reciprocal with `1/∞ = 0` and `1/0 = ∞`.
    pub fn recip(&self) -> Rational {
        match self {
            Rational::Infinite => Rational::integer(0),
            Rational::Finite(r) if r.is_zero() => Rational::Infinite,
            Rational::Finite(r) => Rational::Finite(r.recip()),
        }
    }

    /// Product with `0 * ∞` rejected.
    pub fn mul(&self, other: &Rational) -> Result<Rational> {
        match (self, other) {
            (Rational::Finite(a), Rational::Finite(b)) => Ok(Rational::Finite(a * b)),
            (Rational::Finite(a), Rational::Infinite)
            | (Rational::Infinite, Rational::Finite(a)) => {
                if a.is_positive() {
                    Ok(Rational::Infinite)
                } else {
                    Err(Error::ExponentDomain(format!(
                        "{} * inf is undefined here",
                        Rational::Finite(*a)
                    )))
                }
            }
            (Rational::Infinite, Rational::Infinite) => Ok(Rational::Infinite),
        }
    }
}

impl PartialOrd for Rational {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Rational {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (Rational::Finite(a), Rational::Finite(b)) => a.cmp(b),
            (Rational::Finite(_), Rational::Infinite) => Ordering::Less,
            (Rational::Infinite, Rational::Finite(_)) => Ordering::Greater,
            (Rational::Infinite, Rational::Infinite) => Ordering::Equal,
        }
    }
}

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Rational::Finite(r) => write!(f, "{}/{}", r.numer(), r.denom()),
            Rational::Infinite => write!(f, "inf"),
        }
    }
}

impl FromStr for Rational {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim();
        if matches!(t, "inf" | "infinity" | "∞" | "Inf") {
            return Ok(Rational::Infinite);
        }
        let bad = || {
            Error::ExponentDomain(format!(
                "cannot parse `{s}` as a rational (expected `num/den`, an integer or `inf`)"
            ))
        };
        match t.split_once('/') {
            Some((n, d)) => {
                let n: i64 = n.trim().parse().map_err(|_| bad())?;
                let d: i64 = d.trim().parse().map_err(|_| bad())?;
                if d == 0 {
                    return Err(bad());
                }
                Ok(Rational::new(n, d))
            }
            None => Ok(Rational::integer(t.parse().map_err(|_| bad())?)),
        }
    }
}

impl Serialize for Rational {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Rational {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Signed slack of a constraint; infinite when one side is `∞`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Slack {
    Finite(Ratio<i64>),
    PosInfinite,
    NegInfinite,
}

impl Slack {
    pub fn is_nonnegative(&self) -> bool {
        match self {
            Slack::Finite(r) => !r.is_negative(),
            Slack::PosInfinite => true,
            Slack::NegInfinite => false,
        }
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, Slack::Finite(r) if r.is_zero())
    }

    /// `lhs - rhs` for `lhs >= rhs` style constraints.
    fn of(lhs: Rational, rhs: Rational) -> Slack {
        match (lhs, rhs) {
            (Rational::Finite(a), Rational::Finite(b)) => Slack::Finite(a - b),
            (Rational::Infinite, Rational::Finite(_)) => Slack::PosInfinite,
            (Rational::Finite(_), Rational::Infinite) => Slack::NegInfinite,
            (Rational::Infinite, Rational::Infinite) => Slack::Finite(Ratio::zero()),
        }
    }
}

impl fmt::Display for Slack {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Slack::Finite(r) => write!(f, "{}/{}", r.numer(), r.denom()),
            Slack::PosInfinite => write!(f, "inf"),
            Slack::NegInfinite => write!(f, "-inf"),
        }
    }
}

impl Serialize for Slack {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Constraint {
    pub name: String,
    pub slack: Slack,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RangeVerdict {
    pub in_range: bool,
    pub binding_constraints: Vec<Constraint>,
}

impl RangeVerdict {
    fn from_constraints(binding_constraints: Vec<Constraint>) -> Self {
        let in_range = binding_constraints.iter().all(|c| c.slack.is_nonnegative());
        RangeVerdict {
            in_range,
            binding_constraints,
        }
    }

    pub fn slack(&self, name: &str) -> Option<Slack> {
        self.binding_constraints
            .iter()
            .find(|c| c.name == name)
            .map(|c| c.slack)
    }
}

pub const P_CONSTRAINT: &str = "p <= p_max";
pub const Q_CONSTRAINT: &str = "p' >= (d+1)/(d-1) q";

fn check_exponent(name: &str, p: &Rational) -> Result<()> {
    if *p < Rational::integer(1) {
        return Err(Error::ExponentDomain(format!("{name} = {p} is below 1")));
    }
    Ok(())
}

fn check_dimension(d: u32) -> Result<()> {
    if d < 2 {
        return Err(Error::ExponentDomain(format!("dimension {d} < 2")));
    }
    Ok(())
}

/// Hölder conjugate: `1/p + 1/p' = 1`.
pub fn conjugate(p: Rational) -> Result<Rational> {
    check_exponent("p", &p)?;
    Ok(match p {
        Rational::Infinite => Rational::integer(1),
        Rational::Finite(r) if r.is_one() => Rational::Infinite,
        Rational::Finite(r) => Rational::Finite(r / (r - Ratio::one())),
    })
}

/// `(d+1)/(d-1)`, the ratio between `p'` and `q` along the critical line.
pub fn critical_ratio(d: u32) -> Ratio<i64> {
    Ratio::new(d as i64 + 1, d as i64 - 1)
}

fn range_check(d: u32, p: Rational, q: Rational, p_max: Ratio<i64>) -> Result<RangeVerdict> {
    check_dimension(d)?;
    check_exponent("p", &p)?;
    check_exponent("q", &q)?;
    let p_slack = match p {
        Rational::Finite(r) => Slack::Finite(p_max - r),
        Rational::Infinite => Slack::NegInfinite,
    };
    let p_conj = conjugate(p)?;
    let rhs = Rational::Finite(critical_ratio(d)).mul(&q)?;
    Ok(RangeVerdict::from_constraints(vec![
        Constraint {
            name: P_CONSTRAINT.into(),
            slack: p_slack,
        },
        Constraint {
            name: Q_CONSTRAINT.into(),
            slack: Slack::of(p_conj, rhs),
        },
    ]))
}

/// The range `1 <= p <= 4/3`, `p' >= (d+1)/(d-1) q` of the maximal estimate.
pub fn in_maximal_range(d: u32, p: Rational, q: Rational) -> Result<RangeVerdict> {
    range_check(d, p, q, Ratio::new(4, 3))
}

/// Largest `p` of the Stein–Tomas range: `2(d+1)/(d+3)`.
pub fn stein_tomas_p_max(d: u32) -> Ratio<i64> {
    Ratio::new(2 * (d as i64 + 1), d as i64 + 3)
}

/// The full Stein–Tomas range `1 <= p <= 2(d+1)/(d+3)`, `p' >= (d+1)/(d-1) q`.
pub fn in_stein_tomas_range(d: u32, p: Rational, q: Rational) -> Result<RangeVerdict> {
    range_check(d, p, q, stein_tomas_p_max(d))
}

/// Largest admissible `q` at `p = 4/3`: `4(d-1)/(d+1)`.
pub fn endpoint_q(d: u32) -> Result<Rational> {
    check_dimension(d)?;
    Ok(Rational::new(4 * (d as i64 - 1), d as i64 + 1))
}

/// `4(d+1)/(d-1)`; reported alongside [`endpoint_q`] but never adopted.
pub fn inverted_endpoint_q(d: u32) -> Result<Rational> {
    check_dimension(d)?;
    Ok(Rational::new(4 * (d as i64 + 1), d as i64 - 1))
}

/// Exponents produced by `h = f * f~` and Young's inequality.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct YoungChain {
    pub p: Rational,
    /// `1 + 1/s = 2/p`
    pub s: Rational,
    pub s_conj: Rational,
    /// `p' = 2 s'`
    pub p_conj: Rational,
}

impl YoungChain {
    /// `q` on the critical line: `p' (d-1)/(d+1)`.
    pub fn q_bound(&self, d: u32) -> Result<Rational> {
        check_dimension(d)?;
        Rational::Finite(critical_ratio(d).recip()).mul(&self.p_conj)
    }
}

/// Runs the Young's-inequality chain for `1 <= p <= 8/7`.
pub fn young_chain(p: Rational) -> Result<YoungChain> {
    check_exponent("p", &p)?;
    let r = match p {
        Rational::Finite(r) => r,
        Rational::Infinite => {
            return Err(Error::ExponentDomain("p = inf has no Young chain".into()))
        }
    };
    let two = Ratio::from_integer(2);
    if r >= two {
        return Err(Error::ExponentDomain(format!(
            "p = {p}: 1 + 1/s = 2/p has no solution s >= 1"
        )));
    }
    let s = r / (two - r);
    if s > Ratio::new(4, 3) {
        return Err(Error::ExponentDomain(format!(
            "p = {p} gives s = {} > 4/3, outside the range of the maximal estimate; p must be <= 8/7",
            Rational::Finite(s)
        )));
    }
    let s = Rational::Finite(s);
    let s_conj = conjugate(s)?;
    let p_conj = Rational::integer(2).mul(&s_conj)?;
    Ok(YoungChain {
        p,
        s,
        s_conj,
        p_conj,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TraceStep {
    pub relation: String,
    pub value: Rational,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Threshold {
    pub p: Rational,
    pub trace: Vec<TraceStep>,
}

/// The largest `p` reachable through the Young chain, with its derivation.
pub fn lebesgue_threshold() -> Threshold {
    let s = Rational::new(4, 3);
    let s_conj = conjugate(s).expect("4/3 >= 1");
    let p_conj = Rational::integer(2).mul(&s_conj).expect("finite");
    let p = conjugate(p_conj).expect("8 >= 1");
    debug_assert_eq!(young_chain(p).map(|c| c.s), Ok(s));
    let step = |relation: &str, value| TraceStep {
        relation: relation.into(),
        value,
    };
    Threshold {
        p,
        trace: vec![
            step("s = 4/3 (largest exponent of the maximal estimate)", s),
            step("s' = conjugate(s)", s_conj),
            step("p' = 2 s'", p_conj),
            step("p = conjugate(p')", p),
        ],
    }
}

/// Finite slack of the named constraint, if any.
pub fn slack_ratio(v: &RangeVerdict, name: &str) -> Option<Ratio<i64>> {
    match v.slack(name)? {
        Slack::Finite(r) => Some(r),
        _ => None,
    }
}

impl From<Ratio<i64>> for Rational {
    fn from(r: Ratio<i64>) -> Self {
        Rational::Finite(r)
    }
}
