//! Experiment configuration, read from TOML.
//!
//! Every field has a default; the defaults are the acceptance resolution.
//! Unknown keys are rejected so that typos surface as errors.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exponents::Rational;
use crate::grid::{GridSpec, ScaleLadder};
use crate::sphere::{circle_rule, sphere_rule, SphereRule};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ExperimentConfig {
    /// Prefix of every report file name.
    pub id: String,
    pub d: usize,
    pub seed: u64,
    pub grid: GridConfig,
    pub rule: RuleConfig,
    pub ladder: LadderConfig,
    pub family: FamilyConfig,
    pub exponents: ExponentConfig,
    pub sweep: SweepConfig,
    pub knapp: KnappConfig,
    pub identities: IdentityConfig,
    pub lebesgue: LebesgueConfig,
    pub tolerances: Tolerances,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GridConfig {
    pub half_width: f64,
    pub n: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RuleConfig {
    /// Gauss–Legendre rings (d = 3).
    pub n_theta: usize,
    /// Azimuthal nodes per ring (d = 3).
    pub n_phi: usize,
    /// Equispaced nodes on the circle (d = 2).
    pub circle_nodes: usize,
}

/// Dyadic ladder `2^{k·step}` inside `[lo, hi]`; missing bounds default to
/// `[h, L/2]` of the primal grid.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct LadderConfig {
    pub lo: Option<f64>,
    pub hi: Option<f64>,
    pub step: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct FamilyConfig {
    pub name: String,
    /// Gaussian widths σ in `e^{-|x|²/(2σ²)}` (gaussian, modulated).
    pub widths: Vec<f64>,
    /// Frequency shift `v` in `e^{i v·x}` (modulated).
    pub modulation: Vec<f64>,
    /// Cap half-angles (knapp_cap).
    pub deltas: Vec<f64>,
    /// Number of members (random_bumps).
    pub count: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ExponentConfig {
    pub p: Rational,
    pub q: Rational,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SweepConfig {
    /// `maximal`, `positive_maximal` or `restrict`.
    pub operator: String,
    /// Run without the no-divergence assertion even when in range.
    pub exploratory: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct KnappConfig {
    /// Restriction exponents `q`; the quotient divides by the `L^{q'}(dσ)` norm.
    pub q_values: Vec<Rational>,
    /// `log2 δ` for every cap.
    pub log2_deltas: Vec<f64>,
    /// Gauss rings inside the cap.
    pub n_cap: usize,
    pub n_phi: usize,
    /// Half-extent of the rescaled cylinder `(r', z') = (δ r, δ² z)`.
    pub extent: f64,
    pub dr: f64,
    pub dz: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct IdentityConfig {
    /// Frequency-side kernel box for the bilinear checks.
    pub kernel_half_width: f64,
    pub kernel_n: usize,
    /// Width of the Gaussian test kernel on the frequency side.
    pub kernel_sigma: f64,
    /// `log2 ε` of the mollifier scales in the Fubini check.
    pub fubini_log2_scales: Vec<f64>,
    /// `log2 ε` of the scales in the Fourier-of-adjoint check.
    pub adjoint_transform_log2_scales: Vec<f64>,
    pub holder_functions: usize,
    /// Largest ball radius in the Hölder check.
    pub holder_eps_max: f64,
    /// Box half-width for the autocorrelation in the domination check.
    pub domination_half_width: f64,
    /// Ladder step for the domination pairs, and the denser step it is compared with.
    pub domination_step: f64,
    pub domination_dense_step: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct LebesgueConfig {
    pub half_width: f64,
    pub n: usize,
    pub sigma: f64,
    pub modulation: Vec<f64>,
    pub nodes: usize,
    /// Smallest ball radius in dual grid spacings.
    pub eps_min_cells: f64,
    pub eps_max: f64,
    pub step: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Tolerances {
    pub restrict_closed_form: f64,
    pub extension_closed_form: f64,
    pub bessel_zero: f64,
    pub adjoint: f64,
    pub adjoint_transform: f64,
    pub fubini: f64,
    pub plancherel: f64,
    pub autocorrelation: f64,
    pub domination_max: f64,
    pub domination_stability: f64,
    pub holder_spread: f64,
    pub plateau: f64,
    pub ladder_jump: f64,
    pub knapp_slope: f64,
    pub knapp_tail: f64,
    pub lebesgue_slope: f64,
    pub lebesgue_limit: f64,
    pub quadrature: f64,
    pub plancherel_constant: f64,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            id: "default".into(),
            d: 3,
            seed: 42,
            grid: GridConfig::default(),
            rule: RuleConfig::default(),
            ladder: LadderConfig::default(),
            family: FamilyConfig::default(),
            exponents: ExponentConfig::default(),
            sweep: SweepConfig::default(),
            knapp: KnappConfig::default(),
            identities: IdentityConfig::default(),
            lebesgue: LebesgueConfig::default(),
            tolerances: Tolerances::default(),
        }
    }
}

impl Default for GridConfig {
    fn default() -> Self {
        GridConfig {
            half_width: 8.0,
            n: 128,
        }
    }
}

impl Default for RuleConfig {
    fn default() -> Self {
        RuleConfig {
            n_theta: 24,
            n_phi: 48,
            circle_nodes: 96,
        }
    }
}

impl Default for LadderConfig {
    fn default() -> Self {
        LadderConfig {
            lo: None,
            hi: None,
            step: 0.5,
        }
    }
}

impl Default for FamilyConfig {
    fn default() -> Self {
        FamilyConfig {
            name: "gaussian".into(),
            widths: vec![0.5, 0.5f64.sqrt(), 1.0],
            modulation: vec![0.5, 0.0, 0.0],
            deltas: vec![0.5],
            count: 10,
        }
    }
}

impl Default for ExponentConfig {
    fn default() -> Self {
        ExponentConfig {
            p: Rational::new(4, 3),
            q: Rational::integer(2),
        }
    }
}

impl Default for SweepConfig {
    fn default() -> Self {
        SweepConfig {
            operator: "maximal".into(),
            exploratory: false,
        }
    }
}

impl Default for KnappConfig {
    fn default() -> Self {
        KnappConfig {
            q_values: vec![
                Rational::integer(2),
                Rational::integer(4),
                Rational::integer(1),
            ],
            log2_deltas: (4..=10).map(|k| -(k as f64) / 2.0).collect(),
            n_cap: 128,
            n_phi: 384,
            extent: 256.0,
            dr: 0.25,
            dz: 1.0,
        }
    }
}

impl Default for IdentityConfig {
    fn default() -> Self {
        IdentityConfig {
            kernel_half_width: 4.0,
            kernel_n: 256,
            kernel_sigma: 0.35,
            fubini_log2_scales: vec![-2.0, -1.5, -1.0, -0.5],
            adjoint_transform_log2_scales: vec![1.0, 1.5, 2.0],
            holder_functions: 10,
            holder_eps_max: 2.0,
            domination_half_width: 16.0,
            domination_step: 0.5,
            domination_dense_step: 0.25,
        }
    }
}

impl Default for LebesgueConfig {
    fn default() -> Self {
        LebesgueConfig {
            half_width: 96.0,
            n: 192,
            sigma: 0.7,
            modulation: vec![0.5, 0.0, 0.0],
            nodes: 32,
            eps_min_cells: 4.0,
            eps_max: 0.36,
            step: 0.5,
        }
    }
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            restrict_closed_form: 1e-4,
            extension_closed_form: 1e-6,
            bessel_zero: 1e-5,
            adjoint: 1e-6,
            adjoint_transform: 1e-5,
            fubini: 0.01,
            plancherel: 0.01,
            autocorrelation: 1e-8,
            domination_max: 3.0,
            domination_stability: 0.10,
            holder_spread: 0.15,
            plateau: 0.20,
            ladder_jump: 0.05,
            knapp_slope: 0.15,
            knapp_tail: 0.01,
            lebesgue_slope: 0.9,
            lebesgue_limit: 0.01,
            quadrature: 1e-9,
            plancherel_constant: 1e-8,
        }
    }
}

/// 1-based line of byte offset `at` in `src`.
fn line_at(src: &str, at: usize) -> usize {
    src[..at.min(src.len())]
        .bytes()
        .filter(|&b| b == b'\n')
        .count()
        + 1
}

/// Line of the first `key = ...` assignment, or 1 when the key is implicit.
fn line_of_key(src: &str, key: &str) -> usize {
    src.lines()
        .position(|l| {
            let t = l.trim_start();
            t.strip_prefix(key)
                .is_some_and(|rest| rest.trim_start().starts_with('='))
        })
        .map_or(1, |i| i + 1)
}

impl ExperimentConfig {
    /// Parses and validates; errors carry the offending line.
    pub fn from_toml_str(src: &str) -> Result<Self> {
        let cfg: ExperimentConfig = toml::from_str(src).map_err(|e| Error::Config {
            line: e.span().map_or(1, |s| line_at(src, s.start)),
            message: e.message().to_string(),
        })?;
        cfg.validate().map_err(|(key, message)| Error::Config {
            line: line_of_key(src, key),
            message,
        })?;
        Ok(cfg)
    }

    pub fn from_path(path: &std::path::Path) -> Result<Self> {
        let src = std::fs::read_to_string(path)
            .map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        Self::from_toml_str(&src)
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(self).expect("config is always representable")
    }

    fn validate(&self) -> std::result::Result<(), (&'static str, String)> {
        if !(2..=3).contains(&self.d) {
            return Err(("d", format!("d = {} not in {{2, 3}}", self.d)));
        }
        self.grid_spec().map_err(|e| ("n", e.to_string()))?;
        self.rule().map_err(|e| ("n_theta", e.to_string()))?;
        self.ladder().map_err(|e| ("step", e.to_string()))?;
        if self.exponents.p < Rational::integer(1) || self.exponents.q < Rational::integer(1) {
            return Err(("p", "exponents must be at least 1".into()));
        }
        if !["maximal", "positive_maximal", "restrict"].contains(&self.sweep.operator.as_str()) {
            return Err((
                "operator",
                format!("unknown operator `{}`", self.sweep.operator),
            ));
        }
        if self.family.modulation.len() != self.d || self.lebesgue.modulation.len() != self.d {
            return Err((
                "modulation",
                format!("modulation vectors need {} components", self.d),
            ));
        }
        if self
            .family
            .widths
            .iter()
            .chain(&self.family.deltas)
            .any(|w| !(w.is_finite() && *w > 0.0))
        {
            return Err(("widths", "family parameters must be positive".into()));
        }
        GridSpec::new(
            self.d,
            self.identities.kernel_half_width,
            self.identities.kernel_n,
        )
        .map_err(|e| ("kernel_n", e.to_string()))?;
        GridSpec::new(self.d, self.identities.domination_half_width, self.grid.n)
            .map_err(|e| ("domination_half_width", e.to_string()))?;
        GridSpec::new(self.d, self.lebesgue.half_width, self.lebesgue.n)
            .map_err(|e| ("n", e.to_string()))?;
        if self.knapp.dr <= 0.0 || self.knapp.dz <= 0.0 || self.knapp.extent <= 0.0 {
            return Err((
                "extent",
                "Knapp cylinder needs positive extent and steps".into(),
            ));
        }
        Ok(())
    }

    pub fn grid_spec(&self) -> Result<GridSpec> {
        GridSpec::new(self.d, self.grid.half_width, self.grid.n)
    }

    /// The product rule (d = 3) or equispaced circle rule (d = 2).
    pub fn rule(&self) -> Result<SphereRule> {
        match self.d {
            2 => circle_rule(self.rule.circle_nodes),
            _ => sphere_rule(self.rule.n_theta, self.rule.n_phi),
        }
    }

    pub fn ladder(&self) -> Result<ScaleLadder> {
        let spec = self.grid_spec()?;
        let lo = self.ladder.lo.unwrap_or(spec.spacing());
        let hi = self.ladder.hi.unwrap_or(spec.half_width() / 2.0);
        ScaleLadder::dyadic(lo, hi, self.ladder.step)
    }

    /// Whether grid, rule and kernel resolution reach the acceptance defaults.
    pub fn at_acceptance_resolution(&self) -> bool {
        let base = ExperimentConfig::default();
        let rule_ok = match self.d {
            2 => self.rule.circle_nodes >= base.rule.circle_nodes,
            _ => self.rule.n_theta >= base.rule.n_theta && self.rule.n_phi >= base.rule.n_phi,
        };
        self.grid.n >= base.grid.n
            && self.grid.n as f64 / self.grid.half_width
                >= base.grid.n as f64 / base.grid.half_width
            && self.identities.kernel_n >= base.identities.kernel_n
            && rule_ok
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_file_is_the_default() {
        assert_eq!(
            ExperimentConfig::from_toml_str("").unwrap(),
            ExperimentConfig::default()
        );
        assert!(ExperimentConfig::default().at_acceptance_resolution());
    }

    #[test]
    fn round_trips_through_toml() {
        let cfg = ExperimentConfig::default();
        assert_eq!(
            ExperimentConfig::from_toml_str(&cfg.to_toml_string()).unwrap(),
            cfg
        );
    }

    #[test]
    fn reports_line_of_syntax_error() {
        let src = "id = \"x\"\nd = 3\n[grid]\nn = = 4\n";
        match ExperimentConfig::from_toml_str(src) {
            Err(Error::Config { line, .. }) => assert_eq!(line, 4),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn reports_line_of_unknown_key_and_bad_value() {
        match ExperimentConfig::from_toml_str("d = 3\n\n[grid]\nwidth = 2.0\n") {
            Err(Error::Config { line, .. }) => assert_eq!(line, 4),
            other => panic!("{other:?}"),
        }
        match ExperimentConfig::from_toml_str("seed = 1\nd = 5\n") {
            Err(Error::Config { line, .. }) => assert_eq!(line, 2),
            other => panic!("{other:?}"),
        }
        match ExperimentConfig::from_toml_str("[exponents]\np = \"4/0\"\n") {
            Err(Error::Config { line, .. }) => assert_eq!(line, 2),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn halved_grid_is_below_acceptance() {
        let mut cfg = ExperimentConfig::default();
        cfg.grid.n = 64;
        assert!(!cfg.at_acceptance_resolution());
    }
}
