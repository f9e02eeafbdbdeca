//! Experiment configuration (TOML). Unknown keys are rejected; every knob has a default.

use std::path::{Path, PathBuf};

use ahcenter::charges::ChargeSettings;
use ahcenter::cmc::CmcSettings;
use ahcenter::evolution::EvolutionSettings;
use ahcenter::linalg::{Matrix, Vector};
use ahcenter::minkowski::LorentzTransform;
use ahcenter::models::{AspectProfile, ChartData, KappaFamily};
use clap::ValueEnum;
use serde::{Deserialize, Serialize};

use crate::error::CliError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Deserialize, Serialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Pipeline {
    Charges,
    Center,
    Cmc,
    Evolve,
    All,
}

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Config {
    /// Used when no subcommand is given.
    pub pipeline: Option<Pipeline>,
    pub strict_decay: bool,
    pub model: ModelConfig,
    pub charges: ChargesConfig,
    pub center: CenterConfig,
    pub cmc: CmcConfig,
    pub evolution: EvolutionConfig,
    pub output: OutputConfig,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Deserialize, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ModelKind {
    #[default]
    Hyperbolic,
    Kottler,
    Perturbed,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ModelConfig {
    pub kind: ModelKind,
    pub n: usize,
    /// Kottler mass parameter.
    pub mass: f64,
    /// Mass aspect profile of the perturbed family.
    pub aspect: AspectConfig,
    /// Coefficient of the `e^{−(n+1)r}` remainder of the perturbed family.
    pub remainder: f64,
    pub boost: Option<BoostConfig>,
    pub kappa: Vec<KappaConfig>,
}

impl Default for ModelConfig {
    fn default() -> Self {
        Self {
            kind: ModelKind::Hyperbolic,
            n: 3,
            mass: 0.0,
            aspect: AspectConfig::default(),
            remainder: 0.0,
            boost: None,
            kappa: Vec::new(),
        }
    }
}

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct AspectConfig {
    pub constant: f64,
    pub linear: Option<Vec<f64>>,
    pub quadratic: Option<Vec<Vec<f64>>>,
    pub shear: Option<Vec<Vec<f64>>>,
    pub harmonics: Vec<HarmonicTerm>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HarmonicTerm {
    pub l: usize,
    pub m: i64,
    pub amplitude: f64,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoostConfig {
    pub rapidity: f64,
    pub axis: Vec<f64>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(tag = "family", rename_all = "lowercase", deny_unknown_fields)]
pub enum KappaConfig {
    Momentum { amplitude: f64, c: Vec<f64>, order: f64 },
    Rotation { amplitude: f64, w: Vec<Vec<f64>>, order: f64 },
    Tangential { amplitude: f64, s: Vec<Vec<f64>>, order: f64 },
    Spherical { amplitude: f64, order: f64 },
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ChargesConfig {
    pub ladder: Vec<f64>,
    pub bandlimit: usize,
    pub tolerance: f64,
}

impl Default for ChargesConfig {
    fn default() -> Self {
        let s = ChargeSettings::default();
        Self { ladder: s.ladder, bandlimit: s.bandlimit, tolerance: s.tolerance }
    }
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CenterConfig {
    /// Hyperbolic distance allowed between the center and the boost image of the base center.
    pub tolerance: f64,
}

impl Default for CenterConfig {
    fn default() -> Self {
        Self { tolerance: 1e-7 }
    }
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CmcConfig {
    pub schedule: Vec<f64>,
    pub bandlimit: usize,
    pub quadrature: usize,
    pub tolerance: f64,
    pub max_iterations: usize,
    pub svd_cutoff: f64,
    pub max_halvings: usize,
    /// Cauchy tolerance of the center limit.
    pub center_tolerance: f64,
}

impl Default for CmcConfig {
    fn default() -> Self {
        let s = CmcSettings::default();
        Self {
            schedule: vec![4.0, 5.0, 6.0, 7.0, 8.0],
            bandlimit: s.bandlimit,
            quadrature: s.quadrature,
            tolerance: s.tolerance,
            max_iterations: s.max_iterations,
            svd_cutoff: s.svd_cutoff,
            max_halvings: s.max_halvings,
            center_tolerance: 1e-4,
        }
    }
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct EvolutionConfig {
    pub fd_step: f64,
    pub residual_radii: Vec<f64>,
    pub residual_bandlimit: usize,
}

impl Default for EvolutionConfig {
    fn default() -> Self {
        let s = EvolutionSettings::default();
        Self { fd_step: s.fd_step, residual_radii: s.residual_radii, residual_bandlimit: s.residual_bandlimit }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputConfig {
    pub dir: PathBuf,
    pub formats: Vec<Format>,
}

impl Default for OutputConfig {
    fn default() -> Self {
        Self { dir: PathBuf::from("out"), formats: vec![Format::Csv, Format::Json] }
    }
}

impl Config {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self, CliError> {
        toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))
    }

    pub fn charge_settings(&self) -> Result<ChargeSettings, CliError> {
        let s = ChargeSettings {
            ladder: self.charges.ladder.clone(),
            bandlimit: self.charges.bandlimit,
            tolerance: self.charges.tolerance,
        };
        s.validate().map_err(|e| CliError::Config(e.to_string()))?;
        Ok(s)
    }

    pub fn cmc_settings(&self) -> CmcSettings {
        let c = &self.cmc;
        CmcSettings {
            bandlimit: c.bandlimit,
            quadrature: c.quadrature,
            tolerance: c.tolerance,
            max_iterations: c.max_iterations,
            svd_cutoff: c.svd_cutoff,
            max_halvings: c.max_halvings,
        }
    }

    pub fn evolution_settings(&self) -> Result<EvolutionSettings, CliError> {
        let e = &self.evolution;
        let s = EvolutionSettings {
            charges: self.charge_settings()?,
            fd_step: e.fd_step,
            residual_radii: e.residual_radii.clone(),
            residual_bandlimit: e.residual_bandlimit,
        };
        s.validate().map_err(|e| CliError::Config(e.to_string()))?;
        Ok(s)
    }

    /// The configured data, and the same data without the boost.
    pub fn build_model(&self) -> Result<(ChartData, ChartData), CliError> {
        let m = &self.model;
        let n = m.n;
        let invalid = |e: ahcenter::models::ModelError| CliError::Config(format!("model: {e}"));
        let mut base = match m.kind {
            ModelKind::Hyperbolic => ChartData::hyperbolic(n),
            ModelKind::Kottler => ChartData::kottler(n, m.mass),
            ModelKind::Perturbed => ChartData::perturbed(aspect_profile(n, &m.aspect)?, m.remainder),
        }
        .map_err(invalid)?;
        for k in &m.kappa {
            base = base.with_kappa(kappa_family(n, k)?).map_err(invalid)?;
        }
        let data = match &m.boost {
            Some(b) => base.clone().boosted(self.boost_transform(b)?).map_err(invalid)?,
            None => base.clone(),
        };
        Ok((data, base))
    }

    pub fn boost(&self) -> Result<Option<LorentzTransform>, CliError> {
        self.model.boost.as_ref().map(|b| self.boost_transform(b)).transpose()
    }

    fn boost_transform(&self, b: &BoostConfig) -> Result<LorentzTransform, CliError> {
        let axis = vector(self.model.n, &b.axis, "boost.axis")?;
        if axis.norm() == 0.0 || !b.rapidity.is_finite() {
            return Err(CliError::Config("boost needs a nonzero axis and a finite rapidity".into()));
        }
        Ok(LorentzTransform::boost(b.rapidity, &axis))
    }
}

fn vector(n: usize, v: &[f64], key: &str) -> Result<Vector<f64>, CliError> {
    if v.len() != n {
        return Err(CliError::Config(format!("{key}: expected {n} entries, found {}", v.len())));
    }
    Ok(Vector::from_slice(v))
}

fn matrix(n: usize, rows: &[Vec<f64>], key: &str) -> Result<Matrix<f64>, CliError> {
    if rows.len() != n || rows.iter().any(|r| r.len() != n) {
        return Err(CliError::Config(format!("{key}: expected an {n}×{n} matrix")));
    }
    Ok(Matrix::from_fn(n, |i, j| rows[i][j]))
}

fn aspect_profile(n: usize, a: &AspectConfig) -> Result<AspectProfile, CliError> {
    let mut p = AspectProfile::isotropic(n, a.constant);
    if let Some(l) = &a.linear {
        p = p.with_linear(vector(n, l, "aspect.linear")?.as_slice());
    }
    if let Some(q) = &a.quadratic {
        p = p.with_quadratic(matrix(n, q, "aspect.quadratic")?);
    }
    if let Some(s) = &a.shear {
        p = p.with_shear(matrix(n, s, "aspect.shear")?);
    }
    for h in &a.harmonics {
        p = p.with_harmonic(h.l, h.m, h.amplitude);
    }
    Ok(p)
}

fn kappa_family(n: usize, k: &KappaConfig) -> Result<KappaFamily, CliError> {
    Ok(match k {
        KappaConfig::Momentum { amplitude, c, order } => {
            KappaFamily::Momentum { amplitude: *amplitude, c: vector(n, c, "kappa.c")?, order: *order }
        }
        KappaConfig::Rotation { amplitude, w, order } => {
            KappaFamily::Rotation { amplitude: *amplitude, w: matrix(n, w, "kappa.w")?, order: *order }
        }
        KappaConfig::Tangential { amplitude, s, order } => {
            KappaFamily::Tangential { amplitude: *amplitude, s: matrix(n, s, "kappa.s")?, order: *order }
        }
        KappaConfig::Spherical { amplitude, order } => KappaFamily::Spherical { amplitude: *amplitude, order: *order },
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_are_valid() {
        let c = Config::parse("").unwrap();
        assert_eq!(c.model.kind, ModelKind::Hyperbolic);
        c.charge_settings().unwrap();
        c.evolution_settings().unwrap();
        c.build_model().unwrap();
    }

    #[test]
    fn unknown_keys_are_rejected() {
        assert!(Config::parse("[model]\nkind = \"kottler\"\nmas = 0.5\n").is_err());
        assert!(Config::parse("colour = 1\n").is_err());
        assert!(Config::parse("[[model.kappa]]\nfamily = \"spherical\"\namplitude = 1.0\norder = 4.0\nc = [1, 0, 0]\n").is_err());
    }

    #[test]
    fn full_model_parses() {
        let text = r#"
            [model]
            kind = "perturbed"
            remainder = 0.5
            aspect = { constant = 1.5, linear = [0.75, 0, 0], harmonics = [{ l = 2, m = 1, amplitude = 0.3 }] }
            boost = { rapidity = 0.3, axis = [1, 0, 0] }
            [[model.kappa]]
            family = "momentum"
            amplitude = 0.8
            c = [0.5, -0.25, 1.0]
            order = 3.0
        "#;
        let c = Config::parse(text).unwrap();
        let (data, base) = c.build_model().unwrap();
        assert!(!data.is_riemannian() && base.mass_aspect().is_some());
        assert!((data.order() - 2.0).abs() < 1e-15);
    }

    #[test]
    fn dimension_mismatch_is_a_config_error() {
        let c = Config::parse("[model]\nboost = { rapidity = 0.3, axis = [1, 0] }\n").unwrap();
        assert!(matches!(c.build_model(), Err(CliError::Config(_))));
    }
}
