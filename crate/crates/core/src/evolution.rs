//! Charge rates at `t = 0` under Einstein evolution with lapse `V₍₀₎` and zero shift.
//!
//! The metric velocity is `ġ = 2V₍₀₎κ`. Charges are linear in `γ`, so the rate of
//! `Q_{(V,0)}` is the charge of the data `(ġ, 0)`; a symmetric difference of the
//! charges of `(γ ± tġ, κ)` checks it independently.

use log::warn;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::charges::{
    charge_at, charge_density, evaluate_charge, fit_ladder, integrability, slope, Charge, ChargeError, ChargeSettings, Integrability,
    Kid, KidLabel, Status,
};
use crate::models::{constraint_densities, ChartData, ModelError};
use crate::sphere::{SphereError, SphericalGrid};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EvolutionError {
    #[error("the data carry no second fundamental form")]
    NoKappa,
    #[error("charge rates are defined for T and B_i, not {0}")]
    Label(KidLabel),
    #[error("invalid evolution settings: {0}")]
    Settings(String),
    #[error(transparent)]
    Charge(#[from] ChargeError),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Sphere(#[from] SphereError),
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EvolutionSettings {
    pub charges: ChargeSettings,
    /// Step `t` of the symmetric difference.
    pub fd_step: f64,
    /// Radii of the pointwise proof residual; the constraint oracle limits them.
    pub residual_radii: Vec<f64>,
    pub residual_bandlimit: usize,
}

impl Default for EvolutionSettings {
    fn default() -> Self {
        Self {
            charges: ChargeSettings::default(),
            fd_step: 1e-5,
            residual_radii: vec![3.0, 3.5, 4.0, 4.5, 5.0],
            residual_bandlimit: 6,
        }
    }
}

impl EvolutionSettings {
    pub fn validate(&self) -> Result<(), EvolutionError> {
        self.charges.validate()?;
        if !(self.fd_step > 0.0) {
            return Err(EvolutionError::Settings("finite-difference step must be positive".into()));
        }
        if self.residual_radii.len() < 2 || self.residual_radii.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(EvolutionError::Settings("residual radii must be increasing, at least two".into()));
        }
        Ok(())
    }
}

/// Data `(ġ, 0)` with `ġ = 2 ch r κ`.
pub fn metric_rate(data: &ChartData) -> Result<ChartData, EvolutionError> {
    if data.is_riemannian() {
        return Err(EvolutionError::NoKappa);
    }
    Ok(data.metric_rate())
}

/// Analytic rate of a charge with its finite-difference check.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ChargeRate {
    pub rate: Charge,
    /// Symmetric differences on the same ladder and quadrature.
    pub fd_values: Vec<f64>,
    /// Extrapolated symmetric-difference rate.
    pub fd_limit: Option<f64>,
    /// `max |analytic − difference|` over the ladder.
    pub fd_deviation: f64,
}

impl ChargeRate {
    pub fn limit(&self) -> Option<f64> {
        self.rate.limit
    }
}

pub fn charge_rate(data: &ChartData, label: KidLabel, settings: &EvolutionSettings) -> Result<ChargeRate, EvolutionError> {
    settings.validate()?;
    if !matches!(label, KidLabel::Time | KidLabel::Boost(_)) {
        return Err(EvolutionError::Label(label));
    }
    let rate = evaluate_charge(&data.metric_rate(), label, &settings.charges)?;
    let n = data.dim();
    let kid = Kid::new(label, n)?;
    let grid = SphericalGrid::new(n - 1, rate.bandlimit)?;
    let t = settings.fd_step;
    let (plus, minus) = (data.shifted(t), data.shifted(-t));
    let fd_values = rate
        .radii
        .par_iter()
        .map(|&r| Ok((charge_at(&plus, &kid, &grid, r)? - charge_at(&minus, &kid, &grid, r)?) / (2.0 * t)))
        .collect::<Result<Vec<_>, ChargeError>>()?;
    let fd_deviation = rate.values.iter().zip(&fd_values).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    let fd_limit = fit_ladder(&rate.radii, &fd_values, settings.charges.tolerance)
        .filter(|f| f.status == Status::Converged)
        .map(|f| f.limit);
    Ok(ChargeRate { rate, fd_values, fd_limit, fd_deviation })
}

/// One line of the evolution table: `dQ_{B_i}/dt` against `Q_{(0,C_i)}`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EvolutionRow {
    pub label: String,
    pub rate: Option<f64>,
    pub fd_deviation: f64,
    pub target: Option<f64>,
    pub deviation: Option<f64>,
    pub relative: Option<f64>,
    pub status: Status,
}

/// Sup over `S_R` of `|(U̇_{B_i} − U_{(0,C_i)} − 2V₍₀₎V₍ᵢ₎J)(∂_r)|`, with `J` the
/// momentum density of `g`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ProofResidual {
    pub radii: Vec<f64>,
    pub values: Vec<f64>,
    pub exponent: Option<f64>,
    /// `2τ − 1`.
    pub expected: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EvolutionReport {
    pub description: String,
    pub order: f64,
    pub time_rate: ChargeRate,
    pub rows: Vec<EvolutionRow>,
    pub boost_rates: Vec<ChargeRate>,
    pub residual: ProofResidual,
    pub integrability: Integrability,
    /// Whether `e^{τR}|ġ|` stays bounded on the charge ladder.
    pub rate_decay: bool,
    pub warnings: Vec<String>,
}

impl EvolutionReport {
    pub fn max_deviation(&self) -> Option<f64> {
        self.rows.iter().map(|r| r.deviation).try_fold(0.0, |m, d| d.map(|d| f64::max(m, d)))
    }

    pub fn max_fd_deviation(&self) -> f64 {
        self.boost_rates.iter().chain([&self.time_rate]).map(|r| r.fd_deviation).fold(0.0, f64::max)
    }
}

/// Pointwise residual of the evolution identity on the given radii.
pub fn proof_residual(data: &ChartData, radii: &[f64], bandlimit: usize) -> Result<ProofResidual, EvolutionError> {
    let n = data.dim();
    let grid = SphericalGrid::new(n - 1, bandlimit)?;
    let rate_data = data.metric_rate();
    let time = Kid::new(KidLabel::Time, n)?;
    let values = radii
        .par_iter()
        .map(|&r| {
            let mut sup = 0.0f64;
            for x in grid.nodes() {
                let rate_jet = rate_data.jet(r, x)?;
                let jet = data.jet(r, x)?;
                let j = constraint_densities(data, r, x)?.j;
                let v0 = time.eval(r, x).lapse;
                for i in 0..n {
                    let boost = Kid::new(KidLabel::Boost(i), n)?;
                    let center = Kid::new(KidLabel::Center(i), n)?;
                    let vi = boost.eval(r, x).lapse;
                    let res = charge_density(&rate_jet, &boost) - charge_density(&jet, &center) - j * (2.0 * v0 * vi);
                    sup = sup.max(res.dot(x).abs());
                }
            }
            Ok(sup)
        })
        .collect::<Result<Vec<_>, EvolutionError>>()?;
    let pts: Vec<(f64, f64)> = radii.iter().zip(&values).filter(|(_, v)| **v > 0.0).map(|(r, v)| (*r, v.ln())).collect();
    let exponent = (pts.len() >= 2).then(|| -slope(&pts));
    Ok(ProofResidual { radii: radii.to_vec(), values, exponent, expected: 2.0 * data.order() - 1.0 })
}

/// Rates of `Q_T` and `Q_{B_i}` against the linear momenta `Q_{(0,C_i)}`.
/// Failed hypotheses are annotated, not fatal.
pub fn verify_evolution(data: &ChartData, settings: &EvolutionSettings) -> Result<EvolutionReport, EvolutionError> {
    settings.validate()?;
    let n = data.dim();
    let mut warnings = Vec::new();
    let integrability = integrability(data)?;
    if !integrability.satisfied {
        warnings.push(format!(
            "constraint decay below the hypotheses (μ exponent {:?}, J exponent {:?})",
            integrability.mu_exponent, integrability.j_exponent
        ));
    }
    let grid = SphericalGrid::new(n - 1, settings.charges.bandlimit.min(8))?;
    let rate_decay = match data.metric_rate().check_decay(&grid, &settings.charges.ladder, true) {
        Ok(_) => true,
        Err(e) => {
            warnings.push(format!("metric rate: {e}"));
            false
        }
    };
    let time_rate = charge_rate(data, KidLabel::Time, settings)?;
    let boost_rates = (0..n)
        .into_par_iter()
        .map(|i| charge_rate(data, KidLabel::Boost(i), settings))
        .collect::<Result<Vec<_>, _>>()?;
    let targets = (0..n)
        .into_par_iter()
        .map(|i| evaluate_charge(data, KidLabel::Center(i), &settings.charges))
        .collect::<Result<Vec<_>, _>>()?;
    let rows = boost_rates
        .iter()
        .zip(&targets)
        .enumerate()
        .map(|(i, (rate, target))| {
            let deviation = rate.limit().zip(target.limit).map(|(a, b)| (a - b).abs());
            let relative = deviation.zip(target.limit).map(|(d, b)| d / b.abs().max(1e-300));
            let status = if rate.rate.status == Status::Converged && target.status == Status::Converged {
                Status::Converged
            } else {
                Status::Diverged
            };
            EvolutionRow {
                label: KidLabel::Boost(i).to_string(),
                rate: rate.limit(),
                fd_deviation: rate.fd_deviation,
                target: target.limit,
                deviation,
                relative,
                status,
            }
        })
        .collect();
    let residual = proof_residual(data, &settings.residual_radii, settings.residual_bandlimit)?;
    if residual.exponent.is_some_and(|e| e < residual.expected - 0.5) {
        warnings.push(format!("proof residual decays at {:?}, expected {}", residual.exponent, residual.expected));
    }
    for w in &warnings {
        warn!("{}: {w}", data.describe());
    }
    Ok(EvolutionReport {
        description: data.describe(),
        order: data.order(),
        time_rate,
        rows,
        boost_rates,
        residual,
        integrability,
        rate_decay,
        warnings,
    })
}
