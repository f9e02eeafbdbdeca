//! Extrapolation of radius ladders `Q(R) = Q∞ + c₁e^{−R} + c₂e^{−2R}`.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Converged,
    Diverged,
}

impl std::fmt::Display for Status {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Self::Converged => "converged",
            Self::Diverged => "diverged",
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct LadderFit {
    /// Fitted `Q∞` over the full ladder.
    pub limit: f64,
    /// Spread of the limits fitted on the last three ladder prefixes.
    pub variation: f64,
    /// Decay rate of `|Q(R) − Q∞|`, if resolvable above roundoff.
    pub exponent: Option<f64>,
    pub status: Status,
}

/// Least-squares `Q∞` from three-term fits; exact interpolation for three points.
pub fn extrapolate(radii: &[f64], values: &[f64]) -> Option<f64> {
    let k = radii.len().min(values.len());
    if k < 3 {
        return None;
    }
    let mut a = DMatrix::from_fn(k, 3, |i, j| (-(j as f64) * radii[i]).exp());
    // column equilibration keeps e^{−2R} columns from looking rank deficient
    let scales: Vec<f64> = (0..3).map(|j| a.column(j).norm()).collect();
    for (j, s) in scales.iter().enumerate() {
        a.column_mut(j).unscale_mut(*s);
    }
    let b = DVector::from_column_slice(&values[..k]);
    let x = a.svd(true, true).solve(&b, 1e-14).ok()?;
    let limit = x[0] / scales[0];
    limit.is_finite().then_some(limit)
}

/// Fits a ladder and classifies its convergence with relative tolerance `tol`.
pub fn fit_ladder(radii: &[f64], values: &[f64], tol: f64) -> Option<LadderFit> {
    let k = radii.len();
    if k < 4 || values.len() != k || values.iter().any(|v| !v.is_finite()) {
        return None;
    }
    let limit = extrapolate(radii, values)?;
    let limits: Vec<f64> = ((k - 2).max(3)..=k).filter_map(|m| extrapolate(&radii[..m], &values[..m])).collect();
    let hi = limits.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let lo = limits.iter().cloned().fold(f64::INFINITY, f64::min);
    let variation = hi - lo;
    let scale = limit.abs().max(1.0);
    let status = if limits.len() >= 2 && variation <= tol * scale { Status::Converged } else { Status::Diverged };

    let floor = 1e-12 * scale;
    let pts: Vec<(f64, f64)> = radii
        .iter()
        .zip(values)
        .filter_map(|(&r, &q)| {
            let d = (q - limit).abs();
            (d > floor).then(|| (r, d.ln()))
        })
        .collect();
    let exponent = (pts.len() >= 2).then(|| -slope(&pts));
    Some(LadderFit { limit, variation, exponent, status })
}

/// Least-squares slope of `y` against `x`.
pub fn slope(points: &[(f64, f64)]) -> f64 {
    let k = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / k;
    let my = points.iter().map(|p| p.1).sum::<f64>() / k;
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    sxy / sxx
}
