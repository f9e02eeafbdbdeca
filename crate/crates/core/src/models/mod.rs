//! Asymptotically hyperbolic initial data `(γ, κ)` in the hyperbolic polar chart.
//!
//! Every model evaluates `γ = g − b` and `κ` as symmetric matrices in the
//! orthonormal frame of [`crate::frame`]. Evaluation is generic over [`Real`], so
//! first derivatives come from a single dual-number pass.

mod aspect;
mod boost;
mod constraints;
mod kappa;
mod kottler;

use std::sync::Arc;

use log::warn;
use thiserror::Error;

pub use aspect::{boundary_jacobian, AspectProfile, MassAspect};
pub use boost::transport;
pub use constraints::{constraint_densities, momentum_density_b, ConstraintDensities};
pub use kappa::KappaFamily;
pub use kottler::Kottler;

use crate::frame::{seed, TensorJet};
use crate::linalg::{Matrix, Vector, MAX_DIM};
use crate::minkowski::{LorentzTransform, MinkowskiError};
use crate::scalar::Real;
use crate::sphere::{SphereError, SphericalGrid};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ModelError {
    #[error("radius {r} lies inside the horizon region (chart starts at r = {r_min})")]
    InsideHorizon { r: f64, r_min: f64 },
    #[error("radius {r} lies beyond the tabulated chart (r ≤ {r_max})")]
    OutsideDomain { r: f64, r_max: f64 },
    #[error("metric is not positive definite at r = {r}")]
    IndefiniteMetric { r: f64 },
    #[error("{field} violates its decay contract: e^(τR)|·| grows from {first:.3e} to {last:.3e}")]
    DecayViolation { field: &'static str, first: f64, last: f64 },
    #[error("invalid model parameter: {0}")]
    InvalidParameter(String),
    #[error(transparent)]
    Sphere(#[from] SphereError),
    #[error(transparent)]
    Minkowski(#[from] MinkowskiError),
}

#[derive(Clone, Debug)]
#[allow(clippy::large_enum_variant)]
enum Kind {
    Hyperbolic,
    Kottler(Arc<Kottler>),
    Perturbed { profile: AspectProfile, remainder: f64 },
    WithKappa { base: Box<ChartData>, kappa: KappaFamily },
    Boosted { base: Box<ChartData>, transform: LorentzTransform },
    Rate { base: Box<ChartData> },
    Shifted { base: Box<ChartData>, step: f64 },
}

/// An initial data set `(g, k)` near infinity, `g = b + γ`, `k = κ`.
#[derive(Clone, Debug)]
pub struct ChartData {
    n: usize,
    tau: f64,
    kind: Kind,
    aspect: Option<MassAspect>,
    riemannian: bool,
}

/// `γ` and `κ` with their frame derivatives at a point.
#[derive(Clone, Debug)]
pub struct FieldJet {
    pub r: f64,
    pub dir: Vector<f64>,
    pub gamma: TensorJet,
    pub kappa: TensorJet,
}

/// Sampled decay of `e^{τR} sup|γ|_b` and `e^{τR} sup|κ|_b`.
#[derive(Clone, Debug, PartialEq)]
pub struct DecaySample {
    pub radius: f64,
    pub gamma: f64,
    pub kappa: f64,
}

fn check_dim(n: usize) -> Result<(), ModelError> {
    if n < 3 || n + 1 > MAX_DIM {
        return Err(ModelError::InvalidParameter(format!("dimension {n} outside 3..={}", MAX_DIM - 1)));
    }
    Ok(())
}

impl ChartData {
    /// `(Hⁿ, b, 0)`.
    pub fn hyperbolic(n: usize) -> Result<Self, ModelError> {
        check_dim(n)?;
        Ok(Self { n, tau: n as f64, kind: Kind::Hyperbolic, aspect: Some(MassAspect::Zero { n }), riemannian: true })
    }

    /// Kottler slice of mass parameter `m`.
    pub fn kottler(n: usize, mass: f64) -> Result<Self, ModelError> {
        check_dim(n)?;
        let k = Kottler::new(n, mass)?;
        let aspect = MassAspect::Profile(AspectProfile::isotropic(n, k.aspect_constant()));
        Ok(Self { n, tau: n as f64, kind: Kind::Kottler(Arc::new(k)), aspect: Some(aspect), riemannian: true })
    }

    /// `g = dr² + sh²r (σ + 𝐦 e^{−nr} + s 𝐦 e^{−(n+1)r})` for the profile `𝐦`.
    pub fn perturbed(profile: AspectProfile, remainder: f64) -> Result<Self, ModelError> {
        profile.validate()?;
        let n = profile.n;
        check_dim(n)?;
        Ok(Self {
            n,
            tau: n as f64,
            aspect: Some(MassAspect::Profile(profile.clone())),
            kind: Kind::Perturbed { profile, remainder },
            riemannian: true,
        })
    }

    /// Adds a synthetic `κ`; the order becomes `min(τ, q − 1)` so that `k = O(e^{−(τ+1)r})`.
    pub fn with_kappa(self, kappa: KappaFamily) -> Result<Self, ModelError> {
        kappa.validate(self.n)?;
        let tau = self.tau.min(kappa.order() - 1.0);
        if !(tau > 0.0) {
            return Err(ModelError::InvalidParameter("kappa decays too slowly for a positive order".into()));
        }
        Ok(Self {
            n: self.n,
            tau,
            aspect: self.aspect.clone(),
            riemannian: false,
            kind: Kind::WithKappa { base: Box::new(self), kappa },
        })
    }

    /// Pullback of the data by `â = I⁻¹ ∘ A ∘ I`.
    pub fn boosted(self, transform: LorentzTransform) -> Result<Self, ModelError> {
        if transform.dim() != self.n {
            return Err(ModelError::Minkowski(MinkowskiError::Dimension { expected: self.n, found: transform.dim() }));
        }
        Ok(Self {
            n: self.n,
            tau: self.tau,
            aspect: self.aspect.clone().map(|a| MassAspect::Boosted { base: Box::new(a), transform }),
            riemannian: self.riemannian,
            kind: Kind::Boosted { base: Box::new(self), transform },
        })
    }

    /// Data `(ġ, 0)` with `ġ = 2 V₍₀₎ κ = 2 ch r κ`, the metric velocity under unit lapse
    /// `V₍₀₎` and zero shift.
    pub fn metric_rate(&self) -> Self {
        Self {
            n: self.n,
            tau: self.tau,
            aspect: None,
            riemannian: true,
            kind: Kind::Rate { base: Box::new(self.clone()) },
        }
    }

    /// Data `(γ + t ġ, κ)`.
    pub fn shifted(&self, step: f64) -> Self {
        Self {
            n: self.n,
            tau: self.tau,
            aspect: None,
            riemannian: self.riemannian,
            kind: Kind::Shifted { base: Box::new(self.clone()), step },
        }
    }

    /// Replaces the declared decay order.
    pub fn with_order(mut self, tau: f64) -> Self {
        self.tau = tau;
        self
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    /// Decay order `τ`.
    pub fn order(&self) -> f64 {
        self.tau
    }

    pub fn is_riemannian(&self) -> bool {
        self.riemannian
    }

    pub fn mass_aspect(&self) -> Option<&MassAspect> {
        self.aspect.as_ref()
    }

    /// Smallest radius that is safe to evaluate for every direction.
    pub fn inner_radius(&self) -> f64 {
        match &self.kind {
            Kind::Hyperbolic | Kind::Perturbed { .. } => 0.0,
            Kind::Kottler(k) => k.inner_radius(),
            Kind::WithKappa { base, .. } | Kind::Rate { base } | Kind::Shifted { base, .. } => base.inner_radius(),
            Kind::Boosted { base, transform } => base.inner_radius() + transform.matrix()[(0, 0)].acosh(),
        }
    }

    /// Largest radius that is safe to evaluate for every direction.
    pub fn outer_radius(&self) -> f64 {
        match &self.kind {
            Kind::Kottler(k) => k.outer_radius(),
            Kind::Hyperbolic | Kind::Perturbed { .. } => 300.0,
            Kind::WithKappa { base, .. } | Kind::Rate { base } | Kind::Shifted { base, .. } => base.outer_radius(),
            Kind::Boosted { base, transform } => base.outer_radius() - transform.matrix()[(0, 0)].acosh(),
        }
    }

    /// Short description of the model tree.
    pub fn describe(&self) -> String {
        match &self.kind {
            Kind::Hyperbolic => format!("hyperbolic(n={})", self.n),
            Kind::Kottler(k) => format!("kottler(n={}, m={})", self.n, k.mass()),
            Kind::Perturbed { .. } => format!("perturbed(n={})", self.n),
            Kind::WithKappa { base, .. } => format!("{} + kappa", base.describe()),
            Kind::Boosted { base, .. } => format!("boosted({})", base.describe()),
            Kind::Rate { base } => format!("rate({})", base.describe()),
            Kind::Shifted { base, step } => format!("shifted({}, {step:e})", base.describe()),
        }
    }

    /// `(γ, κ)` in the frame at `(r, x̊)`.
    pub fn eval<S: Real>(&self, r: S, dir: &Vector<S>) -> Result<(Matrix<S>, Matrix<S>), ModelError> {
        let n = self.n;
        match &self.kind {
            Kind::Hyperbolic => Ok((Matrix::zeros(n), Matrix::zeros(n))),
            Kind::Kottler(k) => {
                let p = Matrix::identity(n) - dir.outer(dir);
                Ok((p * k.psi(r)?, Matrix::zeros(n)))
            }
            Kind::Perturbed { profile, remainder } => {
                let e = (-S::c(n as f64) * r).exp();
                let scale = e * (S::one() + S::c(*remainder) * (-r).exp());
                Ok((profile.tensor(dir) * scale, Matrix::zeros(n)))
            }
            Kind::WithKappa { base, kappa } => {
                let (g, k) = base.eval(r, dir)?;
                Ok((g, k + kappa.eval(r, dir)))
            }
            Kind::Boosted { base, transform } => {
                let (r2, dir2, o) = transport(transform, r, dir);
                let (g, k) = base.eval(r2, &dir2)?;
                let ot = o.transpose();
                Ok(((ot * g * o).symmetrize(), (ot * k * o).symmetrize()))
            }
            Kind::Rate { base } => {
                let (_, k) = base.eval(r, dir)?;
                Ok((k * (S::c(2.0) * r.cosh()), Matrix::zeros(n)))
            }
            Kind::Shifted { base, step } => {
                let (g, k) = base.eval(r, dir)?;
                Ok((g + k * (S::c(2.0 * step) * r.cosh()), k))
            }
        }
    }

    /// Values of `(γ, κ)` with a positivity check on `g = b + γ`.
    pub fn value(&self, r: f64, dir: &Vector<f64>) -> Result<(Matrix<f64>, Matrix<f64>), ModelError> {
        let (g, k) = self.eval(r, dir)?;
        self.check_positive(r, &g)?;
        Ok((g, k))
    }

    fn check_positive(&self, r: f64, gamma: &Matrix<f64>) -> Result<(), ModelError> {
        if self.riemannian_rate() {
            return Ok(());
        }
        let g = Matrix::identity(self.n) + *gamma;
        // leading principal minors
        for k in 1..=self.n {
            let minor = Matrix::from_fn(k, |i, j| g[(i, j)]);
            if !(minor.determinant() > 0.0) {
                return Err(ModelError::IndefiniteMetric { r });
            }
        }
        Ok(())
    }

    /// Rate data carry a velocity, not a metric perturbation, so no positivity applies.
    fn riemannian_rate(&self) -> bool {
        matches!(self.kind, Kind::Rate { .. })
    }

    /// `γ`, `κ` and their frame derivatives `D_k` at `(r, x̊)`, `r > 0`.
    pub fn jet(&self, r: f64, dir: &Vector<f64>) -> Result<FieldJet, ModelError> {
        fn inner<const N: usize>(d: &ChartData, r: f64, dir: &Vector<f64>) -> Result<FieldJet, ModelError> {
            let (rd, xd) = seed::<N>(r, dir);
            let (g, k) = d.eval(rd, &xd)?;
            let gamma = TensorJet::from_dual(&g);
            d.check_positive(r, &gamma.value)?;
            Ok(FieldJet { r, dir: *dir, gamma, kappa: TensorJet::from_dual(&k) })
        }
        match self.n {
            3 => inner::<3>(self, r, dir),
            4 => inner::<4>(self, r, dir),
            5 => inner::<5>(self, r, dir),
            _ => inner::<6>(self, r, dir),
        }
    }

    /// `e^{τR} sup_{S_R} |γ|_b` and `e^{τR} sup_{S_R} |κ|_b` along a radius ladder.
    pub fn decay_ladder(&self, grid: &SphericalGrid, radii: &[f64]) -> Result<Vec<DecaySample>, ModelError> {
        radii
            .iter()
            .map(|&radius| {
                let scale = (self.tau * radius).exp();
                let mut sample = DecaySample { radius, gamma: 0.0, kappa: 0.0 };
                for x in grid.nodes() {
                    let (g, k) = self.value(radius, x)?;
                    sample.gamma = sample.gamma.max(scale * g.norm());
                    sample.kappa = sample.kappa.max(scale * k.norm());
                }
                Ok(sample)
            })
            .collect()
    }

    /// Checks that the decay ladder is non-increasing up to a factor 2. Violations
    /// are logged, or returned as errors when `strict` is set.
    pub fn check_decay(&self, grid: &SphericalGrid, radii: &[f64], strict: bool) -> Result<Vec<DecaySample>, ModelError> {
        let samples = self.decay_ladder(grid, radii)?;
        for (field, values) in [
            ("gamma", samples.iter().map(|s| s.gamma).collect::<Vec<_>>()),
            ("kappa", samples.iter().map(|s| s.kappa).collect::<Vec<_>>()),
        ] {
            if let Some(err) = growth_violation(field, &values) {
                if strict {
                    return Err(err);
                }
                warn!("{}: {err}", self.describe());
            }
        }
        Ok(samples)
    }
}

/// Reports growth by more than a factor 2 over any earlier ladder value.
fn growth_violation(field: &'static str, values: &[f64]) -> Option<ModelError> {
    let floor = 1e-13 * values.iter().cloned().fold(0.0, f64::max);
    let mut min_seen = f64::INFINITY;
    for &v in values {
        if v > 2.0 * min_seen && v > floor {
            return Some(ModelError::DecayViolation { field, first: values[0], last: v });
        }
        min_seen = min_seen.min(v.max(floor));
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn growth_detection() {
        assert!(growth_violation("gamma", &[1.0, 0.9, 1.5, 1.2]).is_none());
        assert!(growth_violation("gamma", &[1.0, 0.4, 0.9]).is_some());
        assert!(growth_violation("gamma", &[0.0, 0.0, 0.0]).is_none());
    }

    #[test]
    fn boost_composition_agrees_pointwise() {
        let base = ChartData::kottler(3, 0.5).unwrap();
        let a = LorentzTransform::boost(0.3, &Vector::from_slice(&[1.0, 0.0, 0.0]));
        let b = LorentzTransform::boost(0.2, &Vector::from_slice(&[0.0, 1.0, 1.0]))
            .compose(&LorentzTransform::plane_rotation(3, 0, 1, 0.7));
        let twice = base.clone().boosted(a).unwrap().boosted(b).unwrap();
        // pullback by â then b̂ equals pullback by (A∘B)^
        let once = base.boosted(a.compose(&b)).unwrap();
        let dir = Vector::from_slice(&[0.36, -0.48, 0.8]);
        for r in [3.0, 6.0, 9.0] {
            let (g1, _) = twice.value(r, &dir).unwrap();
            let (g2, _) = once.value(r, &dir).unwrap();
            let scale = (3.0 * r).exp();
            assert!((g1 - g2).max_abs() * scale < 1e-10, "r={r}");
        }
    }

    #[test]
    fn identity_boost_is_pointwise_identity() {
        let base = ChartData::kottler(3, 1.0).unwrap();
        let boosted = base.clone().boosted(LorentzTransform::identity(3)).unwrap();
        let dir = Vector::from_slice(&[0.6, 0.0, 0.8]);
        let (g1, _) = base.value(4.0, &dir).unwrap();
        let (g2, _) = boosted.value(4.0, &dir).unwrap();
        assert!((g1 - g2).max_abs() < 1e-18);
    }

    #[test]
    fn indefinite_metric_is_reported() {
        let d = ChartData::perturbed(AspectProfile::isotropic(3, -50.0), 0.0).unwrap();
        let dir = Vector::from_slice(&[1.0, 0.0, 0.0]);
        assert!(matches!(d.value(0.5, &dir), Err(ModelError::IndefiniteMetric { .. })));
        assert!(d.value(3.0, &dir).is_ok());
    }
}
