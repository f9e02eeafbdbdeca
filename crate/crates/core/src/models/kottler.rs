//! Kottler (Schwarzschild–anti-de Sitter) slices in the hyperbolic polar chart.
//!
//! The metric `dρ²/F(ρ) + ρ² σ` with `F = 1 + ρ² − 2m ρ^{2−n}` is rewritten as
//! `dr² + sh²r h_r` by solving `dρ/dr = √F` with `ρ = sh r + o(e^{r})`. Writing
//! `ρ = sh r + u(r) e^{−(n−1)r}`, the correction `u` obeys an ODE that is stable
//! when integrated inward; it is tabulated with RK4 and interpolated by cubic
//! Hermite polynomials, which keeps evaluation generic over the scalar type.

use super::ModelError;
use crate::scalar::Real;

/// Outer end of the integration; the inward solution forgets its initial value
/// at rate `e^{−n(R₀−r)}`.
const START_RADIUS: f64 = 70.0;
/// Largest radius served from the table.
const MAX_RADIUS: f64 = 55.0;
const STEP: f64 = 1e-3;
/// Integration stops once `F(ρ)` drops below this value near the horizon.
const HORIZON_MARGIN: f64 = 1e-2;

#[derive(Clone, Debug)]
pub struct Kottler {
    n: usize,
    mass: f64,
    r_min: f64,
    u: Vec<f64>,
    du: Vec<f64>,
    aspect_constant: f64,
}

impl Kottler {
    pub fn new(n: usize, mass: f64) -> Result<Self, ModelError> {
        if n < 3 {
            return Err(ModelError::InvalidParameter(format!("dimension {n} < 3")));
        }
        if !(mass > 0.0) || !mass.is_finite() {
            return Err(ModelError::InvalidParameter(format!("Kottler mass {mass} must be positive")));
        }
        let nf = n as f64;
        let rhs = |r: f64, u: f64| -> Option<f64> {
            let e = (-(nf - 1.0) * r).exp();
            let delta = u * e;
            let rho = r.sinh() + delta;
            if rho <= 0.0 {
                return None;
            }
            let pot = 2.0 * mass * rho.powf(2.0 - nf);
            let f = 1.0 + rho * rho - pot;
            if f < HORIZON_MARGIN {
                return None;
            }
            let ch = r.cosh();
            // e^{(n−1)r} δ' with δ' = (2 sh r δ + δ² − 2m ρ^{2−n}) / (√F + ch r)
            let num = 2.0 * r.tanh() * u + u * delta / ch - pot / (ch * e);
            Some((nf - 1.0) * u + num / (f.sqrt() / ch + 1.0))
        };

        let mut r = START_RADIUS;
        let mut u = 0.0;
        let mut us = vec![u];
        let mut dus = vec![rhs(r, u).ok_or_else(|| ModelError::InvalidParameter("mass too large".into()))?];
        loop {
            let step = || -> Option<f64> {
                let h = -STEP;
                let k1 = rhs(r, u)?;
                let k2 = rhs(r + h / 2.0, u + h / 2.0 * k1)?;
                let k3 = rhs(r + h / 2.0, u + h / 2.0 * k2)?;
                let k4 = rhs(r + h, u + h * k3)?;
                let next = u + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
                rhs(r + h, next).map(|_| next)
            };
            match step() {
                Some(next) if r - STEP > STEP => {
                    r -= STEP;
                    u = next;
                    us.push(u);
                    dus.push(rhs(r, u).expect("checked by the step"));
                }
                _ => break,
            }
        }
        us.reverse();
        dus.reverse();
        let mut model = Self { n, mass, r_min: r, u: us, du: dus, aspect_constant: 0.0 };
        // e^{nr} ψ → 4 u(∞); corrections are O(e^{−2r})
        model.aspect_constant = 4.0 * model.correction(40.0f64)?;
        Ok(model)
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn mass(&self) -> f64 {
        self.mass
    }

    /// Smallest radius at which the chart is evaluated.
    pub fn inner_radius(&self) -> f64 {
        self.r_min
    }

    pub fn outer_radius(&self) -> f64 {
        MAX_RADIUS
    }

    /// Numerically determined constant `c` with `𝐦 = c σ`.
    pub fn aspect_constant(&self) -> f64 {
        self.aspect_constant
    }

    /// Closed form `2^{n+1} m / n` of [`Self::aspect_constant`].
    pub fn aspect_constant_exact(&self) -> f64 {
        2f64.powi(self.n as i32 + 1) * self.mass / self.n as f64
    }

    /// Interpolated `u(r)`.
    pub fn correction<S: Real>(&self, r: S) -> Result<S, ModelError> {
        let r0 = r.re();
        if r0 < self.r_min {
            return Err(ModelError::InsideHorizon { r: r0, r_min: self.r_min });
        }
        if r0 > MAX_RADIUS {
            return Err(ModelError::OutsideDomain { r: r0, r_max: MAX_RADIUS });
        }
        let i = (((r0 - self.r_min) / STEP).floor() as usize).min(self.u.len() - 2);
        let t = (r - S::c(self.r_min + i as f64 * STEP)) / S::c(STEP);
        let t2 = t * t;
        let t3 = t2 * t;
        let h00 = S::c(2.0) * t3 - S::c(3.0) * t2 + S::one();
        let h10 = t3 - S::c(2.0) * t2 + t;
        let h01 = S::c(3.0) * t2 - S::c(2.0) * t3;
        let h11 = t3 - t2;
        Ok(h00 * S::c(self.u[i])
            + h10 * S::c(STEP * self.du[i])
            + h01 * S::c(self.u[i + 1])
            + h11 * S::c(STEP * self.du[i + 1]))
    }

    /// `ρ(r)`.
    pub fn areal_radius<S: Real>(&self, r: S) -> Result<S, ModelError> {
        let e = (-S::c(self.n as f64 - 1.0) * r).exp();
        Ok(r.sinh() + self.correction(r)? * e)
    }

    /// `ψ = ρ²/sh²r − 1`, so that `γ = ψ (b − dr²)`.
    pub fn psi<S: Real>(&self, r: S) -> Result<S, ModelError> {
        let u = self.correction(r)?;
        let e2 = (-S::c(2.0) * r).exp();
        let q = S::c(2.0) * u * (-S::c(self.n as f64) * r).exp() / (S::one() - e2);
        Ok(q * (S::c(2.0) + q))
    }

    /// `F(ρ) = 1 + ρ² − 2m ρ^{2−n}`.
    pub fn lapse_squared(&self, rho: f64) -> f64 {
        1.0 + rho * rho - 2.0 * self.mass * rho.powf(2.0 - self.n as f64)
    }

    /// Mean curvature `(n−1)√F(ρ)/ρ` of the symmetric sphere with areal radius `ρ`.
    pub fn sphere_mean_curvature(&self, rho: f64) -> f64 {
        (self.n as f64 - 1.0) * self.lapse_squared(rho).sqrt() / rho
    }

    /// Wang radius `r` with `ρ(r) = rho`, by Newton iteration on the table.
    pub fn radius_of_areal(&self, rho: f64) -> Result<f64, ModelError> {
        let mut r = rho.asinh();
        for _ in 0..50 {
            let f = self.areal_radius(r)? - rho;
            let dr = f / self.lapse_squared(rho).sqrt().max(1e-12);
            r -= dr;
            if dr.abs() < 1e-15 * r.max(1.0) {
                break;
            }
        }
        Ok(r)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Dual;

    #[test]
    fn aspect_constant_matches_closed_form() {
        for (n, m) in [(3, 0.2), (3, 1.0), (4, 0.5), (5, 0.3)] {
            let k = Kottler::new(n, m).unwrap();
            let rel = (k.aspect_constant() / k.aspect_constant_exact() - 1.0).abs();
            assert!(rel < 1e-10, "n={n} m={m}: {rel:e}");
        }
    }

    #[test]
    fn areal_radius_solves_the_radial_ode() {
        let k = Kottler::new(3, 0.5).unwrap();
        for r in [1.5, 3.0, 7.0, 20.0] {
            let x = Dual::<f64, 1>::variable(r, 0);
            let rho = k.areal_radius(x).unwrap();
            let f = k.lapse_squared(rho.re);
            assert!((rho.eps[0] / f.sqrt() - 1.0).abs() < 1e-9, "r={r}");
        }
    }

    #[test]
    fn horizon_is_rejected() {
        let k = Kottler::new(3, 1.0).unwrap();
        assert!(k.inner_radius() > 0.0);
        assert!(matches!(k.psi(k.inner_radius() - 0.01), Err(ModelError::InsideHorizon { .. })));
        assert!(matches!(k.psi(60.0), Err(ModelError::OutsideDomain { .. })));
        assert!(Kottler::new(3, -1.0).is_err());
    }

    #[test]
    fn areal_inverse() {
        let k = Kottler::new(3, 0.7).unwrap();
        let r = k.radius_of_areal(5f64.sinh()).unwrap();
        assert!((k.areal_radius(r).unwrap() - 5f64.sinh()).abs() < 1e-10);
    }
}
