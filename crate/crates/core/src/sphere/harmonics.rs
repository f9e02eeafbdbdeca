//! Real spherical harmonics on `S²`.
//!
//! Convention: `Y_{ℓm}` is orthonormal for `dμ_σ` (so `Y_00 = 1/√(4π)`), carries no
//! Condon–Shortley phase, and for `m ≠ 0`
//!
//! ```text
//! Y_{ℓm}  = √2 N_{ℓ|m|} P_ℓ^{|m|}(cos θ) cos(mφ)   (m > 0)
//! Y_{ℓm}  = √2 N_{ℓ|m|} P_ℓ^{|m|}(cos θ) sin(|m|φ) (m < 0)
//! ```
//!
//! Coefficients are stored at index `ℓ² + ℓ + m`. Harmonics are evaluated through
//! their Cartesian polynomial form `q_{ℓm}(z) · Re/Im (x + i y)^{|m|}`, which is
//! regular at the poles and works for any [`Real`] scalar, including duals.

use num_traits::Float;

use super::{SphereError, SphericalGrid};
use crate::linalg::{Matrix, Vector};
use crate::scalar::{Dual, Real};

/// Index of `(ℓ, m)` in coefficient vectors.
#[inline]
pub fn sh_index(l: usize, m: i64) -> usize {
    ((l * l + l) as i64 + m) as usize
}

/// Inverse of [`sh_index`].
pub fn sh_degree_order(k: usize) -> (usize, i64) {
    let l = (k as f64).sqrt().floor() as usize;
    (l, k as i64 - (l * l + l) as i64)
}

/// Number of coefficients for bandlimit `L`.
pub fn sh_count(bandlimit: usize) -> usize {
    (bandlimit + 1) * (bandlimit + 1)
}

/// All real harmonics up to degree `bandlimit` at a unit vector `x`.
pub fn real_harmonics<S: Real>(bandlimit: usize, x: &Vector<S>) -> Vec<S> {
    let mut out = vec![S::zero(); sh_count(bandlimit)];
    let z = x[2];
    let sqrt2 = S::SQRT_2();
    // (x + i y)^m
    let (mut re, mut im) = (S::one(), S::zero());
    let mut qmm = (S::c(4.0) * S::PI()).sqrt().recip();
    for m in 0..=bandlimit {
        if m > 0 {
            let mf = m as f64;
            qmm = qmm * S::c(((2.0 * mf + 1.0) / (2.0 * mf)).sqrt());
            let nre = re * x[0] - im * x[1];
            im = re * x[1] + im * x[0];
            re = nre;
        }
        let mut q_prev = S::zero();
        let mut q = qmm;
        for l in m..=bandlimit {
            if l == m + 1 {
                q_prev = q;
                q = z * S::c((2.0 * m as f64 + 3.0).sqrt()) * qmm;
            } else if l > m + 1 {
                let (lf, mf) = (l as f64, m as f64);
                let a = ((4.0 * lf * lf - 1.0) / (lf * lf - mf * mf)).sqrt();
                let b = ((2.0 * lf + 1.0) * ((lf - 1.0).powi(2) - mf * mf)
                    / ((2.0 * lf - 3.0) * (lf * lf - mf * mf)))
                    .sqrt();
                let next = S::c(a) * z * q - S::c(b) * q_prev;
                q_prev = q;
                q = next;
            }
            if m == 0 {
                out[sh_index(l, 0)] = q;
            } else {
                out[sh_index(l, m as i64)] = sqrt2 * q * re;
                out[sh_index(l, -(m as i64))] = sqrt2 * q * im;
            }
        }
    }
    out
}

/// Values of every harmonic at the nodes of a grid, with optional derivative tables.
///
/// The derivative tables describe the degree-0 homogeneous extension `Ŷ(x) = Y(x/|x|)`:
/// `gradient` is the tangential gradient `∇Y` (an ambient vector orthogonal to `x̊`)
/// and `gradient_jacobian[j][k] = ∂_k G_j` where `G(x) = |x| ∇Ŷ(x)` is the degree-0
/// extension of `∇Y`.
#[derive(Clone, Debug)]
pub struct HarmonicBasis {
    bandlimit: usize,
    grid: SphericalGrid,
    values: Vec<Vec<f64>>,
    gradients: Option<Vec<Vec<Vector<f64>>>>,
    jacobians: Option<Vec<Vec<Matrix<f64>>>>,
}

impl HarmonicBasis {
    /// Tabulates harmonics up to `bandlimit` on `grid` (which must be on `S²`).
    pub fn new(grid: &SphericalGrid, bandlimit: usize) -> Result<Self, SphereError> {
        if grid.dimension() != 2 {
            return Err(SphereError::SpectralUnavailable { dimension: grid.dimension() });
        }
        if bandlimit > grid.bandlimit() {
            return Err(SphereError::TooManyCoefficients {
                given: sh_count(bandlimit),
                max: sh_count(grid.bandlimit()),
            });
        }
        let values = grid.nodes().iter().map(|x| real_harmonics(bandlimit, x)).collect();
        Ok(Self { bandlimit, grid: grid.clone(), values, gradients: None, jacobians: None })
    }

    /// Adds gradient and gradient-Jacobian tables.
    pub fn with_derivatives(mut self) -> Self {
        type D1 = Dual<f64, 3>;
        type D2 = Dual<D1, 3>;
        let mut grads = Vec::with_capacity(self.grid.len());
        let mut jacs = Vec::with_capacity(self.grid.len());
        for x0 in self.grid.nodes() {
            let x = Vector::from_fn(3, |i| {
                let mut outer = [D1::constant(0.0); 3];
                outer[i] = D1::constant(1.0);
                D2::seeded(D1::variable(x0[i], i), outer)
            });
            let xn = x * x.norm().recip();
            let ys = real_harmonics(self.bandlimit, &xn);
            let mut g = Vec::with_capacity(ys.len());
            let mut jm = Vec::with_capacity(ys.len());
            for y in ys {
                let grad = Vector::from_fn(3, |j| y.re.eps[j]);
                let jac = Matrix::from_fn(3, |j, k| x0[k] * grad[j] + y.eps[k].eps[j]);
                g.push(grad);
                jm.push(jac);
            }
            grads.push(g);
            jacs.push(jm);
        }
        self.gradients = Some(grads);
        self.jacobians = Some(jacs);
        self
    }

    pub fn bandlimit(&self) -> usize {
        self.bandlimit
    }

    pub fn grid(&self) -> &SphericalGrid {
        &self.grid
    }

    pub fn count(&self) -> usize {
        sh_count(self.bandlimit)
    }

    /// Harmonic values at node `i`.
    pub fn values_at(&self, i: usize) -> &[f64] {
        &self.values[i]
    }

    /// Tangential gradients of the harmonics at node `i`.
    pub fn gradients_at(&self, i: usize) -> &[Vector<f64>] {
        &self.gradients.as_ref().expect("basis built without derivative tables")[i]
    }

    /// Gradient Jacobians of the harmonics at node `i`.
    pub fn jacobians_at(&self, i: usize) -> &[Matrix<f64>] {
        &self.jacobians.as_ref().expect("basis built without derivative tables")[i]
    }

    /// Coefficients `c_k = ∫ f Y_k dμ_σ`.
    pub fn analysis(&self, values: &[f64]) -> Result<Vec<f64>, SphereError> {
        if values.len() != self.grid.len() {
            return Err(SphereError::Mismatch { expected: self.grid.len(), found: values.len() });
        }
        let mut c = vec![0.0; self.count()];
        for ((ys, w), f) in self.values.iter().zip(self.grid.weights()).zip(values) {
            let wf = w * f;
            for (ck, y) in c.iter_mut().zip(ys) {
                *ck += wf * y;
            }
        }
        Ok(c)
    }

    /// Nodal values of `Σ c_k Y_k`; shorter coefficient lists are zero-padded.
    pub fn synthesis(&self, coeffs: &[f64]) -> Result<Vec<f64>, SphereError> {
        if coeffs.len() > self.count() {
            return Err(SphereError::TooManyCoefficients { given: coeffs.len(), max: self.count() });
        }
        Ok(self.values.iter().map(|ys| ys.iter().zip(coeffs).map(|(y, c)| y * c).sum()).collect())
    }

    /// Value, tangential gradient and gradient Jacobian of `Σ c_k Y_k` at node `i`.
    pub fn jet(&self, coeffs: &[f64], i: usize) -> (f64, Vector<f64>, Matrix<f64>) {
        let grads = self.gradients.as_ref().expect("basis built without derivative tables");
        let jacs = self.jacobians.as_ref().expect("basis built without derivative tables");
        let mut v = 0.0;
        let mut g = Vector::zeros(3);
        let mut jm = Matrix::zeros(3);
        for (k, &c) in coeffs.iter().enumerate() {
            if c == 0.0 {
                continue;
            }
            v += c * self.values[i][k];
            g += grads[i][k] * c;
            jm += jacs[i][k] * c;
        }
        (v, g, jm)
    }

    pub fn has_derivatives(&self) -> bool {
        self.gradients.is_some()
    }
}
