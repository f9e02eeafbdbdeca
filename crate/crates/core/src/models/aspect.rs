//! Mass aspect tensors on the sphere at infinity.

use num_traits::Float;

use super::ModelError;
use crate::linalg::{Matrix, Vector};
use crate::minkowski::{boost_sphere_action, LorentzTransform};
use crate::scalar::{Dual, Real};
use crate::sphere::{real_harmonics, sh_index};

/// Tensor profile `𝐦̂ = μ(x̊) σ + (P S P)°` on `S^{n−1}` with scalar part
/// `μ = c₀ + c·x̊ + x̊ᵀQx̊ + Σ a_{ℓm} Y_{ℓm}` (harmonic terms for `n = 3` only) and
/// `(·)°` the σ-trace-free part; `tr_σ 𝐦̂ = (n−1) μ`.
#[derive(Clone, Debug, PartialEq)]
pub struct AspectProfile {
    pub n: usize,
    pub constant: f64,
    pub linear: Vector<f64>,
    pub quadratic: Matrix<f64>,
    pub shear: Matrix<f64>,
    pub harmonics: Vec<(usize, i64, f64)>,
}

impl AspectProfile {
    /// `𝐦̂ = c σ`.
    pub fn isotropic(n: usize, c: f64) -> Self {
        Self {
            n,
            constant: c,
            linear: Vector::zeros(n),
            quadratic: Matrix::zeros(n),
            shear: Matrix::zeros(n),
            harmonics: Vec::new(),
        }
    }

    pub fn with_linear(mut self, c: &[f64]) -> Self {
        self.linear = Vector::from_slice(c);
        self
    }

    pub fn with_quadratic(mut self, q: Matrix<f64>) -> Self {
        self.quadratic = q.symmetrize();
        self
    }

    pub fn with_shear(mut self, s: Matrix<f64>) -> Self {
        self.shear = s.symmetrize();
        self
    }

    pub fn with_harmonic(mut self, l: usize, m: i64, a: f64) -> Self {
        self.harmonics.push((l, m, a));
        self
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        if self.n < 3 {
            return Err(ModelError::InvalidParameter(format!("dimension {} < 3", self.n)));
        }
        if self.linear.dim() != self.n || self.quadratic.dim() != self.n || self.shear.dim() != self.n {
            return Err(ModelError::InvalidParameter("profile coefficient dimensions differ from n".into()));
        }
        if !self.harmonics.is_empty() && self.n != 3 {
            return Err(ModelError::InvalidParameter("harmonic terms require n = 3".into()));
        }
        if self.harmonics.iter().any(|&(l, m, _)| m.unsigned_abs() as usize > l) {
            return Err(ModelError::InvalidParameter("harmonic order exceeds degree".into()));
        }
        Ok(())
    }

    /// Scalar part `μ(x̊)`.
    pub fn scalar<S: Real>(&self, dir: &Vector<S>) -> S {
        let lin = self.linear.map(S::c);
        let quad = self.quadratic.map(S::c);
        let mut mu = S::c(self.constant) + lin.dot(dir) + quad.bilinear(dir, dir);
        if let Some(lmax) = self.harmonics.iter().map(|h| h.0).max() {
            let ys = real_harmonics(lmax, dir);
            for &(l, m, a) in &self.harmonics {
                mu = mu + S::c(a) * ys[sh_index(l, m)];
            }
        }
        mu
    }

    /// Tensor `𝐦̂(x̊)` as an ambient matrix supported on the tangent plane.
    pub fn tensor<S: Real>(&self, dir: &Vector<S>) -> Matrix<S> {
        let p = Matrix::identity(self.n) - dir.outer(dir);
        let shear = p * self.shear.map(S::c) * p;
        let tf = shear - p * (shear.trace() / S::c(self.n as f64 - 1.0));
        p * self.scalar(dir) + tf
    }

    /// `tr_σ 𝐦̂ = (n−1) μ`.
    pub fn trace<S: Real>(&self, dir: &Vector<S>) -> S {
        self.scalar(dir) * S::c(self.n as f64 - 1.0)
    }
}

/// Exact mass aspect tensor of a data set, when one is known.
#[derive(Clone, Debug)]
#[allow(clippy::large_enum_variant)]
pub enum MassAspect {
    Zero { n: usize },
    Profile(AspectProfile),
    /// Aspect of data pulled back by the isometry induced by a Lorentz transform:
    /// `𝐦' = u^{n−2} a^*𝐦` with `(a, u)` the boundary action of the transform.
    Boosted { base: Box<MassAspect>, transform: LorentzTransform },
}

impl MassAspect {
    pub fn dim(&self) -> usize {
        match self {
            Self::Zero { n } => *n,
            Self::Profile(p) => p.n,
            Self::Boosted { base, .. } => base.dim(),
        }
    }

    /// `tr_σ 𝐦` at `x̊`.
    pub fn trace(&self, dir: &Vector<f64>) -> f64 {
        match self {
            Self::Zero { .. } => 0.0,
            Self::Profile(p) => p.trace(dir),
            Self::Boosted { base, transform } => {
                let (y, u) = boost_sphere_action(transform, dir);
                u.powi(self.dim() as i32) * base.trace(&y.normalize())
            }
        }
    }

    /// Tensor `𝐦(x̊)` as a tangent-plane matrix.
    pub fn tensor(&self, dir: &Vector<f64>) -> Matrix<f64> {
        match self {
            Self::Zero { n } => Matrix::zeros(*n),
            Self::Profile(p) => p.tensor(dir),
            Self::Boosted { base, transform } => {
                let n = self.dim();
                let (jac, y, u) = boundary_jacobian(transform, dir);
                let m = base.tensor(&y);
                jac.transpose() * m * jac * u.powi(n as i32 - 2)
            }
        }
    }
}

/// Jacobian of `x ↦ a(x/|x|)` at a unit vector, with `a(x̊)` and `u(x̊)`.
pub fn boundary_jacobian(a: &LorentzTransform, dir: &Vector<f64>) -> (Matrix<f64>, Vector<f64>, f64) {
    fn inner<const N: usize>(a: &LorentzTransform, dir: &Vector<f64>) -> (Matrix<f64>, Vector<f64>, f64) {
        let n = dir.dim();
        let x = Vector::from_fn(n, |i| Dual::<f64, N>::variable(dir[i], i));
        let xn = x * x.norm().recip();
        let (y, u) = boost_sphere_action(a, &xn);
        let y = y * y.norm().recip();
        (Matrix::from_fn(n, |i, j| y[i].eps[j]), y.map(|v| v.re), u.re)
    }
    match dir.dim() {
        3 => inner::<3>(a, dir),
        4 => inner::<4>(a, dir),
        5 => inner::<5>(a, dir),
        _ => inner::<6>(a, dir),
    }
}
