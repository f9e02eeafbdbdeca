//! Synthetic second fundamental forms `κ` with prescribed decay.
//!
//! Each family decays like `e^{−q r}` in `b`-norm. The `Momentum` and `Rotation`
//! families are built so that `div_b κ − d tr_b κ` decays two orders faster than
//! `κ` itself, which is what the evolution identity needs of its momentum density.

use super::ModelError;
use crate::linalg::{Matrix, Vector};
use crate::scalar::Real;

#[derive(Clone, Debug, PartialEq)]
pub enum KappaFamily {
    /// `a [e^{−qr}(x̊wᵀ + wx̊ᵀ) + 2 e^{−(q+1)r}(c·x̊) x̊x̊ᵀ]` with `w = (I − x̊x̊ᵀ)c`.
    Momentum { amplitude: f64, c: Vector<f64>, order: f64 },
    /// `a e^{−qr}(x̊wᵀ + wx̊ᵀ)` with `w = W x̊`, `W` antisymmetric.
    Rotation { amplitude: f64, w: Matrix<f64>, order: f64 },
    /// `a e^{−qr} (P S P)°`, tangential and σ-trace-free.
    Tangential { amplitude: f64, s: Matrix<f64>, order: f64 },
    /// `a e^{−qr} (I − x̊x̊ᵀ)`.
    Spherical { amplitude: f64, order: f64 },
}

impl KappaFamily {
    pub fn order(&self) -> f64 {
        match self {
            Self::Momentum { order, .. }
            | Self::Rotation { order, .. }
            | Self::Tangential { order, .. }
            | Self::Spherical { order, .. } => *order,
        }
    }

    pub fn validate(&self, n: usize) -> Result<(), ModelError> {
        let bad = |msg: &str| Err(ModelError::InvalidParameter(msg.into()));
        if !(self.order() > 0.0) {
            return bad("kappa decay order must be positive");
        }
        match self {
            Self::Momentum { c, .. } if c.dim() != n => bad("momentum vector has the wrong dimension"),
            Self::Rotation { w, .. } if w.dim() != n => bad("rotation matrix has the wrong dimension"),
            Self::Rotation { w, .. } if (*w + w.transpose()).max_abs() > 1e-14 => {
                bad("rotation matrix must be antisymmetric")
            }
            Self::Tangential { s, .. } if s.dim() != n => bad("shear matrix has the wrong dimension"),
            _ => Ok(()),
        }
    }

    /// `κ` in the orthonormal frame at `(r, x̊)`.
    pub fn eval<S: Real>(&self, r: S, dir: &Vector<S>) -> Matrix<S> {
        let n = dir.dim();
        let decay = |q: f64| (-S::c(q) * r).exp();
        let p = Matrix::identity(n) - dir.outer(dir);
        let sym = |w: &Vector<S>| dir.outer(w) + w.outer(dir);
        match self {
            Self::Momentum { amplitude, c, order } => {
                let c = c.map(S::c);
                let cx = c.dot(dir);
                let w = p.mul_vec(&c);
                (sym(&w) * decay(*order) + dir.outer(dir) * (S::c(2.0) * cx * decay(order + 1.0)))
                    * S::c(*amplitude)
            }
            Self::Rotation { amplitude, w, order } => {
                let w = w.map(S::c).mul_vec(dir);
                sym(&w) * (S::c(*amplitude) * decay(*order))
            }
            Self::Tangential { amplitude, s, order } => {
                let t = p * s.map(S::c) * p;
                let tf = t - p * (t.trace() / S::c(n as f64 - 1.0));
                tf * (S::c(*amplitude) * decay(*order))
            }
            Self::Spherical { amplitude, order } => p * (S::c(*amplitude) * decay(*order)),
        }
    }
}
