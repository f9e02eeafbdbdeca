//! Killing initial data `(V, Y)` of anti-de Sitter space on `(Hⁿ, b)`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::ChargeError;
use crate::linalg::Vector;
use crate::scalar::Real;

/// Label of a KID; indices are zero based, printed one based.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum KidLabel {
    /// `V₍₀₎ = ch r`.
    Time,
    /// `V₍ᵢ₎ = x̊ⁱ sh r`.
    Boost(usize),
    /// `C₍ᵢ₎ = V₍ᵢ₎∇V₍₀₎ − V₍₀₎∇V₍ᵢ₎`.
    Center(usize),
    /// `Ω₍ᵢ₎₍ⱼ₎ = sh r (x̊ⁱ E_j − x̊ʲ E_i)`, `i < j`.
    Rotation(usize, usize),
}

impl KidLabel {
    /// `T`, `B_i`, `C_i` and `Ω_ij` for `i < j`, in that order.
    pub fn all(n: usize) -> Vec<Self> {
        let mut v = vec![Self::Time];
        v.extend((0..n).map(Self::Boost));
        v.extend((0..n).map(Self::Center));
        for i in 0..n {
            v.extend((i + 1..n).map(|j| Self::Rotation(i, j)));
        }
        v
    }

    pub fn validate(self, n: usize) -> Result<Self, ChargeError> {
        let ok = match self {
            Self::Time => true,
            Self::Boost(i) | Self::Center(i) => i < n,
            Self::Rotation(i, j) => i < j && j < n,
        };
        if ok {
            Ok(self)
        } else {
            Err(ChargeError::InvalidKid(format!("{self} in dimension {n}")))
        }
    }
}

impl fmt::Display for KidLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Time => write!(f, "T"),
            Self::Boost(i) => write!(f, "B{}", i + 1),
            Self::Center(i) => write!(f, "C{}", i + 1),
            Self::Rotation(i, j) => write!(f, "O{}{}", i + 1, j + 1),
        }
    }
}

impl FromStr for KidLabel {
    type Err = ChargeError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || ChargeError::InvalidKid(s.to_string());
        let digit = |c: char| c.to_digit(10).filter(|&d| d >= 1).map(|d| d as usize - 1).ok_or_else(bad);
        let mut chars = s.trim().chars();
        let head = chars.next().ok_or_else(bad)?;
        let rest: Vec<char> = chars.collect();
        match (head, rest.as_slice()) {
            ('T', []) => Ok(Self::Time),
            ('B', [i]) => Ok(Self::Boost(digit(*i)?)),
            ('C', [i]) => Ok(Self::Center(digit(*i)?)),
            ('O' | 'Ω', [i, j]) => Ok(Self::Rotation(digit(*i)?, digit(*j)?)),
            _ => Err(bad()),
        }
    }
}

/// A KID in dimension `n`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Kid {
    pub label: KidLabel,
    pub n: usize,
}

/// Lapse, its gradient and the shift at a point, in the frame.
#[derive(Clone, Copy, Debug)]
pub struct KidValue<S> {
    pub lapse: S,
    pub grad: Vector<S>,
    pub shift: Vector<S>,
}

impl Kid {
    pub fn new(label: KidLabel, n: usize) -> Result<Self, ChargeError> {
        Ok(Self { label: label.validate(n)?, n })
    }

    /// `(V, ∇V, Y)` at `(r, x̊)`.
    pub fn eval<S: Real>(&self, r: S, dir: &Vector<S>) -> KidValue<S> {
        let n = self.n;
        let zero = Vector::zeros(n);
        let (sh, ch) = (r.sinh(), r.cosh());
        match self.label {
            KidLabel::Time => KidValue { lapse: ch, grad: *dir * sh, shift: zero },
            KidLabel::Boost(i) => {
                let x = dir[i];
                let grad = *dir * (x * ch) + Vector::basis(n, i) - *dir * x;
                KidValue { lapse: x * sh, grad, shift: zero }
            }
            KidLabel::Center(i) => {
                let shift = *dir * (dir[i] * (ch - S::one())) - Vector::basis(n, i) * ch;
                KidValue { lapse: S::zero(), grad: zero, shift }
            }
            KidLabel::Rotation(i, j) => {
                let shift = (Vector::basis(n, j) * dir[i] - Vector::basis(n, i) * dir[j]) * sh;
                KidValue { lapse: S::zero(), grad: zero, shift }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frame::{ball_to_polar, ball_vector_to_frame, connection, seed};
    use crate::linalg::Matrix;

    #[test]
    fn labels_round_trip() {
        for l in KidLabel::all(4) {
            assert_eq!(l.to_string().parse::<KidLabel>().unwrap(), l);
        }
        assert_eq!(KidLabel::all(3).len(), 10);
        assert!("B0".parse::<KidLabel>().is_err());
        assert!(Kid::new(KidLabel::Rotation(2, 1), 3).is_err());
        assert!(Kid::new(KidLabel::Boost(3), 3).is_err());
    }

    #[test]
    fn ball_forms() {
        let y = Vector::from_slice(&[0.3f64, -0.2, 0.45]);
        let s = y.norm_squared();
        let (r, dir) = ball_to_polar(&y);
        let t = Kid::new(KidLabel::Time, 3).unwrap().eval(r, &dir);
        assert!((t.lapse - (1.0 + s) / (1.0 - s)).abs() < 1e-12);
        for i in 0..3 {
            let b = Kid::new(KidLabel::Boost(i), 3).unwrap().eval(r, &dir);
            assert!((b.lapse - 2.0 * y[i] / (1.0 - s)).abs() < 1e-12);
            let c = Kid::new(KidLabel::Center(i), 3).unwrap().eval(r, &dir);
            let ball = y * y[i] - Vector::basis(3, i) * ((1.0 + s) / 2.0);
            assert!((c.shift - ball_vector_to_frame(&y, &ball)).max_abs() < 1e-12);
        }
        let o = Kid::new(KidLabel::Rotation(0, 2), 3).unwrap().eval(r, &dir);
        let ball = Vector::basis(3, 2) * y[0] - Vector::basis(3, 0) * y[2];
        assert!((o.shift - ball_vector_to_frame(&y, &ball)).max_abs() < 1e-12);
    }

    #[test]
    fn center_at_origin() {
        let dir = Vector::from_slice(&[0.0, 0.6, 0.8]);
        let c = Kid::new(KidLabel::Center(0), 3).unwrap().eval(0.0, &dir);
        // −½ ∂_{y¹} has frame image −e₁
        assert!((c.shift + Vector::basis(3, 0)).max_abs() < 1e-15);
    }

    #[test]
    fn center_identity() {
        let dir = Vector::from_slice(&[0.48, -0.6, 0.64]);
        for r in [0.2f64, 1.0, 4.0] {
            let t = Kid::new(KidLabel::Time, 3).unwrap().eval(r, &dir);
            for i in 0..3 {
                let b = Kid::new(KidLabel::Boost(i), 3).unwrap().eval(r, &dir);
                let c = Kid::new(KidLabel::Center(i), 3).unwrap().eval(r, &dir);
                let lhs = t.grad * b.lapse - b.grad * t.lapse;
                assert!((lhs - c.shift).max_abs() < 1e-12 * r.cosh());
            }
        }
    }

    /// Static potentials satisfy `∇²V = V b` and shifts are Killing.
    #[test]
    fn kid_equations() {
        let n = 4;
        let dir = Vector::from_slice(&[0.1, -0.5, 0.7, 0.5]).normalize();
        let r = 1.3;
        let (rd, xd) = seed::<4>(r, &dir);
        for label in KidLabel::all(n) {
            let kid = Kid::new(label, n).unwrap();
            let v = kid.eval(rd, &xd);
            // ∇_k W = D_k W + Ω_k W for a vector field W
            let nabla = |w: &Vector<crate::scalar::Dual<f64, 4>>| {
                Matrix::from_fn(n, |k, a| {
                    let om = connection(r, &dir, &Vector::basis(n, k));
                    w[a].eps[k] + om.row(a).dot(&w.map(|x| x.re))
                })
            };
            let hess = nabla(&v.grad);
            let val = kid.eval(r, &dir);
            assert!((hess - Matrix::identity(n) * val.lapse).max_abs() < 1e-12, "{label}");
            assert!((val.grad - v.grad.map(|x| x.re)).max_abs() < 1e-12);
            let dlapse = Vector::from_fn(n, |k| v.lapse.eps[k]);
            assert!((dlapse - val.grad).max_abs() < 1e-12, "{label}");
            let dy = nabla(&v.shift);
            assert!((dy + dy.transpose()).max_abs() < 1e-12, "{label}");
        }
    }
}
