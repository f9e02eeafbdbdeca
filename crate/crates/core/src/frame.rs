//! Background calculus of `(Hⁿ, b)` in an orthonormal frame.
//!
//! A tangent vector at `(r, x̊)` is identified with an ambient vector of `ℝⁿ` by
//! `∂_r ↦ x̊` and `(sh r)⁻¹ t ↦ t` for `t ⊥ x̊`; `b` becomes the Euclidean inner
//! product and symmetric 2-tensors become symmetric `n × n` matrices. The frame
//! fields `E_k = x̊_k ∂_r + (sh r)⁻¹(e_k − x̊_k x̊)` are orthonormal, their
//! derivatives are written `D_k`, and the Levi-Civita connection reads
//!
//! ```text
//! ∇_k M = D_k M + Ω_k M − M Ω_k,   Ω_k = tanh(r/2) (e_k x̊ᵀ − x̊ e_kᵀ).
//! ```
//!
//! Nothing here grows with `r`, so the representation stays well scaled far out.

use num_traits::Float;

use crate::linalg::{Matrix, Vector};
use crate::scalar::{Dual, Real};

/// Connection matrix `Ω(ξ) = tanh(r/2)(ξ x̊ᵀ − x̊ ξᵀ)`.
pub fn connection<S: Real>(r: S, dir: &Vector<S>, xi: &Vector<S>) -> Matrix<S> {
    let t = (r * S::c(0.5)).tanh();
    (xi.outer(dir) - dir.outer(xi)) * t
}

/// Point `(r, x̊)` promoted to duals whose `k`-th infinitesimal is the derivative
/// along `E_k`. Requires `r > 0`.
pub fn seed<const N: usize>(r: f64, dir: &Vector<f64>) -> (Dual<f64, N>, Vector<Dual<f64, N>>) {
    seed_with(r, dir)
}

/// [`seed`] over an arbitrary scalar, so that `r` and `x̊` may carry further derivatives.
pub fn seed_with<S: Real, const N: usize>(r: S, dir: &Vector<S>) -> (Dual<S, N>, Vector<Dual<S, N>>) {
    let n = dir.dim();
    debug_assert!(n <= N);
    let inv_sh = r.sinh().recip();
    let mut r_seed = [S::zero(); N];
    r_seed[..n].copy_from_slice(dir.as_slice());
    let rd = Dual::seeded(r, r_seed);
    let x = Vector::from_fn(n, |i| {
        let mut e = [S::zero(); N];
        e[i] = inv_sh;
        Dual::seeded(dir[i], e)
    });
    let xd = x * x.norm().recip();
    (rd, xd)
}

/// Value and frame derivatives `D_k` of a scalar.
#[derive(Clone, Copy, Debug)]
pub struct ScalarJet {
    pub value: f64,
    pub grad: Vector<f64>,
}

/// Value and frame derivatives `D_k M` of a symmetric tensor.
#[derive(Clone, Debug)]
pub struct TensorJet {
    pub value: Matrix<f64>,
    pub d: Vec<Matrix<f64>>,
}

impl TensorJet {
    pub fn zero(n: usize) -> Self {
        Self { value: Matrix::zeros(n), d: vec![Matrix::zeros(n); n] }
    }

    /// Extracts a jet from a dual-valued matrix seeded by [`seed`].
    pub fn from_dual<const N: usize>(m: &Matrix<Dual<f64, N>>) -> Self {
        let n = m.dim();
        Self {
            value: m.map(|x| x.re),
            d: (0..n).map(|k| m.map(|x| x.eps[k])).collect(),
        }
    }

    pub fn dim(&self) -> usize {
        self.value.dim()
    }

    pub fn scaled(&self, s: f64) -> Self {
        Self { value: self.value * s, d: self.d.iter().map(|m| *m * s).collect() }
    }

    pub fn add(&self, other: &Self) -> Self {
        Self {
            value: self.value + other.value,
            d: self.d.iter().zip(&other.d).map(|(a, b)| *a + *b).collect(),
        }
    }

    /// Covariant derivatives `∇_k M`.
    pub fn covariant(&self, r: f64, dir: &Vector<f64>) -> Vec<Matrix<f64>> {
        let n = self.dim();
        (0..n)
            .map(|k| {
                let om = connection(r, dir, &Vector::basis(n, k));
                self.d[k] + om * self.value - self.value * om
            })
            .collect()
    }

    /// Covector `(div_b M)_v = Σ_k (∇_k M)_{kv}`.
    pub fn divergence(&self, r: f64, dir: &Vector<f64>) -> Vector<f64> {
        let cov = self.covariant(r, dir);
        let n = self.dim();
        Vector::from_fn(n, |v| (0..n).map(|k| cov[k][(k, v)]).sum())
    }

    /// Covector `d(tr_b M)`.
    pub fn trace_gradient(&self) -> Vector<f64> {
        Vector::from_fn(self.dim(), |k| self.d[k].trace())
    }

    /// `div_b M − d(tr_b M)`.
    pub fn constraint_covector(&self, r: f64, dir: &Vector<f64>) -> Vector<f64> {
        self.divergence(r, dir) - self.trace_gradient()
    }
}

/// Jacobian `∂y/∂(frame)` of normal coordinates `y = r x̊`: maps coordinate vectors
/// `∂_{y^i}` to frame vectors, `J = x̊x̊ᵀ + (sh r / r)(I − x̊x̊ᵀ)`.
pub fn normal_coordinate_frame<S: Real>(y: &Vector<S>) -> Matrix<S> {
    let n = y.dim();
    let r = y.norm();
    let dir = *y * r.recip();
    let ratio = if r.re() < 1e-4 {
        // sh r / r = 1 + r²/6 + r⁴/120
        let r2 = r * r;
        S::one() + r2 / S::c(6.0) + r2 * r2 / S::c(120.0)
    } else {
        r.sinh() / r
    };
    let p = dir.outer(&dir);
    p + (Matrix::identity(n) - p) * ratio
}

/// Polar point of the Poincaré ball coordinate `y`, `|y| < 1`.
pub fn ball_to_polar<S: Real>(y: &Vector<S>) -> (S, Vector<S>) {
    let s = y.norm();
    // r = arcch((1+|y|²)/(1−|y|²)) = 2 artanh |y|
    (S::c(2.0) * s.atanh(), *y * s.recip())
}

/// Ball coordinate of the polar point `(r, x̊)`.
pub fn polar_to_ball<S: Real>(r: S, dir: &Vector<S>) -> Vector<S> {
    *dir * (r * S::c(0.5)).tanh()
}

/// Frame image of a ball-coordinate vector `X^j ∂_{y^j}` at `y`: `2X/(1−|y|²)`.
pub fn ball_vector_to_frame<S: Real>(y: &Vector<S>, x: &Vector<S>) -> Vector<S> {
    *x * (S::c(2.0) / (S::one() - y.norm_squared()))
}

/// Frame gradient of a function from its Euclidean gradient in ball coordinates.
pub fn ball_gradient_to_frame<S: Real>(y: &Vector<S>, grad: &Vector<S>) -> Vector<S> {
    // ∇_b f = ((1−|y|²)/2)² ∂f; its frame image carries one factor 2/(1−|y|²)
    *grad * ((S::one() - y.norm_squared()) * S::c(0.5))
}

#[cfg(test)]
mod tests {
    use super::*;

    /// `b` in normal coordinates, and its Christoffel symbols by central differences.
    fn metric_cartesian(y: &Vector<f64>) -> Matrix<f64> {
        let j = normal_coordinate_frame(y);
        j.transpose() * j
    }

    fn christoffel_fd(y: &Vector<f64>) -> Vec<Matrix<f64>> {
        let n = y.dim();
        let h = 1e-5;
        let dg: Vec<Matrix<f64>> = (0..n)
            .map(|k| {
                let e = Vector::basis(n, k) * h;
                (metric_cartesian(&(*y + e)) - metric_cartesian(&(*y - e))) * (0.5 / h)
            })
            .collect();
        let ginv = metric_cartesian(y).inverse().unwrap();
        (0..n)
            .map(|a| {
                Matrix::from_fn(n, |b, c| {
                    (0..n)
                        .map(|d| 0.5 * ginv[(a, d)] * (dg[b][(d, c)] + dg[c][(b, d)] - dg[d][(b, c)]))
                        .sum()
                })
            })
            .collect()
    }

    #[test]
    fn connection_matches_coordinate_christoffels() {
        // ∇_{E_k} E_a computed two ways: frame formula and coordinates
        let y = Vector::from_slice(&[0.7, -0.4, 1.1]);
        let r = y.norm();
        let dir = y * r.recip();
        let n = 3;
        let j = normal_coordinate_frame(&y);
        let jinv = j.inverse().unwrap();
        let gamma = christoffel_fd(&y);
        let h = 1e-5;
        for k in 0..n {
            let om = connection(r, &dir, &Vector::basis(n, k));
            for a in 0..n {
                // coordinate components of E_a are column a of J⁻¹
                let field = |y: &Vector<f64>| normal_coordinate_frame(y).inverse().unwrap().column(a);
                let ek = jinv.column(k);
                let deriv = (field(&(y + ek * h)) - field(&(y - ek * h))) * (0.5 / h);
                let ea = jinv.column(a);
                let cov = Vector::from_fn(n, |i| {
                    deriv[i] + (0..n).map(|b| (0..n).map(|c| gamma[i][(b, c)] * ek[b] * ea[c]).sum::<f64>()).sum::<f64>()
                });
                let frame_cov = j.mul_vec(&cov);
                let expected = om.column(a);
                assert!((frame_cov - expected).max_abs() < 1e-8, "k={k} a={a}: {frame_cov:?} vs {expected:?}");
            }
        }
    }

    #[test]
    fn seeded_duals_differentiate_along_frame() {
        let r = 1.3;
        let dir = Vector::from_slice(&[0.0, 0.6, 0.8]);
        let (rd, xd) = seed::<3>(r, &dir);
        // D_k r = x̊_k; D_k x̊ = (e_k − x̊_k x̊)/sh r
        for k in 0..3 {
            assert!((rd.eps[k] - dir[k]).abs() < 1e-15);
            for i in 0..3 {
                let expected = ((i == k) as u8 as f64 - dir[k] * dir[i]) / r.sinh();
                assert!((xd[i].eps[k] - expected).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn ball_round_trip() {
        let (r, dir) = (2.2, Vector::from_slice(&[0.6, 0.0, -0.8]));
        let y = polar_to_ball(r, &dir);
        let v0 = (1.0 + y.norm_squared()) / (1.0 - y.norm_squared());
        assert!((v0 - r.cosh()).abs() < 1e-13);
        let (r2, d2) = ball_to_polar(&y);
        assert!((r2 - r).abs() < 1e-13);
        assert!((d2 - dir).max_abs() < 1e-15);
    }
}
