//! Minkowski space `ℝ^{n,1}`, the hyperboloid model of `Hⁿ` and the restricted
//! Lorentz group acting on both.
//!
//! Components are ordered `(X⁰, X¹, …, Xⁿ)` with `η = diag(-1, 1, …, 1)`.

use thiserror::Error;

use crate::linalg::{Matrix, Vector, MAX_DIM};
use crate::scalar::Real;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MinkowskiError {
    #[error("vector is not future timelike (η(U,U) = {norm}, U⁰ = {time})")]
    NotFutureTimelike { norm: f64, time: f64 },
    #[error("matrix is not a restricted Lorentz transformation (defect {defect:.3e})")]
    NotLorentz { defect: f64 },
    #[error("surface samples have zero total weight")]
    Degenerate,
    #[error("dimension mismatch: expected {expected}, found {found}")]
    Dimension { expected: usize, found: usize },
}

/// Element of `ℝ^{n,1}`.
pub type MinkowskiVector<T> = Vector<T>;

/// Minkowski inner product `η(U, V)`.
pub fn eta<T: Real>(u: &MinkowskiVector<T>, v: &MinkowskiVector<T>) -> T {
    let mut s = -u[0] * v[0];
    for i in 1..u.dim() {
        s = s + u[i] * v[i];
    }
    s
}

/// Time axis `N = (1, 0, …, 0)`.
pub fn time_axis<T: Real>(n: usize) -> MinkowskiVector<T> {
    Vector::basis(n + 1, 0)
}

/// Spatial part `(X¹, …, Xⁿ)`.
pub fn spatial<T: Real>(u: &MinkowskiVector<T>) -> Vector<T> {
    Vector::from_fn(u.dim() - 1, |i| u[i + 1])
}

/// Joins a time component and a spatial vector.
pub fn join<T: Real>(t: T, x: &Vector<T>) -> MinkowskiVector<T> {
    Vector::from_fn(x.dim() + 1, |i| if i == 0 { t } else { x[i - 1] })
}

/// Point of `Hⁿ` in polar coordinates `(r, x̊)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HyperbolicPoint<T> {
    pub r: T,
    pub dir: Vector<T>,
}

impl<T: Real> HyperbolicPoint<T> {
    /// Builds a point; the direction is normalized, and at `r = 0` it is replaced
    /// by the first basis vector.
    pub fn new(r: T, dir: Vector<T>) -> Self {
        if r.re() == 0.0 || dir.norm().re() == 0.0 {
            return Self::origin(dir.dim());
        }
        Self { r, dir: dir.normalize() }
    }

    pub fn origin(n: usize) -> Self {
        Self { r: T::zero(), dir: Vector::basis(n, 0) }
    }

    pub fn dim(&self) -> usize {
        self.dir.dim()
    }

    /// Point with polar coordinates read off a Euclidean vector `r x̊`.
    pub fn from_polar_vector(v: &Vector<T>) -> Self {
        Self::new(v.norm(), *v)
    }

    /// Hyperbolic distance, computed from the chord length to stay accurate at short range.
    pub fn distance(&self, other: &Self) -> T {
        let d = embed(self) - embed(other);
        let chord = eta(&d, &d).max(T::zero()).sqrt();
        T::c(2.0) * (chord * T::c(0.5)).asinh()
    }

    pub fn re(&self) -> HyperbolicPoint<f64> {
        HyperbolicPoint { r: self.r.re(), dir: self.dir.re() }
    }
}

/// Isometric embedding `I(r, x̊) = (ch r, x̊ sh r)`.
pub fn embed<T: Real>(p: &HyperbolicPoint<T>) -> MinkowskiVector<T> {
    join(p.r.cosh(), &(p.dir * p.r.sinh()))
}

/// `I⁻¹(U / √(−η(U,U)))` for future timelike `U`.
pub fn unembed<T: Real>(u: &MinkowskiVector<T>) -> Result<HyperbolicPoint<T>, MinkowskiError> {
    let q = eta(u, u);
    if !(q.re() < 0.0) || !(u[0].re() > 0.0) {
        return Err(MinkowskiError::NotFutureTimelike { norm: q.re(), time: u[0].re() });
    }
    let m = (-q).sqrt();
    let x = spatial(u) * m.recip();
    let s = x.norm();
    if s.re() == 0.0 {
        return Ok(HyperbolicPoint::origin(x.dim()));
    }
    Ok(HyperbolicPoint { r: s.asinh(), dir: x * s.recip() })
}

/// Normalizes a future timelike vector onto the unit hyperboloid.
pub fn normalize_timelike<T: Real>(u: &MinkowskiVector<T>) -> Result<MinkowskiVector<T>, MinkowskiError> {
    unembed(u).map(|p| embed(&p))
}

/// Element of `SO₀(n, 1)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LorentzTransform {
    matrix: Matrix<f64>,
}

impl LorentzTransform {
    const TOL: f64 = 1e-10;

    /// Validates a matrix as a restricted Lorentz transformation.
    pub fn new(matrix: Matrix<f64>) -> Result<Self, MinkowskiError> {
        let t = Self { matrix };
        let defect = t.eta_defect();
        let det = matrix.determinant();
        if defect > Self::TOL || (det - 1.0).abs() > Self::TOL || matrix[(0, 0)] < 1.0 - Self::TOL {
            return Err(MinkowskiError::NotLorentz { defect: defect.max((det - 1.0).abs()) });
        }
        Ok(t)
    }

    pub fn identity(n: usize) -> Self {
        Self { matrix: Matrix::identity(n + 1) }
    }

    /// Pure boost `L(U)` carrying `N` to the unit timelike vector `U`.
    fn pure_boost_to(u: &MinkowskiVector<f64>) -> Self {
        let d = u.dim();
        let x = spatial(u);
        let k = 1.0 / (1.0 + u[0]);
        let m = Matrix::from_fn(d, |i, j| match (i, j) {
            (0, 0) => u[0],
            (0, j) => x[j - 1],
            (i, 0) => x[i - 1],
            (i, j) => (if i == j { 1.0 } else { 0.0 }) + k * x[i - 1] * x[j - 1],
        });
        Self { matrix: m }
    }

    /// Boost of rapidity `beta` along `axis`, carrying `N` to `(ch β, sh β â)`.
    pub fn boost(rapidity: f64, axis: &Vector<f64>) -> Self {
        let a = if axis.norm() > 0.0 { axis.normalize() } else { Vector::basis(axis.dim(), 0) };
        Self::pure_boost_to(&join(rapidity.cosh(), &(a * rapidity.sinh())))
    }

    /// Rotation by `angle` in the spatial `(i, j)` plane (zero-based spatial indices).
    pub fn plane_rotation(n: usize, i: usize, j: usize, angle: f64) -> Self {
        let mut m = Matrix::identity(n + 1);
        let (s, c) = angle.sin_cos();
        m[(i + 1, i + 1)] = c;
        m[(j + 1, j + 1)] = c;
        m[(i + 1, j + 1)] = -s;
        m[(j + 1, i + 1)] = s;
        Self { matrix: m }
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim() - 1
    }

    pub fn matrix(&self) -> &Matrix<f64> {
        &self.matrix
    }

    /// `max |AᵀηA − η|`.
    pub fn eta_defect(&self) -> f64 {
        let d = self.matrix.dim();
        let eta_m = Matrix::from_fn(d, |i, j| match (i, j) {
            (0, 0) => -1.0,
            (i, j) if i == j => 1.0,
            _ => 0.0,
        });
        (self.matrix.transpose() * eta_m * self.matrix - eta_m).max_abs()
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &Self) -> Self {
        Self { matrix: self.matrix * other.matrix }
    }

    /// `η Aᵀ η`.
    pub fn inverse(&self) -> Self {
        let d = self.matrix.dim();
        let sign = |i: usize| if i == 0 { -1.0 } else { 1.0 };
        Self { matrix: Matrix::from_fn(d, |i, j| sign(i) * sign(j) * self.matrix[(j, i)]) }
    }

    pub fn apply<T: Real>(&self, v: &MinkowskiVector<T>) -> MinkowskiVector<T> {
        let d = self.matrix.dim();
        Vector::from_fn(d, |i| {
            let mut s = T::zero();
            for j in 0..d {
                s = s + T::c(self.matrix[(i, j)]) * v[j];
            }
            s
        })
    }

    /// Induced isometry `â = I⁻¹ ∘ A ∘ I` of `Hⁿ`.
    pub fn apply_point<T: Real>(&self, p: &HyperbolicPoint<T>) -> HyperbolicPoint<T> {
        unembed(&self.apply(&embed(p))).expect("Lorentz transformations preserve the hyperboloid")
    }
}

/// Canonical `A_P` with `A_P(P) = √(−η(P,P)) N`: the pure boost in the plane of `N` and `P`.
pub fn boost_to_rest(p: &MinkowskiVector<f64>) -> Result<LorentzTransform, MinkowskiError> {
    let u = normalize_timelike(p)?;
    Ok(LorentzTransform::pure_boost_to(&u).inverse())
}

/// Action of `A` on the sphere at infinity: returns `(a(x̊), u(x̊))` where `a(x̊)` is the
/// direction of `A(1, x̊)` and `u = 1 / A(1, x̊)⁰`, so that `a^*σ = u² σ`.
pub fn boost_sphere_action<T: Real>(a: &LorentzTransform, x: &Vector<T>) -> (Vector<T>, T) {
    let y = a.apply(&join(T::one(), x));
    let u = y[0].recip();
    (spatial(&y) * u, u)
}

/// Hyperbolic center `(C, z)` of a surface from samples `(p, w)` of its area measure:
/// `C = |S|⁻¹ Σ w I(p)` and `z = I⁻¹(C / √(−η(C,C)))`.
pub fn surface_center(
    samples: &[(HyperbolicPoint<f64>, f64)],
) -> Result<(MinkowskiVector<f64>, HyperbolicPoint<f64>), MinkowskiError> {
    let n = samples.first().ok_or(MinkowskiError::Degenerate)?.0.dim();
    let points: Vec<_> = samples.iter().map(|(p, w)| (embed(p), *w)).collect();
    let area: f64 = samples.iter().map(|(_, w)| w).sum();
    if !(area > 0.0) {
        return Err(MinkowskiError::Degenerate);
    }
    let c = affine_moment(n + 1, &points)? * area.recip();
    let z = unembed(&c)?;
    Ok((c, z))
}

/// Unnormalized affine moment `Σ w X` of embedded samples.
pub fn affine_moment(
    dim: usize,
    samples: &[(MinkowskiVector<f64>, f64)],
) -> Result<MinkowskiVector<f64>, MinkowskiError> {
    debug_assert!(dim <= MAX_DIM);
    let mut c = Vector::zeros(dim);
    for (x, w) in samples {
        if x.dim() != dim {
            return Err(MinkowskiError::Dimension { expected: dim, found: x.dim() });
        }
        c += *x * *w;
    }
    Ok(c)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(s: &[f64]) -> Vector<f64> {
        Vector::from_slice(s)
    }

    #[test]
    fn embedding_examples() {
        assert_eq!(embed(&HyperbolicPoint::<f64>::origin(3)), v(&[1.0, 0.0, 0.0, 0.0]));
        let p = HyperbolicPoint::new(2f64.acosh(), v(&[1.0, 0.0, 0.0]));
        let x = embed(&p);
        assert!((x - v(&[2.0, 3f64.sqrt(), 0.0, 0.0])).max_abs() < 1e-15);
        let back = unembed(&x).unwrap();
        assert!((back.r - 2f64.acosh()).abs() < 1e-15);
        assert!((back.dir - v(&[1.0, 0.0, 0.0])).max_abs() < 1e-15);
    }

    #[test]
    fn unembed_is_projective() {
        assert_eq!(unembed(&v(&[2.0, 0.0, 0.0, 0.0])).unwrap().r, 0.0);
        assert!(unembed(&v(&[1.0, 1.0, 0.0, 0.0])).is_err());
        assert!(unembed(&v(&[1.0, 2.0, 0.0, 0.0])).is_err());
        assert!(unembed(&v(&[-2.0, 0.0, 0.0, 0.0])).is_err());
    }

    #[test]
    fn rest_boost_examples() {
        let a = boost_to_rest(&v(&[5.0, 0.0, 0.0, 0.0])).unwrap();
        assert!((*a.matrix() - Matrix::identity(4)).max_abs() < 1e-15);
        let p = v(&[1f64.cosh(), 1f64.sinh(), 0.0, 0.0]);
        let a = boost_to_rest(&p).unwrap();
        assert!((a.apply(&p) - v(&[1.0, 0.0, 0.0, 0.0])).max_abs() < 1e-14);
        let expected = LorentzTransform::boost(-1.0, &v(&[1.0, 0.0, 0.0]));
        assert!((*a.matrix() - *expected.matrix()).max_abs() < 1e-14);
    }

    #[test]
    fn validation_rejects_non_lorentz() {
        assert!(LorentzTransform::new(Matrix::identity(4) * 2.0).is_err());
        let mut flip = Matrix::identity(4);
        flip[(1, 1)] = -1.0;
        assert!(LorentzTransform::new(flip).is_err());
        let b = LorentzTransform::boost(0.7, &v(&[1.0, 2.0, -1.0]));
        assert!(LorentzTransform::new(*b.matrix()).is_ok());
    }

    #[test]
    fn inverse_and_composition() {
        let a = LorentzTransform::boost(0.4, &v(&[0.0, 1.0, 1.0]))
            .compose(&LorentzTransform::plane_rotation(3, 0, 2, 0.3));
        let id = a.compose(&a.inverse());
        assert!((*id.matrix() - Matrix::identity(4)).max_abs() < 1e-14);
    }

    #[test]
    fn sphere_action_of_rotation_is_isometric() {
        let a = LorentzTransform::plane_rotation(3, 0, 1, 0.9);
        let x = v(&[0.6, 0.0, 0.8]);
        let (y, u) = boost_sphere_action(&a, &x);
        assert!((u - 1.0).abs() < 1e-15);
        assert!((y.norm() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn centered_sphere_has_center_at_origin() {
        let big_r: f64 = 2.5;
        let samples: Vec<_> = [[1.0, 0.0, 0.0], [-1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, -1.0, 0.0], [0.0, 0.0, 1.0], [0.0, 0.0, -1.0]]
            .iter()
            .map(|d| (HyperbolicPoint::new(big_r, v(d)), 1.7))
            .collect();
        let (c, z) = surface_center(&samples).unwrap();
        assert!((c - v(&[big_r.cosh(), 0.0, 0.0, 0.0])).max_abs() < 1e-14);
        assert_eq!(z.r, 0.0);
        assert_eq!(surface_center(&[]).unwrap_err(), MinkowskiError::Degenerate);
    }

    #[test]
    fn distance_matches_cosh_formula() {
        let p = HyperbolicPoint::new(1.2, v(&[1.0, 0.0, 0.0]));
        let q = HyperbolicPoint::new(0.7, v(&[0.0, 1.0, 0.0]));
        let ch = -eta(&embed(&p), &embed(&q));
        assert!((p.distance(&q) - ch.acosh()).abs() < 1e-14);
    }
}
