//! Fixed-capacity vectors and matrices with a runtime dimension.
//!
//! Hyperbolic space is handled for `n <= MAX_DIM - 1`, so Minkowski vectors
//! (length `n + 1`) and frame matrices (size `n`) both fit without heap
//! allocation. Entries beyond `dim` are kept at zero.

use std::ops::{Add, AddAssign, Index, IndexMut, Mul, Neg, Sub, SubAssign};

use crate::scalar::Real;

/// Storage capacity for vectors and matrices.
pub const MAX_DIM: usize = 7;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Vector<T> {
    data: [T; MAX_DIM],
    dim: usize,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Matrix<T> {
    data: [[T; MAX_DIM]; MAX_DIM],
    dim: usize,
}

impl<T: Real> Vector<T> {
    pub fn zeros(dim: usize) -> Self {
        assert!(dim <= MAX_DIM, "dimension {dim} exceeds capacity {MAX_DIM}");
        Self { data: [T::zero(); MAX_DIM], dim }
    }

    pub fn basis(dim: usize, k: usize) -> Self {
        let mut v = Self::zeros(dim);
        v[k] = T::one();
        v
    }

    pub fn from_slice(s: &[T]) -> Self {
        let mut v = Self::zeros(s.len());
        v.data[..s.len()].copy_from_slice(s);
        v
    }

    pub fn from_fn(dim: usize, f: impl Fn(usize) -> T) -> Self {
        let mut v = Self::zeros(dim);
        for i in 0..dim {
            v.data[i] = f(i);
        }
        v
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn as_slice(&self) -> &[T] {
        &self.data[..self.dim]
    }

    pub fn iter(&self) -> impl Iterator<Item = &T> {
        self.data[..self.dim].iter()
    }

    pub fn dot(&self, other: &Self) -> T {
        debug_assert_eq!(self.dim, other.dim);
        let mut s = T::zero();
        for i in 0..self.dim {
            s = s + self.data[i] * other.data[i];
        }
        s
    }

    pub fn norm_squared(&self) -> T {
        self.dot(self)
    }

    pub fn norm(&self) -> T {
        self.norm_squared().sqrt()
    }

    pub fn normalize(&self) -> Self {
        *self * self.norm().recip()
    }

    pub fn max_abs(&self) -> f64 {
        self.iter().fold(0.0, |m, x| m.max(x.re().abs()))
    }

    /// Converts the scalar type entry by entry.
    pub fn map<S: Real>(&self, f: impl Fn(T) -> S) -> Vector<S> {
        Vector::from_fn(self.dim, |i| f(self.data[i]))
    }

    pub fn outer(&self, other: &Self) -> Matrix<T> {
        Matrix::from_fn(self.dim, |i, j| self.data[i] * other.data[j])
    }

    /// Value parts as plain `f64`.
    pub fn re(&self) -> Vector<f64> {
        self.map(|x| x.re())
    }
}

impl<T> Index<usize> for Vector<T> {
    type Output = T;
    #[inline]
    fn index(&self, i: usize) -> &T {
        debug_assert!(i < self.dim);
        &self.data[i]
    }
}

impl<T> IndexMut<usize> for Vector<T> {
    #[inline]
    fn index_mut(&mut self, i: usize) -> &mut T {
        debug_assert!(i < self.dim);
        &mut self.data[i]
    }
}

impl<T: Real> Add for Vector<T> {
    type Output = Self;
    fn add(mut self, rhs: Self) -> Self {
        for i in 0..self.dim {
            self.data[i] = self.data[i] + rhs.data[i];
        }
        self
    }
}

impl<T: Real> Sub for Vector<T> {
    type Output = Self;
    fn sub(mut self, rhs: Self) -> Self {
        for i in 0..self.dim {
            self.data[i] = self.data[i] - rhs.data[i];
        }
        self
    }
}

impl<T: Real> AddAssign for Vector<T> {
    fn add_assign(&mut self, rhs: Self) {
        *self = *self + rhs;
    }
}

impl<T: Real> SubAssign for Vector<T> {
    fn sub_assign(&mut self, rhs: Self) {
        *self = *self - rhs;
    }
}

impl<T: Real> Neg for Vector<T> {
    type Output = Self;
    fn neg(self) -> Self {
        self * -T::one()
    }
}

impl<T: Real> Mul<T> for Vector<T> {
    type Output = Self;
    fn mul(mut self, s: T) -> Self {
        for i in 0..self.dim {
            self.data[i] = self.data[i] * s;
        }
        self
    }
}

impl<T: Real> Matrix<T> {
    pub fn zeros(dim: usize) -> Self {
        assert!(dim <= MAX_DIM, "dimension {dim} exceeds capacity {MAX_DIM}");
        Self { data: [[T::zero(); MAX_DIM]; MAX_DIM], dim }
    }

    pub fn identity(dim: usize) -> Self {
        Self::from_fn(dim, |i, j| if i == j { T::one() } else { T::zero() })
    }

    pub fn from_fn(dim: usize, f: impl Fn(usize, usize) -> T) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            for j in 0..dim {
                m.data[i][j] = f(i, j);
            }
        }
        m
    }

    /// Builds a matrix whose columns are the given vectors.
    pub fn from_columns(cols: &[Vector<T>]) -> Self {
        Self::from_fn(cols.len(), |i, j| cols[j][i])
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn column(&self, j: usize) -> Vector<T> {
        Vector::from_fn(self.dim, |i| self.data[i][j])
    }

    pub fn row(&self, i: usize) -> Vector<T> {
        Vector::from_fn(self.dim, |j| self.data[i][j])
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.dim, |i, j| self.data[j][i])
    }

    pub fn trace(&self) -> T {
        (0..self.dim).fold(T::zero(), |s, i| s + self.data[i][i])
    }

    pub fn mul_vec(&self, v: &Vector<T>) -> Vector<T> {
        Vector::from_fn(self.dim, |i| {
            let mut s = T::zero();
            for j in 0..self.dim {
                s = s + self.data[i][j] * v[j];
            }
            s
        })
    }

    /// `uᵀ M v`.
    pub fn bilinear(&self, u: &Vector<T>, v: &Vector<T>) -> T {
        u.dot(&self.mul_vec(v))
    }

    pub fn symmetrize(&self) -> Self {
        let h = T::c(0.5);
        Self::from_fn(self.dim, |i, j| h * (self.data[i][j] + self.data[j][i]))
    }

    /// Frobenius inner product `tr(Aᵀ B)`.
    pub fn frobenius(&self, other: &Self) -> T {
        let mut s = T::zero();
        for i in 0..self.dim {
            for j in 0..self.dim {
                s = s + self.data[i][j] * other.data[i][j];
            }
        }
        s
    }

    pub fn norm(&self) -> T {
        self.frobenius(self).sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        let mut m: f64 = 0.0;
        for i in 0..self.dim {
            for j in 0..self.dim {
                m = m.max(self.data[i][j].re().abs());
            }
        }
        m
    }

    pub fn asymmetry(&self) -> f64 {
        let mut m: f64 = 0.0;
        for i in 0..self.dim {
            for j in 0..i {
                m = m.max((self.data[i][j] - self.data[j][i]).re().abs());
            }
        }
        m
    }

    pub fn map<S: Real>(&self, f: impl Fn(T) -> S) -> Matrix<S> {
        Matrix::from_fn(self.dim, |i, j| f(self.data[i][j]))
    }

    pub fn re(&self) -> Matrix<f64> {
        self.map(|x| x.re())
    }

    /// Inverse by Gauss–Jordan elimination with partial pivoting; `None` if singular.
    pub fn inverse(&self) -> Option<Self> {
        let n = self.dim;
        let mut a = *self;
        let mut inv = Self::identity(n);
        for col in 0..n {
            let mut piv = col;
            for r in col + 1..n {
                if a.data[r][col].re().abs() > a.data[piv][col].re().abs() {
                    piv = r;
                }
            }
            if a.data[piv][col].re() == 0.0 || !a.data[piv][col].re().is_finite() {
                return None;
            }
            a.data.swap(col, piv);
            inv.data.swap(col, piv);
            let d = a.data[col][col].recip();
            for j in 0..n {
                a.data[col][j] = a.data[col][j] * d;
                inv.data[col][j] = inv.data[col][j] * d;
            }
            for r in 0..n {
                if r != col {
                    let f = a.data[r][col];
                    for j in 0..n {
                        a.data[r][j] = a.data[r][j] - f * a.data[col][j];
                        inv.data[r][j] = inv.data[r][j] - f * inv.data[col][j];
                    }
                }
            }
        }
        Some(inv)
    }

    pub fn determinant(&self) -> T {
        let n = self.dim;
        let mut a = *self;
        let mut det = T::one();
        for col in 0..n {
            let mut piv = col;
            for r in col + 1..n {
                if a.data[r][col].re().abs() > a.data[piv][col].re().abs() {
                    piv = r;
                }
            }
            if a.data[piv][col].re() == 0.0 {
                return T::zero();
            }
            if piv != col {
                a.data.swap(col, piv);
                det = -det;
            }
            det = det * a.data[col][col];
            for r in col + 1..n {
                let f = a.data[r][col] / a.data[col][col];
                for j in col..n {
                    a.data[r][j] = a.data[r][j] - f * a.data[col][j];
                }
            }
        }
        det
    }
}

impl<T> Index<(usize, usize)> for Matrix<T> {
    type Output = T;
    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &T {
        debug_assert!(i < self.dim && j < self.dim);
        &self.data[i][j]
    }
}

impl<T> IndexMut<(usize, usize)> for Matrix<T> {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut T {
        debug_assert!(i < self.dim && j < self.dim);
        &mut self.data[i][j]
    }
}

impl<T: Real> Add for Matrix<T> {
    type Output = Self;
    fn add(mut self, rhs: Self) -> Self {
        for i in 0..self.dim {
            for j in 0..self.dim {
                self.data[i][j] = self.data[i][j] + rhs.data[i][j];
            }
        }
        self
    }
}

impl<T: Real> Sub for Matrix<T> {
    type Output = Self;
    fn sub(mut self, rhs: Self) -> Self {
        for i in 0..self.dim {
            for j in 0..self.dim {
                self.data[i][j] = self.data[i][j] - rhs.data[i][j];
            }
        }
        self
    }
}

impl<T: Real> AddAssign for Matrix<T> {
    fn add_assign(&mut self, rhs: Self) {
        *self = *self + rhs;
    }
}

impl<T: Real> Neg for Matrix<T> {
    type Output = Self;
    fn neg(self) -> Self {
        self * -T::one()
    }
}

impl<T: Real> Mul<T> for Matrix<T> {
    type Output = Self;
    fn mul(mut self, s: T) -> Self {
        for i in 0..self.dim {
            for j in 0..self.dim {
                self.data[i][j] = self.data[i][j] * s;
            }
        }
        self
    }
}

impl<T: Real> Mul for Matrix<T> {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        let n = self.dim;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self.data[i][k];
                for j in 0..n {
                    out.data[i][j] = out.data[i][j] + a * rhs.data[k][j];
                }
            }
        }
        out
    }
}
