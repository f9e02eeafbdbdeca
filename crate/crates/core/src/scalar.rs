//! Scalar abstraction shared by every numeric kernel.
//!
//! All geometric evaluators are written against [`Real`], which is satisfied by
//! `f32`, `f64` and by the forward-mode [`Dual`] numbers defined here. Chart
//! data is differentiated by evaluating it on duals, so derivatives of composed
//! maps (boosts, chart changes, interpolated radial profiles) come out exact up
//! to rounding.

use std::cmp::Ordering;
use std::fmt;
use std::num::FpCategory;
use std::ops::{Add, AddAssign, Div, DivAssign, Mul, MulAssign, Neg, Rem, Sub, SubAssign};

use num_traits::{Float, FloatConst, FromPrimitive, Num, NumCast, One, ToPrimitive, Zero};

/// Floating point scalar usable by the geometric kernels.
pub trait Real:
    Float + FloatConst + FromPrimitive + fmt::Debug + Send + Sync + 'static
{
    /// Converts an `f64` literal.
    #[inline]
    fn c(x: f64) -> Self {
        Self::from_f64(x).expect("representable constant")
    }

    /// Value part, discarding any derivative information.
    fn re(self) -> f64;
}

impl Real for f32 {
    #[inline]
    fn re(self) -> f64 {
        self as f64
    }
}

impl Real for f64 {
    #[inline]
    fn re(self) -> f64 {
        self
    }
}

/// Forward-mode dual number with `N` independent infinitesimal directions.
#[derive(Clone, Copy, PartialEq)]
pub struct Dual<T, const N: usize> {
    pub re: T,
    pub eps: [T; N],
}

impl<T: Real, const N: usize> Dual<T, N> {
    #[inline]
    pub fn constant(re: T) -> Self {
        Self { re, eps: [T::zero(); N] }
    }

    /// A variable seeded along direction `k`.
    #[inline]
    pub fn variable(re: T, k: usize) -> Self {
        let mut eps = [T::zero(); N];
        eps[k] = T::one();
        Self { re, eps }
    }

    /// `re + Σ_k seed[k] ε_k`.
    #[inline]
    pub fn seeded(re: T, seed: [T; N]) -> Self {
        Self { re, eps: seed }
    }

    #[inline]
    fn chain(self, f: T, df: T) -> Self {
        let mut eps = self.eps;
        for e in eps.iter_mut() {
            *e = *e * df;
        }
        Self { re: f, eps }
    }
}

impl<T: Real, const N: usize> fmt::Debug for Dual<T, N> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}+{:?}ε", self.re, self.eps)
    }
}

impl<T: Real, const N: usize> PartialOrd for Dual<T, N> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        self.re.partial_cmp(&other.re)
    }
}

impl<T: Real, const N: usize> Add for Dual<T, N> {
    type Output = Self;
    #[inline]
    fn add(self, rhs: Self) -> Self {
        let mut eps = self.eps;
        for (e, r) in eps.iter_mut().zip(rhs.eps) {
            *e = *e + r;
        }
        Self { re: self.re + rhs.re, eps }
    }
}

impl<T: Real, const N: usize> Sub for Dual<T, N> {
    type Output = Self;
    #[inline]
    fn sub(self, rhs: Self) -> Self {
        let mut eps = self.eps;
        for (e, r) in eps.iter_mut().zip(rhs.eps) {
            *e = *e - r;
        }
        Self { re: self.re - rhs.re, eps }
    }
}

impl<T: Real, const N: usize> Mul for Dual<T, N> {
    type Output = Self;
    #[inline]
    fn mul(self, rhs: Self) -> Self {
        let mut eps = self.eps;
        for (e, r) in eps.iter_mut().zip(rhs.eps) {
            *e = *e * rhs.re + self.re * r;
        }
        Self { re: self.re * rhs.re, eps }
    }
}

impl<T: Real, const N: usize> Div for Dual<T, N> {
    type Output = Self;
    #[inline]
    fn div(self, rhs: Self) -> Self {
        let inv = T::one() / rhs.re;
        let q = self.re * inv;
        let mut eps = self.eps;
        for (e, r) in eps.iter_mut().zip(rhs.eps) {
            *e = (*e - q * r) * inv;
        }
        Self { re: q, eps }
    }
}

impl<T: Real, const N: usize> Rem for Dual<T, N> {
    type Output = Self;
    fn rem(self, rhs: Self) -> Self {
        // d(a mod b) = da away from the jumps
        Self { re: self.re % rhs.re, eps: self.eps }
    }
}

impl<T: Real, const N: usize> Neg for Dual<T, N> {
    type Output = Self;
    #[inline]
    fn neg(self) -> Self {
        let mut eps = self.eps;
        for e in eps.iter_mut() {
            *e = -*e;
        }
        Self { re: -self.re, eps }
    }
}

macro_rules! assign_op {
    ($tr:ident, $m:ident, $op:tt) => {
        impl<T: Real, const N: usize> $tr for Dual<T, N> {
            #[inline]
            fn $m(&mut self, rhs: Self) {
                *self = *self $op rhs;
            }
        }
    };
}
assign_op!(AddAssign, add_assign, +);
assign_op!(SubAssign, sub_assign, -);
assign_op!(MulAssign, mul_assign, *);
assign_op!(DivAssign, div_assign, /);

impl<T: Real, const N: usize> Zero for Dual<T, N> {
    fn zero() -> Self {
        Self::constant(T::zero())
    }
    fn is_zero(&self) -> bool {
        self.re.is_zero() && self.eps.iter().all(|e| e.is_zero())
    }
}

impl<T: Real, const N: usize> One for Dual<T, N> {
    fn one() -> Self {
        Self::constant(T::one())
    }
}

impl<T: Real, const N: usize> Num for Dual<T, N> {
    type FromStrRadixErr = T::FromStrRadixErr;
    fn from_str_radix(s: &str, radix: u32) -> Result<Self, Self::FromStrRadixErr> {
        T::from_str_radix(s, radix).map(Self::constant)
    }
}

impl<T: Real, const N: usize> ToPrimitive for Dual<T, N> {
    fn to_i64(&self) -> Option<i64> {
        self.re.to_i64()
    }
    fn to_u64(&self) -> Option<u64> {
        self.re.to_u64()
    }
    fn to_f64(&self) -> Option<f64> {
        self.re.to_f64()
    }
}

impl<T: Real, const N: usize> NumCast for Dual<T, N> {
    fn from<P: ToPrimitive>(n: P) -> Option<Self> {
        <T as NumCast>::from(n).map(Self::constant)
    }
}

impl<T: Real, const N: usize> FromPrimitive for Dual<T, N> {
    fn from_i64(n: i64) -> Option<Self> {
        T::from_i64(n).map(Self::constant)
    }
    fn from_u64(n: u64) -> Option<Self> {
        T::from_u64(n).map(Self::constant)
    }
    fn from_f64(n: f64) -> Option<Self> {
        T::from_f64(n).map(Self::constant)
    }
}

macro_rules! const_fn {
    ($($name:ident),*) => {
        $(fn $name() -> Self { Self::constant(T::$name()) })*
    };
}

impl<T: Real, const N: usize> FloatConst for Dual<T, N> {
    const_fn!(
        E, FRAC_1_PI, FRAC_1_SQRT_2, FRAC_2_PI, FRAC_2_SQRT_PI, FRAC_PI_2, FRAC_PI_3,
        FRAC_PI_4, FRAC_PI_6, FRAC_PI_8, LN_10, LN_2, LOG10_E, LOG2_E, PI, SQRT_2
    );
}

macro_rules! piecewise_constant {
    ($($name:ident),*) => {
        $(fn $name(self) -> Self { Self::constant(self.re.$name()) })*
    };
}

impl<T: Real, const N: usize> Float for Dual<T, N> {
    fn nan() -> Self {
        Self::constant(T::nan())
    }
    fn infinity() -> Self {
        Self::constant(T::infinity())
    }
    fn neg_infinity() -> Self {
        Self::constant(T::neg_infinity())
    }
    fn neg_zero() -> Self {
        Self::constant(T::neg_zero())
    }
    fn min_value() -> Self {
        Self::constant(T::min_value())
    }
    fn min_positive_value() -> Self {
        Self::constant(T::min_positive_value())
    }
    fn max_value() -> Self {
        Self::constant(T::max_value())
    }
    fn epsilon() -> Self {
        Self::constant(T::epsilon())
    }
    fn is_nan(self) -> bool {
        self.re.is_nan()
    }
    fn is_infinite(self) -> bool {
        self.re.is_infinite()
    }
    fn is_finite(self) -> bool {
        self.re.is_finite()
    }
    fn is_normal(self) -> bool {
        self.re.is_normal()
    }
    fn classify(self) -> FpCategory {
        self.re.classify()
    }
    piecewise_constant!(floor, ceil, round, trunc);
    fn fract(self) -> Self {
        Self { re: self.re.fract(), eps: self.eps }
    }
    fn abs(self) -> Self {
        if self.re < T::zero() {
            -self
        } else {
            self
        }
    }
    fn signum(self) -> Self {
        Self::constant(self.re.signum())
    }
    fn is_sign_positive(self) -> bool {
        self.re.is_sign_positive()
    }
    fn is_sign_negative(self) -> bool {
        self.re.is_sign_negative()
    }
    fn mul_add(self, a: Self, b: Self) -> Self {
        self * a + b
    }
    fn recip(self) -> Self {
        let r = self.re.recip();
        self.chain(r, -r * r)
    }
    fn powi(self, n: i32) -> Self {
        if n == 0 {
            return Self::one();
        }
        let p = self.re.powi(n - 1);
        self.chain(p * self.re, T::from_i32(n).unwrap() * p)
    }
    fn powf(self, n: Self) -> Self {
        // x^y = exp(y ln x); derivative in both arguments
        let v = self.re.powf(n.re);
        let mut eps = [T::zero(); N];
        for (e, (a, b)) in eps.iter_mut().zip(self.eps.iter().zip(&n.eps)) {
            let mut d = T::zero();
            if !a.is_zero() {
                d = d + n.re * self.re.powf(n.re - T::one()) * *a;
            }
            if !b.is_zero() {
                d = d + v * self.re.ln() * *b;
            }
            *e = d;
        }
        Self { re: v, eps }
    }
    fn sqrt(self) -> Self {
        let s = self.re.sqrt();
        self.chain(s, T::c(0.5) / s)
    }
    fn exp(self) -> Self {
        let e = self.re.exp();
        self.chain(e, e)
    }
    fn exp2(self) -> Self {
        let e = self.re.exp2();
        self.chain(e, e * T::LN_2())
    }
    fn ln(self) -> Self {
        self.chain(self.re.ln(), self.re.recip())
    }
    fn log(self, base: Self) -> Self {
        self.ln() / base.ln()
    }
    fn log2(self) -> Self {
        self.chain(self.re.log2(), (self.re * T::LN_2()).recip())
    }
    fn log10(self) -> Self {
        self.chain(self.re.log10(), (self.re * T::LN_10()).recip())
    }
    fn max(self, other: Self) -> Self {
        if self.re >= other.re {
            self
        } else {
            other
        }
    }
    fn min(self, other: Self) -> Self {
        if self.re <= other.re {
            self
        } else {
            other
        }
    }
    fn abs_sub(self, other: Self) -> Self {
        if self.re > other.re {
            self - other
        } else {
            Self::zero()
        }
    }
    fn cbrt(self) -> Self {
        let c = self.re.cbrt();
        self.chain(c, (T::c(3.0) * c * c).recip())
    }
    fn hypot(self, other: Self) -> Self {
        (self * self + other * other).sqrt()
    }
    fn sin(self) -> Self {
        self.chain(self.re.sin(), self.re.cos())
    }
    fn cos(self) -> Self {
        self.chain(self.re.cos(), -self.re.sin())
    }
    fn tan(self) -> Self {
        let t = self.re.tan();
        self.chain(t, T::one() + t * t)
    }
    fn asin(self) -> Self {
        self.chain(self.re.asin(), (T::one() - self.re * self.re).sqrt().recip())
    }
    fn acos(self) -> Self {
        self.chain(self.re.acos(), -(T::one() - self.re * self.re).sqrt().recip())
    }
    fn atan(self) -> Self {
        self.chain(self.re.atan(), (T::one() + self.re * self.re).recip())
    }
    fn atan2(self, other: Self) -> Self {
        let d = self.re * self.re + other.re * other.re;
        let mut eps = [T::zero(); N];
        for (e, (a, b)) in eps.iter_mut().zip(self.eps.iter().zip(&other.eps)) {
            *e = (other.re * *a - self.re * *b) / d;
        }
        Self { re: self.re.atan2(other.re), eps }
    }
    fn sin_cos(self) -> (Self, Self) {
        (self.sin(), self.cos())
    }
    fn exp_m1(self) -> Self {
        self.chain(self.re.exp_m1(), self.re.exp())
    }
    fn ln_1p(self) -> Self {
        self.chain(self.re.ln_1p(), (T::one() + self.re).recip())
    }
    fn sinh(self) -> Self {
        self.chain(self.re.sinh(), self.re.cosh())
    }
    fn cosh(self) -> Self {
        self.chain(self.re.cosh(), self.re.sinh())
    }
    fn tanh(self) -> Self {
        let t = self.re.tanh();
        self.chain(t, T::one() - t * t)
    }
    fn asinh(self) -> Self {
        self.chain(self.re.asinh(), (self.re * self.re + T::one()).sqrt().recip())
    }
    fn acosh(self) -> Self {
        self.chain(self.re.acosh(), (self.re * self.re - T::one()).sqrt().recip())
    }
    fn atanh(self) -> Self {
        self.chain(self.re.atanh(), (T::one() - self.re * self.re).recip())
    }
    fn integer_decode(self) -> (u64, i16, i8) {
        self.re.integer_decode()
    }
}

impl<T: Real, const N: usize> Real for Dual<T, N> {
    #[inline]
    fn re(self) -> f64 {
        self.re.re()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    type D = Dual<f64, 2>;

    fn fd(f: impl Fn(f64) -> f64, x: f64) -> f64 {
        let h = 1e-5;
        (-f(x + 2.0 * h) + 8.0 * f(x + h) - 8.0 * f(x - h) + f(x - 2.0 * h)) / (12.0 * h)
    }

    #[test]
    fn elementary_derivatives_match_finite_differences() {
        let x0 = 1.3;
        type Pair = (fn(D) -> D, fn(f64) -> f64);
        let checks: Vec<Pair> = vec![
            (|x| x.sinh() * x.exp(), |x| x.sinh() * x.exp()),
            (|x| x.cosh().acosh(), |x| x.cosh().acosh()),
            (|x| (x * x + D::one()).sqrt() / x.tanh(), |x| (x * x + 1.0).sqrt() / x.tanh()),
            (|x| x.powi(5) - x.ln() * x.atan(), |x| x.powi(5) - x.ln() * x.atan()),
            (|x| x.powf(D::c(2.5)) + x.asinh(), |x| x.powf(2.5) + x.asinh()),
            (|x| (x * D::c(0.5)).atanh() + x.sin() * x.cos(), |x| (x * 0.5).atanh() + x.sin() * x.cos()),
        ];
        for (fd_dual, fr) in checks {
            let y = fd_dual(D::variable(x0, 1));
            assert!((y.re - fr(x0)).abs() < 1e-14 * fr(x0).abs().max(1.0));
            assert!((y.eps[1] - fd(fr, x0)).abs() < 1e-8, "{:?}", y);
            assert_eq!(y.eps[0], 0.0);
        }
    }

    #[test]
    fn atan2_gradient() {
        let y = D::variable(0.4, 0);
        let x = D::variable(-0.7, 1);
        let a = y.atan2(x);
        let r2 = 0.4f64 * 0.4 + 0.7 * 0.7;
        assert!((a.eps[0] - (-0.7) / r2).abs() < 1e-15);
        assert!((a.eps[1] - (-0.4) / r2).abs() < 1e-15);
    }

    #[test]
    fn nested_duals_give_second_derivatives() {
        type DD = Dual<Dual<f64, 1>, 1>;
        let x = DD::seeded(Dual::variable(0.8, 0), [Dual::constant(1.0)]);
        let y = x.sinh() * x;
        // d²/dx² (x sh x) = 2 ch x + x sh x
        let expected = 2.0 * 0.8f64.cosh() + 0.8 * 0.8f64.sinh();
        assert!((y.eps[0].eps[0] - expected).abs() < 1e-14);
    }
}
