//! Energy and momentum densities of the constraint equations with `Λ = −n(n−1)/2`.
//!
//! The oracle works in normal coordinates `y = r x̊` about the origin, where `b`
//! is smooth, and differentiates the metric twice with nested dual numbers. The
//! momentum density is returned as a frame covector.

use num_traits::Float;

use super::{ChartData, ModelError};
use crate::frame::normal_coordinate_frame;
use crate::linalg::{Matrix, Vector};
use crate::scalar::{Dual, Real};

#[derive(Clone, Copy, Debug)]
pub struct ConstraintDensities {
    /// `μ = Scal_g + n(n−1) − (tr_g k)² + |k|²_g`.
    pub mu: f64,
    /// `J = div_g k − d(tr_g k)` in the orthonormal frame of `b`.
    pub j: Vector<f64>,
}

/// `(μ, J)` of `data` at `(r, x̊)`.
pub fn constraint_densities(data: &ChartData, r: f64, dir: &Vector<f64>) -> Result<ConstraintDensities, ModelError> {
    let y = *dir * r;
    match data.dim() {
        3 => cartesian::<3>(&y, |r, d| data.eval(r, d)),
        4 => cartesian::<4>(&y, |r, d| data.eval(r, d)),
        5 => cartesian::<5>(&y, |r, d| data.eval(r, d)),
        _ => cartesian::<6>(&y, |r, d| data.eval(r, d)),
    }
}

/// `div_b κ − d(tr_b κ)` in the frame at `(r, x̊)`, the flat-space part of `J`.
pub fn momentum_density_b(data: &ChartData, r: f64, dir: &Vector<f64>) -> Result<Vector<f64>, ModelError> {
    Ok(data.jet(r, dir)?.kappa.constraint_covector(r, dir))
}

type D1<const N: usize> = Dual<f64, N>;
type D2<const N: usize> = Dual<D1<N>, N>;
type Eval<const N: usize> = Result<(Matrix<D2<N>>, Matrix<D2<N>>), ModelError>;

fn cartesian<const N: usize>(
    y: &Vector<f64>,
    eval: impl Fn(D2<N>, &Vector<D2<N>>) -> Eval<N>,
) -> Result<ConstraintDensities, ModelError> {
    let n = y.dim();
    let yd = Vector::from_fn(n, |i| {
        let mut e = [D1::<N>::constant(0.0); N];
        e[i] = D1::constant(1.0);
        D2::seeded(D1::variable(y[i], i), e)
    });
    let r = yd.norm();
    let dir = yd * r.recip();
    let (gamma, kappa) = eval(r, &dir)?;
    let jac = normal_coordinate_frame(&yd);
    let g = jac * (Matrix::identity(n) + gamma) * jac;
    let k = jac * kappa * jac;

    // first level: values carrying one derivative
    let g1 = g.map(|x| x.re);
    let dg: Vec<Matrix<D1<N>>> = (0..n).map(|a| g.map(|x| x.eps[a])).collect();
    let ginv1 = g1.inverse().ok_or(ModelError::IndefiniteMetric { r: r.re() })?;
    let gamma1: Vec<Matrix<D1<N>>> = (0..n)
        .map(|a| {
            Matrix::from_fn(n, |b, c| {
                let mut s = D1::constant(0.0);
                for d in 0..n {
                    s += ginv1[(a, d)] * (dg[b][(d, c)] + dg[c][(d, b)] - dg[d][(b, c)]);
                }
                s * D1::constant(0.5)
            })
        })
        .collect();
    let ginv = ginv1.re();
    let chr: Vec<Matrix<f64>> = gamma1.iter().map(|m| m.re()).collect();
    let dchr = |e: usize, a: usize, b: usize, c: usize| gamma1[a][(b, c)].eps[e];

    let ricci = Matrix::from_fn(n, |b, d| {
        let mut s = 0.0;
        for a in 0..n {
            s += dchr(a, a, b, d) - dchr(d, a, a, b);
            for e in 0..n {
                s += chr[a][(a, e)] * chr[e][(b, d)] - chr[a][(d, e)] * chr[e][(a, b)];
            }
        }
        s
    });
    let scal = ginv.frobenius(&ricci);

    let k0 = k.map(|x| x.re.re);
    let dk: Vec<Matrix<f64>> = (0..n).map(|a| k.map(|x| x.eps[a].re)).collect();
    let dginv: Vec<Matrix<f64>> = (0..n).map(|a| -(ginv * dg[a].re() * ginv)).collect();
    let tr = ginv.frobenius(&k0);
    let mixed = ginv * k0;
    let norm2 = (mixed * mixed).trace();
    let mu = scal + (n * (n - 1)) as f64 - tr * tr + norm2;

    // ∇_a k_{bj} = ∂_a k_{bj} − Γ^c_{ab} k_{cj} − Γ^c_{aj} k_{bc}
    let cov = |a: usize, b: usize, j: usize| {
        let mut s = dk[a][(b, j)];
        for c in 0..n {
            s -= chr[c][(a, b)] * k0[(c, j)] + chr[c][(a, j)] * k0[(b, c)];
        }
        s
    };
    let j_cart = Vector::from_fn(n, |j| {
        let mut div = 0.0;
        for a in 0..n {
            for b in 0..n {
                div += ginv[(a, b)] * cov(a, b, j);
            }
        }
        let dtr = dginv[j].frobenius(&k0) + ginv.frobenius(&dk[j]);
        div - dtr
    });
    // ω(∂_i) = ω_frame · J e_i
    let jac0 = jac.map(|x| x.re.re);
    let j = jac0.inverse().ok_or(ModelError::IndefiniteMetric { r: r.re() })?.transpose().mul_vec(&j_cart);
    Ok(ConstraintDensities { mu, j })
}
