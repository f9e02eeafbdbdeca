//! Extrinsic geometry of radial graphs `Σ = {r = r̂ + f(x̊)}` in `(M, b + γ)`, `n = 3`.
//!
//! The unit normal is extended off `Σ` as the normalized `g`-gradient of
//! `r − r̂ − f(x̊)`, so its `g`-divergence at `Σ` is the mean curvature. In the
//! frame, `div_g X = Σ D_k X_k + 2 tanh(r/2) x̊·X + ½ X·∇log det G`.

use num_traits::Float;

use crate::frame::{connection, seed_with, TensorJet};
use crate::linalg::{Matrix, Vector};
use crate::models::{ChartData, ModelError};
use crate::scalar::{Dual, Real};

/// Geometry of `Σ` at one node.
#[derive(Clone, Copy, Debug)]
pub struct NodeGeometry {
    pub dir: Vector<f64>,
    /// Coordinate radius `r̂ + f`.
    pub radius: f64,
    /// `H − 2`, evaluated without the cancellation against the limit value.
    pub h_excess: f64,
    /// `dμ_g / dμ_σ`.
    pub area: f64,
    /// `dμ_b / dμ_σ`.
    pub area_b: f64,
    /// `|(∂_r)^T|²_g`.
    pub radial_tangential: f64,
    /// `|Å|²_g`.
    pub traceless: f64,
    /// Trace of the second fundamental form, an independent evaluation of `H`.
    pub trace_a: f64,
    pub unit_normal: Vector<f64>,
}

impl NodeGeometry {
    pub fn mean_curvature(&self) -> f64 {
        2.0 + self.h_excess
    }
}

/// Orthonormal basis of `T_{x̊}S²`.
pub fn tangent_basis(dir: &Vector<f64>) -> [Vector<f64>; 2] {
    let k = (0..3).min_by(|&a, &b| dir[a].abs().total_cmp(&dir[b].abs())).unwrap_or(0);
    let e = Vector::basis(3, k);
    let t1 = (e - *dir * dir[k]).normalize();
    let t2 = Vector::from_fn(3, |i| dir[(i + 1) % 3] * t1[(i + 2) % 3] - dir[(i + 2) % 3] * t1[(i + 1) % 3]);
    [t1, t2]
}

/// Quantities of the graph at one node that depend smoothly on the local jet
/// `(f, ∇f, ∂∇f)`, over any scalar so the jet can carry derivatives.
pub(crate) struct LocalGeometry<S: Real> {
    pub h_excess: S,
    pub area: S,
    rho: S,
    /// Normal extended off `Σ`, with frame derivatives.
    nu: Vector<Dual<S, 3>>,
    gamma: Matrix<Dual<S, 3>>,
    g: Matrix<S>,
    tau: [Vector<S>; 2],
}

pub(crate) fn local_geometry<S: Real>(
    data: &ChartData,
    r_hat: f64,
    dir: &Vector<f64>,
    f: S,
    grad: &Vector<S>,
    jac: &Matrix<S>,
) -> Result<LocalGeometry<S>, ModelError> {
    type D<S> = Dual<S, 3>;
    let rho = S::c(r_hat) + f;
    let dir_s = dir.map(S::c);
    let (rd, xd) = seed_with::<S, 3>(rho, &dir_s);
    let grad_d = Vector::from_fn(3, |a| {
        let mut eps = [S::zero(); 3];
        for (k, e) in eps.iter_mut().enumerate() {
            *e = (0..3).fold(S::zero(), |acc, j| acc + jac[(a, j)] * xd[j].eps[k]);
        }
        D::seeded(grad[a], eps)
    });
    let a = xd - grad_d * rd.sinh().recip();
    let (gamma, _) = data.eval(rd, &xd)?;
    let g = Matrix::identity(3) + gamma;
    let ginv = g.inverse().ok_or(ModelError::IndefiniteMetric { r: rho.re() })?;
    let v = ginv.mul_vec(&a);
    let nu = v * a.dot(&v).sqrt().recip();

    let value = |m: &Matrix<D<S>>| m.map(|x| x.re);
    let (g0, gamma0, ginv0) = (value(&g), value(&gamma), value(&ginv));
    let nu0 = nu.map(|x| x.re);
    let div_frame = (0..3).fold(S::zero(), |acc, k| acc + nu[k].eps[k]);
    let dlogdet = Vector::from_fn(3, |k| ginv0.frobenius(&gamma.map(|x| x.eps[k])));
    let t = (rho * S::c(0.5)).tanh();
    let h_excess = div_frame - S::c(4.0) / (rho.exp() + S::one())
        - t * ((dir_s - nu0).norm_squared() + gamma0.bilinear(&nu0, &nu0))
        + S::c(0.5) * nu0.dot(&dlogdet);

    let sh = rho.sinh();
    let [t1, t2] = tangent_basis(dir).map(|t| t.map(S::c));
    let tau = [dir_s * t1.dot(grad) + t1 * sh, dir_s * t2.dot(grad) + t2 * sh];
    let h = |i: usize, j: usize| g0.bilinear(&tau[i], &tau[j]);
    let area = (h(0, 0) * h(1, 1) - h(0, 1) * h(1, 0)).sqrt();
    Ok(LocalGeometry { h_excess, area, rho, nu, gamma, g: g0, tau })
}

/// Geometry at direction `dir` of the graph with value `f`, tangential gradient
/// `grad` and gradient Jacobian `jac` (see [`crate::sphere::HarmonicBasis`]).
pub fn node_geometry(
    data: &ChartData,
    r_hat: f64,
    dir: &Vector<f64>,
    f: f64,
    grad: &Vector<f64>,
    jac: &Matrix<f64>,
    full: bool,
) -> Result<NodeGeometry, ModelError> {
    let loc = local_geometry(data, r_hat, dir, f, grad, jac)?;
    let (rho, g0, tau) = (loc.rho, loc.g, loc.tau);
    let nu0 = loc.nu.re();
    let area_b = {
        let h = |i: usize, j: usize| tau[i].dot(&tau[j]);
        (h(0, 0) * h(1, 1) - h(0, 1) * h(1, 0)).max(0.0).sqrt()
    };
    let gx = g0.bilinear(dir, &nu0);
    let radial_tangential = (g0.bilinear(dir, dir) - gx * gx).max(0.0);

    let (traceless, trace_a) = if full {
        // ∇^g_k ν = D_k ν + Ω_k ν + C(e_k, ν), C the difference tensor of g and b
        let ginv0 = g0.inverse().ok_or(ModelError::IndefiniteMetric { r: rho })?;
        let jet = TensorJet::from_dual(&loc.gamma);
        let cov = jet.covariant(rho, dir);
        let s = Matrix::from_fn(3, |a, k| {
            let om = connection(rho, dir, &Vector::basis(3, k));
            let mut val = loc.nu[a].eps[k] + om.row(a).dot(&nu0);
            for c in 0..3 {
                let mut ch = 0.0;
                for d in 0..3 {
                    ch += ginv0[(a, d)] * (cov[k][(d, c)] + cov[c][(d, k)] - cov[d][(k, c)]);
                }
                val += 0.5 * ch * nu0[c];
            }
            val
        });
        // g-orthonormal tangent frame of Σ
        let u1 = tau[0] * g0.bilinear(&tau[0], &tau[0]).sqrt().recip();
        let w = tau[1] - u1 * g0.bilinear(&u1, &tau[1]);
        let u2 = w * g0.bilinear(&w, &w).sqrt().recip();
        let u = [u1, u2];
        let gs = g0 * s;
        let amat = Matrix::from_fn(2, |i, j| 0.5 * (gs.bilinear(&u[i], &u[j]) + gs.bilinear(&u[j], &u[i])));
        // trace-free part taken entrywise; |A|² − tr²/2 loses everything to cancellation
        let half_diff = 0.5 * (amat[(0, 0)] - amat[(1, 1)]);
        (2.0 * (half_diff * half_diff + amat[(0, 1)] * amat[(0, 1)]), amat.trace())
    } else {
        (0.0, 0.0)
    };

    Ok(NodeGeometry {
        dir: *dir,
        radius: rho,
        h_excess: loc.h_excess,
        area: loc.area,
        area_b,
        radial_tangential,
        traceless: traceless.max(0.0),
        trace_a,
        unit_normal: nu0,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn flat(r: f64, dir: &Vector<f64>, f: f64, grad: &Vector<f64>, jac: &Matrix<f64>) -> NodeGeometry {
        let d = ChartData::hyperbolic(3).unwrap();
        node_geometry(&d, r, dir, f, grad, jac, true).unwrap()
    }

    #[test]
    fn coordinate_spheres() {
        let dir = Vector::from_slice(&[0.36, 0.48, 0.8]);
        for (r, c) in [(3.0f64, 0.0), (3.0, 0.25), (7.5, -0.4)] {
            let g = flat(r, &dir, c, &Vector::zeros(3), &Matrix::zeros(3));
            let expected = 2.0 / (r + c).tanh();
            assert!((g.mean_curvature() - expected).abs() < 1e-14);
            assert!((g.trace_a - expected).abs() < 1e-12);
            assert!(g.traceless < 1e-24 && g.radial_tangential < 1e-24);
            assert!((g.area / (r + c).sinh().powi(2) - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn tangent_basis_is_orthonormal() {
        let dir = Vector::from_slice(&[0.0, 0.6, -0.8]);
        let [a, b] = tangent_basis(&dir);
        for (u, v, e) in [(a, a, 1.0), (b, b, 1.0), (a, b, 0.0), (a, dir, 0.0), (b, dir, 0.0)] {
            assert!((u.dot(&v) - e).abs() < 1e-15);
        }
    }
}
