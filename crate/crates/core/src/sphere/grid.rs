use nalgebra::{DMatrix, SymmetricEigen};

use super::SphereError;
use crate::linalg::{Vector, MAX_DIM};

/// Product quadrature on the unit sphere `S^d ⊂ ℝ^{d+1}`.
///
/// Nodes are built recursively: `x = (√(1−t²) y, t)` with `y` on `S^{d−1}` and `t`
/// a Gauss node for the weight `(1−t²)^{(d−2)/2}`; the base circle uses `2L+2`
/// equispaced angles. With `L+1` nodes per polar factor the rule integrates every
/// polynomial of degree `≤ 2L+1` exactly, so products of two harmonics of degree
/// `≤ L` are integrated exactly.
///
/// On `S²` the node order is polar-major: index `= i_θ (2L+2) + i_φ`, with
/// `x̊ = (sin θ cos φ, sin θ sin φ, cos θ)`.
#[derive(Clone, Debug)]
pub struct SphericalGrid {
    dimension: usize,
    bandlimit: usize,
    nodes: Vec<Vector<f64>>,
    weights: Vec<f64>,
}

impl SphericalGrid {
    /// Builds the product grid on `S^dimension` exact for harmonics up to `bandlimit`.
    pub fn new(dimension: usize, bandlimit: usize) -> Result<Self, SphereError> {
        if dimension < 2 || dimension + 1 > MAX_DIM {
            return Err(SphereError::UnsupportedDimension { dimension });
        }
        if bandlimit < 4 {
            return Err(SphereError::BandlimitTooSmall { bandlimit });
        }
        let nphi = 2 * bandlimit + 2;
        let mut nodes: Vec<Vec<f64>> = (0..nphi)
            .map(|k| {
                let phi = 2.0 * std::f64::consts::PI * (k as f64) / (nphi as f64);
                vec![phi.cos(), phi.sin()]
            })
            .collect();
        let mut weights = vec![2.0 * std::f64::consts::PI / nphi as f64; nphi];
        for d in 2..=dimension {
            let (ts, ws) = if d == 2 {
                gauss_legendre(bandlimit + 1)
            } else {
                gauss_gegenbauer(bandlimit + 1, (d as f64 - 2.0) / 2.0)
            };
            let mut next_nodes = Vec::with_capacity(nodes.len() * ts.len());
            let mut next_weights = Vec::with_capacity(nodes.len() * ts.len());
            // polar-major ordering: the new polar index varies slowest
            for (&t, &wt) in ts.iter().rev().zip(ws.iter().rev()) {
                let s = (1.0 - t * t).max(0.0).sqrt();
                for (y, &wy) in nodes.iter().zip(&weights) {
                    let mut x: Vec<f64> = y.iter().map(|c| c * s).collect();
                    x.push(t);
                    next_nodes.push(x);
                    next_weights.push(wt * wy);
                }
            }
            nodes = next_nodes;
            weights = next_weights;
        }
        let nodes = nodes
            .into_iter()
            .map(|x| {
                let v = Vector::from_slice(&x);
                v * v.norm().recip()
            })
            .collect();
        Ok(Self { dimension, bandlimit, nodes, weights })
    }

    /// Dimension `d` of the sphere `S^d`.
    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn bandlimit(&self) -> usize {
        self.bandlimit
    }

    /// Highest total polynomial degree integrated exactly.
    pub fn exact_degree(&self) -> usize {
        2 * self.bandlimit + 1
    }

    pub fn nodes(&self) -> &[Vector<f64>] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Number of polar and azimuthal nodes on `S²`.
    pub fn product_shape(&self) -> (usize, usize) {
        (self.bandlimit + 1, 2 * self.bandlimit + 2)
    }

    /// Weighted sum of nodal values.
    pub fn integrate(&self, values: &[f64]) -> Result<f64, SphereError> {
        if values.len() != self.len() {
            return Err(SphereError::Mismatch { expected: self.len(), found: values.len() });
        }
        Ok(values.iter().zip(&self.weights).map(|(v, w)| v * w).sum())
    }

    /// Integrates a function evaluated at every node.
    pub fn integrate_fn(&self, f: impl Fn(&Vector<f64>) -> f64) -> f64 {
        self.nodes.iter().zip(&self.weights).map(|(x, w)| w * f(x)).sum()
    }
}

/// Area of the unit sphere `S^d`.
pub fn sphere_area(d: usize) -> f64 {
    // |S^d| = 2 π^{(d+1)/2} / Γ((d+1)/2)
    let half = (d + 1) as f64 / 2.0;
    2.0 * std::f64::consts::PI.powf(half) / gamma_half_integer(d + 1)
}

/// `Γ(k/2)` for positive integers `k`.
fn gamma_half_integer(k: usize) -> f64 {
    let mut g = if k.is_multiple_of(2) { 1.0 } else { std::f64::consts::PI.sqrt() };
    let mut x = if k.is_multiple_of(2) { 1.0 } else { 0.5 };
    while x < k as f64 / 2.0 - 1e-12 {
        g *= x;
        x += 1.0;
    }
    g
}

/// Gauss–Legendre nodes and weights on `[−1, 1]`, ascending, by Newton iteration.
pub fn gauss_legendre(count: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; count];
    let mut weights = vec![0.0; count];
    let n = count as f64;
    for i in 0..count.div_ceil(2) {
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (n + 0.5)).cos();
        let mut dp = 1.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(count, z);
            dp = d;
            let dz = p / d;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(count, z);
        if d.is_finite() {
            dp = d;
        }
        let w = 2.0 / ((1.0 - z * z) * dp * dp);
        nodes[i] = -z;
        nodes[count - 1 - i] = z;
        weights[i] = w;
        weights[count - 1 - i] = w;
    }
    (nodes, weights)
}

fn legendre_with_derivative(n: usize, z: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, z);
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * z * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (z * p1 - p0) / (z * z - 1.0);
    (p1, d)
}

/// Gauss nodes for the weight `(1−t²)^λ` by the Golub–Welsch eigenvalue method.
pub fn gauss_gegenbauer(count: usize, lambda: f64) -> (Vec<f64>, Vec<f64>) {
    let mu = lambda + 0.5;
    let mut jacobi = DMatrix::zeros(count, count);
    for k in 1..count {
        let kf = k as f64;
        let beta = kf * (kf + 2.0 * mu - 1.0) / (4.0 * (kf + mu) * (kf + mu - 1.0));
        jacobi[(k, k - 1)] = beta.sqrt();
        jacobi[(k - 1, k)] = beta.sqrt();
    }
    // ∫(1−t²)^λ dt = √π Γ(λ+1) / Γ(λ+3/2), with 2λ an integer here
    let two_lambda = (2.0 * lambda).round() as usize;
    let mu0 = std::f64::consts::PI.sqrt() * gamma_half_integer(two_lambda + 2)
        / gamma_half_integer(two_lambda + 3);
    let eig = SymmetricEigen::new(jacobi);
    let mut pairs: Vec<(f64, f64)> = (0..count)
        .map(|i| (eig.eigenvalues[i], mu0 * eig.eigenvectors[(0, i)].powi(2)))
        .collect();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    pairs.into_iter().unzip()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn legendre_rule_integrates_polynomials() {
        let (t, w) = gauss_legendre(7);
        for k in 0..=13 {
            let q: f64 = t.iter().zip(&w).map(|(t, w)| w * t.powi(k)).sum();
            let exact = if k % 2 == 1 { 0.0 } else { 2.0 / (k as f64 + 1.0) };
            assert!((q - exact).abs() < 1e-14, "degree {k}: {q} vs {exact}");
        }
    }

    #[test]
    fn gegenbauer_rule_matches_weight_moments() {
        let (t, w) = gauss_gegenbauer(6, 0.5);
        // ∫ t² √(1−t²) dt = π/8
        let q: f64 = t.iter().zip(&w).map(|(t, w)| w * t * t).sum();
        assert!((q - PI / 8.0).abs() < 1e-13);
        let total: f64 = w.iter().sum();
        assert!((total - PI / 2.0).abs() < 1e-13);
    }

    #[test]
    fn sphere_areas() {
        assert!((sphere_area(1) - 2.0 * PI).abs() < 1e-14);
        assert!((sphere_area(2) - 4.0 * PI).abs() < 1e-14);
        assert!((sphere_area(3) - 2.0 * PI * PI).abs() < 1e-13);
    }

    #[test]
    fn three_sphere_grid_weights() {
        let g = SphericalGrid::new(3, 4).unwrap();
        let total: f64 = g.weights().iter().sum();
        assert!((total - 2.0 * PI * PI).abs() < 1e-12);
        let m = g.integrate_fn(|x| x[3] * x[3]);
        assert!((m - PI * PI / 2.0).abs() < 1e-12);
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(SphericalGrid::new(1, 8).is_err());
        assert!(SphericalGrid::new(2, 3).is_err());
    }
}
