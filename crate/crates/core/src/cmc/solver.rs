//! Newton solver for area-constrained CMC graphs, continuation and centers.

use std::f64::consts::PI;

use log::{debug, warn};
use nalgebra::{DMatrix, DVector, SymmetricEigen};
use rayon::prelude::*;

use super::geometry::{local_geometry, node_geometry, NodeGeometry};
use super::{CmcError, CmcLeaf, CmcSettings, LeafCenter};
use crate::linalg::{Matrix, Vector};
use crate::minkowski::{surface_center, HyperbolicPoint};
use crate::models::ChartData;
use crate::scalar::Dual;
use crate::sphere::{sh_count, HarmonicBasis, SphericalGrid};

/// CMC leaf solver for one data set.
#[derive(Clone, Debug)]
pub struct CmcSolver {
    data: ChartData,
    basis: HarmonicBasis,
    settings: CmcSettings,
}

/// Newton pseudo-inverse with the projector onto its dropped directions.
type Factored = (DMatrix<f64>, DMatrix<f64>);

/// Newton step size below which the graph counts as settled.
const STEP_FLOOR: f64 = 1e-13;

fn coefficient_norm(c: &[f64]) -> f64 {
    c.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Residual vector and the surface it was computed from.
struct Evaluation {
    residual: DVector<f64>,
    nodes: Vec<NodeGeometry>,
    /// `sup |H − H̄|`.
    sup: f64,
}

/// Leaves computed along a schedule, with the failure that stopped it, if any.
#[derive(Debug)]
pub struct Foliation {
    pub leaves: Vec<CmcLeaf>,
    pub error: Option<CmcError>,
}

impl CmcSolver {
    pub fn new(data: ChartData, settings: CmcSettings) -> Result<Self, CmcError> {
        if data.dim() != 3 {
            return Err(CmcError::Dimension(data.dim()));
        }
        if settings.quadrature < settings.bandlimit || settings.bandlimit < 1 {
            return Err(CmcError::Settings("quadrature bandlimit must be at least the graph bandlimit".into()));
        }
        if !(settings.tolerance > 0.0 && settings.svd_cutoff > 0.0) {
            return Err(CmcError::Settings("tolerances must be positive".into()));
        }
        let grid = SphericalGrid::new(2, settings.quadrature)?;
        let basis = HarmonicBasis::new(&grid, settings.bandlimit)?.with_derivatives();
        Ok(Self { data, basis, settings })
    }

    pub fn settings(&self) -> &CmcSettings {
        &self.settings
    }

    pub fn data(&self) -> &ChartData {
        &self.data
    }

    pub fn basis(&self) -> &HarmonicBasis {
        &self.basis
    }

    /// Number of harmonic coefficients of `f`.
    pub fn unknowns(&self) -> usize {
        sh_count(self.settings.bandlimit)
    }

    /// Geometry of `{r = r̂ + f}` at every quadrature node.
    pub fn surface(&self, r_hat: f64, coeffs: &[f64], full: bool) -> Result<Vec<NodeGeometry>, CmcError> {
        let nodes = self.basis.grid().nodes();
        (0..nodes.len())
            .into_par_iter()
            .map(|i| {
                let (f, grad, jac) = self.basis.jet(coeffs, i);
                let inner = self.data.inner_radius();
                if r_hat + f <= inner {
                    return Err(CmcError::Model(crate::models::ModelError::InsideHorizon { r: r_hat + f, r_min: inner }));
                }
                Ok(node_geometry(&self.data, r_hat, &nodes[i], f, &grad, &jac, full)?)
            })
            .collect()
    }

    /// Pointwise mean curvature of `{r = r̂ + f}` on the quadrature grid.
    pub fn mean_curvature(&self, r_hat: f64, coeffs: &[f64]) -> Result<Vec<f64>, CmcError> {
        Ok(self.surface(r_hat, coeffs, false)?.iter().map(NodeGeometry::mean_curvature).collect())
    }

    fn evaluate(&self, r_hat: f64, coeffs: &[f64], full: bool) -> Result<Evaluation, CmcError> {
        let nodes = self.surface(r_hat, coeffs, full)?;
        let k = self.unknowns();
        let w = self.basis.grid().weights();
        let sh2 = r_hat.sinh().powi(2);
        let mut residual = DVector::zeros(k);
        let mut area = 0.0;
        let mut mean = 0.0;
        for (i, node) in nodes.iter().enumerate() {
            area += w[i] * node.area;
            mean += w[i] * node.h_excess;
            let ys = self.basis.values_at(i);
            for j in 1..k {
                residual[j] += w[i] * node.h_excess * ys[j];
            }
        }
        mean /= 4.0 * PI;
        residual *= sh2;
        residual[0] = area / (4.0 * PI * sh2) - 1.0;
        let sup = nodes.iter().map(|n| (n.h_excess - mean).abs()).fold(0.0, f64::max);
        Ok(Evaluation { residual, nodes, sup })
    }

    /// Area constraint and non-constant harmonic content of `H`, scaled by `sh²r̂`.
    pub fn residual(&self, r_hat: f64, coeffs: &[f64]) -> Result<Vec<f64>, CmcError> {
        Ok(self.evaluate(r_hat, coeffs, false)?.residual.as_slice().to_vec())
    }

    /// Jacobian of [`Self::residual`] in the coefficients. Each node's `H − 2` and
    /// area density depend only on the local jet `(f, ∇f, ∂∇f)`; their exact jet
    /// derivatives are chained with the harmonic tables.
    pub fn jacobian(&self, r_hat: f64, coeffs: &[f64]) -> Result<DMatrix<f64>, CmcError> {
        type P = Dual<f64, 13>;
        let k = self.unknowns();
        let grid = self.basis.grid();
        let m = grid.len();
        let w = grid.weights();
        let sh2 = r_hat.sinh().powi(2);
        let rows = (0..m)
            .into_par_iter()
            .map(|i| {
                let (f, grad, jac) = self.basis.jet(coeffs, i);
                let gp = Vector::from_fn(3, |a| P::variable(grad[a], 1 + a));
                let jp = Matrix::from_fn(3, |a, b| P::variable(jac[(a, b)], 4 + 3 * a + b));
                let loc = local_geometry(&self.data, r_hat, &grid.nodes()[i], P::variable(f, 0), &gp, &jp)?;
                let (dh, da) = (loc.h_excess.eps, loc.area.eps);
                let (ys, gs, js) = (self.basis.values_at(i), self.basis.gradients_at(i), self.basis.jacobians_at(i));
                let chain = |d: &[f64; 13], j: usize| {
                    let mut v = d[0] * ys[j];
                    for a in 0..3 {
                        v += d[1 + a] * gs[j][a];
                        for b in 0..3 {
                            v += d[4 + 3 * a + b] * js[j][(a, b)];
                        }
                    }
                    v
                };
                let h_row: Vec<f64> = (0..k).map(|j| chain(&dh, j)).collect();
                let a_row: Vec<f64> = (0..k).map(|j| chain(&da, j)).collect();
                Ok((h_row, a_row))
            })
            .collect::<Result<Vec<_>, CmcError>>()?;
        let dh = DMatrix::from_fn(m, k, |i, j| rows[i].0[j]);
        let weighted = DMatrix::from_fn(k, m, |j, i| sh2 * w[i] * self.basis.values_at(i)[j]);
        let mut out = weighted * dh;
        for j in 0..k {
            out[(0, j)] = (0..m).map(|i| w[i] * rows[i].1[j]).sum::<f64>() / (4.0 * PI * sh2);
        }
        Ok(out)
    }

    /// Pseudo-inverse of the Jacobian and the projector onto its dropped singular
    /// directions.
    fn pseudo_inverse(&self, jac: &DMatrix<f64>) -> Factored {
        let svd = jac.clone().svd(true, true);
        let smax = svd.singular_values.max();
        let cut = self.settings.svd_cutoff * smax;
        let v_t = svd.v_t.as_ref().expect("singular vectors were computed");
        let k = jac.ncols();
        let mut null = DMatrix::zeros(k, k);
        for (i, s) in svd.singular_values.iter().enumerate() {
            if *s <= cut {
                let v = v_t.row(i).transpose();
                null += &v * v.transpose();
            }
        }
        (svd.pseudo_inverse(cut).expect("singular vectors were computed"), null)
    }

    /// Solves for the leaf of area radius `r̂`, starting from `guess`.
    pub fn solve_leaf(&self, r_hat: f64, guess: &[f64]) -> Result<CmcLeaf, CmcError> {
        self.solve_with(r_hat, guess, &mut None)
    }

    fn solve_with(&self, r_hat: f64, guess: &[f64], cache: &mut Option<Factored>) -> Result<CmcLeaf, CmcError> {
        let k = self.unknowns();
        let c: Vec<f64> = (0..k).map(|j| guess.get(j).copied().unwrap_or(0.0)).collect();
        let mut iterations = 0;
        let mut c = self.newton(r_hat, c, cache, &mut iterations)?;
        // on degenerate data the solutions form a family; keep the one of least norm
        for _ in 0..6 {
            let (pinv, null) = self.pseudo_inverse(&self.jacobian(r_hat, &c)?);
            let drift = &null * DVector::from_column_slice(&c);
            *cache = Some((pinv, null));
            if drift.norm() <= 1e-14 * (1.0 + coefficient_norm(&c)) {
                break;
            }
            for (x, d) in c.iter_mut().zip(drift.iter()) {
                *x -= d;
            }
            c = self.newton(r_hat, c, cache, &mut iterations)?;
        }
        self.finish(r_hat, c, iterations)
    }

    fn newton(
        &self,
        r_hat: f64,
        mut c: Vec<f64>,
        cache: &mut Option<Factored>,
        iterations: &mut usize,
    ) -> Result<Vec<f64>, CmcError> {
        let tol = self.settings.tolerance;
        let converged = |e: &Evaluation| e.sup < tol && e.residual[0].abs() < tol;
        let norm = |e: &Evaluation| e.residual.norm();
        let mut eval = self.evaluate(r_hat, &c, false)?;
        let mut fresh = false;
        let start = *iterations;
        // H is flat in f to order sh⁻²r̂, so a small residual alone leaves f short by
        // up to tol·sh²r̂; iterate on until the step is negligible as well
        let mut settled = false;
        let mut last_step = f64::INFINITY;
        while *iterations - start < self.settings.max_iterations && !(settled && converged(&eval)) {
            if cache.is_none() {
                *cache = Some(self.pseudo_inverse(&self.jacobian(r_hat, &c)?));
                fresh = true;
            }
            let (pinv, null) = cache.as_ref().expect("just filled");
            let step = pinv * &eval.residual + null * DVector::from_column_slice(&c);
            *iterations += 1;
            let mut lambda = 1.0;
            let mut accepted = None;
            for _ in 0..8 {
                let trial: Vec<f64> = c.iter().zip(step.iter()).map(|(a, d)| a - lambda * d).collect();
                if let Ok(e) = self.evaluate(r_hat, &trial, false) {
                    if norm(&e) < norm(&eval) || converged(&e) {
                        accepted = Some((trial, e));
                        break;
                    }
                }
                lambda *= 0.5;
            }
            match accepted {
                Some((trial, e)) => {
                    let ratio = norm(&e) / norm(&eval).max(f64::MIN_POSITIVE);
                    c = trial;
                    eval = e;
                    // slow contraction with a stale Jacobian triggers a refresh
                    if ratio > 0.25 && !fresh && !converged(&eval) {
                        *cache = None;
                    }
                    fresh = false;
                    let taken = step.norm() * lambda;
                    // once converged, a step that stops shrinking is roundoff
                    settled = taken < STEP_FLOOR * (1.0 + coefficient_norm(&c))
                        || (converged(&eval) && taken > 0.5 * last_step);
                    last_step = taken;
                    if settled && !converged(&eval) {
                        break;
                    }
                }
                None if !fresh && !converged(&eval) => *cache = None,
                None => break,
            }
        }
        if !converged(&eval) {
            return Err(CmcError::NotConverged {
                r_hat,
                residual: eval.sup.max(eval.residual[0].abs()),
                iterations: *iterations,
            });
        }
        Ok(c)
    }

    fn finish(&self, r_hat: f64, coeffs: Vec<f64>, iterations: usize) -> Result<CmcLeaf, CmcError> {
        let eval = self.evaluate(r_hat, &coeffs, true)?;
        let w = self.basis.grid().weights();
        let nodes = &eval.nodes;
        let area: f64 = nodes.iter().zip(w).map(|(n, w)| w * n.area).sum();
        let mean_h = 2.0 + nodes.iter().zip(w).map(|(n, w)| w * n.area * n.h_excess).sum::<f64>() / area;
        let integral = |f: &dyn Fn(&NodeGeometry) -> f64| nodes.iter().zip(w).map(|(n, w)| w * n.area * f(n)).sum::<f64>();
        let samples = |b: bool| -> Vec<(HyperbolicPoint<f64>, f64)> {
            nodes
                .iter()
                .zip(w)
                .map(|(n, w)| (HyperbolicPoint { r: n.radius, dir: n.dir }, w * if b { n.area_b } else { n.area }))
                .collect()
        };
        let (c, z) = surface_center(&samples(false))?;
        let (c_b, z_b) = surface_center(&samples(true))?;
        let gap = (z.r - z_b.r).abs();
        if gap > 1e-3 {
            debug!("leaf r̂ = {r_hat}: g- and b-centers differ by {gap:.3e} in radius");
        }
        let radii = nodes.iter().map(|n| n.radius);
        let inner = radii.clone().fold(f64::INFINITY, f64::min);
        let outer = radii.fold(f64::NEG_INFINITY, f64::max);
        Ok(CmcLeaf {
            r_hat,
            mean_curvature: mean_h,
            residual: eval.sup,
            iterations,
            area,
            inner_radius: inner,
            outer_radius: outer,
            sup_f: nodes.iter().map(|n| (n.radius - r_hat).abs()).fold(0.0, f64::max),
            roundness_radial: integral(&|n| n.radial_tangential),
            roundness_traceless: integral(&|n| n.traceless),
            center: LeafCenter { c, z, c_b, z_b },
            coeffs,
        })
    }

    /// Continuation along an increasing schedule; each leaf seeds the next, and a
    /// failed step is retried after inserting intermediate radii.
    pub fn foliate(&self, schedule: &[f64], guess: &[f64]) -> Result<Foliation, CmcError> {
        if schedule.is_empty() || schedule.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(CmcError::Schedule("radii must be increasing".into()));
        }
        let mut leaves: Vec<CmcLeaf> = Vec::with_capacity(schedule.len());
        let mut seed = guess.to_vec();
        let mut cache = None;
        let mut last: Option<f64> = None;
        for &target in schedule {
            let mut halvings = 0;
            let mut current = target;
            loop {
                match self.solve_with(current, &seed, &mut cache) {
                    Ok(leaf) => {
                        seed = leaf.coeffs.clone();
                        last = Some(current);
                        if current == target {
                            leaves.push(leaf);
                            break;
                        }
                        current = target;
                    }
                    Err(e) => {
                        cache = None;
                        let Some(prev) = last.filter(|_| halvings < self.settings.max_halvings) else {
                            warn!("foliation stopped at r̂ = {current}: {e}");
                            return Ok(Foliation { leaves, error: Some(e) });
                        };
                        halvings += 1;
                        current = 0.5 * (prev + current);
                        debug!("retrying continuation at intermediate r̂ = {current}");
                    }
                }
            }
        }
        Ok(Foliation { leaves, error: None })
    }

    /// Smallest eigenvalue of the symmetrized linearization restricted to
    /// non-constant modes, in units where the coordinate sphere of `H³` has
    /// eigenvalues `ℓ(ℓ+1) − 2`.
    pub fn stability(&self, leaf: &CmcLeaf) -> Result<f64, CmcError> {
        let jac = self.jacobian(leaf.r_hat, &leaf.coeffs)?;
        let k = jac.nrows();
        let sub = jac.view((1, 1), (k - 1, k - 1)).into_owned();
        let sym = (&sub + sub.transpose()) * 0.5;
        Ok(SymmetricEigen::new(sym).eigenvalues.min())
    }
}

/// Extrapolated limit of leaf centers.
#[derive(Clone, Debug, PartialEq)]
pub struct CenterLimit {
    pub point: HyperbolicPoint<f64>,
    /// Change of the extrapolated limit when the innermost leaf is dropped.
    pub error: f64,
    pub cauchy: bool,
}

/// Fits `z_r̂ = z∞ + c e^{−r̂}` to the polar vectors `r x̊` of the centers.
pub fn center_limit(leaves: &[CmcLeaf], tolerance: f64) -> Result<CenterLimit, CmcError> {
    if leaves.len() < 3 {
        return Err(CmcError::Schedule(format!("{} leaves, need at least 3", leaves.len())));
    }
    let fit = |ls: &[CmcLeaf]| -> Vector<f64> {
        let a = DMatrix::from_fn(ls.len(), 2, |i, j| if j == 0 { 1.0 } else { (-ls[i].r_hat).exp() });
        let svd = a.svd(true, true);
        Vector::from_fn(3, |d| {
            let b = DVector::from_fn(ls.len(), |i, _| ls[i].center.z.dir[d] * ls[i].center.z.r);
            svd.solve(&b, 1e-14).map(|x| x[0]).unwrap_or(f64::NAN)
        })
    };
    let all = fit(leaves);
    let tail = fit(&leaves[1..]);
    let error = (all - tail).norm();
    Ok(CenterLimit { point: HyperbolicPoint::from_polar_vector(&all), error, cauchy: error <= tolerance })
}
