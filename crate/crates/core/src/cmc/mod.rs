//! Constant mean curvature spheres near infinity of three-dimensional data.
//!
//! Leaves are radial graphs `{r = r̂ + f(x̊)}` indexed by the area radius `r̂`,
//! `|Σ|_g = 4π sh²r̂`, with `f` expanded in real spherical harmonics.

mod geometry;
mod solver;

use serde::Serialize;
use thiserror::Error;

pub use geometry::{node_geometry, tangent_basis, NodeGeometry};
pub use solver::{center_limit, CenterLimit, CmcSolver, Foliation};

use crate::linalg::Vector;
use crate::minkowski::{HyperbolicPoint, MinkowskiError};
use crate::models::ModelError;
use crate::sphere::SphereError;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CmcError {
    #[error("CMC leaves are only constructed for n = 3, got n = {0}")]
    Dimension(usize),
    #[error("Newton iteration at r̂ = {r_hat} stopped after {iterations} steps with residual {residual:.3e}")]
    NotConverged { r_hat: f64, residual: f64, iterations: usize },
    #[error("invalid leaf schedule: {0}")]
    Schedule(String),
    #[error("invalid solver settings: {0}")]
    Settings(String),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Sphere(#[from] SphereError),
    #[error(transparent)]
    Minkowski(#[from] MinkowskiError),
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CmcSettings {
    /// Harmonic bandlimit of `f`.
    pub bandlimit: usize,
    /// Bandlimit of the quadrature grid.
    pub quadrature: usize,
    /// Sup-norm tolerance on `H − H̄`.
    pub tolerance: f64,
    pub max_iterations: usize,
    /// Relative singular-value cutoff of the Newton pseudo-inverse.
    pub svd_cutoff: f64,
    /// Number of step halvings in `r̂` allowed per leaf during continuation.
    pub max_halvings: usize,
}

impl Default for CmcSettings {
    fn default() -> Self {
        Self {
            bandlimit: 12,
            quadrature: 24,
            tolerance: 1e-10,
            max_iterations: 30,
            svd_cutoff: 1e-9,
            max_halvings: 4,
        }
    }
}

/// Hyperbolic center of a leaf for the induced measures of `g` and of `b`.
#[derive(Clone, Debug, PartialEq)]
pub struct LeafCenter {
    pub c: Vector<f64>,
    pub z: HyperbolicPoint<f64>,
    pub c_b: Vector<f64>,
    pub z_b: HyperbolicPoint<f64>,
}

#[derive(Clone, Debug)]
pub struct CmcLeaf {
    pub r_hat: f64,
    pub coeffs: Vec<f64>,
    pub mean_curvature: f64,
    /// `sup |H − H̄|` on the quadrature grid.
    pub residual: f64,
    pub iterations: usize,
    pub area: f64,
    /// `r̲_Σ` and `r̄_Σ`.
    pub inner_radius: f64,
    pub outer_radius: f64,
    pub sup_f: f64,
    /// `∫_Σ |(∂_r)^T|² dμ_g`.
    pub roundness_radial: f64,
    /// `∫_Σ |Å|² dμ_g`.
    pub roundness_traceless: f64,
    pub center: LeafCenter,
}

impl CmcLeaf {
    pub fn radius_gap(&self) -> f64 {
        self.outer_radius - self.inner_radius
    }
}
