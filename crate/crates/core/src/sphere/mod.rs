//! Quadrature and spectral calculus on the unit sphere `S^{n−1}`.

mod grid;
mod harmonics;

use thiserror::Error;

pub use grid::{gauss_gegenbauer, gauss_legendre, sphere_area, SphericalGrid};
pub use harmonics::{real_harmonics, sh_count, sh_degree_order, sh_index, HarmonicBasis};

use crate::linalg::{Matrix, Vector};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SphereError {
    #[error("spectral operations are only available on S² (got S^{dimension})")]
    SpectralUnavailable { dimension: usize },
    #[error("unsupported sphere dimension {dimension}")]
    UnsupportedDimension { dimension: usize },
    #[error("bandlimit {bandlimit} is below the minimum of 4")]
    BandlimitTooSmall { bandlimit: usize },
    #[error("field has {found} values but the grid has {expected} nodes")]
    Mismatch { expected: usize, found: usize },
    #[error("integration requires a scalar field")]
    NotScalar,
    #[error("{given} coefficients exceed the {max} supported by the grid")]
    TooManyCoefficients { given: usize, max: usize },
}

/// Nodal values of a field on a grid; tensors live in the ambient orthonormal
/// frame, restricted to the tangent plane of the sphere.
#[derive(Clone, Debug)]
pub enum SphereField {
    Scalar(Vec<f64>),
    Covector(Vec<Vector<f64>>),
    Tensor(Vec<Matrix<f64>>),
}

impl SphereField {
    pub fn len(&self) -> usize {
        match self {
            Self::Scalar(v) => v.len(),
            Self::Covector(v) => v.len(),
            Self::Tensor(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Samples a scalar function at every node.
    pub fn scalar(grid: &SphericalGrid, f: impl Fn(&Vector<f64>) -> f64) -> Self {
        Self::Scalar(grid.nodes().iter().map(f).collect())
    }

    /// Samples a symmetric tensor, projecting it onto the tangent plane of each node.
    pub fn tensor(grid: &SphericalGrid, f: impl Fn(&Vector<f64>) -> Matrix<f64>) -> Self {
        Self::Tensor(
            grid.nodes()
                .iter()
                .map(|x| {
                    let p = tangent_projector(x);
                    (p * f(x) * p).symmetrize()
                })
                .collect(),
        )
    }

    /// Pointwise `σ`-traces of a tensor field; scalars are returned unchanged.
    pub fn trace(&self) -> Option<Vec<f64>> {
        match self {
            Self::Scalar(v) => Some(v.clone()),
            Self::Tensor(v) => Some(v.iter().map(|m| m.trace()).collect()),
            Self::Covector(_) => None,
        }
    }
}

/// Integral of a scalar field over the sphere.
pub fn integrate(grid: &SphericalGrid, field: &SphereField) -> Result<f64, SphereError> {
    match field {
        SphereField::Scalar(v) => grid.integrate(v),
        _ => Err(SphereError::NotScalar),
    }
}

/// `I − x̊ x̊ᵀ`.
pub fn tangent_projector(x: &Vector<f64>) -> Matrix<f64> {
    Matrix::identity(x.dim()) - x.outer(x)
}
