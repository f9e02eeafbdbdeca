//! Asymptotic invariants of asymptotically hyperbolic initial data: mass vector,
//! Hamiltonian charges, hyperbolic center of mass, linear and angular momentum,
//! CMC leaf centers and the evolution law of the center.
//!
//! Pointwise evaluators are generic over [`scalar::Real`]; the aliases below fix
//! the scalar to `f64`, which is what the solvers and fits use.

// negated comparisons are deliberate: NaN must fail every range check
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod linalg;
pub mod minkowski;
pub mod scalar;
pub mod sphere;
pub mod frame;
pub mod models;
pub mod charges;
pub mod cmc;
pub mod evolution;

pub type Vector = linalg::Vector<f64>;
pub type Matrix = linalg::Matrix<f64>;
pub type MinkowskiVector = minkowski::MinkowskiVector<f64>;
pub type HyperbolicPoint = minkowski::HyperbolicPoint<f64>;
/// First-order dual number over `f64` with `N` infinitesimals.
pub type Dual<const N: usize> = scalar::Dual<f64, N>;
