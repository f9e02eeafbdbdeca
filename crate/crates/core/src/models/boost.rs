//! Pullback of chart data by the isometry `â = I⁻¹ ∘ A ∘ I`.

use crate::linalg::{Matrix, Vector};
use crate::minkowski::{embed, join, spatial, HyperbolicPoint, LorentzTransform};
use crate::scalar::Real;

/// Image point `â(p)` and the orthogonal matrix `O` representing `dâ_p` between
/// the orthonormal frames at `p` and `â(p)`, so that `(â^*T)(p) = Oᵀ T(â(p)) O`.
pub fn transport<S: Real>(a: &LorentzTransform, r: S, dir: &Vector<S>) -> (S, Vector<S>, Matrix<S>) {
    let n = dir.dim();
    let y = a.apply(&embed(&HyperbolicPoint { r, dir: *dir }));
    let ys = spatial(&y);
    let s = ys.norm();
    let r2 = s.asinh();
    let dir2 = ys * s.recip();
    // B⁻¹V = V⃗ − (1 − 1/ch r')(x̊'·V⃗) x̊' for V tangent to the hyperboloid at â(p)
    let k = S::one() - y[0].recip();
    let pull = |v: &Vector<S>| {
        let vs = spatial(v);
        vs - dir2 * (k * dir2.dot(&vs))
    };
    // A(∂_r I) = I(â p) + e^{−r} A ℓ with ℓ = (−1, x̊); subtracting the same identity
    // at â(p) keeps the radial column free of e^{r} cancellations
    let ell = a.apply(&join(-S::one(), dir)) * (-r).exp();
    let ell2 = join(-S::one(), &dir2) * (-r2).exp();
    let radial = dir2 + pull(&(ell - ell2));
    let cols: Vec<Vector<S>> = (0..n)
        .map(|i| {
            let t = Vector::basis(n, i) - *dir * dir[i];
            radial * dir[i] + pull(&a.apply(&join(S::zero(), &t)))
        })
        .collect();
    (r2, dir2, Matrix::from_columns(&cols))
}
