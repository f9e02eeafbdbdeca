use ahcenter::charges::{center_of_mass, mass_vector, slope, ChargeSettings};
use ahcenter::cmc::{center_limit, CmcError, CmcSettings, CmcSolver};
use ahcenter::linalg::Vector;
use ahcenter::minkowski::{embed, HyperbolicPoint, LorentzTransform};
use ahcenter::models::{AspectProfile, ChartData, Kottler};

fn settings(bandlimit: usize) -> CmcSettings {
    CmcSettings { bandlimit, quadrature: bandlimit + 4, ..CmcSettings::default() }
}

fn boosted_kottler() -> ChartData {
    let a = LorentzTransform::boost(0.3, &Vector::from_slice(&[1.0, 0.0, 0.0]));
    ChartData::kottler(3, 0.5).unwrap().boosted(a).unwrap()
}

/// Balanced, positive, non-symmetric mass aspect.
fn balanced_perturbed() -> ChartData {
    ChartData::perturbed(AspectProfile::isotropic(3, 1.5).with_harmonic(2, 1, 0.3), 0.0).unwrap()
}

fn charges_center(data: &ChartData) -> HyperbolicPoint<f64> {
    let p = mass_vector(data, &ChargeSettings::default()).unwrap().preferred().unwrap();
    center_of_mass(&p).unwrap()
}

#[test]
fn kottler_leaf_matches_radial_oracle() {
    let k = Kottler::new(3, 0.5).unwrap();
    let s = CmcSolver::new(ChartData::kottler(3, 0.5).unwrap(), settings(8)).unwrap();
    let r_hat = 5.0;
    let leaf = s.solve_leaf(r_hat, &[]).unwrap();
    let rho = r_hat.sinh();
    let radius = k.radius_of_areal(rho).unwrap();
    assert!(leaf.radius_gap() < 1e-12, "{}", leaf.radius_gap());
    assert!((leaf.inner_radius - radius).abs() < 1e-10, "{} vs {radius}", leaf.inner_radius);
    let h = k.sphere_mean_curvature(rho);
    assert!((leaf.mean_curvature - h).abs() < 1e-10, "{} vs {h}", leaf.mean_curvature);
    assert!(leaf.roundness_traceless < 1e-20 && leaf.roundness_radial < 1e-9, "{leaf:?}");
}

#[test]
fn hyperbolic_foliation_is_coordinate_spheres() {
    let s = CmcSolver::new(ChartData::hyperbolic(3).unwrap(), settings(8)).unwrap();
    let fol = s.foliate(&[3.0, 4.0, 5.0], &[]).unwrap();
    assert!(fol.error.is_none());
    for leaf in &fol.leaves {
        assert!(leaf.sup_f < 1e-12);
        assert!((leaf.mean_curvature - 2.0 / leaf.r_hat.tanh()).abs() < 1e-12);
    }
    let limit = center_limit(&fol.leaves, 1e-6).unwrap();
    assert!(limit.point.r < 1e-12 && limit.cauchy);
}

/// Leaves of boosted data are images of the base leaves: spheres of the same
/// radius about the charges center.
#[test]
fn boosted_kottler_leaves_are_translated_spheres() {
    let k = Kottler::new(3, 0.5).unwrap();
    let data = boosted_kottler();
    let p = charges_center(&data);
    let s = CmcSolver::new(data, settings(12)).unwrap();
    let r_hat = 5.0;
    let leaf = s.solve_leaf(r_hat, &[]).unwrap();
    let radius = k.radius_of_areal(r_hat.sinh()).unwrap();
    for node in s.surface(r_hat, &leaf.coeffs, false).unwrap() {
        let q = HyperbolicPoint::new(node.radius, node.dir);
        assert!((q.distance(&p) - radius).abs() < 1e-8, "{} vs {radius}", q.distance(&p));
    }
    assert!((embed(&leaf.center.z) - embed(&p)).max_abs() < 1e-8);
    assert!(leaf.sup_f > 0.29, "the leaf is off-center by the boost");
}

#[test]
fn boosted_kottler_center_limit() {
    let data = boosted_kottler();
    let p = charges_center(&data);
    let s = CmcSolver::new(data, settings(12)).unwrap();
    let fol = s.foliate(&[4.0, 5.0, 6.0, 7.0, 8.0], &[]).unwrap();
    assert!(fol.error.is_none(), "{:?}", fol.error);
    let limit = center_limit(&fol.leaves, 1e-6).unwrap();
    assert!(limit.cauchy);
    assert!(limit.point.distance(&p) < 1e-4, "{:?} vs {p:?}", limit.point);
    let gaps: Vec<f64> = fol.leaves.iter().map(|l| l.radius_gap()).collect();
    let spread = gaps.iter().cloned().fold(f64::MIN, f64::max) - gaps.iter().cloned().fold(f64::MAX, f64::min);
    assert!(spread < 1e-3, "{gaps:?}");
}

/// Decay rates of the graph and roundness diagnostics in a balanced chart.
#[test]
fn balanced_leaves_become_round() {
    let s = CmcSolver::new(balanced_perturbed(), settings(12)).unwrap();
    let fol = s.foliate(&[4.0, 5.0, 6.0, 7.0, 8.0], &[]).unwrap();
    assert!(fol.error.is_none(), "{:?}", fol.error);
    let rate = |q: &dyn Fn(&ahcenter::cmc::CmcLeaf) -> f64| {
        let pts: Vec<(f64, f64)> = fol.leaves.iter().map(|l| (l.inner_radius, q(l).ln())).collect();
        -slope(&pts)
    };
    let graph = rate(&|l| l.sup_f);
    let radial = rate(&|l| l.roundness_radial);
    let traceless = rate(&|l| l.roundness_traceless);
    assert!(graph > 0.8, "{graph}");
    assert!(radial > 1.8, "{radial}");
    assert!(traceless > 3.5, "{traceless}");
    let limit = center_limit(&fol.leaves, 1e-6).unwrap();
    assert!(limit.point.r < 1e-6, "{:?}", limit.point);
}

#[test]
fn leaves_are_stable() {
    for data in [ChartData::hyperbolic(3).unwrap(), ChartData::kottler(3, 0.5).unwrap()] {
        let s = CmcSolver::new(data, settings(8)).unwrap();
        let leaf = s.solve_leaf(5.0, &[]).unwrap();
        assert!(s.stability(&leaf).unwrap() > -1e-8);
    }
}

#[test]
fn invalid_requests_are_rejected() {
    let err = CmcSolver::new(ChartData::hyperbolic(4).unwrap(), settings(8)).unwrap_err();
    assert_eq!(err, CmcError::Dimension(4));
    let s = CmcSolver::new(ChartData::hyperbolic(3).unwrap(), settings(8)).unwrap();
    assert!(matches!(s.foliate(&[5.0, 4.0], &[]), Err(CmcError::Schedule(_))));
    let bad = CmcSettings { quadrature: 4, ..settings(8) };
    assert!(matches!(CmcSolver::new(ChartData::hyperbolic(3).unwrap(), bad), Err(CmcError::Settings(_))));
}
