use lgt_renyi::entropy::{
    boundary_row_eigenvalue, contraction_consistency, kappa_fit, kappa_fit_values, mps_purity, mps_purity_demo,
    purity_finite, renyi_finite, renyi_thermodynamic, LatticeGeometry, Mps,
};
use lgt_renyi::{Error, PepsParams};

fn p(a: f64, b: f64, g: f64, d: f64) -> PepsParams {
    PepsParams::new(a, b, g, d).unwrap()
}

fn geom(n1: usize, n2: usize, r1: usize, r2: usize) -> LatticeGeometry {
    LatticeGeometry::new(n1, n2, r1, r2).unwrap()
}

#[test]
fn product_state_has_no_entanglement() {
    let prod = p(1.0, 0.0, 0.0, 0.0);
    for g in [geom(2, 2, 1, 1), geom(4, 30, 2, 7)] {
        assert!((purity_finite(&prod, &g, 2).unwrap() - 1.0).abs() < 1e-14);
        assert!(renyi_finite(&prod, &g, 3).unwrap().value.abs() < 1e-14);
    }
    let t = renyi_thermodynamic(&prod, 2, 5, 4, 2).unwrap();
    assert!(t.value.abs() < 1e-14);
    let c = t.thermo.unwrap();
    assert_eq!((c.rho1, c.rho1_prime, c.degeneracy), (1.0, 1.0, 1));
}

#[test]
fn ghz_entropy() {
    let s = renyi_finite(&p(1.0, 0.0, 0.0, 0.95), &geom(2, 2, 1, 1), 2).unwrap();
    assert!((s.value - 0.653020892388894).abs() < 1e-12);
}

#[test]
fn finite_lattice_reaches_the_closed_form() {
    let pt = p(1.0, 0.1, 0.0, 0.95);
    let fin = renyi_finite(&pt, &geom(4, 100, 2, 20), 2).unwrap().value;
    let th = renyi_thermodynamic(&pt, 2, 20, 4, 2).unwrap();
    assert!((fin - th.value).abs() <= 1e-6, "{fin} vs {}", th.value);
    assert!((purity_finite(&pt, &geom(4, 100, 2, 20), 2).unwrap() - (-th.value).exp()).abs() <= 1e-6);
    let c = th.thermo.unwrap();
    assert_eq!(c.degeneracy, 1);
    assert!((c.rho1 - 1.000000080014459).abs() < 1e-13);
}

#[test]
fn slope_in_r2_is_the_perimeter_coefficient() {
    let pt = p(1.0, 0.1, 0.0, 0.95);
    let s = |r2| renyi_finite(&pt, &geom(4, 100, 1, r2), 2).unwrap().value;
    let slope = (s(40) - s(10)) / 30.0;
    let c = renyi_thermodynamic(&pt, 1, 10, 4, 2).unwrap().thermo.unwrap();
    assert!((slope - c.perimeter_coefficient).abs() < 1e-9, "{slope} {}", c.perimeter_coefficient);
}

#[test]
fn vanishing_corner_flux_flattens_the_slope() {
    let pt = p(1.0, 1e-8, 0.0, 0.95);
    let s = |r2| renyi_finite(&pt, &geom(4, 100, 2, r2), 2).unwrap().value;
    assert!((s(40) - s(10)).abs() < 1e-12);
}

#[test]
fn kappa_vanishes_at_sample_points() {
    for pt in [p(1.0, 0.1, 0.0, 0.95), p(1.0, 1.0, 1.0, 1.0)] {
        let fit = kappa_fit(&pt, 2, 4, &[1, 2, 3]).unwrap();
        assert!(fit.kappa.abs() <= 1e-8, "{pt:?} {fit:?}");
        let vals: Vec<f64> = (1..4).map(|r| boundary_row_eigenvalue(&pt, 2, 4, r).unwrap()).collect();
        let hi = vals.iter().copied().fold(f64::MIN, f64::max);
        let lo = vals.iter().copied().fold(f64::MAX, f64::min);
        assert!((hi - lo) / hi <= 1e-10, "{pt:?} {vals:?}");
    }
    let single = kappa_fit(&p(1.0, 0.1, 0.0, 0.95), 2, 4, &[2]).unwrap();
    assert_eq!(single.kappa, 0.0);
    assert_eq!(single.residual, 0.0);
    assert_eq!(single.gamma, boundary_row_eigenvalue(&p(1.0, 0.1, 0.0, 0.95), 2, 4, 2).unwrap());
}

#[test]
fn kappa_fit_recovers_a_planted_decay() {
    let pts: Vec<(f64, f64)> = (1..6).map(|r| (r as f64, 0.7 * (-0.1 * r as f64).exp())).collect();
    let fit = kappa_fit_values(&pts);
    assert!((fit.kappa - 0.1).abs() < 1e-12 && (fit.gamma - 0.7).abs() < 1e-12);
}

#[test]
fn row_and_column_tilings_agree() {
    assert!(contraction_consistency(&p(1.0, 0.1, 0.0, 0.95), &geom(3, 3, 1, 1), 2).unwrap() <= 1e-10);
    assert!(contraction_consistency(&p(0.4, 1.3, 0.8, 0.6), &geom(3, 4, 1, 2), 2).unwrap() <= 1e-10);
    let ghz = p(1.0, 0.0, 0.0, 0.95);
    assert!(contraction_consistency(&ghz, &geom(2, 2, 1, 1), 2).unwrap() <= 1e-12);
}

#[test]
fn invalid_inputs() {
    assert!(LatticeGeometry::new(3, 3, 3, 1).is_err());
    assert!(LatticeGeometry::new(3, 3, 0, 1).is_err());
    assert!(matches!(purity_finite(&p(1.0, 0.1, 0.0, 0.95), &geom(3, 3, 1, 1), 1), Err(Error::InvalidParams(_))));
}

#[test]
fn mps_purities() {
    let r = mps_purity_demo(2, 8, (2, 3), 5).unwrap();
    assert!((r.p2_transfer - r.p2_direct).abs() <= 1e-12);
    let ghz = mps_purity(&Mps::ghz(), 6, 1, 2).unwrap();
    assert!((ghz.p2_transfer - 0.5).abs() < 1e-14);
}
