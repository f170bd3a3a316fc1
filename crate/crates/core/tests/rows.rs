use lgt_renyi::rows::{
    assemble_corner_row, assemble_labeled_row, assemble_row, assemble_row_with, boundary_row, boundary_site_operator,
    spectrum, spectrum_with, Pairing, SiteLabels, SpectrumOptions, DEFAULT_DIM_CAP,
};
use lgt_renyi::tensor::build_site_tensor;
use lgt_renyi::transfer::{spectral_decompose, tau0_explicit, transfer_full, SpectralForm};
use lgt_renyi::{Error, PepsParams};
use nalgebra::{DMatrix, Matrix2};

const CAP: usize = DEFAULT_DIM_CAP;

fn spec(a: f64, b: f64, g: f64, d: f64) -> SpectralForm {
    spectral_decompose(&tau0_explicit(&PepsParams::new(a, b, g, d).unwrap()).unwrap()).unwrap()
}

fn dm(m: &Matrix2<f64>) -> DMatrix<f64> {
    DMatrix::from_fn(2, 2, |i, j| m[(i, j)])
}

/// Explicit sum over channel strings for two copies:
/// `sum prod(lambda) Tr[Xl A_1 .. A_R Xr .. A_N] (x)_x B_x` with
/// `A_x = M_mu (x) M_nu` on the horizontal bond and `B_x` the same on the vertical legs.
fn explicit_two_copy(sf: &SpectralForm, n1: usize, bonds: Option<(usize, DMatrix<f64>, DMatrix<f64>)>) -> DMatrix<f64> {
    let dim = 4usize.pow(n1 as u32);
    let mut out = DMatrix::zeros(dim, dim);
    let channels = 9usize;
    for code in 0..channels.pow(n1 as u32) {
        let mut c = code;
        let mut weight = 1.0;
        let mut horizontal = DMatrix::identity(4, 4);
        let mut vertical = DMatrix::from_element(1, 1, 1.0);
        if let Some((_, left, _)) = &bonds {
            horizontal = left.clone();
        }
        for x in 0..n1 {
            let (mu, nu) = ((c % 9) / 3, c % 3);
            c /= 9;
            weight *= sf.lambda[mu] * sf.lambda[nu];
            let site = dm(&sf.m[mu]).kronecker(&dm(&sf.m[nu]));
            horizontal *= &site;
            if let Some((r1, _, right)) = &bonds {
                if x + 1 == *r1 {
                    horizontal *= right;
                }
            }
            vertical = vertical.kronecker(&site);
        }
        if weight != 0.0 {
            out += vertical * (weight * horizontal.trace());
        }
    }
    out
}

#[test]
fn product_state_single_copy_row() {
    let row = assemble_row(&spec(1.0, 0.0, 0.0, 0.0), 1, 2, None, CAP).unwrap();
    let mut want = DMatrix::zeros(4, 4);
    want[(0, 0)] = 1.0;
    assert_eq!(row.matrix, want);
    let s = spectrum(&row, 1e-9).unwrap();
    assert_eq!((s.rho1, s.degeneracy), (1.0, 1));
    assert_eq!(s.eigenvalues.iter().filter(|e| e.norm() > 1e-14).count(), 1);
}

#[test]
fn ring_contraction_matches_explicit_channel_sum() {
    for sf in [spec(1.0, 0.1, 0.0, 0.95), spec(0.7, 1.1, 0.9, 0.4), spec(1.0, 1.0, 1.0, 1.0)] {
        for n1 in [2, 3] {
            let bulk = assemble_row(&sf, 2, n1, None, CAP).unwrap().matrix;
            assert!((&bulk - explicit_two_copy(&sf, n1, None)).amax() <= 1e-12);
            let x = boundary_site_operator(2).unwrap();
            for r1 in 1..n1 {
                let edge = assemble_row(&sf, 2, n1, Some(r1), CAP).unwrap().matrix;
                let want = explicit_two_copy(&sf, n1, Some((r1, x.inverse().flag_matrix(), x.flag_matrix())));
                assert!((&edge - want).amax() <= 1e-12);
                // an arbitrary operator goes through the same bond slots
                let lit = x.matrix();
                let edge = assemble_row_with(&sf, 2, n1, Some((r1, lit.transpose(), lit.clone())), CAP).unwrap().matrix;
                let want = explicit_two_copy(&sf, n1, Some((r1, lit.transpose(), lit)));
                assert!((&edge - want).amax() <= 1e-12);
            }
        }
    }
}

#[test]
fn replica_row_is_a_reordered_tensor_power() {
    let sf = spec(0.8, 0.5, 0.3, 1.2);
    let e1 = assemble_row(&sf, 1, 2, None, CAP).unwrap().matrix;
    let e2 = assemble_row(&sf, 2, 2, None, CAP).unwrap().matrix;
    let power = e1.kronecker(&e1);
    // E2 digits per site are (copy0, copy1); the Kronecker power groups by copy
    let regroup = |i: usize| {
        let (s1, s2) = (i >> 2, i & 3);
        let (a, b) = (s1 >> 1, s1 & 1);
        let (c, d) = (s2 >> 1, s2 & 1);
        ((a << 1 | c) << 2) | (b << 1 | d)
    };
    for i in 0..16 {
        for j in 0..16 {
            assert!((e2[(i, j)] - power[(regroup(i), regroup(j))]).abs() < 1e-14);
        }
    }
}

#[test]
fn uniform_labels_reproduce_the_bulk_row() {
    let p = PepsParams::new(0.6, 0.9, 0.4, 1.3).unwrap();
    let t1 = transfer_full(&build_site_tensor(&p).unwrap());
    let sf = spec(0.6, 0.9, 0.4, 1.3);
    for n in [2, 3] {
        let bulk = assemble_row(&sf, n, 3, None, CAP).unwrap().matrix;
        for pairing in [Pairing::Outside, Pairing::Inside] {
            let labeled = assemble_labeled_row(&t1, n, &[SiteLabels::uniform(pairing); 3], CAP).unwrap().matrix;
            assert!((&labeled - &bulk).amax() <= 1e-12);
        }
    }
}

#[test]
fn boundary_insertions_equal_relabeled_sites() {
    let p = PepsParams::new(0.6, 0.9, 0.4, 1.3).unwrap();
    let t1 = transfer_full(&build_site_tensor(&p).unwrap());
    let sf = spec(0.6, 0.9, 0.4, 1.3);
    let n1 = 4;
    for n in [2, 3] {
        for r1 in 1..n1 {
            let region = |x: usize| if x <= r1 { Pairing::Inside } else { Pairing::Outside };
            let labels: Vec<SiteLabels> = (1..=n1)
                .map(|x| SiteLabels { own: region(x), left: region(if x == 1 { n1 } else { x - 1 }), down: region(x) })
                .collect();
            let labeled = assemble_labeled_row(&t1, n, &labels, CAP).unwrap().matrix;
            let inserted = assemble_row(&sf, n, n1, Some(r1), CAP).unwrap().matrix;
            assert!((&labeled - &inserted).amax() <= 1e-11 * inserted.amax());
        }
    }
}

#[test]
fn corner_row_reduces_to_projected_boundary_row_without_corner_flux() {
    let p = PepsParams::new(0.6, 0.0, 0.4, 1.3).unwrap();
    let t1 = transfer_full(&build_site_tensor(&p).unwrap());
    let sf = spec(0.6, 0.0, 0.4, 1.3);
    let corner = assemble_corner_row(&t1, 2, 3, 1, CAP).unwrap().matrix;
    let inside = assemble_row(&sf, 2, 3, Some(1), CAP).unwrap().matrix;
    let x = boundary_row(2, 3, 1, CAP).unwrap();
    assert!((corner - x * inside).amax() <= 1e-12);
}

#[test]
fn dimension_cap_is_enforced() {
    let err = assemble_row(&spec(1.0, 0.1, 0.0, 0.95), 2, 4, None, 255).unwrap_err();
    assert_eq!(err, Error::DimensionCap { dim: 256, cap: 255 });
}

#[test]
fn spectra_of_simple_rows() {
    let s = spectrum(&assemble_row(&spec(1.0, 0.0, 0.0, 0.0), 1, 4, None, CAP).unwrap(), 1e-9).unwrap();
    assert!((s.rho1 - 1.0).abs() < 1e-14);
    assert_eq!(s.degeneracy, 1);
    let s = spectrum(&assemble_row(&spec(1.0, 0.0, 0.0, 1.0), 1, 4, None, CAP).unwrap(), 1e-9).unwrap();
    assert!((s.rho1 - 1.0).abs() < 1e-14);
    assert_eq!(s.degeneracy, 2);
}

#[test]
fn replica_dominant_eigenvalue_is_a_power() {
    let sf = spec(1.0, 0.1, 0.0, 0.95);
    let r1 = spectrum(&assemble_row(&sf, 1, 4, None, CAP).unwrap(), 1e-9).unwrap().rho1;
    let r2 = spectrum(&assemble_row(&sf, 2, 4, None, CAP).unwrap(), 1e-9).unwrap().rho1;
    assert!((r1 - 1.0000000400072284).abs() < 1e-14);
    assert!((r2 - r1 * r1).abs() <= 1e-12 * r2);
}

#[test]
fn boundary_eigenvalue_does_not_depend_on_the_insertion_distance() {
    let sf = spec(1.0, 0.1, 0.0, 0.95);
    let vals: Vec<f64> =
        (1..4).map(|r| spectrum(&assemble_row(&sf, 2, 4, Some(r), CAP).unwrap(), 1e-9).unwrap().rho1).collect();
    let max = vals.iter().copied().fold(f64::MIN, f64::max);
    let min = vals.iter().copied().fold(f64::MAX, f64::min);
    assert!((max - min) / max <= 1e-10, "{vals:?}");
    assert!((vals[1] - 1.0000000400000002).abs() < 1e-13);
}

#[test]
fn iterative_solver_agrees_with_dense_on_rows() {
    for sf in [spec(1.0, 0.1, 0.0, 0.95), spec(0.9, 0.7, 0.6, 1.1)] {
        for insertion in [None, Some(1)] {
            let row = assemble_row(&sf, 2, 3, insertion, CAP).unwrap();
            let dense = spectrum(&row, 1e-9).unwrap();
            let it = spectrum_with(&row, SpectrumOptions { dense_threshold: 16, ..Default::default() }).unwrap();
            assert!(!it.dense);
            assert!((dense.rho1 - it.rho1).abs() <= 1e-11 * dense.rho1);
            assert_eq!(dense.degeneracy, it.degeneracy);
        }
    }
}

#[test]
fn zero_row_is_a_null_operator() {
    let mut row = assemble_row(&spec(1.0, 0.0, 0.0, 0.0), 1, 2, None, CAP).unwrap();
    row.matrix.fill(0.0);
    assert_eq!(spectrum(&row, 1e-9).unwrap_err(), Error::NullOperator);
}
