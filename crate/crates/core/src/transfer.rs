//! Single-site transfer objects: the rank-8 double-layer tensor, its singlet
//! projection `tau0`, and the spectral form `tau0 = sum_mu lambda_mu M_mu (x) M_mu`.
//!
//! The singlet-flag basis is `{(+,+), (-,-), (+,-), (-,+)}`. A flag `(a,b)` on
//! rows labels the horizontal legs `(l,r)`, on columns the vertical legs `(d,u)`.

use nalgebra::{Matrix2, Matrix4};

use crate::error::{Error, Result};
use crate::params::PepsParams;
use crate::tensor::{check_gauge_symmetry, SiteTensor};

pub const STRUCTURAL_TOL: f64 = 1e-12;

/// Flag index of the leg pair `(a,b)`.
#[inline]
pub fn flag(a: usize, b: usize) -> usize {
    match (a, b) {
        (0, 0) => 0,
        (1, 1) => 1,
        (0, 1) => 2,
        _ => 3,
    }
}

/// Inverse of [`flag`].
pub const FLAG_LEGS: [(usize, usize); 4] = [(0, 0), (1, 1), (0, 1), (1, 0)];

/// `T[l,l',r,r',d,d',u,u'] = sum_{s,t} A[s,t,r,u,l,d] A[s,t,r',u',l',d']`.
#[derive(Debug, Clone, PartialEq)]
pub struct FullTransfer {
    pub entries: Vec<f64>,
}

impl FullTransfer {
    #[inline]
    pub fn index(l: [usize; 2], r: [usize; 2], d: [usize; 2], u: [usize; 2]) -> usize {
        let mut i = 0;
        for v in [l[0], l[1], r[0], r[1], d[0], d[1], u[0], u[1]] {
            i = i * 2 + v;
        }
        i
    }

    #[inline]
    pub fn get(&self, l: [usize; 2], r: [usize; 2], d: [usize; 2], u: [usize; 2]) -> f64 {
        self.entries[Self::index(l, r, d, u)]
    }
}

pub fn transfer_full(a: &SiteTensor) -> FullTransfer {
    let mut entries = vec![0.0; 256];
    for (i, e) in entries.iter_mut().enumerate() {
        let b = |k: usize| (i >> (7 - k)) & 1;
        let (l, lp, r, rp, d, dp, u, up) = (b(0), b(1), b(2), b(3), b(4), b(5), b(6), b(7));
        let mut acc = 0.0;
        for s in 0..2 {
            for t in 0..2 {
                acc += a.get(s, t, r, u, l, d) * a.get(s, t, rp, up, lp, dp);
            }
        }
        *e = acc;
    }
    FullTransfer { entries }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TransferOperator {
    pub matrix: Matrix4<f64>,
}

impl TransferOperator {
    /// Per-copy site tensor `t[l,r,d,u]` read off the flag matrix.
    pub fn leg_entry(&self, l: usize, r: usize, d: usize, u: usize) -> f64 {
        self.matrix[(flag(l, r), flag(d, u))]
    }
}

pub fn transfer_from_tensor(a: &SiteTensor) -> Result<TransferOperator> {
    let v = check_gauge_symmetry(a);
    if v > STRUCTURAL_TOL {
        return Err(Error::GaugeViolation(v));
    }
    let t = transfer_full(a);
    let mut m = Matrix4::zeros();
    for (row, &(l, r)) in FLAG_LEGS.iter().enumerate() {
        for (col, &(d, u)) in FLAG_LEGS.iter().enumerate() {
            m[(row, col)] = t.get([l, l], [r, r], [d, d], [u, u]);
        }
    }
    Ok(TransferOperator { matrix: m })
}

pub fn tau0_explicit(p: &PepsParams) -> Result<TransferOperator> {
    p.validate()?;
    let [a, b, g, d] = p.squares();
    #[rustfmt::skip]
    let m = Matrix4::new(
        a, g, 0.0, 0.0,
        g, d, 0.0, 0.0,
        0.0, 0.0, b, b,
        0.0, 0.0, b, b,
    );
    Ok(TransferOperator { matrix: m })
}

/// `tau0 = V diag(lambda) V^T = sum_mu lambda_mu M_mu (x) M_mu`.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralForm {
    pub lambda: [f64; 4],
    pub v: Matrix4<f64>,
    /// `M_mu = sum_a V[a,mu] F_a` with `F_a` the elementary matrix of flag `a`.
    pub m: [Matrix2<f64>; 4],
}

impl SpectralForm {
    pub fn reconstruct(&self) -> Matrix4<f64> {
        let mut out = Matrix4::zeros();
        for mu in 0..4 {
            let col = self.v.column(mu);
            out += self.lambda[mu] * col * col.transpose();
        }
        out
    }

    /// `sum_mu lambda_mu M_mu[l,r] M_mu[d,u]`, dropping the null channel.
    pub fn leg_entry(&self, l: usize, r: usize, d: usize, u: usize) -> f64 {
        (0..3).map(|mu| self.lambda[mu] * self.m[mu][(l, r)] * self.m[mu][(d, u)]).sum()
    }

    /// Whether the second eigenvalue is nonnegative, decided from the computed value.
    pub fn lambda2_nonnegative(&self) -> bool {
        self.lambda[1] >= -STRUCTURAL_TOL
    }
}

fn flag_matrix(col: [f64; 4]) -> Matrix2<f64> {
    let mut m = Matrix2::zeros();
    for (a, &(i, j)) in FLAG_LEGS.iter().enumerate() {
        m[(i, j)] = col[a];
    }
    m
}

/// Closed-form diagonalization of the Z2 block structure.
pub fn spectral_decompose(tau0: &TransferOperator) -> Result<SpectralForm> {
    let t = &tau0.matrix;
    let off_block = [(0, 2), (0, 3), (1, 2), (1, 3)]
        .iter()
        .map(|&(i, j)| t[(i, j)].abs().max(t[(j, i)].abs()))
        .fold(0.0f64, f64::max);
    let b2 = t[(2, 2)];
    let lower_dev = [t[(2, 3)], t[(3, 2)], t[(3, 3)]].iter().map(|x| (x - b2).abs()).fold(0.0f64, f64::max);
    let scale = t.amax().max(1.0);
    if off_block > STRUCTURAL_TOL * scale
        || lower_dev > STRUCTURAL_TOL * scale
        || (t[(0, 1)] - t[(1, 0)]).abs() > STRUCTURAL_TOL * scale
    {
        return Err(Error::InvalidParams("transfer operator lacks the Z2 block structure".into()));
    }
    let (p, c, q) = (t[(0, 0)], t[(0, 1)], t[(1, 1)]);
    let root = ((p - q).powi(2) + 4.0 * c * c).sqrt();
    let l1 = 0.5 * (p + q + root);
    let l2 = 0.5 * (p + q - root);
    let (v1, v2) = if c == 0.0 {
        if p >= q {
            ([1.0, 0.0], [0.0, 1.0])
        } else {
            ([0.0, 1.0], [1.0, 0.0])
        }
    } else {
        let eig = |lam: f64| {
            let a = [c, lam - p];
            let b = [lam - q, c];
            let na = a[0].hypot(a[1]);
            let nb = b[0].hypot(b[1]);
            if na >= nb {
                [a[0] / na, a[1] / na]
            } else {
                [b[0] / nb, b[1] / nb]
            }
        };
        let v1 = eig(l1);
        // orthogonal completion keeps V exactly orthogonal
        (v1, [-v1[1], v1[0]])
    };
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let cols = [[v1[0], v1[1], 0.0, 0.0], [v2[0], v2[1], 0.0, 0.0], [0.0, 0.0, s, s], [0.0, 0.0, -s, s]];
    let v = Matrix4::from_fn(|i, j| cols[j][i]);
    Ok(SpectralForm { lambda: [l1, l2, 2.0 * b2, 0.0], v, m: cols.map(flag_matrix) })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tensor::build_site_tensor;
    use nalgebra::SymmetricEigen;

    fn params(a: f64, b: f64, g: f64, d: f64) -> PepsParams {
        PepsParams::new(a, b, g, d).unwrap()
    }

    #[test]
    fn zero_flux_transfer() {
        let t = transfer_from_tensor(&build_site_tensor(&params(1.0, 0.0, 0.0, 0.0)).unwrap()).unwrap();
        let mut expect = Matrix4::zeros();
        expect[(0, 0)] = 1.0;
        assert_eq!(t.matrix, expect);
    }

    #[test]
    fn perturbative_transfer_blocks() {
        let t = transfer_from_tensor(&build_site_tensor(&params(1.0, 0.1, 0.0, 0.95)).unwrap()).unwrap();
        #[rustfmt::skip]
        let expect = Matrix4::new(
            1.0, 0.0, 0.0, 0.0,
            0.0, 0.9025, 0.0, 0.0,
            0.0, 0.0, 0.01, 0.01,
            0.0, 0.0, 0.01, 0.01,
        );
        assert!((t.matrix - expect).amax() < 1e-15);
    }

    #[test]
    fn unit_point_transfer() {
        let t = transfer_from_tensor(&build_site_tensor(&params(1.0, 1.0, 1.0, 1.0)).unwrap()).unwrap();
        for (i, j) in [(0, 0), (0, 1), (1, 0), (1, 1), (2, 2), (2, 3), (3, 2), (3, 3)] {
            assert_eq!(t.matrix[(i, j)], 1.0);
        }
        assert_eq!(t.matrix[(0, 2)], 0.0);
    }

    #[test]
    fn explicit_examples() {
        let t = tau0_explicit(&params(0.0, 1.0, 0.0, 0.0)).unwrap().matrix;
        assert_eq!(t.fixed_view::<2, 2>(0, 0).amax(), 0.0);
        assert_eq!(t.fixed_view::<2, 2>(2, 2).min(), 1.0);
        let t = tau0_explicit(&params(1.0, 0.0, 1.0, 1.0)).unwrap().matrix;
        assert_eq!(t.fixed_view::<2, 2>(0, 0).min(), 1.0);
        assert_eq!(t.fixed_view::<2, 2>(2, 2).amax(), 0.0);
    }

    #[test]
    fn asymmetric_tensor_rejected() {
        let mut a = SiteTensor::zeros();
        a.set(0, 1, 0, 0, 0, 0, 1.0);
        assert!(matches!(transfer_from_tensor(&a), Err(Error::GaugeViolation(_))));
    }

    fn numeric_eigs(t: &Matrix4<f64>) -> Vec<f64> {
        let mut e: Vec<f64> = SymmetricEigen::new(*t).eigenvalues.iter().copied().collect();
        e.sort_by(|a, b| b.partial_cmp(a).unwrap());
        e
    }

    #[test]
    fn perturbative_spectrum() {
        let sf = spectral_decompose(&tau0_explicit(&params(1.0, 0.1, 0.0, 0.95)).unwrap()).unwrap();
        let want = [1.0, 0.9025, 0.02, 0.0];
        for (a, b) in sf.lambda.iter().zip(want) {
            assert!((a - b).abs() < 1e-15);
        }
        let mut got = sf.lambda.to_vec();
        got.sort_by(|a, b| b.partial_cmp(a).unwrap());
        let num = numeric_eigs(&tau0_explicit(&params(1.0, 0.1, 0.0, 0.95)).unwrap().matrix);
        for (a, b) in got.iter().zip(num) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn gamma_zero_keeps_identity_mixing() {
        let sf = spectral_decompose(&tau0_explicit(&params(0.5, 0.3, 0.0, 0.9)).unwrap()).unwrap();
        assert_eq!(sf.lambda[0], 0.81);
        assert_eq!(sf.lambda[1], 0.25);
        assert_eq!(sf.v.fixed_view::<2, 2>(0, 0).abs(), Matrix2::new(0.0, 1.0, 1.0, 0.0));
    }

    #[test]
    fn unit_point_spectrum() {
        let t = tau0_explicit(&params(1.0, 1.0, 1.0, 1.0)).unwrap();
        let sf = spectral_decompose(&t).unwrap();
        assert!((sf.lambda[0] - 2.0).abs() < 1e-15);
        assert!(sf.lambda[1].abs() < 1e-15);
        assert_eq!(sf.lambda[2], 2.0);
        let num = numeric_eigs(&t.matrix);
        assert!((num[0] - 2.0).abs() < 1e-12 && (num[1] - 2.0).abs() < 1e-12);
    }

    #[test]
    fn m_operators_have_the_expected_shape() {
        let sf = spectral_decompose(&tau0_explicit(&params(1.0, 0.4, 0.6, 0.8)).unwrap()).unwrap();
        let s = std::f64::consts::FRAC_1_SQRT_2;
        assert_eq!(sf.m[2], Matrix2::new(0.0, s, s, 0.0));
        assert_eq!(sf.m[3], Matrix2::new(0.0, -s, s, 0.0));
        for mu in 0..2 {
            assert_eq!(sf.m[mu][(0, 1)], 0.0);
            assert_eq!(sf.m[mu][(1, 0)], 0.0);
        }
    }
}
