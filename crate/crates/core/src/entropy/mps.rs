//! Purity of a translation-invariant periodic MPS, by transfer matrices with two
//! boundary swaps and by brute force on the state vector.

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::linalg::ScaledMatrix;

pub const MAX_DENSE_SITES: usize = 12;

#[derive(Debug, Clone)]
pub struct Mps {
    pub chi: usize,
    /// `A^0`, `A^1`.
    pub tensors: [DMatrix<f64>; 2],
}

impl Mps {
    /// Entries i.i.d. uniform on `[-1, 1]`.
    pub fn random(chi: usize, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut draw = || DMatrix::from_fn(chi, chi, |_, _| rng.random_range(-1.0..=1.0));
        let a0 = draw();
        let a1 = draw();
        Mps { chi, tensors: [a0, a1] }
    }

    pub fn ghz() -> Self {
        Mps {
            chi: 2,
            tensors: [
                DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, 0.0]),
                DMatrix::from_row_slice(2, 2, &[0.0, 0.0, 0.0, 1.0]),
            ],
        }
    }

    fn single_transfer(&self) -> DMatrix<f64> {
        self.tensors[0].kronecker(&self.tensors[0]) + self.tensors[1].kronecker(&self.tensors[1])
    }

    pub fn amplitude(&self, config: usize, n_sites: usize) -> f64 {
        let mut m = DMatrix::identity(self.chi, self.chi);
        for site in 0..n_sites {
            m *= &self.tensors[(config >> (n_sites - 1 - site)) & 1];
        }
        m.trace()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MpsPurity {
    pub p2_transfer: f64,
    pub p2_direct: f64,
}

/// Swap of the two bra layers on `(ket1, bra1, ket2, bra2)`.
fn bra_swap(chi: usize) -> DMatrix<f64> {
    let dim = chi.pow(4);
    let mut x = DMatrix::zeros(dim, dim);
    let idx = |a: usize, b: usize, c: usize, d: usize| ((a * chi + b) * chi + c) * chi + d;
    for a in 0..chi {
        for b in 0..chi {
            for c in 0..chi {
                for d in 0..chi {
                    x[(idx(a, b, c, d), idx(a, d, c, b))] = 1.0;
                }
            }
        }
    }
    x
}

pub fn mps_purity(mps: &Mps, n_sites: usize, start: usize, len: usize) -> Result<MpsPurity> {
    if n_sites > MAX_DENSE_SITES {
        return Err(Error::DimensionCap { dim: 1 << n_sites, cap: 1 << MAX_DENSE_SITES });
    }
    if len == 0 || start + len > n_sites {
        return Err(Error::InvalidGeometry(format!("interval [{start}, {}) not inside 0..{n_sites}", start + len)));
    }
    let e1 = mps.single_transfer();
    let e2 = ScaledMatrix::new(e1.kronecker(&e1));
    let x = ScaledMatrix::new(bra_swap(mps.chi));
    let chain =
        e2.pow(start as u64).mul(&x).mul(&e2.pow(len as u64)).mul(&x).mul(&e2.pow((n_sites - start - len) as u64));
    let num = chain.trace();
    let den = ScaledMatrix::new(e1).pow(n_sites as u64).trace();
    if den.sign <= 0.0 {
        return Err(Error::NullState);
    }
    let p2_transfer = num.sign * (num.log_abs - 2.0 * den.log_abs).exp();

    // direct: rows of M index the interval, columns the rest
    let rest = n_sites - len;
    let mut m = DMatrix::zeros(1 << len, 1 << rest);
    for config in 0..1usize << n_sites {
        let (mut a, mut b) = (0usize, 0usize);
        for site in 0..n_sites {
            let bit = (config >> (n_sites - 1 - site)) & 1;
            if site >= start && site < start + len {
                a = (a << 1) | bit;
            } else {
                b = (b << 1) | bit;
            }
        }
        m[(a, b)] = mps.amplitude(config, n_sites);
    }
    let rho = &m * m.transpose();
    let tr = rho.trace();
    if tr <= 0.0 {
        return Err(Error::NullState);
    }
    let p2_direct = rho.norm_squared() / (tr * tr);
    Ok(MpsPurity { p2_transfer, p2_direct })
}

pub fn mps_purity_demo(chi: usize, n_sites: usize, interval: (usize, usize), seed: u64) -> Result<MpsPurity> {
    mps_purity(&Mps::random(chi, seed), n_sites, interval.0, interval.1)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn product_state_is_pure() {
        let r = mps_purity_demo(1, 7, (2, 3), 11).unwrap();
        assert!((r.p2_transfer - 1.0).abs() < 1e-13);
        assert!((r.p2_direct - 1.0).abs() < 1e-13);
    }

    #[test]
    fn ghz_has_purity_one_half() {
        let r = mps_purity(&Mps::ghz(), 6, 0, 2).unwrap();
        assert!((r.p2_transfer - 0.5).abs() < 1e-14);
        assert!((r.p2_direct - 0.5).abs() < 1e-14);
    }

    #[test]
    fn random_chain_matches_state_vector() {
        let r = mps_purity_demo(2, 8, (1, 3), 2024).unwrap();
        assert!((r.p2_transfer - r.p2_direct).abs() <= 1e-12, "{r:?}");
        assert!(r.p2_direct < 1.0);
    }

    #[test]
    fn rejects_large_chains() {
        assert!(mps_purity_demo(2, 13, (0, 2), 1).is_err());
    }
}
