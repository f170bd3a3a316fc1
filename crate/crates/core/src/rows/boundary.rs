use nalgebra::DMatrix;

use super::replica::{copy_bit, Pairing};
use crate::error::{Error, Result};
use crate::linalg::kron_all;

/// Layer relabeling at the edge of the subsystem.
///
/// The first layer of every copy stays put and the second moves forward by one
/// copy (cyclically). Its inverse turns the outside pairing into the inside one.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BoundaryOperator {
    pub order: usize,
    /// `perm[i]` is the image of layer `i`.
    pub perm: Vec<usize>,
}

pub fn boundary_site_operator(n: usize) -> Result<BoundaryOperator> {
    if n < 2 {
        return Err(Error::InvalidParams(format!("boundary operator needs n >= 2, got {n}")));
    }
    let perm = (0..2 * n).map(|i| if i % 2 == 0 { i } else { (i + 2) % (2 * n) }).collect();
    Ok(BoundaryOperator { order: n, perm })
}

impl BoundaryOperator {
    /// `2n x 2n` permutation matrix with a one at `(i, perm[i])`.
    pub fn matrix(&self) -> DMatrix<f64> {
        let m = self.perm.len();
        DMatrix::from_fn(m, m, |i, j| if self.perm[i] == j { 1.0 } else { 0.0 })
    }

    pub fn inverse(&self) -> BoundaryOperator {
        let mut perm = vec![0; self.perm.len()];
        for (i, &p) in self.perm.iter().enumerate() {
            perm[p] = i;
        }
        BoundaryOperator { order: self.order, perm }
    }

    /// Action on a leg carried in the outside pairing, written in that same flag
    /// basis: entry `(a,b)` is one when the relabeled layers of state `a` form
    /// the outside-paired state `b`.
    pub fn flag_matrix(&self) -> DMatrix<f64> {
        let n = self.order;
        let dim = 1 << n;
        let mut out = DMatrix::zeros(dim, dim);
        for a in 0..dim {
            let mut moved = vec![0usize; 2 * n];
            for (layer, &target) in self.perm.iter().enumerate() {
                moved[target] = copy_bit(a, Pairing::Outside.copy_of(layer, n), n);
            }
            if (0..n).all(|k| moved[2 * k] == moved[2 * k + 1]) {
                let b = (0..n).fold(0, |acc, k| (acc << 1) | moved[2 * k]);
                out[(a, b)] = 1.0;
            }
        }
        out
    }
}

/// `X (x) ... (x) X (x) 1 (x) ... (x) 1` with `r1` boundary factors, in the flag basis.
pub fn boundary_row(n: usize, n1: usize, r1: usize, cap: usize) -> Result<DMatrix<f64>> {
    boundary_row_with(&boundary_site_operator(n)?.flag_matrix(), n1, r1, cap)
}

/// Left-boundary variant built from the inverse relabeling.
pub fn boundary_row_transposed(n: usize, n1: usize, r1: usize, cap: usize) -> Result<DMatrix<f64>> {
    boundary_row_with(&boundary_site_operator(n)?.inverse().flag_matrix(), n1, r1, cap)
}

pub fn boundary_row_with(site: &DMatrix<f64>, n1: usize, r1: usize, cap: usize) -> Result<DMatrix<f64>> {
    if r1 == 0 || r1 > n1 {
        return Err(Error::InvalidGeometry(format!("need 1 <= R1 <= N1, got R1={r1}, N1={n1}")));
    }
    let d = site.nrows();
    let dim = d.checked_pow(n1 as u32).unwrap_or(usize::MAX);
    if dim > cap {
        return Err(Error::DimensionCap { dim, cap });
    }
    let factors: Vec<DMatrix<f64>> =
        (0..n1).map(|x| if x < r1 { site.clone() } else { DMatrix::identity(d, d) }).collect();
    Ok(kron_all(&factors))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn order_two_is_the_swap_of_second_layers() {
        let x = boundary_site_operator(2).unwrap().matrix();
        #[rustfmt::skip]
        let want = DMatrix::from_row_slice(4, 4, &[
            1.0, 0.0, 0.0, 0.0,
            0.0, 0.0, 0.0, 1.0,
            0.0, 0.0, 1.0, 0.0,
            0.0, 1.0, 0.0, 0.0,
        ]);
        assert_eq!(x, want);
        assert_eq!(&x * &x, DMatrix::identity(4, 4));
    }

    #[test]
    fn order_three_is_a_three_cycle() {
        let x = boundary_site_operator(3).unwrap().matrix();
        assert_ne!(&x * &x, DMatrix::identity(6, 6));
        assert_eq!(&x * &x * &x, DMatrix::identity(6, 6));
    }

    #[test]
    fn permutation_matrix_is_orthogonal() {
        for n in 2..6 {
            let x = boundary_site_operator(n).unwrap().matrix();
            assert_eq!(&x * x.transpose(), DMatrix::identity(2 * n, 2 * n));
            for i in 0..2 * n {
                assert_eq!(x.row(i).sum(), 1.0);
                assert_eq!(x.column(i).sum(), 1.0);
            }
        }
    }

    #[test]
    fn inverse_maps_outside_pairs_onto_inside_pairs() {
        for n in 2..6 {
            let inv = boundary_site_operator(n).unwrap().inverse();
            for k in 0..n {
                let (a, b) = Pairing::Outside.layers(k, n);
                let (c, d) = Pairing::Inside.layers(k, n);
                assert_eq!((inv.perm[a], inv.perm[b]), (c, d));
            }
        }
    }

    #[test]
    fn flag_action_keeps_only_copy_uniform_fluxes() {
        let p = boundary_site_operator(2).unwrap().flag_matrix();
        assert_eq!(p, DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![1.0, 0.0, 0.0, 1.0])));
        let p3 = boundary_site_operator(3).unwrap().flag_matrix();
        assert_eq!(p3.sum(), 2.0);
        assert_eq!((p3[(0, 0)], p3[(7, 7)]), (1.0, 1.0));
    }

    #[test]
    fn rejects_order_one() {
        assert!(boundary_site_operator(1).is_err());
    }

    #[test]
    fn boundary_rows_are_kronecker_products() {
        let p = boundary_site_operator(2).unwrap().flag_matrix();
        assert_eq!(boundary_row(2, 1, 1, 1 << 20).unwrap(), p);
        let row = boundary_row(2, 2, 1, 1 << 20).unwrap();
        assert_eq!(row, p.kronecker(&DMatrix::identity(4, 4)));
        for n1 in 1..4 {
            for r1 in 1..=n1 {
                let x = boundary_row(2, n1, r1, 1 << 20).unwrap();
                assert_eq!(&x * &x, x);
                assert_eq!(x, boundary_row_transposed(2, n1, r1, 1 << 20).unwrap());
            }
        }
    }
}
