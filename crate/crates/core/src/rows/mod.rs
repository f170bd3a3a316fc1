//! Row transfer matrices on a periodic ring of `N1` sites.
//!
//! A row matrix maps the lower vertical legs `(d_1..d_N1)` (row index) to the
//! upper ones (column index); site 1 is the most significant digit. Rows stack
//! bottom to top by ordinary matrix products.

mod boundary;
mod replica;
mod spectrum;

use nalgebra::DMatrix;

pub use boundary::{
    boundary_row, boundary_row_transposed, boundary_row_with, boundary_site_operator, BoundaryOperator,
};
pub use replica::{Pairing, SiteBlock, SiteLabels};
pub use spectrum::{spectrum, spectrum_with, SpectrumOptions, SpectrumReport, DENSE_THRESHOLD};

use crate::error::{Error, Result};
use crate::transfer::{FullTransfer, SpectralForm};

/// Largest row dimension assembled by default.
pub const DEFAULT_DIM_CAP: usize = 1 << 13;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RowKind {
    /// Plain ring, no insertions.
    Bulk,
    /// Boundary operators before site 1 and after site `r1`.
    Boundary { r1: usize },
    /// First row of the subsystem, including its lower-left corner.
    Corner { r1: usize },
    /// Any other per-site labeling.
    Labeled,
}

#[derive(Debug, Clone)]
pub struct RowOperator {
    pub order: usize,
    pub width: usize,
    pub kind: RowKind,
    pub matrix: DMatrix<f64>,
}

impl RowOperator {
    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }
}

fn row_dim(n: usize, n1: usize, cap: usize) -> Result<usize> {
    if n1 == 0 || n == 0 {
        return Err(Error::InvalidGeometry("row needs N1 >= 1 and n >= 1".into()));
    }
    let dim = 1usize.checked_shl((n * n1) as u32).filter(|_| n * n1 < usize::BITS as usize).unwrap_or(usize::MAX);
    if dim > cap {
        return Err(Error::DimensionCap { dim, cap });
    }
    Ok(dim)
}

/// Contract site blocks around the ring. `bonds[x]` acts on the horizontal bond
/// right after site `x`; the last entry sits on the bond that closes the ring.
pub fn contract_ring(blocks: &[&SiteBlock], bonds: &[Option<DMatrix<f64>>]) -> DMatrix<f64> {
    let n1 = blocks.len();
    assert!(n1 >= 1 && bonds.len() == n1);
    let d = blocks[0].dim;
    let dim = d.pow(n1 as u32);
    let mut e = DMatrix::zeros(dim, dim);
    for h0 in 0..d {
        // state[h][din][dout] after the first k sites, m = d^k
        let mut m = 1usize;
        let mut state = vec![0.0; d];
        state[h0] = 1.0;
        for x in 0..n1 - 1 {
            let md = m * d;
            let mut next = vec![0.0; d * md * md];
            for h in 0..d {
                for din in 0..m {
                    for dout in 0..m {
                        let v = state[(h * m + din) * m + dout];
                        if v == 0.0 {
                            continue;
                        }
                        for &(h2, dd, uu, w) in &blocks[x].by_left[h] {
                            next[(h2 * md + din * d + dd) * md + dout * d + uu] += v * w;
                        }
                    }
                }
            }
            m = md;
            if let Some(b) = &bonds[x] {
                next = apply_bond(&next, b, m * m);
            }
            state = next;
        }
        let close = |h2: usize| match &bonds[n1 - 1] {
            Some(b) => b[(h2, h0)],
            None => f64::from(u8::from(h2 == h0)),
        };
        for h in 0..d {
            for din in 0..m {
                for dout in 0..m {
                    let v = state[(h * m + din) * m + dout];
                    if v == 0.0 {
                        continue;
                    }
                    for &(h2, dd, uu, w) in &blocks[n1 - 1].by_left[h] {
                        let c = close(h2);
                        if c != 0.0 {
                            e[(din * d + dd, dout * d + uu)] += v * w * c;
                        }
                    }
                }
            }
        }
    }
    e
}

fn apply_bond(state: &[f64], b: &DMatrix<f64>, stride: usize) -> Vec<f64> {
    let d = b.nrows();
    let mut out = vec![0.0; state.len()];
    for h in 0..d {
        for h2 in 0..d {
            let w = b[(h, h2)];
            if w == 0.0 {
                continue;
            }
            let src = &state[h * stride..(h + 1) * stride];
            let dst = &mut out[h2 * stride..(h2 + 1) * stride];
            for (o, s) in dst.iter_mut().zip(src) {
                *o += w * s;
            }
        }
    }
    out
}

/// `E^(n)` (no insertion) or `E^(n)_||(R1)` from the spectral form, with the
/// order-`n` boundary operator inserted before site 1 and after site `R1`.
pub fn assemble_row(
    spec: &SpectralForm,
    n: usize,
    n1: usize,
    insertion: Option<usize>,
    cap: usize,
) -> Result<RowOperator> {
    match insertion {
        None => assemble_row_with(spec, n, n1, None, cap),
        Some(r1) => {
            let op = if n >= 2 { boundary_site_operator(n)? } else { BoundaryOperator { order: 1, perm: vec![0, 1] } };
            let right = op.flag_matrix();
            let left = op.inverse().flag_matrix();
            assemble_row_with(spec, n, n1, Some((r1, left, right)), cap)
        }
    }
}

/// Same as [`assemble_row`] with caller-chosen left and right bond operators.
pub fn assemble_row_with(
    spec: &SpectralForm,
    n: usize,
    n1: usize,
    insertion: Option<(usize, DMatrix<f64>, DMatrix<f64>)>,
    cap: usize,
) -> Result<RowOperator> {
    row_dim(n, n1, cap)?;
    let block = SiteBlock::tensor_power(n, |l, r, d, u| spec.leg_entry(l, r, d, u));
    let blocks = vec![&block; n1];
    let mut bonds: Vec<Option<DMatrix<f64>>> = vec![None; n1];
    let kind = match insertion {
        None => RowKind::Bulk,
        Some((r1, left, right)) => {
            if r1 == 0 || r1 > n1 {
                return Err(Error::InvalidGeometry(format!("need 1 <= R1 <= N1, got R1={r1}, N1={n1}")));
            }
            if left.nrows() != block.dim || right.nrows() != block.dim {
                return Err(Error::InvalidParams("boundary operator has the wrong dimension".into()));
            }
            bonds[r1 - 1] = Some(right);
            bonds[n1 - 1] = Some(match bonds[n1 - 1].take() {
                Some(prev) => prev * left,
                None => left,
            });
            RowKind::Boundary { r1 }
        }
    };
    Ok(RowOperator { order: n, width: n1, kind, matrix: contract_ring(&blocks, &bonds) })
}

/// Row with arbitrary per-site pairings, built from the full double-layer tensor.
pub fn assemble_labeled_row(t1: &FullTransfer, n: usize, labels: &[SiteLabels], cap: usize) -> Result<RowOperator> {
    row_dim(n, labels.len(), cap)?;
    let mut cache: Vec<(SiteLabels, SiteBlock)> = Vec::new();
    for l in labels {
        if !cache.iter().any(|(k, _)| k == l) {
            cache.push((*l, SiteBlock::labeled(t1, n, *l)));
        }
    }
    let blocks: Vec<&SiteBlock> = labels.iter().map(|l| &cache.iter().find(|(k, _)| k == l).unwrap().1).collect();
    let bonds = vec![None; labels.len()];
    Ok(RowOperator { order: n, width: labels.len(), kind: RowKind::Labeled, matrix: contract_ring(&blocks, &bonds) })
}

/// Per-site labels of the lowest subsystem row: sites `1..=r1` belong to A, the
/// row below lies outside.
pub fn corner_row_labels(n1: usize, r1: usize) -> Vec<SiteLabels> {
    let region = |x: usize| if x >= 1 && x <= r1 { Pairing::Inside } else { Pairing::Outside };
    (1..=n1)
        .map(|x| SiteLabels { own: region(x), left: region(if x == 1 { n1 } else { x - 1 }), down: Pairing::Outside })
        .collect()
}

/// Lowest row of the subsystem. Its first site sees outside links on both its
/// left and lower legs, which couples flux sectors that the singlet projection
/// drops, so it is assembled from the full double-layer tensor.
pub fn assemble_corner_row(t1: &FullTransfer, n: usize, n1: usize, r1: usize, cap: usize) -> Result<RowOperator> {
    if r1 == 0 || r1 >= n1 {
        return Err(Error::InvalidGeometry(format!("need 1 <= R1 < N1, got R1={r1}, N1={n1}")));
    }
    let mut row = assemble_labeled_row(t1, n, &corner_row_labels(n1, r1), cap)?;
    row.kind = RowKind::Corner { r1 };
    Ok(row)
}
