use nalgebra::DMatrix;

use super::{EntropyResult, LatticeGeometry, Method};
use crate::error::{Error, Result};
use crate::linalg::{LogScalar, ScaledMatrix};
use crate::params::PepsParams;
use crate::rows::{
    assemble_corner_row, assemble_row, assemble_row_with, boundary_row, boundary_row_with, DEFAULT_DIM_CAP,
};
use crate::tensor::{build_site_tensor, SiteTensor};
use crate::transfer::{spectral_decompose, transfer_from_tensor, transfer_full, SpectralForm};

/// All rows needed for one finite-lattice purity.
#[derive(Debug, Clone)]
pub struct FiniteRows {
    pub norm_row: DMatrix<f64>,
    pub bulk: DMatrix<f64>,
    pub inside: DMatrix<f64>,
    pub corner: DMatrix<f64>,
    pub boundary: DMatrix<f64>,
}

impl FiniteRows {
    pub fn build(a: &SiteTensor, n1: usize, r1: usize, n: usize, cap: usize) -> Result<Self> {
        let spec = spectral_decompose(&transfer_from_tensor(a)?)?;
        let t1 = transfer_full(a);
        Ok(FiniteRows {
            norm_row: assemble_row(&spec, 1, n1, None, cap)?.matrix,
            bulk: assemble_row(&spec, n, n1, None, cap)?.matrix,
            inside: assemble_row(&spec, n, n1, Some(r1), cap)?.matrix,
            corner: assemble_corner_row(&t1, n, n1, r1, cap)?.matrix,
            boundary: boundary_row(n, n1, r1, cap)?,
        })
    }

    /// `Tr[C E_||^(R2-1) X E^(N2-R2)] / Tr[E1^N2]^n`.
    pub fn purity(&self, n2: usize, r2: usize, n: usize) -> Result<f64> {
        if r2 < 1 || r2 >= n2 {
            return Err(Error::InvalidGeometry(format!("need 1 <= R2 < N2, got R2={r2}, N2={n2}")));
        }
        let below =
            ScaledMatrix::new(self.corner.clone()).mul(&ScaledMatrix::new(self.inside.clone()).pow(r2 as u64 - 1));
        let mut above = ScaledMatrix::new(self.bulk.clone()).pow((n2 - r2) as u64);
        above.mantissa = &self.boundary * &above.mantissa;
        let num = below.trace_product(&above);
        ratio(num, norm(&self.norm_row, n2)?, n)
    }

    /// Purities for every `R2` in `r2_lo..=r2_hi` at fixed `N2`, one product per step.
    pub fn purity_sweep(&self, n2: usize, r2_lo: usize, r2_hi: usize, n: usize) -> Result<Vec<f64>> {
        if r2_lo < 1 || r2_hi >= n2 || r2_lo > r2_hi {
            return Err(Error::InvalidGeometry(format!("need 1 <= R2 < N2, got {r2_lo}..={r2_hi}, N2={n2}")));
        }
        let den = norm(&self.norm_row, n2)?;
        let inside = ScaledMatrix::new(self.inside.clone());
        let bulk = ScaledMatrix::new(self.bulk.clone());
        let mut below = ScaledMatrix::new(self.corner.clone()).mul(&inside.pow(r2_lo as u64 - 1));
        let mut belows = Vec::with_capacity(r2_hi - r2_lo + 1);
        for r2 in r2_lo..=r2_hi {
            if r2 > r2_lo {
                below = below.mul(&inside);
            }
            belows.push(below.clone());
        }
        let mut above = bulk.pow((n2 - r2_hi) as u64);
        let mut out = vec![0.0; belows.len()];
        for (i, r2) in (r2_lo..r2_hi + 1).enumerate().rev() {
            if r2 < r2_hi {
                above = above.mul(&bulk);
            }
            let mut bounded = above.clone();
            bounded.mantissa = &self.boundary * &bounded.mantissa;
            out[i] = ratio(belows[i].trace_product(&bounded), den, n)?;
        }
        Ok(out)
    }
}

fn norm(norm_row: &DMatrix<f64>, n2: usize) -> Result<LogScalar> {
    let den = ScaledMatrix::new(norm_row.clone()).pow(n2 as u64).trace();
    if den.sign <= 0.0 {
        return Err(Error::NullState);
    }
    Ok(den)
}

fn ratio(num: LogScalar, den: LogScalar, n: usize) -> Result<f64> {
    if num.sign <= 0.0 {
        return Err(Error::Diagnostic(format!("purity numerator is not positive ({})", num.value())));
    }
    Ok((num.log_abs - n as f64 * den.log_abs).exp())
}

fn check_order(n: usize) -> Result<()> {
    if n < 2 {
        return Err(Error::InvalidParams(format!("Renyi order must be >= 2, got {n}")));
    }
    Ok(())
}

pub fn purity_finite(params: &PepsParams, geom: &LatticeGeometry, n: usize) -> Result<f64> {
    purity_from_tensor(&build_site_tensor(params)?, geom, n, DEFAULT_DIM_CAP)
}

pub fn purity_from_tensor(a: &SiteTensor, geom: &LatticeGeometry, n: usize, cap: usize) -> Result<f64> {
    check_order(n)?;
    FiniteRows::build(a, geom.n1, geom.r1, n, cap)?.purity(geom.n2, geom.r2, n)
}

pub fn renyi_finite(params: &PepsParams, geom: &LatticeGeometry, n: usize) -> Result<EntropyResult> {
    let p = purity_finite(params, geom, n)?;
    Ok(EntropyResult { order: n, value: p.ln() / (1.0 - n as f64), method: Method::FiniteLattice, thermo: None })
}

/// Tiling with a caller-supplied per-site boundary operator `x` in the flag basis:
/// `Tr[Xrow^T E_||^R2 Xrow E^(N2-R2)] / Tr[E1^N2]^n`, where `E_||` carries `x^T`
/// before site 1 and `x` after site `R1`. There is no corner row here.
pub fn purity_with_boundary_operator(
    params: &PepsParams,
    geom: &LatticeGeometry,
    n: usize,
    x: &DMatrix<f64>,
) -> Result<f64> {
    check_order(n)?;
    let cap = DEFAULT_DIM_CAP;
    let a = build_site_tensor(params)?;
    let spec: SpectralForm = spectral_decompose(&transfer_from_tensor(&a)?)?;
    let inside = assemble_row_with(&spec, n, geom.n1, Some((geom.r1, x.transpose(), x.clone())), cap)?.matrix;
    let bulk = assemble_row(&spec, n, geom.n1, None, cap)?.matrix;
    let norm_row = assemble_row(&spec, 1, geom.n1, None, cap)?.matrix;
    let xrow = boundary_row_with(x, geom.n1, geom.r1, cap)?;
    let below = ScaledMatrix::new(xrow.transpose()).mul(&ScaledMatrix::new(inside).pow(geom.r2 as u64));
    let above = ScaledMatrix::new(xrow).mul(&ScaledMatrix::new(bulk).pow((geom.n2 - geom.r2) as u64));
    ratio(below.trace_product(&above), norm(&norm_row, geom.n2)?, n)
}

/// Relative difference between row-wise and column-wise tiling of the same purity.
pub fn contraction_consistency(params: &PepsParams, geom: &LatticeGeometry, n: usize) -> Result<f64> {
    let a = build_site_tensor(params)?;
    let rows = purity_from_tensor(&a, geom, n, DEFAULT_DIM_CAP)?;
    let cols = purity_from_tensor(&a.transposed(), &geom.transposed(), n, DEFAULT_DIM_CAP)?;
    Ok((rows - cols).abs() / rows.abs())
}
