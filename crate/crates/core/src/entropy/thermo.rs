use super::{EntropyResult, Method};
use crate::error::{Error, Result};
use crate::params::PepsParams;
use crate::rows::{assemble_row, spectrum, SpectrumReport, DEFAULT_DIM_CAP};
use crate::tensor::build_site_tensor;
use crate::transfer::{spectral_decompose, transfer_from_tensor, SpectralForm};

const DEGENERACY_TOL: f64 = 1e-9;
const MAX_GAP_RATIO: f64 = 0.999;

#[derive(Debug, Clone, PartialEq)]
pub struct ThermoComponents {
    pub rho1: f64,
    pub rho1_prime: f64,
    pub degeneracy: usize,
    /// `-n ln K / (1-n)`.
    pub log_k_term: f64,
    /// `ln(rho1'/rho1) / (1-n)`, the entropy per unit of `R1 + R2`.
    pub perimeter_coefficient: f64,
}

fn spec_of(params: &PepsParams) -> Result<SpectralForm> {
    spectral_decompose(&transfer_from_tensor(&build_site_tensor(params)?)?)
}

fn context(what: &str) -> impl Fn(Error) -> Error + '_ {
    move |e| match e {
        Error::Diagnostic(m) => Error::Diagnostic(format!("{what}: {m}")),
        other => Error::Diagnostic(format!("{what}: {other}")),
    }
}

fn gapped_dominant(report: &SpectrumReport, what: &str) -> Result<f64> {
    let rho = report.dominant_positive().map_err(context(what))?;
    if report.gap_ratio > MAX_GAP_RATIO {
        return Err(Error::Diagnostic(format!("{what}: gap ratio {} above {MAX_GAP_RATIO}", report.gap_ratio)));
    }
    Ok(rho)
}

/// Dominant eigenvalue of the row with boundary insertions at `(1, r1)`.
pub fn boundary_row_eigenvalue(params: &PepsParams, n: usize, n1: usize, r1: usize) -> Result<f64> {
    let spec = spec_of(params)?;
    let row = assemble_row(&spec, n, n1, Some(r1), DEFAULT_DIM_CAP)?;
    spectrum(&row, DEGENERACY_TOL)?.dominant_positive()
}

/// Closed form valid for `1 << R1, R2 << N1, N2`:
/// `S_n = [-n ln K + (R1 + R2) ln(rho1'/rho1)] / (1 - n)` with both dominant
/// eigenvalues taken at width `N1`.
pub fn renyi_thermodynamic(params: &PepsParams, r1: usize, r2: usize, n1: usize, n: usize) -> Result<EntropyResult> {
    if n < 2 {
        return Err(Error::InvalidParams(format!("Renyi order must be >= 2, got {n}")));
    }
    if r1 < 1 || r1 >= n1 || r2 < 1 {
        return Err(Error::InvalidGeometry(format!("need 1 <= R1 < N1 and R2 >= 1, got R1={r1} N1={n1} R2={r2}")));
    }
    let spec = spec_of(params)?;
    let single = spectrum(&assemble_row(&spec, 1, n1, None, DEFAULT_DIM_CAP)?, DEGENERACY_TOL)?;
    single.dominant_positive().map_err(context("normalization row"))?;
    let bulk = spectrum(&assemble_row(&spec, n, n1, None, DEFAULT_DIM_CAP)?, DEGENERACY_TOL)?;
    let rho1 = gapped_dominant(&bulk, "bulk row")?;
    let inside = spectrum(&assemble_row(&spec, n, n1, Some(r1), DEFAULT_DIM_CAP)?, DEGENERACY_TOL)?;
    let rho1_prime = gapped_dominant(&inside, "boundary row")?;
    let nf = n as f64;
    let k = bulk.degeneracy;
    let log_k_term = -nf * (k as f64).ln() / (1.0 - nf);
    let perimeter_coefficient = (rho1_prime / rho1).ln() / (1.0 - nf);
    Ok(EntropyResult {
        order: n,
        value: log_k_term + (r1 + r2) as f64 * perimeter_coefficient,
        method: Method::Thermodynamic,
        thermo: Some(ThermoComponents { rho1, rho1_prime, degeneracy: k, log_k_term, perimeter_coefficient }),
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KappaFit {
    pub gamma: f64,
    pub kappa: f64,
    pub residual: f64,
}

/// Least-squares fit of `ln rho = ln Gamma - kappa R`.
pub fn kappa_fit_values(points: &[(f64, f64)]) -> KappaFit {
    if points.len() == 1 {
        return KappaFit { gamma: points[0].1, kappa: 0.0, residual: 0.0 };
    }
    let m = points.len() as f64;
    let xs: Vec<f64> = points.iter().map(|p| p.0).collect();
    let ys: Vec<f64> = points.iter().map(|p| p.1.ln()).collect();
    let xm = xs.iter().sum::<f64>() / m;
    let ym = ys.iter().sum::<f64>() / m;
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - xm) * (y - ym)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - xm).powi(2)).sum();
    let slope = if sxx > 0.0 { sxy / sxx } else { 0.0 };
    let intercept = ym - slope * xm;
    let residual = xs.iter().zip(&ys).map(|(x, y)| (y - intercept - slope * x).abs()).fold(0.0, f64::max);
    KappaFit { gamma: intercept.exp(), kappa: -slope, residual }
}

pub fn kappa_fit(params: &PepsParams, n: usize, n1: usize, r_range: &[usize]) -> Result<KappaFit> {
    if r_range.is_empty() {
        return Err(Error::InvalidGeometry("empty R range".into()));
    }
    let points = r_range
        .iter()
        .map(|&r| Ok((r as f64, boundary_row_eigenvalue(params, n, n1, r)?)))
        .collect::<Result<Vec<_>>>()?;
    Ok(kappa_fit_values(&points))
}
