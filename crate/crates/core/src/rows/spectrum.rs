use super::RowOperator;
use crate::error::{Error, Result};
use crate::linalg::{dense_eigenvalues, leading_eigenvalues, IterativeOptions, C64};

pub const DENSE_THRESHOLD: usize = 4096;

#[derive(Debug, Clone, Copy)]
pub struct SpectrumOptions {
    pub degeneracy_rel_tol: f64,
    pub dense_threshold: usize,
    pub iterative: IterativeOptions,
}

impl Default for SpectrumOptions {
    fn default() -> Self {
        SpectrumOptions {
            degeneracy_rel_tol: 1e-9,
            dense_threshold: DENSE_THRESHOLD,
            iterative: IterativeOptions::default(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct SpectrumReport {
    /// Leading eigenvalues, descending magnitude (all of them when dense).
    pub eigenvalues: Vec<C64>,
    pub rho1: f64,
    pub degeneracy: usize,
    /// `|rho_{K+1}| / |rho_1|`, zero when nothing lies below the top cluster.
    pub gap_ratio: f64,
    pub dense: bool,
}

impl SpectrumReport {
    /// The dominant eigenvalue, provided every member of the top cluster is real
    /// and positive.
    pub fn dominant_positive(&self) -> Result<f64> {
        for ev in &self.eigenvalues[..self.degeneracy] {
            if ev.im.abs() > 1e-9 * self.rho1 || ev.re <= 0.0 {
                return Err(Error::Diagnostic(format!("leading eigenvalue {ev} is not real positive")));
            }
        }
        Ok(self.rho1)
    }
}

pub fn spectrum(row: &RowOperator, degeneracy_rel_tol: f64) -> Result<SpectrumReport> {
    spectrum_with(row, SpectrumOptions { degeneracy_rel_tol, ..Default::default() })
}

pub fn spectrum_with(row: &RowOperator, opts: SpectrumOptions) -> Result<SpectrumReport> {
    let m = &row.matrix;
    if m.iter().any(|x| !x.is_finite()) {
        return Err(Error::InvalidParams("row matrix has non-finite entries".into()));
    }
    if m.amax() == 0.0 {
        return Err(Error::NullOperator);
    }
    let dense = m.nrows() <= opts.dense_threshold;
    let eigenvalues = match dense {
        true => match dense_eigenvalues(m) {
            Ok(ev) => ev,
            // a stalled Schur sweep still leaves the leading part to power iteration
            Err(Error::NonConvergence { .. }) => leading_eigenvalues(m, opts.iterative)?,
            Err(e) => return Err(e),
        },
        false => leading_eigenvalues(m, opts.iterative)?,
    };
    let rho1 = eigenvalues[0].norm();
    if rho1 == 0.0 {
        return Err(Error::NullOperator);
    }
    let degeneracy =
        eigenvalues.iter().take_while(|e| (e.norm() - rho1).abs() <= opts.degeneracy_rel_tol * rho1).count();
    let gap_ratio = eigenvalues.get(degeneracy).map_or(0.0, |e| e.norm() / rho1);
    Ok(SpectrumReport { eigenvalues, rho1, degeneracy, gap_ratio, dense })
}
