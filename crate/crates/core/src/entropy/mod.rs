//! Normalized purities and Rényi entropies.

mod finite;
mod mps;
mod thermo;

pub use finite::{
    contraction_consistency, purity_finite, purity_from_tensor, purity_with_boundary_operator, renyi_finite, FiniteRows,
};
pub use mps::{mps_purity, mps_purity_demo, Mps, MpsPurity};
pub use thermo::{
    boundary_row_eigenvalue, kappa_fit, kappa_fit_values, renyi_thermodynamic, KappaFit, ThermoComponents,
};

use crate::error::{Error, Result};

/// Periodic `N1 x N2` lattice with an `R1 x R2` block in its lower-left corner.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LatticeGeometry {
    pub n1: usize,
    pub n2: usize,
    pub r1: usize,
    pub r2: usize,
}

impl LatticeGeometry {
    pub fn new(n1: usize, n2: usize, r1: usize, r2: usize) -> Result<Self> {
        if r1 < 1 || r1 + 1 > n1 || r2 < 1 || r2 + 1 > n2 {
            return Err(Error::InvalidGeometry(format!(
                "need 1 <= R1 < N1 and 1 <= R2 < N2, got N1={n1} N2={n2} R1={r1} R2={r2}"
            )));
        }
        Ok(LatticeGeometry { n1, n2, r1, r2 })
    }

    /// Same lattice with the two directions exchanged.
    pub fn transposed(&self) -> Self {
        LatticeGeometry { n1: self.n2, n2: self.n1, r1: self.r2, r2: self.r1 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    FiniteLattice,
    Thermodynamic,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EntropyResult {
    pub order: usize,
    pub value: f64,
    pub method: Method,
    pub thermo: Option<ThermoComponents>,
}
