//! Browser bindings for three small computations: the tau0 spectrum, boundary-row
//! eigenvalues across R1 and an S2 curve along delta.
//!
//! Each export has a plain Rust twin so the numbers can be tested natively.

use lgt_renyi::entropy::{renyi_finite, LatticeGeometry};
use lgt_renyi::rows::{assemble_row, spectrum, DEFAULT_DIM_CAP};
use lgt_renyi::transfer::{spectral_decompose, tau0_explicit};
use lgt_renyi::{Error, PepsParams};
use wasm_bindgen::prelude::*;

/// Widest ring the page may request; n = 2 rows stay at 1024 entries per side.
pub const MAX_WIDTH: usize = 5;
pub const MAX_CURVE_POINTS: usize = 400;

/// `[lambda1, lambda2, lambda3, lambda4]`.
pub fn tau0_spectrum_values(alpha: f64, beta: f64, gamma: f64, delta: f64) -> Result<Vec<f64>, Error> {
    let p = PepsParams::new(alpha, beta, gamma, delta)?;
    Ok(spectral_decompose(&tau0_explicit(&p)?)?.lambda.to_vec())
}

/// `[rho1, rho1'(1), ..., rho1'(N1-1)]` for n = 2.
pub fn boundary_eigenvalue_values(alpha: f64, beta: f64, gamma: f64, delta: f64, n1: usize) -> Result<Vec<f64>, Error> {
    if !(2..=MAX_WIDTH).contains(&n1) {
        return Err(Error::InvalidGeometry(format!("width must be in 2..={MAX_WIDTH}, got {n1}")));
    }
    let p = PepsParams::new(alpha, beta, gamma, delta)?;
    let sf = spectral_decompose(&tau0_explicit(&p)?)?;
    let mut out = vec![spectrum(&assemble_row(&sf, 2, n1, None, DEFAULT_DIM_CAP)?, 1e-9)?.rho1];
    for r in 1..n1 {
        out.push(spectrum(&assemble_row(&sf, 2, n1, Some(r), DEFAULT_DIM_CAP)?, 1e-9)?.rho1);
    }
    Ok(out)
}

/// Geometry and delta range of an S2 curve.
#[derive(Debug, Clone, Copy)]
pub struct Curve {
    pub n1: usize,
    pub n2: usize,
    pub r1: usize,
    pub r2: usize,
    pub delta_min: f64,
    pub delta_max: f64,
    pub points: usize,
}

/// `S2` at `points` evenly spaced deltas, endpoints included.
pub fn s2_curve_values(alpha: f64, beta: f64, gamma: f64, c: Curve) -> Result<Vec<f64>, Error> {
    if c.n1 > MAX_WIDTH {
        return Err(Error::InvalidGeometry(format!("width must be at most {MAX_WIDTH}, got {}", c.n1)));
    }
    if !(2..=MAX_CURVE_POINTS).contains(&c.points)
        || c.delta_max <= c.delta_min
        || c.delta_max.is_nan()
        || c.delta_min.is_nan()
    {
        return Err(Error::InvalidParams(format!(
            "need 2..={MAX_CURVE_POINTS} points on a nonempty delta range, got {} on [{}, {}]",
            c.points, c.delta_min, c.delta_max
        )));
    }
    let g = LatticeGeometry::new(c.n1, c.n2, c.r1, c.r2)?;
    let h = (c.delta_max - c.delta_min) / (c.points - 1) as f64;
    (0..c.points)
        .map(|i| {
            renyi_finite(&PepsParams::new(alpha, beta, gamma, c.delta_min + h * i as f64)?, &g, 2).map(|r| r.value)
        })
        .collect()
}

fn js(e: Error) -> JsError {
    JsError::new(&e.to_string())
}

#[wasm_bindgen]
pub fn tau0_spectrum(alpha: f64, beta: f64, gamma: f64, delta: f64) -> Result<Vec<f64>, JsError> {
    tau0_spectrum_values(alpha, beta, gamma, delta).map_err(js)
}

#[wasm_bindgen]
pub fn boundary_eigenvalues(alpha: f64, beta: f64, gamma: f64, delta: f64, n1: usize) -> Result<Vec<f64>, JsError> {
    boundary_eigenvalue_values(alpha, beta, gamma, delta, n1).map_err(js)
}

#[wasm_bindgen]
#[allow(clippy::too_many_arguments)]
pub fn s2_curve(
    alpha: f64,
    beta: f64,
    gamma: f64,
    delta_min: f64,
    delta_max: f64,
    points: usize,
    n1: usize,
    n2: usize,
    r1: usize,
    r2: usize,
) -> Result<Vec<f64>, JsError> {
    let c = Curve { n1, n2, r1, r2, delta_min, delta_max, points };
    s2_curve_values(alpha, beta, gamma, c).map_err(js)
}
