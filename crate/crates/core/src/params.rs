use crate::error::{Error, Result};

/// The four Z2 flux amplitudes: zero flux, corner flux, straight line, crossing.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PepsParams {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    pub delta: f64,
}

impl PepsParams {
    pub fn new(alpha: f64, beta: f64, gamma: f64, delta: f64) -> Result<Self> {
        let p = PepsParams { alpha, beta, gamma, delta };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        let v = self.as_array();
        if v.iter().any(|x| !x.is_finite() || *x < 0.0) {
            return Err(Error::InvalidParams(format!("amplitudes must be finite and nonnegative, got {v:?}")));
        }
        if v.iter().all(|x| *x == 0.0) {
            return Err(Error::InvalidParams("all amplitudes vanish".into()));
        }
        Ok(())
    }

    pub fn as_array(&self) -> [f64; 4] {
        [self.alpha, self.beta, self.gamma, self.delta]
    }

    /// Squared amplitudes in (alpha, beta, gamma, delta) order.
    pub fn squares(&self) -> [f64; 4] {
        self.as_array().map(|x| x * x)
    }
}
