//! Z2 site tensors `A[s,t,r,u,l,d]` with every leg of dimension 2.
//!
//! Leg values are stored as bits: 0 is the flux-free state `+`, 1 is `-`.
//! The physical legs `s`, `t` copy the virtual legs `r`, `u` that the site owns.

use crate::error::Result;
use crate::params::PepsParams;

pub const ENTRIES: usize = 64;

/// Flat index of `A[s,t,r,u,l,d]`.
#[inline]
pub fn flat(s: usize, t: usize, r: usize, u: usize, l: usize, d: usize) -> usize {
    (((((s * 2 + t) * 2 + r) * 2 + u) * 2 + l) * 2) + d
}

/// Which amplitude a virtual flux pattern `(r,u,l,d)` carries.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Flux {
    Zero,
    Corner,
    Straight,
    Crossing,
}

/// The eight allowed `(r,u,l,d)` patterns.
pub const FLUX_PATTERNS: [([usize; 4], Flux); 8] = [
    ([0, 0, 0, 0], Flux::Zero),
    ([1, 1, 0, 0], Flux::Corner),
    ([1, 0, 0, 1], Flux::Corner),
    ([0, 0, 1, 1], Flux::Corner),
    ([0, 1, 1, 0], Flux::Corner),
    ([1, 0, 1, 0], Flux::Straight),
    ([0, 1, 0, 1], Flux::Straight),
    ([1, 1, 1, 1], Flux::Crossing),
];

impl Flux {
    pub fn amplitude(self, p: &PepsParams) -> f64 {
        match self {
            Flux::Zero => p.alpha,
            Flux::Corner => p.beta,
            Flux::Straight => p.gamma,
            Flux::Crossing => p.delta,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SiteTensor {
    pub entries: [f64; ENTRIES],
}

impl SiteTensor {
    pub fn zeros() -> Self {
        SiteTensor { entries: [0.0; ENTRIES] }
    }

    pub fn get(&self, s: usize, t: usize, r: usize, u: usize, l: usize, d: usize) -> f64 {
        self.entries[flat(s, t, r, u, l, d)]
    }

    #[allow(clippy::too_many_arguments)]
    pub fn set(&mut self, s: usize, t: usize, r: usize, u: usize, l: usize, d: usize, v: f64) {
        self.entries[flat(s, t, r, u, l, d)] = v;
    }

    /// Virtual amplitude `a(r,u,l,d) = A[r,u,r,u,l,d]`.
    pub fn virtual_amplitude(&self, r: usize, u: usize, l: usize, d: usize) -> f64 {
        self.get(r, u, r, u, l, d)
    }

    /// The same tensor seen on the lattice with its two directions exchanged.
    pub fn transposed(&self) -> SiteTensor {
        let mut out = SiteTensor::zeros();
        for i in 0..ENTRIES {
            let b = |k: usize| (i >> (5 - k)) & 1;
            let (s, t, r, u, l, d) = (b(0), b(1), b(2), b(3), b(4), b(5));
            out.set(t, s, u, r, d, l, self.entries[i]);
        }
        out
    }
}

pub fn build_site_tensor(params: &PepsParams) -> Result<SiteTensor> {
    params.validate()?;
    let mut a = SiteTensor::zeros();
    for ([r, u, l, d], flux) in FLUX_PATTERNS {
        a.set(r, u, r, u, l, d, flux.amplitude(params));
    }
    Ok(a)
}

/// Largest magnitude of any entry that breaks `s=r`, `t=u` or even virtual parity.
pub fn check_gauge_symmetry(a: &SiteTensor) -> f64 {
    let mut worst = 0.0f64;
    for (i, v) in a.entries.iter().enumerate() {
        let b = |k: usize| (i >> (5 - k)) & 1;
        let (s, t, r, u, l, d) = (b(0), b(1), b(2), b(3), b(4), b(5));
        if s != r || t != u || (r ^ u ^ l ^ d) == 1 {
            worst = worst.max(v.abs());
        }
    }
    worst
}
