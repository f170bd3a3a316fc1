//! Exact extended-Hilbert-space computations on small periodic lattices.
//!
//! Sites are `(x1, x2)` with `0 <= x1 < N1`, `0 <= x2 < N2`. Link `(x, i)` has
//! index `2 (x2 N1 + x1) + i` where `i = 0` points right and `i = 1` up. Bit 1 of a
//! configuration means flux `-`.

use nalgebra::{DMatrix, SymmetricEigen};
use rayon::prelude::*;

use crate::entropy::LatticeGeometry;
use crate::error::{Error, Result};
use crate::params::PepsParams;
use crate::tensor::{build_site_tensor, SiteTensor};

/// Enumeration stays at or below this many links (2^24 configurations).
pub const DEFAULT_LINK_CAP: usize = 24;

#[inline]
pub fn link_index(n1: usize, x1: usize, x2: usize, dir: usize) -> usize {
    2 * (x2 * n1 + x1) + dir
}

/// The four links around site `(x1, x2)` in `(r, u, l, d)` order.
pub fn star(n1: usize, n2: usize, x1: usize, x2: usize) -> [usize; 4] {
    [
        link_index(n1, x1, x2, 0),
        link_index(n1, x1, x2, 1),
        link_index(n1, (x1 + n1 - 1) % n1, x2, 0),
        link_index(n1, x1, (x2 + n2 - 1) % n2, 1),
    ]
}

/// Nonzero amplitudes over link configurations, sorted by configuration.
#[derive(Debug, Clone)]
pub struct WaveFunction {
    pub n1: usize,
    pub n2: usize,
    pub amplitudes: Vec<(u64, f64)>,
}

impl WaveFunction {
    pub fn n_links(&self) -> usize {
        2 * self.n1 * self.n2
    }

    /// Hand-built state; zero entries are dropped.
    pub fn from_amplitudes(n1: usize, n2: usize, mut amplitudes: Vec<(u64, f64)>) -> Self {
        amplitudes.retain(|a| a.1 != 0.0);
        amplitudes.sort_by_key(|a| a.0);
        WaveFunction { n1, n2, amplitudes }
    }

    pub fn amplitude(&self, config: u64) -> f64 {
        self.amplitudes.binary_search_by_key(&config, |a| a.0).map_or(0.0, |i| self.amplitudes[i].1)
    }

    pub fn norm_squared(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.1 * a.1).sum()
    }
}

/// Links owned by the sites of the lower-left `r1 x r2` block.
pub fn block_links(n1: usize, r1: usize, r2: usize) -> Vec<usize> {
    let mut links = Vec::with_capacity(2 * r1 * r2);
    for x2 in 0..r2 {
        for x1 in 0..r1 {
            links.push(link_index(n1, x1, x2, 0));
            links.push(link_index(n1, x1, x2, 1));
        }
    }
    links.sort_unstable();
    links
}

pub fn link_partition(geom: &LatticeGeometry) -> Vec<usize> {
    block_links(geom.n1, geom.r1, geom.r2)
}

pub fn enumerate_state(params: &PepsParams, n1: usize, n2: usize) -> Result<WaveFunction> {
    enumerate_tensor_state(&build_site_tensor(params)?, n1, n2, DEFAULT_LINK_CAP)
}

pub fn enumerate_tensor_state(a: &SiteTensor, n1: usize, n2: usize, cap: usize) -> Result<WaveFunction> {
    let n_links = 2 * n1 * n2;
    if n1 == 0 || n2 == 0 || n_links > cap || n_links > 40 {
        return Err(Error::DimensionCap { dim: n_links, cap });
    }
    let mut table = [0.0; 16];
    for (i, t) in table.iter_mut().enumerate() {
        *t = a.virtual_amplitude((i >> 3) & 1, (i >> 2) & 1, (i >> 1) & 1, i & 1);
    }
    let stars: Vec<[u32; 4]> = (0..n2)
        .flat_map(|x2| (0..n1).map(move |x1| (x1, x2)))
        .map(|(x1, x2)| star(n1, n2, x1, x2).map(|l| (n_links - 1 - l) as u32))
        .collect();
    let total = 1u64 << n_links;
    let chunk = 1u64 << 14.min(n_links);
    let amplitudes: Vec<(u64, f64)> = (0..total / chunk)
        .into_par_iter()
        .flat_map_iter(|c| {
            let stars = &stars;
            (c * chunk..(c + 1) * chunk).filter_map(move |config| {
                let mut amp = 1.0;
                for s in stars {
                    let key = s.iter().fold(0usize, |k, &shift| (k << 1) | ((config >> shift) & 1) as usize);
                    amp *= table[key];
                    if amp == 0.0 {
                        return None;
                    }
                }
                Some((config, amp))
            })
        })
        .collect();
    if amplitudes.is_empty() {
        return Err(Error::NullState);
    }
    Ok(WaveFunction { n1, n2, amplitudes })
}

/// Value of link `l` in a configuration (link 0 is the most significant bit).
#[inline]
pub fn link_bit(config: u64, l: usize, n_links: usize) -> usize {
    ((config >> (n_links - 1 - l)) & 1) as usize
}

/// Unnormalized reduced density matrix; `a_links[0]` is the most significant bit
/// of its row and column index.
#[derive(Debug, Clone)]
pub struct DensityMatrix {
    pub matrix: DMatrix<f64>,
    pub a_links: Vec<usize>,
}

impl DensityMatrix {
    pub fn trace(&self) -> f64 {
        self.matrix.trace()
    }
}

pub fn reduced_density(psi: &WaveFunction, a_links: &[usize]) -> Result<DensityMatrix> {
    let n_links = psi.n_links();
    if a_links.is_empty() || a_links.len() > 14 || a_links.iter().any(|&l| l >= n_links) {
        return Err(Error::InvalidGeometry(format!("unusable subsystem of {} links", a_links.len())));
    }
    let in_a: Vec<bool> = (0..n_links).map(|l| a_links.contains(&l)).collect();
    let b_links: Vec<usize> = (0..n_links).filter(|&l| !in_a[l]).collect();
    let mut parts: Vec<(u64, usize, f64)> = psi
        .amplitudes
        .iter()
        .map(|&(c, amp)| {
            let a = a_links.iter().fold(0usize, |k, &l| (k << 1) | link_bit(c, l, n_links));
            let b = b_links.iter().fold(0u64, |k, &l| (k << 1) | link_bit(c, l, n_links) as u64);
            (b, a, amp)
        })
        .collect();
    parts.sort_by_key(|p| (p.0, p.1));
    let dim = 1 << a_links.len();
    let mut rho = DMatrix::zeros(dim, dim);
    for group in parts.chunk_by(|x, y| x.0 == y.0) {
        for &(_, a, pa) in group {
            for &(_, b, pb) in group {
                rho[(a, b)] += pa * pb;
            }
        }
    }
    Ok(DensityMatrix { matrix: rho, a_links: a_links.to_vec() })
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExactEntropies {
    /// `(n, S_n)` for each requested order.
    pub renyi: Vec<(usize, f64)>,
    pub von_neumann: f64,
    /// Normalized spectrum, descending.
    pub probabilities: Vec<f64>,
}

pub fn exact_entropies(rho: &DensityMatrix, orders: &[usize]) -> Result<ExactEntropies> {
    let eig = SymmetricEigen::new(rho.matrix.clone());
    entropies_from_spectrum(eig.eigenvalues.as_slice(), orders)
}

pub fn entropies_from_spectrum(eigenvalues: &[f64], orders: &[usize]) -> Result<ExactEntropies> {
    let total: f64 = eigenvalues.iter().sum();
    if total <= 0.0 {
        return Err(Error::NullState);
    }
    let min = eigenvalues.iter().copied().fold(f64::INFINITY, f64::min);
    if min < -1e-10 * total {
        return Err(Error::NegativeEigenvalue(min / total));
    }
    let mut p: Vec<f64> = eigenvalues.iter().map(|e| e.max(0.0) / total).collect();
    p.sort_by(|a, b| b.partial_cmp(a).unwrap());
    let renyi = orders
        .iter()
        .map(|&n| {
            let s: f64 = p.iter().map(|x| x.powi(n as i32)).sum();
            (n, s.ln() / (1.0 - n as f64))
        })
        .collect();
    let von_neumann = -p.iter().filter(|x| **x > 0.0).map(|x| x * x.ln()).sum::<f64>();
    Ok(ExactEntropies { renyi, von_neumann, probabilities: p })
}

/// `Tr[rho^n] / Tr[rho]^n` by repeated products.
pub fn exact_purity(rho: &DensityMatrix, n: usize) -> f64 {
    let t = rho.trace();
    let r = &rho.matrix / t;
    let mut acc = r.clone();
    for _ in 1..n - 1 {
        acc = &acc * &r;
    }
    acc.component_mul(&r.transpose()).sum()
}

/// Largest `|Theta psi - psi|` over all vertex stars and configurations.
pub fn gauss_check_full(psi: &WaveFunction) -> f64 {
    let n_links = psi.n_links();
    let mut worst = 0.0f64;
    for x2 in 0..psi.n2 {
        for x1 in 0..psi.n1 {
            let s = star(psi.n1, psi.n2, x1, x2);
            for &(c, amp) in &psi.amplitudes {
                if s.iter().map(|&l| link_bit(c, l, n_links)).sum::<usize>() % 2 == 1 {
                    worst = worst.max(2.0 * amp.abs());
                }
            }
        }
    }
    worst
}

/// Where a site sits relative to the subsystem, in terms of which of its star
/// links lie in A.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SiteClass {
    Interior,
    /// Left column of A: all but the left link.
    LeftEdge,
    /// Lower-left corner of A: only its own two links.
    Corner,
    /// Bottom row of A: all but the lower link.
    BottomEdge,
    /// Right of A: only the left link.
    RightNeighbor,
    /// Above A: only the lower link.
    TopNeighbor,
}

/// Star links of `(x1, x2)` that lie in A.
pub fn effective_star(geom: &LatticeGeometry, x1: usize, x2: usize) -> Vec<usize> {
    let a = link_partition(geom);
    star(geom.n1, geom.n2, x1, x2).into_iter().filter(|l| a.contains(l)).collect()
}

pub fn classify_site(geom: &LatticeGeometry, x1: usize, x2: usize) -> Option<SiteClass> {
    let s = star(geom.n1, geom.n2, x1, x2);
    let a = link_partition(geom);
    let inside = s.map(|l| a.contains(&l));
    match inside {
        [true, true, true, true] => Some(SiteClass::Interior),
        [true, true, false, true] => Some(SiteClass::LeftEdge),
        [true, true, false, false] => Some(SiteClass::Corner),
        [true, true, true, false] => Some(SiteClass::BottomEdge),
        [false, false, true, false] => Some(SiteClass::RightNeighbor),
        [false, false, false, true] => Some(SiteClass::TopNeighbor),
        _ => None,
    }
}

/// `max |Theta rho Theta - rho| / max |rho|` for the sigma-z product over `links`.
pub fn star_violation(rho: &DensityMatrix, links: &[usize]) -> f64 {
    let k = rho.a_links.len();
    let mask = links.iter().fold(0usize, |m, l| {
        let pos = rho.a_links.iter().position(|a| a == l).expect("link outside the subsystem");
        m | (1 << (k - 1 - pos))
    });
    let scale = rho.matrix.amax();
    if scale == 0.0 {
        return 0.0;
    }
    let dim = rho.matrix.nrows();
    let mut worst = 0.0f64;
    for a in 0..dim {
        for b in 0..dim {
            if ((a ^ b) & mask).count_ones() % 2 == 1 {
                worst = worst.max(2.0 * rho.matrix[(a, b)].abs());
            }
        }
    }
    worst / scale
}

#[derive(Debug, Clone)]
pub struct ReducedGaussReport {
    /// `(x1, x2, class, violation)` for every site with star links in A.
    pub sites: Vec<(usize, usize, SiteClass, f64)>,
    pub max_violation: f64,
}

pub fn gauss_check_reduced(rho: &DensityMatrix, geom: &LatticeGeometry) -> ReducedGaussReport {
    let mut sites = Vec::new();
    for x2 in 0..geom.n2 {
        for x1 in 0..geom.n1 {
            if let Some(class) = classify_site(geom, x1, x2) {
                let v = star_violation(rho, &effective_star(geom, x1, x2));
                sites.push((x1, x2, class, v));
            }
        }
    }
    let max_violation = sites.iter().map(|s| s.3).fold(0.0, f64::max);
    ReducedGaussReport { sites, max_violation }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(a: f64, b: f64, g: f64, d: f64) -> PepsParams {
        PepsParams::new(a, b, g, d).unwrap()
    }

    #[test]
    fn partition_sizes() {
        assert_eq!(link_partition(&LatticeGeometry::new(3, 3, 1, 1).unwrap()), vec![0, 1]);
        assert_eq!(link_partition(&LatticeGeometry::new(3, 3, 2, 1).unwrap()).len(), 4);
        assert_eq!(block_links(3, 3, 3), (0..18).collect::<Vec<_>>());
    }

    #[test]
    fn product_state_amplitude() {
        let psi = enumerate_state(&p(1.0, 0.0, 0.0, 0.0), 2, 2).unwrap();
        assert_eq!(psi.amplitudes, vec![(0, 1.0)]);
    }

    #[test]
    fn ghz_amplitudes() {
        let psi = enumerate_state(&p(1.0, 0.0, 0.0, 0.95), 2, 2).unwrap();
        assert_eq!(psi.amplitudes.len(), 2);
        assert_eq!(psi.amplitude(0), 1.0);
        assert!((psi.amplitude(0xff) - 0.81450625).abs() < 1e-15);
    }

    #[test]
    fn nonzero_configurations_are_the_allowed_ones() {
        let psi = enumerate_state(&p(1.0, 0.1, 0.0, 0.95), 2, 2).unwrap();
        // straight-through patterns carry gamma = 0 here
        let allowed = |r: usize, u: usize, l: usize, d: usize| {
            (r ^ u ^ l ^ d) == 0 && !matches!((r, u, l, d), (1, 0, 1, 0) | (0, 1, 0, 1))
        };
        let mut count = 0;
        for c in 0u64..256 {
            let ok = (0..2).all(|x2| {
                (0..2).all(|x1| {
                    let s = star(2, 2, x1, x2).map(|l| link_bit(c, l, 8));
                    allowed(s[0], s[1], s[2], s[3])
                })
            });
            assert_eq!(ok, psi.amplitude(c) != 0.0, "config {c:08b}");
            count += usize::from(ok);
        }
        assert_eq!(count, psi.amplitudes.len());
        assert_eq!(gauss_check_full(&psi), 0.0);
    }

    #[test]
    fn ghz_reduced_density() {
        let psi = enumerate_state(&p(1.0, 0.0, 0.0, 0.95), 2, 2).unwrap();
        let rho = reduced_density(&psi, &[0, 1]).unwrap();
        let q = 0.81450625f64 * 0.81450625;
        let mut want = DMatrix::zeros(4, 4);
        want[(0, 0)] = 1.0;
        want[(3, 3)] = q;
        assert!((rho.matrix - want).amax() < 1e-15);
    }

    #[test]
    fn product_reduced_density_is_pure() {
        let psi = enumerate_state(&p(1.0, 0.0, 0.0, 0.0), 2, 2).unwrap();
        let rho = reduced_density(&psi, &[0, 1]).unwrap();
        assert_eq!(exact_purity(&rho, 2), 1.0);
    }

    #[test]
    fn partial_trace_preserves_norm() {
        let psi = enumerate_state(&p(0.7, 1.1, 0.9, 0.4), 3, 2).unwrap();
        let rho = reduced_density(&psi, &[0, 1, 2, 3]).unwrap();
        assert!((rho.trace() - psi.norm_squared()).abs() < 1e-12 * psi.norm_squared());
    }

    #[test]
    fn two_level_entropies() {
        let q = 0.6634204312890625f64;
        let e = entropies_from_spectrum(&[1.0, q, 0.0, 0.0], &[2, 3]).unwrap();
        assert!((e.renyi[0].1 - 0.653020892388894).abs() < 1e-12);
        assert!((e.renyi[1].1 - 0.6352225197220048).abs() < 1e-12);
        assert!((e.von_neumann - 0.672534040296817).abs() < 1e-12);
    }

    #[test]
    fn pure_and_maximally_mixed() {
        let e = entropies_from_spectrum(&[2.0, 0.0], &[2, 3]).unwrap();
        assert_eq!((e.renyi[0].1, e.renyi[1].1, e.von_neumann), (0.0, 0.0, 0.0));
        let e = entropies_from_spectrum(&[0.5; 4], &[2]).unwrap();
        assert!((e.renyi[0].1 - 4f64.ln()).abs() < 1e-15);
        assert!((e.von_neumann - 4f64.ln()).abs() < 1e-15);
    }

    #[test]
    fn negative_spectrum_rejected() {
        assert!(matches!(entropies_from_spectrum(&[1.0, -1e-6], &[2]), Err(Error::NegativeEigenvalue(_))));
    }

    #[test]
    fn odd_amplitude_violates_gauss_law() {
        // one minus on link 0 only: both end vertices see odd parity
        let psi = WaveFunction::from_amplitudes(2, 2, vec![(0, 1.0), (1 << 7, 0.5)]);
        assert_eq!(gauss_check_full(&psi), 1.0);
        let ghz = enumerate_state(&p(1.0, 0.0, 0.0, 0.95), 2, 2).unwrap();
        assert_eq!(gauss_check_full(&ghz), 0.0);
    }

    #[test]
    fn interior_site_of_a_block() {
        let geom = LatticeGeometry::new(3, 3, 2, 2).unwrap();
        assert_eq!(classify_site(&geom, 1, 1), Some(SiteClass::Interior));
        let psi = enumerate_state(&p(0.8, 0.6, 0.5, 1.1), 3, 3).unwrap();
        let rho = reduced_density(&psi, &link_partition(&geom)).unwrap();
        assert!(star_violation(&rho, &effective_star(&geom, 1, 1)) <= 1e-13);
        assert_eq!(classify_site(&geom, 0, 1), Some(SiteClass::LeftEdge));
        assert_eq!(effective_star(&geom, 0, 1).len(), 3);
        assert!(star_violation(&rho, &effective_star(&geom, 0, 1)) <= 1e-13);
    }
}
