//! n-copy site blocks.
//!
//! Tr rho_A^n stacks 2n layers; layer `2k` is the ket and layer `2k+1` the bra of
//! copy `k`. A link outside A ties each ket to its own bra, a link inside A ties
//! the ket of copy `k` to the bra of copy `k-1`. Under either pairing a leg of a
//! block carries one flux bit per pair, so every leg has dimension `2^n`; copy 0
//! is the most significant bit.

use crate::transfer::FullTransfer;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Pairing {
    Outside,
    Inside,
}

impl Pairing {
    /// The pair (indexed by copy) holding `layer`.
    #[inline]
    pub fn copy_of(self, layer: usize, n: usize) -> usize {
        match self {
            Pairing::Outside => layer / 2,
            Pairing::Inside if layer % 2 == 0 => layer / 2,
            Pairing::Inside => layer.div_ceil(2) % n,
        }
    }

    /// `(ket, bra)` layers joined by pair `k`.
    #[inline]
    pub fn layers(self, k: usize, n: usize) -> (usize, usize) {
        match self {
            Pairing::Outside => (2 * k, 2 * k + 1),
            Pairing::Inside => (2 * k, (2 * k + 2 * n - 1) % (2 * n)),
        }
    }
}

#[inline]
pub fn copy_bit(state: usize, k: usize, n: usize) -> usize {
    (state >> (n - 1 - k)) & 1
}

/// Flux seen on `layer` by a leg in `state` labeled with `pairing`.
#[inline]
pub fn layer_value(state: usize, pairing: Pairing, layer: usize, n: usize) -> usize {
    copy_bit(state, pairing.copy_of(layer, n), n)
}

/// Pairings of a site's own links (right, up) and of the links it reads from
/// its left and lower neighbors.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct SiteLabels {
    pub own: Pairing,
    pub left: Pairing,
    pub down: Pairing,
}

impl SiteLabels {
    pub fn uniform(p: Pairing) -> Self {
        SiteLabels { own: p, left: p, down: p }
    }
}

/// Sparse 4-leg block `S[l,r,d,u]`, grouped by the left leg.
#[derive(Debug, Clone)]
pub struct SiteBlock {
    pub dim: usize,
    pub by_left: Vec<Vec<(usize, usize, usize, f64)>>,
}

impl SiteBlock {
    pub fn from_fn(dim: usize, f: impl Fn(usize, usize, usize, usize) -> f64) -> Self {
        let mut by_left = vec![Vec::new(); dim];
        for (l, bucket) in by_left.iter_mut().enumerate() {
            for r in 0..dim {
                for d in 0..dim {
                    for u in 0..dim {
                        let v = f(l, r, d, u);
                        if v != 0.0 {
                            bucket.push((r, d, u, v));
                        }
                    }
                }
            }
        }
        SiteBlock { dim, by_left }
    }

    pub fn get(&self, l: usize, r: usize, d: usize, u: usize) -> f64 {
        self.by_left[l].iter().find(|e| e.0 == r && e.1 == d && e.2 == u).map_or(0.0, |e| e.3)
    }

    /// `n`-fold tensor power of a per-copy block `t[l,r,d,u]` (legs of dimension 2).
    pub fn tensor_power(n: usize, t: impl Fn(usize, usize, usize, usize) -> f64) -> Self {
        SiteBlock::from_fn(1 << n, |l, r, d, u| {
            (0..n).map(|k| t(copy_bit(l, k, n), copy_bit(r, k, n), copy_bit(d, k, n), copy_bit(u, k, n))).product()
        })
    }

    /// Block built from the full double-layer tensor with per-leg pairings.
    pub fn labeled(t1: &FullTransfer, n: usize, labels: SiteLabels) -> Self {
        SiteBlock::from_fn(1 << n, |l, r, d, u| {
            let mut w = 1.0;
            for k in 0..n {
                let (ket, bra) = labels.own.layers(k, n);
                let leg = |state: usize, p: Pairing| [layer_value(state, p, ket, n), layer_value(state, p, bra, n)];
                w *= t1.get(leg(l, labels.left), leg(r, labels.own), leg(d, labels.down), leg(u, labels.own));
                if w == 0.0 {
                    break;
                }
            }
            w
        })
    }
}
