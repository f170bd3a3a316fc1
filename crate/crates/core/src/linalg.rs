//! Log-scaled matrix powers and eigenvalue routines for row operators.

use nalgebra::{Complex, DMatrix, Schur, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

/// A real number kept as `sign * exp(log_abs)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogScalar {
    pub sign: f64,
    pub log_abs: f64,
}

impl LogScalar {
    pub fn from_value(x: f64) -> Self {
        if x == 0.0 {
            LogScalar { sign: 0.0, log_abs: f64::NEG_INFINITY }
        } else {
            LogScalar { sign: x.signum(), log_abs: x.abs().ln() }
        }
    }

    pub fn value(&self) -> f64 {
        self.sign * self.log_abs.exp()
    }
}

/// Matrix stored as `mantissa * exp(log_scale)` with `max|mantissa| = 1`.
#[derive(Debug, Clone)]
pub struct ScaledMatrix {
    pub mantissa: DMatrix<f64>,
    pub log_scale: f64,
}

impl ScaledMatrix {
    pub fn new(m: DMatrix<f64>) -> Self {
        ScaledMatrix { mantissa: m, log_scale: 0.0 }.normalized()
    }

    pub fn identity(dim: usize) -> Self {
        ScaledMatrix { mantissa: DMatrix::identity(dim, dim), log_scale: 0.0 }
    }

    fn normalized(mut self) -> Self {
        let m = self.mantissa.amax();
        if m > 0.0 && m.is_finite() {
            self.mantissa /= m;
            self.log_scale += m.ln();
        }
        self
    }

    pub fn mul(&self, other: &ScaledMatrix) -> ScaledMatrix {
        ScaledMatrix { mantissa: &self.mantissa * &other.mantissa, log_scale: self.log_scale + other.log_scale }
            .normalized()
    }

    /// Exponentiation by squaring; renormalizes after every product.
    pub fn pow(&self, mut k: u64) -> ScaledMatrix {
        let mut result = ScaledMatrix::identity(self.mantissa.nrows());
        let mut base = self.clone();
        while k > 0 {
            if k & 1 == 1 {
                result = result.mul(&base);
            }
            k >>= 1;
            if k > 0 {
                base = base.mul(&base);
            }
        }
        result
    }

    pub fn trace(&self) -> LogScalar {
        let t = self.mantissa.trace();
        let mut s = LogScalar::from_value(t);
        s.log_abs += self.log_scale;
        s
    }

    /// `Tr[self * other]` without forming the product.
    pub fn trace_product(&self, other: &ScaledMatrix) -> LogScalar {
        let t = self.mantissa.component_mul(&other.mantissa.transpose()).sum();
        let mut s = LogScalar::from_value(t);
        s.log_abs += self.log_scale + other.log_scale;
        s
    }
}

/// Kronecker product of a list of square matrices, first factor outermost.
pub fn kron_all(factors: &[DMatrix<f64>]) -> DMatrix<f64> {
    factors.iter().fold(DMatrix::from_element(1, 1, 1.0), |acc, f| acc.kronecker(f))
}

pub type C64 = Complex<f64>;

/// Sort by descending magnitude, ties by descending real part.
pub fn sort_by_magnitude(v: &mut [C64]) {
    v.sort_by(|a, b| {
        b.norm()
            .partial_cmp(&a.norm())
            .unwrap_or(std::cmp::Ordering::Equal)
            .then(b.re.partial_cmp(&a.re).unwrap_or(std::cmp::Ordering::Equal))
    });
}

pub fn is_symmetric(m: &DMatrix<f64>) -> bool {
    let scale = m.amax();
    m.is_square() && (0..m.nrows()).all(|i| (0..i).all(|j| (m[(i, j)] - m[(j, i)]).abs() <= 1e-14 * scale))
}

/// All eigenvalues of a real matrix: symmetric eigensolver when the matrix is
/// symmetric, otherwise a real Schur form with a bounded sweep count.
pub fn dense_eigenvalues(m: &DMatrix<f64>) -> Result<Vec<C64>> {
    let mut ev: Vec<C64> = if is_symmetric(m) {
        SymmetricEigen::new(m.clone()).eigenvalues.iter().map(|&x| C64::new(x, 0.0)).collect()
    } else {
        let schur = Schur::try_new(m.clone(), f64::EPSILON, 50 * m.nrows().max(10))
            .ok_or(Error::NonConvergence { residual: f64::NAN })?;
        schur.complex_eigenvalues().iter().copied().collect()
    };
    sort_by_magnitude(&mut ev);
    Ok(ev)
}

#[derive(Debug, Clone, Copy)]
pub struct IterativeOptions {
    pub count: usize,
    pub rel_tol: f64,
    pub max_iter: usize,
    pub seed: u64,
}

impl Default for IterativeOptions {
    fn default() -> Self {
        IterativeOptions { count: 8, rel_tol: 1e-13, max_iter: 20_000, seed: 7 }
    }
}

fn orthonormalize(q: &mut DMatrix<f64>) {
    // modified Gram-Schmidt, column by column
    for j in 0..q.ncols() {
        for i in 0..j {
            let proj = q.column(i).dot(&q.column(j));
            let ci = q.column(i).clone_owned();
            q.column_mut(j).axpy(-proj, &ci, 1.0);
        }
        let n = q.column(j).norm();
        if n > 0.0 {
            q.column_mut(j).scale_mut(1.0 / n);
        }
    }
}

/// Leading eigenvalues by block power iteration with Gram-Schmidt deflation.
///
/// The block carries a few guard vectors beyond `count`; eigenvalues are read
/// from the projected matrix `Q^T A Q` and accepted once they stop moving.
pub fn leading_eigenvalues(m: &DMatrix<f64>, opts: IterativeOptions) -> Result<Vec<C64>> {
    let n = m.nrows();
    let k = (opts.count + 4).min(n);
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut q = DMatrix::from_fn(n, k, |_, _| rng.random_range(-1.0..1.0));
    orthonormalize(&mut q);
    let mut prev: Option<Vec<C64>> = None;
    let mut residual = f64::INFINITY;
    let want = opts.count.min(n);
    for _ in 0..opts.max_iter {
        let z = m * &q;
        let h = q.transpose() * &z;
        q = z;
        orthonormalize(&mut q);
        let mut ev = dense_eigenvalues(&h)?;
        ev.truncate(want);
        if let Some(p) = &prev {
            let scale = ev[0].norm().max(f64::MIN_POSITIVE);
            residual = ev.iter().zip(p).map(|(a, b)| (a - b).norm() / scale).fold(0.0, f64::max);
            if residual < opts.rel_tol {
                return Ok(ev);
            }
        }
        prev = Some(ev);
    }
    Err(Error::NonConvergence { residual })
}
