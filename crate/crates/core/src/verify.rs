//! The acceptance suite: every criterion as a named check with its tolerance,
//! runtime budget and fixed seeds.

use std::time::Instant;

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::entropy::{
    boundary_row_eigenvalue, contraction_consistency, kappa_fit_values, mps_purity, purity_finite,
    purity_with_boundary_operator, renyi_finite, renyi_thermodynamic, FiniteRows, LatticeGeometry, Mps,
};
use crate::error::Result;
use crate::oracle::{
    classify_site, effective_star, enumerate_state, exact_purity, gauss_check_full, gauss_check_reduced,
    link_partition, reduced_density, star_violation, SiteClass,
};
use crate::params::PepsParams;
use crate::rows::{assemble_row, spectrum, DEFAULT_DIM_CAP};
use crate::tensor::build_site_tensor;
use crate::transfer::{spectral_decompose, tau0_explicit};

/// Hooks used by negative-control runs.
#[derive(Debug, Clone, Default)]
pub struct SuiteOptions {
    pub seed: u64,
    /// Replaces the boundary treatment in the oracle-equivalence check by a plain
    /// tiling with this per-site operator.
    pub boundary_override: Option<DMatrix<f64>>,
    /// Replaces the computed boundary eigenvalues in the R-independence check by
    /// `Gamma exp(-kappa R)`.
    pub planted_kappa: Option<f64>,
}

#[derive(Debug, Clone)]
pub struct CheckOutcome {
    pub id: &'static str,
    pub title: &'static str,
    pub passed: bool,
    pub known_failure: bool,
    pub detail: String,
    pub seconds: f64,
}

type CheckFn = fn(&SuiteOptions) -> Result<(bool, String)>;

pub struct Criterion {
    pub id: &'static str,
    pub title: &'static str,
    pub budget_seconds: Option<f64>,
    /// The check disagrees with exact results for reasons documented in the README.
    pub known_failure: bool,
    run: CheckFn,
}

pub fn criteria() -> Vec<Criterion> {
    let c = |id, title, budget_seconds, known_failure, run| Criterion { id, title, budget_seconds, known_failure, run };
    vec![
        c("C1", "boundary eigenvalue independent of R1, kappa = 0", Some(5.0), false, r_independence as CheckFn),
        c("C2", "area law and closed form on a 4 x 100 cylinder", Some(30.0), false, area_law),
        c("C3", "transfer purities match exact enumeration", Some(120.0), false, oracle_equivalence),
        c("C4", "GHZ purity, analytic value", None, false, ghz),
        c("C5", "Gauss laws, full and reduced", None, false, gauss_laws),
        c("C6", "row-wise and column-wise tilings agree", None, false, tilings),
        c("C7a", "kink of S2 at delta = 1 for gamma = 0", None, false, kink_gamma0),
        c("C7b", "no kink of S2 at delta = 1 for gamma = 1", None, true, smooth_gamma1),
        c("C8", "S2 non-increasing in gamma at beta = 1", None, true, monotone_gamma),
        c("C9", "structural identities over random draws", Some(60.0), false, structural),
        c("C10", "MPS purity, transfer vs state vector", None, false, mps_demo),
    ]
}

pub fn run_criterion(c: &Criterion, opts: &SuiteOptions) -> CheckOutcome {
    let start = Instant::now();
    let result = (c.run)(opts);
    let seconds = start.elapsed().as_secs_f64();
    let (mut passed, mut detail) = match result {
        Ok(r) => r,
        Err(e) => (false, format!("error: {e}")),
    };
    if let Some(b) = c.budget_seconds {
        if seconds > b {
            passed = false;
            detail = format!("{detail}; over the {b} s budget");
        }
    }
    CheckOutcome { id: c.id, title: c.title, passed, known_failure: c.known_failure, detail, seconds }
}

pub fn run_suite(opts: &SuiteOptions, only: Option<&str>) -> Vec<CheckOutcome> {
    criteria()
        .iter()
        .filter(|c| only.is_none_or(|id| c.id.eq_ignore_ascii_case(id)))
        .map(|c| run_criterion(c, opts))
        .collect()
}

fn pt(a: f64, b: f64, g: f64, d: f64) -> PepsParams {
    PepsParams { alpha: a, beta: b, gamma: g, delta: d }
}

const PERTURBATIVE: PepsParams = PepsParams { alpha: 1.0, beta: 0.1, gamma: 0.0, delta: 0.95 };

/// Draws in `[0, 2]^4`.
pub fn random_params(rng: &mut ChaCha8Rng) -> PepsParams {
    loop {
        let v: [f64; 4] = std::array::from_fn(|_| rng.random_range(0.0..2.0));
        if let Ok(p) = PepsParams::new(v[0], v[1], v[2], v[3]) {
            return p;
        }
    }
}

fn r_independence(o: &SuiteOptions) -> Result<(bool, String)> {
    let rs = [1usize, 2, 3];
    let vals: Vec<f64> = match o.planted_kappa {
        Some(k) => rs.iter().map(|&r| (-k * r as f64).exp()).collect(),
        None => rs.iter().map(|&r| boundary_row_eigenvalue(&PERTURBATIVE, 2, 4, r)).collect::<Result<_>>()?,
    };
    let hi = vals.iter().copied().fold(f64::MIN, f64::max);
    let lo = vals.iter().copied().fold(f64::MAX, f64::min);
    let spread = (hi - lo) / hi;
    let pts: Vec<(f64, f64)> = rs.iter().map(|&r| r as f64).zip(vals.iter().copied()).collect();
    let fit = kappa_fit_values(&pts);
    Ok((
        spread <= 1e-10 && fit.kappa.abs() <= 1e-8,
        format!(
            "rho1' = {:.16}, relative spread {spread:.2e} (tol 1e-10), kappa {:.2e} (tol 1e-8)",
            vals[0], fit.kappa
        ),
    ))
}

fn affine_deviation(xs: &[f64], ys: &[f64]) -> f64 {
    let m = xs.len() as f64;
    let xm = xs.iter().sum::<f64>() / m;
    let ym = ys.iter().sum::<f64>() / m;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - xm) * (y - ym)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - xm).powi(2)).sum();
    let b = sxy / sxx;
    xs.iter().zip(ys).map(|(x, y)| (y - ym - b * (x - xm)).abs()).fold(0.0, f64::max)
}

fn area_law(_: &SuiteOptions) -> Result<(bool, String)> {
    let a = build_site_tensor(&PERTURBATIVE)?;
    let (mut worst_affine, mut worst_diff) = (0.0f64, 0.0f64);
    for r1 in 1..=3 {
        let rows = FiniteRows::build(&a, 4, r1, 2, DEFAULT_DIM_CAP)?;
        let purities = rows.purity_sweep(100, 5, 50, 2)?;
        let xs: Vec<f64> = (5..=50).map(|r| r as f64).collect();
        let s: Vec<f64> = purities.iter().map(|p| -p.ln()).collect();
        worst_affine = worst_affine.max(affine_deviation(&xs, &s));
        for (r2, s_fin) in (5..=50).zip(&s) {
            let th = renyi_thermodynamic(&PERTURBATIVE, r1, r2, 4, 2)?.value;
            worst_diff = worst_diff.max((th - s_fin).abs());
        }
    }
    Ok((
        worst_affine <= 1e-6 && worst_diff <= 1e-6,
        format!("max affine deviation {worst_affine:.2e}, max |finite - closed form| {worst_diff:.2e} (tol 1e-6)"),
    ))
}

fn oracle_equivalence(o: &SuiteOptions) -> Result<(bool, String)> {
    let mut rng = ChaCha8Rng::seed_from_u64(o.seed ^ 0x0c3);
    let mut draws = vec![PERTURBATIVE];
    draws.extend((0..10).map(|_| random_params(&mut rng)));
    let mut worst = 0.0f64;
    let mut cases = 0;
    for (n1, n2) in [(2, 2), (3, 2), (3, 3)] {
        for (r1, r2) in [(1, 1), (1, 2), (2, 1), (2, 2)] {
            let Ok(g) = LatticeGeometry::new(n1, n2, r1, r2) else { continue };
            let links = link_partition(&g);
            for p in &draws {
                let psi = enumerate_state(p, n1, n2)?;
                let rho = reduced_density(&psi, &links)?;
                for n in [2, 3] {
                    let exact = exact_purity(&rho, n);
                    let tiled = match &o.boundary_override {
                        Some(x) => purity_with_boundary_operator(p, &g, n, x)?,
                        None => purity_finite(p, &g, n)?,
                    };
                    worst = worst.max((tiled - exact).abs() / exact);
                    cases += 1;
                }
            }
        }
    }
    Ok((worst <= 1e-10, format!("{cases} cases, max relative deviation {worst:.2e} (tol 1e-10)")))
}

fn ghz(_: &SuiteOptions) -> Result<(bool, String)> {
    let p = pt(1.0, 0.0, 0.0, 0.95);
    let g = LatticeGeometry::new(2, 2, 1, 1)?;
    let q = 0.9025f64.powi(4);
    let want = (1.0 + q * q) / (1.0 + q).powi(2);
    let tiled = purity_finite(&p, &g, 2)?;
    let psi = enumerate_state(&p, 2, 2)?;
    let exact = exact_purity(&reduced_density(&psi, &link_partition(&g))?, 2);
    let dev = (tiled - want).abs().max((exact - want).abs());
    Ok((dev <= 1e-12, format!("analytic {want:.16}, transfer {tiled:.16}, oracle {exact:.16}")))
}

fn gauss_laws(o: &SuiteOptions) -> Result<(bool, String)> {
    let mut rng = ChaCha8Rng::seed_from_u64(o.seed ^ 0x9a5);
    let mut full = 0.0f64;
    for (n1, n2) in [(2, 2), (3, 2), (3, 3)] {
        for _ in 0..3 {
            full = full.max(gauss_check_full(&enumerate_state(&random_params(&mut rng), n1, n2)?));
        }
    }
    let g = LatticeGeometry::new(4, 3, 2, 2)?;
    let p = random_params(&mut rng);
    let psi = enumerate_state(&p, 4, 3)?;
    let rho = reduced_density(&psi, &link_partition(&g))?;
    let report = gauss_check_reduced(&rho, &g);
    let classes = [
        SiteClass::Interior,
        SiteClass::LeftEdge,
        SiteClass::Corner,
        SiteClass::BottomEdge,
        SiteClass::RightNeighbor,
        SiteClass::TopNeighbor,
    ];
    let covered = classes.iter().all(|c| report.sites.iter().any(|s| s.2 == *c));
    // left-edge star plus an A link that is not part of it
    let (x1, x2) = (0, 1);
    debug_assert_eq!(classify_site(&g, x1, x2), Some(SiteClass::LeftEdge));
    let mut wrong = effective_star(&g, x1, x2);
    let stray = link_partition(&g).into_iter().find(|l| !wrong.contains(l)).unwrap();
    wrong.push(stray);
    let control = star_violation(&rho, &wrong);
    Ok((
        full == 0.0 && report.max_violation <= 1e-12 && covered && control >= 1e-3,
        format!(
            "full {full:e}, reduced max {:.1e} over {} sites (all classes: {covered}), negative control {control:.3}",
            report.max_violation,
            report.sites.len()
        ),
    ))
}

fn tilings(o: &SuiteOptions) -> Result<(bool, String)> {
    let mut rng = ChaCha8Rng::seed_from_u64(o.seed ^ 0x7e1);
    let mut worst = 0.0f64;
    for i in 0..20 {
        let p = random_params(&mut rng);
        let g = LatticeGeometry::new(3, 3, 1 + i % 2, 1 + (i / 2) % 2)?;
        worst = worst.max(contraction_consistency(&p, &g, 2)?);
    }
    Ok((worst <= 1e-10, format!("20 draws on 3 x 3, max relative difference {worst:.2e} (tol 1e-10)")))
}

pub const FIG_GEOMETRY: (usize, usize, usize, usize) = (4, 100, 2, 20);

/// `S2` along a delta grid with the remaining amplitudes fixed.
pub fn s2_on_grid(alpha: f64, beta: f64, gamma: f64, deltas: &[f64]) -> Result<Vec<f64>> {
    let (n1, n2, r1, r2) = FIG_GEOMETRY;
    let g = LatticeGeometry::new(n1, n2, r1, r2)?;
    deltas.iter().map(|&d| Ok(renyi_finite(&pt(alpha, beta, gamma, d), &g, 2)?.value)).collect()
}

/// `S(x-h) - 2 S(x) + S(x+h)` at interior points; endpoints get `None`.
pub fn second_differences(s: &[f64]) -> Vec<Option<f64>> {
    (0..s.len()).map(|i| (i > 0 && i + 1 < s.len()).then(|| s[i - 1] - 2.0 * s[i] + s[i + 1])).collect()
}

pub fn fig6_deltas() -> Vec<f64> {
    (0..=80).map(|i| 0.8 + 0.005 * i as f64).collect()
}

/// `(|d2| at delta = 1, median |d2| elsewhere, max |d2| / median)`.
pub fn kink_statistics(deltas: &[f64], s: &[f64]) -> (f64, f64, f64) {
    let d2 = second_differences(s);
    let at = deltas.iter().position(|d| (d - 1.0).abs() < 1e-9).expect("grid contains delta = 1");
    let mut off: Vec<f64> = d2.iter().enumerate().filter_map(|(i, v)| v.filter(|_| i != at).map(f64::abs)).collect();
    off.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let median =
        if off.len() % 2 == 1 { off[off.len() / 2] } else { 0.5 * (off[off.len() / 2 - 1] + off[off.len() / 2]) };
    let max = d2.iter().flatten().map(|v| v.abs()).fold(0.0, f64::max);
    (d2[at].unwrap().abs(), median, max / median)
}

fn kink_gamma0(_: &SuiteOptions) -> Result<(bool, String)> {
    let deltas = fig6_deltas();
    let (at, median, _) = kink_statistics(&deltas, &s2_on_grid(1.0, 0.1, 0.0, &deltas)?);
    let ratio = at / median;
    Ok((ratio >= 10.0, format!("|d2(1)| / median = {ratio:.3e} (need >= 10)")))
}

fn smooth_gamma1(_: &SuiteOptions) -> Result<(bool, String)> {
    let deltas = fig6_deltas();
    let (_, _, worst) = kink_statistics(&deltas, &s2_on_grid(1.0, 0.1, 1.0, &deltas)?);
    Ok((worst < 3.0, format!("max |d2| / median = {worst:.3} (need < 3)")))
}

pub fn fig7_gammas() -> Vec<f64> {
    (0..=20).map(|i| 0.1 * i as f64).collect()
}

pub fn fig7_deltas() -> Vec<f64> {
    (1..=10).map(|i| 0.2 * i as f64).collect()
}

fn monotone_gamma(_: &SuiteOptions) -> Result<(bool, String)> {
    let (n1, n2, r1, r2) = FIG_GEOMETRY;
    let g = LatticeGeometry::new(n1, n2, r1, r2)?;
    let gammas = fig7_gammas();
    let mut worst = (0.0f64, 0.0, 0.0);
    for &d in &fig7_deltas() {
        let s: Vec<f64> =
            gammas.iter().map(|&gm| Ok(renyi_finite(&pt(1.0, 1.0, gm, d), &g, 2)?.value)).collect::<Result<_>>()?;
        for (i, w) in s.windows(2).enumerate() {
            if w[1] - w[0] > worst.0 {
                worst = (w[1] - w[0], d, gammas[i]);
            }
        }
    }
    Ok((
        worst.0 <= 1e-8,
        format!("largest increase {:.3e} at delta = {:.1}, gamma = {:.1} (slack 1e-8)", worst.0, worst.1, worst.2),
    ))
}

fn structural(o: &SuiteOptions) -> Result<(bool, String)> {
    let mut rng = ChaCha8Rng::seed_from_u64(o.seed ^ 0x511);
    let mut recon = 0.0f64;
    let mut lam = 0.0f64;
    let mut power = 0.0f64;
    let mut order_ok = true;
    let mut min_s = f64::INFINITY;
    let g = LatticeGeometry::new(3, 3, 1, 2)?;
    for _ in 0..100 {
        let p = random_params(&mut rng);
        let tau = tau0_explicit(&p)?;
        let sf = spectral_decompose(&tau)?;
        recon = recon.max((sf.reconstruct() - tau.matrix).amax());
        lam = lam.max(sf.lambda[3].abs()).max((sf.lambda[2] - 2.0 * p.beta * p.beta).abs());
        let r1 = spectrum(&assemble_row(&sf, 1, 3, None, DEFAULT_DIM_CAP)?, 1e-9)?.rho1;
        let r2 = spectrum(&assemble_row(&sf, 2, 3, None, DEFAULT_DIM_CAP)?, 1e-9)?.rho1;
        power = power.max((r2 - r1 * r1).abs() / r2);
        let rp = spectrum(&assemble_row(&sf, 2, 3, Some(1), DEFAULT_DIM_CAP)?, 1e-9)?.rho1;
        order_ok &= rp <= r2 * (1.0 + 1e-12);
        for n in [2, 3] {
            min_s = min_s.min(renyi_finite(&p, &g, n)?.value);
        }
    }
    Ok((
        recon <= 1e-12 && lam <= 1e-15 && power <= 1e-12 && order_ok && min_s >= -1e-10,
        format!(
            "reconstruction {recon:.1e}, lambda3/4 {lam:.1e}, rho(2) vs rho(1)^2 {power:.1e}, rho' <= rho {order_ok}, min S {min_s:.2e}"
        ),
    ))
}

fn mps_demo(o: &SuiteOptions) -> Result<(bool, String)> {
    let mut worst = 0.0f64;
    for i in 0..20u64 {
        let chi = 1 + (i as usize) % 4;
        let n = 4 + (i as usize) % 7;
        let len = 1 + (i as usize) % (n - 1);
        let start = (i as usize * 3) % (n - len + 1);
        let r = mps_purity(&Mps::random(chi, o.seed.wrapping_add(i)), n, start, len)?;
        worst = worst.max((r.p2_transfer - r.p2_direct).abs());
    }
    Ok((worst <= 1e-12, format!("20 chains, max |transfer - direct| {worst:.2e} (tol 1e-12)")))
}
