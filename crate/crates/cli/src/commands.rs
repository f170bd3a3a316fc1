use rayon::prelude::*;
use serde_json::json;

use lgt_renyi::entropy::mps_purity_demo;
use lgt_renyi::entropy::{
    contraction_consistency, purity_finite, renyi_finite, renyi_thermodynamic, FiniteRows, LatticeGeometry,
};
use lgt_renyi::oracle::{enumerate_state, exact_purity, link_partition, reduced_density};
use lgt_renyi::rows::{self, assemble_row, DEFAULT_DIM_CAP};
use lgt_renyi::tensor::build_site_tensor;
use lgt_renyi::transfer::{spectral_decompose, tau0_explicit};
use lgt_renyi::verify::{kink_statistics, run_suite, SuiteOptions};
use lgt_renyi::PepsParams;

use crate::output::{float, Cell, Table};
use crate::settings::{Config, Grid, IntRange};
use crate::{CliError, Common};

const PERTURBATIVE: [f64; 4] = [1.0, 0.1, 0.0, 0.95];
const DEFAULT_SEED: u64 = 20240917;
const DEGENERACY_TOL: f64 = 1e-9;
/// Length, width and subsystem used by the figure sweeps and `entropy`.
const WIDE: (usize, usize, usize, usize) = (4, 100, 2, 20);
/// Small enough for exact enumeration.
const SMALL: (usize, usize, usize, usize) = (3, 3, 2, 2);

pub struct Ctx {
    pub common: Common,
    pub cfg: Config,
}

impl Ctx {
    pub fn new(common: Common) -> Result<Self, CliError> {
        let cfg = match &common.config {
            Some(p) => Config::load(p)?,
            None => Config::default(),
        };
        let ctx = Ctx { common, cfg };
        if let Some(t) = ctx.cfg.pick_opt(ctx.common.threads, "threads")? {
            if t == 0 {
                return Err(CliError::Input("--threads must be positive".into()));
            }
            // a second initialisation only happens in-process (tests); keep the first pool
            let _ = rayon::ThreadPoolBuilder::new().num_threads(t).build_global();
        }
        Ok(ctx)
    }

    fn params(&self, d: [f64; 4]) -> Result<PepsParams, CliError> {
        let c = &self.common;
        let p = PepsParams::new(
            self.cfg.pick(c.alpha, "alpha", d[0])?,
            self.cfg.pick(c.beta, "beta", d[1])?,
            self.cfg.pick(c.gamma, "gamma", d[2])?,
            self.cfg.pick(c.delta, "delta", d[3])?,
        )?;
        Ok(p)
    }

    fn order(&self, default: usize) -> Result<usize, CliError> {
        let n = self.cfg.pick(self.common.n, "n", default)?;
        if n < 2 {
            return Err(CliError::Input(format!("Renyi order must be >= 2, got {n}")));
        }
        Ok(n)
    }

    fn geometry(&self, d: (usize, usize, usize, usize)) -> Result<LatticeGeometry, CliError> {
        let c = &self.common;
        Ok(LatticeGeometry::new(
            self.cfg.pick(c.n1, "N1", d.0)?,
            self.cfg.pick(c.n2, "N2", d.1)?,
            self.cfg.pick(c.r1, "R1", d.2)?,
            self.cfg.pick(c.r2, "R2", d.3)?,
        )?)
    }

    fn seed(&self) -> Result<u64, CliError> {
        self.cfg.pick(self.common.seed, "seed", DEFAULT_SEED)
    }

    fn emit(&self, table: &Table) -> Result<(), CliError> {
        let out = self.cfg.pick_opt(self.common.out.clone(), "out")?;
        table.emit(out.as_ref())
    }

    /// Figure sweeps are second-order only.
    fn require_order_two(&self) -> Result<(), CliError> {
        match self.order(2)? {
            2 => Ok(()),
            n => Err(CliError::Input(format!("this sweep computes S2; --n {n} is not supported"))),
        }
    }

    fn meta_params(&self, t: &mut Table, p: &PepsParams) {
        t.meta(format!(
            "alpha={} beta={} gamma={} delta={}",
            float(p.alpha),
            float(p.beta),
            float(p.gamma),
            float(p.delta)
        ));
    }
}

fn meta_geometry(t: &mut Table, g: &LatticeGeometry) {
    t.meta(format!("N1={} N2={} R1={} R2={}", g.n1, g.n2, g.r1, g.r2));
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum MethodChoice {
    Finite,
    Thermodynamic,
    Both,
}

fn method(ctx: &Ctx, default: MethodChoice) -> Result<MethodChoice, CliError> {
    let m: Option<String> = ctx.cfg.pick_opt(ctx.common.method.clone(), "method")?;
    match m.as_deref() {
        None => Ok(default),
        Some("finite") => Ok(MethodChoice::Finite),
        Some("thermodynamic") | Some("thermo") => Ok(MethodChoice::Thermodynamic),
        Some("both") => Ok(MethodChoice::Both),
        Some(other) => Err(CliError::Input(format!("unknown method '{other}' (finite, thermodynamic, both)"))),
    }
}

pub fn spectrum(ctx: &Ctx) -> Result<(), CliError> {
    let p = ctx.params(PERTURBATIVE)?;
    let n = ctx.order(2)?;
    let n1: usize = ctx.cfg.pick(ctx.common.n1, "N1", 4)?;
    if n1 < 2 {
        return Err(CliError::Input(format!("N1 must be >= 2, got {n1}")));
    }
    let sf = spectral_decompose(&tau0_explicit(&p)?)?;
    let single = rows::spectrum(&assemble_row(&sf, 1, n1, None, DEFAULT_DIM_CAP)?, DEGENERACY_TOL)?;
    let bulk = rows::spectrum(&assemble_row(&sf, n, n1, None, DEFAULT_DIM_CAP)?, DEGENERACY_TOL)?;
    let inside = (1..n1)
        .into_par_iter()
        .map(|r| rows::spectrum(&assemble_row(&sf, n, n1, Some(r), DEFAULT_DIM_CAP)?, DEGENERACY_TOL))
        .collect::<Result<Vec<_>, _>>()?;

    let mut t = Table::new("spectrum", &["R", "rho1", "rho1_prime", "K", "Kprime", "gap"]);
    ctx.meta_params(&mut t, &p);
    t.meta(format!("n={n} N1={n1}"));
    t.meta(format!("rho1_single={} bulk_gap={}", float(single.rho1), float(bulk.gap_ratio)));
    for (i, s) in inside.iter().enumerate() {
        t.row(vec![
            (i + 1).into(),
            bulk.rho1.into(),
            s.rho1.into(),
            bulk.degeneracy.into(),
            s.degeneracy.into(),
            s.gap_ratio.into(),
        ]);
    }
    ctx.emit(&t)
}

fn affine_deviation(xs: &[f64], ys: &[f64]) -> f64 {
    let m = xs.len() as f64;
    if xs.len() < 3 {
        return 0.0;
    }
    let xm = xs.iter().sum::<f64>() / m;
    let ym = ys.iter().sum::<f64>() / m;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - xm) * (y - ym)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - xm).powi(2)).sum();
    let b = sxy / sxx;
    xs.iter().zip(ys).map(|(x, y)| (y - ym - b * (x - xm)).abs()).fold(0.0, f64::max)
}

/// Finite-lattice S2 over the R2 range, and the closed form's `(K term, slope)`.
type Fig5Series = (Option<Vec<f64>>, Option<(f64, f64)>);

pub fn fig5(ctx: &Ctx, r2_range: Option<IntRange>) -> Result<(), CliError> {
    ctx.require_order_two()?;
    let p = ctx.params(PERTURBATIVE)?;
    let n1: usize = ctx.cfg.pick(ctx.common.n1, "N1", 4)?;
    let n2: usize = ctx.cfg.pick(ctx.common.n2, "N2", 100)?;
    let r1s: Vec<usize> = match ctx.cfg.pick_opt(ctx.common.r1, "R1")? {
        Some(r) => vec![r],
        None => (1..n1.min(4)).collect(),
    };
    let range = ctx.cfg.pick(r2_range, "r2-range", IntRange { lo: 5, hi: 50 })?;
    let m = method(ctx, MethodChoice::Both)?;
    // validates every R1 and both ends of the R2 range
    for &r1 in &r1s {
        LatticeGeometry::new(n1, n2, r1, range.lo)?;
        LatticeGeometry::new(n1, n2, r1, range.hi)?;
    }
    let a = build_site_tensor(&p)?;
    let per_r1 = r1s
        .par_iter()
        .map(|&r1| -> Result<Fig5Series, CliError> {
            let finite = match m {
                MethodChoice::Thermodynamic => None,
                _ => {
                    let rows = FiniteRows::build(&a, n1, r1, 2, DEFAULT_DIM_CAP)?;
                    Some(rows.purity_sweep(n2, range.lo, range.hi, 2)?.iter().map(|q| -q.ln()).collect())
                }
            };
            let thermo = match m {
                MethodChoice::Finite => None,
                _ => {
                    let th = renyi_thermodynamic(&p, r1, range.lo, n1, 2)?.thermo.expect("closed form has components");
                    Some((th.log_k_term, th.perimeter_coefficient))
                }
            };
            Ok((finite, thermo))
        })
        .collect::<Result<Vec<_>, _>>()?;

    let mut t = Table::new("fig5", &["R1", "R2", "S2_finite", "S2_thermo", "abs_diff"]);
    ctx.meta_params(&mut t, &p);
    t.meta(format!("n=2 N1={n1} N2={n2} R2={}:{} method={m:?}", range.lo, range.hi));
    let blank = || Cell::S(String::new());
    for (&r1, (finite, thermo)) in r1s.iter().zip(&per_r1) {
        let mut worst = 0.0f64;
        for (i, r2) in (range.lo..=range.hi).enumerate() {
            let f = finite.as_ref().map(|v| v[i]);
            let th = thermo.map(|(k, c)| k + (r1 + r2) as f64 * c);
            let diff = f.zip(th).map(|(a, b)| (a - b).abs());
            if let Some(d) = diff {
                worst = worst.max(d);
            }
            t.row(vec![
                r1.into(),
                r2.into(),
                f.map_or_else(blank, Cell::F),
                th.map_or_else(blank, Cell::F),
                diff.map_or_else(blank, Cell::F),
            ]);
        }
        let mut line = format!("R1={r1}");
        if let Some(s) = finite {
            let xs: Vec<f64> = (range.lo..=range.hi).map(|r| r as f64).collect();
            line += &format!(" affine_deviation={}", float(affine_deviation(&xs, s)));
        }
        if let Some((_, c)) = thermo {
            line += &format!(" slope_per_R={}", float(*c));
        }
        if finite.is_some() && thermo.is_some() {
            line += &format!(" max_abs_diff={}", float(worst));
        }
        t.summary(line);
    }
    ctx.emit(&t)
}

fn s2_grid(points: &[PepsParams], g: &LatticeGeometry) -> Result<Vec<f64>, CliError> {
    points.par_iter().map(|p| Ok(renyi_finite(p, g, 2)?.value)).collect()
}

pub fn fig6(ctx: &Ctx, delta_grid: Option<Grid>) -> Result<(), CliError> {
    ctx.require_order_two()?;
    let c = &ctx.common;
    let alpha = ctx.cfg.pick(c.alpha, "alpha", 1.0)?;
    let beta = ctx.cfg.pick(c.beta, "beta", 0.1)?;
    let gammas = match ctx.cfg.pick_opt(c.gamma, "gamma")? {
        Some(gm) => vec![gm],
        None => vec![0.0, 0.1, 1.0],
    };
    let grid = ctx.cfg.pick(delta_grid, "delta-grid", Grid { min: 0.8, max: 1.2, step: 0.005 })?;
    let g = ctx.geometry(WIDE)?;
    let deltas = grid.points();
    let points = gammas
        .iter()
        .flat_map(|&gm| deltas.iter().map(move |&d| PepsParams::new(alpha, beta, gm, d)))
        .collect::<Result<Vec<_>, _>>()?;
    let s = s2_grid(&points, &g)?;

    let mut t = Table::new("fig6", &["delta", "gamma", "S2", "d2"]);
    t.meta(format!("alpha={} beta={} delta_grid={grid}", float(alpha), float(beta)));
    meta_geometry(&mut t, &g);
    for (gm, chunk) in gammas.iter().zip(s.chunks(deltas.len())) {
        let d2 = lgt_renyi::verify::second_differences(chunk);
        for ((d, v), dd) in deltas.iter().zip(chunk).zip(&d2) {
            t.row(vec![(*d).into(), (*gm).into(), (*v).into(), dd.map_or(Cell::S(String::new()), Cell::F)]);
        }
        if deltas.len() >= 5 && deltas.iter().any(|d| (d - 1.0).abs() < 1e-9) {
            let (at, median, worst) = kink_statistics(&deltas, chunk);
            t.summary(format!(
                "gamma={} d2_at_1={} median_off={} ratio_at_1={} max_ratio={}",
                float(*gm),
                float(at),
                float(median),
                float(at / median),
                float(worst)
            ));
        }
    }
    ctx.emit(&t)
}

pub fn fig7(ctx: &Ctx, gamma_grid: Option<Grid>, delta_grid: Option<Grid>) -> Result<(), CliError> {
    ctx.require_order_two()?;
    let c = &ctx.common;
    let alpha = ctx.cfg.pick(c.alpha, "alpha", 1.0)?;
    let betas = match ctx.cfg.pick_opt(c.beta, "beta")? {
        Some(b) => vec![b],
        None => vec![0.1, 1.0],
    };
    let gg = ctx.cfg.pick(gamma_grid, "gamma-grid", Grid { min: 0.0, max: 2.0, step: 0.1 })?;
    let dg = ctx.cfg.pick(delta_grid, "delta-grid", Grid { min: 0.2, max: 2.0, step: 0.2 })?;
    let g = ctx.geometry(WIDE)?;
    let (gammas, deltas) = (gg.points(), dg.points());
    let mut keys = Vec::new();
    for &b in &betas {
        for &d in &deltas {
            for &gm in &gammas {
                keys.push((b, d, gm));
            }
        }
    }
    let points = keys.iter().map(|&(b, d, gm)| PepsParams::new(alpha, b, gm, d)).collect::<Result<Vec<_>, _>>()?;
    let s = s2_grid(&points, &g)?;

    let mut t = Table::new("fig7", &["gamma", "delta", "beta", "S2"]);
    t.meta(format!("alpha={} gamma_grid={gg} delta_grid={dg}", float(alpha)));
    meta_geometry(&mut t, &g);
    for (&(b, d, gm), v) in keys.iter().zip(&s) {
        t.row(vec![gm.into(), d.into(), b.into(), (*v).into()]);
    }
    for (bi, &b) in betas.iter().enumerate() {
        let block = &s[bi * deltas.len() * gammas.len()..(bi + 1) * deltas.len() * gammas.len()];
        let mut worst = (f64::NEG_INFINITY, 0.0, 0.0);
        for (di, row) in block.chunks(gammas.len()).enumerate() {
            for (gi, w) in row.windows(2).enumerate() {
                if w[1] - w[0] > worst.0 {
                    worst = (w[1] - w[0], deltas[di], gammas[gi]);
                }
            }
        }
        if worst.0.is_finite() {
            t.summary(format!(
                "beta={} largest_increase_in_gamma={} at_delta={} from_gamma={}",
                float(b),
                float(worst.0),
                float(worst.1),
                float(worst.2)
            ));
        }
    }
    ctx.emit(&t)
}

pub fn entropy(ctx: &Ctx) -> Result<(), CliError> {
    let p = ctx.params(PERTURBATIVE)?;
    let n = ctx.order(2)?;
    let g = ctx.geometry(WIDE)?;
    let m = method(ctx, MethodChoice::Finite)?;
    let mut t = Table::new("entropy", &["method", "n", "S"]);
    ctx.meta_params(&mut t, &p);
    meta_geometry(&mut t, &g);
    if m != MethodChoice::Thermodynamic {
        let r = renyi_finite(&p, &g, n)?;
        t.row(vec![Cell::S("finite".into()), n.into(), r.value.into()]);
    }
    if m != MethodChoice::Finite {
        let r = renyi_thermodynamic(&p, g.r1, g.r2, g.n1, n)?;
        let th = r.thermo.as_ref().expect("closed form has components");
        t.meta(format!("rho1={} rho1_prime={} K={}", float(th.rho1), float(th.rho1_prime), th.degeneracy));
        t.row(vec![Cell::S("thermodynamic".into()), n.into(), r.value.into()]);
    }
    ctx.emit(&t)
}

pub fn oracle_verify(ctx: &Ctx) -> Result<(), CliError> {
    const TOL: f64 = 1e-10;
    let p = ctx.params(PERTURBATIVE)?;
    let g = ctx.geometry(SMALL)?;
    let orders = match ctx.cfg.pick_opt(ctx.common.n, "n")? {
        Some(n) if n < 2 => return Err(CliError::Input(format!("Renyi order must be >= 2, got {n}"))),
        Some(n) => vec![n],
        None => vec![2, 3],
    };
    let psi = enumerate_state(&p, g.n1, g.n2)?;
    let rho = reduced_density(&psi, &link_partition(&g))?;
    let mut t = Table::new("oracle-verify", &["n", "transfer", "oracle", "rel_diff"]);
    ctx.meta_params(&mut t, &p);
    meta_geometry(&mut t, &g);
    let mut worst = 0.0f64;
    for &n in &orders {
        let tiled = purity_finite(&p, &g, n)?;
        let exact = exact_purity(&rho, n);
        let rel = (tiled - exact).abs() / exact;
        worst = worst.max(rel);
        t.row(vec![n.into(), tiled.into(), exact.into(), rel.into()]);
    }
    t.summary(format!("max_rel_diff={} tol={}", float(worst), float(TOL)));
    ctx.emit(&t)?;
    if worst > TOL {
        return Err(CliError::Verification(format!("transfer and oracle purities differ by {worst:e}")));
    }
    Ok(())
}

pub struct MpsArgs {
    pub chi: Option<usize>,
    pub sites: Option<usize>,
    pub start: Option<usize>,
    pub len: Option<usize>,
}

pub fn mps_demo(ctx: &Ctx, a: MpsArgs) -> Result<(), CliError> {
    const TOL: f64 = 1e-12;
    let chi = ctx.cfg.pick(a.chi, "chi", 2)?;
    let sites = ctx.cfg.pick(a.sites, "sites", 8)?;
    let start = ctx.cfg.pick(a.start, "start", 2)?;
    let len = ctx.cfg.pick(a.len, "len", 3)?;
    let seed = ctx.seed()?;
    let r = mps_purity_demo(chi, sites, (start, len), seed)?;
    let diff = (r.p2_transfer - r.p2_direct).abs();
    let mut t = Table::new("mps-demo", &["p2_transfer", "p2_direct", "abs_diff"]);
    t.meta(format!("chi={chi} sites={sites} start={start} len={len} seed={seed}"));
    t.row(vec![r.p2_transfer.into(), r.p2_direct.into(), diff.into()]);
    ctx.emit(&t)?;
    if diff > TOL {
        return Err(CliError::Verification(format!("MPS purities differ by {diff:e}")));
    }
    Ok(())
}

pub fn consistency(ctx: &Ctx) -> Result<(), CliError> {
    const TOL: f64 = 1e-10;
    let p = ctx.params(PERTURBATIVE)?;
    let n = ctx.order(2)?;
    let g = ctx.geometry((3, 3, 1, 2))?;
    let rel = contraction_consistency(&p, &g, n)?;
    let mut t = Table::new("consistency", &["n", "rel_diff"]);
    ctx.meta_params(&mut t, &p);
    meta_geometry(&mut t, &g);
    t.row(vec![n.into(), rel.into()]);
    ctx.emit(&t)?;
    if rel > TOL {
        return Err(CliError::Verification(format!("row-wise and column-wise purities differ by {rel:e}")));
    }
    Ok(())
}

pub fn verify(ctx: &Ctx, only: Option<String>, strict: bool) -> Result<(), CliError> {
    let seed = ctx.seed()?;
    let only = ctx.cfg.pick_opt(only, "only")?;
    let strict = strict || ctx.cfg.pick(None, "strict", false)?;
    let outcomes = run_suite(&SuiteOptions { seed, ..Default::default() }, only.as_deref());
    if outcomes.is_empty() {
        return Err(CliError::Input(format!("no criterion matches '{}'", only.unwrap_or_default())));
    }
    let fatal: Vec<&str> =
        outcomes.iter().filter(|o| !o.passed && (!o.known_failure || strict)).map(|o| o.id).collect();
    let report = json!({
        "tool": "lgt-renyi",
        "version": env!("CARGO_PKG_VERSION"),
        "seed": seed,
        "strict": strict,
        "passed": fatal.is_empty(),
        "criteria": outcomes.iter().map(|o| json!({
            "id": o.id,
            "title": o.title,
            "passed": o.passed,
            "known_failure": o.known_failure,
            "seconds": o.seconds,
            "detail": o.detail,
        })).collect::<Vec<_>>(),
    });
    let text = serde_json::to_string_pretty(&report).expect("report serializes") + "\n";
    match ctx.cfg.pick_opt(ctx.common.out.clone(), "out")? {
        Some(path) => {
            std::fs::write(&path, text).map_err(|e| CliError::Input(format!("cannot write {}: {e}", path.display())))?
        }
        None => print!("{text}"),
    }
    if !fatal.is_empty() {
        return Err(CliError::Verification(format!("failed: {}", fatal.join(", "))));
    }
    Ok(())
}
