use lgt_renyi::entropy::{purity_finite, LatticeGeometry};
use lgt_renyi::oracle::{enumerate_state, exact_purity, link_partition, reduced_density};
use lgt_renyi::PepsParams;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn oracle_purity(p: &PepsParams, g: &LatticeGeometry, n: usize) -> f64 {
    let psi = enumerate_state(p, g.n1, g.n2).unwrap();
    exact_purity(&reduced_density(&psi, &link_partition(g)).unwrap(), n)
}

fn geometries() -> Vec<LatticeGeometry> {
    let mut out = Vec::new();
    for (n1, n2) in [(2, 2), (3, 2), (2, 3), (3, 3)] {
        for (r1, r2) in [(1, 1), (1, 2), (2, 1), (2, 2)] {
            if let Ok(g) = LatticeGeometry::new(n1, n2, r1, r2) {
                out.push(g);
            }
        }
    }
    out
}

#[test]
fn transfer_matches_enumeration_on_random_states() {
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    for _ in 0..4 {
        let v: [f64; 4] = std::array::from_fn(|_| rng.random_range(0.0..2.0));
        let p = PepsParams::new(v[0], v[1], v[2], v[3]).unwrap();
        for g in geometries() {
            for n in [2, 3] {
                let t = purity_finite(&p, &g, n).unwrap();
                let o = oracle_purity(&p, &g, n);
                assert!((t - o).abs() <= 1e-10 * o, "{p:?} {g:?} n={n}: {t} vs {o}");
            }
        }
    }
}

#[test]
fn ghz_purity_both_routes() {
    let p = PepsParams::new(1.0, 0.0, 0.0, 0.95).unwrap();
    let g = LatticeGeometry::new(2, 2, 1, 1).unwrap();
    let q = 0.9025f64.powi(4);
    let want = (1.0 + q * q) / (1.0 + q).powi(2);
    assert!((want - 0.5204711122908057).abs() < 1e-15);
    assert!((purity_finite(&p, &g, 2).unwrap() - want).abs() < 1e-12);
    assert!((oracle_purity(&p, &g, 2) - want).abs() < 1e-12);
    // three replicas: (1 + q^3) / (1 + q)^3
    let want3 = (1.0 + q.powi(3)) / (1.0 + q).powi(3);
    assert!((purity_finite(&p, &g, 3).unwrap() - want3).abs() < 1e-12);
    assert!((want3 - 0.28070666843620856).abs() < 1e-15);
}
