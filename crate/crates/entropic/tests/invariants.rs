//! Property tests of the structural invariants: conjugation involution,
//! c-transform order laws, Wasserstein metric axioms, and JSON round-trips.

use entropic::conjugation::{c_transform, Potential};
use entropic::domain::{Domain, Grid, Point};
use entropic::measure::Measure;
use entropic::metrics::wasserstein_1d;
use entropic::monotone::l1_between;
use entropic::transport::{conjugate_measure_1d, measure_cdf, TransportMap};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;
use std::sync::Arc;

fn igrid(n: usize) -> Arc<Grid> {
    Arc::new(Arc::new(Domain::interval()).build_grid(n).unwrap())
}

/// Sorted distinct positions with normalized positive weights.
fn discrete_atoms(k: usize) -> impl Strategy<Value = Vec<(f64, f64)>> {
    prop::collection::vec((0.001f64..0.999, 0.05f64..1.0), 1..=k).prop_map(|mut pts| {
        pts.sort_by(|a, b| a.0.total_cmp(&b.0));
        pts.dedup_by(|a, b| (a.0 - b.0).abs() < 1e-3);
        let total: f64 = pts.iter().map(|p| p.1).sum();
        pts.into_iter().map(|(x, w)| (x, w / total)).collect()
    })
}

fn to_measure(atoms: &[(f64, f64)]) -> Measure {
    let d = Domain::interval();
    Measure::discrete(
        &d,
        atoms.iter().map(|&(x, w)| (Point::One(x), w)).collect(),
    )
    .unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn conjugation_is_involutive_on_discrete(atoms in discrete_atoms(7)) {
        let grid = igrid(16);
        let mu = to_measure(&atoms);
        let back = conjugate_measure_1d(&grid, &conjugate_measure_1d(&grid, &mu).unwrap()).unwrap();
        let orig = match &mu { Measure::Discrete { atoms } => atoms.clone(), _ => unreachable!() };
        let round = match &back { Measure::Discrete { atoms } => atoms.clone(), _ => unreachable!() };
        prop_assert_eq!(orig.len(), round.len());
        for ((p, w), (q, v)) in orig.iter().zip(&round) {
            prop_assert!((p.coord() - q.coord()).abs() < 1e-12);
            prop_assert!((w - v).abs() < 1e-12);
        }
    }

    #[test]
    fn conjugate_masses_are_position_gaps(atoms in discrete_atoms(7)) {
        // On the interval the conjugate atom weights are the gaps of the
        // support (with the two boundary pieces), a direct inverse-CDF fact.
        let grid = igrid(16);
        let mu = to_measure(&atoms);
        let conj = conjugate_measure_1d(&grid, &mu).unwrap();
        let catoms = match &conj { Measure::Discrete { atoms } => atoms.clone(), _ => unreachable!() };
        let total: f64 = catoms.iter().map(|(_, w)| w).sum();
        prop_assert!((total - 1.0).abs() < 1e-9);
        let mut gaps = vec![atoms[0].0];
        for w in atoms.windows(2) {
            gaps.push(w[1].0 - w[0].0);
        }
        gaps.push(1.0 - atoms.last().unwrap().0);
        gaps.retain(|&g| g > 1e-15);
        let mut weights: Vec<f64> = catoms.iter().map(|(_, w)| *w).collect();
        gaps.sort_by(f64::total_cmp);
        weights.sort_by(f64::total_cmp);
        prop_assert_eq!(gaps.len(), weights.len());
        for (g, w) in gaps.iter().zip(&weights) {
            prop_assert!((g - w).abs() < 1e-9);
        }
    }

    #[test]
    fn wasserstein_1d_triangle_inequality(
        a in discrete_atoms(5),
        b in discrete_atoms(5),
        c in discrete_atoms(5),
    ) {
        let grid = igrid(8);
        let (ma, mb, mc) = (to_measure(&a), to_measure(&b), to_measure(&c));
        let dab = wasserstein_1d(&grid, &ma, &mb).unwrap();
        let dba = wasserstein_1d(&grid, &mb, &ma).unwrap();
        prop_assert!((dab - dba).abs() < 1e-10);
        let dac = wasserstein_1d(&grid, &ma, &mc).unwrap();
        let dcb = wasserstein_1d(&grid, &mc, &mb).unwrap();
        prop_assert!(dab <= dac + dcb + 1e-10);
    }

    #[test]
    fn c_transform_order_and_shift_laws(seed in 0u64..1_000, lambda in -0.5f64..0.5) {
        let grid = igrid(128);
        let mut rng = ChaCha12Rng::seed_from_u64(seed);
        let phi = Potential::random_lipschitz(grid.clone(), &mut rng, 6);
        let shifted = Potential::new(
            grid.clone(),
            phi.values.iter().map(|v| v + lambda.max(0.0) + 0.01).collect(),
        ).unwrap();
        // Order reversal: phi <= shifted implies C(phi) >= C(shifted).
        let ca = c_transform(&phi);
        let cb = c_transform(&shifted);
        prop_assert!(ca.values.iter().zip(&cb.values).all(|(x, y)| x >= y));
        // Constant shift distributes over the min.
        let plus = Potential::new(
            grid,
            phi.values.iter().map(|v| v + lambda).collect(),
        ).unwrap();
        let cl = c_transform(&plus);
        for (x, y) in cl.values.iter().zip(&ca.values) {
            prop_assert!((x - (y - lambda)).abs() < 1e-12);
        }
    }

    #[test]
    fn l1_isometry_of_map_conjugation(seed in 0u64..1_000) {
        let grid = igrid(256);
        let mut rng = ChaCha12Rng::seed_from_u64(seed);
        let mk = |rng: &mut ChaCha12Rng| {
            let mut v: Vec<f64> = (0..256).map(|_| rand::RngExt::random(rng)).collect();
            v.sort_by(f64::total_cmp);
            TransportMap::grid_1d(grid.clone(), v).unwrap()
        };
        let g1 = mk(&mut rng).map_graph_1d().unwrap();
        let g2 = mk(&mut rng).map_graph_1d().unwrap();
        let before = l1_between(&g1, &g2);
        let after = l1_between(&g1.reflect(), &g2.reflect());
        prop_assert!((before - after).abs() < 1e-12);
    }

    #[test]
    fn measure_json_round_trips(atoms in discrete_atoms(6)) {
        let mu = to_measure(&atoms);
        let text = serde_json::to_string(&mu).unwrap();
        let back: Measure = serde_json::from_str(&text).unwrap();
        prop_assert_eq!(&mu, &back);
        // And the emitted text is stable under a second round trip.
        let text2 = serde_json::to_string(&back).unwrap();
        prop_assert_eq!(text, text2);
    }

    #[test]
    fn relative_entropy_nonnegative_zero_iff_uniform(raw in prop::collection::vec(0.05f64..3.0, 16)) {
        let grid = igrid(16);
        let mu = Measure::grid_density_normalized(&grid, raw.clone()).unwrap();
        let ent = entropic::metrics::relative_entropy(&grid, &mu).unwrap().0;
        prop_assert!(ent >= -1e-12);
        let spread = raw.iter().cloned().fold(f64::MIN, f64::max)
            - raw.iter().cloned().fold(f64::MAX, f64::min);
        if spread > 0.2 {
            prop_assert!(ent > 1e-6, "entropy {ent} too small for spread {spread}");
        }
    }

    #[test]
    fn cdf_masses_are_consistent(atoms in discrete_atoms(6), a in 0.0f64..1.0, b in 0.0f64..1.0) {
        let grid = igrid(8);
        let mu = to_measure(&atoms);
        let f = measure_cdf(&grid, &mu).unwrap();
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        let m_closed = f.mass_closed(lo, hi);
        let m_open = f.mass_open(lo, hi);
        prop_assert!(m_open <= m_closed + 1e-15);
        prop_assert!((0.0..=1.0 + 1e-12).contains(&m_closed));
    }
}
