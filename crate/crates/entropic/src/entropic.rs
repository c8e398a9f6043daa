//! Entropic-measure samples: conjugated Dirichlet-Ferguson draws.
//!
//! A sample holds the underlying discrete draw `nu`, its conjugate `mu`
//! (exact atoms in 1D, an empirical cloud on the tessellation skeleton in
//! 2D), and the open holes in the support of `mu` whose sizes are `nu`'s
//! weights.
//!
//! The same reference measure drives both the Dirichlet atoms and the
//! conjugation; using two different references is not implemented.

use crate::dirichlet::{sample_dirichlet_ferguson, Truncation};
use crate::domain::{DomainKind, Grid};
use crate::geometry::{self, Vec2};
use crate::measure::Measure;
use crate::semidiscrete::{conjugate_measure_2d, semidiscrete_weights, Tessellation};
use crate::transport::{conjugate_cdf_1d, conjugate_measure_1d};
use crate::{Error, Result};
use rand::Rng;

/// Default cloud size for 2D conjugate sampling.
pub const DEFAULT_CLOUD: usize = 100_000;

/// Holes in the support of the conjugate measure.
#[derive(Clone, Debug)]
pub enum Holes {
    /// Open gaps `(a, b)` on the lift.
    Gaps(Vec<(f64, f64)>),
    /// Open convex Laguerre cells.
    Cells(Vec<Vec<Vec2>>),
}

impl Holes {
    pub fn sizes(&self, tess: Option<&Tessellation>) -> Vec<f64> {
        match self {
            Holes::Gaps(gaps) => gaps.iter().map(|(a, b)| b - a).collect(),
            Holes::Cells(_) => tess.map(|t| t.masses.clone()).unwrap_or_default(),
        }
    }
}

/// One draw of the entropic measure: `mu = nu^c` for `nu ~ Q^beta`.
#[derive(Clone, Debug)]
pub struct EntropicSample {
    pub beta: f64,
    pub nu: Measure,
    pub mu: Measure,
    pub holes: Holes,
    pub tessellation: Option<Tessellation>,
}

/// Samples the entropic measure: draws `nu` by stick-breaking and conjugates
/// it (closed form in 1D; semi-discrete solver plus exact argmax sampling in
/// 2D). Solver failures carry the offending `nu` serialized for replay.
pub fn sample_entropic(
    beta: f64,
    grid: &Grid,
    rng: &mut impl Rng,
    truncation: Truncation,
    n_cloud: usize,
    solver_tol: f64,
) -> Result<EntropicSample> {
    let nu = sample_dirichlet_ferguson(beta, grid, rng, truncation)?;
    conjugate_sample(beta, grid, nu, rng, n_cloud, solver_tol)
}

/// Conjugates a given discrete draw (the deterministic tail of
/// [`sample_entropic`], also used to replay failures).
pub fn conjugate_sample(
    beta: f64,
    grid: &Grid,
    nu: Measure,
    rng: &mut impl Rng,
    n_cloud: usize,
    solver_tol: f64,
) -> Result<EntropicSample> {
    match grid.domain.kind {
        DomainKind::Interval | DomainKind::Circle => {
            let mu = conjugate_measure_1d(grid, &nu)?;
            let cdf = conjugate_cdf_1d(grid, &nu)?;
            Ok(EntropicSample {
                beta,
                nu,
                mu,
                holes: Holes::Gaps(cdf.flats()),
                tessellation: None,
            })
        }
        DomainKind::Polygon => {
            let (sites, lambda) = match &nu {
                Measure::Discrete { atoms } => {
                    let mut s = Vec::with_capacity(atoms.len());
                    let mut l = Vec::with_capacity(atoms.len());
                    for (p, w) in atoms {
                        s.push(p.coords());
                        l.push(*w);
                    }
                    (s, l)
                }
                _ => return Err(Error::precondition("2D conjugation needs a discrete nu")),
            };
            let tess = semidiscrete_weights(
                &grid.domain,
                Some(grid),
                &sites,
                &lambda,
                solver_tol,
                crate::semidiscrete::DEFAULT_MAX_ITER,
            )
            .map_err(|e| replay_error(e, &nu))?;
            let mu = conjugate_measure_2d(&tess, Some(grid), n_cloud, rng)?;
            Ok(EntropicSample {
                beta,
                nu,
                mu,
                holes: Holes::Cells(tess.cells.clone()),
                tessellation: Some(tess),
            })
        }
    }
}

fn replay_error(e: Error, nu: &Measure) -> Error {
    match serde_json::to_string(nu) {
        Ok(json) => Error::Config(format!("{e}; replay nu = {json}")),
        Err(_) => e,
    }
}

/// Fraction of `mu`'s mass strictly inside each open hole, with a boundary
/// buffer: points within `buffer` of a hole boundary do not count as
/// interior. The conjugate never charges the open holes, so every fraction
/// should vanish.
pub fn hole_report(sample: &EntropicSample, buffer: f64) -> Result<Vec<f64>> {
    match (&sample.holes, &sample.mu) {
        (Holes::Cells(cells), Measure::Empirical { points }) => {
            let n = points.len() as f64;
            let mut out = Vec::with_capacity(cells.len());
            for cell in cells {
                if cell.is_empty() {
                    out.push(0.0);
                    continue;
                }
                let count = points
                    .iter()
                    .filter(|p| strictly_inside(cell, p.coords(), buffer))
                    .count();
                out.push(count as f64 / n);
            }
            Ok(out)
        }
        (Holes::Gaps(gaps), mu) => {
            // Closed-form path: measure the open gaps directly.
            let graph = match mu {
                Measure::Discrete { atoms } => crate::monotone::MonotoneGraph::from_atoms(
                    &atoms.iter().map(|(p, w)| (p.coord(), *w)).collect::<Vec<_>>(),
                    1e-9,
                )?,
                Measure::Piecewise { atoms, slabs } => {
                    crate::monotone::MonotoneGraph::from_parts(atoms, slabs, 1e-9)?
                }
                _ => return Err(Error::precondition("unexpected 1D conjugate format")),
            };
            Ok(gaps
                .iter()
                .map(|&(a, b)| graph.mass_open(a + buffer, b - buffer))
                .collect())
        }
        _ => Err(Error::precondition("hole report needs matching formats")),
    }
}

fn strictly_inside(poly: &[Vec2], p: Vec2, margin: f64) -> bool {
    let n = poly.len();
    for i in 0..n {
        let a = poly[i];
        let b = poly[(i + 1) % n];
        let e = geometry::sub(b, a);
        let len = geometry::dot(e, e).sqrt().max(1e-300);
        if geometry::cross(e, geometry::sub(p, a)) < margin * len {
            return false;
        }
    }
    true
}

/// Largest cluster mass of an empirical conjugate: points are snapped to a
/// lattice of pitch `tol` and the heaviest bucket is reported. For the 1D
/// closed form the largest atom weight is returned directly.
pub fn atom_report(sample: &EntropicSample, tol: f64) -> Result<f64> {
    match &sample.mu {
        Measure::Empirical { points } => {
            if !(tol > 0.0) {
                return Err(Error::input("cluster radius must be positive"));
            }
            let mut buckets: std::collections::HashMap<(i64, i64), usize> =
                std::collections::HashMap::new();
            for p in points {
                let c = p.coords();
                let key = ((c[0] / tol).floor() as i64, (c[1] / tol).floor() as i64);
                *buckets.entry(key).or_insert(0) += 1;
            }
            let max = buckets.values().copied().max().unwrap_or(0);
            Ok(max as f64 / points.len() as f64)
        }
        Measure::Discrete { atoms } => Ok(atoms
            .iter()
            .map(|(_, w)| *w)
            .fold(0.0, f64::max)),
        Measure::Piecewise { atoms, .. } => {
            Ok(atoms.iter().map(|(_, w)| *w).fold(0.0, f64::max))
        }
        _ => Err(Error::precondition("atom report needs a point-based mu")),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::Domain;
    use crate::measure::Partition;
    use rand::{RngExt, SeedableRng};
    use rand_chacha::ChaCha12Rng;
    use std::sync::Arc;

    fn igrid(n: usize) -> Grid {
        Arc::new(Domain::interval()).build_grid(n).unwrap()
    }

    fn sqgrid(n: usize) -> Grid {
        Arc::new(Domain::unit_square()).build_grid(n).unwrap()
    }

    fn atoms_of(m: &Measure) -> Vec<(f64, f64)> {
        match m {
            Measure::Discrete { atoms } => atoms.iter().map(|(p, w)| (p.coord(), *w)).collect(),
            Measure::Piecewise { atoms, .. } => atoms.clone(),
            _ => panic!("expected atoms"),
        }
    }

    #[test]
    fn one_dimensional_sample_swaps_gaps_and_weights() {
        let g = igrid(11);
        let mut rng = ChaCha12Rng::seed_from_u64(1);
        let s = sample_entropic(1.0, &g, &mut rng, Truncation::MaxTerms(12), 0, 1e-7).unwrap();
        // nu weights (sorted by atom position) appear as mu's hole sizes.
        let nu_atoms = atoms_of(&s.nu);
        let hole_sizes = s.holes.sizes(None);
        assert_eq!(hole_sizes.len(), nu_atoms.len());
        let mut w: Vec<f64> = nu_atoms.iter().map(|(_, w)| *w).collect();
        let mut h = hole_sizes.clone();
        w.sort_by(f64::total_cmp);
        h.sort_by(f64::total_cmp);
        for (a, b) in w.iter().zip(&h) {
            assert!((a - b).abs() < 1e-9, "hole sizes != nu weights");
        }
        // mu's atom masses are nu's position gaps; the probe masses vanish.
        let probes = hole_report(&s, 0.0).unwrap();
        assert!(probes.iter().all(|&p| p == 0.0));
        // Conjugation consistency: conjugating mu returns nu exactly.
        let back = crate::transport::conjugate_measure_1d(&g, &s.mu).unwrap();
        let orig = atoms_of(&s.nu);
        let round = atoms_of(&back);
        assert_eq!(orig.len(), round.len());
        for ((x, w), (y, v)) in orig.iter().zip(&round) {
            assert!((x - y).abs() < 1e-12 && (w - v).abs() < 1e-12);
        }
    }

    #[test]
    fn two_dimensional_sample_structure() {
        let g = sqgrid(8);
        let mut rng = ChaCha12Rng::seed_from_u64(2);
        let s = sample_entropic(1.0, &g, &mut rng, Truncation::MaxTerms(6), 20_000, 1e-7).unwrap();
        let tess = s.tessellation.as_ref().unwrap();
        // Hole sizes match nu's weights within solver tolerance.
        let nu_weights: Vec<f64> = match &s.nu {
            Measure::Discrete { atoms } => atoms.iter().map(|(_, w)| *w).collect(),
            _ => unreachable!(),
        };
        for (m, l) in tess.masses.iter().zip(&nu_weights) {
            assert!((m - l).abs() <= 1e-6);
        }
        // No cloud point sits strictly inside an open cell.
        let probes = hole_report(&s, 1e-9).unwrap();
        for p in probes {
            assert!(p <= 2e-3, "hole probe mass {p}");
        }
        // The cloud lies on the skeleton: distance to the nearest cell edge
        // is numerically zero for at least 99.5% of points.
        if let Measure::Empirical { points } = &s.mu {
            let mut on_skeleton = 0usize;
            for p in points {
                let c = p.coords();
                let mut dmin = f64::MAX;
                for cell in &tess.cells {
                    for i in 0..cell.len() {
                        let d = geometry::dist_point_segment(
                            c,
                            cell[i],
                            cell[(i + 1) % cell.len()],
                        );
                        dmin = dmin.min(d);
                    }
                }
                if dmin <= 1e-9 {
                    on_skeleton += 1;
                }
            }
            assert!(on_skeleton as f64 >= 0.995 * points.len() as f64);
        }
    }

    #[test]
    fn delta_caricature_passthrough() {
        // nu = delta_z behaves like the 2D delta example: mass at corners.
        let g = sqgrid(6);
        let d = Domain::unit_square();
        let nu = Measure::discrete(&d, vec![(crate::domain::Point::Two([0.4, 0.6]), 1.0)]).unwrap();
        let mut rng = ChaCha12Rng::seed_from_u64(3);
        let s = conjugate_sample(1.0, &g, nu, &mut rng, 5000, 1e-7).unwrap();
        let rep = atom_report(&s, 1e-6).unwrap();
        // All mass clusters on a handful of corners: the largest cluster is
        // macroscopic.
        assert!(rep > 0.2, "largest cluster {rep}");
    }

    #[test]
    fn ordering_nu_weights_leaves_mu_law_invariant() {
        // Paired samples: same sticks, ordered vs unordered, equal d_W(mu, m)
        // in distribution (KS two-sample via the harness).
        let g = igrid(11);
        let mut rng = ChaCha12Rng::seed_from_u64(4);
        let n = 800;
        let mut stat_plain = Vec::with_capacity(n);
        let mut stat_sorted = Vec::with_capacity(n);
        // d_W(mu, m)^2 with mu = nu^c: the quantile of mu is the CDF of nu,
        // so the statistic is the L2 gap between F_nu and the identity.
        // The reordering must happen in stick order (the atoms are iid and
        // independent of the weights), before any sort by position.
        let identity = crate::monotone::MonotoneGraph::identity();
        let build = |weights: &[f64], xs: &[f64]| {
            let total: f64 = weights.iter().sum();
            let atoms: Vec<(f64, f64)> = xs
                .iter()
                .zip(weights)
                .map(|(&x, &w)| (x, w / total))
                .collect();
            let nu = Measure::piecewise(atoms, vec![]).unwrap();
            let f = crate::transport::measure_cdf(&g, &nu).unwrap();
            crate::monotone::l2_sq_between(&f, &identity)
        };
        for _ in 0..n {
            let sticks = crate::dirichlet::sample_stick_breaking(
                1.0,
                &mut rng,
                Truncation::RemainderBelow(1e-8),
            )
            .unwrap();
            let xs: Vec<f64> = (0..sticks.weights.len())
                .map(|_| rand::RngExt::random(&mut rng))
                .collect();
            stat_plain.push(build(&sticks.weights, &xs));
            let ordered = crate::dirichlet::order_sizes(&sticks);
            stat_sorted.push(build(&ordered, &xs));
        }
        let rep = crate::harness::ks_test_two_sample(
            "order-invariance",
            &stat_plain,
            &stat_sorted,
            1e-3,
            4,
        )
        .unwrap();
        assert!(rep.pass, "law changed under weight reordering: p = {:?}", rep.p_value);
    }

    #[test]
    fn hole_size_law_in_stick_order() {
        // The hole sizes of the conjugate, mapped back to stick order through
        // the position ranks, follow E lambda_k = 2^-k at beta = 1.
        let g = igrid(8);
        let beta = 1.0;
        let n = 10_000;
        let kmax = 5usize;
        let mut rng = ChaCha12Rng::seed_from_u64(2024);
        let mut sums = vec![0.0; kmax];
        let mut sums2 = vec![0.0; kmax];
        for _ in 0..n {
            let sticks = crate::dirichlet::sample_stick_breaking(
                beta,
                &mut rng,
                Truncation::RemainderBelow(1e-8),
            )
            .unwrap();
            let kk = sticks.weights.len();
            let xs: Vec<f64> = (0..kk).map(|_| rand::RngExt::random(&mut rng)).collect();
            let total = 1.0 - sticks.remainder;
            let atoms: Vec<(f64, f64)> = xs
                .iter()
                .zip(&sticks.weights)
                .map(|(&x, &w)| (x, w / total))
                .collect();
            let nu = Measure::piecewise(atoms, vec![]).unwrap();
            let conj = crate::transport::conjugate_cdf_1d(&g, &nu).unwrap();
            let flats = conj.flats();
            assert_eq!(flats.len(), kk, "one hole per stick");
            // Rank of each stick's atom position.
            let mut idx: Vec<usize> = (0..kk).collect();
            idx.sort_by(|&a, &b| xs[a].total_cmp(&xs[b]));
            for (rank, &stick) in idx.iter().enumerate() {
                if stick < kmax {
                    let size = flats[rank].1 - flats[rank].0;
                    sums[stick] += size;
                    sums2[stick] += size * size;
                }
            }
        }
        for k in 0..kmax {
            let mean = sums[k] / n as f64;
            let var = sums2[k] / n as f64 - mean * mean;
            let want = 0.5f64.powi(k as i32 + 1);
            let se = (var / n as f64).sqrt();
            assert!(
                (mean - want).abs() <= 5.0 * se,
                "hole-size mean {mean} vs 2^-{} = {want}",
                k + 1
            );
        }
    }

    #[test]
    fn atom_report_shrinks_with_denser_support() {
        // Discrete nu without full support can give atoms; as the support
        // densifies the largest cluster mass decays below 1e-2.
        let g = sqgrid(6);
        let mut rng = ChaCha12Rng::seed_from_u64(3030);
        let mut last = f64::INFINITY;
        for n_sites in [50usize, 200, 1000] {
            let sites: Vec<(crate::domain::Point, f64)> = {
                let mut raw: Vec<([f64; 2], f64)> = (0..n_sites)
                    .map(|_| {
                        (
                            [rng.random_range(0.05..0.95), rng.random_range(0.05..0.95)],
                            rng.random_range(0.5..1.5),
                        )
                    })
                    .collect();
                let s: f64 = raw.iter().map(|r| r.1).sum();
                raw.iter_mut().for_each(|r| r.1 /= s);
                raw.into_iter()
                    .map(|(p, w)| (crate::domain::Point::Two(p), w))
                    .collect()
            };
            let nu = Measure::discrete(&Domain::unit_square(), sites).unwrap();
            let s = conjugate_sample(1.0, &g, nu, &mut rng, 30_000, 1e-6).unwrap();
            let largest = atom_report(&s, 0.01).unwrap();
            assert!(largest < last, "cluster mass not shrinking: {largest} >= {last}");
            last = largest;
        }
        assert!(last <= 1e-2, "largest cluster with 1000 atoms: {last}");
    }

    #[test]
    fn two_dimensional_conjugation_round_trip_is_weakly_consistent() {
        // Cluster the conjugate cloud into a discrete measure, conjugate it
        // back, and compare with nu. The cloud and the clustering are Monte
        // Carlo approximations and conjugation is continuous but not
        // Lipschitz, so this is a coarse weak-convergence check (the 1D round
        // trip is exact; see the transport tests).
        let g = sqgrid(6);
        let d = Domain::unit_square();
        let nu_atoms = vec![
            (crate::domain::Point::Two([0.2, 0.3]), 0.3),
            (crate::domain::Point::Two([0.7, 0.4]), 0.45),
            (crate::domain::Point::Two([0.4, 0.8]), 0.25),
        ];
        let nu = Measure::discrete(&d, nu_atoms.clone()).unwrap();
        let mut rng = ChaCha12Rng::seed_from_u64(404);
        let s = conjugate_sample(1.0, &g, nu, &mut rng, 30_000, 1e-8).unwrap();
        // Cluster the cloud on a 0.03 lattice.
        let pitch = 0.03;
        let points = match &s.mu {
            Measure::Empirical { points } => points,
            _ => unreachable!(),
        };
        let mut buckets: std::collections::BTreeMap<(i64, i64), (f64, f64, usize)> =
            std::collections::BTreeMap::new();
        for p in points {
            let c = p.coords();
            let key = ((c[0] / pitch).floor() as i64, (c[1] / pitch).floor() as i64);
            let e = buckets.entry(key).or_insert((0.0, 0.0, 0));
            e.0 += c[0];
            e.1 += c[1];
            e.2 += 1;
        }
        let n = points.len() as f64;
        let clustered: Vec<(crate::domain::Point, f64)> = buckets
            .values()
            .map(|&(sx, sy, c)| {
                (
                    crate::domain::Point::Two([sx / c as f64, sy / c as f64]),
                    c as f64 / n,
                )
            })
            .collect();
        let mu_discrete = Measure::discrete(&d, clustered).unwrap();
        let back = conjugate_sample(1.0, &g, mu_discrete, &mut rng, 20_000, 1e-5).unwrap();
        let back_points = match &back.mu {
            Measure::Empirical { points } => points.clone(),
            _ => unreachable!(),
        };
        let mut nu_cloud = Vec::new();
        for (p, w) in &nu_atoms {
            for _ in 0..((w * 240.0).round() as usize) {
                nu_cloud.push(*p);
            }
        }
        let dist =
            crate::metrics::wasserstein_cloud_estimate(&back_points, &nu_cloud, 200).unwrap();
        assert!(dist <= 0.15, "round-trip distance {dist}");
    }

    #[test]
    fn hole_sizes_against_partition_masses() {
        // The 1D holes tile [0,1] together with mu's atoms.
        let g = igrid(11);
        let mut rng = ChaCha12Rng::seed_from_u64(6);
        let s = sample_entropic(0.7, &g, &mut rng, Truncation::MaxTerms(10), 0, 1e-7).unwrap();
        if let Holes::Gaps(gaps) = &s.holes {
            let total: f64 = gaps.iter().map(|(a, b)| b - a).sum();
            assert!(total <= 1.0 + 1e-12);
            // Each gap is a legal partition block of positive reference mass.
            for &(a, b) in gaps {
                assert!(b > a);
            }
            let _ = Partition::from_cuts(&[0.5]).unwrap();
        } else {
            panic!("expected gaps");
        }
    }
}
