//! The c-transform on grid potentials.
//!
//! `c_transform` computes `phi^c(x) = -min_y [d(x,y)^2/2 + phi(y)]` with the
//! min over grid nodes. Restricting the infimum to an `eps`-covering of the
//! domain costs at most `2*D*eps` in sup norm for a `D`-Lipschitz input, so
//! two applications stay within `4*D*eps` of the exact double conjugate;
//! [`discretization_floor`] exposes the one-application bound to callers.
//!
//! The brute-force `O(n^2)` scan is the reference implementation. On interval
//! grids [`c_transform_fast_1d`] runs a monotone-argmin divide and conquer
//! that is bitwise-identical to the scan (same leftmost-argmin tie rule);
//! equality is enforced by tests up to `n = 2048`.

use crate::domain::{Domain, DomainKind, Grid, Point};
use crate::geometry;
use crate::{Error, Result};
use rand::{Rng, RngExt};
use serde::{Deserialize, Serialize};
use std::sync::Arc;

/// A grid-sampled potential.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(try_from = "PotentialJson", into = "PotentialJson")]
pub struct Potential {
    pub grid: Arc<Grid>,
    pub values: Vec<f64>,
    /// Set when a `phi^cc = phi` check has been run on this value.
    pub c_convex_verified: bool,
}

/// JSON form: the grid is described by its domain and resolution.
#[derive(Serialize, Deserialize)]
struct PotentialJson {
    grid: GridSpec,
    values: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct GridSpec {
    domain: Domain,
    resolution: usize,
}

impl From<Potential> for PotentialJson {
    fn from(p: Potential) -> Self {
        let resolution = match &p.grid.nodes {
            crate::domain::GridNodes::Line(v) | crate::domain::GridNodes::Ring(v) => v.len(),
            crate::domain::GridNodes::Lattice { .. } => {
                // The lattice resolution is the per-axis cell count used at
                // build time; recover it from the bounding box spacing.
                let (dx, lo, hi) = match &p.grid.nodes {
                    crate::domain::GridNodes::Lattice { dx, .. } => {
                        let xs: Vec<f64> =
                            p.grid.domain.vertices.iter().map(|v| v[0]).collect();
                        (
                            *dx,
                            xs.iter().cloned().fold(f64::MAX, f64::min),
                            xs.iter().cloned().fold(f64::MIN, f64::max),
                        )
                    }
                    _ => unreachable!(),
                };
                ((hi - lo) / dx).round() as usize
            }
        };
        PotentialJson {
            grid: GridSpec {
                domain: (*p.grid.domain).clone(),
                resolution,
            },
            values: p.values,
        }
    }
}

impl TryFrom<PotentialJson> for Potential {
    type Error = Error;
    fn try_from(j: PotentialJson) -> Result<Potential> {
        let grid = Arc::new(Arc::new(j.grid.domain).build_grid(j.grid.resolution)?);
        Potential::new(grid, j.values)
    }
}

/// Equivalence class of potentials modulo constants: the representative has
/// quadrature mean zero against the reference measure.
#[derive(Clone, Debug)]
pub struct PotentialClass {
    potential: Potential,
}

impl PotentialClass {
    pub fn representative(&self) -> &Potential {
        &self.potential
    }
}

impl Potential {
    pub fn new(grid: Arc<Grid>, values: Vec<f64>) -> Result<Potential> {
        if values.len() != grid.len() {
            return Err(Error::DomainMismatch(format!(
                "potential has {} values on a grid of {} nodes",
                values.len(),
                grid.len()
            )));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::input("potential values must be finite"));
        }
        Ok(Potential {
            grid,
            values,
            c_convex_verified: false,
        })
    }

    pub fn from_fn(grid: Arc<Grid>, f: impl Fn(Point) -> f64) -> Result<Potential> {
        let values = (0..grid.len()).map(|i| f(grid.point(i))).collect();
        Potential::new(grid, values)
    }

    /// Max Lipschitz violation `|phi_i - phi_j| - D d(i,j)` over node pairs,
    /// subsampled with the given stride (>= 1). Nonpositive means the values
    /// are D-Lipschitz on the checked pairs.
    pub fn lipschitz_excess(&self, stride: usize) -> f64 {
        let d = self.grid.domain.diameter();
        let n = self.grid.len();
        let stride = stride.max(1);
        let mut worst = f64::NEG_INFINITY;
        let mut i = 0;
        while i < n {
            let mut j = i + 1;
            while j < n {
                let gap = (self.values[i] - self.values[j]).abs();
                worst = worst.max(gap - d * self.grid.node_distance(i, j));
                j += stride;
            }
            i += stride;
        }
        worst
    }

    /// Random D-Lipschitz potential: the lower McShane envelope
    /// `min_k [v_k + D d(x, s_k)]` of a few random seeds, which is
    /// D-Lipschitz by construction on every domain.
    pub fn random_lipschitz(grid: Arc<Grid>, rng: &mut impl Rng, seeds: usize) -> Potential {
        let d = grid.domain.diameter();
        let n = grid.len();
        let k = seeds.max(1);
        let anchors: Vec<(usize, f64)> = (0..k)
            .map(|_| (rng.random_range(0..n), rng.random_range(0.0..d)))
            .collect();
        let values = (0..n)
            .map(|i| {
                anchors
                    .iter()
                    .map(|&(s, v)| v + d * grid.node_distance(i, s))
                    .fold(f64::INFINITY, f64::min)
            })
            .collect();
        Potential {
            grid,
            values,
            c_convex_verified: false,
        }
    }
}

/// The sup-norm bound `2*D*eps` on the error of one discrete c-transform
/// relative to the exact transform of a D-Lipschitz potential.
pub fn discretization_floor(grid: &Grid) -> f64 {
    2.0 * grid.domain.diameter() * grid.epsilon
}

/// Discrete c-transform: `phi^c(x_j) = -min_i [d(x_j, y_i)^2 / 2 + phi_i]`,
/// ties broken toward the lowest node index.
pub fn c_transform(phi: &Potential) -> Potential {
    let grid = &phi.grid;
    let values = match (&grid.domain.kind, grid_coords(grid)) {
        (DomainKind::Interval, Some(xs)) => c_transform_fast_1d(xs, &phi.values),
        _ => c_transform_scan(grid, &phi.values),
    };
    Potential {
        grid: phi.grid.clone(),
        values,
        c_convex_verified: false,
    }
}

fn grid_coords(grid: &Grid) -> Option<&[f64]> {
    match &grid.nodes {
        crate::domain::GridNodes::Line(v) => Some(v),
        _ => None,
    }
}

/// Reference brute-force scan, all domains.
pub fn c_transform_scan(grid: &Grid, phi: &[f64]) -> Vec<f64> {
    let n = grid.len();
    let mut out = Vec::with_capacity(n);
    match &grid.nodes {
        crate::domain::GridNodes::Line(xs) | crate::domain::GridNodes::Ring(xs) => {
            let circle = grid.domain.kind == DomainKind::Circle;
            for j in 0..n {
                let xj = xs[j];
                let mut best = f64::INFINITY;
                for i in 0..n {
                    let d = if circle {
                        crate::domain::circle_distance(xj, xs[i])
                    } else {
                        (xj - xs[i]).abs()
                    };
                    let v = 0.5 * d * d + phi[i];
                    if v < best {
                        best = v;
                    }
                }
                out.push(-best);
            }
        }
        crate::domain::GridNodes::Lattice { cells, .. } => {
            for j in 0..n {
                let xj = cells[j].center;
                let mut best = f64::INFINITY;
                for (i, c) in cells.iter().enumerate() {
                    let v = 0.5 * geometry::dist2(xj, c.center) + phi[i];
                    if v < best {
                        best = v;
                    }
                }
                out.push(-best);
            }
        }
    }
    out
}

/// Monotone-argmin divide and conquer for interval grids. The cost matrix
/// `d(x_j, y_i)^2/2 + phi_i` is strictly Monge for sorted nodes, so leftmost
/// argmins are nondecreasing in `j` and each row's minimum can be searched
/// inside the bracket set by neighboring rows.
pub fn c_transform_fast_1d(xs: &[f64], phi: &[f64]) -> Vec<f64> {
    let n = xs.len();
    let mut out = vec![0.0; n];
    fn rec(xs: &[f64], phi: &[f64], out: &mut [f64], lo: usize, hi: usize, alo: usize, ahi: usize) {
        if lo >= hi {
            return;
        }
        let mid = (lo + hi) / 2;
        let mut best = f64::INFINITY;
        let mut arg = alo;
        for i in alo..=ahi {
            let d = xs[mid] - xs[i];
            let v = 0.5 * d * d + phi[i];
            if v < best {
                best = v;
                arg = i;
            }
        }
        out[mid] = -best;
        rec(xs, phi, out, lo, mid, alo, arg);
        rec(xs, phi, out, mid + 1, hi, arg, ahi);
    }
    rec(xs, phi, &mut out, 0, n, 0, n - 1);
    out
}

/// `phi^cc = phi` test at tolerance `tol`, which must sit at or above the
/// double-transform discretization floor `4*D*eps`.
pub fn is_c_convex(phi: &Potential, tol: f64) -> Result<bool> {
    let floor = 2.0 * discretization_floor(&phi.grid);
    if tol < floor {
        return Err(Error::config(format!(
            "tolerance {tol:e} below the discretization floor {floor:e}"
        )));
    }
    let cc = c_transform(&c_transform(phi));
    let gap = sup_gap(&cc.values, &phi.values);
    Ok(gap <= tol)
}

pub fn sup_gap(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

/// Quadrature-mean normalization: subtracts `int phi dm`. Values already
/// centered within `1e-14 * scale` are returned unchanged, which makes the
/// operation idempotent.
pub fn normalize_class(phi: &Potential) -> PotentialClass {
    let mean: f64 = phi
        .values
        .iter()
        .zip(phi.grid.weights())
        .map(|(v, w)| v * w)
        .sum();
    let scale = phi
        .values
        .iter()
        .fold(1.0_f64, |acc, v| acc.max(v.abs()));
    if mean.abs() <= 1e-14 * scale {
        return PotentialClass {
            potential: phi.clone(),
        };
    }
    let mut out = phi.clone();
    for v in &mut out.values {
        *v -= mean;
    }
    PotentialClass { potential: out }
}

/// Adds (`sign = +1`) or subtracts (`sign = -1`) `|x|^2 / 2` nodewise.
/// Euclidean domains only: the quadratic-shift trick has no circle analogue.
pub fn shift_quadratic(phi: &Potential, sign: i8) -> Result<Potential> {
    if phi.grid.domain.kind == DomainKind::Circle {
        return Err(Error::UnsupportedDomain(
            "quadratic shift needs a Euclidean domain".into(),
        ));
    }
    let s = if sign >= 0 { 1.0 } else { -1.0 };
    let mut out = phi.clone();
    for i in 0..out.values.len() {
        let c = phi.grid.point(i).coords();
        out.values[i] += s * 0.5 * (c[0] * c[0] + c[1] * c[1]);
    }
    out.c_convex_verified = false;
    Ok(out)
}

/// Discrete Legendre-Fenchel transform `psi(y_j) = max_i [<x_i, y_j> - phi_i]`
/// over grid nodes, with the per-node argmax index (the evaluation of the
/// gradient map). Euclidean domains only.
pub fn legendre_fenchel(phi: &Potential) -> Result<(Potential, Vec<usize>)> {
    let grid = &phi.grid;
    if grid.domain.kind == DomainKind::Circle {
        return Err(Error::UnsupportedDomain(
            "Legendre-Fenchel transform needs a Euclidean domain".into(),
        ));
    }
    let n = grid.len();
    let pts: Vec<[f64; 2]> = (0..n).map(|i| grid.point(i).coords()).collect();
    let mut vals = Vec::with_capacity(n);
    let mut args = Vec::with_capacity(n);
    for j in 0..n {
        let y = pts[j];
        let mut best = f64::NEG_INFINITY;
        let mut arg = 0usize;
        for (i, x) in pts.iter().enumerate() {
            let v = geometry::dot(*x, y) - phi.values[i];
            if v > best {
                best = v;
                arg = i;
            }
        }
        vals.push(best);
        args.push(arg);
    }
    Ok((
        Potential {
            grid: phi.grid.clone(),
            values: vals,
            c_convex_verified: false,
        },
        args,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::Domain;
    use rand::SeedableRng;
    use rand_chacha::ChaCha12Rng;

    fn igrid(n: usize) -> Arc<Grid> {
        Arc::new(Arc::new(Domain::interval()).build_grid(n).unwrap())
    }

    fn cgrid(n: usize) -> Arc<Grid> {
        Arc::new(Arc::new(Domain::circle()).build_grid(n).unwrap())
    }

    #[test]
    fn zero_potential_is_fixed() {
        for g in [igrid(64), cgrid(64)] {
            let phi = Potential::new(g.clone(), vec![0.0; g.len()]).unwrap();
            let c = c_transform(&phi);
            assert!(sup_gap(&c.values, &phi.values) == 0.0);
            // A constant potential conjugates to its negative.
            let lam = 0.7;
            let konst = Potential::new(g.clone(), vec![lam; g.len()]).unwrap();
            let ck = c_transform(&konst);
            assert!(ck.values.iter().all(|&v| (v + lam).abs() < 1e-15));
        }
    }

    #[test]
    fn potential_json_round_trip() {
        let g = igrid(9);
        let phi = Potential::from_fn(g, |p| p.coord() * 0.25).unwrap();
        let text = serde_json::to_string(&phi).unwrap();
        assert!(text.contains("\"grid\"") && text.contains("\"values\""));
        let back: Potential = serde_json::from_str(&text).unwrap();
        assert_eq!(back.values, phi.values);
        assert_eq!(back.grid.len(), phi.grid.len());
    }

    #[test]
    fn constant_shift_flips_sign() {
        let g = igrid(128);
        let mut rng = ChaCha12Rng::seed_from_u64(7);
        let psi = Potential::random_lipschitz(g.clone(), &mut rng, 6);
        let phi = c_transform(&psi);
        let lam = 0.37;
        let shifted = Potential::new(
            g,
            phi.values.iter().map(|v| v + lam).collect(),
        )
        .unwrap();
        let a = c_transform(&shifted);
        let b = c_transform(&phi);
        let gap = a
            .values
            .iter()
            .zip(&b.values)
            .map(|(x, y)| (x - (y - lam)).abs())
            .fold(0.0, f64::max);
        assert!(gap <= 1e-12, "C(phi+l) != C(phi)-l up to roundoff: {gap}");
    }

    #[test]
    fn order_reversal() {
        let g = igrid(96);
        let mut rng = ChaCha12Rng::seed_from_u64(11);
        let a = Potential::random_lipschitz(g.clone(), &mut rng, 5);
        let b = Potential::new(
            g,
            a.values.iter().map(|v| v + 0.123).collect(),
        )
        .unwrap();
        // a <= b nodewise, so C(a) >= C(b) nodewise.
        let ca = c_transform(&a);
        let cb = c_transform(&b);
        assert!(ca.values.iter().zip(&cb.values).all(|(x, y)| x >= y));
    }

    #[test]
    fn involution_bound_on_conjugates() {
        for g in [igrid(200), cgrid(200)] {
            let floor2 = 2.0 * discretization_floor(&g);
            let mut rng = ChaCha12Rng::seed_from_u64(3);
            for _ in 0..20 {
                let psi = Potential::random_lipschitz(g.clone(), &mut rng, 8);
                let phi = c_transform(&psi);
                let cc = c_transform(&c_transform(&phi));
                let gap = sup_gap(&cc.values, &phi.values);
                assert!(gap <= floor2, "involution gap {gap} > {floor2}");
            }
        }
    }

    #[test]
    fn transform_output_is_lipschitz() {
        let g = cgrid(150);
        let mut rng = ChaCha12Rng::seed_from_u64(5);
        let psi = Potential::random_lipschitz(g.clone(), &mut rng, 4);
        let phi = c_transform(&psi);
        // Adjacent-pair Lipschitz check with stride 1.
        assert!(phi.lipschitz_excess(1) <= 1e-12);
    }

    #[test]
    fn fast_path_matches_scan_bitwise() {
        for n in [17, 128, 1031, 2048] {
            let g = igrid(n);
            let mut rng = ChaCha12Rng::seed_from_u64(n as u64);
            let psi = Potential::random_lipschitz(g.clone(), &mut rng, 9);
            let fast = c_transform_fast_1d(g.coords_1d(), &psi.values);
            let scan = c_transform_scan(&g, &psi.values);
            assert_eq!(fast, scan, "fast/scan mismatch at n={n}");
        }
    }

    #[test]
    fn is_c_convex_flags() {
        let g = igrid(500);
        let phi0 = Potential::new(g.clone(), vec![0.0; g.len()]).unwrap();
        let tol = 2.0 * discretization_floor(&g);
        assert!(is_c_convex(&phi0, tol).unwrap());
        // Any conjugate is c-convex.
        let mut rng = ChaCha12Rng::seed_from_u64(19);
        let psi = Potential::random_lipschitz(g.clone(), &mut rng, 7);
        let phi = c_transform(&psi);
        assert!(is_c_convex(&phi, tol).unwrap());
        // -10 x^2 is neither Lipschitz-D nor c-convex.
        let bad = Potential::from_fn(g.clone(), |p| -10.0 * p.coord() * p.coord()).unwrap();
        assert!(!is_c_convex(&bad, tol).unwrap());
        // Tolerance below the floor is a configuration error.
        assert!(is_c_convex(&phi0, 0.1 * tol).is_err());
    }

    #[test]
    fn normalize_class_examples() {
        let g = igrid(101);
        let five = Potential::new(g.clone(), vec![5.0; g.len()]).unwrap();
        let cls = normalize_class(&five);
        assert!(cls.representative().values.iter().all(|v| v.abs() < 1e-12));
        let lin = Potential::from_fn(g.clone(), |p| p.coord()).unwrap();
        let cls = normalize_class(&lin);
        let vals = &cls.representative().values;
        let xs = g.coords_1d();
        for (v, x) in vals.iter().zip(xs) {
            assert!((v - (x - 0.5)).abs() < 1e-10);
        }
        // Exact idempotence.
        let once = normalize_class(&lin);
        let twice = normalize_class(once.representative());
        assert_eq!(once.representative().values, twice.representative().values);
    }

    #[test]
    fn shift_quadratic_round_trip() {
        let g = igrid(64);
        let mut rng = ChaCha12Rng::seed_from_u64(23);
        let phi = Potential::random_lipschitz(g.clone(), &mut rng, 5);
        let there = shift_quadratic(&phi, 1).unwrap();
        let back = shift_quadratic(&there, -1).unwrap();
        let gap = sup_gap(&back.values, &phi.values);
        assert!(gap <= 1e-15, "round trip gap {gap}");
        // phi = -x^2/2 shifted up is 0.
        let neg = Potential::from_fn(g.clone(), |p| -0.5 * p.coord() * p.coord()).unwrap();
        let z = shift_quadratic(&neg, 1).unwrap();
        assert!(z.values.iter().all(|v| v.abs() < 1e-15));
        // Circle is unsupported.
        let c = cgrid(16);
        let pc = Potential::new(c.clone(), vec![0.0; c.len()]).unwrap();
        assert!(shift_quadratic(&pc, 1).is_err());
    }

    #[test]
    fn legendre_fenchel_self_dual_quadratic() {
        let g = igrid(512);
        let phi1 = Potential::from_fn(g.clone(), |p| 0.5 * p.coord() * p.coord()).unwrap();
        let (psi1, _) = legendre_fenchel(&phi1).unwrap();
        let xs = g.coords_1d();
        let d = g.domain.diameter();
        for (j, (&x, v)) in xs.iter().zip(&psi1.values).enumerate() {
            // Interior nodes: the sup over x in [0,1] of xy - x^2/2 is y^2/2.
            if j == 0 || j == xs.len() - 1 {
                continue;
            }
            assert!(
                (v - 0.5 * x * x).abs() <= g.epsilon * d,
                "self-duality violated at {x}"
            );
        }
    }

    #[test]
    fn legendre_fenchel_max_of_two_lines() {
        // phi1(x) = max(0.25 x, 0.75 x - 0.25): slopes cross at x* = 0.5.
        let g = igrid(2001);
        let phi1 =
            Potential::from_fn(g.clone(), |p| (0.25 * p.coord()).max(0.75 * p.coord() - 0.25))
                .unwrap();
        let (psi1, args) = legendre_fenchel(&phi1).unwrap();
        let xs = g.coords_1d();
        // Hand oracle: sup over the kink candidates {0, 0.5, 1}.
        let oracle = |y: f64| {
            let f = |x: f64| x * y - (0.25 * x).max(0.75 * x - 0.25);
            f(0.0).max(f(0.5)).max(f(1.0))
        };
        for (j, &y) in xs.iter().enumerate() {
            assert!(
                (psi1.values[j] - oracle(y)).abs() <= 1e-9,
                "LF mismatch at y={y}"
            );
        }
        // The argmax tracks the subgradient: near x*=0.5 for y in (0.25, 0.75).
        let j_mid = xs.iter().position(|&y| (y - 0.5).abs() < 1e-9).unwrap();
        assert!((xs[args[j_mid]] - 0.5).abs() <= 1e-3);
    }

    #[test]
    fn legendre_fenchel_zero_on_square() {
        let g = Arc::new(Arc::new(Domain::unit_square()).build_grid(24).unwrap());
        let phi1 = Potential::new(g.clone(), vec![0.0; g.len()]).unwrap();
        let (psi1, _) = legendre_fenchel(&phi1).unwrap();
        let corners = [[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]];
        let d = g.domain.diameter();
        for i in 0..g.len() {
            let y = g.point(i).coords();
            let want = corners
                .iter()
                .map(|c| geometry::dot(*c, y))
                .fold(f64::NEG_INFINITY, f64::max);
            assert!(
                (psi1.values[i] - want).abs() <= g.epsilon * d,
                "corner LP mismatch"
            );
        }
    }

    #[test]
    fn euclidean_consistency_of_the_two_routes() {
        // On the interval: C(phi) = LF(phi + q) - q nodewise, where q = x^2/2.
        let g = igrid(301);
        let mut rng = ChaCha12Rng::seed_from_u64(29);
        let psi = Potential::random_lipschitz(g.clone(), &mut rng, 6);
        let phi = c_transform(&psi);
        let via_lf = {
            let shifted = shift_quadratic(&phi, 1).unwrap();
            let (lf, _) = legendre_fenchel(&shifted).unwrap();
            shift_quadratic(&lf, -1).unwrap()
        };
        let direct = c_transform(&phi);
        let gap = sup_gap(&via_lf.values, &direct.values);
        assert!(gap <= 1e-10, "dual routes disagree by {gap}");
    }

    #[test]
    fn circle_cap_potential_conjugate() {
        // phi(x) = ((1/2)^2 - d(0,x)^2) / 2 on the circle conjugates to
        // -d(1/2, y)^2 / 2 up to a constant (the antipodal cap).
        let n = 512;
        let g = cgrid(n);
        let phi = Potential::from_fn(g.clone(), |p| {
            let d = crate::domain::circle_distance(0.0, p.coord());
            0.5 * (0.25 - d * d)
        })
        .unwrap();
        let conj = c_transform(&phi);
        let floor = discretization_floor(&g);
        // Fit the constant and compare nodewise.
        let xs = g.coords_1d();
        let target: Vec<f64> = xs
            .iter()
            .map(|&y| {
                let d = crate::domain::circle_distance(0.5, y);
                -0.5 * d * d
            })
            .collect();
        let c0: f64 = conj
            .values
            .iter()
            .zip(&target)
            .map(|(a, t)| a - t)
            .sum::<f64>()
            / n as f64;
        for (a, t) in conj.values.iter().zip(&target) {
            assert!(
                (a - t - c0).abs() <= floor,
                "cap conjugate off by {} > {floor}",
                (a - t - c0).abs()
            );
        }
        // Doubled-resolution brute force as the oracle for the same nodes.
        let g2 = cgrid(2 * n);
        let phi2 = Potential::from_fn(g2.clone(), |p| {
            let d = crate::domain::circle_distance(0.0, p.coord());
            0.5 * (0.25 - d * d)
        })
        .unwrap();
        let conj2 = c_transform_scan(&g2, &phi2.values);
        for j in 0..n {
            assert!(
                (conj.values[j] - conj2[2 * j]).abs() <= floor + discretization_floor(&g2),
                "doubled-resolution oracle disagrees at node {j}"
            );
        }
    }
}
