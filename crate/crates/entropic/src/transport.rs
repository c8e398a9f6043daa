//! 1D transport: distribution functions, right inverses, conjugate measures
//! and monotone transport maps.
//!
//! On 1D domains the whole pipeline is closed-form. A measure becomes a
//! [`MonotoneGraph`] (its CDF on the lift to `[0,1]`); the conjugate measure
//! with uniform reference is the reflected graph; a non-uniform reference
//! measure enters through exact compositions with its strictly increasing
//! CDF. Circle positions live on the lift with base point 0 and are wrapped
//! mod 1 when atoms are extracted.
//!
//! A single reference measure is used on both sides of the conjugation; the
//! two-reference variant (conjugating from `m_1` into `m_2`) is not
//! implemented.

use crate::domain::{wrap_unit, DomainKind, Grid, Point, Sigma};
use crate::measure::Measure;
use crate::monotone::{compose_continuous_outer, MonotoneGraph};
use crate::semidiscrete::Tessellation;
use crate::{Error, Result};
use std::sync::Arc;

/// CDF graph of the reference measure `m` on a 1D grid. Uniform sigma gives
/// the identity; grid sigma gives the piecewise-linear CDF of the
/// cell-constant density.
pub fn reference_cdf(grid: &Grid) -> Result<MonotoneGraph> {
    if !grid.domain.is_one_dimensional() {
        return Err(Error::UnsupportedDomain("1D reference CDF on a 2D grid".into()));
    }
    match &grid.domain.sigma {
        Sigma::Uniform => Ok(MonotoneGraph::identity()),
        Sigma::Grid { .. } => {
            // The density of m with respect to itself is 1; the sigma factor
            // enters inside the slab conversion.
            let ones = vec![1.0; grid.len()];
            let slabs = density_values_to_slabs(grid, &ones)?;
            MonotoneGraph::from_parts(&[], &slabs, 1e-6)
        }
    }
}

/// Converts per-node density values (with respect to `m`) into uniform slabs
/// per grid cell, trapezoid-consistent on the interval and cell-constant on
/// the circle. The slab masses are normalized to sum 1.
fn density_values_to_slabs(grid: &Grid, values: &[f64]) -> Result<Vec<(f64, f64, f64)>> {
    let xs = grid.coords_1d();
    let n = xs.len();
    if values.len() != n {
        return Err(Error::DomainMismatch("density/grid size mismatch".into()));
    }
    let sigma_at = |i: usize| -> f64 {
        match &grid.domain.sigma {
            Sigma::Uniform => 1.0,
            Sigma::Grid { values } => values[i],
        }
    };
    let mut slabs = Vec::with_capacity(n);
    let mut total = 0.0;
    match grid.domain.kind {
        DomainKind::Interval => {
            for i in 0..n - 1 {
                let a = xs[i];
                let b = xs[i + 1];
                let mass = 0.5 * (values[i] * sigma_at(i) + values[i + 1] * sigma_at(i + 1))
                    * (b - a);
                if mass > 0.0 {
                    slabs.push((a, b, mass));
                    total += mass;
                }
            }
        }
        DomainKind::Circle => {
            let h = 1.0 / n as f64;
            for i in 0..n {
                let a = xs[i];
                let mass = values[i] * sigma_at(i) * h;
                if mass > 0.0 {
                    slabs.push((a, a + h, mass));
                    total += mass;
                }
            }
        }
        DomainKind::Polygon => unreachable!(),
    }
    if total <= 0.0 {
        return Err(Error::DegenerateMeasure("density carries no mass".into()));
    }
    for s in &mut slabs {
        s.2 /= total;
    }
    Ok(slabs)
}

/// CDF graph (on the lift) of any 1D measure against the grid's reference
/// measure. This is the `mu -> f` leg of the bijection chain.
pub fn measure_cdf(grid: &Grid, mu: &Measure) -> Result<MonotoneGraph> {
    if !grid.domain.is_one_dimensional() {
        return Err(Error::UnsupportedDomain("CDF of a 2D measure".into()));
    }
    match mu {
        Measure::Discrete { atoms } => {
            let pts: Vec<(f64, f64)> = atoms.iter().map(|(p, w)| (p.coord(), *w)).collect();
            MonotoneGraph::from_atoms(&pts, 1e-9)
        }
        Measure::Empirical { points } => {
            let w = 1.0 / points.len() as f64;
            let mut pts: Vec<(f64, f64)> = points
                .iter()
                .map(|p| {
                    let x = p.coord();
                    let x = if grid.domain.kind == DomainKind::Circle {
                        wrap_unit(x)
                    } else {
                        x
                    };
                    (x, w)
                })
                .collect();
            pts.sort_by(|a, b| a.0.total_cmp(&b.0));
            MonotoneGraph::from_atoms(&pts, 1e-9)
        }
        Measure::GridDensity { values } => {
            let slabs = density_values_to_slabs(grid, values)?;
            MonotoneGraph::from_parts(&[], &slabs, 1e-6)
        }
        Measure::Piecewise { atoms, slabs } => MonotoneGraph::from_parts(atoms, slabs, 1e-9),
    }
}

/// Right-continuous distribution function `f(x) = mu([0, x])` of a 1D
/// measure (the lift is used on the circle).
pub fn cdf_1d(grid: &Grid, mu: &Measure) -> Result<MonotoneGraph> {
    measure_cdf(grid, mu)
}

/// The right inverse `g(y) = inf{x >= 0 : f(x) >= y}` of a nondecreasing
/// `f` with `f(1) = 1`, as a completed graph (flats and jumps swap).
pub fn right_inverse_1d(f: &MonotoneGraph) -> MonotoneGraph {
    f.reflect()
}

/// Extracts a [`Measure`] from a conjugate CDF graph: discrete when purely
/// atomic, piecewise otherwise. Circle atoms are wrapped mod 1.
fn graph_to_measure(kind: DomainKind, graph: &MonotoneGraph) -> Measure {
    let mut atoms = graph.atoms();
    if kind == DomainKind::Circle {
        // Mass at the lift endpoint 1 is the base point 0 on the circle.
        if let Some(pos) = atoms.iter().position(|&(x, _)| x >= 1.0 - 1e-15) {
            let (_, w) = atoms.remove(pos);
            match atoms.iter_mut().find(|(x, _)| *x <= 1e-15) {
                Some((_, w0)) => *w0 += w,
                None => atoms.insert(0, (0.0, w)),
            }
        }
    }
    let slabs: Vec<(f64, f64, f64)> = graph
        .density_pieces()
        .into_iter()
        .map(|(a, b, d)| (a, b, d * (b - a)))
        .collect();
    if slabs.is_empty() {
        Measure::Discrete {
            atoms: atoms.into_iter().map(|(x, w)| (Point::One(x), w)).collect(),
        }
    } else {
        Measure::Piecewise { atoms, slabs }
    }
}

/// Conjugate measure on a 1D domain. Exact for every measure representation:
/// with uniform `m` the conjugate CDF is the reflected CDF; a non-uniform
/// reference with strictly positive density enters through compositions with
/// its CDF and quantile maps.
pub fn conjugate_measure_1d(grid: &Grid, mu: &Measure) -> Result<Measure> {
    let conj = conjugate_cdf_1d(grid, mu)?;
    Ok(graph_to_measure(grid.domain.kind, &conj))
}

/// CDF graph of the conjugate measure.
pub fn conjugate_cdf_1d(grid: &Grid, mu: &Measure) -> Result<MonotoneGraph> {
    let f_mu = measure_cdf(grid, mu)?;
    if grid.domain.sigma.is_uniform() {
        return Ok(f_mu.reflect());
    }
    let f_m = reference_cdf(grid)?;
    let q_m = f_m.reflect();
    if !q_m.is_continuous() {
        return Err(Error::precondition(
            "reference density must be strictly positive for conjugation",
        ));
    }
    // g_conj = Q_m o F_mu is the generalized inverse of the Brenier map;
    // F_nu(t) = F_m(sup{x : g_conj(x) <= t}).
    let g_conj = compose_continuous_outer(&q_m, &f_mu)?;
    compose_continuous_outer(&f_m, &g_conj.reflect())
}

/// Density of a graph's measure at a point, from its sloped pieces (0 on
/// flats, not defined at atoms — callers avoid atom positions).
pub fn density_at(pieces: &[(f64, f64, f64)], t: f64) -> f64 {
    // Binary search over sorted pieces.
    let mut lo = 0usize;
    let mut hi = pieces.len();
    while lo < hi {
        let mid = (lo + hi) / 2;
        if pieces[mid].1 < t {
            lo = mid + 1;
        } else {
            hi = mid;
        }
    }
    if lo < pieces.len() && t >= pieces[lo].0 - 1e-15 && t <= pieces[lo].1 + 1e-15 {
        pieces[lo].2
    } else {
        0.0
    }
}

/// Max-norm residual of the reciprocity identity
/// `eta(x) rho(f(x)) = rho(x) eta(g(x)) = 1` over interior grid nodes, for a
/// grid density `eta > 0` on a 1D domain with uniform reference measure.
pub fn density_reciprocity_check(grid: &Grid, mu: &Measure) -> Result<f64> {
    let values = match mu {
        Measure::GridDensity { values } => values,
        _ => {
            return Err(Error::precondition(
                "reciprocity check needs a grid density",
            ))
        }
    };
    if values.iter().any(|&v| v <= 0.0) {
        return Err(Error::precondition("density must be bounded away from 0"));
    }
    if !grid.domain.sigma.is_uniform() {
        return Err(Error::UnsupportedDomain(
            "reciprocity residual is computed against a uniform reference".into(),
        ));
    }
    let xs = grid.coords_1d();
    let f = measure_cdf(grid, mu)?; // f = F_mu, the conjugate map m -> mu^c
    let g = f.reflect(); // g = Q_mu, the Brenier map m -> mu
    let conj = &g; // CDF of mu^c equals the reflected CDF
    let pieces = conj.density_pieces();
    let eta_at = |t: f64| -> f64 {
        // Linear interpolation of the node values.
        let n = xs.len();
        let t = t.clamp(xs[0], xs[n - 1]);
        let mut lo = 0usize;
        let mut hi = n - 1;
        while hi - lo > 1 {
            let mid = (lo + hi) / 2;
            if xs[mid] <= t {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let s = (t - xs[lo]) / (xs[hi] - xs[lo]);
        values[lo] * (1.0 - s) + values[hi] * s
    };
    let mut worst = 0.0_f64;
    for (i, &x) in xs.iter().enumerate() {
        if i == 0 || i == xs.len() - 1 {
            continue;
        }
        let r1 = values[i] * density_at(&pieces, f.eval(x)) - 1.0;
        let r2 = density_at(&pieces, x) * eta_at(g.eval(x)) - 1.0;
        worst = worst.max(r1.abs()).max(r2.abs());
    }
    Ok(worst)
}

// ---------------------------------------------------------------------------
// Transport maps
// ---------------------------------------------------------------------------

/// A monotone transport map.
#[derive(Clone, Debug)]
pub enum TransportMap {
    /// Monotone node values on a 1D grid, read as a step map (each node
    /// carries its reference quadrature weight).
    Grid1D { grid: Arc<Grid>, values: Vec<f64> },
    /// Piecewise-constant map of a Laguerre tessellation: cell `i` to site
    /// `i`.
    LaguerreAssign { tess: Tessellation },
    /// Per-node target points from a Legendre-Fenchel argmax.
    GridArgmax {
        grid: Arc<Grid>,
        targets: Vec<Point>,
    },
}

impl TransportMap {
    /// Map from a Legendre-Fenchel argmax: node `i` is sent to the grid node
    /// maximizing the dual objective (the gradient of the transform).
    pub fn from_lf_argmax(grid: Arc<Grid>, argmax: Vec<usize>) -> Result<TransportMap> {
        if argmax.len() != grid.len() {
            return Err(Error::DomainMismatch("argmax/grid size mismatch".into()));
        }
        if let Some(&bad) = argmax.iter().find(|&&i| i >= grid.len()) {
            return Err(Error::input(format!("argmax index {bad} out of range")));
        }
        let targets = argmax.iter().map(|&i| grid.point(i)).collect();
        Ok(TransportMap::GridArgmax { grid, targets })
    }

    /// Monotone 1D grid map. Interval maps must be nondecreasing with values
    /// in `[0,1]`; circle maps are given by a nondecreasing lift with total
    /// increment at most 1.
    pub fn grid_1d(grid: Arc<Grid>, values: Vec<f64>) -> Result<TransportMap> {
        if values.len() != grid.len() {
            return Err(Error::DomainMismatch("map/grid size mismatch".into()));
        }
        if values.windows(2).any(|w| w[1] < w[0]) {
            return Err(Error::input("1D transport map must be nondecreasing"));
        }
        match grid.domain.kind {
            DomainKind::Interval => {
                if values.iter().any(|&v| !(0.0..=1.0).contains(&v)) {
                    return Err(Error::input("map values must lie in [0,1]"));
                }
            }
            DomainKind::Circle => {
                let inc = values.last().unwrap() - values.first().unwrap();
                if inc > 1.0 + 1e-12 {
                    return Err(Error::input(
                        "circle map lift must have total increment <= 1",
                    ));
                }
            }
            DomainKind::Polygon => {
                return Err(Error::UnsupportedDomain("Grid1D map on a polygon".into()))
            }
        }
        Ok(TransportMap::Grid1D { grid, values })
    }

    /// Pushforward `g_* m` of the reference measure through the map.
    pub fn pushforward(&self) -> Result<Measure> {
        match self {
            TransportMap::Grid1D { grid, values } => {
                let mut atoms: Vec<(f64, f64)> = values
                    .iter()
                    .zip(grid.weights())
                    .map(|(&v, &w)| {
                        let x = if grid.domain.kind == DomainKind::Circle {
                            wrap_unit(v)
                        } else {
                            v
                        };
                        (x, w)
                    })
                    .collect();
                atoms.sort_by(|a, b| a.0.total_cmp(&b.0));
                let mut merged: Vec<(f64, f64)> = Vec::with_capacity(atoms.len());
                for (x, w) in atoms {
                    match merged.last_mut() {
                        Some((px, pw)) if (x - *px).abs() <= 1e-15 => *pw += w,
                        _ => merged.push((x, w)),
                    }
                }
                Ok(Measure::Discrete {
                    atoms: merged
                        .into_iter()
                        .map(|(x, w)| (Point::One(x), w))
                        .collect(),
                })
            }
            TransportMap::LaguerreAssign { tess } => Ok(Measure::Discrete {
                atoms: tess
                    .sites
                    .iter()
                    .zip(&tess.masses)
                    .filter(|(_, &m)| m > 0.0)
                    .map(|(&z, &m)| (Point::Two(z), m))
                    .collect(),
            }),
            TransportMap::GridArgmax { grid, targets } => Ok(Measure::Discrete {
                atoms: targets
                    .iter()
                    .zip(grid.weights())
                    .map(|(&p, &w)| (p, w))
                    .collect(),
            }),
        }
    }

    /// Conjugate (generalized inverse) of a 1D grid map, as a CDF-style
    /// graph of the map's lift.
    pub fn conjugate_graph_1d(&self) -> Result<MonotoneGraph> {
        match self {
            TransportMap::Grid1D { .. } => Ok(self.map_graph_1d()?.reflect()),
            _ => Err(Error::UnsupportedDomain("1D conjugate of a 2D map".into())),
        }
    }

    /// The step graph of a 1D map (x-axis: domain positions weighted by `m`,
    /// read through the uniform reparametrization).
    pub fn map_graph_1d(&self) -> Result<MonotoneGraph> {
        match self {
            TransportMap::Grid1D { grid, values } => {
                // Step map: node i's value over its m-mass interval.
                let w = grid.weights();
                let mut verts = Vec::with_capacity(2 * values.len());
                let mut u = 0.0;
                for (i, &v) in values.iter().enumerate() {
                    verts.push([u, v]);
                    u += w[i];
                    verts.push([u, v]);
                }
                Ok(MonotoneGraph::from_vertices(verts))
            }
            _ => Err(Error::UnsupportedDomain("not a 1D grid map".into())),
        }
    }

    /// CSV dump `node,image` for 1D maps.
    pub fn to_csv(&self) -> Result<String> {
        match self {
            TransportMap::Grid1D { grid, values } => {
                let mut out = String::from("node,image\n");
                for (x, v) in grid.coords_1d().iter().zip(values) {
                    out.push_str(&format!("{x},{v}\n"));
                }
                Ok(out)
            }
            _ => Err(Error::UnsupportedDomain("CSV dump is 1D-only".into())),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::Domain;
    use crate::monotone::l2_sq_between;

    fn igrid(n: usize) -> Grid {
        Arc::new(Domain::interval()).build_grid(n).unwrap()
    }

    fn cgrid(n: usize) -> Grid {
        Arc::new(Domain::circle()).build_grid(n).unwrap()
    }

    fn atoms_of(m: &Measure) -> Vec<(f64, f64)> {
        match m {
            Measure::Discrete { atoms } => atoms.iter().map(|(p, w)| (p.coord(), *w)).collect(),
            Measure::Piecewise { atoms, .. } => atoms.clone(),
            _ => panic!("expected atoms"),
        }
    }

    #[test]
    fn cdf_of_uniform_is_identity() {
        let g = igrid(11);
        let f = cdf_1d(&g, &Measure::uniform()).unwrap();
        assert!((f.eval(0.3) - 0.3).abs() < 1e-15);
        assert!((f.eval(1.0) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn cdf_of_single_atom() {
        let g = igrid(11);
        let d = Domain::interval();
        let mu = Measure::discrete(&d, vec![(Point::One(0.25), 1.0)]).unwrap();
        let f = cdf_1d(&g, &mu).unwrap();
        assert_eq!(f.eval(0.2), 0.0);
        assert_eq!(f.eval(0.25), 1.0);
        assert_eq!(f.eval_left(0.25), 0.0);
    }

    #[test]
    fn right_inverse_round_trip_on_grid() {
        let g = igrid(101);
        let f = |x: f64| x * x;
        let vals: Vec<f64> = g.coords_1d().iter().map(|&x| 2.0 * x).collect();
        // density 2x integrates to x^2: CDF x^2, right inverse sqrt(y).
        let mu = Measure::grid_density_normalized(&g, vals).unwrap();
        let cdf = cdf_1d(&g, &mu).unwrap();
        let inv = right_inverse_1d(&cdf);
        for &y in &[0.09, 0.25, 0.49, 0.81] {
            assert!((inv.eval(y) - y.sqrt()).abs() < 1e-3, "sqrt inverse");
        }
        // double right-inverse reproduces f at continuity points
        let back = right_inverse_1d(&inv);
        for &x in &[0.1, 0.3, 0.7, 0.9] {
            assert!((back.eval(x) - cdf.eval(x)).abs() < 1e-12);
        }
        let _ = f;
    }

    #[test]
    fn right_inverse_of_two_atom_cdf() {
        let g = igrid(11);
        let d = Domain::interval();
        let mu = Measure::discrete(
            &d,
            vec![(Point::One(0.25), 0.5), (Point::One(0.75), 0.5)],
        )
        .unwrap();
        let inv = right_inverse_1d(&cdf_1d(&g, &mu).unwrap());
        assert!((inv.eval(0.3) - 0.25).abs() < 1e-15);
        // inf{x : f(x) >= y} is left-continuous: at the plateau level the
        // lower branch of the completed graph is the inf-inverse value.
        assert!((inv.eval_left(0.5) - 0.25).abs() < 1e-15);
        assert!((inv.eval(0.7) - 0.75).abs() < 1e-15);
    }

    #[test]
    fn interval_fixture_conjugate() {
        let g = igrid(11);
        let d = Domain::interval();
        let mu = Measure::discrete(
            &d,
            vec![(Point::One(0.25), 0.5), (Point::One(0.75), 0.5)],
        )
        .unwrap();
        let conj = conjugate_measure_1d(&g, &mu).unwrap();
        let atoms = atoms_of(&conj);
        assert_eq!(atoms.len(), 3);
        assert!((atoms[0].0 - 0.0).abs() < 1e-12 && (atoms[0].1 - 0.25).abs() < 1e-12);
        assert!((atoms[1].0 - 0.5).abs() < 1e-12 && (atoms[1].1 - 0.5).abs() < 1e-12);
        assert!((atoms[2].0 - 1.0).abs() < 1e-12 && (atoms[2].1 - 0.25).abs() < 1e-12);
        // Involution.
        let back = conjugate_measure_1d(&g, &conj).unwrap();
        let batoms = atoms_of(&back);
        assert_eq!(batoms.len(), 2);
        assert!((batoms[0].0 - 0.25).abs() < 1e-12 && (batoms[0].1 - 0.5).abs() < 1e-12);
        assert!((batoms[1].0 - 0.75).abs() < 1e-12 && (batoms[1].1 - 0.5).abs() < 1e-12);
    }

    #[test]
    fn uniform_is_self_conjugate() {
        let g = igrid(11);
        let conj = conjugate_measure_1d(&g, &Measure::uniform()).unwrap();
        match conj {
            Measure::Piecewise { atoms, slabs } => {
                assert!(atoms.is_empty());
                assert_eq!(slabs.len(), 1);
                assert!((slabs[0].2 - 1.0).abs() < 1e-12);
            }
            _ => panic!("expected piecewise"),
        }
    }

    #[test]
    fn circle_two_atom_example() {
        let g = cgrid(16);
        let d = Domain::circle();
        let mu = Measure::discrete(
            &d,
            vec![(Point::One(0.0), 0.3), (Point::One(0.5), 0.7)],
        )
        .unwrap();
        let conj = conjugate_measure_1d(&g, &mu).unwrap();
        let atoms = atoms_of(&conj);
        // Weights are the x-gaps (0.5, 0.5); positions are the cumulative
        // masses 0.3 and 1 ~ 0 on the circle.
        assert_eq!(atoms.len(), 2);
        assert!((atoms[0].0 - 0.0).abs() < 1e-12 && (atoms[0].1 - 0.5).abs() < 1e-12);
        assert!((atoms[1].0 - 0.3).abs() < 1e-12 && (atoms[1].1 - 0.5).abs() < 1e-12);
    }

    #[test]
    fn circle_atom_plus_uniform_example() {
        // mu = 0.4 delta_0 + 0.6 m: conjugate is uniform density 1/0.6 on the
        // complement of the arc [0, 0.4) adjacent to the base point.
        let g = cgrid(16);
        let mu = Measure::piecewise(vec![(0.0, 0.4)], vec![(0.0, 1.0, 0.6)]).unwrap();
        let conj = conjugate_measure_1d(&g, &mu).unwrap();
        match conj {
            Measure::Piecewise { atoms, slabs } => {
                assert!(atoms.is_empty());
                assert_eq!(slabs.len(), 1);
                let (a, b, m) = slabs[0];
                assert!((a - 0.4).abs() < 1e-12 && (b - 1.0).abs() < 1e-12);
                assert!((m - 1.0).abs() < 1e-12);
                assert!((m / (b - a) - 1.0 / 0.6).abs() < 1e-12);
            }
            _ => panic!("expected piecewise"),
        }
    }

    #[test]
    fn reciprocity_residual_zero_for_uniform() {
        let g = igrid(64);
        let mu = Measure::grid_density(&g, vec![1.0; 64]).unwrap();
        let r = density_reciprocity_check(&g, &mu).unwrap();
        assert!(r < 1e-12, "residual {r}");
    }

    #[test]
    fn reciprocity_residual_first_order_in_h() {
        let f = |x: f64| 2.0 + (2.0 * std::f64::consts::PI * x).sin();
        let run = |n: usize| {
            let g = igrid(n);
            let vals: Vec<f64> = g.coords_1d().iter().map(|&x| f(x)).collect();
            let mu = Measure::grid_density_normalized(&g, vals).unwrap();
            density_reciprocity_check(&g, &mu).unwrap()
        };
        let r1 = run(2048);
        let r2 = run(4096);
        assert!(r1 <= 5e-2, "residual at 2048: {r1}");
        assert!(r2 <= 0.75 * r1, "no first-order decay: {r1} -> {r2}");
    }

    #[test]
    fn reciprocity_piecewise_closed_form() {
        // eta = 1.5 on [0,1/2), 0.5 on [1/2,1]: the conjugate has density
        // 2/3 on [0, 3/4) and 2 on [3/4, 1].
        let g = igrid(9);
        let mu = Measure::piecewise(vec![], vec![(0.0, 0.5, 0.75), (0.5, 1.0, 0.25)]).unwrap();
        let conj = conjugate_cdf_1d(&g, &mu).unwrap();
        let pieces = conj.density_pieces();
        assert_eq!(pieces.len(), 2);
        assert!((pieces[0].0 - 0.0).abs() < 1e-12 && (pieces[0].1 - 0.75).abs() < 1e-12);
        assert!((pieces[0].2 - 1.0 / 1.5).abs() < 1e-12);
        assert!((pieces[1].2 - 2.0).abs() < 1e-12);
    }

    #[test]
    fn reciprocity_rejects_vanishing_density() {
        let g = igrid(8);
        let mut vals = vec![1.0; 8];
        vals[3] = 0.0;
        // Construction itself fails the eta > 0 precondition inside the check.
        let mu = Measure::GridDensity {
            values: vals,
        };
        assert!(density_reciprocity_check(&g, &mu).is_err());
    }

    #[test]
    fn grid_density_double_conjugation_within_floor() {
        // C(C(mu)) = mu within d_W <= 5 eps for grid densities (here exact:
        // the piecewise form is closed under conjugation).
        let n = 257;
        let g = igrid(n);
        let vals: Vec<f64> = g
            .coords_1d()
            .iter()
            .map(|&x| 2.0 + (2.0 * std::f64::consts::PI * x).sin())
            .collect();
        let mu = Measure::grid_density_normalized(&g, vals).unwrap();
        let back = conjugate_measure_1d(&g, &conjugate_measure_1d(&g, &mu).unwrap()).unwrap();
        let f0 = measure_cdf(&g, &mu).unwrap().reflect();
        let f1 = measure_cdf(&g, &back).unwrap().reflect();
        let gap = l2_sq_between(&f0, &f1).sqrt();
        assert!(gap <= 5.0 * g.epsilon, "double conjugation d_W gap {gap}");
        assert!(gap <= 1e-12, "closed form should be exact, got {gap}");
    }

    #[test]
    fn nonuniform_reference_conjugation_is_involutive() {
        // m with density 2x (normalized) on [0,1]; conjugating twice must
        // return the original measure's CDF.
        let n = 257;
        let sigma: Vec<f64> = (0..n)
            .map(|i| 0.2 + 1.6 * i as f64 / (n - 1) as f64)
            .collect();
        let dom = Arc::new(Domain::interval().with_sigma(Sigma::Grid { values: sigma }));
        let g = dom.build_grid(n).unwrap();
        let d = Domain::interval();
        let mu = Measure::discrete(
            &d,
            vec![(Point::One(0.3), 0.5), (Point::One(0.8), 0.5)],
        )
        .unwrap();
        let c1 = conjugate_measure_1d(&g, &mu).unwrap();
        let c2 = conjugate_measure_1d(&g, &c1).unwrap();
        let orig = measure_cdf(&g, &mu).unwrap();
        let back = measure_cdf(&g, &c2).unwrap();
        let gap = l2_sq_between(&orig, &back).sqrt();
        assert!(gap < 1e-9, "double conjugation gap {gap}");
    }

    #[test]
    fn grid_map_pushforward_and_validation() {
        let g = Arc::new(igrid(5));
        let map = TransportMap::grid_1d(g.clone(), vec![0.0, 0.1, 0.5, 0.5, 0.9]).unwrap();
        let push = map.pushforward().unwrap();
        match push {
            Measure::Discrete { atoms } => {
                assert_eq!(atoms.len(), 4);
                let total: f64 = atoms.iter().map(|(_, w)| w).sum();
                assert!((total - 1.0).abs() < 1e-12);
                // Nodes 2 and 3 (weights 1/4 each) merge at 0.5.
                assert!((atoms[2].1 - 0.5).abs() < 1e-12);
            }
            _ => panic!(),
        }
        assert!(TransportMap::grid_1d(g, vec![0.5, 0.4, 0.6, 0.7, 0.8]).is_err());
    }

    #[test]
    fn lf_argmax_map_pushforward() {
        // For the self-dual quadratic the argmax map is close to the
        // identity, so the pushforward stays close to m.
        let g = Arc::new(igrid(129));
        let phi1 =
            crate::conjugation::Potential::from_fn(g.clone(), |p| 0.5 * p.coord() * p.coord())
                .unwrap();
        let (_, argmax) = crate::conjugation::legendre_fenchel(&phi1).unwrap();
        let map = TransportMap::from_lf_argmax(g.clone(), argmax).unwrap();
        let push = map.pushforward().unwrap();
        let d = crate::metrics::wasserstein_1d(&g, &push, &Measure::uniform()).unwrap();
        assert!(d <= 2.0 * g.epsilon, "argmax map far from identity: {d}");
        // Out-of-range indices are rejected.
        assert!(TransportMap::from_lf_argmax(g.clone(), vec![999; g.len()]).is_err());
    }

    #[test]
    fn pushforward_coarse_grain_matches_direct_transport() {
        // coarse_grain(g_* m, P) against the direct reweighting of the node
        // weights, through two independent code paths.
        let g = Arc::new(igrid(513));
        let vals: Vec<f64> = g
            .coords_1d()
            .iter()
            .map(|&x| (0.2 + 0.6 * x * x).clamp(0.0, 1.0))
            .collect();
        let map = TransportMap::grid_1d(g.clone(), vals.clone()).unwrap();
        let push = map.pushforward().unwrap();
        let p = crate::measure::Partition::from_cuts(&[0.25, 0.55]).unwrap();
        let via_graph = crate::measure::coarse_grain(&g, &push, &p).unwrap();
        let mut direct = vec![0.0; 3];
        for (&v, &w) in vals.iter().zip(g.weights()) {
            let block = p.block_of_1d(v).unwrap();
            direct[block] += w;
        }
        for (a, b) in via_graph.iter().zip(&direct) {
            assert!((a - b).abs() <= 1e-8, "blocks disagree: {a} vs {b}");
        }
    }

    #[test]
    fn map_csv_dump() {
        let g = Arc::new(igrid(3));
        let map = TransportMap::grid_1d(g, vec![0.0, 0.5, 1.0]).unwrap();
        let csv = map.to_csv().unwrap();
        assert!(csv.starts_with("node,image\n"));
        assert_eq!(csv.lines().count(), 4);
    }
}
