//! Probability-measure representations and elementary functionals.
//!
//! A [`Measure`] is a tagged union: discrete atoms, a grid density (values of
//! `d mu / dm` per grid node), an empirical sample cloud, or an exact 1D
//! piecewise form (atoms plus uniform slabs) which the closed-form conjugation
//! path produces and consumes.

use crate::domain::{wrap_unit, Domain, DomainKind, Grid, Point};
use crate::geometry::Vec2;
use crate::monotone::MonotoneGraph;
use crate::{Error, Result};
use serde::{Deserialize, Serialize};

/// Positions closer than this are merged when constructing discrete measures.
pub const ATOM_MERGE_TOL: f64 = 1e-12;
/// Total-mass tolerance for measure invariants.
pub const MASS_TOL: f64 = 1e-10;
/// Grid densities below this are clamped to zero (log-underflow guard).
pub const DENSITY_FLOOR: f64 = 1e-300;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "MeasureJson", into = "MeasureJson")]
pub enum Measure {
    /// Atoms with positive weights, merged and (in 1D) sorted by position.
    Discrete { atoms: Vec<(Point, f64)> },
    /// Density values `eta = d mu / dm` per grid node or cell.
    GridDensity { values: Vec<f64> },
    /// Equal-weight sample cloud.
    Empirical { points: Vec<Point> },
    /// Exact 1D measure: atoms plus uniform slabs `(a, b, mass)`.
    Piecewise {
        atoms: Vec<(f64, f64)>,
        slabs: Vec<(f64, f64, f64)>,
    },
}

impl Measure {
    /// Discrete measure on a domain: validates membership, merges duplicate
    /// positions (within [`ATOM_MERGE_TOL`]) and checks the weight sum.
    pub fn discrete(domain: &Domain, atoms: Vec<(Point, f64)>) -> Result<Measure> {
        if atoms.is_empty() {
            return Err(Error::DegenerateMeasure("no atoms".into()));
        }
        let mut total = 0.0;
        for (p, w) in &atoms {
            if !w.is_finite() || *w < 0.0 {
                return Err(Error::input(format!("atom weight {w} must be >= 0")));
            }
            if !domain.contains(*p) {
                let c = p.coords();
                return Err(Error::OutsideDomain { x: c[0], y: c[1] });
            }
            total += w;
        }
        if (total - 1.0).abs() > MASS_TOL {
            return Err(Error::DegenerateMeasure(format!(
                "weights sum to {total}, not 1"
            )));
        }
        let merged: Vec<(Point, f64)> = match domain.kind {
            DomainKind::Interval | DomainKind::Circle => {
                let mut pts: Vec<(f64, f64)> = atoms
                    .into_iter()
                    .map(|(p, w)| {
                        let x = p.coord();
                        let x = if domain.kind == DomainKind::Circle {
                            wrap_unit(x)
                        } else {
                            x
                        };
                        (x, w)
                    })
                    .collect();
                pts.sort_by(|a, b| a.0.total_cmp(&b.0));
                let mut out: Vec<(f64, f64)> = Vec::with_capacity(pts.len());
                for (x, w) in pts {
                    match out.last_mut() {
                        Some((px, pw)) if (x - *px).abs() <= ATOM_MERGE_TOL => *pw += w,
                        _ => out.push((x, w)),
                    }
                }
                out.into_iter()
                    .filter(|&(_, w)| w > 0.0)
                    .map(|(x, w)| (Point::One(x), w))
                    .collect()
            }
            DomainKind::Polygon => {
                let mut out: Vec<(Vec2, f64)> = Vec::new();
                for (p, w) in atoms {
                    if w == 0.0 {
                        continue;
                    }
                    let c = p.coords();
                    match out.iter_mut().find(|(q, _)| {
                        (q[0] - c[0]).abs() <= ATOM_MERGE_TOL && (q[1] - c[1]).abs() <= ATOM_MERGE_TOL
                    }) {
                        Some((_, pw)) => *pw += w,
                        None => out.push((c, w)),
                    }
                }
                out.into_iter().map(|(c, w)| (Point::Two(c), w)).collect()
            }
        };
        if merged.is_empty() {
            return Err(Error::DegenerateMeasure("all atoms have zero weight".into()));
        }
        Ok(Measure::Discrete { atoms: merged })
    }

    /// Grid density from values of `d mu / dm`: nonnegative, quadrature sum 1
    /// within [`MASS_TOL`]. Values below [`DENSITY_FLOOR`] are clamped to 0
    /// and the mass renormalized.
    pub fn grid_density(grid: &Grid, mut values: Vec<f64>) -> Result<Measure> {
        if values.len() != grid.len() {
            return Err(Error::DomainMismatch(format!(
                "density has {} values, grid has {} nodes",
                values.len(),
                grid.len()
            )));
        }
        let mut quad = 0.0;
        for (v, w) in values.iter_mut().zip(grid.weights()) {
            if !v.is_finite() || *v < 0.0 {
                return Err(Error::input("density values must be finite and >= 0"));
            }
            if *v < DENSITY_FLOOR {
                *v = 0.0;
            }
            quad += *v * *w;
        }
        if (quad - 1.0).abs() > MASS_TOL {
            return Err(Error::DegenerateMeasure(format!(
                "density quadrature sum {quad} is not 1"
            )));
        }
        // Remove the O(MASS_TOL) defect so downstream closed forms see mass 1.
        for v in &mut values {
            *v /= quad;
        }
        Ok(Measure::GridDensity { values })
    }

    /// Normalizes proportional values into an admissible grid density.
    pub fn grid_density_normalized(grid: &Grid, raw: Vec<f64>) -> Result<Measure> {
        let quad: f64 = raw.iter().zip(grid.weights()).map(|(v, w)| v * w).sum();
        if quad <= 0.0 {
            return Err(Error::DegenerateMeasure("density has no mass".into()));
        }
        Measure::grid_density(grid, raw.into_iter().map(|v| v / quad).collect())
    }

    pub fn empirical(points: Vec<Point>) -> Result<Measure> {
        if points.is_empty() {
            return Err(Error::DegenerateMeasure("empty sample cloud".into()));
        }
        Ok(Measure::Empirical { points })
    }

    /// Exact 1D piecewise measure.
    pub fn piecewise(atoms: Vec<(f64, f64)>, slabs: Vec<(f64, f64, f64)>) -> Result<Measure> {
        // Validation happens in the graph constructor.
        MonotoneGraph::from_parts(&atoms, &slabs, MASS_TOL)?;
        Ok(Measure::Piecewise { atoms, slabs })
    }

    /// Reference measure `m` itself.
    pub fn uniform() -> Measure {
        Measure::Piecewise {
            atoms: vec![],
            slabs: vec![(0.0, 1.0, 1.0)],
        }
    }

    pub fn total_weight(&self) -> f64 {
        match self {
            Measure::Discrete { atoms } => atoms.iter().map(|(_, w)| w).sum(),
            Measure::GridDensity { .. } => 1.0,
            Measure::Empirical { .. } => 1.0,
            Measure::Piecewise { atoms, slabs } => {
                atoms.iter().map(|(_, w)| w).sum::<f64>()
                    + slabs.iter().map(|(_, _, m)| m).sum::<f64>()
            }
        }
    }
}

// ---------------------------------------------------------------------------
// JSON schema
// ---------------------------------------------------------------------------

#[derive(Serialize, Deserialize)]
struct AtomJson {
    x: Vec<f64>,
    w: f64,
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
enum MeasureJson {
    Discrete {
        atoms: Vec<AtomJson>,
    },
    Grid {
        values: Vec<f64>,
    },
    Empirical {
        points: Vec<Vec<f64>>,
    },
    Piecewise {
        atoms: Vec<(f64, f64)>,
        slabs: Vec<(f64, f64, f64)>,
    },
}

fn point_to_vec(p: Point) -> Vec<f64> {
    match p {
        Point::One(x) => vec![x],
        Point::Two(c) => vec![c[0], c[1]],
    }
}

fn point_from_vec(v: &[f64]) -> Result<Point> {
    match v.len() {
        1 => Ok(Point::One(v[0])),
        2 => Ok(Point::Two([v[0], v[1]])),
        n => Err(Error::input(format!("point must have 1 or 2 coords, got {n}"))),
    }
}

impl From<Measure> for MeasureJson {
    fn from(m: Measure) -> Self {
        match m {
            Measure::Discrete { atoms } => MeasureJson::Discrete {
                atoms: atoms
                    .into_iter()
                    .map(|(p, w)| AtomJson {
                        x: point_to_vec(p),
                        w,
                    })
                    .collect(),
            },
            Measure::GridDensity { values } => MeasureJson::Grid { values },
            Measure::Empirical { points } => MeasureJson::Empirical {
                points: points.into_iter().map(point_to_vec).collect(),
            },
            Measure::Piecewise { atoms, slabs } => MeasureJson::Piecewise { atoms, slabs },
        }
    }
}

impl TryFrom<MeasureJson> for Measure {
    type Error = Error;

    fn try_from(j: MeasureJson) -> Result<Measure> {
        Ok(match j {
            MeasureJson::Discrete { atoms } => Measure::Discrete {
                atoms: atoms
                    .iter()
                    .map(|a| Ok((point_from_vec(&a.x)?, a.w)))
                    .collect::<Result<_>>()?,
            },
            MeasureJson::Grid { values } => Measure::GridDensity { values },
            MeasureJson::Empirical { points } => Measure::Empirical {
                points: points
                    .iter()
                    .map(|p| point_from_vec(p))
                    .collect::<Result<_>>()?,
            },
            MeasureJson::Piecewise { atoms, slabs } => Measure::Piecewise { atoms, slabs },
        })
    }
}

// ---------------------------------------------------------------------------
// Partitions
// ---------------------------------------------------------------------------

/// A finite measurable partition of the domain.
#[derive(Clone, Debug, PartialEq)]
pub enum Partition {
    /// 1D: each block is a union of half-open intervals `[a, b)` on the lift;
    /// the point 1 belongs to the block owning a piece ending at 1.
    Intervals { blocks: Vec<Vec<(f64, f64)>> },
    /// 2D: every grid cell is assigned to a block.
    Cells {
        n_blocks: usize,
        block_of_cell: Vec<usize>,
    },
}

impl Partition {
    /// Contiguous 1D partition from cut points `0 < c_1 < ... < c_{k-1} < 1`.
    pub fn from_cuts(cuts: &[f64]) -> Result<Partition> {
        let mut edges = vec![0.0];
        for &c in cuts {
            if !(0.0..1.0).contains(&c) || c <= *edges.last().unwrap() {
                return Err(Error::input("cuts must be strictly increasing in (0,1)"));
            }
            edges.push(c);
        }
        edges.push(1.0);
        Ok(Partition::Intervals {
            blocks: edges.windows(2).map(|w| vec![(w[0], w[1])]).collect(),
        })
    }

    pub fn len(&self) -> usize {
        match self {
            Partition::Intervals { blocks } => blocks.len(),
            Partition::Cells { n_blocks, .. } => *n_blocks,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Validates disjointness and the covering property.
    pub fn validate(&self, grid: Option<&Grid>) -> Result<()> {
        match self {
            Partition::Intervals { blocks } => {
                let mut pieces: Vec<(f64, f64)> = blocks.iter().flatten().copied().collect();
                pieces.sort_by(|a, b| a.0.total_cmp(&b.0));
                let mut end = 0.0;
                for (a, b) in pieces {
                    if (a - end).abs() > 1e-9 || b <= a {
                        return Err(Error::input(
                            "partition intervals must be disjoint and cover [0,1)",
                        ));
                    }
                    end = b;
                }
                if (end - 1.0).abs() > 1e-9 {
                    return Err(Error::input("partition does not cover the domain"));
                }
                Ok(())
            }
            Partition::Cells {
                n_blocks,
                block_of_cell,
            } => {
                if let Some(g) = grid {
                    if block_of_cell.len() != g.len() {
                        return Err(Error::DomainMismatch(
                            "cell partition does not match the grid".into(),
                        ));
                    }
                }
                if block_of_cell.iter().any(|&b| b >= *n_blocks) {
                    return Err(Error::input("cell block index out of range"));
                }
                Ok(())
            }
        }
    }

    /// Index of the block containing a 1D position (lift coordinates).
    pub fn block_of_1d(&self, x: f64) -> Option<usize> {
        match self {
            Partition::Intervals { blocks } => {
                for (i, block) in blocks.iter().enumerate() {
                    for &(a, b) in block {
                        if (x >= a && x < b) || (x == 1.0 && b == 1.0) {
                            return Some(i);
                        }
                    }
                }
                None
            }
            Partition::Cells { .. } => None,
        }
    }

    /// Reference masses `m(M_i)` of every block.
    pub fn masses(&self, grid: &Grid) -> Result<Vec<f64>> {
        self.validate(Some(grid))?;
        match self {
            Partition::Intervals { blocks } => {
                let m_cdf = crate::transport::reference_cdf(grid)?;
                Ok(blocks
                    .iter()
                    .map(|block| {
                        block
                            .iter()
                            .map(|&(a, b)| m_cdf.mass_half_open(a, b))
                            .sum()
                    })
                    .collect())
            }
            Partition::Cells {
                n_blocks,
                block_of_cell,
            } => {
                let mut out = vec![0.0; *n_blocks];
                for (i, &b) in block_of_cell.iter().enumerate() {
                    out[b] += grid.weights()[i];
                }
                Ok(out)
            }
        }
    }
}

/// Vector `(mu(M_1), ..., mu(M_N))` of block masses.
pub fn coarse_grain(grid: &Grid, mu: &Measure, partition: &Partition) -> Result<Vec<f64>> {
    partition.validate(Some(grid))?;
    let n = partition.len();
    let is_1d = grid.domain.is_one_dimensional();
    match (partition, is_1d) {
        (Partition::Intervals { blocks }, true) => {
            let graph = crate::transport::measure_cdf(grid, mu)?;
            let mut out = Vec::with_capacity(n);
            for block in blocks {
                let mut mass = 0.0;
                for &(a, b) in block {
                    mass += graph.mass_half_open(a, b);
                    if b == 1.0 {
                        // The closed right endpoint belongs to the last piece.
                        mass += graph.mass_closed(1.0, 1.0);
                    }
                }
                out.push(mass);
            }
            Ok(out)
        }
        (
            Partition::Cells {
                n_blocks,
                block_of_cell,
            },
            false,
        ) => {
            let mut out = vec![0.0; *n_blocks];
            match mu {
                Measure::Discrete { atoms } => {
                    for (p, w) in atoms {
                        let cell = grid.locate_cell(p.coords()).ok_or_else(|| {
                            Error::DomainMismatch("atom outside every grid cell".into())
                        })?;
                        out[block_of_cell[cell]] += w;
                    }
                }
                Measure::Empirical { points } => {
                    let w = 1.0 / points.len() as f64;
                    for p in points {
                        if let Some(cell) = grid.locate_cell(p.coords()) {
                            out[block_of_cell[cell]] += w;
                        }
                    }
                }
                Measure::GridDensity { values } => {
                    if values.len() != grid.len() {
                        return Err(Error::DomainMismatch("density/grid size mismatch".into()));
                    }
                    for ((v, w), &b) in values.iter().zip(grid.weights()).zip(block_of_cell) {
                        out[b] += v * w;
                    }
                }
                Measure::Piecewise { .. } => {
                    return Err(Error::UnsupportedDomain(
                        "piecewise measures are 1D-only".into(),
                    ))
                }
            }
            Ok(out)
        }
        _ => Err(Error::DomainMismatch(
            "partition kind does not match the domain dimension".into(),
        )),
    }
}

/// Minimal relative entropy `Ent(m | nu)` over measures `nu` with prescribed
/// block masses `x`: `-sum_i m(M_i) log(x_i / m(M_i))`, attained by the
/// density that is constant on every block. Returns `+inf` when some block
/// with positive reference mass is starved.
pub fn min_entropy_given_marginals(block_masses: &[f64], x: &[f64]) -> Result<f64> {
    if block_masses.len() != x.len() {
        return Err(Error::input("marginal vector length mismatch"));
    }
    let sx: f64 = x.iter().sum();
    if x.iter().any(|&v| v < 0.0) || (sx - 1.0).abs() > 1e-8 {
        return Err(Error::input("marginals must lie in the simplex"));
    }
    let mut acc = 0.0;
    for (&mi, &xi) in block_masses.iter().zip(x) {
        if mi <= 0.0 {
            continue;
        }
        if xi <= 0.0 {
            return Ok(f64::INFINITY);
        }
        acc -= mi * (xi / mi).ln();
    }
    Ok(acc)
}

impl Grid {
    /// Locates the grid cell containing a planar point (2D grids only).
    pub fn locate_cell(&self, p: Vec2) -> Option<usize> {
        let cells = match &self.nodes {
            crate::domain::GridNodes::Lattice { cells, .. } => cells,
            _ => return None,
        };
        if !self.domain.contains(Point::Two(p)) {
            return None;
        }
        // Cells are few at desk scale; a containment scan is plenty.
        for (i, c) in cells.iter().enumerate() {
            if crate::geometry::contains(&c.poly, p, 1e-12) {
                return Some(i);
            }
        }
        // Boundary slivers: nearest cell center.
        let mut best = (f64::MAX, None);
        for (i, c) in cells.iter().enumerate() {
            let d = crate::geometry::dist2(c.center, p);
            if d < best.0 {
                best = (d, Some(i));
            }
        }
        best.1
    }
}
