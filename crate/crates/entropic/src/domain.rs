//! Compact domains, their metric, the reference measure and discretization
//! grids.
//!
//! Three domain kinds are supported: the unit interval `[0,1]`, the circle of
//! length 1 (coordinates in `[0,1)` with base point 0, arc arithmetic mod 1),
//! and convex planar polygons. The reference probability measure `m` has
//! density `sigma` with respect to length/area; `sigma` is uniform by default
//! or piecewise-constant from grid values.

use crate::geometry::{self, Vec2};
use crate::{Error, Result};
use serde::{Deserialize, Serialize};
use std::sync::Arc;

/// Absolute tolerance for domain-membership comparisons.
pub const MEMBERSHIP_TOL: f64 = 1e-12;

/// A point of a domain: a coordinate in `[0,1]` for 1D domains, a planar
/// coordinate pair for polygons.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Point {
    One(f64),
    Two(Vec2),
}

impl Point {
    pub fn coord(self) -> f64 {
        match self {
            Point::One(x) => x,
            Point::Two(_) => panic!("expected a 1D point"),
        }
    }

    pub fn coords(self) -> Vec2 {
        match self {
            Point::One(x) => [x, 0.0],
            Point::Two(p) => p,
        }
    }
}

/// Reference density specification (`dm/dvol`).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum Sigma {
    Uniform,
    /// Piecewise-constant density given per grid node (1D) or grid cell (2D),
    /// in the node/cell order produced by [`Domain::build_grid`] at the
    /// resolution the values are meant for. Normalized at quadrature time.
    Grid {
        values: Vec<f64>,
    },
}

impl Sigma {
    pub fn is_uniform(&self) -> bool {
        matches!(self, Sigma::Uniform)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DomainKind {
    Interval,
    Circle,
    Polygon,
}

/// A compact domain together with its reference measure density.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Domain {
    pub kind: DomainKind,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub vertices: Vec<Vec2>,
    #[serde(default = "default_sigma")]
    pub sigma: Sigma,
}

fn default_sigma() -> Sigma {
    Sigma::Uniform
}

impl Domain {
    pub fn interval() -> Self {
        Domain {
            kind: DomainKind::Interval,
            vertices: Vec::new(),
            sigma: Sigma::Uniform,
        }
    }

    pub fn circle() -> Self {
        Domain {
            kind: DomainKind::Circle,
            vertices: Vec::new(),
            sigma: Sigma::Uniform,
        }
    }

    pub fn polygon(vertices: Vec<Vec2>) -> Result<Self> {
        if !geometry::is_convex_ccw(&vertices) {
            return Err(Error::input(
                "polygon must be convex with counterclockwise vertices and positive area",
            ));
        }
        Ok(Domain {
            kind: DomainKind::Polygon,
            vertices,
            sigma: Sigma::Uniform,
        })
    }

    pub fn unit_square() -> Self {
        Domain::polygon(vec![[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]]).unwrap()
    }

    pub fn with_sigma(mut self, sigma: Sigma) -> Self {
        self.sigma = sigma;
        self
    }

    pub fn is_one_dimensional(&self) -> bool {
        matches!(self.kind, DomainKind::Interval | DomainKind::Circle)
    }

    /// Validates invariants that do not need a grid (polygon convexity).
    pub fn validate(&self) -> Result<()> {
        match self.kind {
            DomainKind::Polygon => {
                if !geometry::is_convex_ccw(&self.vertices) {
                    return Err(Error::input(
                        "polygon must be convex with counterclockwise vertices and positive area",
                    ));
                }
            }
            _ => {
                if !self.vertices.is_empty() {
                    return Err(Error::input("1D domains carry no vertices"));
                }
            }
        }
        Ok(())
    }

    pub fn contains(&self, p: Point) -> bool {
        match (self.kind, p) {
            (DomainKind::Interval, Point::One(x)) => {
                (-MEMBERSHIP_TOL..=1.0 + MEMBERSHIP_TOL).contains(&x)
            }
            (DomainKind::Circle, Point::One(x)) => x.is_finite() && (-1e9..=1e9).contains(&x),
            (DomainKind::Polygon, Point::Two(q)) => {
                geometry::contains(&self.vertices, q, MEMBERSHIP_TOL)
            }
            _ => false,
        }
    }

    /// Metric of the domain. Circle uses arc distance mod 1, the others the
    /// Euclidean distance.
    pub fn distance(&self, x: Point, y: Point) -> Result<f64> {
        if !self.contains(x) {
            let c = x.coords();
            return Err(Error::OutsideDomain { x: c[0], y: c[1] });
        }
        if !self.contains(y) {
            let c = y.coords();
            return Err(Error::OutsideDomain { x: c[0], y: c[1] });
        }
        Ok(match self.kind {
            DomainKind::Interval => (x.coord() - y.coord()).abs(),
            DomainKind::Circle => circle_distance(x.coord(), y.coord()),
            DomainKind::Polygon => geometry::dist2(x.coords(), y.coords()).sqrt(),
        })
    }

    /// Diameter `D = sup d(x, y)`: 1 on the interval, 1/2 on the circle, and
    /// the maximal vertex distance for convex polygons (where the supremum is
    /// attained at vertices).
    pub fn diameter(&self) -> f64 {
        match self.kind {
            DomainKind::Interval => 1.0,
            DomainKind::Circle => 0.5,
            DomainKind::Polygon => {
                let mut best: f64 = 0.0;
                for (i, a) in self.vertices.iter().enumerate() {
                    for b in &self.vertices[i + 1..] {
                        best = best.max(geometry::dist2(*a, *b).sqrt());
                    }
                }
                best
            }
        }
    }

    pub fn area(&self) -> f64 {
        match self.kind {
            DomainKind::Polygon => geometry::area(&self.vertices),
            _ => 1.0,
        }
    }

    /// Builds a discretization grid. `resolution` is the node count for 1D
    /// domains (>= 2) and the per-axis cell count for polygons (>= 4).
    pub fn build_grid(self: &Arc<Self>, resolution: usize) -> Result<Grid> {
        Grid::build(self.clone(), resolution)
    }
}

/// Wrap a circle coordinate into `[0, 1)`.
pub fn wrap_unit(x: f64) -> f64 {
    let y = x.rem_euclid(1.0);
    if y >= 1.0 {
        0.0
    } else {
        y
    }
}

/// Arc distance on the circle of length 1.
pub fn circle_distance(x: f64, y: f64) -> f64 {
    let d = (wrap_unit(x) - wrap_unit(y)).abs();
    d.min(1.0 - d)
}

/// A retained lattice cell of a 2D grid: its clipped polygon, centroid and
/// area.
#[derive(Clone, Debug, PartialEq)]
pub struct Cell2 {
    pub center: Vec2,
    pub area: f64,
    pub poly: Vec<Vec2>,
}

/// Grid node layout per domain kind.
#[derive(Clone, Debug, PartialEq)]
pub enum GridNodes {
    /// `n` equally spaced nodes on `[0,1]` including both endpoints.
    Line(Vec<f64>),
    /// `n` equally spaced nodes on the circle, periodic.
    Ring(Vec<f64>),
    /// Lattice cells clipped to the polygon.
    Lattice { cells: Vec<Cell2>, dx: f64, dy: f64 },
}

/// Discretization grid: nodes/cells, the covering radius `epsilon`, and
/// cached reference quadrature weights.
#[derive(Clone, Debug, PartialEq)]
pub struct Grid {
    pub domain: Arc<Domain>,
    pub nodes: GridNodes,
    /// Covering radius: every domain point lies within `epsilon` of a node.
    pub epsilon: f64,
    weights: Vec<f64>,
}

impl Grid {
    fn build(domain: Arc<Domain>, resolution: usize) -> Result<Grid> {
        domain.validate()?;
        let nodes = match domain.kind {
            DomainKind::Interval => {
                if resolution < 2 {
                    return Err(Error::config("interval grid needs at least 2 nodes"));
                }
                let n = resolution;
                let h = 1.0 / (n - 1) as f64;
                GridNodes::Line((0..n).map(|i| i as f64 * h).collect())
            }
            DomainKind::Circle => {
                if resolution < 2 {
                    return Err(Error::config("circle grid needs at least 2 nodes"));
                }
                let n = resolution;
                let h = 1.0 / n as f64;
                GridNodes::Ring((0..n).map(|i| i as f64 * h).collect())
            }
            DomainKind::Polygon => {
                if resolution < 4 {
                    return Err(Error::config("polygon grid needs at least 4 cells per axis"));
                }
                let (mut lo, mut hi) = ([f64::MAX, f64::MAX], [f64::MIN, f64::MIN]);
                for v in &domain.vertices {
                    lo[0] = lo[0].min(v[0]);
                    lo[1] = lo[1].min(v[1]);
                    hi[0] = hi[0].max(v[0]);
                    hi[1] = hi[1].max(v[1]);
                }
                let dx = (hi[0] - lo[0]) / resolution as f64;
                let dy = (hi[1] - lo[1]) / resolution as f64;
                let mut cells = Vec::new();
                for iy in 0..resolution {
                    for ix in 0..resolution {
                        let x0 = lo[0] + ix as f64 * dx;
                        let y0 = lo[1] + iy as f64 * dy;
                        let rect = [
                            [x0, y0],
                            [x0 + dx, y0],
                            [x0 + dx, y0 + dy],
                            [x0, y0 + dy],
                        ];
                        let clipped = geometry::intersect_convex(&rect, &domain.vertices);
                        let a = geometry::area(&clipped);
                        if a > 1e-14 * dx * dy {
                            cells.push(Cell2 {
                                center: geometry::centroid(&clipped),
                                area: a,
                                poly: clipped,
                            });
                        }
                    }
                }
                if cells.is_empty() {
                    return Err(Error::config("polygon grid produced no cells"));
                }
                GridNodes::Lattice { cells, dx, dy }
            }
        };
        let epsilon = match &nodes {
            GridNodes::Line(v) => 1.0 / (v.len() - 1) as f64,
            GridNodes::Ring(v) => 0.5 / v.len() as f64,
            // The centroid of a clipped cell stays inside the full lattice
            // cell, so the full-cell diagonal covers every point of the cell.
            GridNodes::Lattice { dx, dy, .. } => (dx * dx + dy * dy).sqrt(),
        };
        let mut grid = Grid {
            domain,
            nodes,
            epsilon,
            weights: Vec::new(),
        };
        grid.weights = reference_weights(&grid.domain, &grid)?;
        Ok(grid)
    }

    pub fn len(&self) -> usize {
        match &self.nodes {
            GridNodes::Line(v) | GridNodes::Ring(v) => v.len(),
            GridNodes::Lattice { cells, .. } => cells.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn point(&self, i: usize) -> Point {
        match &self.nodes {
            GridNodes::Line(v) | GridNodes::Ring(v) => Point::One(v[i]),
            GridNodes::Lattice { cells, .. } => Point::Two(cells[i].center),
        }
    }

    /// 1D node coordinates (panics on 2D grids).
    pub fn coords_1d(&self) -> &[f64] {
        match &self.nodes {
            GridNodes::Line(v) | GridNodes::Ring(v) => v,
            GridNodes::Lattice { .. } => panic!("expected a 1D grid"),
        }
    }

    pub fn cells_2d(&self) -> &[Cell2] {
        match &self.nodes {
            GridNodes::Lattice { cells, .. } => cells,
            _ => panic!("expected a 2D grid"),
        }
    }

    /// Normalized reference quadrature weights (cached at build time).
    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Distance between grid nodes `i` and `j`.
    pub fn node_distance(&self, i: usize, j: usize) -> f64 {
        match &self.nodes {
            GridNodes::Line(v) => (v[i] - v[j]).abs(),
            GridNodes::Ring(v) => circle_distance(v[i], v[j]),
            GridNodes::Lattice { cells, .. } => {
                geometry::dist2(cells[i].center, cells[j].center).sqrt()
            }
        }
    }
}

/// Quadrature weights of the reference measure `m`: nonnegative, proportional
/// to `sigma * cell volume`, normalized to sum 1. Trapezoid rule on the
/// interval, equal arcs on the circle, clipped cell areas on polygons.
pub fn reference_weights(domain: &Domain, grid: &Grid) -> Result<Vec<f64>> {
    let n = grid.len();
    let sigma_at = |i: usize| -> Result<f64> {
        match &domain.sigma {
            Sigma::Uniform => Ok(1.0),
            Sigma::Grid { values } => {
                if values.len() != n {
                    return Err(Error::config(format!(
                        "sigma grid has {} values but the grid has {} nodes",
                        values.len(),
                        n
                    )));
                }
                let s = values[i];
                if !(s >= 0.0) {
                    return Err(Error::input("sigma must be nonnegative"));
                }
                Ok(s)
            }
        }
    };
    let mut w = Vec::with_capacity(n);
    match &grid.nodes {
        GridNodes::Line(v) => {
            let h = 1.0 / (v.len() - 1) as f64;
            for i in 0..n {
                let trap = if i == 0 || i == n - 1 { 0.5 } else { 1.0 };
                w.push(sigma_at(i)? * h * trap);
            }
        }
        GridNodes::Ring(v) => {
            let h = 1.0 / v.len() as f64;
            for i in 0..n {
                w.push(sigma_at(i)? * h);
            }
        }
        GridNodes::Lattice { cells, .. } => {
            for (i, cell) in cells.iter().enumerate() {
                w.push(sigma_at(i)? * cell.area);
            }
        }
    }
    let total: f64 = w.iter().sum();
    if total <= 0.0 {
        return Err(Error::DegenerateMeasure(
            "sigma vanishes everywhere on the grid".into(),
        ));
    }
    for x in &mut w {
        *x /= total;
    }
    Ok(w)
}
