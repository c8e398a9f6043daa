//! Semi-discrete optimal transport on convex polygons: Laguerre
//! tessellations, the damped-Newton weight solver, Brenier maps onto discrete
//! measures, and sampling of 2D conjugate measures.
//!
//! Cells use the power-diagram convention
//! `A_i = {x : |x - z_i|^2/2 - alpha_i <= |x - z_j|^2/2 - alpha_j}`,
//! so equal weights give the ordinary Voronoi diagram (`alpha = 0` for the
//! symmetric two-site split). The supporting piecewise-affine potential is
//! `phi_1(x) = max_i <z_i, x> + (alpha_i - |z_i|^2/2)`.

use crate::domain::{Domain, DomainKind, Grid, Point, Sigma};
use crate::geometry::{self, Vec2};
use crate::measure::Measure;
use crate::transport::TransportMap;
use crate::{Error, Result};
use rand::{Rng, RngExt};
use serde::{Deserialize, Serialize};
use std::sync::Arc;

/// Default convergence tolerance on `max_i |m(A_i) - lambda_i|`.
pub const DEFAULT_MASS_TOL: f64 = 1e-7;
/// Iteration cap for the weight solver.
pub const DEFAULT_MAX_ITER: usize = 100;

/// A Laguerre tessellation of a convex polygonal domain.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(try_from = "TessellationJson", into = "TessellationJson")]
pub struct Tessellation {
    pub domain: Arc<Domain>,
    pub sites: Vec<Vec2>,
    /// Power weights, gauge-fixed to `alpha[0] = 0` by the solver.
    pub alpha: Vec<f64>,
    /// Convex cell polygons (possibly empty).
    pub cells: Vec<Vec<Vec2>>,
    /// Reference masses `m(A_i)`.
    pub masses: Vec<f64>,
    /// Shared-boundary data `(i, j, integral of sigma over the edge)` for
    /// `i < j`, used for the solver's Hessian.
    #[serde(skip)]
    pub edges: Vec<(usize, usize, f64)>,
}

impl Tessellation {
    /// Affine offsets of the supporting potential
    /// `phi_1(x) = max_i [<z_i, x> + offset_i]`.
    pub fn affine_offsets(&self) -> Vec<f64> {
        self.sites
            .iter()
            .zip(&self.alpha)
            .map(|(z, a)| a - 0.5 * geometry::dot(*z, *z))
            .collect()
    }

    /// Index maximizing `<z_i, x> + offset_i` (the Brenier cell of `x`),
    /// ties toward the lowest index.
    pub fn cell_of(&self, x: Vec2) -> usize {
        let offsets = self.affine_offsets();
        let mut best = f64::NEG_INFINITY;
        let mut arg = 0;
        for (i, (z, o)) in self.sites.iter().zip(&offsets).enumerate() {
            let v = geometry::dot(*z, x) + o;
            if v > best {
                best = v;
                arg = i;
            }
        }
        arg
    }

    pub fn potential(&self) -> AffinePotential {
        AffinePotential {
            sites: self.sites.clone(),
            offsets: self.affine_offsets(),
        }
    }
}

/// The piecewise-affine Brenier potential `phi_1` of a discrete target.
#[derive(Clone, Debug)]
pub struct AffinePotential {
    pub sites: Vec<Vec2>,
    pub offsets: Vec<f64>,
}

impl AffinePotential {
    pub fn eval(&self, x: Vec2) -> f64 {
        self.sites
            .iter()
            .zip(&self.offsets)
            .map(|(z, o)| geometry::dot(*z, x) + o)
            .fold(f64::NEG_INFINITY, f64::max)
    }
}

#[derive(Serialize, Deserialize)]
struct TessellationJson {
    domain: Domain,
    sites: Vec<Vec2>,
    alpha: Vec<f64>,
    cells: Vec<Vec<Vec2>>,
    masses: Vec<f64>,
}

impl From<Tessellation> for TessellationJson {
    fn from(t: Tessellation) -> Self {
        TessellationJson {
            domain: (*t.domain).clone(),
            sites: t.sites,
            alpha: t.alpha,
            cells: t.cells,
            masses: t.masses,
        }
    }
}

impl TryFrom<TessellationJson> for Tessellation {
    type Error = Error;
    fn try_from(j: TessellationJson) -> Result<Tessellation> {
        Ok(Tessellation {
            domain: Arc::new(j.domain),
            sites: j.sites,
            alpha: j.alpha,
            cells: j.cells,
            masses: j.masses,
            edges: Vec::new(),
        })
    }
}

/// Quadrature context for cell masses: uniform density or piecewise-constant
/// sigma on a lattice grid.
enum SigmaCtx<'a> {
    Uniform { inv_area: f64 },
    Lattice { grid: &'a Grid },
}

impl SigmaCtx<'_> {
    fn cell_mass(&self, poly: &[Vec2]) -> f64 {
        if poly.is_empty() {
            return 0.0;
        }
        match self {
            SigmaCtx::Uniform { inv_area } => geometry::area(poly) * inv_area,
            SigmaCtx::Lattice { grid } => {
                let mut acc = 0.0;
                for (cell, w) in grid.cells_2d().iter().zip(grid.weights()) {
                    let inter = geometry::intersect_convex(poly, &cell.poly);
                    if !inter.is_empty() {
                        acc += w * geometry::area(&inter) / cell.area;
                    }
                }
                acc
            }
        }
    }

    /// Integral of `|x - z|^2 / 2` against `m` over a cell polygon.
    fn cell_quadratic(&self, poly: &[Vec2], z: Vec2) -> f64 {
        if poly.is_empty() {
            return 0.0;
        }
        match self {
            SigmaCtx::Uniform { inv_area } => geometry::integral_half_sqdist(poly, z) * inv_area,
            SigmaCtx::Lattice { grid } => {
                let mut acc = 0.0;
                for (cell, w) in grid.cells_2d().iter().zip(grid.weights()) {
                    let inter = geometry::intersect_convex(poly, &cell.poly);
                    if !inter.is_empty() {
                        acc += w * geometry::integral_half_sqdist(&inter, z) / cell.area;
                    }
                }
                acc
            }
        }
    }

    /// Line density of `m` near a point (for Hessian edge integrals).
    fn sigma_density(&self, p: Vec2) -> f64 {
        match self {
            SigmaCtx::Uniform { inv_area } => *inv_area,
            SigmaCtx::Lattice { grid } => match grid.locate_cell(p) {
                Some(i) => grid.weights()[i] / grid.cells_2d()[i].area,
                None => 0.0,
            },
        }
    }
}

fn sigma_ctx<'a>(domain: &Domain, grid: Option<&'a Grid>) -> Result<SigmaCtx<'a>> {
    match (&domain.sigma, grid) {
        (Sigma::Uniform, _) => Ok(SigmaCtx::Uniform {
            inv_area: 1.0 / geometry::area(&domain.vertices),
        }),
        (Sigma::Grid { .. }, Some(g)) => Ok(SigmaCtx::Lattice { grid: g }),
        (Sigma::Grid { .. }, None) => Err(Error::config(
            "a grid is required to integrate a non-uniform sigma",
        )),
    }
}

fn validate_sites(domain: &Domain, sites: &[Vec2]) -> Result<()> {
    if domain.kind != DomainKind::Polygon {
        return Err(Error::UnsupportedDomain(
            "Laguerre tessellations need a convex polygon domain".into(),
        ));
    }
    if sites.is_empty() {
        return Err(Error::input("no sites"));
    }
    for (i, z) in sites.iter().enumerate() {
        if !domain.contains(Point::Two(*z)) {
            return Err(Error::OutsideDomain { x: z[0], y: z[1] });
        }
        for w in &sites[..i] {
            if geometry::dist2(*z, *w) < 1e-24 {
                return Err(Error::input(format!(
                    "duplicate sites at ({}, {})",
                    z[0], z[1]
                )));
            }
        }
    }
    Ok(())
}

/// Builds the Laguerre cells of `sites` with power weights `alpha` by
/// successive half-plane clipping: cell `i` keeps
/// `<z_i - z_j, x> >= (|z_i|^2 - |z_j|^2)/2 - alpha_i + alpha_j` for all `j`.
/// Empty cells are legal. Masses are quadratures of `sigma` over the cells.
pub fn laguerre_cells(
    domain: &Arc<Domain>,
    grid: Option<&Grid>,
    sites: &[Vec2],
    alpha: &[f64],
) -> Result<Tessellation> {
    validate_sites(domain, sites)?;
    if alpha.len() != sites.len() {
        return Err(Error::input("alpha/site length mismatch"));
    }
    let ctx = sigma_ctx(domain, grid)?;
    let n = sites.len();
    let mut cells = Vec::with_capacity(n);
    let mut masses = Vec::with_capacity(n);
    let mut edges: Vec<(usize, usize, f64)> = Vec::new();
    const BOUNDARY: usize = usize::MAX;

    for i in 0..n {
        // Vertex list with the label of the edge starting at each vertex.
        let mut poly: Vec<(Vec2, usize)> = domain
            .vertices
            .iter()
            .map(|&v| (v, BOUNDARY))
            .collect();
        for j in 0..n {
            if j == i || poly.is_empty() {
                continue;
            }
            let nvec = geometry::sub(sites[i], sites[j]);
            let c = 0.5
                * (geometry::dot(sites[i], sites[i]) - geometry::dot(sites[j], sites[j]))
                - alpha[i]
                + alpha[j];
            poly = clip_labeled(&poly, nvec, c, j);
        }
        let verts: Vec<Vec2> = poly.iter().map(|(v, _)| *v).collect();
        masses.push(ctx.cell_mass(&verts));
        // Shared-edge sigma integrals for the Hessian (record once, i < j).
        for (k, &(v, label)) in poly.iter().enumerate() {
            if label != BOUNDARY && label > i {
                let w = poly[(k + 1) % poly.len()].0;
                let len = geometry::dist2(v, w).sqrt();
                if len > 1e-14 {
                    let mid = [(v[0] + w[0]) / 2.0, (v[1] + w[1]) / 2.0];
                    edges.push((i, label, len * ctx.sigma_density(mid)));
                }
            }
        }
        cells.push(verts);
    }
    Ok(Tessellation {
        domain: domain.clone(),
        sites: sites.to_vec(),
        alpha: alpha.to_vec(),
        cells,
        masses,
        edges,
    })
}

/// Sutherland-Hodgman clip keeping `dot(nvec, x) >= c`, carrying edge labels.
fn clip_labeled(
    poly: &[(Vec2, usize)],
    nvec: Vec2,
    c: f64,
    cut_label: usize,
) -> Vec<(Vec2, usize)> {
    let k = poly.len();
    let mut out: Vec<(Vec2, usize)> = Vec::with_capacity(k + 1);
    for idx in 0..k {
        let (p0, label) = poly[idx];
        let (p1, _) = poly[(idx + 1) % k];
        let d0 = geometry::dot(nvec, p0) - c;
        let d1 = geometry::dot(nvec, p1) - c;
        if d0 >= 0.0 {
            out.push((p0, label));
        }
        if (d0 > 0.0 && d1 < 0.0) || (d0 < 0.0 && d1 > 0.0) {
            let t = d0 / (d0 - d1);
            let x = [p0[0] + t * (p1[0] - p0[0]), p0[1] + t * (p1[1] - p0[1])];
            // Entering the cut: the new edge runs along the cut line.
            // Leaving it: the rest of the original edge continues.
            let lab = if d0 > 0.0 { cut_label } else { label };
            out.push((x, lab));
        }
    }
    let verts: Vec<Vec2> = out.iter().map(|(v, _)| *v).collect();
    if geometry::area(&verts) < 1e-300 {
        return Vec::new();
    }
    out
}

/// Kantorovich dual value `sum_i lambda_i alpha_i + int min_i [|x-z_i|^2/2 -
/// alpha_i] dm` (used by the gradient-ascent fallback line search).
fn dual_value(ctx: &SigmaCtx, tess: &Tessellation, lambda: &[f64]) -> f64 {
    let mut acc = 0.0;
    for i in 0..tess.sites.len() {
        acc += lambda[i] * tess.alpha[i];
        acc += ctx.cell_quadratic(&tess.cells[i], tess.sites[i]);
        acc -= tess.alpha[i] * tess.masses[i];
    }
    acc
}

/// Jacobi-preconditioned conjugate gradients for the reduced (gauge-fixed)
/// Newton system on the weighted cell-adjacency Laplacian.
fn solve_reduced_laplacian(
    n: usize,
    edges: &[(usize, usize, f64)],
    sites: &[Vec2],
    rhs: &[f64],
) -> Option<Vec<f64>> {
    // Assemble Laplacian weights w_ij = edge_sigma / |z_i - z_j|.
    let mut diag = vec![0.0; n];
    let mut adj: Vec<Vec<(usize, f64)>> = vec![Vec::new(); n];
    for &(i, j, s) in edges {
        let w = s / geometry::dist2(sites[i], sites[j]).sqrt().max(1e-300);
        diag[i] += w;
        diag[j] += w;
        adj[i].push((j, w));
        adj[j].push((i, w));
    }
    if diag.iter().skip(1).any(|&d| d <= 0.0) {
        return None; // isolated (empty) cell: Newton system is singular
    }
    // Reduced system over indices 1..n with x_0 = 0.
    let m = n - 1;
    let apply = |x: &[f64], out: &mut [f64]| {
        for r in 0..m {
            let i = r + 1;
            let mut acc = diag[i] * x[r];
            for &(j, w) in &adj[i] {
                if j >= 1 {
                    acc -= w * x[j - 1];
                }
            }
            out[r] = acc;
        }
    };
    let b: Vec<f64> = rhs[1..].to_vec();
    let bnorm = b.iter().map(|v| v * v).sum::<f64>().sqrt();
    if bnorm == 0.0 {
        return Some(vec![0.0; n]);
    }
    let mut x = vec![0.0; m];
    let mut r = b.clone();
    let mut z: Vec<f64> = r.iter().zip(&diag[1..]).map(|(v, d)| v / d).collect();
    let mut p = z.clone();
    let mut rz: f64 = r.iter().zip(&z).map(|(a, b)| a * b).sum();
    let mut ap = vec![0.0; m];
    for _ in 0..(4 * m + 20) {
        apply(&p, &mut ap);
        let pap: f64 = p.iter().zip(&ap).map(|(a, b)| a * b).sum();
        if pap <= 0.0 {
            return None;
        }
        let alpha = rz / pap;
        for k in 0..m {
            x[k] += alpha * p[k];
            r[k] -= alpha * ap[k];
        }
        let rnorm = r.iter().map(|v| v * v).sum::<f64>().sqrt();
        if rnorm <= 1e-12 * bnorm {
            break;
        }
        for k in 0..m {
            z[k] = r[k] / diag[k + 1];
        }
        let rz_new: f64 = r.iter().zip(&z).map(|(a, b)| a * b).sum();
        let beta = rz_new / rz;
        rz = rz_new;
        for k in 0..m {
            p[k] = z[k] + beta * p[k];
        }
    }
    let mut full = vec![0.0; n];
    full[1..].copy_from_slice(&x);
    Some(full)
}

/// Solves for power weights such that every Laguerre cell carries its
/// prescribed mass: damped Newton on the concave Kantorovich dual, with a
/// gradient-ascent Armijo fallback when the Newton system is near-singular.
/// Returns the tessellation with `max_i |m(A_i) - lambda_i| <= tol` and
/// `alpha[0] = 0`.
pub fn semidiscrete_weights(
    domain: &Arc<Domain>,
    grid: Option<&Grid>,
    sites: &[Vec2],
    lambda: &[f64],
    tol: f64,
    max_iter: usize,
) -> Result<Tessellation> {
    validate_sites(domain, sites)?;
    let n = sites.len();
    if lambda.len() != n {
        return Err(Error::input("mass/site length mismatch"));
    }
    let sum: f64 = lambda.iter().sum();
    if lambda.iter().any(|&l| l <= 0.0) || (sum - 1.0).abs() > 1e-9 {
        return Err(Error::input(
            "target masses must be strictly positive and sum to 1",
        ));
    }
    let ctx = sigma_ctx(domain, grid)?;
    let mut alpha = vec![0.0; n];
    let mut tess = laguerre_cells(domain, grid, sites, &alpha)?;
    let min_l = lambda.iter().cloned().fold(f64::MAX, f64::min);
    let min_m0 = tess.masses.iter().cloned().fold(f64::MAX, f64::min);
    let floor = 0.5 * min_l.min(min_m0);
    let res_inf = |t: &Tessellation| -> f64 {
        t.masses
            .iter()
            .zip(lambda)
            .map(|(m, l)| (m - l).abs())
            .fold(0.0, f64::max)
    };
    let mut res = res_inf(&tess);
    for _it in 0..max_iter {
        if res <= tol {
            // Gauge: alpha_1 = 0.
            let a0 = tess.alpha[0];
            if a0 != 0.0 {
                let shifted: Vec<f64> = tess.alpha.iter().map(|a| a - a0).collect();
                tess = laguerre_cells(domain, grid, sites, &shifted)?;
            }
            return Ok(tess);
        }
        let rhs: Vec<f64> = lambda
            .iter()
            .zip(&tess.masses)
            .map(|(l, m)| l - m)
            .collect();
        let newton = solve_reduced_laplacian(n, &tess.edges, sites, &rhs);
        let mut moved = false;
        if let Some(dir) = newton {
            let mut t = 1.0;
            while t >= 1e-7 {
                let cand: Vec<f64> = alpha.iter().zip(&dir).map(|(a, d)| a + t * d).collect();
                let cand_tess = laguerre_cells(domain, grid, sites, &cand)?;
                let cand_res = res_inf(&cand_tess);
                let cand_min = cand_tess.masses.iter().cloned().fold(f64::MAX, f64::min);
                if cand_min >= floor && cand_res <= (1.0 - 0.5 * t) * res + 1e-15 {
                    alpha = cand;
                    tess = cand_tess;
                    res = cand_res;
                    moved = true;
                    break;
                }
                t *= 0.5;
            }
        }
        if !moved {
            // Armijo gradient ascent on the dual.
            let f0 = dual_value(&ctx, &tess, lambda);
            let g2: f64 = lambda
                .iter()
                .zip(&tess.masses)
                .map(|(l, m)| (l - m) * (l - m))
                .sum();
            let mut t = 1.0;
            while t >= 1e-10 {
                let cand: Vec<f64> = alpha
                    .iter()
                    .zip(lambda.iter().zip(&tess.masses))
                    .map(|(a, (l, m))| a + t * (l - m))
                    .collect();
                let cand_tess = laguerre_cells(domain, grid, sites, &cand)?;
                let f1 = dual_value(&ctx, &cand_tess, lambda);
                if f1 >= f0 + 1e-4 * t * g2 {
                    alpha = cand;
                    tess = cand_tess;
                    res = res_inf(&tess);
                    moved = true;
                    break;
                }
                t *= 0.5;
            }
        }
        if !moved {
            return Err(Error::SolverDiverged {
                residual: res,
                iterations: _it + 1,
            });
        }
    }
    if res <= tol {
        let a0 = tess.alpha[0];
        let shifted: Vec<f64> = tess.alpha.iter().map(|a| a - a0).collect();
        return laguerre_cells(domain, grid, sites, &shifted);
    }
    Err(Error::SolverDiverged {
        residual: res,
        iterations: max_iter,
    })
}

/// Brenier map of a discrete measure on a convex polygon: solves the weight
/// problem and returns the cell-to-site map together with the supporting
/// piecewise-affine potential.
pub fn brenier_map_discrete(
    domain: &Arc<Domain>,
    grid: Option<&Grid>,
    mu: &Measure,
    tol: f64,
) -> Result<(TransportMap, AffinePotential)> {
    let (sites, lambda) = discrete_parts(mu)?;
    let tess = semidiscrete_weights(domain, grid, &sites, &lambda, tol, DEFAULT_MAX_ITER)?;
    let potential = tess.potential();
    Ok((TransportMap::LaguerreAssign { tess }, potential))
}

fn discrete_parts(mu: &Measure) -> Result<(Vec<Vec2>, Vec<f64>)> {
    match mu {
        Measure::Discrete { atoms } => {
            let mut sites = Vec::with_capacity(atoms.len());
            let mut lambda = Vec::with_capacity(atoms.len());
            for (p, w) in atoms {
                match p {
                    Point::Two(c) => sites.push(*c),
                    Point::One(_) => {
                        return Err(Error::UnsupportedDomain(
                            "2D Brenier map of a 1D measure".into(),
                        ))
                    }
                }
                lambda.push(*w);
            }
            Ok((sites, lambda))
        }
        _ => Err(Error::precondition("a discrete measure is required")),
    }
}

/// Samples the conjugate measure of a discrete 2D target: draws `n_samples`
/// points `y ~ m` and maps each through the exact argmax
/// `f(y) = argmax_{x in M} [<x, y> - phi_1(x)]`.
///
/// On each Laguerre cell the objective is affine, so the argmax over `M` is
/// attained at a cell vertex; the enumeration over (cell, vertex) candidates
/// is exact and every output point lies on the tessellation skeleton
/// (cell boundaries plus the domain boundary).
pub fn conjugate_measure_2d(
    tess: &Tessellation,
    grid: Option<&Grid>,
    n_samples: usize,
    rng: &mut impl Rng,
) -> Result<Measure> {
    if n_samples == 0 {
        return Err(Error::input("n_samples must be positive"));
    }
    let offsets = tess.affine_offsets();
    // Candidate maximizers: (vertex, <z_i, v> + offset_i).
    let mut cands: Vec<(Vec2, f64)> = Vec::new();
    for (i, cell) in tess.cells.iter().enumerate() {
        for &v in cell {
            cands.push((v, geometry::dot(tess.sites[i], v) + offsets[i]));
        }
    }
    if cands.is_empty() {
        return Err(Error::precondition("tessellation has no cells"));
    }
    let mut points = Vec::with_capacity(n_samples);
    for _ in 0..n_samples {
        let y = sample_reference(&tess.domain, grid, rng)?;
        let mut best = f64::NEG_INFINITY;
        let mut arg = cands[0].0;
        for &(v, b) in &cands {
            let val = geometry::dot(v, y) - b;
            if val > best {
                best = val;
                arg = v;
            }
        }
        points.push(Point::Two(arg));
    }
    Ok(Measure::Empirical { points })
}

/// Draws one point from the reference measure of a polygon domain.
pub fn sample_reference(
    domain: &Arc<Domain>,
    grid: Option<&Grid>,
    rng: &mut impl Rng,
) -> Result<Vec2> {
    match (&domain.sigma, grid) {
        (Sigma::Uniform, _) => Ok(geometry::sample_uniform(
            &domain.vertices,
            rng.random(),
            rng.random(),
            rng.random(),
        )),
        (Sigma::Grid { .. }, Some(g)) => {
            // Area-and-sigma weighted cell, then uniform inside the cell.
            let u: f64 = rng.random();
            let mut acc = 0.0;
            let cells = g.cells_2d();
            let mut idx = cells.len() - 1;
            for (i, w) in g.weights().iter().enumerate() {
                acc += w;
                if u <= acc {
                    idx = i;
                    break;
                }
            }
            Ok(geometry::sample_uniform(
                &cells[idx].poly,
                rng.random(),
                rng.random(),
                rng.random(),
            ))
        }
        (Sigma::Grid { .. }, None) => Err(Error::config(
            "a grid is required to sample a non-uniform sigma",
        )),
    }
}
