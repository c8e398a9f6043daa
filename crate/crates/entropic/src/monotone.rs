//! Exact piecewise-linear machinery for monotone graphs on `[0,1]`.
//!
//! A [`MonotoneGraph`] is the completed graph of a nondecreasing map
//! `[0,1] -> [0,1]`: a polyline from `(0,0)` to `(1,1)` that is nondecreasing
//! in both coordinates. Vertical runs are jumps (atoms of the measure whose
//! CDF the graph is), horizontal runs are flats (holes in the support).
//!
//! The representation is closed under the operations the 1D transport path
//! needs, and all of them are exact:
//!
//! - [`MonotoneGraph::reflect`] swaps the two coordinates. Applied to a CDF it
//!   yields the CDF of the conjugate measure (jumps and flats trade places),
//!   and reflecting twice is the identity on the vertex list.
//! - [`l2_sq_between`] / [`l1_between`] integrate the squared / absolute
//!   difference of two graphs read as functions, by merging breakpoints and
//!   integrating each affine piece in closed form.
//! - [`compose_continuous_outer`] composes with a continuous strictly
//!   increasing outer graph (used for non-uniform reference measures).

use crate::{Error, Result};

const EPS_X: f64 = 1e-15;

/// Completed graph of a nondecreasing map of `[0,1]` onto `[0,1]`.
#[derive(Clone, Debug, PartialEq)]
pub struct MonotoneGraph {
    verts: Vec<[f64; 2]>,
}

impl MonotoneGraph {
    /// Identity map (CDF of the uniform measure).
    pub fn identity() -> Self {
        MonotoneGraph {
            verts: vec![[0.0, 0.0], [1.0, 1.0]],
        }
    }

    pub fn vertices(&self) -> &[[f64; 2]] {
        &self.verts
    }

    /// Builds a graph from raw vertices. Coordinates are clamped to `[0,1]`,
    /// forced monotone, and the polyline is anchored at `(0,0)` and `(1,1)`.
    pub fn from_vertices(mut verts: Vec<[f64; 2]>) -> Self {
        verts.retain(|v| v[0].is_finite() && v[1].is_finite());
        verts.sort_by(|a, b| a[0].total_cmp(&b[0]).then(a[1].total_cmp(&b[1])));
        let mut out: Vec<[f64; 2]> = Vec::with_capacity(verts.len() + 2);
        out.push([0.0, 0.0]);
        let mut ymax = 0.0_f64;
        for v in verts {
            let x = v[0].clamp(0.0, 1.0);
            let y = v[1].clamp(0.0, 1.0).max(ymax);
            ymax = y;
            out.push([x, y]);
        }
        out.push([1.0, 1.0]);
        MonotoneGraph {
            verts: canonicalize(out),
        }
    }

    /// CDF graph of the measure `sum w_i delta_{x_i} + sum slabs`, where a
    /// slab `(a, b, mass)` spreads `mass` uniformly over `[a, b]`. The total
    /// mass must be 1 within `tol`; the graph is rescaled so it is exactly 1.
    pub fn from_parts(atoms: &[(f64, f64)], slabs: &[(f64, f64, f64)], tol: f64) -> Result<Self> {
        #[derive(Clone, Copy)]
        enum Ev {
            Jump(f64),
            Slope(f64),
        }
        let mut events: Vec<(f64, u8, Ev)> = Vec::new();
        let mut total = 0.0;
        for &(x, w) in atoms {
            if !(x.is_finite() && w.is_finite()) || w < 0.0 || !(0.0..=1.0).contains(&x) {
                return Err(Error::input(format!("bad atom ({x}, {w})")));
            }
            if w == 0.0 {
                continue;
            }
            total += w;
            events.push((x, 1, Ev::Jump(w)));
        }
        for &(a, b, mass) in slabs {
            if !(a.is_finite() && b.is_finite() && mass.is_finite())
                || mass < 0.0
                || b <= a
                || a < 0.0
                || b > 1.0 + 1e-12
            {
                return Err(Error::input(format!("bad slab ({a}, {b}, {mass})")));
            }
            if mass == 0.0 {
                continue;
            }
            total += mass;
            let d = mass / (b - a);
            events.push((a, 0, Ev::Slope(d)));
            events.push((b.min(1.0), 2, Ev::Slope(-d)));
        }
        if (total - 1.0).abs() > tol {
            return Err(Error::DegenerateMeasure(format!(
                "total mass {total} is not 1"
            )));
        }
        if events.is_empty() {
            return Err(Error::DegenerateMeasure("measure with no mass".into()));
        }
        events.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));

        let mut verts: Vec<[f64; 2]> = vec![[0.0, 0.0]];
        let mut x = 0.0;
        let mut y = 0.0;
        let mut slope = 0.0;
        for (ex, _, ev) in events {
            if ex > x {
                y += slope * (ex - x);
                x = ex;
                verts.push([x, y]);
            }
            match ev {
                Ev::Jump(w) => {
                    y += w;
                    verts.push([x, y]);
                }
                Ev::Slope(d) => slope += d,
            }
        }
        if x < 1.0 {
            y += slope * (1.0 - x);
            verts.push([1.0, y]);
        }
        // Remove the O(tol) closure defect by rescaling the ordinate.
        let scale = 1.0 / y.max(1e-300);
        for v in &mut verts {
            v[1] = (v[1] * scale).clamp(0.0, 1.0);
        }
        if let Some(last) = verts.last_mut() {
            last[1] = 1.0;
        }
        Ok(MonotoneGraph {
            verts: canonicalize(verts),
        })
    }

    /// CDF graph of a discrete measure.
    pub fn from_atoms(atoms: &[(f64, f64)], tol: f64) -> Result<Self> {
        Self::from_parts(atoms, &[], tol)
    }

    /// Swap abscissa and ordinate. Applied to a CDF this produces the CDF of
    /// the conjugate measure; applied twice it is the identity.
    pub fn reflect(&self) -> MonotoneGraph {
        let verts = self.verts.iter().map(|v| [v[1], v[0]]).collect();
        MonotoneGraph {
            verts: canonicalize(verts),
        }
    }

    /// Right-continuous evaluation: the largest ordinate the graph attains at
    /// abscissa `x`.
    pub fn eval(&self, x: f64) -> f64 {
        let x = x.clamp(0.0, 1.0);
        // Last vertex with vx <= x.
        let mut lo = 0usize;
        let mut hi = self.verts.len() - 1;
        if self.verts[hi][0] <= x {
            return self.verts[hi][1];
        }
        while hi - lo > 1 {
            let mid = (lo + hi) / 2;
            if self.verts[mid][0] <= x {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let a = self.verts[lo];
        let b = self.verts[hi];
        if b[0] <= a[0] + EPS_X {
            return b[1].max(a[1]);
        }
        a[1] + (b[1] - a[1]) * (x - a[0]) / (b[0] - a[0])
    }

    /// Left limit at `x` (the smallest ordinate attained at `x`).
    pub fn eval_left(&self, x: f64) -> f64 {
        let x = x.clamp(0.0, 1.0);
        if x <= self.verts[0][0] {
            return self.verts[0][1];
        }
        // First vertex with vx >= x.
        let mut lo = 0usize;
        let mut hi = self.verts.len() - 1;
        while hi - lo > 1 {
            let mid = (lo + hi) / 2;
            if self.verts[mid][0] >= x {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        let a = self.verts[lo];
        let b = self.verts[hi];
        if b[0] <= x {
            return b[1].min(self.verts[hi.min(self.verts.len() - 1)][1]);
        }
        if b[0] <= a[0] + EPS_X {
            return a[1];
        }
        a[1] + (b[1] - a[1]) * (x - a[0]) / (b[0] - a[0])
    }

    /// Atoms of the measure whose CDF this graph is: vertical runs as
    /// `(position, jump)` pairs. Canonicalization guarantees one vertical run
    /// per position.
    pub fn atoms(&self) -> Vec<(f64, f64)> {
        let mut out = Vec::new();
        for w in self.verts.windows(2) {
            if w[1][0] - w[0][0] <= EPS_X && w[1][1] > w[0][1] {
                out.push((w[0][0], w[1][1] - w[0][1]));
            }
        }
        out
    }

    /// Flats of the CDF with positive width: the open holes `(a, b)` in the
    /// support of the measure. Flats separated by an atom are distinct holes.
    pub fn flats(&self) -> Vec<(f64, f64)> {
        let mut out: Vec<(f64, f64)> = Vec::new();
        for w in self.verts.windows(2) {
            if w[1][1] - w[0][1] <= EPS_X && w[1][0] > w[0][0] + EPS_X {
                out.push((w[0][0], w[1][0]));
            }
        }
        out
    }

    /// Sloped pieces `(a, b, density)` of the CDF (positive, finite slope).
    pub fn density_pieces(&self) -> Vec<(f64, f64, f64)> {
        let mut out = Vec::new();
        for w in self.verts.windows(2) {
            let dx = w[1][0] - w[0][0];
            let dy = w[1][1] - w[0][1];
            if dx > EPS_X && dy > EPS_X {
                out.push((w[0][0], w[1][0], dy / dx));
            }
        }
        out
    }

    /// Mass of the closed interval `[a, b]` under the measure whose CDF this
    /// graph is (atoms at both endpoints included).
    pub fn mass_closed(&self, a: f64, b: f64) -> f64 {
        if b < a {
            return 0.0;
        }
        (self.eval(b) - self.eval_left(a)).max(0.0)
    }

    /// Mass of the half-open interval `[a, b)`.
    pub fn mass_half_open(&self, a: f64, b: f64) -> f64 {
        if b <= a {
            return 0.0;
        }
        (self.eval_left(b) - self.eval_left(a)).max(0.0)
    }

    /// Mass of the open interval `(a, b)` (atoms at both endpoints excluded).
    pub fn mass_open(&self, a: f64, b: f64) -> f64 {
        if b <= a {
            return 0.0;
        }
        (self.eval_left(b) - self.eval(a)).max(0.0)
    }

    /// True when the graph has no vertical runs (continuous as a function).
    pub fn is_continuous(&self) -> bool {
        self.verts
            .windows(2)
            .all(|w| !(w[1][0] - w[0][0] <= EPS_X && w[1][1] > w[0][1] + 1e-14))
    }

    /// Mean of the measure whose CDF this graph is
    /// (`int x dmu = 1 - int F(x) dx`, exact per segment).
    pub fn measure_mean(&self) -> f64 {
        let mut int_f = 0.0;
        for w in self.verts.windows(2) {
            let dx = w[1][0] - w[0][0];
            if dx > 0.0 {
                int_f += 0.5 * (w[0][1] + w[1][1]) * dx;
            }
        }
        1.0 - int_f
    }
}

/// Canonical form: sorted, monotone, anchored at `(0,0)`/`(1,1)`, no repeated
/// vertices and no collinear interior vertex.
fn canonicalize(verts: Vec<[f64; 2]>) -> Vec<[f64; 2]> {
    let mut out: Vec<[f64; 2]> = Vec::with_capacity(verts.len() + 2);
    out.push([0.0, 0.0]);
    for v in verts {
        let x = v[0].clamp(0.0, 1.0);
        let y = v[1].clamp(0.0, 1.0);
        let last = *out.last().unwrap();
        let x = x.max(last[0]);
        let y = y.max(last[1]);
        if x - last[0] <= EPS_X && y - last[1] <= EPS_X {
            continue;
        }
        // Drop the middle vertex of two collinear segments.
        if out.len() >= 2 {
            let p = out[out.len() - 2];
            let q = last;
            let r = [x, y];
            let c = (q[0] - p[0]) * (r[1] - q[1]) - (q[1] - p[1]) * (r[0] - q[0]);
            let both_vertical = q[0] - p[0] <= EPS_X && r[0] - q[0] <= EPS_X;
            let both_flat = q[1] - p[1] <= EPS_X && r[1] - q[1] <= EPS_X;
            if both_vertical || both_flat || c.abs() < 1e-300 {
                out.pop();
            }
        }
        out.push([x, y]);
    }
    let last = *out.last().unwrap();
    if 1.0 - last[0] > EPS_X || 1.0 - last[1] > EPS_X {
        out.push([1.0, 1.0]);
    } else {
        *out.last_mut().unwrap() = [1.0, 1.0];
    }
    if out.len() == 1 {
        out = vec![[0.0, 0.0], [1.0, 1.0]];
    }
    out
}

/// Non-vertical segments of a graph, read as a function of the abscissa.
fn segments(g: &MonotoneGraph) -> Vec<[f64; 4]> {
    let mut out = Vec::new();
    for w in g.verts.windows(2) {
        if w[1][0] - w[0][0] > EPS_X {
            out.push([w[0][0], w[0][1], w[1][0], w[1][1]]);
        }
    }
    if out.is_empty() {
        out.push([0.0, 1.0, 1.0, 1.0]);
    }
    out
}

fn seg_at(seg: &[f64; 4], x: f64) -> f64 {
    seg[1] + (seg[3] - seg[1]) * (x - seg[0]) / (seg[2] - seg[0])
}

/// Sweep the merged breakpoints of two graphs, handing each interval on which
/// both are affine to `emit(x0, x1, f0, f1, g0, g1)`.
fn sweep_pair<F: FnMut(f64, f64, f64, f64, f64, f64)>(
    f: &MonotoneGraph,
    g: &MonotoneGraph,
    mut emit: F,
) {
    let fs = segments(f);
    let gs = segments(g);
    let mut cuts: Vec<f64> = fs
        .iter()
        .chain(gs.iter())
        .flat_map(|s| [s[0], s[2]])
        .collect();
    cuts.push(0.0);
    cuts.push(1.0);
    cuts.sort_by(f64::total_cmp);
    cuts.dedup_by(|a, b| (*a - *b).abs() <= EPS_X);
    let mut fi = 0usize;
    let mut gi = 0usize;
    for w in cuts.windows(2) {
        let (x0, x1) = (w[0], w[1]);
        if x1 - x0 <= EPS_X {
            continue;
        }
        while fi + 1 < fs.len() && fs[fi][2] <= x0 + EPS_X {
            fi += 1;
        }
        while gi + 1 < gs.len() && gs[gi][2] <= x0 + EPS_X {
            gi += 1;
        }
        emit(
            x0,
            x1,
            seg_at(&fs[fi], x0),
            seg_at(&fs[fi], x1),
            seg_at(&gs[gi], x0),
            seg_at(&gs[gi], x1),
        );
    }
}

/// Exact `int_0^1 (f(u) - g(u))^2 du` for two graphs read as functions.
pub fn l2_sq_between(f: &MonotoneGraph, g: &MonotoneGraph) -> f64 {
    let mut acc = 0.0;
    sweep_pair(f, g, |x0, x1, f0, f1, g0, g1| {
        let d0 = f0 - g0;
        let d1 = f1 - g1;
        // int of an affine-squared over the interval.
        acc += (x1 - x0) * (d0 * d0 + d0 * d1 + d1 * d1) / 3.0;
    });
    acc.max(0.0)
}

/// Exact `int_0^1 |f(u) - g(u)| du` for two graphs read as functions.
pub fn l1_between(f: &MonotoneGraph, g: &MonotoneGraph) -> f64 {
    let mut acc = 0.0;
    sweep_pair(f, g, |x0, x1, f0, f1, g0, g1| {
        let d0 = f0 - g0;
        let d1 = f1 - g1;
        let len = x1 - x0;
        if d0 * d1 >= 0.0 {
            acc += 0.5 * (d0.abs() + d1.abs()) * len;
        } else {
            let t = d0 / (d0 - d1);
            acc += 0.5 * (d0.abs() * t + d1.abs() * (1.0 - t)) * len;
        }
    });
    acc.max(0.0)
}

/// Composition `x -> outer(inner(x))` where `outer` must be continuous (no
/// jumps). The completed-graph composition is then unambiguous: every inner
/// vertex maps through `outer`, and inner segments are split at the abscissas
/// where they cross an `outer` breakpoint.
pub fn compose_continuous_outer(
    outer: &MonotoneGraph,
    inner: &MonotoneGraph,
) -> Result<MonotoneGraph> {
    if !outer.is_continuous() {
        return Err(Error::precondition(
            "composition requires a continuous outer map",
        ));
    }
    let mut verts: Vec<[f64; 2]> = Vec::with_capacity(inner.verts.len() + outer.verts.len());
    for w in inner.verts.windows(2) {
        let (p, q) = (w[0], w[1]);
        verts.push([p[0], outer.eval(p[1])]);
        // Split a sloped inner segment where it crosses outer breakpoints.
        if q[0] - p[0] > EPS_X && q[1] - p[1] > EPS_X {
            for ov in &outer.verts {
                let ybp = ov[0];
                if ybp > p[1] + EPS_X && ybp < q[1] - EPS_X {
                    let x = p[0] + (q[0] - p[0]) * (ybp - p[1]) / (q[1] - p[1]);
                    verts.push([x, outer.eval(ybp)]);
                }
            }
        }
    }
    if let Some(last) = inner.verts.last() {
        verts.push([last[0], outer.eval(last[1])]);
    }
    verts.sort_by(|a, b| a[0].total_cmp(&b[0]).then(a[1].total_cmp(&b[1])));
    Ok(MonotoneGraph {
        verts: canonicalize(verts),
    })
}
