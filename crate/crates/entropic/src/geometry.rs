//! Planar geometry primitives: convex polygons, half-plane clipping,
//! areas, centroids and exact quadratic integrals.
//!
//! Polygons are vertex lists in counterclockwise order. All routines assume
//! (and the domain constructors enforce) convexity, which keeps every clip a
//! single Sutherland-Hodgman pass.

pub type Vec2 = [f64; 2];

#[inline]
pub fn dot(a: Vec2, b: Vec2) -> f64 {
    a[0] * b[0] + a[1] * b[1]
}

#[inline]
pub fn sub(a: Vec2, b: Vec2) -> Vec2 {
    [a[0] - b[0], a[1] - b[1]]
}

#[inline]
pub fn cross(a: Vec2, b: Vec2) -> f64 {
    a[0] * b[1] - a[1] * b[0]
}

#[inline]
pub fn dist2(a: Vec2, b: Vec2) -> f64 {
    let d = sub(a, b);
    dot(d, d)
}

#[inline]
pub fn norm(a: Vec2) -> f64 {
    dot(a, a).sqrt()
}

/// Signed area of a polygon (positive for counterclockwise orientation).
pub fn signed_area(poly: &[Vec2]) -> f64 {
    let n = poly.len();
    if n < 3 {
        return 0.0;
    }
    let mut acc = 0.0;
    for i in 0..n {
        let j = (i + 1) % n;
        acc += cross(poly[i], poly[j]);
    }
    0.5 * acc
}

pub fn area(poly: &[Vec2]) -> f64 {
    signed_area(poly).abs()
}

/// Area centroid of a (non-degenerate) polygon.
pub fn centroid(poly: &[Vec2]) -> Vec2 {
    let n = poly.len();
    let mut cx = 0.0;
    let mut cy = 0.0;
    let mut a = 0.0;
    for i in 0..n {
        let j = (i + 1) % n;
        let w = cross(poly[i], poly[j]);
        a += w;
        cx += (poly[i][0] + poly[j][0]) * w;
        cy += (poly[i][1] + poly[j][1]) * w;
    }
    if a.abs() < 1e-300 {
        // Degenerate: fall back to the vertex mean.
        let inv = 1.0 / n as f64;
        let mut m = [0.0, 0.0];
        for v in poly {
            m[0] += v[0] * inv;
            m[1] += v[1] * inv;
        }
        return m;
    }
    [cx / (3.0 * a), cy / (3.0 * a)]
}

/// True when the vertex list describes a convex polygon with positive area.
/// Collinear (zero-cross) corners are accepted; the orientation must not flip.
pub fn is_convex_ccw(poly: &[Vec2]) -> bool {
    let n = poly.len();
    if n < 3 || signed_area(poly) <= 0.0 {
        return false;
    }
    for i in 0..n {
        let a = poly[i];
        let b = poly[(i + 1) % n];
        let c = poly[(i + 2) % n];
        if cross(sub(b, a), sub(c, b)) < -1e-12 {
            return false;
        }
    }
    true
}

/// Membership test for a convex CCW polygon with absolute tolerance `tol`
/// (points within `tol` of the boundary count as inside).
pub fn contains(poly: &[Vec2], p: Vec2, tol: f64) -> bool {
    let n = poly.len();
    for i in 0..n {
        let a = poly[i];
        let b = poly[(i + 1) % n];
        let e = sub(b, a);
        let len = norm(e).max(1e-300);
        if cross(e, sub(p, a)) < -tol * len {
            return false;
        }
    }
    true
}

/// Clip a convex polygon against the half-plane `dot(n, x) >= c`.
/// Returns an empty vector when nothing survives.
pub fn clip_halfplane(poly: &[Vec2], n: Vec2, c: f64) -> Vec<Vec2> {
    let k = poly.len();
    let mut out = Vec::with_capacity(k + 1);
    if k == 0 {
        return out;
    }
    for i in 0..k {
        let p0 = poly[i];
        let p1 = poly[(i + 1) % k];
        let d0 = dot(n, p0) - c;
        let d1 = dot(n, p1) - c;
        if d0 >= 0.0 {
            out.push(p0);
        }
        if (d0 > 0.0 && d1 < 0.0) || (d0 < 0.0 && d1 > 0.0) {
            let t = d0 / (d0 - d1);
            out.push([p0[0] + t * (p1[0] - p0[0]), p0[1] + t * (p1[1] - p0[1])]);
        }
    }
    if area(&out) < 1e-300 {
        out.clear();
    }
    out
}

/// Intersection of two convex polygons (clip `a` by each edge of `b`).
pub fn intersect_convex(a: &[Vec2], b: &[Vec2]) -> Vec<Vec2> {
    let mut cur = a.to_vec();
    let n = b.len();
    for i in 0..n {
        if cur.is_empty() {
            break;
        }
        let p = b[i];
        let q = b[(i + 1) % n];
        // Inside of edge p->q for a CCW polygon: cross(q-p, x-p) >= 0,
        // i.e. dot([-(q-p).y, (q-p).x], x) >= same at p.
        let e = sub(q, p);
        let nvec = [-e[1], e[0]];
        cur = clip_halfplane(&cur, nvec, dot(nvec, p));
    }
    cur
}

/// Exact integral of `x -> 0.5 * |x - z|^2` over a convex polygon.
///
/// Fan-triangulates from the first vertex; the edge-midpoint rule is exact
/// for quadratics on each triangle.
pub fn integral_half_sqdist(poly: &[Vec2], z: Vec2) -> f64 {
    let n = poly.len();
    if n < 3 {
        return 0.0;
    }
    let f = |p: Vec2| 0.5 * dist2(p, z);
    let mut acc = 0.0;
    for i in 1..(n - 1) {
        let (a, b, c) = (poly[0], poly[i], poly[i + 1]);
        let t_area = 0.5 * cross(sub(b, a), sub(c, a)).abs();
        let m_ab = [(a[0] + b[0]) / 2.0, (a[1] + b[1]) / 2.0];
        let m_bc = [(b[0] + c[0]) / 2.0, (b[1] + c[1]) / 2.0];
        let m_ca = [(c[0] + a[0]) / 2.0, (c[1] + a[1]) / 2.0];
        acc += t_area * (f(m_ab) + f(m_bc) + f(m_ca)) / 3.0;
    }
    acc
}

/// Uniform sample inside a convex polygon: pick a fan triangle by area, then
/// a uniform point in it.
pub fn sample_uniform(poly: &[Vec2], u1: f64, u2: f64, u3: f64) -> Vec2 {
    let n = poly.len();
    debug_assert!(n >= 3);
    let mut areas = Vec::with_capacity(n - 2);
    let mut total = 0.0;
    for i in 1..(n - 1) {
        let t = 0.5 * cross(sub(poly[i], poly[0]), sub(poly[i + 1], poly[0])).abs();
        total += t;
        areas.push(total);
    }
    let target = u1 * total;
    let mut idx = areas.len() - 1;
    for (i, &a) in areas.iter().enumerate() {
        if target <= a {
            idx = i;
            break;
        }
    }
    let (a, b, c) = (poly[0], poly[idx + 1], poly[idx + 2]);
    // Square-root trick for a uniform point in a triangle.
    let r1 = u2.sqrt();
    let (wa, wb, wc) = (1.0 - r1, r1 * (1.0 - u3), r1 * u3);
    [
        wa * a[0] + wb * b[0] + wc * c[0],
        wa * a[1] + wb * b[1] + wc * c[1],
    ]
}

/// Distance from a point to a segment.
pub fn dist_point_segment(p: Vec2, a: Vec2, b: Vec2) -> f64 {
    let ab = sub(b, a);
    let len2 = dot(ab, ab);
    if len2 < 1e-300 {
        return dist2(p, a).sqrt();
    }
    let t = (dot(sub(p, a), ab) / len2).clamp(0.0, 1.0);
    let proj = [a[0] + t * ab[0], a[1] + t * ab[1]];
    dist2(p, proj).sqrt()
}
