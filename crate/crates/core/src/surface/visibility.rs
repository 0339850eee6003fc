//! Developing wedges of directions out of a vertex: saddle connections and
//! the vertices visible inside a sector.

use alloc::string::String;
use alloc::vec::Vec;

use super::{next, prev, FlatSurface};
use crate::error::{Error, Result};
use crate::math::PlanarVector;

/// Straight segment between two vertices with no vertex in its interior.
#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SaddleConnection {
    pub start_vertex: usize,
    pub end_vertex: usize,
    /// Starting corner `(tri, i)` and holonomy in `tri`'s local frame.
    pub tri: usize,
    pub corner: usize,
    pub vector: PlanarVector,
    pub length: f64,
    /// Final corner and the local direction there pointing back along the
    /// connection.
    pub end_tri: usize,
    pub end_corner: usize,
    pub end_back: PlanarVector,
}

impl SaddleConnection {
    pub fn start_angle(&self, s: &FlatSurface) -> f64 {
        s.direction_angle(self.tri, self.corner, self.vector)
    }

    pub fn end_angle(&self, s: &FlatSurface) -> f64 {
        s.direction_angle(self.end_tri, self.end_corner, self.end_back)
    }
}

/// A vertex seen from the origin of a development.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Visible {
    pub vertex: usize,
    /// Developed position (origin at the viewing vertex).
    pub pos: PlanarVector,
    /// Triangle and corner where the ray arrives, with that triangle's frame
    /// sign relative to the development.
    pub tri: usize,
    pub corner: usize,
    pub sigma: f64,
    /// Corner at the origin the ray leaves through, and its frame sign.
    pub from: (usize, usize),
    pub from_sigma: f64,
}

/// Counts developed triangles against a cap.
#[derive(Clone, Debug)]
pub struct Budget {
    pub cap: usize,
    pub used: usize,
}

impl Budget {
    pub fn new(cap: usize) -> Self {
        Budget { cap, used: 0 }
    }

    #[inline]
    pub(crate) fn spend(&mut self, what: &str) -> Result<()> {
        self.used += 1;
        if self.used > self.cap {
            return Err(Error::Budget { what: String::from(what), visited: self.used });
        }
        Ok(())
    }
}

#[derive(Clone, Copy)]
struct Job {
    tri: usize,
    edge: usize,
    sigma: f64,
    c: PlanarVector,
    r: PlanarVector,
    l: PlanarVector,
}

const ANG_EPS: f64 = 1e-12;

/// Whether `x` lies strictly counterclockwise of `a` (normalised test).
#[inline]
fn left_of(a: PlanarVector, x: PlanarVector) -> bool {
    a.cross(x) > ANG_EPS * a.norm() * x.norm()
}

fn segment_distance(a: PlanarVector, b: PlanarVector) -> f64 {
    let d = b - a;
    let n2 = d.norm_sq();
    if n2 == 0.0 {
        return a.norm();
    }
    let t = (-(a.dot(d)) / n2).clamp(0.0, 1.0);
    (a + d * t).norm()
}

/// Distance from the origin to the part of segment `p q` between the rays
/// `r` and `l`, where `r` is on the side of `p`.
fn clipped_distance(p: PlanarVector, q: PlanarVector, r: PlanarVector, l: PlanarVector) -> f64 {
    let d = q - p;
    let hit = |u: PlanarVector, end: PlanarVector| {
        let den = u.cross(d);
        if u == end || den.abs() <= ANG_EPS * u.norm() * d.norm() {
            return end;
        }
        u * (p.cross(d) / den)
    };
    segment_distance(hit(r, p), hit(l, q))
}

/// Develop the open wedge `(r, l)` (counterclockwise from `r` to `l`, less
/// than a half-turn) that passes through edge `k0` of the triangle `t0`
/// adjacent to the origin, reporting every vertex seen within `radius`.
fn descend<F: FnMut(Visible)>(
    s: &FlatSurface,
    start: (usize, usize),
    start_sigma: f64,
    t0: usize,
    k0: usize,
    sigma0: f64,
    c0: PlanarVector,
    r0: PlanarVector,
    l0: PlanarVector,
    radius: f64,
    budget: &mut Budget,
    visit: &mut F,
) -> Result<()> {
    let mut stack: Vec<Job> = Vec::new();
    let push = |stack: &mut Vec<Job>, t: usize, k: usize, sigma: f64, c: PlanarVector, r: PlanarVector, l: PlanarVector| {
        let g = s.glued(t, k);
        let s2 = sigma * g.rho();
        let dev_right = c + s.corners(t)[next(k)] * sigma;
        let c2 = dev_right - s.corners(g.tri)[g.edge] * s2;
        stack.push(Job { tri: g.tri, edge: g.edge, sigma: s2, c: c2, r, l });
    };
    push(&mut stack, t0, k0, sigma0, c0, r0, l0);
    let reach = radius * (1.0 + 1e-12);
    while let Some(job) = stack.pop() {
        budget.spend("saddle-connection development")?;
        let Job { tri, edge: k, sigma, c, r, l } = job;
        let pk = s.corners(tri);
        let dev = |i: usize| c + pk[i] * sigma;
        let left = dev(k);
        let right = dev(next(k));
        let far = dev(prev(k));
        if left_of(r, far) && left_of(far, l) && far.norm() <= reach {
            visit(Visible {
                vertex: s.vertex_of(tri, prev(k)),
                pos: far,
                tri,
                corner: prev(k),
                sigma,
                from: start,
                from_sigma: start_sigma,
            });
        }
        // right part: edge k+1 from `right` to `far`
        {
            let rr = if left_of(r, right) { right } else { r };
            let ll = if left_of(far, l) { far } else { l };
            if left_of(rr, ll) && clipped_distance(right, far, rr, ll) <= reach {
                push(&mut stack, tri, next(k), sigma, c, rr, ll);
            }
        }
        // left part: edge k+2 from `far` to `left`
        {
            let rr = if left_of(r, far) { far } else { r };
            let ll = if left_of(left, l) { left } else { l };
            if left_of(rr, ll) && clipped_distance(far, left, rr, ll) <= reach {
                push(&mut stack, tri, prev(k), sigma, c, rr, ll);
            }
        }
    }
    Ok(())
}

/// All saddle connections of length at most `radius` leaving vertex `v`.
pub fn saddle_connections_from(
    s: &FlatSurface,
    v: usize,
    radius: f64,
    budget: &mut Budget,
) -> Result<Vec<SaddleConnection>> {
    let mut out = Vec::new();
    for &(t, i) in &s.vertex(v).corners {
        let e = s.edges(t);
        if e[i].norm() <= radius * (1.0 + 1e-12) {
            out.push(SaddleConnection {
                start_vertex: v,
                end_vertex: s.vertex_of(t, next(i)),
                tri: t,
                corner: i,
                vector: e[i],
                length: e[i].norm(),
                end_tri: t,
                end_corner: next(i),
                end_back: -e[i],
            });
        }
        let pk = s.corners(t);
        let c = -pk[i];
        let r = e[i];
        let l = -e[prev(i)];
        if segment_distance(c + pk[next(i)], c + pk[prev(i)]) > radius {
            continue;
        }
        descend(s, (t, i), 1.0, t, next(i), 1.0, c, r, l, radius, budget, &mut |x: Visible| {
            out.push(SaddleConnection {
                start_vertex: v,
                end_vertex: x.vertex,
                tri: t,
                corner: i,
                vector: x.pos,
                length: x.pos.norm(),
                end_tri: x.tri,
                end_corner: x.corner,
                end_back: -(x.pos * x.sigma),
            });
        })?;
    }
    Ok(out)
}

/// Every saddle connection of length at most `radius`, once per oriented
/// direction (so each unoriented connection appears twice), sorted by
/// length then start angle.
pub fn saddle_connections(s: &FlatSurface, radius: f64, budget: &mut Budget) -> Result<Vec<SaddleConnection>> {
    let mut out = Vec::new();
    for v in 0..s.num_vertices() {
        out.extend(saddle_connections_from(s, v, radius, budget)?);
    }
    out.sort_by(|a, b| {
        a.length
            .partial_cmp(&b.length)
            .unwrap_or(core::cmp::Ordering::Equal)
            .then(a.start_vertex.cmp(&b.start_vertex))
            .then(
                a.start_angle(s)
                    .partial_cmp(&b.start_angle(s))
                    .unwrap_or(core::cmp::Ordering::Equal),
            )
    });
    Ok(out)
}

/// Vertices visible from corner `(t, i)`'s vertex inside the open wedge
/// from direction `r` to direction `l` (counterclockwise, less than a
/// half-turn, angular width `width`). `r` lies in the corner `(t, i)` and
/// the development uses that triangle's frame with the vertex at the origin.
pub fn visible_in_wedge(
    s: &FlatSurface,
    t: usize,
    i: usize,
    r: PlanarVector,
    l: PlanarVector,
    width: f64,
    radius: f64,
    budget: &mut Budget,
) -> Result<Vec<Visible>> {
    let mut out = Vec::new();
    let v = s.vertex_of(t, i);
    let n = s.vertex(v).corners.len();
    let a0 = crate::math::ccw_angle(s.edges(t)[i], r);
    let mut a = -a0;
    let (mut ct, mut ci, mut sigma) = (t, i, 1.0);
    let origin_shift = |tt: usize, ii: usize, sg: f64| -(s.corners(tt)[ii] * sg);
    for _ in 0..=n {
        if a >= width {
            break;
        }
        let theta = s.corner_angle(ct, ci);
        if a + theta > 0.0 {
            let e = s.edges(ct);
            let rc = e[ci] * sigma;
            let lc = -(e[prev(ci)] * sigma);
            if a > 0.0 && rc.norm() <= radius * (1.0 + 1e-12) {
                out.push(Visible {
                    vertex: s.vertex_of(ct, next(ci)),
                    pos: rc,
                    tri: ct,
                    corner: next(ci),
                    sigma,
                    from: (ct, ci),
                    from_sigma: sigma,
                });
            }
            let rr = if a > 0.0 { rc } else { r };
            let ll = if a + theta < width { lc } else { l };
            let c = origin_shift(ct, ci, sigma);
            let pk = s.corners(ct);
            if left_of(rr, ll) && segment_distance(c + pk[next(ci)] * sigma, c + pk[prev(ci)] * sigma) <= radius {
                descend(s, (ct, ci), sigma, ct, next(ci), sigma, c, rr, ll, radius, budget, &mut |x| out.push(x))?;
            }
        }
        a += theta;
        let g = s.glued(ct, prev(ci));
        sigma *= g.rho();
        ct = g.tri;
        ci = g.edge;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::surface::builders::flat_torus;

    fn gcd(a: i64, b: i64) -> i64 {
        if b == 0 {
            a.abs()
        } else {
            gcd(b, a % b)
        }
    }

    #[test]
    fn torus_saddle_connections_are_primitive_vectors() {
        let s = flat_torus(1.0, 1.0).unwrap();
        let r = 3.5;
        let sc = saddle_connections(&s, r, &mut Budget::new(1_000_000)).unwrap();
        let mut expected = 0;
        for p in -4i64..=4 {
            for q in -4i64..=4 {
                if (p, q) != (0, 0) && gcd(p, q) == 1 && ((p * p + q * q) as f64).sqrt() <= r {
                    expected += 1;
                }
            }
        }
        assert_eq!(sc.len(), expected);
        for c in &sc {
            let (p, q) = (c.vector.h.round() as i64, c.vector.v.round() as i64);
            assert!((c.vector.h - p as f64).abs() < 1e-9 && (c.vector.v - q as f64).abs() < 1e-9);
            assert_eq!(gcd(p, q), 1);
        }
    }

    #[test]
    fn budget_is_enforced() {
        let s = flat_torus(1.0, 1.0).unwrap();
        let r = saddle_connections(&s, 50.0, &mut Budget::new(100));
        assert!(matches!(r, Err(Error::Budget { .. })));
    }
}
