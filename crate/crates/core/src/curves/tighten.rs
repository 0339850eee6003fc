//! Shortening a chain to its geodesic representative by local moves.
//!
//! At an anchor whose angle on one side is below π, the two adjacent
//! segments are replaced by the taut string around the vertices inside the
//! triangle they span. Each move strictly shortens the chain.

use alloc::boxed::Box;
use alloc::vec::Vec;
use core::f64::consts::PI;
#[allow(unused_imports)]
use num_traits::Float;

use super::{anchor_angles, is_geodesic, trace_chain, Segment, SegmentChain, ANGLE_TOL};
use crate::error::{Error, Result};
use crate::math::PlanarVector;
use crate::surface::visibility::{visible_in_wedge, Budget};
use crate::surface::FlatSurface;

/// A point of the new chain: vertex id and the global angle at it of the
/// direction towards the apex of the move.
#[derive(Clone, Copy)]
struct HullPoint {
    vertex: usize,
    pos: PlanarVector,
    /// Global angle, at this vertex, of the developed direction to `reference`.
    ref_angle: f64,
    reference: PlanarVector,
}

fn segment_from(s: &FlatSurface, vertex: usize, angle: f64, len: f64) -> Segment {
    let (t, i, phi) = s.corner_at_angle(vertex, angle);
    Segment::from_corner(t, i, s.direction_in_corner(t, i, phi) * len)
}

/// Signed counterclockwise angle in `(−π, π]` from `a` to `b`.
fn turn(a: PlanarVector, b: PlanarVector) -> f64 {
    a.cross(b).atan2(a.dot(b))
}

/// Convex hull (counterclockwise) keeping points on hull edges.
fn hull(mut pts: Vec<(PlanarVector, usize)>, tol: f64) -> Vec<(PlanarVector, usize)> {
    pts.sort_by(|a, b| a.0.h.total_cmp(&b.0.h).then(a.0.v.total_cmp(&b.0.v)));
    if pts.len() < 3 {
        return pts;
    }
    let mut lower: Vec<(PlanarVector, usize)> = Vec::new();
    for &p in &pts {
        while lower.len() >= 2 {
            let (a, b) = (lower[lower.len() - 2].0, lower[lower.len() - 1].0);
            if (b - a).cross(p.0 - a) < -tol {
                lower.pop();
            } else {
                break;
            }
        }
        lower.push(p);
    }
    let mut upper: Vec<(PlanarVector, usize)> = Vec::new();
    for &p in pts.iter().rev() {
        while upper.len() >= 2 {
            let (a, b) = (upper[upper.len() - 2].0, upper[upper.len() - 1].0);
            if (b - a).cross(p.0 - a) < -tol {
                upper.pop();
            } else {
                break;
            }
        }
        upper.push(p);
    }
    lower.pop();
    upper.pop();
    lower.extend(upper);
    lower
}

/// Taut string from `u` to `w` around `pts`, on the side of the origin.
fn taut(u: PlanarVector, w: PlanarVector, pts: Vec<(PlanarVector, usize)>, tol: f64) -> Vec<usize> {
    let ids: Vec<usize> = pts.iter().map(|p| p.1).collect();
    let (iu, iw) = (ids[0], ids[ids.len() - 1]);
    let h = hull(pts, tol);
    let n = h.len();
    let pu = h.iter().position(|p| p.1 == iu);
    let pw = h.iter().position(|p| p.1 == iw);
    let (Some(pu), Some(pw)) = (pu, pw) else { return alloc::vec![iu, iw] };
    let walk = |step: usize| {
        let mut out = alloc::vec![h[pu]];
        let mut k = pu;
        while k != pw {
            k = (k + step) % n;
            out.push(h[k]);
        }
        out
    };
    let a = walk(1);
    let b = walk(n - 1);
    // the chain facing the origin is the one nearer to it
    let side = |c: &Vec<(PlanarVector, usize)>| {
        c.iter().map(|p| (w - u).cross(p.0 - u) * (w - u).cross(-u)).fold(0.0, f64::max)
    };
    let pick = if side(&a) >= side(&b) { a } else { b };
    pick.into_iter().map(|p| p.1).collect()
}

/// One move at the anchor where segment `j` leaves.
fn relax(s: &FlatSurface, c: &SegmentChain, j: usize, budget: &mut Budget) -> Result<SegmentChain> {
    let p = trace_chain(s, c)?;
    let n = c.segments.len();
    let a = anchor_angles(s, &p, j).ok_or_else(|| Error::Unsupported("anchor is not a vertex".into()))?;
    let prev = (j + n - 1) % n;
    let v = a.vertex;
    let scale = s.scale();
    let len_in = c.segments[prev].length();
    let len_out = c.segments[j].length();
    let left_small = a.left < a.right;
    let width = a.left.min(a.right);
    if width < 1e-12 {
        // backtracking: two saddle connections along the same ray coincide
        if (len_in - len_out).abs() > 1e-9 * scale {
            return Err(Error::Structural("backtracking segments of different lengths".into()));
        }
        let keep: Vec<Segment> = if c.closed {
            (1..n - 1).map(|k| c.segments[(j + k) % n]).collect()
        } else {
            c.segments[..prev].iter().chain(c.segments[j + 1..].iter()).copied().collect()
        };
        if keep.is_empty() {
            return Err(Error::Invalid("chain is null-homotopic".into()));
        }
        return Ok(SegmentChain { segments: keep, closed: c.closed });
    }
    let lo = if left_small { p.segments[j].start_angle } else { p.segments[prev].end_angle };
    let (t, i, phi) = s.corner_at_angle(v, lo);
    let r = s.direction_in_corner(t, i, phi);
    let l = r.rotated(width);
    let (u_dev, w_dev) = if left_small { (l * len_in, r * len_out) } else { (r * len_in, l * len_out) };
    let u_vertex = p.segments[prev].start_vertex.ok_or_else(|| Error::Unsupported("segment not anchored".into()))?;
    let w_vertex = p.segments[j].end_vertex.ok_or_else(|| Error::Unsupported("segment not anchored".into()))?;
    let radius = len_in.max(len_out) * (1.0 + 1e-9);
    let seen = visible_in_wedge(s, t, i, r, l, width, radius, budget)?;
    let e = 1e-10 * scale;
    let orient = u_dev.cross(w_dev).signum();
    let origin_side = (w_dev - u_dev).cross(-u_dev).signum();
    let inside = |x: PlanarVector| {
        let m = e * x.norm().max(scale);
        u_dev.cross(x) * orient > m
            && x.cross(w_dev) * orient > m
            && (w_dev - u_dev).cross(x - u_dev) * origin_side >= -m
            && (x - u_dev).norm() > 1e-9 * scale
            && (x - w_dev).norm() > 1e-9 * scale
    };
    let mut pts: Vec<(PlanarVector, usize)> = Vec::new();
    let mut info: Vec<HullPoint> = Vec::new();
    pts.push((u_dev, 0));
    info.push(HullPoint { vertex: u_vertex, pos: u_dev, ref_angle: p.segments[prev].start_angle, reference: -u_dev });
    for x in &seen {
        if inside(x.pos) {
            let back = -(x.pos * x.sigma);
            pts.push((x.pos, info.len()));
            info.push(HullPoint {
                vertex: x.vertex,
                pos: x.pos,
                ref_angle: s.direction_angle(x.tri, x.corner, back),
                reference: -x.pos,
            });
        }
    }
    pts.push((w_dev, info.len()));
    info.push(HullPoint { vertex: w_vertex, pos: w_dev, ref_angle: p.segments[j].end_angle, reference: -w_dev });
    let chain = taut(u_dev, w_dev, pts, 1e-12 * scale * scale);
    let mut fresh = Vec::with_capacity(chain.len());
    for k in chain.windows(2) {
        let (x, y) = (info[k[0]], info[k[1]]);
        let d = y.pos - x.pos;
        let ang = crate::math::wrap(x.ref_angle + turn(x.reference, d), s.cone_angle(x.vertex));
        fresh.push(segment_from(s, x.vertex, ang, d.norm()));
    }
    if !c.closed {
        let mut o = Vec::with_capacity(n + fresh.len());
        o.extend_from_slice(&c.segments[..prev]);
        o.extend(fresh);
        o.extend_from_slice(&c.segments[j + 1..]);
        return Ok(SegmentChain { segments: o, closed: false });
    }
    let mut out = Vec::with_capacity(n + fresh.len());
    out.extend(fresh);
    for k in 1..n - 1 {
        out.push(c.segments[(j + k) % n]);
    }
    Ok(SegmentChain { segments: out, closed: true })
}

/// Geodesic representative of `c`, by at most `max_moves` local moves.
pub fn tighten(s: &FlatSurface, c: &SegmentChain, max_moves: usize) -> Result<SegmentChain> {
    if c.is_regular_loop() {
        return Ok(c.clone());
    }
    let mut cur = c.clone();
    let mut budget = Budget::new(crate::config::DEVELOP_BUDGET);
    for _ in 0..max_moves {
        let check = is_geodesic(s, &cur)?;
        let Some(w) = check.witness else { return Ok(cur) };
        if !(w.left.min(w.right) < PI - ANGLE_TOL) {
            return Ok(cur);
        }
        match relax(s, &cur, w.index, &mut budget) {
            Ok(next) => cur = next,
            Err(e) if e.is_budget() => {
                return Err(Error::NonConvergence { iterations: max_moves, best: Box::new(cur) })
            }
            Err(e) => return Err(e),
        }
    }
    if is_geodesic(s, &cur)?.geodesic {
        return Ok(cur);
    }
    Err(Error::NonConvergence { iterations: max_moves, best: Box::new(cur) })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::surface::builders::flat_torus;

    fn chain(vs: &[(f64, f64)]) -> SegmentChain {
        SegmentChain::closed(vs.iter().map(|&(h, v)| Segment::from_corner(0, 0, PlanarVector::new(h, v))).collect())
    }

    #[test]
    fn zig_zag_becomes_horizontal() {
        let s = flat_torus(1.0, 1.0).unwrap();
        for c in [chain(&[(1.0, 1.0), (0.0, -1.0)]), chain(&[(2.0, 1.0), (-1.0, -1.0)]), chain(&[(1.0, 2.0), (0.0, -1.0), (0.0, -1.0)])] {
            let t = tighten(&s, &c, 100).unwrap();
            assert!((t.length() - 1.0).abs() < 1e-9, "{t:?}");
            assert!(is_geodesic(&s, &t).unwrap().geodesic);
            let again = tighten(&s, &t, 100).unwrap();
            assert_eq!(again, t);
        }
    }

    #[test]
    fn geodesic_is_fixed() {
        let s = flat_torus(1.0, 1.0).unwrap();
        let c = chain(&[(2.0, 1.0)]);
        assert_eq!(tighten(&s, &c, 10).unwrap(), c);
        // corner of angle π/2 straightens to the diagonal
        let c2 = chain(&[(1.0, 0.0), (0.0, 1.0)]);
        let t = tighten(&s, &c2, 10).unwrap();
        assert_eq!(t.segments.len(), 1);
        assert!((t.length() - 2f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn budget_exhaustion_reports_best() {
        let s = flat_torus(1.0, 1.0).unwrap();
        let c = chain(&[(1.0, 2.0), (0.0, -1.0), (0.0, -1.0)]);
        match tighten(&s, &c, 0) {
            Err(Error::NonConvergence { best, .. }) => assert_eq!(*best, c),
            other => panic!("{other:?}"),
        }
    }
}
