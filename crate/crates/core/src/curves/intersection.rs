//! Geometric intersection numbers of closed geodesics.
//!
//! Transverse crossings in the interior of triangles are counted directly.
//! At vertices, and along shared saddle connections, the second curve is
//! pushed off infinitesimally to its right: a contact counts once when the
//! first curve arrives on one side of the second and leaves on the other.

use alloc::vec;
use alloc::vec::Vec;

use super::{trace_chain, FlatCurve, TracedPath};
use crate::error::Result;
use crate::math::wrap;
use crate::surface::FlatSurface;

/// `i(c1, c2)`, bilinear in the weights.
pub fn intersection_number(s: &FlatSurface, c1: &FlatCurve, c2: &FlatCurve) -> Result<f64> {
    let p1 = trace_chain(s, &c1.path(s)?)?;
    let p2 = trace_chain(s, &c2.path(s)?)?;
    Ok(crossing_count(s, &p1, &p2) as f64 * c1.weight * c2.weight)
}

/// Unweighted count for two closed traced paths.
pub fn crossing_count(s: &FlatSurface, p1: &TracedPath, p2: &TracedPath) -> usize {
    interior_crossings(s, p1, p2) + vertex_crossings(s, p1, p2)
}

fn interior_crossings(s: &FlatSurface, p1: &TracedPath, p2: &TracedPath) -> usize {
    let scale = s.scale();
    let tol = 1e-9 * scale;
    let mut by_tri: Vec<Vec<usize>> = vec![Vec::new(); s.num_triangles()];
    let pieces2: Vec<_> = p2.segments.iter().flat_map(|x| x.trace.pieces.iter()).collect();
    for (k, p) in pieces2.iter().enumerate() {
        by_tri[p.tri].push(k);
    }
    let mut hits: Vec<(f64, f64)> = Vec::new();
    for a in p1.segments.iter().flat_map(|x| x.trace.pieces.iter()) {
        let corners = s.corners(a.tri);
        let d1 = a.b - a.a;
        let l1 = d1.norm();
        for &k in &by_tri[a.tri] {
            let b = pieces2[k];
            let d2 = b.b - b.a;
            let l2 = d2.norm();
            if l1 == 0.0 || l2 == 0.0 {
                continue;
            }
            let den = d1.cross(d2);
            if den.abs() <= 1e-12 * l1 * l2 {
                continue;
            }
            let w = b.a - a.a;
            let t = w.cross(d2) / den;
            let u = w.cross(d1) / den;
            let et = tol / l1;
            let eu = tol / l2;
            if t < -et || t > 1.0 + et || u < -eu || u > 1.0 + eu {
                continue;
            }
            let x = a.a + d1 * t;
            if corners.iter().any(|c| (x - *c).norm() <= tol) {
                continue;
            }
            let q1 = a.s0 + t.clamp(0.0, 1.0) * (a.s1 - a.s0);
            let q2 = b.s0 + u.clamp(0.0, 1.0) * (b.s1 - b.s0);
            hits.push((norm_param(q1, p1.length, tol), norm_param(q2, p2.length, tol)));
        }
    }
    hits.sort_by(|x, y| x.0.total_cmp(&y.0).then(x.1.total_cmp(&y.1)));
    let mut kept: Vec<(f64, f64)> = Vec::new();
    'outer: for h in hits {
        for k in kept.iter().rev() {
            if h.0 - k.0 > 2.0 * tol {
                break;
            }
            if (h.1 - k.1).abs() <= 2.0 * tol {
                continue 'outer;
            }
        }
        kept.push(h);
    }
    kept.len()
}

fn norm_param(x: f64, total: f64, tol: f64) -> f64 {
    if x >= total - tol {
        x - total
    } else {
        x
    }
}

#[derive(Clone, Copy)]
struct Visit {
    vertex: usize,
    g_in: f64,
    g_out: f64,
}

fn visits(s: &FlatSurface, p: &TracedPath) -> Vec<Option<Visit>> {
    let n = p.segments.len();
    (0..n)
        .map(|j| {
            let v = p.segments[j].start_vertex?;
            let prev = if j == 0 {
                if !p.closed {
                    return None;
                }
                n - 1
            } else {
                j - 1
            };
            let _ = s;
            Some(Visit { vertex: v, g_in: p.segments[prev].end_angle, g_out: p.segments[j].start_angle })
        })
        .collect()
}

const ANG_TOL: f64 = 1e-9;

fn same(a: f64, b: f64, theta: f64) -> bool {
    let d = wrap(a - b, theta);
    d < ANG_TOL || theta - d < ANG_TOL
}

/// Whether direction `x` lies strictly left of the curve passing `v`.
fn left_of(v: &Visit, x: f64, theta: f64) -> bool {
    wrap(x - v.g_out, theta) < wrap(v.g_in - v.g_out, theta)
}

fn vertex_crossings(s: &FlatSurface, p1: &TracedPath, p2: &TracedPath) -> usize {
    let v1 = visits(s, p1);
    let v2 = visits(s, p2);
    let (n1, n2) = (v1.len(), v2.len());
    let mut count = 0;
    for j1 in 0..n1 {
        let Some(a) = v1[j1] else { continue };
        let theta = s.cone_angle(a.vertex);
        for j2 in 0..n2 {
            let Some(b) = v2[j2] else { continue };
            if b.vertex != a.vertex {
                continue;
            }
            let in_shared = same(a.g_in, b.g_in, theta) || same(a.g_in, b.g_out, theta);
            let fwd = same(a.g_out, b.g_out, theta);
            let bwd = same(a.g_out, b.g_in, theta);
            if !fwd && !bwd {
                if !in_shared && left_of(&b, a.g_in, theta) != left_of(&b, a.g_out, theta) {
                    count += 1;
                }
                continue;
            }
            if in_shared {
                continue;
            }
            let side_start = left_of(&b, a.g_in, theta);
            let (mut k1, mut k2) = (j1, j2);
            let mut steps = 0;
            let end = loop {
                steps += 1;
                if steps > n1 + n2 {
                    break None;
                }
                k1 = (k1 + 1) % n1;
                k2 = if fwd { (k2 + 1) % n2 } else { (k2 + n2 - 1) % n2 };
                let (Some(x), Some(y)) = (v1[k1], v2[k2]) else { break None };
                let th = s.cone_angle(x.vertex);
                let cont = if fwd { y.g_out } else { y.g_in };
                if !same(x.g_out, cont, th) {
                    let _ = th;
                    break Some((y, x.g_out));
                }
            };
            if let Some((y, out)) = end {
                let th = s.cone_angle(y.vertex);
                if left_of(&y, out, th) != side_start {
                    count += 1;
                }
            }
        }
    }
    count
}
