//! The complementary pieces of a set of disjoint flat cylinders and their
//! diameters.
//!
//! Cutting every triangle along the middle leaves of the cylinders and
//! gluing the parts back across edges gives one component per piece, each
//! carrying the half-cylinders next to it. Removing the open cylinders
//! leaves the two-dimensional part `Y_q`.

#[allow(unused_imports)]
use num_traits::Float;
use alloc::collections::{BTreeMap, BinaryHeap};
use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;

use super::sweep::Sweep;
use super::{AnnulusData, ThickPiece};
use crate::curves::Region;
use crate::error::Result;
use crate::math::{clip_half_plane, inside_convex, polygon_area, PlanarVector};
use crate::surface::trace::{trace, Origin};
use crate::surface::FlatSurface;

/// A straight line `n·p = off` in a triangle's local frame.
#[derive(Clone, Copy, Debug, PartialEq)]
pub(crate) struct Line {
    pub tri: usize,
    pub n: PlanarVector,
    pub off: f64,
}

/// The part `|n·p − off| < half` of a triangle inside an open cylinder.
#[derive(Clone, Copy, Debug, PartialEq)]
pub(crate) struct Band {
    pub line: Line,
    pub half: f64,
}

/// Lines of the middle leaf through each triangle, with `n` pointing left.
pub(crate) fn chords(s: &FlatSurface, a: &AnnulusData) -> Result<Vec<Line>> {
    let c = &a.cylinder;
    let tr = trace(s, Origin::Point { tri: c.base_tri, p: c.base_point }, c.direction * c.circumference)?;
    let mut out = Vec::new();
    for p in &tr.pieces {
        let d = p.b - p.a;
        if d.norm() <= 1e-12 * s.scale() {
            continue;
        }
        let n = d.normalized().perp();
        out.push(Line { tri: p.tri, n, off: n.dot(p.a) });
    }
    Ok(out)
}

/// Bands of the cylinder in every triangle it meets, from the sweep windows.
pub(crate) fn bands(c: &super::FlatCylinder, left: &Sweep, right: &Sweep) -> Vec<Band> {
    let mut out: Vec<Band> = Vec::new();
    let half = 0.5 * c.height;
    for sw in [left, right] {
        for w in &sw.windows {
            if w.entry_y >= half {
                continue;
            }
            // strip height y = n·p + y_c
            let mut n = sw.u0.perp() * w.sigma;
            let mut off = -sw.u0.cross(w.c - sw.p0);
            if n.h < 0.0 || (n.h == 0.0 && n.v < 0.0) {
                n = -n;
                off = -off;
            }
            let tol = 1e-9 * half.max(1.0);
            if out.iter().any(|b| b.line.tri == w.tri && (b.line.n - n).norm() < 1e-9 && (b.line.off - off).abs() < tol) {
                continue;
            }
            out.push(Band { line: Line { tri: w.tri, n, off }, half });
        }
    }
    out
}

struct Part {
    tri: usize,
    poly: Vec<PlanarVector>,
    /// `(short index, left side)` for every core this part borders.
    tags: Vec<(usize, bool)>,
}

/// Union-find with path halving.
struct Dsu(Vec<usize>);

impl Dsu {
    fn find(&mut self, mut x: usize) -> usize {
        while self.0[x] != x {
            self.0[x] = self.0[self.0[x]];
            x = self.0[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) {
        let (a, b) = (self.find(a), self.find(b));
        if a != b {
            self.0[a.max(b)] = a.min(b);
        }
    }
}

/// Canonical edge slot and the parameter along it.
fn canonical(s: &FlatSurface, t: usize, k: usize, u: f64) -> ((usize, usize), f64) {
    let g = s.glued(t, k);
    if (t, k) <= (g.tri, g.edge) {
        ((t, k), u)
    } else {
        ((g.tri, g.edge), 1.0 - u)
    }
}

/// Parameter of `p` on edge `k` of `t`, if it lies there.
fn on_edge(s: &FlatSurface, t: usize, k: usize, p: PlanarVector) -> Option<f64> {
    let e = s.edges(t)[k];
    let q = s.corners(t)[k];
    let len = e.norm();
    let w = p - q;
    if (e.cross(w) / len).abs() > 1e-9 * s.scale() {
        return None;
    }
    let u = w.dot(e) / (len * len);
    (u > -1e-9 && u < 1.0 + 1e-9).then_some(u.clamp(0.0, 1.0))
}

/// Pieces of the complement of the open cylinders of `shorts`.
pub(crate) fn build_pieces(
    s: &FlatSurface,
    shorts: &[AnnulusData],
    cuts: &[Vec<Line>],
    all_bands: &[Band],
    systole: f64,
) -> Vec<ThickPiece> {
    let mut parts: Vec<Part> = Vec::new();
    for t in 0..s.num_triangles() {
        let mut cur = vec![Part { tri: t, poly: s.corners(t).to_vec(), tags: Vec::new() }];
        for (j, lines) in cuts.iter().enumerate() {
            for ln in lines.iter().filter(|l| l.tri == t) {
                let mut out = Vec::new();
                for p in cur {
                    let lo = clip_half_plane(&p.poly, ln.n, ln.off);
                    let hi = clip_half_plane(&p.poly, -ln.n, -ln.off);
                    let (alo, ahi) = (area(&lo), area(&hi));
                    if alo > 0.0 && ahi > 0.0 {
                        let mut tl = p.tags.clone();
                        tl.push((j, false));
                        let mut th = p.tags;
                        th.push((j, true));
                        out.push(Part { tri: t, poly: lo, tags: tl });
                        out.push(Part { tri: t, poly: hi, tags: th });
                    } else {
                        out.push(p);
                    }
                }
                cur = out;
            }
        }
        parts.extend(cur);
    }
    let mut dsu = Dsu((0..parts.len()).collect());
    let mut slots: BTreeMap<(usize, usize), Vec<(usize, f64, f64)>> = BTreeMap::new();
    for (idx, p) in parts.iter().enumerate() {
        let m = p.poly.len();
        for a in 0..m {
            let (x, y) = (p.poly[a], p.poly[(a + 1) % m]);
            for k in 0..3 {
                if let (Some(u0), Some(u1)) = (on_edge(s, p.tri, k, x), on_edge(s, p.tri, k, y)) {
                    let (slot, c0) = canonical(s, p.tri, k, u0);
                    let (_, c1) = canonical(s, p.tri, k, u1);
                    if (c1 - c0).abs() > 1e-9 {
                        slots.entry(slot).or_default().push((idx, c0.min(c1), c0.max(c1)));
                    }
                }
            }
        }
    }
    for list in slots.values() {
        for i in 0..list.len() {
            for j in i + 1..list.len() {
                let (a, b) = (list[i], list[j]);
                if a.2.min(b.2) - a.1.max(b.1) > 1e-9 {
                    dsu.union(a.0, b.0);
                }
            }
        }
    }
    let mut comp: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for i in 0..parts.len() {
        let r = dsu.find(i);
        comp.entry(r).or_default().push(i);
    }
    let deg_tol = 1e-7 * s.area();
    let mut out = Vec::new();
    for (id, members) in comp.values().enumerate() {
        let mut region = Region::new(s.num_triangles());
        let mut boundary: Vec<(usize, bool)> = Vec::new();
        for &i in members {
            let p = &parts[i];
            boundary.extend(p.tags.iter().copied());
            let mut polys = vec![p.poly.clone()];
            for b in all_bands.iter().filter(|b| b.line.tri == p.tri) {
                let mut next_polys = Vec::new();
                for q in polys {
                    let lo = clip_half_plane(&q, b.line.n, b.line.off - b.half);
                    let hi = clip_half_plane(&q, -b.line.n, -(b.line.off + b.half));
                    for r in [lo, hi] {
                        if area(&r) > 0.0 {
                            next_polys.push(r);
                        }
                    }
                }
                polys = next_polys;
            }
            for q in polys {
                region.push(p.tri, q);
            }
        }
        boundary.sort_unstable();
        boundary.dedup();
        let a2 = region.area();
        let degenerate = a2 <= deg_tol;
        if degenerate {
            region = Region::new(s.num_triangles());
        } else {
            let keep = 1e-12 * s.area();
            region.polys.retain(|(_, q)| polygon_area(q) > keep);
        }
        let mut sys = systole;
        for &(j, _) in &boundary {
            sys = sys.min(shorts[j].length);
        }
        let mut piece = ThickPiece {
            id,
            triangles: region.triangles(),
            boundary,
            diam: 0.0,
            degenerate,
            area: if degenerate { 0.0 } else { a2 },
            systole: sys,
            region,
        };
        piece.diam = diam_approx(s, &piece);
        out.push(piece);
    }
    out
}

fn area(p: &[PlanarVector]) -> f64 {
    if p.len() < 3 {
        0.0
    } else {
        polygon_area(p)
    }
}

/// Diameter estimate of the two-dimensional part of a piece; 0 when the
/// piece is degenerate.
pub fn diam_approx(s: &FlatSurface, piece: &ThickPiece) -> f64 {
    if piece.degenerate {
        return 0.0;
    }
    region_diam(s, &piece.region, crate::config::Config::default().diam_grid)
}

/// Diameter estimate of the whole surface.
pub fn surface_diam(s: &FlatSurface) -> f64 {
    let mut r = Region::new(s.num_triangles());
    for t in 0..s.num_triangles() {
        r.push(t, s.corners(t).to_vec());
    }
    region_diam(s, &r, crate::config::Config::default().diam_grid)
}

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
enum Key {
    Vertex(usize),
    Edge(usize, usize, i64),
    Inner(usize, usize),
}

#[derive(PartialEq)]
struct Item(f64, usize);

impl Eq for Item {}

impl PartialOrd for Item {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}

impl Ord for Item {
    fn cmp(&self, o: &Self) -> Ordering {
        o.0.total_cmp(&self.0).then(o.1.cmp(&self.1))
    }
}

/// Largest graph distance found by repeated farthest-point sweeps on a
/// sample graph of the region: polygon vertices, a grid, and points on the
/// triangle edges shared with neighbours, joined by straight segments
/// inside each convex polygon.
pub(crate) fn region_diam(s: &FlatSurface, r: &Region, grid: usize) -> f64 {
    if r.is_empty() {
        return 0.0;
    }
    let scale = s.scale();
    let q = 1e7;
    let mut ids: BTreeMap<Key, usize> = BTreeMap::new();
    let mut adj: Vec<Vec<(usize, f64)>> = Vec::new();
    let mut get = |k: Key, adj: &mut Vec<Vec<(usize, f64)>>| -> usize {
        *ids.entry(k).or_insert_with(|| {
            adj.push(Vec::new());
            adj.len() - 1
        })
    };
    let mut inner = 0usize;
    for (t, poly) in &r.polys {
        let t = *t;
        let pk = s.corners(t);
        let mut pts: Vec<PlanarVector> = poly.clone();
        let (mut lo, mut hi) = (poly[0], poly[0]);
        for p in poly {
            lo = PlanarVector::new(lo.h.min(p.h), lo.v.min(p.v));
            hi = PlanarVector::new(hi.h.max(p.h), hi.v.max(p.v));
        }
        let m = 1e-12 * scale;
        for i in 0..=grid {
            for j in 0..=grid {
                let fx = i as f64 / grid as f64;
                let fy = j as f64 / grid as f64;
                let p = PlanarVector::new(lo.h + (hi.h - lo.h) * fx, lo.v + (hi.v - lo.v) * fy);
                if inside_convex(poly, p, m) {
                    pts.push(p);
                }
            }
        }
        for (&c, &e) in pk.iter().zip(s.edges(t)) {
            for j in 1..grid {
                let p = c + e * (j as f64 / grid as f64);
                if inside_convex(poly, p, -1e-9 * scale) {
                    pts.push(p);
                }
            }
        }
        let mut nodes: Vec<(usize, PlanarVector)> = Vec::with_capacity(pts.len());
        for p in pts {
            let mut key = None;
            for (i, c) in pk.iter().enumerate() {
                if (p - *c).norm() <= 1e-9 * scale {
                    key = Some(Key::Vertex(s.vertex_of(t, i)));
                }
            }
            if key.is_none() {
                for k in 0..3 {
                    if let Some(u) = on_edge(s, t, k, p) {
                        let (slot, cu) = canonical(s, t, k, u);
                        key = Some(Key::Edge(slot.0, slot.1, (cu * q).round() as i64));
                        break;
                    }
                }
            }
            let key = key.unwrap_or_else(|| {
                inner += 1;
                Key::Inner(t, inner)
            });
            let id = get(key, &mut adj);
            if !nodes.iter().any(|x| x.0 == id) {
                nodes.push((id, p));
            }
        }
        for a in 0..nodes.len() {
            for b in a + 1..nodes.len() {
                let d = (nodes[a].1 - nodes[b].1).norm();
                adj[nodes[a].0].push((nodes[b].0, d));
                adj[nodes[b].0].push((nodes[a].0, d));
            }
        }
    }
    let mut best = 0.0f64;
    let mut src = 0;
    for _ in 0..crate::config::Config::default().diam_sweeps {
        let dist = dijkstra(&adj, src);
        let mut far = src;
        for (i, &d) in dist.iter().enumerate() {
            if d.is_finite() && d > dist[far] {
                far = i;
            }
        }
        best = best.max(dist[far]);
        if far == src {
            break;
        }
        src = far;
    }
    best
}

fn dijkstra(adj: &[Vec<(usize, f64)>], src: usize) -> Vec<f64> {
    let mut dist = vec![f64::INFINITY; adj.len()];
    dist[src] = 0.0;
    let mut heap = BinaryHeap::new();
    heap.push(Item(0.0, src));
    while let Some(Item(d, u)) = heap.pop() {
        if d > dist[u] {
            continue;
        }
        for &(v, w) in &adj[u] {
            let nd = d + w;
            if nd < dist[v] {
                dist[v] = nd;
                heap.push(Item(nd, v));
            }
        }
    }
    dist
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::surface::builders::{flat_torus, square_tiled};

    #[test]
    fn torus_diameter() {
        let s = flat_torus(1.0, 1.0).unwrap();
        let d = surface_diam(&s);
        let exact = 0.5 * 2f64.sqrt();
        assert!(d >= exact - 1e-9 && d <= 2.0 * exact, "{d}");
    }

    #[test]
    fn no_cuts_gives_one_piece() {
        let s = square_tiled(&[1, 2, 0], &[0, 1, 2]).unwrap();
        let ps = build_pieces(&s, &[], &[], &[], 1.0);
        assert_eq!(ps.len(), 1);
        assert!((ps[0].area - 3.0).abs() < 1e-12);
        assert!(!ps[0].degenerate);
        // 3 × 1 torus: diameter of the rectangle torus is √(1.5² + 0.5²)
        let exact = (1.5f64 * 1.5 + 0.25).sqrt();
        assert!(ps[0].diam >= exact - 1e-9 && ps[0].diam <= 2.0 * exact, "{}", ps[0].diam);
    }
}
