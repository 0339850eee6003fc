//! Restriction of a geodesic to a region given by convex pieces of
//! triangles.

use alloc::vec;
use alloc::vec::Vec;

use super::{trace_chain, ArcOnSurface, ArcPiece, FlatCurve, TracedPath};
use crate::error::{Error, Result};
use crate::math::{clip_segment_convex, convex_hull, merge_intervals, polygon_area, PlanarVector};
use crate::surface::trace::TracePiece;
use crate::surface::FlatSurface;

/// A union of closed convex polygons, each inside one triangle and given in
/// that triangle's local coordinates (counterclockwise).
#[derive(Clone, Debug, Default, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Region {
    /// Triangle count of the surface the region was built on.
    pub num_triangles: usize,
    pub polys: Vec<(usize, Vec<PlanarVector>)>,
}

impl Region {
    pub fn new(num_triangles: usize) -> Self {
        Region { num_triangles, polys: Vec::new() }
    }

    pub fn push(&mut self, tri: usize, poly: Vec<PlanarVector>) {
        let scale = poly.iter().fold(0.0f64, |m, p| m.max(p.h.abs()).max(p.v.abs()));
        let poly = convex_hull(&poly, 1e-13 * scale);
        if poly.len() >= 3 && polygon_area(&poly) > 0.0 {
            self.polys.push((tri, poly));
        }
    }

    pub fn area(&self) -> f64 {
        self.polys.iter().map(|(_, p)| polygon_area(p)).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.polys.is_empty()
    }

    pub fn triangles(&self) -> Vec<usize> {
        let mut t: Vec<usize> = self.polys.iter().map(|x| x.0).collect();
        t.sort_unstable();
        t.dedup();
        t
    }

    pub fn extend(&mut self, other: &Region) {
        self.polys.extend(other.polys.iter().cloned());
    }

    fn check(&self, s: &FlatSurface) -> Result<()> {
        if self.num_triangles != s.num_triangles() || self.polys.iter().any(|p| p.0 >= s.num_triangles()) {
            return Err(Error::Structural("region was built for a different surface".into()));
        }
        Ok(())
    }

    /// Parameter intervals of the path inside the region (closed, inflated
    /// by `inflate`; negative values shrink), merged.
    pub fn intervals(&self, s: &FlatSurface, p: &TracedPath, inflate: f64) -> Result<Vec<(f64, f64)>> {
        self.intervals_pieces(s, p.segments.iter().flat_map(|x| x.trace.pieces.iter()), inflate)
    }

    pub fn intervals_pieces<'a, I: Iterator<Item = &'a TracePiece>>(
        &self,
        s: &FlatSurface,
        pieces: I,
        inflate: f64,
    ) -> Result<Vec<(f64, f64)>> {
        self.check(s)?;
        let mut by_tri: Vec<Vec<usize>> = vec![Vec::new(); s.num_triangles()];
        for (k, (t, _)) in self.polys.iter().enumerate() {
            by_tri[*t].push(k);
        }
        let mut iv = Vec::new();
        for piece in pieces {
            for &k in &by_tri[piece.tri] {
                if let Some((t0, t1)) = clip_segment_convex(&self.polys[k].1, piece.a, piece.b, -inflate) {
                    let len = piece.s1 - piece.s0;
                    iv.push((piece.s0 + t0 * len, piece.s0 + t1 * len));
                }
            }
        }
        Ok(merge_intervals(iv, inflate.abs()))
    }

    /// Whether `p` (local coordinates of `tri`) lies in the region.
    pub fn contains(&self, tri: usize, p: PlanarVector, inflate: f64) -> bool {
        self.polys.iter().any(|(t, q)| *t == tri && crate::math::inside_convex(q, p, -inflate))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Restriction {
    pub arcs: Vec<ArcOnSurface>,
    /// Total weighted length.
    pub length: f64,
}

/// Components of `c`'s geodesic inside `region`.
pub fn restrict(s: &FlatSurface, c: &FlatCurve, region: &Region) -> Result<Restriction> {
    let p = trace_chain(s, &c.path(s)?)?;
    restrict_path(s, &p, c.weight, region)
}

pub fn restrict_path(s: &FlatSurface, p: &TracedPath, weight: f64, region: &Region) -> Result<Restriction> {
    let margin = 1e-9 * s.scale();
    let mut iv = region.intervals(s, p, margin)?;
    let total = p.length;
    for x in iv.iter_mut() {
        x.0 = x.0.max(0.0);
        x.1 = x.1.min(total);
    }
    iv.retain(|x| x.1 - x.0 > margin);
    if p.closed && iv.len() >= 2 {
        let first = iv[0];
        let last = iv[iv.len() - 1];
        if first.0 <= margin && last.1 >= total - margin {
            iv.remove(0);
            let n = iv.len();
            iv[n - 1] = (last.0, first.1 + total);
        }
    }
    let pieces: Vec<_> = p.segments.iter().flat_map(|x| x.trace.pieces.iter()).collect();
    let mut arcs = Vec::with_capacity(iv.len());
    let mut length = 0.0;
    for &(a, b) in &iv {
        let mut out = Vec::new();
        let mut grab = |lo: f64, hi: f64| {
            for q in &pieces {
                let (x0, x1) = (q.s0.max(lo), q.s1.min(hi));
                if x1 - x0 <= 0.0 || q.s1 <= q.s0 {
                    continue;
                }
                let d = q.b - q.a;
                let len = q.s1 - q.s0;
                out.push(ArcPiece {
                    tri: q.tri,
                    a: q.a + d * ((x0 - q.s0) / len),
                    b: q.a + d * ((x1 - q.s0) / len),
                });
            }
        };
        if b > total {
            grab(a, total);
            grab(0.0, b - total);
        } else {
            grab(a, b);
        }
        length += b - a;
        arcs.push(ArcOnSurface { start: a, end: b, pieces: out, weight });
    }
    Ok(Restriction { arcs, length: weight * length })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curves::Segment;
    use crate::surface::builders::flat_torus;

    #[test]
    fn whole_surface_region() {
        let s = flat_torus(1.0, 1.0).unwrap();
        let mut r = Region::new(2);
        for t in 0..2 {
            let c = s.corners(t);
            r.push(t, c.to_vec());
        }
        let c = FlatCurve::trajectory(Segment::from_corner(0, 0, PlanarVector::new(2.0, 1.0)), 1.0);
        let res = restrict(&s, &c, &r).unwrap();
        assert!((res.length - 5f64.sqrt()).abs() < 1e-9);
        assert_eq!(res.arcs.len(), 1);
        let bad = Region::new(3);
        assert!(restrict(&s, &c, &bad).is_err());
    }

    #[test]
    fn half_strip() {
        // lower triangle only: a horizontal loop at height 0.25 meets it on [0.25, 1]
        let s = flat_torus(1.0, 1.0).unwrap();
        let mut r = Region::new(2);
        r.push(0, s.corners(0).to_vec());
        let start = crate::math::barycentric(&s.corners(0), PlanarVector::new(0.5, 0.25));
        let c = FlatCurve::trajectory(Segment { tri: 0, start, vector: PlanarVector::new(1.0, 0.0) }, 2.0);
        let res = restrict(&s, &c, &r).unwrap();
        assert_eq!(res.arcs.len(), 1);
        assert!((res.length - 1.5).abs() < 1e-6);
    }
}
