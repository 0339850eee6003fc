//! Closed curves and arcs drawn on a flat surface.
//!
//! A curve is a chain of straight segments. Each segment is stored by the
//! triangle it starts in, its barycentric start point and its holonomy in
//! that triangle's frame, so the flow acts on a curve by acting on the
//! holonomies alone. Chain anchors sit at vertices; a closed chain with a
//! single segment may instead start at a regular point (a closed regular
//! geodesic, e.g. the leaf of a cylinder).

pub mod intersection;
pub mod restrict;
pub mod tighten;

use alloc::format;
use alloc::vec::Vec;
use core::f64::consts::PI;

use crate::decomposition::FlatCylinder;
use crate::error::{Error, Result};
use crate::math::PlanarVector;
use crate::surface::trace::{trace, Origin, Trace};
use crate::surface::visibility::SaddleConnection;
use crate::surface::FlatSurface;

pub use intersection::intersection_number;
pub use restrict::{restrict, Region, Restriction};
pub use tighten::tighten;

#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Segment {
    pub tri: usize,
    pub start: [f64; 3],
    pub vector: PlanarVector,
}

pub(crate) fn corner_bary(i: usize) -> [f64; 3] {
    let mut b = [0.0; 3];
    b[i] = 1.0;
    b
}

impl Segment {
    pub fn from_corner(tri: usize, i: usize, vector: PlanarVector) -> Self {
        Segment { tri, start: corner_bary(i), vector }
    }

    pub fn from_saddle(c: &SaddleConnection) -> Self {
        Segment::from_corner(c.tri, c.corner, c.vector)
    }

    pub fn origin(&self, s: &FlatSurface) -> Origin {
        Origin::from_barycentric(s, self.tri, self.start)
    }

    pub fn start_corner(&self) -> Option<usize> {
        self.start.iter().position(|&x| x > 1.0 - 1e-12)
    }

    #[inline]
    pub fn length(&self) -> f64 {
        self.vector.norm()
    }

    pub fn map_vector<F: Fn(PlanarVector) -> PlanarVector>(&self, f: F) -> Segment {
        Segment { tri: self.tri, start: self.start, vector: f(self.vector) }
    }
}

#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SegmentChain {
    pub segments: Vec<Segment>,
    pub closed: bool,
}

impl SegmentChain {
    pub fn closed(segments: Vec<Segment>) -> Self {
        SegmentChain { segments, closed: true }
    }

    pub fn open(segments: Vec<Segment>) -> Self {
        SegmentChain { segments, closed: false }
    }

    pub fn length(&self) -> f64 {
        self.segments.iter().map(|x| x.length()).sum()
    }

    pub fn hv(&self) -> (f64, f64) {
        self.segments.iter().fold((0.0, 0.0), |(h, v), x| (h + x.vector.h.abs(), v + x.vector.v.abs()))
    }

    /// A closed single-segment chain starting away from the vertices.
    pub fn is_regular_loop(&self) -> bool {
        self.closed && self.segments.len() == 1 && self.segments[0].start_corner().is_none()
    }

    pub fn map_vectors<F: Fn(PlanarVector) -> PlanarVector + Copy>(&self, f: F) -> SegmentChain {
        SegmentChain { segments: self.segments.iter().map(|x| x.map_vector(f)).collect(), closed: self.closed }
    }
}

/// A leaf of a flat cylinder at relative height `pos ∈ (0, 1)` measured from
/// its right-hand boundary.
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct CylinderCore {
    pub cylinder: FlatCylinder,
    pub pos: f64,
}

#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum CurveGeometry {
    Chain(SegmentChain),
    Core(CylinderCore),
}

#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct FlatCurve {
    pub geometry: CurveGeometry,
    pub weight: f64,
}

impl FlatCurve {
    pub fn chain(chain: SegmentChain, weight: f64) -> Self {
        FlatCurve { geometry: CurveGeometry::Chain(chain), weight }
    }

    pub fn core(cylinder: FlatCylinder, pos: f64, weight: f64) -> Self {
        FlatCurve { geometry: CurveGeometry::Core(CylinderCore { cylinder, pos }), weight }
    }

    /// Closed straight trajectory given by one segment.
    pub fn trajectory(seg: Segment, weight: f64) -> Self {
        FlatCurve::chain(SegmentChain::closed(alloc::vec![seg]), weight)
    }

    /// Closed saddle connection (start and end vertex must agree).
    pub fn saddle_loop(c: &SaddleConnection, weight: f64) -> Self {
        FlatCurve::trajectory(Segment::from_saddle(c), weight)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.weight > 0.0) || !self.weight.is_finite() {
            return Err(Error::Invalid(format!("curve weight {} must be positive", self.weight)));
        }
        match &self.geometry {
            CurveGeometry::Chain(c) => {
                if !c.closed {
                    return Err(Error::Invalid("curve chain is not closed".into()));
                }
                if c.segments.is_empty() {
                    return Err(Error::Invalid("empty chain".into()));
                }
                if c.segments.iter().any(|x| !(x.length() > 0.0)) {
                    return Err(Error::Invalid("zero-length segment".into()));
                }
            }
            CurveGeometry::Core(k) => {
                if !(k.pos > 0.0 && k.pos < 1.0) {
                    return Err(Error::Invalid(format!("core position {} outside (0, 1)", k.pos)));
                }
            }
        }
        Ok(())
    }

    /// The geodesic as a chain of segments, weight not included.
    pub fn path(&self, s: &FlatSurface) -> Result<SegmentChain> {
        match &self.geometry {
            CurveGeometry::Chain(c) => Ok(c.clone()),
            CurveGeometry::Core(k) => Ok(SegmentChain::closed(alloc::vec![k.cylinder.leaf(s, k.pos)?])),
        }
    }

    /// Image under the flow at time `t` (of the surface the curve lives on).
    pub fn flowed(&self, t: f64) -> FlatCurve {
        let f = move |p: PlanarVector| crate::flow::flow_vector(p, t);
        let geometry = match &self.geometry {
            CurveGeometry::Chain(c) => CurveGeometry::Chain(c.map_vectors(f)),
            CurveGeometry::Core(k) => {
                CurveGeometry::Core(CylinderCore { cylinder: k.cylinder.flowed(t), pos: k.pos })
            }
        };
        FlatCurve { geometry, weight: self.weight }
    }

    /// Image under the quarter turn `(h, v) ↦ (−v, h)`.
    pub fn rotated_quarter(&self) -> FlatCurve {
        let f = |p: PlanarVector| PlanarVector::new(-p.v, p.h);
        let geometry = match &self.geometry {
            CurveGeometry::Chain(c) => CurveGeometry::Chain(c.map_vectors(f)),
            CurveGeometry::Core(k) => CurveGeometry::Core(CylinderCore { cylinder: k.cylinder.mapped(f), pos: k.pos }),
        };
        FlatCurve { geometry, weight: self.weight }
    }

    pub fn scaled(&self, k: f64) -> FlatCurve {
        FlatCurve { geometry: self.geometry.clone(), weight: self.weight * k }
    }
}

/// An open sub-arc of a curve's geodesic representative.
#[derive(Clone, Debug, PartialEq)]
pub struct ArcOnSurface {
    /// Arc-length range on the parent's path (may wrap past the end of a
    /// closed path, in which case `end > total`).
    pub start: f64,
    pub end: f64,
    /// Pieces inside triangles, in order.
    pub pieces: Vec<ArcPiece>,
    pub weight: f64,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ArcPiece {
    pub tri: usize,
    pub a: PlanarVector,
    pub b: PlanarVector,
}

impl ArcOnSurface {
    pub fn length(&self) -> f64 {
        self.weight * self.pieces.iter().map(|p| (p.b - p.a).norm()).sum::<f64>()
    }

    pub fn hv(&self) -> (f64, f64) {
        let (h, v) = self
            .pieces
            .iter()
            .fold((0.0, 0.0), |(h, v), p| (h + (p.b.h - p.a.h).abs(), v + (p.b.v - p.a.v).abs()));
        (self.weight * h, self.weight * v)
    }
}

/// `weight × Σ |segment|`.
pub fn flat_length(s: &FlatSurface, c: &FlatCurve) -> Result<f64> {
    match &c.geometry {
        CurveGeometry::Chain(x) => Ok(c.weight * x.length()),
        CurveGeometry::Core(k) => {
            if k.cylinder.base_tri >= s.num_triangles() {
                return Err(Error::Structural("cylinder refers to a missing triangle".into()));
            }
            Ok(c.weight * k.cylinder.circumference)
        }
    }
}

/// Horizontal and vertical lengths `(h_q, v_q)`, weight included.
pub fn hv_lengths(s: &FlatSurface, c: &FlatCurve) -> Result<(f64, f64)> {
    let p = c.path(s)?;
    let (h, v) = p.hv();
    Ok((c.weight * h, c.weight * v))
}

/// One traced segment with its endpoint data.
#[derive(Clone, Debug)]
pub struct TracedSegment {
    pub seg: Segment,
    pub trace: Trace,
    /// Vertices at the ends, if anchored.
    pub start_vertex: Option<usize>,
    pub end_vertex: Option<usize>,
    /// Global cone angle of the outgoing direction at the start vertex and
    /// of the backward direction at the end vertex.
    pub start_angle: f64,
    pub end_angle: f64,
}

#[derive(Clone, Debug)]
pub struct TracedPath {
    pub segments: Vec<TracedSegment>,
    pub closed: bool,
    pub length: f64,
}

pub fn trace_chain(s: &FlatSurface, chain: &SegmentChain) -> Result<TracedPath> {
    let mut segments = Vec::with_capacity(chain.segments.len());
    let mut offset = 0.0;
    for seg in &chain.segments {
        if seg.tri >= s.num_triangles() {
            return Err(Error::Structural(format!("segment starts in missing triangle {}", seg.tri)));
        }
        let origin = seg.origin(s);
        let mut tr = trace(s, origin, seg.vector)?;
        for p in tr.pieces.iter_mut() {
            p.s0 += offset;
            p.s1 += offset;
        }
        offset += seg.length();
        let (start_vertex, start_angle) = match origin {
            Origin::Corner { tri, i } => (Some(s.vertex_of(tri, i)), s.direction_angle(tri, i, seg.vector)),
            Origin::Point { .. } => (None, 0.0),
        };
        let (end_vertex, end_angle) = match tr.end_corner {
            Some(j) => {
                let t = tr.end_tri();
                (Some(s.vertex_of(t, j)), s.direction_angle(t, j, -tr.end_dir))
            }
            None => (None, 0.0),
        };
        segments.push(TracedSegment { seg: *seg, trace: tr, start_vertex, end_vertex, start_angle, end_angle });
    }
    for w in 0..segments.len() {
        let nx = if w + 1 < segments.len() {
            Some(w + 1)
        } else if chain.closed {
            Some(0)
        } else {
            None
        };
        if let Some(nx) = nx {
            let a = &segments[w];
            let b = &segments[nx];
            let ok = match (a.end_vertex, b.start_vertex) {
                (Some(x), Some(y)) => x == y,
                (None, None) => {
                    let start = crate::math::from_barycentric(&s.corners(b.seg.tri), b.seg.start);
                    segments.len() == 1
                        && same_point(s, (a.trace.end_tri(), a.trace.end_point()), (b.seg.tri, start), 1e-7 * s.scale().max(offset))
                }
                _ => false,
            };
            if !ok {
                return Err(Error::Structural(format!("segments {w} and {nx} do not share an endpoint")));
            }
        }
    }
    Ok(TracedPath { segments, closed: chain.closed, length: offset })
}

/// Whether two local points are the same point of the surface, allowing
/// for points on a shared edge.
pub(crate) fn same_point(s: &FlatSurface, a: (usize, PlanarVector), b: (usize, PlanarVector), tol: f64) -> bool {
    if a.0 == b.0 && (a.1 - b.1).norm() <= tol {
        return true;
    }
    let pk = s.corners(a.0);
    let e = s.edges(a.0);
    (0..3).any(|k| {
        let g = s.glued(a.0, k);
        if g.tri != b.0 {
            return false;
        }
        let w = a.1 - pk[k];
        let len = e[k].norm();
        if (e[k].cross(w) / len).abs() > tol {
            return false;
        }
        let u = w.dot(e[k]) / (len * len);
        let q = s.corners(g.tri)[g.edge] + s.edges(g.tri)[g.edge] * (1.0 - u);
        (q - b.1).norm() <= tol
    })
}

/// Angles on the left and right of a chain at one anchor.
#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Anchor {
    /// Index of the segment leaving the anchor.
    pub index: usize,
    pub vertex: usize,
    pub left: f64,
    pub right: f64,
}

/// At the start of segment `j`: incoming back-direction angle `g_in` and
/// outgoing `g_out`; the left side is swept counterclockwise from `g_out`
/// to `g_in`.
pub(crate) fn anchor_angles(s: &FlatSurface, p: &TracedPath, j: usize) -> Option<Anchor> {
    let n = p.segments.len();
    let prev = if j == 0 {
        if !p.closed {
            return None;
        }
        n - 1
    } else {
        j - 1
    };
    let v = p.segments[j].start_vertex?;
    let theta = s.cone_angle(v);
    let g_in = p.segments[prev].end_angle;
    let g_out = p.segments[j].start_angle;
    let left = crate::math::wrap(g_in - g_out, theta);
    Some(Anchor { index: j, vertex: v, left, right: theta - left })
}

#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct GeodesicCheck {
    pub geodesic: bool,
    pub witness: Option<Anchor>,
}

pub const ANGLE_TOL: f64 = 1e-9;

/// Angle test: every interior anchor has angle at least π on both sides.
pub fn is_geodesic(s: &FlatSurface, c: &SegmentChain) -> Result<GeodesicCheck> {
    if c.is_regular_loop() {
        trace_chain(s, c)?;
        return Ok(GeodesicCheck { geodesic: true, witness: None });
    }
    for (j, seg) in c.segments.iter().enumerate() {
        if seg.start_corner().is_none() {
            return Err(Error::Unsupported(format!("segment {j} does not start at a vertex")));
        }
    }
    let p = trace_chain(s, c)?;
    for j in 0..p.segments.len() {
        if let Some(a) = anchor_angles(s, &p, j) {
            if a.left < PI - ANGLE_TOL || a.right < PI - ANGLE_TOL {
                return Ok(GeodesicCheck { geodesic: false, witness: Some(a) });
            }
        }
    }
    Ok(GeodesicCheck { geodesic: true, witness: None })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::surface::builders::flat_torus;
    use crate::surface::visibility::{saddle_connections, Budget};

    fn torus_curve(p: f64, q: f64) -> FlatCurve {
        FlatCurve::trajectory(Segment::from_corner(0, 0, PlanarVector::new(p, q)), 1.0)
    }

    #[test]
    fn lengths() {
        let s = flat_torus(1.0, 1.0).unwrap();
        assert_eq!(flat_length(&s, &torus_curve(1.0, 0.0)).unwrap(), 1.0);
        assert_eq!(hv_lengths(&s, &torus_curve(1.0, 1.0)).unwrap(), (1.0, 1.0));
        let seg = Segment::from_corner(0, 0, PlanarVector::new(3.0, 4.0));
        assert_eq!(SegmentChain::open(alloc::vec![seg]).length(), 5.0);
    }

    #[test]
    fn single_saddle_connection_is_geodesic() {
        let s = flat_torus(1.0, 1.0).unwrap();
        for c in saddle_connections(&s, 2.5, &mut Budget::new(100_000)).unwrap() {
            let ch = SegmentChain::open(alloc::vec![Segment::from_saddle(&c)]);
            assert!(is_geodesic(&s, &ch).unwrap().geodesic);
            let loop_ = SegmentChain::closed(alloc::vec![Segment::from_saddle(&c)]);
            assert!(is_geodesic(&s, &loop_).unwrap().geodesic);
        }
    }

    #[test]
    fn doubling_back_is_not_geodesic() {
        let s = flat_torus(1.0, 1.0).unwrap();
        let a = Segment::from_corner(0, 0, PlanarVector::new(1.0, 0.0));
        let b = Segment::from_corner(0, 0, PlanarVector::new(-1.0, 0.0));
        let r = is_geodesic(&s, &SegmentChain::closed(alloc::vec![a, b])).unwrap();
        assert!(!r.geodesic);
        let w = r.witness.unwrap();
        assert!(w.left.min(w.right) < 1e-9);
    }
}
