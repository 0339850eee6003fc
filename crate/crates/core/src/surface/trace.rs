//! Straight-line tracing through the triangulation.

use alloc::vec::Vec;

use super::{next, prev, FlatSurface};
use crate::error::{Error, Result};
use crate::math::{from_barycentric, PlanarVector};

/// Where a trace starts.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Origin {
    /// A point of triangle `tri` in its local coordinates, not at a vertex.
    Point { tri: usize, p: PlanarVector },
    /// The vertex at corner `i` of triangle `tri`.
    Corner { tri: usize, i: usize },
}

impl Origin {
    /// From barycentric coordinates; coordinates within `1e-12` of a vertex
    /// snap to that corner.
    pub fn from_barycentric(s: &FlatSurface, tri: usize, b: [f64; 3]) -> Origin {
        for (i, &x) in b.iter().enumerate() {
            if x > 1.0 - 1e-12 {
                return Origin::Corner { tri, i };
            }
        }
        Origin::Point { tri, p: from_barycentric(&s.corners(tri), b) }
    }
}

/// The part of a trace inside one triangle.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TracePiece {
    pub tri: usize,
    /// Local start and end points.
    pub a: PlanarVector,
    pub b: PlanarVector,
    /// Arc-length parameters of `a` and `b` along the whole trace.
    pub s0: f64,
    pub s1: f64,
    /// Edge and edge parameter where the trace leaves, if it does.
    pub exit: Option<(usize, f64)>,
    /// Local frame relative to the starting frame (`±1`).
    pub sigma: f64,
}

impl TracePiece {
    #[inline]
    pub fn vector(&self) -> PlanarVector {
        self.b - self.a
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Trace {
    pub pieces: Vec<TracePiece>,
    /// Corner index in the last triangle if the trace ends at a vertex.
    pub end_corner: Option<usize>,
    /// Local unit direction of travel in the last triangle.
    pub end_dir: PlanarVector,
}

impl Trace {
    pub fn end_tri(&self) -> usize {
        self.pieces.last().map(|p| p.tri).unwrap_or(0)
    }

    pub fn end_point(&self) -> PlanarVector {
        self.pieces.last().map(|p| p.b).unwrap_or(PlanarVector::ZERO)
    }

    pub fn end_sigma(&self) -> f64 {
        self.pieces.last().map(|p| p.sigma).unwrap_or(1.0)
    }

    pub fn length(&self) -> f64 {
        self.pieces.last().map(|p| p.s1).unwrap_or(0.0)
    }
}

const PIECE_CAP: usize = 1_000_000;

/// Resolve a direction leaving a vertex to the corner containing it.
///
/// `d` is a local vector of `tri`, read in the development around corner
/// `i` (counterclockwise angle from `e_i`). Returns the corner and the same
/// direction in that corner's local frame.
pub fn resolve_corner(s: &FlatSurface, tri: usize, i: usize, d: PlanarVector) -> (usize, usize, PlanarVector) {
    let e = s.edges(tri);
    // fast path: d already inside the corner (including its first edge)
    let c0 = e[i].cross(d);
    let c1 = d.cross(-e[prev(i)]);
    if (c0 > 0.0 || (c0 == 0.0 && e[i].dot(d) > 0.0)) && c1 > 0.0 {
        return (tri, i, d);
    }
    let v = s.vertex_of(tri, i);
    let phi = s.direction_angle(tri, i, d);
    let (t2, i2, _) = s.corner_at_angle(v, phi);
    let sigma = s.frame_between_corners((tri, i), (t2, i2)).unwrap_or(1.0);
    (t2, i2, d * sigma)
}

/// Trace the straight path that starts at `origin` with local holonomy `v`.
pub fn trace(s: &FlatSurface, origin: Origin, v: PlanarVector) -> Result<Trace> {
    let total = v.norm();
    if !(total > 0.0) || !total.is_finite() {
        return Err(Error::Invalid("trace with zero or non-finite vector".into()));
    }
    let scale = s.scale();
    let tol = 1e-10 * total.max(scale);
    let (mut t, mut p, mut d) = match origin {
        Origin::Point { tri, p } => (tri, p, v * (1.0 / total)),
        Origin::Corner { tri, i } => {
            let (t2, i2, d2) = resolve_corner(s, tri, i, v);
            (t2, s.corners(t2)[i2], d2 * (1.0 / total))
        }
    };
    let mut from_corner = match origin {
        Origin::Corner { .. } => true,
        Origin::Point { .. } => false,
    };
    let mut sigma = 1.0;
    let mut travelled = 0.0;
    let mut pieces = Vec::new();
    loop {
        if pieces.len() >= PIECE_CAP {
            return Err(Error::Budget { what: "trace".into(), visited: pieces.len() });
        }
        let e = s.edges(t);
        let pk = s.corners(t);
        let mut best: Option<(usize, f64, f64)> = None;
        for k in 0..3 {
            let c = d.cross(e[k]);
            if c <= 1e-14 * e[k].norm() {
                continue;
            }
            let w = pk[k] - p;
            let sk = w.cross(e[k]) / c;
            let uk = w.cross(d) / c;
            if from_corner && sk <= tol {
                continue;
            }
            if best.is_none_or(|(_, bs, _)| sk < bs) {
                best = Some((k, sk, uk));
            }
        }
        let remaining = total - travelled;
        let (k, sk, uk) = match best {
            Some(b) => b,
            None => return Err(Error::Structural("trace found no exit edge".into())),
        };
        if remaining <= sk + tol {
            let mut end = p + d * remaining;
            let mut end_corner = None;
            for (j, q) in pk.iter().enumerate() {
                if (end - *q).norm() <= 1e-9 * total.max(scale) {
                    end = *q;
                    end_corner = Some(j);
                }
            }
            pieces.push(TracePiece { tri: t, a: p, b: end, s0: travelled, s1: total, exit: None, sigma });
            return Ok(Trace { pieces, end_corner, end_dir: d });
        }
        let len = e[k].norm();
        if uk * len <= 1e-9 * scale || (1.0 - uk) * len <= 1e-9 * scale {
            let j = if uk * len <= 1e-9 * scale { k } else { next(k) };
            return Err(Error::ThroughVertex { vertex: s.vertex_of(t, j), at: travelled + sk });
        }
        let u = uk.clamp(0.0, 1.0);
        let exit = pk[k] + e[k] * u;
        pieces.push(TracePiece { tri: t, a: p, b: exit, s0: travelled, s1: travelled + sk, exit: Some((k, u)), sigma });
        travelled += sk;
        let g = s.glued(t, k);
        let rho = g.rho();
        t = g.tri;
        p = s.corners(t)[g.edge] + s.edges(t)[g.edge] * (1.0 - u);
        d = d * rho;
        sigma *= rho;
        from_corner = false;
    }
}

/// End point of the straight path from `origin` with holonomy `v`.
pub fn shoot(s: &FlatSurface, origin: Origin, v: PlanarVector) -> Result<(usize, PlanarVector, f64)> {
    let tr = trace(s, origin, v)?;
    Ok((tr.end_tri(), tr.end_point(), tr.end_sigma()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::surface::builders::{flat_torus, square_tiled};

    #[test]
    fn closed_horizontal_on_torus() {
        let s = flat_torus(1.0, 1.0).unwrap();
        let tr = trace(&s, Origin::Point { tri: 0, p: PlanarVector::new(0.5, 0.25) }, PlanarVector::new(1.0, 0.0)).unwrap();
        assert_eq!(tr.end_tri(), 0);
        assert!((tr.end_point() - PlanarVector::new(0.5, 0.25)).norm() < 1e-12);
        assert!((tr.length() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn saddle_connection_ends_at_vertex() {
        let s = flat_torus(1.0, 1.0).unwrap();
        let tr = trace(&s, Origin::Corner { tri: 0, i: 0 }, PlanarVector::new(2.0, 1.0)).unwrap();
        assert!(tr.end_corner.is_some());
        assert!((tr.length() - 5f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn through_vertex_is_an_error() {
        let s = flat_torus(1.0, 1.0).unwrap();
        let r = trace(&s, Origin::Corner { tri: 0, i: 0 }, PlanarVector::new(2.0, 2.0));
        assert!(matches!(r, Err(Error::ThroughVertex { .. })));
    }

    #[test]
    fn along_an_edge() {
        let s = square_tiled(&[1, 0], &[0, 1]).unwrap();
        let tr = trace(&s, Origin::Corner { tri: 0, i: 0 }, PlanarVector::new(1.0, 0.0)).unwrap();
        assert_eq!(tr.end_corner, Some(1));
        // the midpoint of the two-square cylinder is a (regular) vertex
        let r = trace(&s, Origin::Corner { tri: 0, i: 0 }, PlanarVector::new(2.0, 0.0));
        assert!(matches!(r, Err(Error::ThroughVertex { .. })));
    }
}
