//! Triangulated half-translation surfaces.
//!
//! A triangle is stored by its three edge holonomies `e0, e1, e2` in a local
//! frame, listed counterclockwise, so the local vertex positions are
//! `P0 = 0`, `P1 = e0`, `P2 = e0 + e1` and edge `k` runs from `P_k` to
//! `P_{k+1}`. Gluing edge slot `(t, k)` to `(t', k')` with sign `s` means
//! `e'_{k'} = s·e_k`; `s = -1` is a translation and `s = +1` a half-turn.
//! Either way `P_k` is identified with `Q_{k'+1}` and `P_{k+1}` with `Q_{k'}`.

pub mod builders;
pub mod trace;
pub mod visibility;

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::{PI, TAU};

use crate::error::{Error, Result};
use crate::math::{ccw_angle, PlanarVector};
#[allow(unused_imports)]
use num_traits::Float;

/// Partner of an edge slot.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Gluing {
    pub tri: usize,
    pub edge: usize,
    /// `-1` translation, `+1` half-turn.
    pub sign: i8,
}

impl Gluing {
    /// Linear part of the chart change into the partner triangle.
    #[inline]
    pub fn rho(&self) -> f64 {
        -(self.sign as f64)
    }
}

#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Vertex {
    /// Corners `(tri, local index)` in counterclockwise order.
    pub corners: Vec<(usize, usize)>,
    pub angle: f64,
    pub marked: bool,
}

#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SingularPoint {
    pub vertex: usize,
    /// Cone angle divided by π.
    pub order: f64,
    pub marked: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct FlatSurface {
    triangles: Vec<[PlanarVector; 3]>,
    gluing: Vec<[Gluing; 3]>,
    vertex_of: Vec<[usize; 3]>,
    corner_offset: Vec<[f64; 3]>,
    corner_angle: Vec<[f64; 3]>,
    vertices: Vec<Vertex>,
    area: f64,
}

#[inline]
pub(crate) fn next(k: usize) -> usize {
    if k == 2 {
        0
    } else {
        k + 1
    }
}

#[inline]
pub(crate) fn prev(k: usize) -> usize {
    if k == 0 {
        2
    } else {
        k - 1
    }
}

impl FlatSurface {
    /// Assemble a surface from triangles and glued slot pairs.
    ///
    /// Only combinatorial consistency is enforced here; geometric invariants
    /// are reported by [`FlatSurface::validate`].
    pub fn from_parts(
        triangles: Vec<[PlanarVector; 3]>,
        pairs: &[((usize, usize), (usize, usize), i8)],
        marked: &[usize],
    ) -> Result<FlatSurface> {
        let n = triangles.len();
        if n == 0 {
            return Err(Error::Construction("no triangles".into()));
        }
        let unset = Gluing { tri: usize::MAX, edge: 0, sign: 0 };
        let mut gluing = vec![[unset; 3]; n];
        for &((t, k), (u, l), s) in pairs {
            if t >= n || u >= n || k > 2 || l > 2 {
                return Err(Error::Structural(format!("gluing ({t},{k})-({u},{l}) out of range")));
            }
            if s != 1 && s != -1 {
                return Err(Error::Structural(format!("gluing ({t},{k})-({u},{l}) has sign {s}")));
            }
            if (t, k) == (u, l) {
                return Err(Error::Structural(format!("edge ({t},{k}) glued to itself")));
            }
            for (a, b, c, d) in [(t, k, u, l), (u, l, t, k)] {
                if gluing[a][b].tri != usize::MAX {
                    return Err(Error::Structural(format!("edge ({a},{b}) glued twice")));
                }
                gluing[a][b] = Gluing { tri: c, edge: d, sign: s };
            }
        }
        for (t, g) in gluing.iter().enumerate() {
            for (k, e) in g.iter().enumerate() {
                if e.tri == usize::MAX {
                    return Err(Error::Structural(format!("edge ({t},{k}) is not glued")));
                }
            }
        }
        let mut s = FlatSurface {
            triangles,
            gluing,
            vertex_of: Vec::new(),
            corner_offset: Vec::new(),
            corner_angle: Vec::new(),
            vertices: Vec::new(),
            area: 0.0,
        };
        s.derive(marked)?;
        Ok(s)
    }

    fn derive(&mut self, marked: &[usize]) -> Result<()> {
        let n = self.triangles.len();
        self.corner_angle = self
            .triangles
            .iter()
            .map(|e| [0, 1, 2].map(|i| ccw_angle(e[i], -e[prev(i)])))
            .collect();
        self.area = self.triangles.iter().map(|e| 0.5 * e[0].cross(e[1])).sum();
        self.vertex_of = vec![[usize::MAX; 3]; n];
        self.corner_offset = vec![[0.0; 3]; n];
        self.vertices.clear();
        for t in 0..n {
            for i in 0..3 {
                if self.vertex_of[t][i] != usize::MAX {
                    continue;
                }
                let id = self.vertices.len();
                let mut corners = Vec::new();
                let mut acc = 0.0;
                let (mut ct, mut ci) = (t, i);
                loop {
                    if self.vertex_of[ct][ci] != usize::MAX {
                        return Err(Error::Structural(format!(
                            "corner ({ct},{ci}) reached twice while walking vertex {id}"
                        )));
                    }
                    self.vertex_of[ct][ci] = id;
                    self.corner_offset[ct][ci] = acc;
                    acc += self.corner_angle[ct][ci];
                    corners.push((ct, ci));
                    let g = self.gluing[ct][prev(ci)];
                    ct = g.tri;
                    ci = g.edge;
                    if (ct, ci) == (t, i) {
                        break;
                    }
                    if corners.len() > 3 * n {
                        return Err(Error::Structural(format!("vertex {id} does not close up")));
                    }
                }
                self.vertices.push(Vertex { corners, angle: acc, marked: false });
            }
        }
        for &m in marked {
            if m >= self.vertices.len() {
                return Err(Error::Structural(format!("marked vertex {m} does not exist")));
            }
            self.vertices[m].marked = true;
        }
        Ok(())
    }

    /// Same combinatorics with every holonomy replaced by `f(holonomy)`.
    pub fn map_holonomies<F: Fn(PlanarVector) -> PlanarVector>(&self, f: F) -> Result<FlatSurface> {
        let triangles = self.triangles.iter().map(|e| [f(e[0]), f(e[1]), f(e[2])]).collect();
        let mut s = FlatSurface {
            triangles,
            gluing: self.gluing.clone(),
            vertex_of: Vec::new(),
            corner_offset: Vec::new(),
            corner_angle: Vec::new(),
            vertices: Vec::new(),
            area: 0.0,
        };
        let marked = self.marked_vertices();
        s.derive(&marked)?;
        Ok(s)
    }

    #[inline]
    pub fn num_triangles(&self) -> usize {
        self.triangles.len()
    }

    #[inline]
    pub fn num_vertices(&self) -> usize {
        self.vertices.len()
    }

    #[inline]
    pub fn edges(&self, t: usize) -> &[PlanarVector; 3] {
        &self.triangles[t]
    }

    pub fn triangles(&self) -> &[[PlanarVector; 3]] {
        &self.triangles
    }

    #[inline]
    pub fn glued(&self, t: usize, k: usize) -> Gluing {
        self.gluing[t][k]
    }

    /// Each glued pair once, as `((t, k), (t', k'), sign)` with `(t, k) < (t', k')`.
    pub fn gluing_pairs(&self) -> Vec<((usize, usize), (usize, usize), i8)> {
        let mut out = Vec::new();
        for t in 0..self.triangles.len() {
            for k in 0..3 {
                let g = self.gluing[t][k];
                if (t, k) < (g.tri, g.edge) {
                    out.push(((t, k), (g.tri, g.edge), g.sign));
                }
            }
        }
        out
    }

    /// Local positions `[P0, P1, P2]`.
    #[inline]
    pub fn corners(&self, t: usize) -> [PlanarVector; 3] {
        let e = &self.triangles[t];
        [PlanarVector::ZERO, e[0], e[0] + e[1]]
    }

    #[inline]
    pub fn vertex_of(&self, t: usize, i: usize) -> usize {
        self.vertex_of[t][i]
    }

    #[inline]
    pub fn corner_angle(&self, t: usize, i: usize) -> f64 {
        self.corner_angle[t][i]
    }

    /// Angle at which corner `(t, i)` starts inside its vertex's cone.
    #[inline]
    pub fn corner_offset(&self, t: usize, i: usize) -> f64 {
        self.corner_offset[t][i]
    }

    pub fn vertex(&self, v: usize) -> &Vertex {
        &self.vertices[v]
    }

    pub fn vertices(&self) -> &[Vertex] {
        &self.vertices
    }

    #[inline]
    pub fn cone_angle(&self, v: usize) -> f64 {
        self.vertices[v].angle
    }

    pub fn marked_vertices(&self) -> Vec<usize> {
        (0..self.vertices.len()).filter(|&v| self.vertices[v].marked).collect()
    }

    pub fn singular_points(&self) -> Vec<SingularPoint> {
        self.vertices
            .iter()
            .enumerate()
            .map(|(v, x)| SingularPoint { vertex: v, order: x.angle / PI, marked: x.marked })
            .collect()
    }

    #[inline]
    pub fn area(&self) -> f64 {
        self.area
    }

    pub fn euler_characteristic(&self) -> i64 {
        let f = self.triangles.len() as i64;
        self.vertices.len() as i64 - 3 * f / 2 + f
    }

    /// Longest edge, a natural length scale for tolerances.
    pub fn scale(&self) -> f64 {
        self.triangles
            .iter()
            .flat_map(|e| e.iter())
            .map(|e| e.norm())
            .fold(0.0, f64::max)
    }

    /// Global angle in the cone of the vertex at corner `(t, i)` of the
    /// direction `d`, measured counterclockwise from `e_i` and reduced modulo
    /// the cone angle. `d` is a local vector of triangle `t`; directions past
    /// the corner are allowed as long as they are within a half-turn of it.
    pub fn direction_angle(&self, t: usize, i: usize, d: PlanarVector) -> f64 {
        let v = self.vertex_of[t][i];
        let theta = self.vertices[v].angle;
        let a = self.corner_offset[t][i] + ccw_angle(self.triangles[t][i], d);
        crate::math::wrap(a, theta)
    }

    /// Corner of vertex `v` containing global angle `phi`, with the local
    /// angle measured from its first edge.
    pub fn corner_at_angle(&self, v: usize, phi: f64) -> (usize, usize, f64) {
        let x = &self.vertices[v];
        let phi = crate::math::wrap(phi, x.angle);
        let mut best = x.corners[0];
        for &(t, i) in &x.corners {
            if self.corner_offset[t][i] <= phi + 1e-15 {
                best = (t, i);
            }
        }
        let (t, i) = best;
        (t, i, (phi - self.corner_offset[t][i]).max(0.0))
    }

    /// Sign relating the local frames of two corners of the same vertex,
    /// accumulated along the counterclockwise corner walk.
    pub fn frame_between_corners(&self, from: (usize, usize), to: (usize, usize)) -> Option<f64> {
        let v = self.vertex_of[from.0][from.1];
        if self.vertex_of[to.0][to.1] != v {
            return None;
        }
        let (mut t, mut i) = from;
        let mut sigma = 1.0;
        for _ in 0..=self.vertices[v].corners.len() {
            if (t, i) == to {
                return Some(sigma);
            }
            let g = self.gluing[t][prev(i)];
            sigma *= g.rho();
            t = g.tri;
            i = g.edge;
        }
        None
    }

    /// Local direction in corner `(t, i)`'s triangle with local angle `phi`
    /// from `e_i`.
    pub fn direction_in_corner(&self, t: usize, i: usize, phi: f64) -> PlanarVector {
        self.triangles[t][i].normalized().rotated(phi)
    }

    /// Every violated invariant; empty means the surface is valid.
    pub fn validate(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        let scale = self.scale().max(f64::MIN_POSITIVE);
        for (t, e) in self.triangles.iter().enumerate() {
            for (k, x) in e.iter().enumerate() {
                if !x.is_finite() {
                    out.push(Violation::new(ViolationKind::NonFinite, format!("edge ({t},{k})"), String::new()));
                } else if x.norm() == 0.0 {
                    out.push(Violation::new(ViolationKind::ZeroEdge, format!("edge ({t},{k})"), String::new()));
                }
            }
            let sum = e[0] + e[1] + e[2];
            let m = e.iter().map(|x| x.norm()).fold(0.0, f64::max).max(f64::MIN_POSITIVE);
            if !(sum.norm() <= 1e-12 * m) {
                out.push(Violation::new(
                    ViolationKind::TriangleClosure,
                    format!("triangle {t}"),
                    format!("edge sum ({:e}, {:e})", sum.h, sum.v),
                ));
            }
            if !(e[0].cross(e[1]) > 0.0) {
                out.push(Violation::new(
                    ViolationKind::Orientation,
                    format!("triangle {t}"),
                    "edges are not counterclockwise".into(),
                ));
            }
        }
        for t in 0..self.triangles.len() {
            for k in 0..3 {
                let g = self.gluing[t][k];
                if (t, k) > (g.tri, g.edge) {
                    continue;
                }
                let a = self.triangles[t][k];
                let b = self.triangles[g.tri][g.edge];
                let d = b - a * (g.sign as f64);
                if !(d.norm() <= 1e-12 * scale) {
                    out.push(Violation::new(
                        ViolationKind::HolonomyMismatch,
                        format!("edges ({t},{k}) and ({},{})", g.tri, g.edge),
                        format!("sign {} mismatch ({:e}, {:e})", g.sign, d.h, d.v),
                    ));
                }
            }
        }
        let mut gb = 0.0;
        for (v, x) in self.vertices.iter().enumerate() {
            gb += TAU - x.angle;
            let q = x.angle / PI;
            let k = q.round();
            if (q - k).abs() > 1e-9 || k < 1.0 {
                out.push(Violation::new(
                    ViolationKind::ConeAngle,
                    format!("vertex {v}"),
                    format!("cone angle {}π is not an integer multiple of π", q),
                ));
            } else if k == 1.0 && !x.marked {
                out.push(Violation::new(
                    ViolationKind::ConeAngle,
                    format!("vertex {v}"),
                    "cone angle π at an unmarked vertex".into(),
                ));
            }
        }
        let expected = TAU * self.euler_characteristic() as f64;
        if (gb - expected).abs() > 1e-9 * TAU * (1.0 + self.vertices.len() as f64) {
            out.push(Violation::new(
                ViolationKind::GaussBonnet,
                "surface".into(),
                format!("angle defect {} differs from 2πχ = {}", gb, expected),
            ));
        }
        out
    }

    /// `Σ_v (2π − θ_v)`.
    pub fn angle_defect(&self) -> f64 {
        self.vertices.iter().map(|x| TAU - x.angle).sum()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum ViolationKind {
    NonFinite,
    ZeroEdge,
    TriangleClosure,
    Orientation,
    HolonomyMismatch,
    ConeAngle,
    GaussBonnet,
}

#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Violation {
    pub kind: ViolationKind,
    pub location: String,
    pub detail: String,
}

impl Violation {
    fn new(kind: ViolationKind, location: String, detail: String) -> Self {
        Violation { kind, location, detail }
    }
}

impl core::fmt::Display for Violation {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        write!(f, "{:?} at {}", self.kind, self.location)?;
        if !self.detail.is_empty() {
            write!(f, ": {}", self.detail)?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::builders::{flat_torus, square_tiled};
    use super::*;

    #[test]
    fn torus_vertex_structure() {
        let s = flat_torus(2.0, 3.0).unwrap();
        assert_eq!(s.num_vertices(), 1);
        assert!((s.cone_angle(0) - TAU).abs() < 1e-12);
        assert_eq!(s.euler_characteristic(), 0);
        assert!(s.validate().is_empty());
        assert!(s.angle_defect().abs() < 1e-12);
    }

    #[test]
    fn corner_walk_is_counterclockwise() {
        let s = square_tiled(&[1, 2, 0], &[1, 0, 2]).unwrap();
        for v in 0..s.num_vertices() {
            let x = s.vertex(v);
            let mut acc = 0.0;
            for &(t, i) in &x.corners {
                assert!((s.corner_offset(t, i) - acc).abs() < 1e-12);
                acc += s.corner_angle(t, i);
            }
        }
    }

    #[test]
    fn perturbed_edge_is_reported() {
        let s = flat_torus(1.0, 1.0).unwrap();
        let mut tris = s.triangles().to_vec();
        tris[0][0].h += 1e-3;
        let bad = FlatSurface::from_parts(tris, &s.gluing_pairs(), &[]).unwrap();
        let kinds: Vec<_> = bad.validate().iter().map(|v| v.kind).collect();
        assert!(kinds.contains(&ViolationKind::TriangleClosure));
    }

    #[test]
    fn structural_errors() {
        let s = flat_torus(1.0, 1.0).unwrap();
        let mut pairs = s.gluing_pairs();
        pairs.pop();
        assert!(FlatSurface::from_parts(s.triangles().to_vec(), &pairs, &[]).is_err());
    }
}
