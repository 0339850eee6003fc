//! Flat cylinders, expanding annuli and the thick-thin decomposition.

pub mod annuli;
pub mod cylinders;
pub mod pieces;
pub mod short;
mod sweep;
pub mod twist;

use alloc::vec::Vec;
#[allow(unused_imports)]
use num_traits::Float;

use crate::curves::{FlatCurve, Region, Segment};
use crate::error::Result;
use crate::math::{barycentric, PlanarVector};
use crate::surface::trace::{shoot, Origin, TracePiece};
use crate::surface::FlatSurface;

pub use annuli::expanding_annuli;
pub use cylinders::find_cylinders;
pub use pieces::diam_approx;
pub use short::{find_short_curves, find_short_curves_with};
pub use twist::twist;

/// A vertex on a cylinder boundary, at position `x ∈ [0, ℓ)` along the
/// core measured from the base point.
#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct BoundaryPoint {
    pub vertex: usize,
    pub x: f64,
}

/// A maximal flat cylinder. The base point is on the middle leaf; "left"
/// is the side counterclockwise of `direction`.
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct FlatCylinder {
    pub base_tri: usize,
    pub base_point: PlanarVector,
    /// Unit direction of the leaves in `base_tri`'s frame.
    pub direction: PlanarVector,
    pub circumference: f64,
    pub height: f64,
    /// Boundary vertices on the left and right sides, sorted by `x`.
    pub left: Vec<BoundaryPoint>,
    pub right: Vec<BoundaryPoint>,
}

impl FlatCylinder {
    pub fn modulus(&self) -> f64 {
        self.height / self.circumference
    }

    pub fn area(&self) -> f64 {
        self.height * self.circumference
    }

    /// Saddle-connection lengths along one boundary.
    pub fn boundary_lengths(&self, left: bool) -> Vec<f64> {
        let b = if left { &self.left } else { &self.right };
        let n = b.len();
        (0..n)
            .map(|k| {
                let nx = if k + 1 < n { b[k + 1].x } else { b[0].x + self.circumference };
                nx - b[k].x
            })
            .collect()
    }

    /// Point `pos · height` above the right boundary and the local leaf
    /// direction there.
    pub(crate) fn point_at(&self, s: &FlatSurface, pos: f64) -> Result<(usize, PlanarVector, PlanarVector)> {
        let y = (pos - 0.5) * self.height;
        if y == 0.0 {
            return Ok((self.base_tri, self.base_point, self.direction));
        }
        let (t, p, sigma) = shoot(
            s,
            Origin::Point { tri: self.base_tri, p: self.base_point },
            self.direction.perp() * y,
        )?;
        Ok((t, p, self.direction * sigma))
    }

    /// The closed leaf at relative height `pos`.
    pub fn leaf(&self, s: &FlatSurface, pos: f64) -> Result<Segment> {
        let (t, p, d) = self.point_at(s, pos)?;
        Ok(Segment { tri: t, start: barycentric(&s.corners(t), p), vector: d * self.circumference })
    }

    /// The middle leaf as a curve of weight 1.
    pub fn core(&self) -> FlatCurve {
        FlatCurve::core(self.clone(), 0.5, 1.0)
    }

    /// Image under a linear map `f` of determinant `det` applied to all
    /// holonomies.
    pub fn mapped_det<F: Fn(PlanarVector) -> PlanarVector>(&self, f: F, det: f64) -> FlatCylinder {
        let hol = f(self.direction * self.circumference);
        let l2 = hol.norm();
        let k = l2 / self.circumference;
        let scale_pts = |b: &Vec<BoundaryPoint>| b.iter().map(|p| BoundaryPoint { vertex: p.vertex, x: p.x * k }).collect();
        FlatCylinder {
            base_tri: self.base_tri,
            base_point: f(self.base_point),
            direction: hol * (1.0 / l2),
            circumference: l2,
            height: self.area() * det.abs() / l2,
            left: scale_pts(&self.left),
            right: scale_pts(&self.right),
        }
    }

    pub fn mapped<F: Fn(PlanarVector) -> PlanarVector>(&self, f: F) -> FlatCylinder {
        let a = f(PlanarVector::new(1.0, 0.0));
        let b = f(PlanarVector::new(0.0, 1.0));
        self.mapped_det(f, a.cross(b))
    }

    /// The cylinder on the flowed surface.
    pub fn flowed(&self, t: f64) -> FlatCylinder {
        self.mapped_det(|p| crate::flow::flow_vector(p, t), 1.0)
    }
}

/// Widths and moduli of the expanding annulus around a short curve.
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct AnnulusData {
    pub cylinder: FlatCylinder,
    /// Flat length of the core.
    pub length: f64,
    pub e: f64,
    pub f: f64,
    pub g: f64,
    pub d: f64,
    pub mod_e: f64,
    pub mod_f: f64,
    pub mod_g: f64,
    pub ext_estimate: f64,
}

impl AnnulusData {
    /// `e` is measured on the left of the cylinder, `g` on the right.
    pub fn new(cylinder: FlatCylinder, e: f64, g: f64) -> Self {
        let l = cylinder.circumference;
        let f = cylinder.height;
        let mod_e = (e / l).max(1.0).ln();
        let mod_f = f / l;
        let mod_g = (g / l).max(1.0).ln();
        AnnulusData {
            cylinder,
            length: l,
            e,
            f,
            g,
            d: e + f + g,
            mod_e,
            mod_f,
            mod_g,
            ext_estimate: 1.0 / (mod_e + mod_f + mod_g),
        }
    }

    pub fn modulus_sum(&self) -> f64 {
        self.mod_e + self.mod_f + self.mod_g
    }

    pub fn core(&self) -> FlatCurve {
        self.cylinder.core()
    }
}

/// A complementary piece `Y`.
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ThickPiece {
    pub id: usize,
    /// Triangles meeting the two-dimensional part.
    pub triangles: Vec<usize>,
    /// Boundary curves as `(index into shorts, left side?)`.
    pub boundary: Vec<(usize, bool)>,
    pub diam: f64,
    pub degenerate: bool,
    /// Area of the two-dimensional part.
    pub area: f64,
    /// Estimate of the shortest non-peripheral curve in the piece.
    pub systole: f64,
    #[cfg_attr(feature = "serde", serde(skip))]
    pub region: Region,
}

/// Geometry of a short cylinder needed downstream.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct CylinderRegions {
    /// The open cylinder `F`.
    pub flat: Region,
    /// `E ∪ F ∪ G`.
    pub annulus: Region,
    /// Leaf direction seen in each polygon of `flat` (same order).
    pub flat_dirs: Vec<PlanarVector>,
    pub(crate) bands: Vec<pieces::Band>,
}

/// The decomposition `(𝒜, 𝒴)`.
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ThickThin {
    pub shorts: Vec<AnnulusData>,
    pub pieces: Vec<ThickPiece>,
    pub m0: f64,
    /// Shortest saddle connection, a systole estimate for the surface.
    pub systole: f64,
    pub surface_diam: f64,
    #[cfg_attr(feature = "serde", serde(skip))]
    pub regions: Vec<CylinderRegions>,
    /// Saddle connections up to `saddle_radius`, or `None` when the
    /// enumeration ran out of budget.
    #[cfg_attr(feature = "serde", serde(skip))]
    pub saddles: Option<Vec<TracedSaddle>>,
    pub saddle_radius: f64,
}

/// A saddle connection split into triangle pieces.
#[derive(Clone, Debug, PartialEq)]
pub struct TracedSaddle {
    pub length: f64,
    pub pieces: Vec<TracePiece>,
}

impl ThickThin {
    /// Index of a short curve whose cylinder is `cyl`.
    pub fn short_index(&self, cyl: &FlatCylinder) -> Option<usize> {
        self.shorts.iter().position(|a| same_cylinder(&a.cylinder, cyl))
    }
}

pub(crate) fn same_cylinder(a: &FlatCylinder, b: &FlatCylinder) -> bool {
    let tol = 1e-7 * a.circumference.max(b.circumference);
    (a.circumference - b.circumference).abs() <= tol
        && (a.height - b.height).abs() <= 1e-7 * a.height.max(b.height)
        && a.base_tri == b.base_tri
        && (a.base_point - b.base_point).norm() <= tol
}
