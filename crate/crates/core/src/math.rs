//! Planar vectors and the small amount of convex geometry the rest of the
//! crate needs.

use alloc::vec::Vec;
use core::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};
#[allow(unused_imports)]
use num_traits::Float;

/// Holonomy of a straight segment in natural coordinates: `h` is the
/// horizontal component (`|dξ|` direction), `v` the vertical one.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct PlanarVector {
    pub h: f64,
    pub v: f64,
}

impl PlanarVector {
    pub const ZERO: PlanarVector = PlanarVector { h: 0.0, v: 0.0 };

    #[inline]
    pub const fn new(h: f64, v: f64) -> Self {
        PlanarVector { h, v }
    }

    #[inline]
    pub fn dot(self, other: Self) -> f64 {
        self.h * other.h + self.v * other.v
    }

    /// z-component of the 3d cross product.
    #[inline]
    pub fn cross(self, other: Self) -> f64 {
        self.h * other.v - self.v * other.h
    }

    #[inline]
    pub fn norm(self) -> f64 {
        self.h.hypot(self.v)
    }

    #[inline]
    pub fn norm_sq(self) -> f64 {
        self.dot(self)
    }

    pub fn normalized(self) -> Self {
        let n = self.norm();
        PlanarVector::new(self.h / n, self.v / n)
    }

    /// Counterclockwise quarter turn.
    #[inline]
    pub fn perp(self) -> Self {
        PlanarVector::new(-self.v, self.h)
    }

    /// Angle in `(-π, π]` measured from the positive horizontal axis.
    #[inline]
    pub fn angle(self) -> f64 {
        self.v.atan2(self.h)
    }

    pub fn rotated(self, theta: f64) -> Self {
        let (s, c) = theta.sin_cos();
        PlanarVector::new(c * self.h - s * self.v, s * self.h + c * self.v)
    }

    /// Componentwise absolute values.
    #[inline]
    pub fn abs(self) -> Self {
        PlanarVector::new(self.h.abs(), self.v.abs())
    }

    pub fn is_finite(self) -> bool {
        self.h.is_finite() && self.v.is_finite()
    }

    /// Apply the diagonal map `(h, v) ↦ (sh·h, sv·v)`.
    #[inline]
    pub fn scale_axes(self, sh: f64, sv: f64) -> Self {
        PlanarVector::new(self.h * sh, self.v * sv)
    }
}

impl Add for PlanarVector {
    type Output = Self;
    #[inline]
    fn add(self, o: Self) -> Self {
        PlanarVector::new(self.h + o.h, self.v + o.v)
    }
}

impl AddAssign for PlanarVector {
    #[inline]
    fn add_assign(&mut self, o: Self) {
        self.h += o.h;
        self.v += o.v;
    }
}

impl Sub for PlanarVector {
    type Output = Self;
    #[inline]
    fn sub(self, o: Self) -> Self {
        PlanarVector::new(self.h - o.h, self.v - o.v)
    }
}

impl SubAssign for PlanarVector {
    #[inline]
    fn sub_assign(&mut self, o: Self) {
        self.h -= o.h;
        self.v -= o.v;
    }
}

impl Neg for PlanarVector {
    type Output = Self;
    #[inline]
    fn neg(self) -> Self {
        PlanarVector::new(-self.h, -self.v)
    }
}

impl Mul<f64> for PlanarVector {
    type Output = Self;
    #[inline]
    fn mul(self, s: f64) -> Self {
        PlanarVector::new(self.h * s, self.v * s)
    }
}

impl Mul<PlanarVector> for f64 {
    type Output = PlanarVector;
    #[inline]
    fn mul(self, p: PlanarVector) -> PlanarVector {
        p * self
    }
}

/// Counterclockwise angle from `from` to `to`, in `[0, 2π)`.
pub fn ccw_angle(from: PlanarVector, to: PlanarVector) -> f64 {
    let a = from.cross(to).atan2(from.dot(to));
    if a < 0.0 {
        a + core::f64::consts::TAU
    } else {
        a
    }
}

/// Reduce `x` into `[0, m)`.
pub fn wrap(x: f64, m: f64) -> f64 {
    let r = x % m;
    if r < 0.0 {
        r + m
    } else {
        r
    }
}

/// Signed area of a polygon (positive when counterclockwise).
pub fn polygon_area(poly: &[PlanarVector]) -> f64 {
    if poly.len() < 3 {
        return 0.0;
    }
    let mut acc = 0.0;
    for i in 0..poly.len() {
        let j = (i + 1) % poly.len();
        acc += poly[i].cross(poly[j]);
    }
    0.5 * acc
}

/// Counterclockwise convex hull, dropping points within `tol` of the
/// hull's edges. Removes duplicate and backtracking vertices left by
/// repeated clipping.
pub fn convex_hull(points: &[PlanarVector], tol: f64) -> Vec<PlanarVector> {
    let mut pts: Vec<PlanarVector> = Vec::with_capacity(points.len());
    for &p in points {
        if pts.iter().all(|q| (p - *q).norm() > tol) {
            pts.push(p);
        }
    }
    pts.sort_by(|a, b| a.h.total_cmp(&b.h).then(a.v.total_cmp(&b.v)));
    if pts.len() < 3 {
        return pts;
    }
    let turn = |o: PlanarVector, a: PlanarVector, b: PlanarVector| {
        let e = a - o;
        let len = e.norm();
        if len <= tol {
            0.0
        } else {
            e.cross(b - o) / len
        }
    };
    let n = pts.len();
    let mut hull: Vec<PlanarVector> = Vec::with_capacity(2 * n);
    for pass in 0..2 {
        let start = hull.len();
        for k in 0..n {
            let p = if pass == 0 { pts[k] } else { pts[n - 1 - k] };
            while hull.len() >= start + 2 && turn(hull[hull.len() - 2], hull[hull.len() - 1], p) <= tol {
                hull.pop();
            }
            hull.push(p);
        }
        hull.pop();
    }
    hull
}

/// Keep the part of a convex polygon where `dot(normal, p) <= offset`.
pub fn clip_half_plane(poly: &[PlanarVector], normal: PlanarVector, offset: f64) -> Vec<PlanarVector> {
    let mut out = Vec::with_capacity(poly.len() + 1);
    if poly.is_empty() {
        return out;
    }
    for i in 0..poly.len() {
        let a = poly[i];
        let b = poly[(i + 1) % poly.len()];
        let da = normal.dot(a) - offset;
        let db = normal.dot(b) - offset;
        if da <= 0.0 {
            out.push(a);
        }
        if (da < 0.0 && db > 0.0) || (da > 0.0 && db < 0.0) {
            let t = da / (da - db);
            out.push(a + (b - a) * t);
        }
    }
    out
}

/// Barycentric coordinates of `p` in the triangle `tri`.
pub fn barycentric(tri: &[PlanarVector; 3], p: PlanarVector) -> [f64; 3] {
    let area = (tri[1] - tri[0]).cross(tri[2] - tri[0]);
    let l1 = (p - tri[0]).cross(tri[2] - tri[0]) / area;
    let l2 = (tri[1] - tri[0]).cross(p - tri[0]) / area;
    [1.0 - l1 - l2, l1, l2]
}

#[inline]
pub fn from_barycentric(tri: &[PlanarVector; 3], b: [f64; 3]) -> PlanarVector {
    tri[0] * b[0] + tri[1] * b[1] + tri[2] * b[2]
}

/// Map a point between two affinely related triangles.
#[inline]
pub fn transfer(from: &[PlanarVector; 3], to: &[PlanarVector; 3], p: PlanarVector) -> PlanarVector {
    from_barycentric(to, barycentric(from, p))
}

/// Parameter interval `[t0, t1] ⊂ [0, 1]` of the segment `a + t(b - a)` lying
/// inside a counterclockwise convex polygon shrunk by `margin`.
pub fn clip_segment_convex(
    poly: &[PlanarVector],
    a: PlanarVector,
    b: PlanarVector,
    margin: f64,
) -> Option<(f64, f64)> {
    if poly.len() < 3 {
        return None;
    }
    let d = b - a;
    let (mut t0, mut t1) = (0.0f64, 1.0f64);
    for i in 0..poly.len() {
        let p = poly[i];
        let q = poly[(i + 1) % poly.len()];
        let e = q - p;
        let len = e.norm();
        if len == 0.0 {
            continue;
        }
        // inside: cross(e, x - p) / len >= margin
        let fa = e.cross(a - p) / len - margin;
        let fd = e.cross(d) / len;
        if fd.abs() < 1e-300 {
            if fa < 0.0 {
                return None;
            }
            continue;
        }
        let t = -fa / fd;
        if fd > 0.0 {
            t0 = t0.max(t);
        } else {
            t1 = t1.min(t);
        }
        if t0 > t1 {
            return None;
        }
    }
    Some((t0, t1))
}

/// Whether `p` lies inside a counterclockwise convex polygon by at least `margin`.
pub fn inside_convex(poly: &[PlanarVector], p: PlanarVector, margin: f64) -> bool {
    if poly.len() < 3 {
        return false;
    }
    for i in 0..poly.len() {
        let a = poly[i];
        let b = poly[(i + 1) % poly.len()];
        let e = b - a;
        let len = e.norm();
        if len == 0.0 {
            continue;
        }
        if e.cross(p - a) / len < margin {
            return false;
        }
    }
    true
}

/// Merge overlapping closed intervals.
pub fn merge_intervals(mut iv: Vec<(f64, f64)>, join_tol: f64) -> Vec<(f64, f64)> {
    iv.retain(|&(a, b)| b > a);
    iv.sort_by(|x, y| x.0.partial_cmp(&y.0).unwrap_or(core::cmp::Ordering::Equal));
    let mut out: Vec<(f64, f64)> = Vec::with_capacity(iv.len());
    for (a, b) in iv {
        if let Some(last) = out.last_mut() {
            if a <= last.1 + join_tol {
                if b > last.1 {
                    last.1 = b;
                }
                continue;
            }
        }
        out.push((a, b));
    }
    out
}

/// `base` minus the union of `holes`, all as sorted disjoint intervals.
pub fn subtract_intervals(base: &[(f64, f64)], holes: &[(f64, f64)]) -> Vec<(f64, f64)> {
    let mut out = Vec::new();
    for &(a, b) in base {
        let mut cur = a;
        for &(ha, hb) in holes {
            if hb <= cur || ha >= b {
                continue;
            }
            if ha > cur {
                out.push((cur, ha));
            }
            cur = cur.max(hb);
            if cur >= b {
                break;
            }
        }
        if cur < b {
            out.push((cur, b));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn angles_and_cross() {
        let x = PlanarVector::new(1.0, 0.0);
        let y = PlanarVector::new(0.0, 1.0);
        assert_eq!(x.cross(y), 1.0);
        assert!((ccw_angle(x, y) - core::f64::consts::FRAC_PI_2).abs() < 1e-15);
        assert!((ccw_angle(y, x) - 1.5 * core::f64::consts::PI).abs() < 1e-15);
    }

    #[test]
    fn clip_and_area() {
        let sq = [
            PlanarVector::new(0.0, 0.0),
            PlanarVector::new(1.0, 0.0),
            PlanarVector::new(1.0, 1.0),
            PlanarVector::new(0.0, 1.0),
        ];
        let half = clip_half_plane(&sq, PlanarVector::new(1.0, 0.0), 0.5);
        assert!((polygon_area(&half) - 0.5).abs() < 1e-15);
        let iv = clip_segment_convex(&sq, PlanarVector::new(-1.0, 0.5), PlanarVector::new(2.0, 0.5), 0.0).unwrap();
        assert!((iv.0 - 1.0 / 3.0).abs() < 1e-12 && (iv.1 - 2.0 / 3.0).abs() < 1e-12);
        assert!(inside_convex(&sq, PlanarVector::new(0.5, 0.5), 0.1));
        assert!(!inside_convex(&sq, PlanarVector::new(0.05, 0.5), 0.1));
    }

    #[test]
    fn interval_ops() {
        let m = merge_intervals(alloc::vec![(0.0, 1.0), (0.5, 2.0), (3.0, 4.0)], 0.0);
        assert_eq!(m, alloc::vec![(0.0, 2.0), (3.0, 4.0)]);
        let s = subtract_intervals(&m, &[(0.5, 1.0), (3.5, 5.0)]);
        assert_eq!(s, alloc::vec![(0.0, 0.5), (1.0, 2.0), (3.0, 3.5)]);
    }
}
