//! Maximal flat cylinders found from short saddle connections.
//!
//! Every boundary saddle connection of a cylinder is at most its
//! circumference long, so pushing each short saddle connection off to its
//! left and following the nearby parallel leaf finds every cylinder with
//! circumference below the bound. The two boundaries are then located by
//! sweeping parallel leaves up and down from that leaf.

use alloc::vec::Vec;

use super::sweep::{sweep, Limit, Sweep};
use super::{BoundaryPoint, FlatCylinder};
use crate::curves::Region;
use crate::error::{Error, Result};
use crate::math::PlanarVector;
use crate::surface::trace::{shoot, trace, Origin, Trace};
use crate::surface::visibility::{saddle_connections, Budget, SaddleConnection};
use crate::surface::FlatSurface;

/// All maximal cylinders of circumference at most `max_circumference`,
/// with the default enumeration budget.
pub fn find_cylinders(s: &FlatSurface, max_circumference: f64) -> Result<Vec<FlatCylinder>> {
    let mut budget = Budget::new(crate::config::DEVELOP_BUDGET);
    find_cylinders_with(s, max_circumference, &mut budget)
}

pub fn find_cylinders_with(s: &FlatSurface, max_circumference: f64, budget: &mut Budget) -> Result<Vec<FlatCylinder>> {
    if !(max_circumference > 0.0) || !max_circumference.is_finite() {
        return Err(Error::Invalid("circumference bound must be positive".into()));
    }
    let scs = saddle_connections(s, max_circumference, budget)?;
    let mut found: Vec<(FlatCylinder, Trace)> = Vec::new();
    for sc in &scs {
        let Some(cyl) = cylinder_left_of(s, sc, max_circumference, budget)? else { continue };
        if found.iter().any(|(c, tr)| same_leaf(s, c, tr, &cyl)) {
            continue;
        }
        let tr = mid_leaf(s, &cyl)?;
        found.push((cyl, tr));
    }
    let mut out: Vec<FlatCylinder> = found.into_iter().map(|x| x.0).collect();
    out.sort_by(|a, b| a.circumference.total_cmp(&b.circumference));
    Ok(out)
}

fn mid_leaf(s: &FlatSurface, c: &FlatCylinder) -> Result<Trace> {
    trace(s, Origin::Point { tri: c.base_tri, p: c.base_point }, c.direction * c.circumference)
}

/// Whether `b` is the cylinder whose middle leaf is traced by `tr`.
fn same_leaf(s: &FlatSurface, a: &FlatCylinder, tr: &Trace, b: &FlatCylinder) -> bool {
    let scale = s.scale().max(a.circumference);
    if (a.circumference - b.circumference).abs() > 1e-7 * scale || (a.height - b.height).abs() > 1e-7 * scale {
        return false;
    }
    let tol = 1e-7 * scale;
    tr.pieces.iter().any(|p| {
        if p.tri != b.base_tri {
            return false;
        }
        let d = p.b - p.a;
        let len = d.norm();
        if len == 0.0 {
            return false;
        }
        let u = d * (1.0 / len);
        let w = b.base_point - p.a;
        u.cross(b.direction).abs() <= 1e-9
            && u.cross(w).abs() <= tol && w.dot(u) >= -tol && w.dot(u) <= len + tol
    })
}

/// The cylinder just to the left of `sc`, if the leaves there close up
/// within length `max_len`.
fn cylinder_left_of(
    s: &FlatSurface,
    sc: &SaddleConnection,
    max_len: f64,
    budget: &mut Budget,
) -> Result<Option<FlatCylinder>> {
    let scale = s.scale().max(sc.length);
    let (tm, pm, sm) = shoot(s, Origin::Corner { tri: sc.tri, i: sc.corner }, sc.vector * 0.5)?;
    let dm = sc.vector * (sm / sc.length);
    let eps = 1e-6 * scale;
    let (t2, p2, s2) = shoot(s, Origin::Point { tri: tm, p: pm }, dm.perp() * eps)?;
    let u2 = dm * s2;
    let leaf = match trace(s, Origin::Point { tri: t2, p: p2 }, u2 * (max_len * (1.0 + 1e-9))) {
        Ok(t) => t,
        Err(Error::ThroughVertex { .. }) => return Ok(None),
        Err(e) => return Err(e),
    };
    let tol = 1e-9 * scale;
    let mut circ = None;
    for p in &leaf.pieces {
        if p.tri != t2 || p.sigma < 0.0 || p.s0 <= tol {
            continue;
        }
        let w = p2 - p.a;
        let along = w.dot(u2);
        if u2.cross(w).abs() <= tol && along >= -tol && along <= (p.s1 - p.s0) + tol {
            circ = Some(p.s0 + along);
            break;
        }
    }
    let Some(l) = circ else { return Ok(None) };
    let cap = 1.01 * s.area() / l + eps;
    let up = sweep(s, t2, p2, u2, l, Limit::FirstHit { cap }, budget)?;
    let down = sweep(s, t2, p2, -u2, l, Limit::FirstHit { cap }, budget)?;
    let f = up.first + down.first;
    let shift = 0.5 * (up.first - down.first);
    let (tb, pb, dir) = if shift.abs() > 0.0 {
        let (tb, pb, sb) = shoot(s, Origin::Point { tri: t2, p: p2 }, u2.perp() * shift)?;
        (tb, pb, u2 * sb)
    } else {
        (t2, p2, u2)
    };
    let mut cyl = FlatCylinder {
        base_tri: tb,
        base_point: pb,
        direction: dir,
        circumference: l,
        height: f,
        left: Vec::new(),
        right: Vec::new(),
    };
    let htol = 1e-8 * scale;
    let (lsw, rsw) = side_sweeps(s, &cyl, 0.5 * f + htol, 0.5 * f + htol, budget)?;
    cyl.left = boundary(&lsw, l, 0.5 * f, htol, false);
    cyl.right = boundary(&rsw, l, 0.5 * f, htol, true);
    if cyl.left.is_empty() || cyl.right.is_empty() {
        return Err(Error::Structural("cylinder boundary without a vertex".into()));
    }
    Ok(Some(cyl))
}

/// Sweeps from the middle leaf to heights `h_left` and `h_right` on the two
/// sides. The right sweep runs along the reversed leaf.
pub(crate) fn side_sweeps(
    s: &FlatSurface,
    c: &FlatCylinder,
    h_left: f64,
    h_right: f64,
    budget: &mut Budget,
) -> Result<(Sweep, Sweep)> {
    let l = c.circumference;
    let left = sweep(s, c.base_tri, c.base_point, c.direction, l, Limit::Height(h_left), budget)?;
    let right = sweep(s, c.base_tri, c.base_point, -c.direction, l, Limit::Height(h_right), budget)?;
    Ok((left, right))
}

/// The open cylinder as a region, with the leaf direction (oriented like
/// `c.direction`) seen in each polygon, from sweeps reaching at least half
/// the height on both sides.
pub(crate) fn flat_region(s: &FlatSurface, c: &FlatCylinder, left: &Sweep, right: &Sweep) -> (Region, Vec<PlanarVector>) {
    let half = 0.5 * c.height;
    let (mut r, mut dirs) = left.region(s, 0.0, half);
    let (r2, d2) = right.region(s, 0.0, half);
    r.extend(&r2);
    dirs.extend(d2.into_iter().map(|d| -d));
    (r, dirs)
}

fn boundary(sw: &Sweep, l: f64, half: f64, tol: f64, reversed: bool) -> Vec<BoundaryPoint> {
    let mut pts: Vec<BoundaryPoint> = Vec::new();
    for h in &sw.hits {
        if h.y < half - tol {
            continue;
        }
        let mut x = if reversed { l - h.x } else { h.x };
        x = crate::math::wrap(x, l);
        if l - x <= tol {
            x = 0.0;
        }
        if pts.iter().any(|p| p.vertex == h.vertex && ((p.x - x).abs() <= tol || l - (p.x - x).abs() <= tol)) {
            continue;
        }
        pts.push(BoundaryPoint { vertex: h.vertex, x });
    }
    pts.sort_by(|a, b| a.x.total_cmp(&b.x));
    pts
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::surface::builders::{flat_torus, slit_tori, square_tiled};

    #[test]
    fn unit_torus_cylinders() {
        let s = flat_torus(1.0, 1.0).unwrap();
        let cs = find_cylinders(&s, 1.5).unwrap();
        let unit: Vec<_> = cs.iter().filter(|c| (c.circumference - 1.0).abs() < 1e-9).collect();
        assert_eq!(unit.len(), 2);
        for c in unit {
            assert!((c.height - 1.0).abs() < 1e-9);
            assert_eq!(c.left.len(), 1);
            assert_eq!(c.right.len(), 1);
        }
        // the diagonal (1,1) has length √2 < 1.5
        assert!(cs.iter().any(|c| (c.circumference - 2f64.sqrt()).abs() < 1e-9));
    }

    #[test]
    fn slit_tori_central_cylinder() {
        let st = slit_tori(0.1).unwrap();
        let cs = find_cylinders(&st.surface, 0.2).unwrap();
        let c: Vec<_> = cs.iter().filter(|c| (c.circumference - 0.1).abs() < 1e-9).collect();
        assert!(c.iter().any(|c| (c.height - 0.1).abs() < 1e-9), "{cs:?}");
    }

    #[test]
    fn square_tiled_horizontal() {
        // L-shape: squares 0,1 in a row, square 2 above square 0
        let s = square_tiled(&[1, 0, 2], &[2, 1, 0]).unwrap();
        let cs = find_cylinders(&s, 2.5).unwrap();
        let horiz: Vec<_> = cs.iter().filter(|c| c.direction.v.abs() < 1e-12).collect();
        let mut circ: Vec<f64> = horiz.iter().map(|c| c.circumference).collect();
        circ.sort_by(f64::total_cmp);
        assert_eq!(circ.len(), 2);
        assert!((circ[0] - 1.0).abs() < 1e-9 && (circ[1] - 2.0).abs() < 1e-9);
        for c in horiz {
            assert!((c.height - 1.0).abs() < 1e-9);
        }
    }
}
