//! Widths of the expanding annuli on the two sides of a flat cylinder.
//!
//! Around each boundary vertex the cylinder occupies one half-plane per
//! visit; the directions left over form sectors facing the outside. The
//! annulus on a side can grow until it touches itself, which happens about
//! half way along the shortest path that leaves the boundary into such a
//! sector and comes back to the closed cylinder. Candidate paths are the
//! saddle connections leaving into the sector and the rays perpendicular
//! to the boundary.

#[allow(unused_imports)]
use num_traits::Float;
use alloc::vec::Vec;
use core::f64::consts::PI;

use super::cylinders::{flat_region, side_sweeps};
use super::sweep::Sweep;
use super::FlatCylinder;
use crate::curves::Region;
use crate::error::{Error, Result};
use crate::math::wrap;
use crate::surface::trace::{trace, Origin, Trace};
use crate::surface::visibility::{visible_in_wedge, Budget};
use crate::surface::{prev, FlatSurface};

const ANG_TOL: f64 = 1e-9;
/// Developed triangles allowed per outside sector.
const SECTOR_BUDGET: usize = 200_000;

#[derive(Clone, Copy, Debug)]
struct Visit {
    vertex: usize,
    /// Global angle of the direction pointing into the cylinder,
    /// perpendicular to the boundary.
    inward: f64,
    left: bool,
}

/// Widths `(e, g)` of the expanding annuli on the left and right of `cyl`.
pub fn expanding_annuli(s: &FlatSurface, cyl: &FlatCylinder) -> Result<(f64, f64)> {
    let mut budget = Budget::new(crate::config::DEVELOP_BUDGET);
    expanding_annuli_with(s, cyl, &mut budget)
}

pub fn expanding_annuli_with(s: &FlatSurface, cyl: &FlatCylinder, budget: &mut Budget) -> Result<(f64, f64)> {
    let l = cyl.circumference;
    let f = cyl.height;
    let scale = s.scale().max(l);
    let htol = 1e-8 * scale;
    let (lsw, rsw) = side_sweeps(s, cyl, 0.5 * f + htol, 0.5 * f + htol, budget)?;
    let (flat, _) = flat_region(s, cyl, &lsw, &rsw);
    let mut visits = visits_of(s, &lsw, 0.5 * f, htol, true);
    visits.extend(visits_of(s, &rsw, 0.5 * f, htol, false));
    let mut on_boundary = alloc::vec![false; s.num_vertices()];
    for v in &visits {
        on_boundary[v.vertex] = true;
    }
    let cap = 2.0 * s.area() / l;
    let ctx = Ctx { s, flat: &flat, on_boundary: &on_boundary, shrink: 1e-7 * scale, l, cap };
    let mut sectors: Vec<(usize, f64, f64, [bool; 2])> = Vec::new();
    let mut vs: Vec<usize> = visits.iter().map(|v| v.vertex).collect();
    vs.sort_unstable();
    vs.dedup();
    for v in vs {
        let theta = s.cone_angle(v);
        let mut w: Vec<Visit> = visits.iter().filter(|x| x.vertex == v).copied().collect();
        w.sort_by(|a, b| wrap(a.inward - 0.5 * PI, theta).total_cmp(&wrap(b.inward - 0.5 * PI, theta)));
        let n = w.len();
        for k in 0..n {
            let a = w[k].inward + 0.5 * PI;
            let next_lo = w[(k + 1) % n].inward - 0.5 * PI;
            let mut width = wrap(next_lo - a, theta);
            if n == 1 {
                width = theta - PI;
            } else if theta - width < ANG_TOL {
                width = 0.0;
            }
            sectors.push((v, a, width, [w[k].left, w[(k + 1) % n].left]));
        }
    }
    let mut best = [f64::INFINITY; 2];
    let mut seen = [false; 2];
    let side = |left: bool| if left { 0 } else { 1 };
    for &(_, _, width, sides) in &sectors {
        for x in sides {
            seen[side(x)] = true;
            if width < PI - ANG_TOL {
                // the outside wedge is convex: the boundary pinches here
                best[side(x)] = 0.0;
            }
        }
    }
    for &(v, a, width, sides) in &sectors {
        if width < PI - ANG_TOL {
            continue;
        }
        let limit = sides.iter().map(|&x| best[side(x)]).fold(0.0, f64::max);
        let d = ctx.sector_contact(v, a, width, limit)?;
        for x in sides {
            best[side(x)] = best[side(x)].min(d);
        }
    }
    let width = |i: usize| if seen[i] { (0.5 * best[i]).min(0.5 * cap) } else { 0.0 };
    Ok((width(0), width(1)))
}

fn visits_of(s: &FlatSurface, sw: &Sweep, half: f64, tol: f64, left: bool) -> Vec<Visit> {
    let mut out: Vec<Visit> = Vec::new();
    let down = -sw.u0.perp();
    for h in &sw.hits {
        if h.y < half - tol {
            continue;
        }
        let d = down * h.sigma;
        let e = s.edges(h.tri);
        let (a, b) = (e[h.corner].normalized(), (-e[prev(h.corner)]).normalized());
        if a.cross(d) < -1e-12 || d.cross(b) < -1e-12 {
            continue;
        }
        let inward = s.direction_angle(h.tri, h.corner, d);
        let theta = s.cone_angle(h.vertex);
        let dup = out.iter().any(|x| {
            let g = wrap(x.inward - inward, theta);
            x.vertex == h.vertex && (g < ANG_TOL || theta - g < ANG_TOL)
        });
        if !dup {
            out.push(Visit { vertex: h.vertex, inward, left });
        }
    }
    out
}

struct Ctx<'a> {
    s: &'a FlatSurface,
    flat: &'a Region,
    on_boundary: &'a [bool],
    shrink: f64,
    l: f64,
    cap: f64,
}

impl Ctx<'_> {
    /// Length of the shortest candidate path from `v` into the sector of
    /// directions `(a, a + width)` that returns to the closed cylinder.
    /// Radii beyond twice `limit` are not searched.
    fn sector_contact(&self, v: usize, a: f64, width: f64, limit: f64) -> Result<f64> {
        let stop = self.cap.min(2.0 * limit);
        let mut r = 2.0 * self.l;
        let mut budget = Budget::new(SECTOR_BUDGET);
        let mut prev: Option<(f64, f64)> = None;
        loop {
            match self.contact_within(v, a, width, r, &mut budget) {
                Ok(d) => {
                    if d <= 0.5 * r || r >= stop {
                        return Ok(d);
                    }
                    prev = Some((d, r));
                }
                Err(e) if e.is_budget() => {
                    // nothing closer than about half the last radius
                    return Ok(prev.map_or(r, |(d, pr)| d.min(pr)));
                }
                Err(e) => return Err(e),
            }
            r *= 2.0;
        }
    }

    fn contact_within(&self, v: usize, a: f64, width: f64, r: f64, budget: &mut Budget) -> Result<f64> {
        let s = self.s;
        let mut best = f64::INFINITY;
        // saddle connections into the sector, developed in sub-wedges
        let parts = (width / (0.5 * PI)).ceil().max(1.0) as usize;
        let step = width / parts as f64;
        for k in 0..parts {
            let lo = a + k as f64 * step;
            let (t, i, local) = s.corner_at_angle(v, lo);
            let rdir = s.direction_in_corner(t, i, local);
            let over = if k + 1 == parts { 0.0 } else { 1e-7 };
            let w = step + over;
            let ldir = rdir.rotated(w);
            for x in visible_in_wedge(s, t, i, rdir, ldir, w, r, budget)? {
                let off = crate::math::ccw_angle(rdir, x.pos);
                if off <= ANG_TOL || lo + off >= a + width - ANG_TOL {
                    continue;
                }
                if let Some(d) = self.ray_contact(v, lo + off, x.pos.norm())? {
                    best = best.min(d);
                }
            }
        }
        let mut rays = Vec::new();
        let mut x = 0.5 * PI;
        while x < width - ANG_TOL {
            rays.push(a + x);
            rays.push(a + width - x);
            x += PI;
        }
        for phi in rays {
            if let Some(x) = self.ray_contact(v, phi, r)? {
                best = best.min(x);
            }
        }
        Ok(best)
    }

    /// Where the straight path from `v` at angle `phi` of length `r` first
    /// enters the cylinder or reaches one of its boundary vertices.
    fn ray_contact(&self, v: usize, phi: f64, r: f64) -> Result<Option<f64>> {
        let s = self.s;
        let (t, i, local) = s.corner_at_angle(v, phi);
        let dir = s.direction_in_corner(t, i, local);
        match trace(s, Origin::Corner { tri: t, i }, dir * r) {
            Ok(tr) => {
                if let Some(x) = self.entry(&tr)? {
                    return Ok(Some(x));
                }
                Ok(tr.end_corner.and_then(|j| self.on_boundary[s.vertex_of(tr.end_tri(), j)].then_some(r)))
            }
            Err(Error::ThroughVertex { vertex, at }) => {
                let short = at * (1.0 - 1e-9);
                if short > 0.0 {
                    if let Ok(tr) = trace(s, Origin::Corner { tri: t, i }, dir * short) {
                        if let Some(x) = self.entry(&tr)? {
                            return Ok(Some(x));
                        }
                    }
                }
                Ok(if self.on_boundary[vertex] { Some(at) } else { None })
            }
            Err(e) => Err(e),
        }
    }

    /// First parameter at which the trace is well inside the cylinder.
    fn entry(&self, tr: &Trace) -> Result<Option<f64>> {
        let iv = self.flat.intervals_pieces(self.s, tr.pieces.iter(), -self.shrink)?;
        Ok(iv.first().map(|x| x.0))
    }
}
