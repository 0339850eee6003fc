//! Sweeping the region to the left of a closed leaf by parallel copies.
//!
//! Strip coordinates put the leaf on `y = 0`, `x ∈ [0, ℓ]`, with `y` growing
//! to the left. The region above the leaf is cut into windows, each a part
//! of one developed triangle over an `x`-interval, processed in order of
//! the height at which they are entered.

use alloc::collections::BinaryHeap;
use alloc::vec::Vec;
use core::cmp::Ordering;

use crate::curves::Region;
use crate::error::{Error, Result};
use crate::math::{clip_half_plane, PlanarVector};
use crate::surface::trace::{trace, Origin};
use crate::surface::visibility::Budget;
use crate::surface::{next, FlatSurface};

#[derive(Clone, Copy, Debug)]
pub(crate) struct Window {
    pub tri: usize,
    /// Developing map `dev = σ·p + c` into the frame of the leaf's start.
    pub sigma: f64,
    pub c: PlanarVector,
    pub entry: Option<usize>,
    pub x0: f64,
    pub x1: f64,
    pub entry_y: f64,
}

#[derive(Clone, Copy, Debug)]
pub(crate) struct Hit {
    pub tri: usize,
    pub corner: usize,
    pub sigma: f64,
    pub vertex: usize,
    pub x: f64,
    pub y: f64,
}

#[derive(Clone, Copy, Debug)]
pub(crate) enum Limit {
    /// Stop at the first vertex (the cylinder boundary); give up above `cap`.
    FirstHit { cap: f64 },
    /// Sweep to a fixed height.
    Height(f64),
}

pub(crate) struct Sweep {
    pub p0: PlanarVector,
    pub u0: PlanarVector,
    pub windows: Vec<Window>,
    pub hits: Vec<Hit>,
    /// Lowest vertex height met.
    pub first: f64,
    pub top: f64,
}

#[derive(PartialEq)]
struct Key(f64, usize);

impl Eq for Key {}

impl PartialOrd for Key {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}

impl Ord for Key {
    // min-heap on height, then index
    fn cmp(&self, o: &Self) -> Ordering {
        o.0.total_cmp(&self.0).then(o.1.cmp(&self.1))
    }
}

impl Sweep {
    #[inline]
    pub fn strip(&self, d: PlanarVector) -> PlanarVector {
        let w = d - self.p0;
        PlanarVector::new(w.dot(self.u0), self.u0.cross(w))
    }

    #[inline]
    pub fn unstrip(&self, q: PlanarVector) -> PlanarVector {
        self.p0 + self.u0 * q.h + self.u0.perp() * q.v
    }

    /// Local polygon of a window, clipped to heights `[lo, hi]`.
    pub fn window_poly(&self, s: &FlatSurface, w: &Window, lo: f64, hi: f64) -> Vec<PlanarVector> {
        let pk = s.corners(w.tri);
        let mut poly: Vec<PlanarVector> = pk.iter().map(|p| self.strip(*p * w.sigma + w.c)).collect();
        poly = clip_half_plane(&poly, PlanarVector::new(-1.0, 0.0), -w.x0);
        poly = clip_half_plane(&poly, PlanarVector::new(1.0, 0.0), w.x1);
        poly = clip_half_plane(&poly, PlanarVector::new(0.0, 1.0), hi);
        poly = clip_half_plane(&poly, PlanarVector::new(0.0, -1.0), -lo);
        poly.into_iter().map(|q| (self.unstrip(q) - w.c) * w.sigma).collect()
    }

    /// Union of window polygons between heights `lo` and `hi`.
    pub fn region(&self, s: &FlatSurface, lo: f64, hi: f64) -> (Region, Vec<PlanarVector>) {
        let mut r = Region::new(s.num_triangles());
        let mut dirs = Vec::new();
        for w in &self.windows {
            if w.entry_y >= hi {
                continue;
            }
            let before = r.polys.len();
            r.push(w.tri, self.window_poly(s, w, lo, hi));
            if r.polys.len() > before {
                dirs.push(self.u0 * w.sigma);
            }
        }
        (r, dirs)
    }
}

/// Sweep to the left of the closed leaf from `p0` (in `tri0`) along the unit
/// vector `u0` for length `len`.
pub(crate) fn sweep(
    s: &FlatSurface,
    tri0: usize,
    p0: PlanarVector,
    u0: PlanarVector,
    len: f64,
    limit: Limit,
    budget: &mut Budget,
) -> Result<Sweep> {
    let leaf = trace(s, Origin::Point { tri: tri0, p: p0 }, u0 * len)?;
    let scale = s.scale().max(len);
    let xt = 1e-12 * scale;
    let yt = 1e-10 * scale;
    let mut sw = Sweep { p0, u0, windows: Vec::new(), hits: Vec::new(), first: f64::INFINITY, top: 0.0 };
    let mut pending: Vec<Window> = Vec::new();
    let mut heap = BinaryHeap::new();
    for piece in &leaf.pieces {
        let c = (p0 + u0 * piece.s0) - piece.a * piece.sigma;
        pending.push(Window { tri: piece.tri, sigma: piece.sigma, c, entry: None, x0: piece.s0, x1: piece.s1, entry_y: 0.0 });
        heap.push(Key(0.0, pending.len() - 1));
    }
    let ceiling = |best: f64| match limit {
        Limit::FirstHit { cap } => (best + yt).min(cap),
        Limit::Height(h) => h,
    };
    while let Some(Key(y, k)) = heap.pop() {
        if y >= ceiling(sw.first) {
            if let Limit::FirstHit { cap } = limit {
                if sw.first.is_infinite() && y >= cap {
                    return Err(Error::Structural("leaf sweep found no boundary vertex".into()));
                }
            }
            break;
        }
        budget.spend("cylinder sweep")?;
        let w = pending[k];
        let pk = s.corners(w.tri);
        let q: Vec<PlanarVector> = pk.iter().map(|p| sw.strip(*p * w.sigma + w.c)).collect();
        for (i, qi) in q.iter().enumerate() {
            if qi.h >= w.x0 - xt && qi.h <= w.x1 + xt && qi.v > yt {
                if let Limit::Height(h) = limit {
                    if qi.v > h + yt {
                        continue;
                    }
                }
                sw.hits.push(Hit { tri: w.tri, corner: i, sigma: w.sigma, vertex: s.vertex_of(w.tri, i), x: qi.h, y: qi.v });
                if qi.v < sw.first {
                    sw.first = qi.v;
                }
            }
        }
        sw.top = sw.top.max(y);
        sw.windows.push(w);
        for j in 0..3 {
            if Some(j) == w.entry {
                continue;
            }
            let (a, b) = (q[j], q[next(j)]);
            if b.h - a.h >= 0.0 {
                continue;
            }
            let lo = b.h.max(w.x0);
            let hi = a.h.min(w.x1);
            if hi - lo <= xt {
                continue;
            }
            let at = |x: f64| a.v + (b.v - a.v) * (x - a.h) / (b.h - a.h);
            let ey = at(lo).min(at(hi));
            let g = s.glued(w.tri, j);
            let s2 = w.sigma * g.rho();
            let c2 = (pk[next(j)] * w.sigma + w.c) - s.corners(g.tri)[g.edge] * s2;
            pending.push(Window { tri: g.tri, sigma: s2, c: c2, entry: Some(g.edge), x0: lo, x1: hi, entry_y: ey });
            heap.push(Key(ey, pending.len() - 1));
        }
    }
    Ok(sw)
}
