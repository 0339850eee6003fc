//! The three surface families used throughout: rectangular tori, the
//! two-slit-tori example, and square-tiled surfaces.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use super::FlatSurface;
use crate::curves::Segment;
use crate::error::{Error, Result};
use crate::math::PlanarVector;

fn tri(a: (f64, f64), b: (f64, f64), c: (f64, f64)) -> [PlanarVector; 3] {
    let (a, b, c) = (PlanarVector::new(a.0, a.1), PlanarVector::new(b.0, b.1), PlanarVector::new(c.0, c.1));
    [b - a, c - b, a - c]
}

/// The `width × height` rectangle with opposite sides identified, cut along
/// its diagonal.
pub fn flat_torus(width: f64, height: f64) -> Result<FlatSurface> {
    if !(width > 0.0 && height > 0.0 && width.is_finite() && height.is_finite()) {
        return Err(Error::Construction(format!("torus needs positive dimensions, got {width} × {height}")));
    }
    let (w, h) = (width, height);
    let triangles = vec![tri((0.0, 0.0), (w, 0.0), (w, h)), tri((0.0, 0.0), (w, h), (0.0, h))];
    let pairs = [((0, 2), (1, 0), -1), ((0, 0), (1, 1), -1), ((0, 1), (1, 2), -1)];
    FlatSurface::from_parts(triangles, &pairs, &[])
}

/// Square-tiled surface: square `i` has `horiz[i]` on its right and
/// `vert[i]` on top. Square `i` is split into triangles `2i` (below the
/// diagonal) and `2i + 1`.
pub fn square_tiled(horiz: &[usize], vert: &[usize]) -> Result<FlatSurface> {
    let n = horiz.len();
    if n == 0 || vert.len() != n {
        return Err(Error::Construction("permutations must act on the same n ≥ 1 squares".into()));
    }
    for p in [horiz, vert] {
        let mut seen = vec![false; n];
        for &x in p {
            if x >= n || seen[x] {
                return Err(Error::Construction(format!("{p:?} is not a permutation")));
            }
            seen[x] = true;
        }
    }
    let mut reached = vec![false; n];
    let mut stack = vec![0usize];
    reached[0] = true;
    while let Some(i) = stack.pop() {
        for j in [horiz[i], vert[i]] {
            if !reached[j] {
                reached[j] = true;
                stack.push(j);
            }
        }
    }
    if let Some(i) = reached.iter().position(|r| !r) {
        return Err(Error::Disconnected(format!("square {i} is not reachable from square 0")));
    }
    let lower = tri((0.0, 0.0), (1.0, 0.0), (1.0, 1.0));
    let upper = tri((0.0, 0.0), (1.0, 1.0), (0.0, 1.0));
    let mut triangles = Vec::with_capacity(2 * n);
    let mut pairs = Vec::with_capacity(3 * n);
    for i in 0..n {
        triangles.push(lower);
        triangles.push(upper);
        pairs.push(((2 * i, 2), (2 * i + 1, 0), -1));
        pairs.push(((2 * i, 1), (2 * horiz[i] + 1, 2), -1));
        pairs.push(((2 * i + 1, 1), (2 * vert[i], 0), -1));
    }
    FlatSurface::from_parts(triangles, &pairs, &[])
}

/// Two `a × 1/a` tori, each slit along a horizontal segment of length
/// `a/2`, joined by the `a × a` cylinder `C` glued along the slits.
#[derive(Clone, Debug)]
pub struct SlitTori {
    pub surface: FlatSurface,
    pub a: f64,
    /// Closed horizontal trajectory at mid-height of `C`.
    pub alpha: Segment,
    /// Slit endpoints `[P1, Q1, P2, Q2]` (upper torus first).
    pub slit_endpoints: [usize; 4],
}

/// Triangles 0–3 tile the upper torus, 4–7 the lower one, 8–11 the cylinder.
pub fn slit_tori(a: f64) -> Result<SlitTori> {
    if !(a > 0.0 && a < 0.5) {
        return Err(Error::Construction(format!("slit tori need 0 < a < 1/2, got {a}")));
    }
    let h = 1.0 / a;
    let (x0, x1, x2) = (a / 4.0, 3.0 * a / 4.0, 5.0 * a / 4.0);
    let torus = [
        tri((x0, 0.0), (x1, 0.0), (x1, h)),
        tri((x0, 0.0), (x1, h), (x0, h)),
        tri((x1, 0.0), (x2, 0.0), (x2, h)),
        tri((x1, 0.0), (x2, h), (x1, h)),
    ];
    let m = a / 2.0;
    let cyl = [
        tri((0.0, 0.0), (m, 0.0), (m, a)),
        tri((0.0, 0.0), (m, a), (0.0, a)),
        tri((m, 0.0), (a, 0.0), (a, a)),
        tri((m, 0.0), (a, a), (m, a)),
    ];
    let mut triangles = Vec::with_capacity(12);
    triangles.extend_from_slice(&torus);
    triangles.extend_from_slice(&torus);
    triangles.extend_from_slice(&cyl);
    let mut pairs = Vec::new();
    for b in [0usize, 4] {
        pairs.push(((b, 1), (b + 3, 2), -1));
        pairs.push(((b, 2), (b + 1, 0), -1));
        pairs.push(((b + 2, 2), (b + 3, 0), -1));
        pairs.push(((b + 1, 2), (b + 2, 1), -1));
        pairs.push(((b + 2, 0), (b + 3, 1), -1));
    }
    pairs.push(((8, 1), (11, 2), -1));
    pairs.push(((8, 2), (9, 0), -1));
    pairs.push(((10, 2), (11, 0), -1));
    pairs.push(((9, 2), (10, 1), -1));
    // top of C onto both sides of the upper slit
    pairs.push(((9, 1), (0, 0), -1));
    pairs.push(((11, 1), (1, 1), 1));
    // bottom of C onto both sides of the lower slit
    pairs.push(((8, 0), (5, 1), -1));
    pairs.push(((10, 0), (4, 0), 1));
    let plain = FlatSurface::from_parts(triangles.clone(), &pairs, &[])?;
    let slit_endpoints = [
        plain.vertex_of(0, 0),
        plain.vertex_of(0, 1),
        plain.vertex_of(4, 0),
        plain.vertex_of(4, 1),
    ];
    let surface = FlatSurface::from_parts(triangles, &pairs, &slit_endpoints)?;
    let start = crate::math::barycentric(&surface.corners(9), PlanarVector::new(a / 8.0, a / 2.0));
    Ok(SlitTori {
        surface,
        a,
        alpha: Segment { tri: 9, start, vector: PlanarVector::new(a, 0.0) },
        slit_endpoints,
    })
}
