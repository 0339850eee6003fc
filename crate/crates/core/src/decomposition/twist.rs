//! How often the strands of a curve wind around a flat cylinder.

#[allow(unused_imports)]
use num_traits::Float;

use super::cylinders::{flat_region, side_sweeps};
use super::{CylinderRegions, FlatCylinder};
use crate::config::TwistMode;
use crate::curves::restrict::restrict_path;
use crate::curves::{is_geodesic, trace_chain, FlatCurve, TracedPath};
use crate::error::{Error, Result};
use crate::math::inside_convex;
use crate::surface::visibility::Budget;
use crate::surface::FlatSurface;

/// Largest number of full turns made by a strand of `gamma` crossing `cyl`.
pub fn twist(s: &FlatSurface, cyl: &FlatCylinder, gamma: &FlatCurve) -> Result<u64> {
    twist_with(s, cyl, gamma, TwistMode::PerStrand)
}

pub fn twist_with(s: &FlatSurface, cyl: &FlatCylinder, gamma: &FlatCurve, mode: TwistMode) -> Result<u64> {
    let regions = cylinder_regions(s, cyl, 0.0, 0.0)?;
    let chain = gamma.path(s)?;
    if !is_geodesic(s, &chain)?.geodesic {
        return Err(Error::Precondition("twist needs a geodesic curve; tighten it first".into()));
    }
    let p = trace_chain(s, &chain)?;
    twist_in(s, &p, cyl, &regions, mode)
}

/// The open cylinder and the annulus reaching `e` and `g` beyond its left
/// and right boundaries.
pub(crate) fn cylinder_regions(s: &FlatSurface, cyl: &FlatCylinder, e: f64, g: f64) -> Result<CylinderRegions> {
    let mut budget = Budget::new(crate::config::DEVELOP_BUDGET);
    let half = 0.5 * cyl.height;
    let htol = 1e-8 * s.scale().max(cyl.circumference);
    let (l, r) = side_sweeps(s, cyl, half + e + htol, half + g + htol, &mut budget)?;
    let (flat, flat_dirs) = flat_region(s, cyl, &l, &r);
    let mut annulus = l.region(s, 0.0, half + e).0;
    annulus.extend(&r.region(s, 0.0, half + g).0);
    let bands = super::pieces::bands(cyl, &l, &r);
    Ok(CylinderRegions { flat, annulus, flat_dirs, bands })
}

pub(crate) fn twist_in(
    s: &FlatSurface,
    p: &TracedPath,
    cyl: &FlatCylinder,
    regions: &CylinderRegions,
    mode: TwistMode,
) -> Result<u64> {
    let res = restrict_path(s, p, 1.0, &regions.flat)?;
    let l = cyl.circumference;
    let margin = 1e-9 * s.scale();
    let mut best = 0u64;
    let mut total = 0u64;
    for arc in &res.arcs {
        let (mut dx, mut dy) = (0.0, 0.0);
        for piece in &arc.pieces {
            let mid = (piece.a + piece.b) * 0.5;
            let hit = regions
                .flat
                .polys
                .iter()
                .zip(regions.flat_dirs.iter())
                .find(|((t, q), _)| *t == piece.tri && inside_convex(q, mid, -margin));
            let Some((_, dir)) = hit else { continue };
            let v = piece.b - piece.a;
            dx += v.dot(*dir);
            dy += dir.cross(v);
        }
        if dy.abs() <= 0.5 * cyl.height {
            continue;
        }
        let n = (dx.abs() / l + 1e-9).floor() as u64;
        best = best.max(n);
        total += n;
    }
    Ok(match mode {
        TwistMode::PerStrand => best,
        TwistMode::Total => total,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curves::Segment;
    use crate::decomposition::find_cylinders;
    use crate::math::PlanarVector;
    use crate::surface::builders::flat_torus;

    fn horizontal(s: &FlatSurface) -> FlatCylinder {
        find_cylinders(s, 1.2)
            .unwrap()
            .into_iter()
            .find(|c| c.direction.v.abs() < 1e-12)
            .unwrap()
    }

    #[test]
    fn torus_n_one_curves() {
        let s = flat_torus(1.0, 1.0).unwrap();
        let c = horizontal(&s);
        for n in 0..4 {
            let g = FlatCurve::trajectory(Segment::from_corner(0, 0, PlanarVector::new(n as f64, 1.0)), 1.0);
            assert_eq!(twist(&s, &c, &g).unwrap(), n);
            let start = crate::math::barycentric(&s.corners(0), PlanarVector::new(0.7, 0.2));
            let r = FlatCurve::trajectory(Segment { tri: 0, start, vector: PlanarVector::new(n as f64, 1.0) }, 1.0);
            assert_eq!(twist(&s, &c, &r).unwrap(), n);
        }
    }

    #[test]
    fn parallel_curve_does_not_cross() {
        let s = flat_torus(1.0, 1.0).unwrap();
        let c = horizontal(&s);
        assert_eq!(twist(&s, &c, &c.core()).unwrap(), 0);
    }

    #[test]
    fn non_geodesic_is_rejected() {
        let s = flat_torus(1.0, 1.0).unwrap();
        let c = horizontal(&s);
        let bent = FlatCurve::chain(
            crate::curves::SegmentChain::closed(alloc::vec![
                Segment::from_corner(0, 0, PlanarVector::new(1.0, 0.0)),
                Segment::from_corner(0, 0, PlanarVector::new(0.0, 1.0)),
            ]),
            1.0,
        );
        assert!(matches!(twist(&s, &c, &bent), Err(Error::Precondition(_))));
    }
}
