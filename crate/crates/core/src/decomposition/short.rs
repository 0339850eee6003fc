//! The thick-thin decomposition: short cylinders by modulus sum, then the
//! complementary pieces.

use alloc::vec::Vec;
#[allow(unused_imports)]
use num_traits::Float;

use super::annuli::expanding_annuli_with;
use super::cylinders::find_cylinders_with;
use super::pieces::{build_pieces, chords, surface_diam};
use super::twist::cylinder_regions;
use super::{AnnulusData, CylinderRegions, ThickPiece, ThickThin, TracedSaddle};
use crate::config::Config;
use crate::curves::intersection_number;
use crate::error::{Error, Result};
use crate::surface::visibility::{saddle_connections, Budget};
use crate::surface::trace::{trace, Origin};
use crate::surface::FlatSurface;

/// Decomposition with threshold `m0` and otherwise default settings.
pub fn find_short_curves(s: &FlatSurface, m0: f64) -> Result<ThickThin> {
    let cfg = Config::default().with_m0(m0);
    let mut budget = Budget::new(cfg.develop_budget);
    find_short_curves_with(s, &cfg, &mut budget)
}

pub fn find_short_curves_with(s: &FlatSurface, cfg: &Config, budget: &mut Budget) -> Result<ThickThin> {
    let m0 = cfg.m0;
    if !(m0 > cfg.m0_floor) || !m0.is_finite() {
        return Err(Error::Invalid(alloc::format!("m0 must exceed {}, got {m0}", cfg.m0_floor)));
    }
    let area = s.area();
    let bound = cfg.short_circumference_bound(area);
    let mut candidates: Vec<AnnulusData> = Vec::new();
    for c in find_cylinders_with(s, bound, budget)? {
        let l = c.circumference;
        let ceiling = c.modulus() + 2.0 * (area / (l * l)).max(1.0).ln();
        if ceiling < m0 {
            continue;
        }
        let (e, g) = expanding_annuli_with(s, &c, budget)?;
        let a = AnnulusData::new(c, e, g);
        if a.modulus_sum() >= m0 {
            candidates.push(a);
        }
    }
    candidates.sort_by(|a, b| b.modulus_sum().total_cmp(&a.modulus_sum()));
    let mut shorts: Vec<AnnulusData> = Vec::new();
    for a in candidates {
        let core = a.core();
        let mut ok = true;
        for b in &shorts {
            if intersection_number(s, &core, &b.core())? > 0.0 {
                ok = false;
                break;
            }
        }
        if ok {
            shorts.push(a);
        }
    }
    let systole = shortest_saddle_connection(s, budget)?;
    let mut regions = Vec::with_capacity(shorts.len());
    let mut cuts = Vec::with_capacity(shorts.len());
    let mut bands = Vec::new();
    for a in &shorts {
        let r = cylinder_regions(s, &a.cylinder, a.e, a.g)?;
        bands.extend(r.bands.iter().copied());
        regions.push(r);
        cuts.push(chords(s, a)?);
    }
    let mut pieces = build_pieces(s, &shorts, &cuts, &bands, systole);
    let (saddles, saddle_radius) = traced_saddles(s, &pieces, &shorts);
    if let Some(scs) = &saddles {
        piece_systoles(s, &mut pieces, &regions, scs);
    }
    Ok(ThickThin { shorts, pieces, m0, systole, surface_diam: surface_diam(s), regions, saddles, saddle_radius })
}

/// Developed triangles allowed for the saddle connections kept with the
/// decomposition.
const SADDLE_BUDGET: usize = 200_000;

/// Saddle connections up to twice the largest piece diameter or annulus
/// width, traced.
fn traced_saddles(s: &FlatSurface, pieces: &[ThickPiece], shorts: &[AnnulusData]) -> (Option<Vec<TracedSaddle>>, f64) {
    let radius = pieces
        .iter()
        .filter(|y| !y.degenerate)
        .map(|y| 2.0 * y.diam)
        .chain(shorts.iter().map(|a| a.d))
        .fold(0.0, f64::max);
    if !(radius > 0.0) {
        return (Some(Vec::new()), 0.0);
    }
    let mut budget = Budget::new(SADDLE_BUDGET);
    let Ok(scs) = saddle_connections(s, radius, &mut budget) else { return (None, radius) };
    let mut out = Vec::with_capacity(scs.len());
    for c in &scs {
        if let Ok(tr) = trace(s, Origin::Corner { tri: c.tri, i: c.corner }, c.vector) {
            out.push(TracedSaddle { length: c.length, pieces: tr.pieces });
        }
    }
    (Some(out), radius)
}

/// Shortest saddle connection with its midpoint in the piece and outside
/// every short annulus, so boundary curves do not count. Capped at twice
/// the diameter.
fn piece_systoles(s: &FlatSurface, pieces: &mut [ThickPiece], regions: &[CylinderRegions], scs: &[TracedSaddle]) {
    let tol = 1e-9 * s.scale();
    for y in pieces.iter_mut().filter(|y| !y.degenerate && y.diam > 0.0) {
        let cap = 2.0 * y.diam;
        let inside = |c: &&TracedSaddle| {
            let half = 0.5 * c.length;
            let Some(q) = c.pieces.iter().find(|q| q.s0 <= half && half <= q.s1) else { return false };
            let p = q.a + (q.b - q.a) * ((half - q.s0) / (q.s1 - q.s0).max(f64::MIN_POSITIVE));
            !regions.iter().any(|r| r.annulus.contains(q.tri, p, tol)) && y.region.contains(q.tri, p, tol)
        };
        // sorted by length
        y.systole = scs.iter().take_while(|c| c.length < cap).find(inside).map_or(cap, |c| c.length);
    }
}

/// Length of the shortest saddle connection.
pub fn shortest_saddle_connection(s: &FlatSurface, budget: &mut Budget) -> Result<f64> {
    let r = (0..s.num_triangles())
        .flat_map(|t| s.edges(t).iter().map(|e| e.norm()).collect::<Vec<_>>())
        .fold(f64::INFINITY, f64::min);
    let scs = saddle_connections(s, r, budget)?;
    Ok(scs.iter().map(|c| c.length).fold(r, f64::min))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::flow::flow_surface;
    use crate::surface::builders::{flat_torus, slit_tori};

    #[test]
    fn unit_torus_has_no_short_curves() {
        let s = flat_torus(1.0, 1.0).unwrap();
        let tt = find_short_curves(&s, 5.0).unwrap();
        assert!(tt.shorts.is_empty());
        assert_eq!(tt.pieces.len(), 1);
        assert!(!tt.pieces[0].degenerate);
        assert!((tt.systole - 1.0).abs() < 1e-12);
    }

    #[test]
    fn thin_torus_is_one_degenerate_piece() {
        let s = flat_torus(0.1, 10.0).unwrap();
        let tt = find_short_curves(&s, 5.0).unwrap();
        assert_eq!(tt.shorts.len(), 1);
        assert!((tt.shorts[0].mod_f - 100.0).abs() < 1e-6);
        assert_eq!(tt.pieces.len(), 1);
        assert!(tt.pieces[0].degenerate);
        assert!(tt.pieces[0].triangles.is_empty());
        assert_eq!(tt.pieces[0].diam, 0.0);
    }

    #[test]
    fn slit_tori_flowed_back() {
        let st = slit_tori(0.1).unwrap();
        let s = flow_surface(&st.surface, -2.0).unwrap();
        let tt = find_short_curves(&s, 5.0).unwrap();
        let c = tt
            .shorts
            .iter()
            .find(|a| (a.mod_f - 4f64.exp()).abs() < 1e-6)
            .expect("alpha is short");
        assert!((c.length - 0.1 * (-2f64).exp()).abs() < 1e-12);
        for x in &tt.shorts {
            assert!(x.modulus_sum() >= 5.0);
        }
        // the two tori and a degenerate piece between the slits do not occur:
        // each boundary side of alpha meets a non-degenerate piece
        for p in &tt.pieces {
            assert!(p.diam >= 0.0);
        }
    }
}
