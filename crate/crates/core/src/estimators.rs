//! Comparability estimates for extremal and hyperbolic length read off a
//! thick-thin decomposition, with the cost of sub-arcs and the classifier
//! telling which part of the surface carries most of the length.
//!
//! All functions return the raw formula values. Constants are left to the
//! callers that compare them.

use alloc::vec::Vec;
use core::f64::consts::E;

#[allow(unused_imports)]
use num_traits::Float;

use crate::config::Config;
use crate::curves::intersection::crossing_count;
use crate::curves::restrict::{restrict_path, Restriction};
use crate::curves::{is_geodesic, trace_chain, ArcOnSurface, FlatCurve};
use crate::decomposition::twist::twist_in;
use crate::decomposition::ThickThin;
use crate::error::{Error, Result};
use crate::math::clip_segment_convex;
use crate::surface::trace::TracePiece;
use crate::surface::FlatSurface;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum Kind {
    Ext,
    Hyp,
}

/// Where a term comes from: a piece id or an index into `ThickThin::shorts`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum Source {
    Piece(usize),
    Annulus(usize),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum Component {
    Subsurface,
    /// The modulus term of an annulus whose flat part dominates.
    InverseExt,
    Twist,
    /// The modulus term of an annulus whose expanding parts dominate.
    Expanding,
}

#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Term {
    pub source: Source,
    pub component: Component,
    pub value: f64,
}

#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct LengthEstimate {
    pub total: f64,
    pub kind: Kind,
    pub terms: Vec<Term>,
}

impl LengthEstimate {
    fn from_terms(kind: Kind, terms: Vec<Term>) -> Self {
        let total = terms.iter().map(|t| t.value).sum();
        LengthEstimate { total, kind, terms }
    }

    pub fn max_term(&self) -> Option<&Term> {
        self.terms.iter().max_by(|a, b| a.value.total_cmp(&b.value))
    }
}

/// How one piece of the decomposition sees the curve.
#[derive(Clone, Debug, PartialEq)]
pub struct PieceMeasure {
    pub id: usize,
    pub length: f64,
    pub h: f64,
    pub v: f64,
}

/// How one short annulus sees the curve.
#[derive(Clone, Debug, PartialEq)]
pub struct AnnulusMeasure {
    pub index: usize,
    /// `i(α, γ)`, weighted.
    pub crossings: f64,
    pub twist: u64,
    /// Length, horizontal and vertical length inside the open cylinder.
    pub flat: (f64, f64, f64),
    /// The same inside the whole annulus.
    pub annulus: (f64, f64, f64),
}

/// Everything the estimates need about `γ` against one decomposition.
#[derive(Clone, Debug, PartialEq)]
pub struct Profile {
    /// Set when `γ` is a multiple of a short curve: its index and the
    /// multiplicity times the weight.
    pub short: Option<(usize, f64)>,
    pub pieces: Vec<PieceMeasure>,
    pub annuli: Vec<AnnulusMeasure>,
    pub weight: f64,
    pub length: f64,
    pub hv: (f64, f64),
}

fn measure(r: &Restriction) -> (f64, f64, f64) {
    let (mut h, mut v) = (0.0, 0.0);
    for a in &r.arcs {
        let (x, y) = a.hv();
        h += x;
        v += y;
    }
    (r.length, h, v)
}

pub fn profile(s: &FlatSurface, gamma: &FlatCurve, tt: &ThickThin) -> Result<Profile> {
    profile_with(s, gamma, tt, &Config::default())
}

pub fn profile_with(s: &FlatSurface, gamma: &FlatCurve, tt: &ThickThin, cfg: &Config) -> Result<Profile> {
    let chain = gamma.path(s)?;
    if !is_geodesic(s, &chain)?.geodesic {
        return Err(Error::Precondition("estimates need a geodesic curve; tighten it first".into()));
    }
    let p = trace_chain(s, &chain)?;
    let w = gamma.weight;
    let (h, v) = chain.hv();
    let mut out = Profile {
        short: None,
        pieces: Vec::new(),
        annuli: Vec::new(),
        weight: w,
        length: p.length * w,
        hv: (h * w, v * w),
    };
    for (k, a) in tt.shorts.iter().enumerate() {
        let inside = restrict_path(s, &p, 1.0, &tt.regions[k].flat)?.length;
        if p.length > 0.0 && inside >= p.length * (1.0 - 1e-6) {
            // a closed geodesic inside the open cylinder missing the core is a leaf
            let core = trace_chain(s, &a.core().path(s)?)?;
            if crossing_count(s, &core, &p) > 0 {
                continue;
            }
            let m = (p.length / a.length).round().max(1.0);
            out.short = Some((k, m * w));
            return Ok(out);
        }
    }
    for piece in tt.pieces.iter().filter(|y| !y.degenerate) {
        let (length, h, v) = measure(&restrict_path(s, &p, w, &piece.region)?);
        if length > 0.0 {
            out.pieces.push(PieceMeasure { id: piece.id, length, h, v });
        }
    }
    for (k, a) in tt.shorts.iter().enumerate() {
        let core = trace_chain(s, &a.core().path(s)?)?;
        let crossings = crossing_count(s, &core, &p) as f64 * w;
        let reg = &tt.regions[k];
        let annulus = measure(&restrict_path(s, &p, w, &reg.annulus)?);
        if crossings == 0.0 && annulus.0 == 0.0 {
            continue;
        }
        let flat = measure(&restrict_path(s, &p, w, &reg.flat)?);
        let twist = if crossings > 0.0 { twist_in(s, &p, &a.cylinder, reg, cfg.twist_mode)? } else { 0 };
        out.annuli.push(AnnulusMeasure { index: k, crossings, twist, flat, annulus });
    }
    Ok(out)
}

fn annulus_component(tt: &ThickThin, k: usize) -> Component {
    let a = &tt.shorts[k];
    if a.mod_e + a.mod_g > a.mod_f {
        Component::Expanding
    } else {
        Component::InverseExt
    }
}

fn short_branch(kind: Kind, tt: &ThickThin, k: usize, w: f64) -> LengthEstimate {
    let ext = tt.shorts[k].ext_estimate;
    let value = match kind {
        Kind::Ext => w * w * ext,
        Kind::Hyp => w * ext,
    };
    LengthEstimate::from_terms(
        kind,
        alloc::vec![Term { source: Source::Annulus(k), component: Component::InverseExt, value }],
    )
}

fn diam_of(tt: &ThickThin, id: usize) -> f64 {
    tt.pieces.iter().find(|y| y.id == id).map_or(0.0, |y| y.diam)
}

/// The length estimate of the requested kind from a profile.
pub fn estimate_from(kind: Kind, pr: &Profile, tt: &ThickThin) -> LengthEstimate {
    if let Some((k, w)) = pr.short {
        return short_branch(kind, tt, k, w);
    }
    let mut terms = Vec::new();
    for m in &pr.pieces {
        let d = diam_of(tt, m.id);
        if d <= 0.0 {
            continue;
        }
        let r = m.length / d;
        let value = if kind == Kind::Ext { r * r } else { r };
        terms.push(Term { source: Source::Piece(m.id), component: Component::Subsurface, value });
    }
    for m in pr.annuli.iter().filter(|m| m.crossings > 0.0) {
        let a = &tt.shorts[m.index];
        let i = m.crossings;
        let tw = m.twist as f64;
        let (modulus, twist) = match kind {
            Kind::Ext => (a.modulus_sum() * i * i, tw * tw * a.ext_estimate * i * i),
            Kind::Hyp => ((1.0 / a.ext_estimate).ln().max(0.0) * i, tw * a.ext_estimate * i),
        };
        let src = Source::Annulus(m.index);
        terms.push(Term { source: src, component: annulus_component(tt, m.index), value: modulus });
        if m.twist > 0 {
            terms.push(Term { source: src, component: Component::Twist, value: twist });
        }
    }
    LengthEstimate::from_terms(kind, terms)
}

/// The lower bound of the requested kind from a profile.
pub fn lower_bound_from(kind: Kind, pr: &Profile, tt: &ThickThin) -> LengthEstimate {
    if let Some((k, w)) = pr.short {
        return short_branch(kind, tt, k, w);
    }
    let pow = |r: f64| if kind == Kind::Ext { r * r } else { r };
    let mut terms = Vec::new();
    for m in &pr.pieces {
        let d = diam_of(tt, m.id);
        if d > 0.0 {
            terms.push(Term { source: Source::Piece(m.id), component: Component::Subsurface, value: pow(m.length / d) });
        }
    }
    for m in &pr.annuli {
        let a = &tt.shorts[m.index];
        if m.annulus.0 > 0.0 && a.d > 0.0 {
            terms.push(Term {
                source: Source::Annulus(m.index),
                component: annulus_component(tt, m.index),
                value: pow(m.annulus.0 / a.d),
            });
        }
    }
    LengthEstimate::from_terms(kind, terms)
}

pub fn ext_estimate(s: &FlatSurface, gamma: &FlatCurve, tt: &ThickThin) -> Result<LengthEstimate> {
    Ok(estimate_from(Kind::Ext, &profile(s, gamma, tt)?, tt))
}

pub fn hyp_estimate(s: &FlatSurface, gamma: &FlatCurve, tt: &ThickThin) -> Result<LengthEstimate> {
    Ok(estimate_from(Kind::Hyp, &profile(s, gamma, tt)?, tt))
}

pub fn ext_lower_bound(s: &FlatSurface, gamma: &FlatCurve, tt: &ThickThin) -> Result<LengthEstimate> {
    Ok(lower_bound_from(Kind::Ext, &profile(s, gamma, tt)?, tt))
}

pub fn hyp_lower_bound(s: &FlatSurface, gamma: &FlatCurve, tt: &ThickThin) -> Result<LengthEstimate> {
    Ok(lower_bound_from(Kind::Hyp, &profile(s, gamma, tt)?, tt))
}

#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ArcCost {
    pub length: f64,
    pub lambda: f64,
    pub sigma: f64,
    pub x: f64,
    pub h: f64,
    /// The arc met no piece or annulus and the surface-wide values were used.
    pub fallback: bool,
}

impl ArcCost {
    pub fn new(length: f64, lambda: f64, sigma: f64) -> Self {
        let q = (lambda / sigma).max(1.0);
        let x = (length / lambda).powi(2) + q.ln();
        let h = length / lambda + (lambda / sigma).max(E).ln().ln().max(0.0);
        ArcCost { length, lambda, sigma, x, h, fallback: false }
    }
}

fn arc_meets(s: &FlatSurface, arc: &ArcOnSurface, region: &crate::curves::Region) -> bool {
    let margin = 1e-9 * s.scale();
    arc.pieces.iter().any(|p| {
        region
            .polys
            .iter()
            .filter(|(t, _)| *t == p.tri)
            .any(|(_, q)| clip_segment_convex(q, p.a, p.b, margin).is_some_and(|(a, b)| b > a))
    })
}

fn arc_crosses<'a, I: IntoIterator<Item = &'a TracePiece>>(arc: &ArcOnSurface, other: I) -> bool {
    let tol = 1e-12;
    other.into_iter().any(|c| {
        arc.pieces.iter().filter(|p| p.tri == c.tri).any(|p| {
            let d1 = p.b - p.a;
            let d2 = c.b - c.a;
            let den = d1.cross(d2);
            if den.abs() <= tol * d1.norm() * d2.norm() {
                return false;
            }
            let w = c.a - p.a;
            let t = w.cross(d2) / den;
            let u = w.cross(d1) / den;
            t > tol && t < 1.0 - tol && u > tol && u < 1.0 - tol
        })
    })
}

/// Cost of a sub-arc of a tightened curve.
pub fn arc_cost(s: &FlatSurface, arc: &ArcOnSurface, tt: &ThickThin) -> Result<ArcCost> {
    let length: f64 = arc.pieces.iter().map(|p| (p.b - p.a).norm()).sum();
    let mut lambda: f64 = 0.0;
    let mut sigma = f64::INFINITY;
    let mut piece_sigma = f64::INFINITY;
    let mut met = false;
    for y in tt.pieces.iter().filter(|y| !y.degenerate) {
        if arc_meets(s, arc, &y.region) {
            met = true;
            lambda = lambda.max(y.diam);
            piece_sigma = piece_sigma.min(y.systole);
        }
    }
    for a in &tt.shorts {
        let core = trace_chain(s, &a.core().path(s)?)?;
        if arc_crosses(arc, core.segments.iter().flat_map(|x| x.trace.pieces.iter())) {
            met = true;
            lambda = lambda.max(a.d);
            sigma = sigma.min(a.length);
        }
    }
    if !met || !(lambda > 0.0) {
        let mut c = ArcCost::new(length, tt.surface_diam, tt.systole);
        c.fallback = true;
        return Ok(c);
    }
    match &tt.saddles {
        // a closed geodesic crossing the arc crosses it along a saddle
        // connection, or is a leaf of a cylinder whose boundary it crosses
        Some(scs) => {
            // sorted by length
            if let Some(c) = scs.iter().take_while(|c| c.length < sigma).find(|c| arc_crosses(arc, &c.pieces)) {
                sigma = c.length;
            }
            sigma = sigma.min(tt.saddle_radius.max(lambda));
        }
        None => sigma = sigma.min(piece_sigma),
    }
    if !sigma.is_finite() {
        sigma = lambda;
    }
    Ok(ArcCost::new(length, lambda, sigma))
}

/// Lower bound from a family of disjoint sub-arcs of one curve.
pub fn arcs_bound(costs: &[ArcCost], kind: Kind) -> f64 {
    if costs.is_empty() {
        return 0.0;
    }
    let n = costs.len() as f64;
    match kind {
        Kind::Ext => n * n * costs.iter().map(|c| c.x).fold(f64::INFINITY, f64::min),
        Kind::Hyp => n * costs.iter().map(|c| c.h).fold(f64::INFINITY, f64::min),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum Direction {
    Horizontal,
    Vertical,
    Balanced,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum Case {
    ThickPiece,
    FlatAnnulus,
    /// Only for hyperbolic length.
    Twist,
    ExpandingAnnulus,
}

impl Case {
    /// Case number: 1 to 3 for extremal length, 1 to 4 for hyperbolic length.
    pub fn number(self, kind: Kind) -> u8 {
        match (self, kind) {
            (Case::ThickPiece, _) => 1,
            (Case::FlatAnnulus, _) => 2,
            (Case::Twist, _) => 3,
            (Case::ExpandingAnnulus, Kind::Ext) => 3,
            (Case::ExpandingAnnulus, Kind::Hyp) => 4,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct EssentialClass {
    pub direction: Direction,
    pub case: Case,
    pub witness: Option<Source>,
    /// Dominant term over the total.
    pub dominance: f64,
}

fn direction_of(h: f64, v: f64, band: f64) -> Direction {
    if (h - v).abs() <= band * (h + v) {
        Direction::Balanced
    } else if h > v {
        Direction::Horizontal
    } else {
        Direction::Vertical
    }
}

/// Classification from a profile and its estimate.
pub fn classify_from(pr: &Profile, est: &LengthEstimate, band: f64) -> EssentialClass {
    let Some(top) = est.max_term() else {
        return EssentialClass {
            direction: direction_of(pr.hv.0, pr.hv.1, band),
            case: Case::ThickPiece,
            witness: None,
            dominance: 0.0,
        };
    };
    let dominance = if est.total > 0.0 { top.value / est.total } else { 0.0 };
    let (case, (h, v)) = match top.source {
        Source::Piece(id) => {
            let m = pr.pieces.iter().find(|m| m.id == id);
            (Case::ThickPiece, m.map_or((0.0, 0.0), |m| (m.h, m.v)))
        }
        Source::Annulus(k) => {
            let m = pr.annuli.iter().find(|m| m.index == k);
            let case = match (top.component, est.kind) {
                (Component::Expanding, _) => Case::ExpandingAnnulus,
                (Component::Twist, Kind::Hyp) => Case::Twist,
                _ => Case::FlatAnnulus,
            };
            let hv = match (m, case) {
                (None, _) => pr.hv,
                (Some(m), Case::ExpandingAnnulus) => (m.annulus.1, m.annulus.2),
                (Some(m), _) => (m.flat.1, m.flat.2),
            };
            (case, hv)
        }
    };
    EssentialClass { direction: direction_of(h, v, band), case, witness: Some(top.source), dominance }
}

pub fn classify_essential(s: &FlatSurface, gamma: &FlatCurve, tt: &ThickThin, kind: Kind) -> Result<EssentialClass> {
    let cfg = Config::default();
    let pr = profile_with(s, gamma, tt, &cfg)?;
    Ok(classify_from(&pr, &estimate_from(kind, &pr, tt), cfg.balanced_band))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn arc_cost_arithmetic() {
        let c = ArcCost::new(10.0, 2.0, 0.5);
        assert!((c.x - (25.0 + 4f64.ln())).abs() < 1e-12);
        assert!((c.h - (5.0 + 4f64.ln().ln())).abs() < 1e-12);
        // λ/σ below e: the double log is clamped
        let d = ArcCost::new(1.0, 1.0, 0.5);
        assert!((d.h - 1.0).abs() < 1e-12);
    }

    #[test]
    fn arcs_bound_arithmetic() {
        let c = ArcCost::new(10.0, 2.0, 0.5);
        let four = [c, c, c, ArcCost::new(20.0, 2.0, 0.5)];
        assert!((arcs_bound(&four, Kind::Ext) - 16.0 * c.x).abs() < 1e-9);
        assert!((arcs_bound(&four, Kind::Hyp) - 4.0 * c.h).abs() < 1e-9);
        assert_eq!(arcs_bound(&[c], Kind::Ext), c.x);
        assert_eq!(arcs_bound(&[], Kind::Hyp), 0.0);
    }
}
