//! Scans of the length estimates along the flow and the measurements made
//! on them.

pub mod ensemble;
pub mod suite;

use alloc::string::{String, ToString};
use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;

use crate::config::Config;
use crate::curves::tighten::tighten;
use crate::curves::{is_geodesic, FlatCurve};
use crate::decomposition::{find_short_curves_with, ThickThin};
use crate::error::{Error, Result};
use crate::estimators::{classify_from, estimate_from, lower_bound_from, profile_with, EssentialClass, Kind, Profile};
use crate::flow::flow_surface;
use crate::surface::visibility::Budget;
use crate::surface::FlatSurface;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum RowFlag {
    /// The decomposition ran out of its enumeration budget.
    Budget,
    /// Tightening stopped at its move cap.
    Tighten,
    /// Any other failure; see the message.
    Failed,
}

impl RowFlag {
    pub fn name(self) -> &'static str {
        match self {
            RowFlag::Budget => "budget",
            RowFlag::Tighten => "tighten",
            RowFlag::Failed => "failed",
        }
    }

    fn of(e: &Error) -> Self {
        match e {
            Error::Budget { .. } => RowFlag::Budget,
            Error::NonConvergence { .. } => RowFlag::Tighten,
            _ => RowFlag::Failed,
        }
    }
}

/// One sample of a scan. Fields that could not be computed are NaN.
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ScanRow {
    pub t: f64,
    #[cfg_attr(feature = "serde", serde(with = "crate::serde_nan"))]
    pub flat_length: f64,
    #[cfg_attr(feature = "serde", serde(with = "crate::serde_nan"))]
    pub h: f64,
    #[cfg_attr(feature = "serde", serde(with = "crate::serde_nan"))]
    pub v: f64,
    #[cfg_attr(feature = "serde", serde(with = "crate::serde_nan"))]
    pub ext: f64,
    #[cfg_attr(feature = "serde", serde(with = "crate::serde_nan"))]
    pub hyp: f64,
    #[cfg_attr(feature = "serde", serde(with = "crate::serde_nan"))]
    pub ext_lower: f64,
    #[cfg_attr(feature = "serde", serde(with = "crate::serde_nan"))]
    pub hyp_lower: f64,
    pub class_ext: Option<EssentialClass>,
    pub class_hyp: Option<EssentialClass>,
    /// Whether the curve is itself one of the short curves.
    pub is_short: bool,
    pub num_shorts: usize,
    pub num_pieces: usize,
    #[cfg_attr(feature = "serde", serde(with = "crate::serde_nan"))]
    pub systole: f64,
    pub flags: Vec<RowFlag>,
    pub message: Option<String>,
}

impl ScanRow {
    fn empty(t: f64) -> Self {
        ScanRow {
            t,
            flat_length: f64::NAN,
            h: f64::NAN,
            v: f64::NAN,
            ext: f64::NAN,
            hyp: f64::NAN,
            ext_lower: f64::NAN,
            hyp_lower: f64::NAN,
            class_ext: None,
            class_hyp: None,
            is_short: false,
            num_shorts: 0,
            num_pieces: 0,
            systole: f64::NAN,
            flags: Vec::new(),
            message: None,
        }
    }

    pub fn is_clean(&self) -> bool {
        self.flags.is_empty()
    }

    fn fail(mut self, e: &Error) -> Self {
        self.flags.push(RowFlag::of(e));
        self.message = Some(e.to_string());
        self
    }

    pub fn value(&self, kind: Kind) -> f64 {
        match kind {
            Kind::Ext => self.ext,
            Kind::Hyp => self.hyp,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ScanResult {
    pub surface: String,
    pub curve: String,
    pub seed: Option<u64>,
    pub m0: f64,
    pub rows: Vec<ScanRow>,
}

impl ScanResult {
    pub fn times(&self) -> Vec<f64> {
        self.rows.iter().map(|r| r.t).collect()
    }
}

/// The decomposition of the surface flowed for time `t`.
pub fn decompose_at(s: &FlatSurface, t: f64, cfg: &Config) -> Result<(FlatSurface, Result<ThickThin>)> {
    let st = flow_surface(s, t)?;
    let mut budget = Budget::new(cfg.develop_budget);
    let tt = find_short_curves_with(&st, cfg, &mut budget);
    Ok((st, tt))
}

/// `γ` carried to the flowed surface `st` and tightened there.
pub fn curve_at(st: &FlatSurface, gamma: &FlatCurve, t: f64, cfg: &Config) -> Result<FlatCurve> {
    let g = gamma.flowed(t);
    let chain = g.path(st)?;
    if is_geodesic(st, &chain)?.geodesic {
        return Ok(g);
    }
    Ok(FlatCurve::chain(tighten(st, &chain, cfg.tighten_budget)?, g.weight))
}

/// A scan row together with the profile it came from, for checks that
/// need more than the totals.
pub fn evaluate(
    st: &FlatSurface,
    t: f64,
    gamma_t: &FlatCurve,
    tt: &ThickThin,
    cfg: &Config,
) -> Result<(ScanRow, Profile)> {
    let mut row = ScanRow::empty(t);
    let pr = profile_with(st, gamma_t, tt, cfg)?;
    row.flat_length = pr.length;
    row.h = pr.hv.0;
    row.v = pr.hv.1;
    let ext = estimate_from(Kind::Ext, &pr, tt);
    let hyp = estimate_from(Kind::Hyp, &pr, tt);
    row.ext = ext.total;
    row.hyp = hyp.total;
    row.ext_lower = lower_bound_from(Kind::Ext, &pr, tt).total;
    row.hyp_lower = lower_bound_from(Kind::Hyp, &pr, tt).total;
    row.class_ext = Some(classify_from(&pr, &ext, cfg.balanced_band));
    row.class_hyp = Some(classify_from(&pr, &hyp, cfg.balanced_band));
    row.is_short = pr.short.is_some();
    row.num_shorts = tt.shorts.len();
    row.num_pieces = tt.pieces.len();
    row.systole = tt.systole;
    Ok((row, pr))
}

/// Row for `γ` on the flowed surface, given that surface's decomposition.
pub fn row_at(st: &FlatSurface, t: f64, gamma: &FlatCurve, tt: &Result<ThickThin>, cfg: &Config) -> ScanRow {
    let tt = match tt {
        Ok(tt) => tt,
        Err(e) => return ScanRow::empty(t).fail(e),
    };
    let g = match curve_at(st, gamma, t, cfg) {
        Ok(g) => g,
        Err(e) => return ScanRow::empty(t).fail(&e),
    };
    match evaluate(st, t, &g, tt, cfg) {
        Ok((row, _)) => row,
        Err(e) => ScanRow::empty(t).fail(&e),
    }
}

/// One sample of a scan, computed from scratch.
pub fn scan_row(s: &FlatSurface, gamma: &FlatCurve, t: f64, cfg: &Config) -> ScanRow {
    match decompose_at(s, t, cfg) {
        Ok((st, tt)) => row_at(&st, t, gamma, &tt, cfg),
        Err(e) => ScanRow::empty(t).fail(&e),
    }
}

pub fn check_grid(grid: &[f64]) -> Result<()> {
    if grid.is_empty() {
        return Err(Error::Invalid("empty time grid".into()));
    }
    if grid.iter().any(|t| !t.is_finite()) {
        return Err(Error::Invalid("time grid has a non-finite entry".into()));
    }
    if grid.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::Invalid("time grid must be strictly increasing".into()));
    }
    Ok(())
}

pub fn scan(s: &FlatSurface, gamma: &FlatCurve, grid: &[f64], m0: f64) -> Result<ScanResult> {
    scan_with(s, gamma, grid, &Config::default().with_m0(m0))
}

pub fn scan_with(s: &FlatSurface, gamma: &FlatCurve, grid: &[f64], cfg: &Config) -> Result<ScanResult> {
    check_grid(grid)?;
    cfg.validate()?;
    let rows = grid.iter().map(|&t| scan_row(s, gamma, t, cfg)).collect();
    assemble(grid, rows, cfg)
}

/// Scan from rows computed elsewhere, in grid order.
pub fn assemble(grid: &[f64], rows: Vec<ScanRow>, cfg: &Config) -> Result<ScanResult> {
    check_grid(grid)?;
    cfg.validate()?;
    if rows.len() != grid.len() {
        return Err(Error::Invalid(alloc::format!("{} rows for {} grid points", rows.len(), grid.len())));
    }
    Ok(ScanResult { surface: String::new(), curve: String::new(), seed: None, m0: cfg.m0, rows })
}

#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct QuasiConvexityReport {
    pub k_ext: f64,
    pub k_hyp: f64,
    /// Times `(a, b, c)` realising each constant.
    pub argmax_ext: (f64, f64, f64),
    pub argmax_hyp: (f64, f64, f64),
    pub clean_rows: usize,
    pub excluded_rows: usize,
}

/// `max over i < j < k of v[j] / max(v[i], v[k])` with the maximising
/// triple. The constant is reported as at least 1.
pub fn quasiconvexity_constant(values: &[f64]) -> Result<(f64, (usize, usize, usize))> {
    let n = values.len();
    if n < 3 {
        return Err(Error::Invalid(alloc::format!("need at least 3 samples, got {n}")));
    }
    // for fixed j the best ends are the smallest values on either side
    let mut suffix = alloc::vec![n - 1; n];
    for k in (0..n - 1).rev() {
        suffix[k] = if values[k] < values[suffix[k + 1]] { k } else { suffix[k + 1] };
    }
    let mut lo = 0;
    let mut best = (f64::NEG_INFINITY, (0, 1, 2));
    for j in 1..n - 1 {
        if values[j - 1] < values[lo] {
            lo = j - 1;
        }
        let hi = suffix[j + 1];
        let den = values[lo].max(values[hi]);
        let r = if den > 0.0 {
            values[j] / den
        } else if values[j] > 0.0 {
            f64::INFINITY
        } else {
            1.0
        };
        if r > best.0 {
            best = (r, (lo, j, hi));
        }
    }
    Ok((best.0.max(1.0), best.1))
}

pub fn quasiconvexity(scan: &ScanResult) -> Result<QuasiConvexityReport> {
    let clean: Vec<&ScanRow> = scan.rows.iter().filter(|r| r.is_clean()).collect();
    if clean.len() < 3 {
        return Err(Error::Invalid(alloc::format!("need at least 3 clean rows, got {}", clean.len())));
    }
    let times = |(a, b, c): (usize, usize, usize)| (clean[a].t, clean[b].t, clean[c].t);
    let ext: Vec<f64> = clean.iter().map(|r| r.ext).collect();
    let hyp: Vec<f64> = clean.iter().map(|r| r.hyp).collect();
    let (k_ext, ie) = quasiconvexity_constant(&ext)?;
    let (k_hyp, ih) = quasiconvexity_constant(&hyp)?;
    Ok(QuasiConvexityReport {
        k_ext,
        k_hyp,
        argmax_ext: times(ie),
        argmax_hyp: times(ih),
        clean_rows: clean.len(),
        excluded_rows: scan.rows.len() - clean.len(),
    })
}

#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SlopeReport {
    pub ext: [f64; 2],
    pub hyp: [f64; 2],
}

/// Value of the series at `t`, linear between clean samples.
pub fn value_at(scan: &ScanResult, kind: Kind, t: f64) -> Result<f64> {
    let clean: Vec<&ScanRow> = scan.rows.iter().filter(|r| r.is_clean()).collect();
    let tol = 1e-9 * (1.0 + t.abs());
    for w in clean.windows(2) {
        let (a, b) = (w[0], w[1]);
        if (a.t - t).abs() <= tol {
            return Ok(a.value(kind));
        }
        if (b.t - t).abs() <= tol {
            return Ok(b.value(kind));
        }
        if a.t < t && t < b.t {
            let u = (t - a.t) / (b.t - a.t);
            return Ok(a.value(kind) * (1.0 - u) + b.value(kind) * u);
        }
    }
    match clean.as_slice() {
        [r] if (r.t - t).abs() <= tol => Ok(r.value(kind)),
        _ => Err(Error::Range(alloc::format!("t = {t} is outside the clean part of the scan"))),
    }
}

/// Average slopes over two intervals, from the values at their ends.
pub fn slope_report(scan: &ScanResult, first: (f64, f64), second: (f64, f64)) -> Result<SlopeReport> {
    let slope = |kind: Kind, (a, b): (f64, f64)| -> Result<f64> {
        if !(b > a) {
            return Err(Error::Invalid(alloc::format!("empty interval ({a}, {b})")));
        }
        Ok((value_at(scan, kind, b)? - value_at(scan, kind, a)?) / (b - a))
    };
    Ok(SlopeReport {
        ext: [slope(Kind::Ext, first)?, slope(Kind::Ext, second)?],
        hyp: [slope(Kind::Hyp, first)?, slope(Kind::Hyp, second)?],
    })
}

/// Lower bound for the Teichmüller distance from the extremal lengths of
/// one curve at two points.
pub fn kerckhoff_gap(ext_at_x: f64, ext_at_u: f64) -> Result<f64> {
    if !(ext_at_x > 0.0) || !(ext_at_u > 0.0) || !ext_at_x.is_finite() || !ext_at_u.is_finite() {
        return Err(Error::Invalid(alloc::format!("extremal lengths must be positive, got {ext_at_x} and {ext_at_u}")));
    }
    Ok(0.5 * (ext_at_u / ext_at_x).ln())
}

/// Whether some equally spaced triple of clean samples lies strictly above
/// its chord: returns `(t1, t2, t3)` for the largest violation.
pub fn midpoint_violation(scan: &ScanResult, kind: Kind) -> Option<(f64, f64, f64)> {
    let clean: Vec<&ScanRow> = scan.rows.iter().filter(|r| r.is_clean()).collect();
    let mut best: Option<(f64, (f64, f64, f64))> = None;
    for j in 1..clean.len() {
        for i in 0..j {
            for k in j + 1..clean.len() {
                let (a, b, c) = (clean[i], clean[j], clean[k]);
                let u = (b.t - a.t) / (c.t - a.t);
                let chord = a.value(kind) * (1.0 - u) + c.value(kind) * u;
                let gap = b.value(kind) - chord;
                let scale = a.value(kind).abs().max(c.value(kind).abs()).max(b.value(kind).abs());
                if gap > 1e-9 * scale && best.is_none_or(|x| gap > x.0) {
                    best = Some((gap, (a.t, b.t, c.t)));
                }
            }
        }
    }
    best.map(|x| x.1)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_of_synthetic_series() {
        assert_eq!(quasiconvexity_constant(&[1.0, 4.0, 1.0]).unwrap(), (4.0, (0, 1, 2)));
        assert_eq!(quasiconvexity_constant(&[1.0, 2.0, 3.0, 4.0]).unwrap().0, 1.0);
        assert!(quasiconvexity_constant(&[1.0, 2.0]).is_err());
    }

    #[test]
    fn kerckhoff_arithmetic() {
        assert!((kerckhoff_gap(1.0, 2f64.exp()).unwrap() - 1.0).abs() < 1e-12);
        assert_eq!(kerckhoff_gap(4.0, 4.0).unwrap(), 0.0);
        assert!(kerckhoff_gap(0.0, 1.0).is_err());
    }
}
