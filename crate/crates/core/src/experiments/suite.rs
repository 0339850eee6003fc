//! Property checks aggregated over an ensemble of scans. Each check reports
//! the worst ratio it saw against a fixed cap.

use alloc::string::String;
use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;

use super::ensemble::{ensemble, torus_instance, Instance};
use super::{curve_at, decompose_at, evaluate, quasiconvexity_constant, ScanRow};
use crate::config::Config;
use crate::curves::restrict::restrict_path;
use crate::curves::{trace_chain, FlatCurve};
use crate::decomposition::ThickThin;
use crate::error::{Error, Result};
use crate::estimators::{arc_cost, arcs_bound, Direction, Kind, Profile};
use crate::flow::make_scan;
use crate::surface::FlatSurface;

/// Caps the suite asserts.
#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Caps {
    pub ext_length: f64,
    pub subsurface: f64,
    pub monotone: f64,
    pub arcs: f64,
    pub k: f64,
    pub lower: f64,
    pub maskit: f64,
}

impl Default for Caps {
    fn default() -> Self {
        Caps { ext_length: 16.0, subsurface: 4.0, monotone: 16.0, arcs: 16.0, k: 50.0, lower: 8.0, maskit: 8.0 }
    }
}

/// The ensemble and grid the suite runs on.
#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SuiteSpec {
    pub seed: u64,
    pub size: usize,
    pub max_squares: usize,
    pub t_min: f64,
    pub t_max: f64,
    pub t_step: f64,
}

impl SuiteSpec {
    pub fn new(seed: u64, size: usize) -> Self {
        SuiteSpec { seed, size, max_squares: 12, t_min: -3.0, t_max: 3.0, t_step: 0.1 }
    }

    pub fn grid(&self) -> Result<Vec<f64>> {
        Ok(make_scan(self.t_min, self.t_max, self.t_step)?.into_iter().map(|t| t.t()).collect())
    }
}

/// The curves of one instance evaluated on one flowed surface.
#[derive(Clone, Debug)]
pub struct Sample {
    pub t: f64,
    pub surface: FlatSurface,
    pub tt: Option<ThickThin>,
    pub rows: Vec<ScanRow>,
    /// Tightened curve and profile, for rows that are clean.
    pub detail: Vec<Option<(FlatCurve, Profile)>>,
}

pub fn sample(inst: &Instance, t: f64, cfg: &Config) -> Sample {
    let (surface, tt) = match decompose_at(&inst.surface, t, cfg) {
        Ok(x) => x,
        Err(e) => {
            let rows = inst.curves.iter().map(|_| super::ScanRow::empty(t).fail(&e)).collect();
            return Sample { t, surface: inst.surface.clone(), tt: None, rows, detail: alloc::vec![None; inst.curves.len()] };
        }
    };
    let mut rows = Vec::with_capacity(inst.curves.len());
    let mut detail = Vec::with_capacity(inst.curves.len());
    for (_, c) in &inst.curves {
        let r = tt.as_ref().map_err(Clone::clone).and_then(|tt| {
            let g = curve_at(&surface, c, t, cfg)?;
            let (row, pr) = evaluate(&surface, t, &g, tt, cfg)?;
            Ok((row, g, pr))
        });
        match r {
            Ok((row, g, pr)) => {
                rows.push(row);
                detail.push(Some((g, pr)));
            }
            Err(e) => {
                rows.push(super::ScanRow::empty(t).fail(&e));
                detail.push(None);
            }
        }
    }
    Sample { t, surface, tt: tt.ok(), rows, detail }
}

/// Worst ratios found on one instance. `None` means the check had no data.
#[derive(Clone, Debug, Default, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct InstanceChecks {
    pub label: String,
    pub k_ext: Vec<f64>,
    pub k_hyp: Vec<f64>,
    pub monotone_ext: Option<f64>,
    pub monotone_hyp: Option<f64>,
    pub ext_length: Option<f64>,
    pub subsurface: Option<f64>,
    pub arcs_ext: Option<f64>,
    pub arcs_hyp: Option<f64>,
    pub lower_ext: Option<f64>,
    pub lower_hyp: Option<f64>,
    pub flagged_rows: usize,
}

fn worst(acc: &mut Option<f64>, x: f64) {
    if x.is_nan() {
        return;
    }
    *acc = Some(acc.map_or(x, |a| a.max(x)));
}

/// `max over a < b of v[a] / v[b]` restricted to the starting times in `from`.
fn decay(ts: &[(f64, f64)], from: &[bool]) -> Option<f64> {
    let mut out = None;
    // smallest later value, scanning from the right
    let mut tail = f64::INFINITY;
    for i in (0..ts.len()).rev() {
        if from[i] && tail.is_finite() && ts[i].1 > 0.0 {
            worst(&mut out, ts[i].1 / tail);
        }
        tail = tail.min(ts[i].1);
    }
    out
}

pub fn instance_checks(inst: &Instance, samples: &[Sample]) -> Result<InstanceChecks> {
    let mut out = InstanceChecks { label: inst.label.clone(), ..Default::default() };
    out.flagged_rows = samples.iter().flat_map(|s| s.rows.iter()).filter(|r| !r.is_clean()).count();
    for c in 0..inst.curves.len() {
        let rows: Vec<&ScanRow> = samples.iter().map(|s| &s.rows[c]).filter(|r| r.is_clean()).collect();
        if rows.len() >= 3 {
            let ext: Vec<f64> = rows.iter().map(|r| r.ext).collect();
            let hyp: Vec<f64> = rows.iter().map(|r| r.hyp).collect();
            out.k_ext.push(quasiconvexity_constant(&ext)?.0);
            out.k_hyp.push(quasiconvexity_constant(&hyp)?.0);
        }
        for kind in [Kind::Ext, Kind::Hyp] {
            let series: Vec<(f64, f64)> = rows.iter().map(|r| (r.t, r.value(kind))).collect();
            let from: Vec<bool> = rows
                .iter()
                .map(|r| {
                    let cls = if kind == Kind::Ext { r.class_ext } else { r.class_hyp };
                    cls.is_some_and(|x| x.direction == Direction::Horizontal)
                })
                .collect();
            if let Some(d) = decay(&series, &from) {
                let acc = if kind == Kind::Ext { &mut out.monotone_ext } else { &mut out.monotone_hyp };
                worst(acc, d);
            }
        }
        let short: Vec<&&ScanRow> = rows.iter().filter(|r| r.is_short).collect();
        for (i, a) in short.iter().enumerate() {
            for b in &short[i + 1..] {
                let r = (a.ext / a.flat_length) / ((b.t - a.t).exp() * b.ext / b.flat_length);
                worst(&mut out.ext_length, r);
            }
        }
        for r in &rows {
            if r.ext > 0.0 {
                worst(&mut out.lower_ext, r.ext_lower / r.ext);
            }
            if r.hyp > 0.0 {
                worst(&mut out.lower_hyp, r.hyp_lower / r.hyp);
            }
        }
        for smp in samples {
            let (Some(tt), Some((g, _))) = (&smp.tt, &smp.detail[c]) else { continue };
            let row = &smp.rows[c];
            if row.is_short {
                continue;
            }
            let costs = sub_arc_costs(&smp.surface, g, tt)?;
            if costs.is_empty() {
                continue;
            }
            if row.ext > 0.0 {
                worst(&mut out.arcs_ext, arcs_bound(&costs, Kind::Ext) / row.ext);
            }
            if row.hyp > 0.0 {
                worst(&mut out.arcs_hyp, arcs_bound(&costs, Kind::Hyp) / row.hyp);
            }
        }
    }
    out.subsurface = subsurface_ratio(samples)?;
    Ok(out)
}

/// Costs of the components of `g` in the pieces and in the open short
/// cylinders: a family of disjoint sub-arcs.
fn sub_arc_costs(s: &FlatSurface, g: &FlatCurve, tt: &ThickThin) -> Result<Vec<crate::estimators::ArcCost>> {
    let p = trace_chain(s, &g.path(s)?)?;
    let mut costs = Vec::new();
    let regions = tt
        .pieces
        .iter()
        .filter(|y| !y.degenerate)
        .map(|y| &y.region)
        .chain(tt.regions.iter().map(|r| &r.flat));
    for region in regions {
        for arc in restrict_path(s, &p, g.weight, region)?.arcs {
            costs.push(arc_cost(s, &arc, tt)?);
        }
    }
    Ok(costs)
}

/// Worst `d_b(β) / (e^{b-a} diam_a(Y))` over pieces `Y` at time `a` met by a
/// curve `β` short at a later time `b`.
fn subsurface_ratio(samples: &[Sample]) -> Result<Option<f64>> {
    let mut out = None;
    for (j, sb) in samples.iter().enumerate() {
        let Some(ttb) = &sb.tt else { continue };
        for beta in &ttb.shorts {
            let core = beta.core();
            for sa in &samples[..j] {
                let Some(tta) = &sa.tt else { continue };
                let back = core.flowed(sa.t - sb.t);
                let p = trace_chain(&sa.surface, &back.path(&sa.surface)?)?;
                let tol = 1e-9 * sa.surface.scale();
                for y in tta.pieces.iter().filter(|y| !y.degenerate && y.diam > 0.0) {
                    if restrict_path(&sa.surface, &p, 1.0, &y.region)?.length > tol {
                        worst(&mut out, beta.d / ((sb.t - sa.t).exp() * y.diam));
                    }
                }
            }
        }
    }
    Ok(out)
}

/// Worst departure from the band `2e^{-H/2} ≤ H/E ≤ π` on the rectangular
/// tori, as the factor by which the band must be widened on either side.
pub fn maskit_ratio(cfg: &Config) -> Result<f64> {
    let mut out: f64 = 0.0;
    for a in [1.0, 0.5, 0.25] {
        let (inst, _) = torus_instance(a)?;
        for t in make_scan(-1.0, 1.0, 0.1)? {
            let smp = sample(&inst, t.t(), cfg);
            for row in smp.rows.iter().filter(|r| r.is_clean()) {
                let q = row.hyp / row.ext;
                out = out.max(2.0 * (-0.5 * row.hyp).exp() / q).max(q / core::f64::consts::PI);
            }
        }
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Check {
    pub name: String,
    pub value: Option<f64>,
    pub cap: f64,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SuiteReport {
    pub spec: SuiteSpec,
    pub caps: Caps,
    pub checks: Vec<Check>,
    pub instances: Vec<InstanceChecks>,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }
}

/// Aggregate per-instance results. A check fails when its worst ratio is
/// above the cap or when flagged rows left it without data.
pub fn report(spec: SuiteSpec, caps: Caps, instances: Vec<InstanceChecks>, maskit: Option<f64>) -> SuiteReport {
    let flagged = instances.iter().any(|i| i.flagged_rows > 0);
    let fold = |f: &dyn Fn(&InstanceChecks) -> Option<f64>| {
        instances.iter().filter_map(f).fold(None, |acc: Option<f64>, x| Some(acc.map_or(x, |a| a.max(x))))
    };
    let k_max = |v: &[f64]| v.iter().copied().fold(None, |acc: Option<f64>, x| Some(acc.map_or(x, |a| a.max(x))));
    let mut checks = Vec::new();
    let mut push = |name: &str, value: Option<f64>, cap: f64, needs_all: bool| {
        let pass = value.is_none_or(|v| v <= cap) && !(needs_all && flagged);
        checks.push(Check { name: name.into(), value, cap, pass });
    };
    push("k_ext", fold(&|i| k_max(&i.k_ext)), caps.k, true);
    push("k_hyp", fold(&|i| k_max(&i.k_hyp)), caps.k, true);
    push("monotone_ext", fold(&|i| i.monotone_ext), caps.monotone, true);
    push("monotone_hyp", fold(&|i| i.monotone_hyp), caps.monotone, true);
    push("ext_length", fold(&|i| i.ext_length), caps.ext_length, true);
    push("subsurface", fold(&|i| i.subsurface), caps.subsurface, true);
    push("arcs_ext", fold(&|i| i.arcs_ext), caps.arcs, false);
    push("arcs_hyp", fold(&|i| i.arcs_hyp), caps.arcs, false);
    push("lower_ext", fold(&|i| i.lower_ext), caps.lower, false);
    push("lower_hyp", fold(&|i| i.lower_hyp), caps.lower, false);
    if let Some(m) = maskit {
        push("maskit", Some(m), caps.maskit, false);
    }
    SuiteReport { spec, caps, checks, instances }
}

/// The whole suite, sequentially.
pub fn property_suite(seed: u64, size: usize) -> Result<SuiteReport> {
    property_suite_with(SuiteSpec::new(seed, size), &Config::default())
}

pub fn property_suite_with(spec: SuiteSpec, cfg: &Config) -> Result<SuiteReport> {
    cfg.validate()?;
    if spec.size == 0 {
        return Err(Error::Invalid("ensemble size must be positive".into()));
    }
    let grid = spec.grid()?;
    let mut checks = Vec::new();
    for inst in ensemble(spec.seed, spec.size, spec.max_squares)? {
        let samples: Vec<Sample> = grid.iter().map(|&t| sample(&inst, t, cfg)).collect();
        checks.push(instance_checks(&inst, &samples)?);
    }
    Ok(report(spec, Caps::default(), checks, Some(maskit_ratio(cfg)?)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn decay_looks_forward_only() {
        let ts = [(0.0, 4.0), (1.0, 1.0), (2.0, 2.0)];
        assert_eq!(decay(&ts, &[true, false, false]), Some(4.0));
        assert_eq!(decay(&ts, &[false, true, false]), Some(0.5));
        assert_eq!(decay(&ts, &[false, false, true]), None);
    }
}
