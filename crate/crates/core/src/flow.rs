//! The Teichmüller flow in the fixed horizontal/vertical pair: horizontal
//! holonomy grows as `e^t`, vertical shrinks as `e^{-t}`.

use alloc::format;
use alloc::vec::Vec;
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::math::PlanarVector;
use crate::surface::FlatSurface;

/// A signed time along the geodesic.
#[derive(Clone, Copy, Debug, PartialEq, PartialOrd)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct FlowTime(f64);

impl FlowTime {
    pub fn new(t: f64) -> Result<Self> {
        if !t.is_finite() {
            return Err(Error::Range(format!("flow time {t} is not finite")));
        }
        Ok(FlowTime(t))
    }

    #[inline]
    pub fn t(self) -> f64 {
        self.0
    }
}

#[inline]
pub fn flow_vector(p: PlanarVector, t: f64) -> PlanarVector {
    if t == 0.0 {
        return p;
    }
    PlanarVector::new(p.h * t.exp(), p.v * (-t).exp())
}

/// The surface `q_t`. Gluings, signs and markings are unchanged.
pub fn flow_surface(s: &FlatSurface, t: f64) -> Result<FlatSurface> {
    if !t.is_finite() {
        return Err(Error::Range(format!("flow time {t} is not finite")));
    }
    if t == 0.0 {
        return Ok(s.clone());
    }
    let (a, b) = (t.exp(), (-t).exp());
    let out = s.map_holonomies(|p| PlanarVector::new(p.h * a, p.v * b))?;
    for e in out.triangles() {
        for x in e {
            if !x.is_finite() || x.norm() == 0.0 || !x.norm().is_normal() {
                return Err(Error::Range(format!("holonomies overflow at t = {t}")));
            }
        }
    }
    Ok(out)
}

/// `√(e^{2t}h² + e^{-2t}v²)`.
pub fn flowed_length(h: f64, v: f64, t: f64) -> f64 {
    (h * t.exp()).hypot(v * (-t).exp())
}

/// Inclusive arithmetic grid `t_min, t_min + step, …` up to `t_max`.
pub fn make_scan(t_min: f64, t_max: f64, step: f64) -> Result<Vec<FlowTime>> {
    if !(step > 0.0) || !step.is_finite() {
        return Err(Error::Invalid(format!("scan step must be positive, got {step}")));
    }
    if !(t_min <= t_max) || !t_min.is_finite() || !t_max.is_finite() {
        return Err(Error::Invalid(format!("scan needs t_min ≤ t_max, got {t_min} > {t_max}")));
    }
    let n = ((t_max - t_min) / step + 1e-9).floor() as usize;
    let mut out = Vec::with_capacity(n + 1);
    for i in 0..=n {
        out.push(FlowTime(t_min + i as f64 * step));
    }
    Ok(out)
}

/// Quarter turn `(h, v) ↦ (−v, h)`; conjugates the flow at `t` to the flow
/// at `−t`.
pub fn rotate_quarter(s: &FlatSurface) -> Result<FlatSurface> {
    s.map_holonomies(|p| PlanarVector::new(-p.v, p.h))
}
