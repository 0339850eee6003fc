//! `teichscan-curve/1`: either a closed chain of segments
//! `{"chain": [{"tri", "start": [barycentric], "vector": {"h", "v"}}, ...]}`
//! or a short cylinder `{"cylinder": id, "pos": p}` with `id` indexing the
//! short curves of the decomposition, plus an optional `weight`.

use serde::{Deserialize, Serialize};
use teichscan_core::curves::{CurveGeometry, FlatCurve, Segment, SegmentChain};
use teichscan_core::decomposition::find_short_curves_with;
use teichscan_core::surface::visibility::Budget;
use teichscan_core::surface::FlatSurface;
use teichscan_core::Config;

use crate::error::{CliError, CliResult};

pub const CURVE_SCHEMA: &str = "teichscan-curve/1";

fn one() -> f64 {
    1.0
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum CurveShape {
    Chain { chain: Vec<Segment> },
    Cylinder { cylinder: usize, pos: f64 },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CurveDoc {
    pub schema: String,
    #[serde(flatten)]
    pub shape: CurveShape,
    #[serde(default = "one")]
    pub weight: f64,
}

impl CurveDoc {
    pub fn chain(segments: Vec<Segment>, weight: f64) -> Self {
        CurveDoc { schema: CURVE_SCHEMA.into(), shape: CurveShape::Chain { chain: segments }, weight }
    }

    pub fn cylinder(id: usize, pos: f64, weight: f64) -> Self {
        CurveDoc { schema: CURVE_SCHEMA.into(), shape: CurveShape::Cylinder { cylinder: id, pos }, weight }
    }

    /// Chains only; cores have no stable id outside a decomposition.
    pub fn of(c: &FlatCurve) -> Option<Self> {
        match &c.geometry {
            CurveGeometry::Chain(ch) => Some(CurveDoc::chain(ch.segments.clone(), c.weight)),
            CurveGeometry::Core(_) => None,
        }
    }

    /// The curve on `s`. Cylinder ids are resolved against the
    /// decomposition of `s` with `cfg`.
    pub fn curve(&self, s: &FlatSurface, cfg: &Config) -> CliResult<FlatCurve> {
        if self.schema != CURVE_SCHEMA {
            return Err(CliError::config(format!("unknown curve schema {:?}, expected {CURVE_SCHEMA}", self.schema)));
        }
        let c = match &self.shape {
            CurveShape::Chain { chain } => {
                if chain.iter().any(|x| x.tri >= s.num_triangles()) {
                    return Err(CliError::validation("curve segment refers to a missing triangle"));
                }
                FlatCurve::chain(SegmentChain::closed(chain.clone()), self.weight)
            }
            CurveShape::Cylinder { cylinder, pos } => {
                let mut budget = Budget::new(cfg.develop_budget);
                let tt = find_short_curves_with(s, cfg, &mut budget)?;
                let a = tt.shorts.get(*cylinder).ok_or_else(|| {
                    CliError::validation(format!("no short curve {cylinder}; the surface has {}", tt.shorts.len()))
                })?;
                FlatCurve::core(a.cylinder.clone(), *pos, self.weight)
            }
        };
        c.validate()?;
        Ok(c)
    }
}

pub fn to_json(doc: &CurveDoc) -> String {
    let mut out = serde_json::to_string_pretty(doc).expect("curve documents serialize");
    out.push('\n');
    out
}

/// Parse a curve document, rejecting any schema other than [`CURVE_SCHEMA`].
pub fn from_json(text: &str) -> CliResult<CurveDoc> {
    let doc: CurveDoc = serde_json::from_str(text)?;
    if doc.schema != CURVE_SCHEMA {
        return Err(CliError::config(format!("unknown curve schema {:?}, expected {CURVE_SCHEMA}", doc.schema)));
    }
    Ok(doc)
}
