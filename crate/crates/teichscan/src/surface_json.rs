//! `teichscan-surface/1`: triangles as edge holonomies in local frames,
//! glued edge pairs `[[tri, edge], [tri, edge], sign]` with sign `-1` for a
//! translation and `+1` for a half-turn, and marked vertex ids.

use serde::{Deserialize, Serialize};
use teichscan_core::surface::FlatSurface;
use teichscan_core::PlanarVector;

use crate::error::{CliError, CliResult};

pub const SURFACE_SCHEMA: &str = "teichscan-surface/1";

type Pair = ((usize, usize), (usize, usize), i8);

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SurfaceDoc {
    pub schema: String,
    pub triangles: Vec<[PlanarVector; 3]>,
    pub gluings: Vec<Pair>,
    #[serde(default)]
    pub marked: Vec<usize>,
}

impl SurfaceDoc {
    pub fn of(s: &FlatSurface) -> Self {
        SurfaceDoc {
            schema: SURFACE_SCHEMA.into(),
            triangles: s.triangles().to_vec(),
            gluings: s.gluing_pairs(),
            marked: s.marked_vertices(),
        }
    }

    pub fn surface(&self) -> CliResult<FlatSurface> {
        if self.schema != SURFACE_SCHEMA {
            return Err(CliError::config(format!("unknown surface schema {:?}, expected {SURFACE_SCHEMA}", self.schema)));
        }
        Ok(FlatSurface::from_parts(self.triangles.clone(), &self.gluings, &self.marked)?)
    }
}

pub fn to_json(s: &FlatSurface) -> String {
    let mut out = serde_json::to_string_pretty(&SurfaceDoc::of(s)).expect("surface documents serialize");
    out.push('\n');
    out
}

pub fn from_json(text: &str) -> CliResult<FlatSurface> {
    let doc: SurfaceDoc = serde_json::from_str(text)?;
    doc.surface()
}
