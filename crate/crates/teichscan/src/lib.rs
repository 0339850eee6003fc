//! File formats, parallel drivers and the command-line front end for
//! `teichscan-core`.
//!
//! Interchange is JSON. Every document carries a `schema` string such as
//! `teichscan-surface/1`, and readers reject versions they do not know.
//! Scans can also be written as CSV (with a leading `# schema` comment) and
//! plotted to a self-contained SVG.

pub mod atomic;
pub mod cli;
pub mod csv;
pub mod curve_json;
pub mod error;
pub mod parallel;
pub mod report;
pub mod surface_json;
pub mod svg;

pub use error::{CliError, ExitCode};
