//! Half-translation surfaces and the thick-thin length estimates along
//! Teichmüller geodesics.
//!
//! Surfaces are triangulated, each triangle carrying its three edge
//! holonomies in a local frame; gluings between edges are translations or
//! half-turn flips. On top of that the crate builds closed geodesics, flat
//! cylinders, the thick-thin decomposition with annulus data, and the
//! comparability estimates for extremal and hyperbolic length.
//!
//! ```
//! use teichscan_core::surface::builders::flat_torus;
//! use teichscan_core::flow::flow_surface;
//!
//! let s = flat_torus(1.0, 1.0).unwrap();
//! let t = flow_surface(&s, core::f64::consts::LN_2).unwrap();
//! assert!((t.area() - 1.0).abs() < 1e-12);
//! ```
#![no_std]
#![allow(clippy::too_many_arguments, clippy::neg_cmp_op_on_partial_ord, clippy::type_complexity)]
#![cfg_attr(test, allow(unused_imports))]

extern crate alloc;

pub mod config;
pub mod curves;
pub mod decomposition;
pub mod error;
pub mod estimators;
pub mod experiments;
pub mod flow;
pub mod math;
#[cfg(feature = "serde")]
pub(crate) mod serde_nan;
pub mod surface;

pub use config::Config;
pub use error::{Error, Result};
pub use math::PlanarVector;
