//! Binding rates of patchy particles: closed-form asymptotics, kinetic Monte
//! Carlo capacitance solvers and a direct Brownian dynamics simulator.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bdsim;
pub mod error;
pub mod kmc3d;
pub mod kmc5d;
pub mod model;
pub mod rates;
pub mod rng;
pub mod special;
pub mod stats;
pub mod walk;

pub use error::{Error, Result};
pub use kmc5d::{estimate_chi, KmcConfig, KmcResult, StartRadius};
pub use model::{derive_constants, DerivedConstants, ModelParams, Point5};
pub use stats::EstimateWithCI;
pub use walk::TrialOutcome;
