//! Secret-key rates of a single sequential quantum repeater.
//!
//! The analytic path runs `channel_loss -> noise -> skf -> yield_model` and
//! is composed in [`optimizer`]; [`simulator`] executes the protocol itself
//! and serves as the oracle for the yield bounds; [`benchmarks`] holds the
//! repeater-less rates a repeater has to beat.

pub mod benchmarks;
pub mod channel_loss;
pub mod cutoff;
pub mod error;
pub mod noise;
pub mod optimizer;
pub mod params;
pub mod simulator;
pub mod skf;
pub mod yield_model;

pub use cutoff::Cutoff;
pub use error::{ModelError, Result};
pub use params::{default_expected_params, ExperimentParams, ProtocolKind};
