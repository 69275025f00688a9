//! Fuzzy-UCS classifier systems whose conditions are four-parameter beta
//! distributions.
//!
//! Each rule condition is a product of per-attribute memberships. A beta set
//! with both shape parameters at 1 is an ordinary interval, so the learner
//! can move from fuzzy to crisp rules during training.

pub mod beta;
pub mod data;
pub mod engine;
pub mod error;
pub mod experiment;
pub mod metrics;
pub mod rule;
pub mod synth;

pub use beta::Beta4;
pub use data::Dataset;
pub use engine::{EngineConfig, Population, Representation};
pub use error::{Error, Result};
pub use experiment::{ExperimentConfig, ModelSnapshot};
pub use metrics::EvalReport;
pub use rule::{Condition, Rule, Triangle};
pub use synth::ProblemSpec;
