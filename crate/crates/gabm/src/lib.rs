//! Generative agent-based epidemic simulator.
//!
//! Every day each citizen decides whether to stay home, using a pluggable
//! decision backend: a remote chat-completions model fed a persona prompt, a
//! scripted logistic oracle, or a constant policy. Citizens who go out are
//! paired into a degree-capped contact graph where an airborne virus spreads
//! with fixed per-contact infectivity over a six-day disease course.
//! Experiments replicate runs across seeds; the analytics layer produces the
//! epidemic curves, aggregation bands, prevalence-mobility fits, and
//! stay-home regressions used to study the behavioral feedback loop.

pub mod analytics;
pub mod cli;
pub mod decision;
pub mod domain;
pub mod error;
pub mod experiments;
pub mod rng;
pub mod world;

pub use error::{BackendError, CheckpointError, Error};
