//! The simulation world: configuration, daily loop, state, checkpoints.

mod checkpoint;
mod config;
mod engine;
mod state;

pub use checkpoint::{load_checkpoint, save_checkpoint, CHECKPOINT_SCHEMA_VERSION};
pub use config::{Condition, WorldConfig};
pub use engine::{
    build_interactions, end_of_day, transmission_step, DayOutcome, RunRecord, Simulation,
    TransmissionEvent,
};
pub use state::{CompartmentCounts, DayMetrics, DecisionRow, WorldState};
