//! Core domain types: personas, the disease state machine, citizens.

mod citizen;
mod health;
mod names;
mod persona;

pub use citizen::{Citizen, Location};
pub use health::{advance_disease, health_string, promote_exposures, HealthCondition, HealthState};
pub use names::NamePool;
pub use persona::{
    sample_persona, sample_persona_with, Gender, Persona, Polarity, TraitFactor, TraitProfile,
    TraitSelection, TraitVocabulary, AGE_MAX, AGE_MIN,
};
