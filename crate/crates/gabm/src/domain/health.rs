//! Disease state machine.
//!
//! Timeline: exposure marks an agent `ToBeInfected` during the day; the
//! end-of-day update promotes it to `Infected` and the day counter then runs
//! 1..=6. Days 1-2 are asymptomatic but infectious, days 3 and 6 show a light
//! cough, days 4-5 a fever and cough. After day 6 the agent recovers and is
//! immune.

use serde::{Deserialize, Serialize};

/// Last day of the infectious period.
pub const DISEASE_DURATION_DAYS: u8 = 6;

/// Flattened state tag, used for logging and CSV output.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HealthState {
    Susceptible,
    ToBeInfected,
    Infected,
    Recovered,
}

impl HealthState {
    pub fn as_str(self) -> &'static str {
        match self {
            HealthState::Susceptible => "susceptible",
            HealthState::ToBeInfected => "to_be_infected",
            HealthState::Infected => "infected",
            HealthState::Recovered => "recovered",
        }
    }
}

/// Health condition; the day counter exists only while infected.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "state", rename_all = "snake_case")]
pub enum HealthCondition {
    Susceptible,
    ToBeInfected,
    Infected { day_infected: u8 },
    Recovered,
}

impl HealthCondition {
    pub fn state(&self) -> HealthState {
        match self {
            HealthCondition::Susceptible => HealthState::Susceptible,
            HealthCondition::ToBeInfected => HealthState::ToBeInfected,
            HealthCondition::Infected { .. } => HealthState::Infected,
            HealthCondition::Recovered => HealthState::Recovered,
        }
    }

    pub fn day_infected(&self) -> Option<u8> {
        match self {
            HealthCondition::Infected { day_infected } => Some(*day_infected),
            _ => None,
        }
    }

    /// Infectious on every infected day; recovered agents never transmit.
    pub fn is_infectious(&self) -> bool {
        matches!(self, HealthCondition::Infected { .. })
    }

    pub fn is_susceptible(&self) -> bool {
        matches!(self, HealthCondition::Susceptible)
    }
}

/// Render the symptom sentence an agent perceives about itself.
///
/// Pure function of (state, day): repeated calls produce identical bytes.
pub fn health_string(health: &HealthCondition, name: &str) -> String {
    match health {
        HealthCondition::Infected { day_infected } => match day_infected {
            3 | 6 => format!("{name} has a light cough."),
            4 | 5 => format!("{name} has a fever and a cough."),
            _ => format!("{name} feels normal."),
        },
        _ => format!("{name} feels normal."),
    }
}

/// End-of-day promotion: same-day exposures become infections at day 0, so
/// the advance that follows starts them at day 1. All other states pass
/// through unchanged.
pub fn promote_exposures(health: HealthCondition) -> HealthCondition {
    match health {
        HealthCondition::ToBeInfected => HealthCondition::Infected { day_infected: 0 },
        other => other,
    }
}

/// End-of-day progression: infected agents age one day; past day 6 they
/// recover and the day counter is dropped.
pub fn advance_disease(health: HealthCondition) -> HealthCondition {
    match health {
        HealthCondition::Infected { day_infected } => {
            let next = day_infected + 1;
            if next > DISEASE_DURATION_DAYS {
                HealthCondition::Recovered
            } else {
                HealthCondition::Infected { day_infected: next }
            }
        }
        other => other,
    }
}
