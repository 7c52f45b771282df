//! The simulated citizen: persona + health + location + today's contacts.

use serde::{Deserialize, Serialize};

use super::health::HealthCondition;
use super::persona::Persona;

/// Where the agent spends the day. `Grid` means out in town (at work).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Location {
    Home,
    Grid,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Citizen {
    pub persona: Persona,
    pub health: HealthCondition,
    pub location: Location,
    /// Agent ids this citizen interacts with today. Symmetric: if b is in
    /// a's list then a is in b's. Cleared at the start of each day.
    pub agent_interaction: Vec<u32>,
}

impl Citizen {
    pub fn new(persona: Persona, health: HealthCondition) -> Self {
        Citizen {
            persona,
            health,
            location: Location::Home,
            agent_interaction: Vec::new(),
        }
    }

    pub fn id(&self) -> u32 {
        self.persona.agent_id
    }
}
