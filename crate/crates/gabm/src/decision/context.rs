//! What a decision backend sees for one agent on one day, and what it returns.

use serde::{Deserialize, Serialize};

use crate::domain::Persona;
use crate::world::Condition;

/// Immutable per-agent view of the world at the end of the previous day.
#[derive(Debug, Clone, PartialEq)]
pub struct DecisionContext {
    pub persona: Persona,
    pub condition: Condition,
    /// Self-perceived symptom sentence; absent in the `Base` condition.
    pub health_sentence: Option<String>,
    /// Yesterday's new-case percentage, already rounded to one decimal;
    /// present only in the `Full` condition.
    pub prevalence_pct: Option<f64>,
    pub day: u32,
}

impl DecisionContext {
    /// Checks the condition/field coupling invariants.
    pub fn is_well_formed(&self) -> bool {
        let health_ok = (self.condition == Condition::Base) == self.health_sentence.is_none();
        let prevalence_ok = (self.condition == Condition::Full) == self.prevalence_pct.is_some();
        health_ok && prevalence_ok
    }
}

/// Parsed verdict for one agent-day.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecisionOutcome {
    pub stay_home: bool,
    pub reasoning: String,
    pub raw_response: String,
    /// False when the reply did not contain an explicit yes/no verdict; such
    /// replies always default to going out (`stay_home = false`).
    pub conforming: bool,
}

impl DecisionOutcome {
    pub fn conforming(stay_home: bool, reasoning: String, raw_response: String) -> Self {
        DecisionOutcome {
            stay_home,
            reasoning,
            raw_response,
            conforming: true,
        }
    }

    /// The default-No outcome for replies without a usable verdict.
    pub fn nonconforming(reasoning: String, raw_response: String) -> Self {
        DecisionOutcome {
            stay_home: false,
            reasoning,
            raw_response,
            conforming: false,
        }
    }
}
