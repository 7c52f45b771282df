//! Run configuration.

use serde::{Deserialize, Serialize};

use crate::error::Error;

/// Information-feedback regime for the decision phase.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Condition {
    /// No feedback: agents only know who they are and that work pays.
    Base,
    /// Agents additionally perceive their own symptoms.
    SelfHealth,
    /// Symptoms plus the town's new-case percentage from the newspaper.
    Full,
}

impl Condition {
    pub fn as_str(self) -> &'static str {
        match self {
            Condition::Base => "base",
            Condition::SelfHealth => "self_health",
            Condition::Full => "full",
        }
    }
}

/// Static parameters of one simulation run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WorldConfig {
    pub initial_healthy: u32,
    pub initial_infected: u32,
    /// Per-agent daily cap on unique two-way interactions.
    pub contact_rate: u32,
    /// Transmission probability per infectious contact, in [0, 1].
    pub infection_rate: f64,
    /// Maximum number of days to simulate.
    pub step_count: u32,
    pub condition: Condition,
    pub seed: u64,
    pub run_name: String,
}

impl WorldConfig {
    pub fn population(&self) -> u32 {
        self.initial_healthy + self.initial_infected
    }

    pub fn validate(&self) -> Result<(), Error> {
        if self.initial_healthy.checked_add(self.initial_infected).is_none() {
            return Err(Error::config(
                "initial_healthy + initial_infected overflows a u32",
            ));
        }
        if self.population() < 2 {
            return Err(Error::config(format!(
                "initial_healthy + initial_infected must be at least 2 (got {})",
                self.population()
            )));
        }
        if !(0.0..=1.0).contains(&self.infection_rate) {
            return Err(Error::config(format!(
                "infection_rate must lie in [0, 1] (got {})",
                self.infection_rate
            )));
        }
        Ok(())
    }
}

impl Default for WorldConfig {
    fn default() -> Self {
        WorldConfig {
            initial_healthy: 99,
            initial_infected: 1,
            contact_rate: 5,
            infection_rate: 0.1,
            step_count: 68,
            condition: Condition::Full,
            seed: 0,
            run_name: "run".to_owned(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tiny_population_is_rejected() {
        let config = WorldConfig {
            initial_healthy: 1,
            initial_infected: 0,
            ..WorldConfig::default()
        };
        let err = config.validate().unwrap_err().to_string();
        assert!(err.contains("at least 2"), "{err}");
    }

    #[test]
    fn infection_rate_bounds_are_enforced() {
        let config = WorldConfig {
            infection_rate: 1.5,
            ..WorldConfig::default()
        };
        assert!(config.validate().is_err());
        let ok = WorldConfig {
            infection_rate: 1.0,
            ..WorldConfig::default()
        };
        assert!(ok.validate().is_ok());
    }
}
