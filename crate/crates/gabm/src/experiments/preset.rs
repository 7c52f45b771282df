//! Named experiment presets for the standard grid.
//!
//! `town100-*` runs the three feedback conditions in a 100-agent town at the
//! reference parameters (contact rate 5, infectivity 0.1, ten replications).
//! `town1000-*` scales to 1000 agents under full feedback at reproduction
//! numbers 3, 2.5, and 2 via (infectivity, contact rate) pairs.

use crate::error::Error;
use crate::world::{Condition, WorldConfig};

use super::config::{BackendConfig, ExperimentConfig};

pub const PRESET_NAMES: [&str; 6] = [
    "town100-base",
    "town100-selfhealth",
    "town100-full",
    "town1000-r2",
    "town1000-r2.5",
    "town1000-r3",
];

pub const DEFAULT_STEP_COUNT: u32 = 68;
pub const DEFAULT_BASE_SEED: u64 = 42;

/// An (infectivity, contact rate) pair labeled with the reproduction number
/// it implies over the six-day infectious period.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct R0Preset {
    pub infectivity: f64,
    pub contact_rate: u32,
    pub labeled_r0: f64,
}

impl R0Preset {
    pub fn implied_r0(&self) -> f64 {
        self.infectivity * f64::from(self.contact_rate) * 6.0
    }

    /// The implied value must sit within 2% of the label.
    pub fn validate(&self) -> Result<(), Error> {
        let implied = self.implied_r0();
        if (implied - self.labeled_r0).abs() > 0.02 * self.labeled_r0 {
            return Err(Error::config(format!(
                "R0 preset labeled {} implies {implied:.4}",
                self.labeled_r0
            )));
        }
        Ok(())
    }
}

pub const R0_3: R0Preset = R0Preset {
    infectivity: 0.1,
    contact_rate: 5,
    labeled_r0: 3.0,
};
pub const R0_2_5: R0Preset = R0Preset {
    infectivity: 0.0833,
    contact_rate: 5,
    labeled_r0: 2.5,
};
pub const R0_2: R0Preset = R0Preset {
    infectivity: 0.0833,
    contact_rate: 4,
    labeled_r0: 2.0,
};

fn town100(name: &str, condition: Condition) -> ExperimentConfig {
    ExperimentConfig {
        schema_version: super::config::EXPERIMENT_SCHEMA_VERSION,
        label: name.to_owned(),
        world: WorldConfig {
            initial_healthy: 99,
            initial_infected: 1,
            contact_rate: R0_3.contact_rate,
            infection_rate: R0_3.infectivity,
            step_count: DEFAULT_STEP_COUNT,
            condition,
            seed: DEFAULT_BASE_SEED,
            run_name: name.to_owned(),
        },
        replications: 10,
        base_seed: DEFAULT_BASE_SEED,
        backend: BackendConfig::default(),
    }
}

fn town1000(name: &str, r0: R0Preset) -> ExperimentConfig {
    ExperimentConfig {
        schema_version: super::config::EXPERIMENT_SCHEMA_VERSION,
        label: name.to_owned(),
        world: WorldConfig {
            initial_healthy: 990,
            initial_infected: 10,
            contact_rate: r0.contact_rate,
            infection_rate: r0.infectivity,
            step_count: DEFAULT_STEP_COUNT,
            condition: Condition::Full,
            seed: DEFAULT_BASE_SEED,
            run_name: name.to_owned(),
        },
        replications: 2,
        base_seed: DEFAULT_BASE_SEED,
        backend: BackendConfig::default(),
    }
}

/// Look up a preset by name.
pub fn preset(name: &str) -> Result<ExperimentConfig, Error> {
    let config = match name {
        "town100-base" => town100(name, Condition::Base),
        "town100-selfhealth" => town100(name, Condition::SelfHealth),
        "town100-full" => town100(name, Condition::Full),
        "town1000-r3" => town1000(name, R0_3),
        "town1000-r2.5" => town1000(name, R0_2_5),
        "town1000-r2" => town1000(name, R0_2),
        other => {
            return Err(Error::config(format!(
                "unknown preset '{other}'; valid presets: {}",
                PRESET_NAMES.join(", ")
            )))
        }
    };
    for r0 in [R0_3, R0_2_5, R0_2] {
        r0.validate()?;
    }
    Ok(config)
}
