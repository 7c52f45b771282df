//! Mutable world state and per-day record types.

use serde::{Deserialize, Serialize};

use crate::domain::{
    sample_persona, Citizen, Gender, HealthCondition, HealthState, NamePool, TraitFactor,
};
use crate::error::Error;
use crate::rng::{world_rng, SimRng};

use super::config::WorldConfig;

/// One row of the daily metrics series. `new_cases` is the day-4 tally: the
/// number of agents who reached their fourth infected day today, which is
/// also what the newspaper reports tomorrow.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct DayMetrics {
    pub day: u32,
    pub new_cases: u32,
    pub mobility_count: u32,
    pub infected: u32,
    pub susceptible: u32,
    pub recovered: u32,
    /// Sum of interaction-list lengths (each two-way contact counts twice).
    pub total_contacts: u32,
}

/// One row of the decision log: everything the stay-home regressions need.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecisionRow {
    pub day: u32,
    pub agent_id: u32,
    pub age: u32,
    pub gender: Gender,
    pub surgency: u8,
    pub agreeableness: u8,
    pub conscientiousness: u8,
    pub emotional_stability: u8,
    pub intellect: u8,
    pub health_state: HealthState,
    pub day_infected: Option<u8>,
    pub prevalence_pct: Option<f64>,
    pub stay_home: bool,
    pub reasoning: String,
}

/// Compartment counts at a point in time.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CompartmentCounts {
    pub susceptible: u32,
    pub to_be_infected: u32,
    pub infected: u32,
    pub recovered: u32,
}

impl CompartmentCounts {
    pub fn total(&self) -> u32 {
        self.susceptible + self.to_be_infected + self.infected + self.recovered
    }
}

/// The full, checkpoint-serializable simulation state.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WorldState {
    pub config: WorldConfig,
    /// Number of completed days; 0 right after initialization.
    pub day: u32,
    /// Indexed by agent id: `citizens[i].id() == i`.
    pub citizens: Vec<Citizen>,
    /// Yesterday's new-case count, fed to today's prompts. Starts equal to
    /// `initial_infected`.
    pub daily_new_cases: u32,
    /// Full per-day history, carried in checkpoints so a resumed run emits
    /// the identical series.
    pub metrics: Vec<DayMetrics>,
    /// The world's random stream (pairing, transmission, personas).
    pub rng: SimRng,
}

impl WorldState {
    /// Create day-0 state: the first `initial_infected` agents start at
    /// infected day 1, everyone else susceptible; personas are sampled from
    /// the bundled name pool.
    pub fn init(config: WorldConfig) -> Result<Self, Error> {
        let pool = NamePool::bundled();
        Self::init_with_names(config, &pool)
    }

    pub fn init_with_names(config: WorldConfig, pool: &NamePool) -> Result<Self, Error> {
        config.validate()?;
        let mut rng = world_rng(config.seed);
        let n = config.population();
        let citizens = (0..n)
            .map(|id| {
                let persona = sample_persona(&mut rng, id, pool);
                let health = if id < config.initial_infected {
                    HealthCondition::Infected { day_infected: 1 }
                } else {
                    HealthCondition::Susceptible
                };
                Citizen::new(persona, health)
            })
            .collect();
        Ok(WorldState {
            daily_new_cases: config.initial_infected,
            config,
            day: 0,
            citizens,
            metrics: Vec::new(),
            rng,
        })
    }

    pub fn population(&self) -> u32 {
        self.citizens.len() as u32
    }

    pub fn compartments(&self) -> CompartmentCounts {
        let mut c = CompartmentCounts {
            susceptible: 0,
            to_be_infected: 0,
            infected: 0,
            recovered: 0,
        };
        for citizen in &self.citizens {
            match citizen.health.state() {
                HealthState::Susceptible => c.susceptible += 1,
                HealthState::ToBeInfected => c.to_be_infected += 1,
                HealthState::Infected => c.infected += 1,
                HealthState::Recovered => c.recovered += 1,
            }
        }
        c
    }

    /// Agents who ever caught the virus (initial seeds included).
    pub fn cumulative_cases(&self) -> u32 {
        self.population() - self.compartments().susceptible
    }

    /// Per-day total contact counts.
    pub fn track_contact_rate(&self) -> Vec<u32> {
        self.metrics.iter().map(|m| m.total_contacts).collect()
    }

    /// Per-day counts of agents at infection day 4 (the new-case series).
    pub fn day_infected_is_4(&self) -> Vec<u32> {
        self.metrics.iter().map(|m| m.new_cases).collect()
    }

    /// Per-day new-case counts; identical to the day-4 tally by definition.
    pub fn list_new_cases(&self) -> Vec<u32> {
        self.day_infected_is_4()
    }

    /// Percentage of the population reported as yesterday's new cases,
    /// rounded to one decimal as the newspaper prints it.
    pub fn prevalence_pct(&self) -> f64 {
        let raw = 100.0 * f64::from(self.daily_new_cases) / f64::from(self.population());
        (raw * 10.0).round() / 10.0
    }

    pub(crate) fn row_for(&self, agent_id: u32, stay_home: bool, reasoning: String) -> DecisionRow {
        let citizen = &self.citizens[agent_id as usize];
        let persona = &citizen.persona;
        let flag = |f: TraitFactor| u8::from(persona.traits.positive_flag(f));
        DecisionRow {
            day: self.day + 1,
            agent_id,
            age: persona.age,
            gender: persona.gender,
            surgency: flag(TraitFactor::Surgency),
            agreeableness: flag(TraitFactor::Agreeableness),
            conscientiousness: flag(TraitFactor::Conscientiousness),
            emotional_stability: flag(TraitFactor::EmotionalStability),
            intellect: flag(TraitFactor::Intellect),
            health_state: citizen.health.state(),
            day_infected: citizen.health.day_infected(),
            prevalence_pct: match self.config.condition {
                super::config::Condition::Full => Some(self.prevalence_pct()),
                _ => None,
            },
            stay_home,
            reasoning,
        }
    }
}
