//! The daily simulation loop.
//!
//! Day structure: every agent independently decides to stay home or go out
//! (reading only the end-of-previous-day snapshot), agents on the grid are
//! paired into a degree-capped symmetric contact graph, each
//! infectious/susceptible edge draws one transmission Bernoulli, then the
//! end-of-day update tallies day-4 cases, promotes exposures, advances the
//! disease, and records the day's metrics.
//!
//! Only the world's serialized random stream is consumed by pairing and
//! transmission; decisions use per-(day, agent) derived streams, so a backend
//! failure mid-phase leaves the world untouched and resumable.

use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::{Arc, Mutex};

use rand::seq::SliceRandom;
use rand::Rng;
use serde::Serialize;

use crate::decision::{DecisionBackend, DecisionContext, DecisionOutcome};
use crate::domain::{advance_disease, health_string, promote_exposures, Location};
use crate::error::BackendError;
use crate::rng::decision_rng;

use super::config::{Condition, WorldConfig};
use super::state::{DayMetrics, DecisionRow, WorldState};
use crate::error::Error;

/// One recorded infection event (who infected whom, on which day).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct TransmissionEvent {
    pub day: u32,
    pub infector: u32,
    pub infectee: u32,
}

/// Result of asking the engine to run one day.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DayOutcome {
    Completed(DayMetrics),
    /// Horizon reached or the early-stop rule already fired.
    Finished,
}

/// Everything produced by a completed (or aborted) run.
#[derive(Debug, Clone)]
pub struct RunRecord {
    pub config: WorldConfig,
    pub backend_name: String,
    pub metrics: Vec<DayMetrics>,
    pub decisions: Vec<DecisionRow>,
    pub transmissions: Vec<TransmissionEvent>,
    pub final_world: WorldState,
    pub early_stopped: bool,
}

/// A world bound to a decision backend.
pub struct Simulation {
    world: WorldState,
    backend: Arc<dyn DecisionBackend>,
    decisions: Vec<DecisionRow>,
    transmissions: Vec<TransmissionEvent>,
}

impl Simulation {
    pub fn new(config: WorldConfig, backend: Arc<dyn DecisionBackend>) -> Result<Self, Error> {
        Ok(Self::from_world(WorldState::init(config)?, backend))
    }

    /// Attach a backend to an existing (possibly checkpointed) world.
    pub fn from_world(world: WorldState, backend: Arc<dyn DecisionBackend>) -> Self {
        Simulation {
            world,
            backend,
            decisions: Vec::new(),
            transmissions: Vec::new(),
        }
    }

    pub fn world(&self) -> &WorldState {
        &self.world
    }

    pub fn decisions(&self) -> &[DecisionRow] {
        &self.decisions
    }

    pub fn transmissions(&self) -> &[TransmissionEvent] {
        &self.transmissions
    }

    pub fn backend_name(&self) -> &'static str {
        self.backend.name()
    }

    /// True once the horizon is reached or two consecutive recorded days had
    /// zero infected agents.
    pub fn finished(&self) -> bool {
        self.world.day >= self.world.config.step_count || self.early_stopped()
    }

    pub fn early_stopped(&self) -> bool {
        let m = &self.world.metrics;
        m.len() >= 2 && m[m.len() - 1].infected == 0 && m[m.len() - 2].infected == 0
    }

    /// Run one day. On backend failure the world is left exactly at the
    /// previous day boundary, so a checkpoint taken afterwards resumes
    /// cleanly.
    pub fn step_day(&mut self) -> Result<DayOutcome, BackendError> {
        if self.finished() {
            return Ok(DayOutcome::Finished);
        }
        let day = self.world.day + 1;

        let outcomes = self.decision_phase()?;
        let mut mobility_count = 0u32;
        for (id, outcome) in outcomes.iter().enumerate() {
            let row = self
                .world
                .row_for(id as u32, outcome.stay_home, outcome.reasoning.clone());
            self.decisions.push(row);
            let citizen = &mut self.world.citizens[id];
            citizen.location = if outcome.stay_home {
                Location::Home
            } else {
                Location::Grid
            };
            if citizen.location == Location::Grid {
                mobility_count += 1;
            }
        }

        let edges = build_interactions(&mut self.world);
        let total_contacts = (edges.len() * 2) as u32;
        let events = transmission_step(&mut self.world, &edges, day);
        self.transmissions.extend(events);

        let metrics = end_of_day(&mut self.world, mobility_count, total_contacts);
        Ok(DayOutcome::Completed(metrics))
    }

    /// Run to the horizon or early stop.
    pub fn run(&mut self) -> Result<(), BackendError> {
        while !self.finished() {
            self.step_day()?;
        }
        Ok(())
    }

    pub fn into_record(self) -> RunRecord {
        let early_stopped = self.early_stopped();
        RunRecord {
            config: self.world.config.clone(),
            backend_name: self.backend.name().to_owned(),
            metrics: self.world.metrics.clone(),
            decisions: self.decisions,
            transmissions: self.transmissions,
            final_world: self.world,
            early_stopped,
        }
    }

    /// Build every context from the end-of-previous-day snapshot and collect
    /// one outcome per citizen, dispatching concurrently when the backend
    /// allows it. Outcomes come back in agent-id order.
    fn decision_phase(&self) -> Result<Vec<DecisionOutcome>, BackendError> {
        let world = &self.world;
        let day = world.day + 1;
        let condition = world.config.condition;
        let prevalence = match condition {
            Condition::Full => Some(world.prevalence_pct()),
            _ => None,
        };
        let contexts: Vec<DecisionContext> = world
            .citizens
            .iter()
            .map(|citizen| DecisionContext {
                persona: citizen.persona.clone(),
                condition,
                health_sentence: match condition {
                    Condition::Base => None,
                    _ => Some(health_string(&citizen.health, &citizen.persona.name)),
                },
                prevalence_pct: prevalence,
                day,
            })
            .collect();

        let seed = world.config.seed;
        let workers = self.backend.max_concurrency().max(1).min(contexts.len().max(1));
        if workers <= 1 {
            contexts
                .iter()
                .enumerate()
                .map(|(id, ctx)| {
                    let mut rng = decision_rng(seed, day, id as u32);
                    self.backend.decide(ctx, &mut rng)
                })
                .collect()
        } else {
            let next = AtomicUsize::new(0);
            let slots: Vec<Mutex<Option<Result<DecisionOutcome, BackendError>>>> =
                contexts.iter().map(|_| Mutex::new(None)).collect();
            let backend = &self.backend;
            std::thread::scope(|scope| {
                for _ in 0..workers {
                    scope.spawn(|| loop {
                        let i = next.fetch_add(1, Ordering::Relaxed);
                        if i >= contexts.len() {
                            break;
                        }
                        let mut rng = decision_rng(seed, day, i as u32);
                        let result = backend.decide(&contexts[i], &mut rng);
                        *slots[i].lock().expect("slot poisoned") = Some(result);
                    });
                }
            });
            slots
                .into_iter()
                .map(|slot| {
                    slot.into_inner()
                        .expect("slot poisoned")
                        .expect("every context was dispatched")
                })
                .collect()
        }
    }
}

/// Pair agents on the grid into a symmetric contact graph with per-agent
/// degree cap `contact_rate`. Visits grid agents in seeded random order; each
/// draws partners uniformly from the grid agents that still have spare
/// capacity, excluding itself and existing partners. Returns the edge list.
pub fn build_interactions(world: &mut WorldState) -> Vec<(u32, u32)> {
    for citizen in &mut world.citizens {
        citizen.agent_interaction.clear();
    }
    let cap = world.config.contact_rate as usize;
    let grid: Vec<u32> = world
        .citizens
        .iter()
        .filter(|c| c.location == Location::Grid)
        .map(|c| c.id())
        .collect();
    if cap == 0 || grid.len() < 2 {
        return Vec::new();
    }

    let mut order = grid.clone();
    order.shuffle(&mut world.rng);

    // Pool of grid agents with remaining capacity, with O(1) removal.
    const ABSENT: usize = usize::MAX;
    let mut pool = grid;
    let mut pool_pos = vec![ABSENT; world.citizens.len()];
    for (i, &id) in pool.iter().enumerate() {
        pool_pos[id as usize] = i;
    }
    let remove = |pool: &mut Vec<u32>, pool_pos: &mut Vec<usize>, id: u32| {
        let i = pool_pos[id as usize];
        debug_assert_ne!(i, ABSENT);
        pool.swap_remove(i);
        pool_pos[id as usize] = ABSENT;
        if let Some(&moved) = pool.get(i) {
            pool_pos[moved as usize] = i;
        }
    };

    let mut edges = Vec::new();
    for &a in &order {
        if pool_pos[a as usize] == ABSENT {
            continue; // already saturated by earlier partners
        }
        while world.citizens[a as usize].agent_interaction.len() < cap {
            // rejection sampling over the capacity pool, with an exact
            // fallback when the pool is nearly exhausted
            let mut chosen = None;
            for _ in 0..16 {
                let b = pool[world.rng.gen_range(0..pool.len())];
                if b != a && !world.citizens[a as usize].agent_interaction.contains(&b) {
                    chosen = Some(b);
                    break;
                }
            }
            let b = match chosen {
                Some(b) => b,
                None => {
                    let eligible: Vec<u32> = pool
                        .iter()
                        .copied()
                        .filter(|&b| {
                            b != a && !world.citizens[a as usize].agent_interaction.contains(&b)
                        })
                        .collect();
                    if eligible.is_empty() {
                        break;
                    }
                    eligible[world.rng.gen_range(0..eligible.len())]
                }
            };

            world.citizens[a as usize].agent_interaction.push(b);
            world.citizens[b as usize].agent_interaction.push(a);
            edges.push((a, b));
            if world.citizens[b as usize].agent_interaction.len() >= cap {
                remove(&mut pool, &mut pool_pos, b);
            }
        }
        remove(&mut pool, &mut pool_pos, a);
    }
    edges
}

/// Resolve transmission along the day's edges: each edge joining an
/// infectious and a susceptible agent draws one Bernoulli with the
/// configured infection rate; successes mark the susceptible end
/// `ToBeInfected`. Returns the infection events.
pub fn transmission_step(
    world: &mut WorldState,
    edges: &[(u32, u32)],
    day: u32,
) -> Vec<TransmissionEvent> {
    let rate = world.config.infection_rate;
    let mut events = Vec::new();
    for &(a, b) in edges {
        let (infector, target) = {
            let ha = &world.citizens[a as usize].health;
            let hb = &world.citizens[b as usize].health;
            if ha.is_infectious() && hb.is_susceptible() {
                (a, b)
            } else if hb.is_infectious() && ha.is_susceptible() {
                (b, a)
            } else {
                continue;
            }
        };
        if world.rng.gen::<f64>() < rate {
            world.citizens[target as usize].health =
                crate::domain::HealthCondition::ToBeInfected;
            events.push(TransmissionEvent {
                day,
                infector,
                infectee: target,
            });
        }
    }
    events
}

/// End-of-day update, in order: tally agents at infected day 4, promote
/// same-day exposures, advance the disease clock, record the day's metrics,
/// publish the tally as tomorrow's newspaper figure, increment the day.
pub fn end_of_day(world: &mut WorldState, mobility_count: u32, total_contacts: u32) -> DayMetrics {
    let new_cases = world
        .citizens
        .iter()
        .filter(|c| c.health.day_infected() == Some(4))
        .count() as u32;

    for citizen in &mut world.citizens {
        citizen.health = advance_disease(promote_exposures(citizen.health));
    }

    let counts = world.compartments();
    assert_eq!(
        counts.total(),
        world.population(),
        "population conservation violated on day {}",
        world.day + 1
    );
    debug_assert_eq!(counts.to_be_infected, 0, "exposures must not survive the day");

    let metrics = DayMetrics {
        day: world.day + 1,
        new_cases,
        mobility_count,
        infected: counts.infected,
        susceptible: counts.susceptible,
        recovered: counts.recovered,
        total_contacts,
    };
    world.metrics.push(metrics);
    world.daily_new_cases = new_cases;
    world.day += 1;
    metrics
}
