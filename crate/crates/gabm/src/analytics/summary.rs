//! Per-run summary measures and the stay-home-day distribution.

use serde::{Deserialize, Serialize};

use crate::world::{DayMetrics, DecisionRow, RunRecord};

/// Headline comparison measures for one run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SeriesSummary {
    /// Agents ever infected, initial seeds included.
    pub cumulative_cases: u32,
    /// Mean daily fraction of agents out on the grid.
    pub average_mobility: f64,
    /// Maximum daily new cases.
    pub largest_peak: u32,
    /// Last day with any infected agent; the horizon when censored.
    pub epidemic_duration: u32,
    /// True when the run still had infected agents at the horizon.
    pub duration_censored: bool,
}

/// Summarize a completed run.
pub fn summarize(record: &RunRecord) -> SeriesSummary {
    let population = record.final_world.population();
    let mut summary = summarize_metrics(&record.metrics, population);
    // the final world knows the exact cumulative count even for 0-day runs
    summary.cumulative_cases = record.final_world.cumulative_cases();
    summary
}

/// Summarize from the metrics series alone (for runs read back from disk).
pub fn summarize_metrics(metrics: &[DayMetrics], population: u32) -> SeriesSummary {
    let n = f64::from(population.max(1));
    let average_mobility = if metrics.is_empty() {
        0.0
    } else {
        metrics
            .iter()
            .map(|m| f64::from(m.mobility_count) / n)
            .sum::<f64>()
            / metrics.len() as f64
    };
    let largest_peak = metrics.iter().map(|m| m.new_cases).max().unwrap_or(0);
    let cumulative_cases = metrics
        .last()
        .map(|m| population - m.susceptible)
        .unwrap_or(0);
    let duration_censored = metrics.last().is_some_and(|m| m.infected > 0);
    let epidemic_duration = if duration_censored {
        metrics.len() as u32
    } else {
        metrics
            .iter()
            .rev()
            .find(|m| m.infected > 0)
            .map(|m| m.day)
            .unwrap_or(0)
    };
    SeriesSummary {
        cumulative_cases,
        average_mobility,
        largest_peak,
        epidemic_duration,
        duration_censored,
    }
}

/// Distribution of per-agent stay-home-day totals, pooled across runs.
/// Index `d` holds the number of agents that stayed home on exactly `d` days.
pub fn stay_home_distribution<'a, I>(runs: I) -> Vec<u32>
where
    I: IntoIterator<Item = &'a [DecisionRow]>,
{
    let mut per_agent_counts: Vec<u32> = Vec::new();
    for rows in runs {
        let max_id = rows.iter().map(|r| r.agent_id).max().map_or(0, |m| m + 1);
        let mut counts = vec![0u32; max_id as usize];
        for row in rows {
            if row.stay_home {
                counts[row.agent_id as usize] += 1;
            }
        }
        per_agent_counts.extend(counts);
    }
    let max_days = per_agent_counts.iter().copied().max().unwrap_or(0);
    let mut histogram = vec![0u32; (max_days + 1) as usize];
    for c in per_agent_counts {
        histogram[c as usize] += 1;
    }
    histogram
}
