//! Replication runner: executes an experiment across seeds and persists the
//! output tree `<out>/<label>/replication-<k>/{day_metrics.csv, decisions.csv,
//! checkpoint.json, summary.json}`.

use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Mutex;

use serde::{Deserialize, Serialize};

use crate::analytics::{summarize, SeriesSummary};
use crate::error::Error;
use crate::world::{save_checkpoint, DayMetrics, DecisionRow, RunRecord, Simulation};

use super::config::ExperimentConfig;

pub const METRICS_FILE: &str = "day_metrics.csv";
pub const DECISIONS_FILE: &str = "decisions.csv";
pub const CHECKPOINT_FILE: &str = "checkpoint.json";
pub const SUMMARY_FILE: &str = "summary.json";

/// Per-replication summary document written alongside the CSVs.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ReplicationSummary {
    pub schema_version: u32,
    pub label: String,
    pub replication: u32,
    pub seed: u64,
    pub backend: String,
    pub status: String,
    pub population: u32,
    pub days_run: u32,
    pub early_stopped: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub summary: Option<SeriesSummary>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    pub checkpoint: String,
}

/// What happened to one replication.
#[derive(Debug, Clone, PartialEq)]
pub enum RunStatus {
    Completed,
    /// The backend aborted; the checkpoint resumes from the last whole day.
    Failed { error: String },
    /// Outputs already existed and `force` was off.
    Skipped,
}

#[derive(Debug, Clone)]
pub struct ReplicationReport {
    pub replication: u32,
    pub seed: u64,
    pub dir: PathBuf,
    pub status: RunStatus,
    pub summary: Option<SeriesSummary>,
}

/// Per-day progress callback: (replication, metrics of the completed day).
pub type ProgressFn<'a> = &'a (dyn Fn(u32, &DayMetrics) + Sync);

/// Run every replication of an experiment. Failed replications are recorded
/// (checkpoint + failed summary) and the rest continue. Deterministic
/// backends run replications in parallel; records do not depend on the
/// execution order because each replication has its own seeded streams.
pub fn run_replications(
    config: &ExperimentConfig,
    out_root: &Path,
    force: bool,
    progress: Option<ProgressFn<'_>>,
) -> Result<Vec<ReplicationReport>, Error> {
    config.validate()?;
    let backend = config.backend.build()?;
    let label_dir = out_root.join(&config.label);
    fs::create_dir_all(&label_dir)?;

    let reports: Mutex<Vec<ReplicationReport>> = Mutex::new(Vec::new());
    let run_one = |k: u32| -> Result<(), Error> {
        let dir = label_dir.join(format!("replication-{k}"));
        let seed = config.seed_for(k);
        if dir.join(SUMMARY_FILE).exists() && !force {
            reports.lock().expect("reports poisoned").push(ReplicationReport {
                replication: k,
                seed,
                dir,
                status: RunStatus::Skipped,
                summary: None,
            });
            return Ok(());
        }
        fs::create_dir_all(&dir)?;
        let mut sim = Simulation::new(config.world_for(k), backend.clone())?;
        let outcome = loop {
            match sim.step_day() {
                Ok(crate::world::DayOutcome::Completed(metrics)) => {
                    if let Some(cb) = progress {
                        cb(k, &metrics);
                    }
                }
                Ok(crate::world::DayOutcome::Finished) => break Ok(()),
                Err(e) => break Err(e),
            }
        };
        match outcome {
            Ok(()) => {
                let record = sim.into_record();
                let summary = write_record(&dir, config, k, &record)?;
                reports.lock().expect("reports poisoned").push(ReplicationReport {
                    replication: k,
                    seed,
                    dir,
                    status: RunStatus::Completed,
                    summary: Some(summary),
                });
            }
            Err(backend_error) => {
                // resumable: the world sits at the last completed day
                let error = backend_error.to_string();
                let checkpoint_path = dir.join(CHECKPOINT_FILE);
                save_checkpoint(sim.world(), &checkpoint_path)?;
                write_metrics_csv(&dir.join(METRICS_FILE), &sim.world().metrics)?;
                write_decisions_csv(&dir.join(DECISIONS_FILE), sim.decisions())?;
                let doc = ReplicationSummary {
                    schema_version: super::config::EXPERIMENT_SCHEMA_VERSION,
                    label: config.label.clone(),
                    replication: k,
                    seed,
                    backend: sim.backend_name().to_owned(),
                    status: "failed".to_owned(),
                    population: sim.world().population(),
                    days_run: sim.world().day,
                    early_stopped: false,
                    summary: None,
                    error: Some(error.clone()),
                    checkpoint: CHECKPOINT_FILE.to_owned(),
                };
                write_summary_json(&dir.join(SUMMARY_FILE), &doc)?;
                reports.lock().expect("reports poisoned").push(ReplicationReport {
                    replication: k,
                    seed,
                    dir,
                    status: RunStatus::Failed { error },
                    summary: None,
                });
            }
        }
        Ok(())
    };

    if backend.deterministic() && config.replications > 1 {
        let errors: Mutex<Vec<Error>> = Mutex::new(Vec::new());
        std::thread::scope(|scope| {
            for k in 0..config.replications {
                let errors = &errors;
                let run_one = &run_one;
                scope.spawn(move || {
                    if let Err(e) = run_one(k) {
                        errors.lock().expect("errors poisoned").push(e);
                    }
                });
            }
        });
        if let Some(e) = errors.into_inner().expect("errors poisoned").pop() {
            return Err(e);
        }
    } else {
        for k in 0..config.replications {
            run_one(k)?;
        }
    }

    let mut reports = reports.into_inner().expect("reports poisoned");
    reports.sort_by_key(|r| r.replication);
    Ok(reports)
}

/// Persist one completed run; returns its summary.
pub fn write_record(
    dir: &Path,
    config: &ExperimentConfig,
    replication: u32,
    record: &RunRecord,
) -> Result<SeriesSummary, Error> {
    write_metrics_csv(&dir.join(METRICS_FILE), &record.metrics)?;
    write_decisions_csv(&dir.join(DECISIONS_FILE), &record.decisions)?;
    save_checkpoint(&record.final_world, &dir.join(CHECKPOINT_FILE))?;
    let summary = summarize(record);
    let doc = ReplicationSummary {
        schema_version: super::config::EXPERIMENT_SCHEMA_VERSION,
        label: config.label.clone(),
        replication,
        seed: record.config.seed,
        backend: record.backend_name.clone(),
        status: "completed".to_owned(),
        population: record.final_world.population(),
        days_run: record.final_world.day,
        early_stopped: record.early_stopped,
        summary: Some(summary),
        error: None,
        checkpoint: CHECKPOINT_FILE.to_owned(),
    };
    write_summary_json(&dir.join(SUMMARY_FILE), &doc)?;
    Ok(summary)
}

pub fn write_metrics_csv(path: &Path, metrics: &[DayMetrics]) -> Result<(), Error> {
    let mut writer = csv::Writer::from_path(path)
        .map_err(|e| Error::analytics(format!("{}: {e}", path.display())))?;
    for m in metrics {
        writer
            .serialize(m)
            .map_err(|e| Error::analytics(format!("{}: {e}", path.display())))?;
    }
    writer
        .flush()
        .map_err(|e| Error::analytics(format!("{}: {e}", path.display())))?;
    Ok(())
}

pub fn write_decisions_csv(path: &Path, rows: &[DecisionRow]) -> Result<(), Error> {
    let mut writer = csv::Writer::from_path(path)
        .map_err(|e| Error::analytics(format!("{}: {e}", path.display())))?;
    for row in rows {
        writer
            .serialize(row)
            .map_err(|e| Error::analytics(format!("{}: {e}", path.display())))?;
    }
    writer
        .flush()
        .map_err(|e| Error::analytics(format!("{}: {e}", path.display())))?;
    Ok(())
}

/// Append decision rows to an existing log (or create it with a header);
/// used when resuming a checkpointed run.
pub fn append_decisions_csv(path: &Path, rows: &[DecisionRow]) -> Result<(), Error> {
    if !path.exists() {
        return write_decisions_csv(path, rows);
    }
    let file = fs::OpenOptions::new().append(true).open(path)?;
    let mut writer = csv::WriterBuilder::new()
        .has_headers(false)
        .from_writer(file);
    for row in rows {
        writer
            .serialize(row)
            .map_err(|e| Error::analytics(format!("{}: {e}", path.display())))?;
    }
    writer
        .flush()
        .map_err(|e| Error::analytics(format!("{}: {e}", path.display())))?;
    Ok(())
}

pub fn write_summary_json(path: &Path, doc: &ReplicationSummary) -> Result<(), Error> {
    let body = serde_json::to_vec_pretty(doc)
        .map_err(|e| Error::analytics(format!("serialize summary: {e}")))?;
    fs::write(path, body)?;
    Ok(())
}

pub fn read_summary_json(path: &Path) -> Result<ReplicationSummary, Error> {
    let bytes = fs::read(path)?;
    serde_json::from_slice(&bytes)
        .map_err(|e| Error::analytics(format!("{}: {e}", path.display())))
}
