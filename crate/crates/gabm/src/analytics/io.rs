//! Readers for the engine's on-disk outputs.

use std::path::{Path, PathBuf};

use crate::error::Error;
use crate::world::{DayMetrics, DecisionRow};

pub fn read_metrics_csv(path: &Path) -> Result<Vec<DayMetrics>, Error> {
    let mut reader = csv::Reader::from_path(path)
        .map_err(|e| Error::analytics(format!("{}: {e}", path.display())))?;
    reader
        .deserialize()
        .collect::<Result<Vec<DayMetrics>, _>>()
        .map_err(|e| Error::analytics(format!("{}: {e}", path.display())))
}

pub fn read_decisions_csv(path: &Path) -> Result<Vec<DecisionRow>, Error> {
    let mut reader = csv::Reader::from_path(path)
        .map_err(|e| Error::analytics(format!("{}: {e}", path.display())))?;
    reader
        .deserialize()
        .collect::<Result<Vec<DecisionRow>, _>>()
        .map_err(|e| Error::analytics(format!("{}: {e}", path.display())))
}

/// Replication directories under an experiment output directory, ordered by
/// replication index.
pub fn list_replication_dirs(run_dir: &Path) -> Result<Vec<PathBuf>, Error> {
    let mut dirs: Vec<(u32, PathBuf)> = Vec::new();
    for entry in std::fs::read_dir(run_dir)? {
        let entry = entry?;
        let path = entry.path();
        if !path.is_dir() {
            continue;
        }
        if let Some(k) = entry
            .file_name()
            .to_str()
            .and_then(|n| n.strip_prefix("replication-"))
            .and_then(|k| k.parse::<u32>().ok())
        {
            dirs.push((k, path));
        }
    }
    if dirs.is_empty() {
        return Err(Error::analytics(format!(
            "{}: no replication-<k> directories found",
            run_dir.display()
        )));
    }
    dirs.sort_by_key(|(k, _)| *k);
    Ok(dirs.into_iter().map(|(_, p)| p).collect())
}
