//! Checkpoint files: versioned JSON snapshots of the entire world, random
//! stream included, so a resumed run continues the exact trajectory.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::CheckpointError;

use super::state::WorldState;

pub const CHECKPOINT_SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Serialize, Deserialize)]
struct CheckpointDoc {
    schema_version: u32,
    world: WorldState,
}

/// Write the world to `path` atomically (temp file + rename).
pub fn save_checkpoint(world: &WorldState, path: &Path) -> Result<(), CheckpointError> {
    let doc = CheckpointDoc {
        schema_version: CHECKPOINT_SCHEMA_VERSION,
        world: world.clone(),
    };
    let body = serde_json::to_vec_pretty(&doc).map_err(|e| CheckpointError::Corrupt {
        path: path.to_owned(),
        detail: format!("serialize: {e}"),
    })?;
    let tmp = path.with_extension("tmp");
    fs::write(&tmp, body)
        .and_then(|()| fs::rename(&tmp, path))
        .map_err(|source| CheckpointError::Write {
            path: path.to_owned(),
            source,
        })
}

/// Load a checkpoint. Corrupt or truncated files fail with the offending
/// field named; a schema-version mismatch is reported as a migration error.
pub fn load_checkpoint(path: &Path) -> Result<WorldState, CheckpointError> {
    let bytes = fs::read(path).map_err(|source| CheckpointError::Read {
        path: path.to_owned(),
        source,
    })?;
    let value: serde_json::Value =
        serde_json::from_slice(&bytes).map_err(|e| CheckpointError::Corrupt {
            path: path.to_owned(),
            detail: e.to_string(),
        })?;
    let version = value
        .get("schema_version")
        .and_then(|v| v.as_u64())
        .ok_or_else(|| CheckpointError::Corrupt {
            path: path.to_owned(),
            detail: "missing field `schema_version`".to_owned(),
        })?;
    if version != u64::from(CHECKPOINT_SCHEMA_VERSION) {
        return Err(CheckpointError::VersionMismatch {
            path: path.to_owned(),
            found: version as u32,
            expected: CHECKPOINT_SCHEMA_VERSION,
        });
    }
    let doc: CheckpointDoc =
        serde_json::from_value(value).map_err(|e| CheckpointError::Corrupt {
            path: path.to_owned(),
            detail: e.to_string(),
        })?;
    Ok(doc.world)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::decision::AlwaysOut;
    use crate::world::{Condition, Simulation, WorldConfig};
    use std::sync::Arc;

    fn sample_world(days: u32) -> WorldState {
        let config = WorldConfig {
            initial_healthy: 19,
            initial_infected: 1,
            step_count: days,
            seed: 31,
            condition: Condition::Full,
            run_name: "ckpt".into(),
            ..WorldConfig::default()
        };
        let mut sim = Simulation::new(config, Arc::new(AlwaysOut)).unwrap();
        sim.run().unwrap();
        sim.world().clone()
    }

    #[test]
    fn round_trip_is_field_for_field_identical() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("world.ckpt.json");
        let world = sample_world(4);
        save_checkpoint(&world, &path).unwrap();
        let back = load_checkpoint(&path).unwrap();
        assert_eq!(world, back);
    }

    #[test]
    fn truncated_file_errors_without_partial_state() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("world.ckpt.json");
        let world = sample_world(3);
        save_checkpoint(&world, &path).unwrap();
        let bytes = std::fs::read(&path).unwrap();
        std::fs::write(&path, &bytes[..bytes.len() / 2]).unwrap();
        let err = load_checkpoint(&path).unwrap_err();
        assert!(matches!(err, CheckpointError::Corrupt { .. }), "{err}");
    }

    #[test]
    fn missing_field_is_named_in_the_error() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("world.ckpt.json");
        std::fs::write(
            &path,
            br#"{"schema_version": 1, "world": {"day": 0, "citizens": []}}"#,
        )
        .unwrap();
        let err = load_checkpoint(&path).unwrap_err().to_string();
        assert!(err.contains("config"), "error should name the field: {err}");
    }

    #[test]
    fn future_schema_versions_are_a_migration_error() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("world.ckpt.json");
        std::fs::write(&path, br#"{"schema_version": 99, "world": {}}"#).unwrap();
        let err = load_checkpoint(&path).unwrap_err();
        assert!(matches!(
            err,
            CheckpointError::VersionMismatch { found: 99, .. }
        ));
    }
}
