//! End-to-end engine behavior: resume equality, replication determinism,
//! and abort-with-checkpoint semantics.

mod common;

use std::sync::Arc;

use common::{Script, StubServer};
use gabm::decision::{BackendKind, LlmConfig, OracleBackend, OraclePolicy};
use gabm::experiments::{
    run_replications, ExperimentConfig, RunStatus, CHECKPOINT_FILE, DECISIONS_FILE, METRICS_FILE,
    SUMMARY_FILE,
};
use gabm::world::{load_checkpoint, save_checkpoint, Condition, Simulation, WorldConfig};

fn small_world(seed: u64, steps: u32) -> WorldConfig {
    WorldConfig {
        initial_healthy: 49,
        initial_infected: 1,
        contact_rate: 5,
        infection_rate: 0.1,
        step_count: steps,
        condition: Condition::Full,
        seed,
        run_name: "integration".to_owned(),
    }
}

fn oracle() -> Arc<OracleBackend> {
    Arc::new(OracleBackend::new(OraclePolicy::default()).unwrap())
}

// Trajectory-equality oracle: running 12 days straight equals running 5,
// checkpointing, and resuming for the rest.
#[test]
fn resume_matches_straight_through_run() {
    let dir = tempfile::tempdir().unwrap();
    let ckpt = dir.path().join("mid.ckpt.json");

    let mut straight = Simulation::new(small_world(99, 12), oracle()).unwrap();
    straight.run().unwrap();

    let mut first_leg = Simulation::new(small_world(99, 5), oracle()).unwrap();
    first_leg.run().unwrap();
    save_checkpoint(first_leg.world(), &ckpt).unwrap();

    let mut world = load_checkpoint(&ckpt).unwrap();
    world.config.step_count = 12;
    let mut resumed = Simulation::from_world(world, oracle());
    resumed.run().unwrap();

    assert_eq!(straight.world(), resumed.world(), "world state diverged");
    assert_eq!(straight.world().metrics, resumed.world().metrics);

    // the resumed leg's decision log equals the straight run's tail
    let tail: Vec<_> = straight
        .decisions()
        .iter()
        .filter(|r| r.day > 5)
        .cloned()
        .collect();
    assert_eq!(tail, resumed.decisions().to_vec());
}

#[test]
fn reruns_are_byte_identical() {
    let config = ExperimentConfig {
        schema_version: gabm::experiments::EXPERIMENT_SCHEMA_VERSION,
        label: "determinism".to_owned(),
        world: small_world(7, 10),
        replications: 3,
        base_seed: 7,
        backend: gabm::experiments::BackendConfig {
            kind: BackendKind::Oracle,
            oracle: None,
            llm: None,
        },
    };
    let root_a = tempfile::tempdir().unwrap();
    let root_b = tempfile::tempdir().unwrap();
    run_replications(&config, root_a.path(), false, None).unwrap();
    run_replications(&config, root_b.path(), false, None).unwrap();

    for k in 0..3 {
        for file in [METRICS_FILE, DECISIONS_FILE] {
            let a = std::fs::read(
                root_a
                    .path()
                    .join("determinism")
                    .join(format!("replication-{k}"))
                    .join(file),
            )
            .unwrap();
            let b = std::fs::read(
                root_b
                    .path()
                    .join("determinism")
                    .join(format!("replication-{k}"))
                    .join(file),
            )
            .unwrap();
            assert_eq!(a, b, "replication {k}: {file} differs between reruns");
        }
    }
}

#[test]
fn replications_write_complete_output_trees_and_skip_unless_forced() {
    let config = ExperimentConfig {
        schema_version: gabm::experiments::EXPERIMENT_SCHEMA_VERSION,
        label: "tree".to_owned(),
        world: small_world(3, 8),
        replications: 3,
        base_seed: 100,
        backend: gabm::experiments::BackendConfig {
            kind: BackendKind::Oracle,
            oracle: None,
            llm: None,
        },
    };
    let root = tempfile::tempdir().unwrap();
    let reports = run_replications(&config, root.path(), false, None).unwrap();
    assert_eq!(reports.len(), 3);
    for (k, report) in reports.iter().enumerate() {
        assert_eq!(report.replication, k as u32);
        assert_eq!(report.seed, 100 + k as u64);
        assert_eq!(report.status, RunStatus::Completed);
        for file in [METRICS_FILE, DECISIONS_FILE, CHECKPOINT_FILE, SUMMARY_FILE] {
            assert!(report.dir.join(file).exists(), "missing {file}");
        }
    }

    // different seeds must give different trajectories
    let m0 = std::fs::read(reports[0].dir.join(DECISIONS_FILE)).unwrap();
    let m1 = std::fs::read(reports[1].dir.join(DECISIONS_FILE)).unwrap();
    assert_ne!(m0, m1, "distinct seeds produced identical decision logs");

    // second invocation without --force skips everything
    let again = run_replications(&config, root.path(), false, None).unwrap();
    assert!(again.iter().all(|r| r.status == RunStatus::Skipped));
    // with force, work is redone
    let forced = run_replications(&config, root.path(), true, None).unwrap();
    assert!(forced.iter().all(|r| r.status == RunStatus::Completed));
}

#[test]
fn backend_abort_leaves_resumable_checkpoints_and_continues() {
    // an endpoint that always fails -> every replication aborts on day 1
    let server = StubServer::start(vec![Script::Status(500, None)]);
    std::env::set_var("GABM_TEST_KEY_ABORT", "k");
    let config = ExperimentConfig {
        schema_version: gabm::experiments::EXPERIMENT_SCHEMA_VERSION,
        label: "abort".to_owned(),
        world: small_world(5, 6),
        replications: 2,
        base_seed: 11,
        backend: gabm::experiments::BackendConfig {
            kind: BackendKind::Llm,
            oracle: None,
            llm: Some(LlmConfig {
                base_url: server.base_url.clone(),
                api_key_env: "GABM_TEST_KEY_ABORT".to_owned(),
                max_attempts: 1,
                initial_backoff_ms: 1,
                timeout_secs: 5,
                ..LlmConfig::default()
            }),
        },
    };
    let root = tempfile::tempdir().unwrap();
    let reports = run_replications(&config, root.path(), false, None).unwrap();
    assert_eq!(reports.len(), 2, "failed replications must not stop the rest");
    for report in &reports {
        assert!(matches!(report.status, RunStatus::Failed { .. }));
        let world = load_checkpoint(&report.dir.join(CHECKPOINT_FILE)).unwrap();
        assert_eq!(world.day, 0, "abort must leave the previous day boundary");
        let summary: serde_json::Value =
            serde_json::from_slice(&std::fs::read(report.dir.join(SUMMARY_FILE)).unwrap())
                .unwrap();
        assert_eq!(summary["status"], "failed");
        assert!(summary["error"].as_str().unwrap().contains("500"));
    }
}

// Backend failure mid-run must not consume world randomness: a run that
// aborts on day N and resumes reproduces the uninterrupted trajectory.
#[test]
fn abort_then_resume_with_working_backend_is_clean() {
    let mut reference = Simulation::new(small_world(21, 8), oracle()).unwrap();
    reference.run().unwrap();

    let server = StubServer::start(vec![Script::Status(500, None)]);
    std::env::set_var("GABM_TEST_KEY_CLEAN", "k");
    let flaky = LlmConfig {
        base_url: server.base_url.clone(),
        api_key_env: "GABM_TEST_KEY_CLEAN".to_owned(),
        max_attempts: 1,
        initial_backoff_ms: 1,
        timeout_secs: 5,
        ..LlmConfig::default()
    };
    let llm = BackendKind::Llm.build(None, Some(flaky)).unwrap();
    let mut sim = Simulation::new(small_world(21, 8), llm).unwrap();
    assert!(sim.step_day().is_err());
    assert_eq!(sim.world().day, 0);

    // hand the frozen world to the oracle and finish the run
    let mut resumed = Simulation::from_world(sim.world().clone(), oracle());
    resumed.run().unwrap();
    assert_eq!(reference.world().metrics, resumed.world().metrics);
}
