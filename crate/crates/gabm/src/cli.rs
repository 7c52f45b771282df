//! Command-line interface.
//!
//! Data goes to files; progress and notices go to standard error, so
//! pipelines stay clean. Exit codes: 0 success, 2 configuration error,
//! 3 backend error, 4 I/O error.

use std::path::{Path, PathBuf};

use clap::{ArgGroup, Args, Parser, Subcommand};

use crate::analytics::{
    cross_run_band, design_from_rows, list_replication_dirs, logit_fit, parse_feature_spec,
    prevalence_mobility_relation, read_decisions_csv, read_metrics_csv, stay_home_distribution,
    summarize_metrics, LogitOptions, LogitResult, SeriesSummary,
};
use crate::decision::BackendKind;
use crate::error::{CheckpointError, Error};
use crate::experiments::{
    append_decisions_csv, preset, read_summary_json, run_replications, write_metrics_csv,
    write_summary_json, ExperimentConfig, ReplicationSummary, RunStatus, CHECKPOINT_FILE,
    DECISIONS_FILE, METRICS_FILE, PRESET_NAMES, SUMMARY_FILE,
};
use crate::world::{load_checkpoint, save_checkpoint, Condition, Simulation};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_BACKEND: i32 = 3;
pub const EXIT_IO: i32 = 4;

/// The analysis band matches the reported 80% envelope (10th-90th percentile).
const BAND_LEVEL: f64 = 0.8;

#[derive(Parser)]
#[command(
    name = "gabm",
    version,
    about = "Generative agent-based epidemic simulator",
    propagate_version = true
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run an experiment from a preset or a config file
    Run(RunArgs),
    /// Resume a run from a checkpoint file
    Resume(ResumeArgs),
    /// Analyze an experiment output directory
    Analyze(AnalyzeArgs),
    /// List the built-in experiment presets
    Presets,
    /// Validate a preset or config file without running anything
    Validate(ValidateArgs),
}

#[derive(Args)]
struct BackendFlags {
    /// Decision backend: llm, oracle, always-out, always-home
    #[arg(long)]
    backend: Option<String>,
    /// Chat-completions base URL (llm backend)
    #[arg(long)]
    api_base: Option<String>,
    /// Model identifier (llm backend)
    #[arg(long)]
    model: Option<String>,
    /// Sampling temperature; omitted = endpoint default (llm backend)
    #[arg(long)]
    temperature: Option<f64>,
    /// Client-side request budget per minute (llm backend)
    #[arg(long)]
    rate_limit: Option<u32>,
    /// Response cache directory (llm backend)
    #[arg(long)]
    cache_dir: Option<PathBuf>,
}

impl BackendFlags {
    /// Fold the flags into an experiment's backend configuration.
    fn apply(&self, config: &mut ExperimentConfig) -> Result<(), Error> {
        if let Some(kind) = &self.backend {
            config.backend.kind = kind.parse::<BackendKind>()?;
        }
        if config.backend.kind == BackendKind::Llm {
            let mut llm = config.backend.llm.clone().unwrap_or_default();
            if let Some(base) = &self.api_base {
                llm.base_url = base.clone();
            }
            if let Some(model) = &self.model {
                llm.model = model.clone();
            }
            if let Some(t) = self.temperature {
                llm.temperature = Some(t);
            }
            if let Some(rpm) = self.rate_limit {
                llm.requests_per_minute = Some(rpm);
            }
            if let Some(dir) = &self.cache_dir {
                llm.cache_dir = Some(dir.clone());
            }
            config.backend.llm = Some(llm);
        }
        Ok(())
    }
}

#[derive(Args)]
#[command(group(ArgGroup::new("source").required(true).args(["preset", "config"])))]
struct RunArgs {
    /// Built-in preset name (see `gabm presets`)
    #[arg(long)]
    preset: Option<String>,
    /// Experiment config file (JSON; see docs/experiment-config.md)
    #[arg(long)]
    config: Option<PathBuf>,
    /// Base seed; replication k runs under seed + k
    #[arg(long)]
    seed: Option<u64>,
    /// Number of replications
    #[arg(long)]
    replications: Option<u32>,
    /// Horizon in days
    #[arg(long)]
    steps: Option<u32>,
    /// Output root; records land in <out>/<label>/replication-<k>/
    #[arg(long, default_value = "runs")]
    out: PathBuf,
    /// Overwrite replications that already have outputs
    #[arg(long)]
    force: bool,
    #[command(flatten)]
    backend: BackendFlags,
}

#[derive(Args)]
struct ResumeArgs {
    /// Checkpoint file written by a previous run
    checkpoint: PathBuf,
    /// Horizon override; defaults to the checkpointed step_count
    #[arg(long)]
    steps: Option<u32>,
    /// Output directory; defaults to the checkpoint's directory
    #[arg(long)]
    out: Option<PathBuf>,
    #[command(flatten)]
    backend: BackendFlags,
}

#[derive(Args)]
struct AnalyzeArgs {
    /// Experiment directory holding replication-<k> subdirectories
    run_dir: PathBuf,
    /// Fit a stay-home logit with this feature spec, e.g.
    /// "lightcough,fever,prev,prev2,fe"
    #[arg(long)]
    logit: Option<String>,
    /// Recompute even if analysis outputs already exist
    #[arg(long)]
    force: bool,
}

#[derive(Args)]
#[command(group(ArgGroup::new("target").required(true).args(["preset", "config"])))]
struct ValidateArgs {
    #[arg(long)]
    preset: Option<String>,
    #[arg(long)]
    config: Option<PathBuf>,
}

/// Parse arguments, dispatch, and map errors to exit codes.
pub fn main_entry() -> i32 {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run(args) => cmd_run(args),
        Command::Resume(args) => cmd_resume(args),
        Command::Analyze(args) => cmd_analyze(args),
        Command::Presets => cmd_presets(),
        Command::Validate(args) => cmd_validate(args),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            let (code, category) = classify(&e);
            eprintln!("gabm: error[{category}]: {e}");
            code
        }
    }
}

fn classify(e: &Error) -> (i32, &'static str) {
    match e {
        Error::Config(_) | Error::Analytics(_) => (EXIT_CONFIG, "config"),
        // client-side misconfiguration (e.g. missing API key) is a config
        // error even though it surfaces from the backend layer
        Error::Backend(crate::error::BackendError::Config(_)) => (EXIT_CONFIG, "config"),
        Error::Backend(_) => (EXIT_BACKEND, "backend"),
        Error::Checkpoint(CheckpointError::VersionMismatch { .. }) => (EXIT_CONFIG, "config"),
        Error::Checkpoint(_) | Error::Io(_) => (EXIT_IO, "io"),
    }
}

fn resolve_config(
    preset_name: &Option<String>,
    config_path: &Option<PathBuf>,
) -> Result<ExperimentConfig, Error> {
    match (preset_name, config_path) {
        (Some(name), None) => preset(name),
        (None, Some(path)) => ExperimentConfig::load(path),
        _ => unreachable!("clap enforces exactly one source"),
    }
}

fn cmd_run(args: RunArgs) -> Result<i32, Error> {
    let mut config = resolve_config(&args.preset, &args.config)?;
    if let Some(seed) = args.seed {
        config.base_seed = seed;
    }
    if let Some(replications) = args.replications {
        config.replications = replications;
    }
    if let Some(steps) = args.steps {
        config.world.step_count = steps;
    }
    args.backend.apply(&mut config)?;
    config.validate()?;

    let population = config.world.population();
    let progress = move |rep: u32, m: &crate::world::DayMetrics| {
        eprintln!(
            "[replication-{rep}] day {}: infected={} mobility={}/{population} new_cases={}",
            m.day, m.infected, m.mobility_count, m.new_cases
        );
    };
    let reports = run_replications(&config, &args.out, args.force, Some(&progress))?;

    let mut failed = 0;
    for report in &reports {
        match &report.status {
            RunStatus::Completed => {
                let s = report.summary.expect("completed runs carry a summary");
                eprintln!(
                    "replication-{} done: cumulative={} peak={} duration={} mobility={:.3}",
                    report.replication,
                    s.cumulative_cases,
                    s.largest_peak,
                    s.epidemic_duration,
                    s.average_mobility
                );
            }
            RunStatus::Skipped => {
                eprintln!(
                    "replication-{} skipped: outputs exist (use --force to redo)",
                    report.replication
                );
            }
            RunStatus::Failed { error } => {
                failed += 1;
                eprintln!(
                    "replication-{} FAILED: {error}; resumable checkpoint at {}",
                    report.replication,
                    report.dir.join(CHECKPOINT_FILE).display()
                );
            }
        }
    }
    eprintln!(
        "wrote {} replication(s) under {}",
        reports.len(),
        args.out.join(&config.label).display()
    );
    Ok(if failed > 0 { EXIT_BACKEND } else { EXIT_OK })
}

fn cmd_resume(args: ResumeArgs) -> Result<i32, Error> {
    let mut world = load_checkpoint(&args.checkpoint)?;
    if let Some(steps) = args.steps {
        world.config.step_count = steps;
    }

    // reconstruct enough experiment context to build the backend
    let mut pseudo = ExperimentConfig {
        schema_version: crate::experiments::EXPERIMENT_SCHEMA_VERSION,
        label: world.config.run_name.clone(),
        world: world.config.clone(),
        replications: 1,
        base_seed: world.config.seed,
        backend: Default::default(),
    };
    args.backend.apply(&mut pseudo)?;
    let backend = pseudo.backend.build()?;

    let out_dir = match &args.out {
        Some(dir) => dir.clone(),
        None => args
            .checkpoint
            .parent()
            .map(Path::to_path_buf)
            .unwrap_or_else(|| PathBuf::from(".")),
    };
    std::fs::create_dir_all(&out_dir)?;

    let mut sim = Simulation::from_world(world, backend);
    if sim.finished() {
        eprintln!(
            "checkpoint at day {} is already finished; nothing to resume",
            sim.world().day
        );
        return Ok(EXIT_OK);
    }

    let population = sim.world().population();
    let resumed_from = sim.world().day;
    eprintln!("resuming from day {resumed_from}");
    loop {
        match sim.step_day() {
            Ok(crate::world::DayOutcome::Completed(m)) => {
                eprintln!(
                    "day {}: infected={} mobility={}/{population} new_cases={}",
                    m.day, m.infected, m.mobility_count, m.new_cases
                );
            }
            Ok(crate::world::DayOutcome::Finished) => break,
            Err(e) => {
                save_checkpoint(sim.world(), &out_dir.join(CHECKPOINT_FILE))
                    .map_err(Error::Checkpoint)?;
                write_metrics_csv(&out_dir.join(METRICS_FILE), &sim.world().metrics)?;
                append_decisions_csv(&out_dir.join(DECISIONS_FILE), sim.decisions())?;
                return Err(Error::Backend(e));
            }
        }
    }

    write_metrics_csv(&out_dir.join(METRICS_FILE), &sim.world().metrics)?;
    append_decisions_csv(&out_dir.join(DECISIONS_FILE), sim.decisions())?;
    save_checkpoint(sim.world(), &out_dir.join(CHECKPOINT_FILE)).map_err(Error::Checkpoint)?;

    let replication = out_dir
        .file_name()
        .and_then(|n| n.to_str())
        .and_then(|n| n.strip_prefix("replication-"))
        .and_then(|k| k.parse::<u32>().ok())
        .unwrap_or(0);
    let record_summary = summarize_metrics(&sim.world().metrics, population);
    let doc = ReplicationSummary {
        schema_version: crate::experiments::EXPERIMENT_SCHEMA_VERSION,
        label: sim.world().config.run_name.clone(),
        replication,
        seed: sim.world().config.seed,
        backend: sim.backend_name().to_owned(),
        status: "completed".to_owned(),
        population,
        days_run: sim.world().day,
        early_stopped: sim.early_stopped(),
        summary: Some(record_summary),
        error: None,
        checkpoint: CHECKPOINT_FILE.to_owned(),
    };
    write_summary_json(&out_dir.join(SUMMARY_FILE), &doc)?;
    eprintln!(
        "resumed run complete: days {}..{} written to {}",
        resumed_from + 1,
        sim.world().day,
        out_dir.display()
    );
    Ok(EXIT_OK)
}

#[derive(serde::Serialize)]
struct AnalysisSummary {
    schema_version: u32,
    run_dir: String,
    replications: Vec<ReplicationSummary>,
    mean_cumulative_cases: f64,
    mean_average_mobility: f64,
    mean_largest_peak: f64,
    mean_epidemic_duration: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    prevalence_mobility_fit: Option<crate::analytics::ExpFit>,
    relation_points: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    logit: Option<LogitResult>,
}

fn cmd_analyze(args: AnalyzeArgs) -> Result<i32, Error> {
    let analysis_dir = args.run_dir.join("analysis");
    if analysis_dir.join(SUMMARY_FILE).exists() && !args.force {
        eprintln!(
            "analysis already exists at {} (use --force to recompute)",
            analysis_dir.display()
        );
        return Ok(EXIT_OK);
    }

    let rep_dirs = list_replication_dirs(&args.run_dir)?;
    let mut summaries = Vec::new();
    let mut new_case_series: Vec<Vec<f64>> = Vec::new();
    let mut mobility_series: Vec<Vec<f64>> = Vec::new();
    let mut decision_logs: Vec<Vec<crate::world::DecisionRow>> = Vec::new();
    let mut per_rep: Vec<SeriesSummary> = Vec::new();

    for dir in &rep_dirs {
        let metrics = read_metrics_csv(&dir.join(METRICS_FILE))?;
        let summary_doc = read_summary_json(&dir.join(SUMMARY_FILE))?;
        let population = summary_doc.population;
        per_rep.push(summarize_metrics(&metrics, population));
        summaries.push(summary_doc);
        new_case_series.push(metrics.iter().map(|m| f64::from(m.new_cases)).collect());
        mobility_series.push(
            metrics
                .iter()
                .map(|m| f64::from(m.mobility_count) / f64::from(population.max(1)))
                .collect(),
        );
        let decisions_path = dir.join(DECISIONS_FILE);
        if decisions_path.exists() {
            decision_logs.push(read_decisions_csv(&decisions_path)?);
        } else if args.logit.is_some() {
            return Err(Error::config(format!(
                "--logit requires {} in every replication directory; missing in {}",
                DECISIONS_FILE,
                dir.display()
            )));
        }
    }

    std::fs::create_dir_all(&analysis_dir)?;

    if rep_dirs.len() >= 2 {
        let band = cross_run_band(&new_case_series, BAND_LEVEL)?;
        write_band_csv(&analysis_dir.join("band_new_cases.csv"), &band)?;
        let band = cross_run_band(&mobility_series, BAND_LEVEL)?;
        write_band_csv(&analysis_dir.join("band_mobility.csv"), &band)?;
    } else {
        eprintln!("single replication: skipping cross-run bands");
    }

    let (points, fit) = prevalence_mobility_relation(&decision_logs);
    if !points.is_empty() {
        let mut w = csv::Writer::from_path(analysis_dir.join("relation_points.csv"))
            .map_err(|e| Error::analytics(e.to_string()))?;
        w.write_record(["prevalence_pct", "fraction_out"])
            .map_err(|e| Error::analytics(e.to_string()))?;
        for (x, y) in &points {
            w.write_record([format!("{x}"), format!("{y}")])
                .map_err(|e| Error::analytics(e.to_string()))?;
        }
        w.flush().map_err(|e| Error::analytics(e.to_string()))?;
    }

    if !decision_logs.is_empty() {
        let histogram = stay_home_distribution(decision_logs.iter().map(Vec::as_slice));
        let mut w = csv::Writer::from_path(analysis_dir.join("stay_home_histogram.csv"))
            .map_err(|e| Error::analytics(e.to_string()))?;
        w.write_record(["days_home", "agents"])
            .map_err(|e| Error::analytics(e.to_string()))?;
        for (days, agents) in histogram.iter().enumerate() {
            w.write_record([days.to_string(), agents.to_string()])
                .map_err(|e| Error::analytics(e.to_string()))?;
        }
        w.flush().map_err(|e| Error::analytics(e.to_string()))?;
    }

    let logit = match &args.logit {
        Some(spec) => {
            if decision_logs.is_empty() {
                return Err(Error::config(format!(
                    "--logit requires {DECISIONS_FILE} files, none were found"
                )));
            }
            let (features, fixed_effects) = parse_feature_spec(spec)?;
            let rows: Vec<crate::world::DecisionRow> =
                decision_logs.iter().flatten().cloned().collect();
            let problem = design_from_rows(&rows, &features);
            let options = LogitOptions {
                fixed_effects,
                ..LogitOptions::default()
            };
            let result = logit_fit(&problem, &options)?;
            print_logit_table(&result);
            Some(result)
        }
        None => None,
    };

    let n = per_rep.len() as f64;
    let doc = AnalysisSummary {
        schema_version: crate::experiments::EXPERIMENT_SCHEMA_VERSION,
        run_dir: args.run_dir.display().to_string(),
        mean_cumulative_cases: per_rep.iter().map(|s| f64::from(s.cumulative_cases)).sum::<f64>() / n,
        mean_average_mobility: per_rep.iter().map(|s| s.average_mobility).sum::<f64>() / n,
        mean_largest_peak: per_rep.iter().map(|s| f64::from(s.largest_peak)).sum::<f64>() / n,
        mean_epidemic_duration: per_rep.iter().map(|s| f64::from(s.epidemic_duration)).sum::<f64>() / n,
        replications: summaries,
        prevalence_mobility_fit: fit,
        relation_points: points.len(),
        logit,
    };
    let body = serde_json::to_vec_pretty(&doc).map_err(|e| Error::analytics(e.to_string()))?;
    std::fs::write(analysis_dir.join(SUMMARY_FILE), body)?;
    eprintln!("analysis written to {}", analysis_dir.display());
    Ok(EXIT_OK)
}

fn write_band_csv(path: &Path, band: &crate::analytics::Band) -> Result<(), Error> {
    let mut w = csv::Writer::from_path(path).map_err(|e| Error::analytics(e.to_string()))?;
    w.write_record(["day", "mean", "lower", "upper"])
        .map_err(|e| Error::analytics(e.to_string()))?;
    for (i, mean) in band.mean.iter().enumerate() {
        w.write_record([
            (i + 1).to_string(),
            mean.to_string(),
            band.lower[i].to_string(),
            band.upper[i].to_string(),
        ])
        .map_err(|e| Error::analytics(e.to_string()))?;
    }
    w.flush().map_err(|e| Error::analytics(e.to_string()))?;
    Ok(())
}

fn print_logit_table(result: &LogitResult) {
    eprintln!(
        "logit: n={} k={} logL={:.2} pseudoR2={:.4} BIC={:.1} converged={} separated={} dropped_agents={}",
        result.n_observations,
        result.n_parameters,
        result.log_likelihood,
        result.pseudo_r2,
        result.bic,
        result.converged,
        result.separated,
        result.n_groups_dropped
    );
    for ((name, coef), se) in result
        .names
        .iter()
        .zip(&result.coefficients)
        .zip(&result.std_errors)
    {
        eprintln!("  {name:<22} {coef:>10.4} (se {se:.4})");
    }
}

fn cmd_presets() -> Result<i32, Error> {
    println!(
        "{:<20} {:>6} {:>8} {:>12} {:>12} {:>6} {:>8}",
        "name", "N", "contacts", "infectivity", "condition", "reps", "R0"
    );
    for name in PRESET_NAMES {
        let config = preset(name)?;
        let r0 = f64::from(config.world.contact_rate) * config.world.infection_rate * 6.0;
        println!(
            "{:<20} {:>6} {:>8} {:>12} {:>12} {:>6} {:>8.2}",
            name,
            config.world.population(),
            config.world.contact_rate,
            config.world.infection_rate,
            match config.world.condition {
                Condition::Base => "base",
                Condition::SelfHealth => "self-health",
                Condition::Full => "full",
            },
            config.replications,
            r0
        );
    }
    Ok(EXIT_OK)
}

fn cmd_validate(args: ValidateArgs) -> Result<i32, Error> {
    let config = resolve_config(&args.preset, &args.config)?;
    config.validate()?;
    eprintln!(
        "OK: '{}' N={} contacts={} infectivity={} steps={} condition={} backend={} replications={} base_seed={}",
        config.label,
        config.world.population(),
        config.world.contact_rate,
        config.world.infection_rate,
        config.world.step_count,
        config.world.condition.as_str(),
        config.backend.kind.as_str(),
        config.replications,
        config.base_seed
    );
    Ok(EXIT_OK)
}
