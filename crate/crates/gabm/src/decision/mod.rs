//! Decision backends: turn an agent's context into a stay-home verdict.

mod cache;
mod context;
mod llm;
mod oracle;
mod parse;
mod prompt;

pub use cache::{CacheEntry, ResponseCache};
pub use context::{DecisionContext, DecisionOutcome};
pub use llm::{LlmBackend, LlmConfig, UsageSnapshot, DEFAULT_API_KEY_ENV, DEFAULT_BASE_URL, DEFAULT_MODEL};
pub use oracle::{logistic, OraclePolicy};
pub use parse::parse_response;
pub use prompt::{build_prompt, TRAIT_RENDER_ORDER};

use std::str::FromStr;
use std::sync::Arc;

use crate::error::{BackendError, Error};
use crate::rng::SimRng;

/// A pluggable stay-home decision source.
///
/// `decide` receives a per-(day, agent) random stream derived from the run
/// seed, so outcomes are reproducible regardless of dispatch order.
pub trait DecisionBackend: Send + Sync {
    fn decide(&self, ctx: &DecisionContext, rng: &mut SimRng) -> Result<DecisionOutcome, BackendError>;

    /// Maximum in-flight calls the engine may dispatch concurrently.
    fn max_concurrency(&self) -> usize {
        1
    }

    /// True when equal inputs always produce equal outcomes.
    fn deterministic(&self) -> bool {
        true
    }

    fn name(&self) -> &'static str;
}

/// Constant policy: everyone goes out every day.
pub struct AlwaysOut;

impl DecisionBackend for AlwaysOut {
    fn decide(&self, ctx: &DecisionContext, _rng: &mut SimRng) -> Result<DecisionOutcome, BackendError> {
        let name = &ctx.persona.name;
        let reasoning = format!("{name} needs to go to work to earn money.");
        let raw = format!("Reasoning: {reasoning}\nResponse: No");
        Ok(DecisionOutcome::conforming(false, reasoning, raw))
    }

    fn name(&self) -> &'static str {
        "always-out"
    }
}

/// Constant policy: everyone stays home every day.
pub struct AlwaysHome;

impl DecisionBackend for AlwaysHome {
    fn decide(&self, ctx: &DecisionContext, _rng: &mut SimRng) -> Result<DecisionOutcome, BackendError> {
        let name = &ctx.persona.name;
        let reasoning = format!("{name} prefers to stay at home today.");
        let raw = format!("Reasoning: {reasoning}\nResponse: Yes");
        Ok(DecisionOutcome::conforming(true, reasoning, raw))
    }

    fn name(&self) -> &'static str {
        "always-home"
    }
}

/// The scripted logistic oracle as a backend.
pub struct OracleBackend {
    policy: OraclePolicy,
}

impl OracleBackend {
    pub fn new(policy: OraclePolicy) -> Result<Self, Error> {
        policy.validate()?;
        Ok(OracleBackend { policy })
    }

    pub fn policy(&self) -> &OraclePolicy {
        &self.policy
    }
}

impl DecisionBackend for OracleBackend {
    fn decide(&self, ctx: &DecisionContext, rng: &mut SimRng) -> Result<DecisionOutcome, BackendError> {
        Ok(self.policy.decide(ctx, rng))
    }

    fn name(&self) -> &'static str {
        "oracle"
    }
}

impl DecisionBackend for LlmBackend {
    fn decide(&self, ctx: &DecisionContext, _rng: &mut SimRng) -> Result<DecisionOutcome, BackendError> {
        LlmBackend::decide(self, ctx)
    }

    fn max_concurrency(&self) -> usize {
        self.config().max_concurrency.max(1)
    }

    fn deterministic(&self) -> bool {
        false
    }

    fn name(&self) -> &'static str {
        "llm"
    }
}

/// Backend selector used by the CLI and experiment configs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BackendKind {
    Llm,
    Oracle,
    AlwaysOut,
    AlwaysHome,
}

impl BackendKind {
    pub const ALL: [BackendKind; 4] = [
        BackendKind::Llm,
        BackendKind::Oracle,
        BackendKind::AlwaysOut,
        BackendKind::AlwaysHome,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            BackendKind::Llm => "llm",
            BackendKind::Oracle => "oracle",
            BackendKind::AlwaysOut => "always-out",
            BackendKind::AlwaysHome => "always-home",
        }
    }

    /// Instantiate the backend. `Oracle` uses the supplied policy or the
    /// default one; `Llm` reads its API key from the configured environment
    /// variable and fails fast when it is missing.
    pub fn build(
        self,
        oracle_policy: Option<OraclePolicy>,
        llm_config: Option<LlmConfig>,
    ) -> Result<Arc<dyn DecisionBackend>, Error> {
        match self {
            BackendKind::AlwaysOut => Ok(Arc::new(AlwaysOut)),
            BackendKind::AlwaysHome => Ok(Arc::new(AlwaysHome)),
            BackendKind::Oracle => Ok(Arc::new(OracleBackend::new(
                oracle_policy.unwrap_or_default(),
            )?)),
            BackendKind::Llm => {
                let backend = LlmBackend::new(llm_config.unwrap_or_default())?;
                Ok(Arc::new(backend))
            }
        }
    }
}

impl FromStr for BackendKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "llm" => Ok(BackendKind::Llm),
            "oracle" => Ok(BackendKind::Oracle),
            "always-out" => Ok(BackendKind::AlwaysOut),
            "always-home" => Ok(BackendKind::AlwaysHome),
            other => Err(Error::config(format!(
                "unknown backend '{other}'; expected one of llm, oracle, always-out, always-home"
            ))),
        }
    }
}
