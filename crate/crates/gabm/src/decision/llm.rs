//! Remote decision backend speaking the chat-completions wire format.
//!
//! Each agent-day is one POST to `<base>/chat/completions` carrying the full
//! prompt as a single system message. Transient failures (transport errors,
//! HTTP 5xx, 429) are retried with exponential backoff plus jitter, honoring
//! any server-provided retry delay; other 4xx statuses abort immediately.

use std::path::PathBuf;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Mutex;
use std::time::{Duration, Instant, SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};

use crate::error::BackendError;

use super::cache::{CacheEntry, ResponseCache};
use super::context::{DecisionContext, DecisionOutcome};
use super::parse::parse_response;
use super::prompt::build_prompt;

pub const DEFAULT_BASE_URL: &str = "https://api.openai.com/v1";
pub const DEFAULT_MODEL: &str = "gpt-3.5-turbo-0301";
pub const DEFAULT_API_KEY_ENV: &str = "OPENAI_API_KEY";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct LlmConfig {
    pub base_url: String,
    pub model: String,
    /// None sends no temperature field, leaving the endpoint's own default.
    pub temperature: Option<f64>,
    /// Name of the environment variable holding the API key.
    pub api_key_env: String,
    pub max_attempts: u32,
    pub initial_backoff_ms: u64,
    pub max_backoff_ms: u64,
    pub timeout_secs: u64,
    /// Client-side token-bucket budget; None disables pacing.
    pub requests_per_minute: Option<u32>,
    pub cache_dir: Option<PathBuf>,
    pub max_concurrency: usize,
}

impl Default for LlmConfig {
    fn default() -> Self {
        LlmConfig {
            base_url: DEFAULT_BASE_URL.to_owned(),
            model: DEFAULT_MODEL.to_owned(),
            temperature: None,
            api_key_env: DEFAULT_API_KEY_ENV.to_owned(),
            max_attempts: 5,
            initial_backoff_ms: 500,
            max_backoff_ms: 16_000,
            timeout_secs: 60,
            requests_per_minute: None,
            cache_dir: None,
            max_concurrency: 8,
        }
    }
}

/// Aggregate usage counters across all calls on a backend.
#[derive(Debug, Default)]
pub struct UsageCounters {
    pub requests: AtomicU64,
    pub cache_hits: AtomicU64,
    pub prompt_tokens: AtomicU64,
    pub completion_tokens: AtomicU64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct UsageSnapshot {
    pub requests: u64,
    pub cache_hits: u64,
    pub prompt_tokens: u64,
    pub completion_tokens: u64,
}

struct TokenBucket {
    capacity: f64,
    tokens: f64,
    rate_per_sec: f64,
    last_refill: Instant,
}

impl TokenBucket {
    fn new(per_minute: u32) -> Self {
        let capacity = f64::from(per_minute.max(1));
        TokenBucket {
            capacity,
            tokens: capacity,
            rate_per_sec: capacity / 60.0,
            last_refill: Instant::now(),
        }
    }

    /// Time to wait before a token is available; zero if one was taken.
    fn try_take(&mut self) -> Duration {
        let now = Instant::now();
        let elapsed = now.duration_since(self.last_refill).as_secs_f64();
        self.tokens = (self.tokens + elapsed * self.rate_per_sec).min(self.capacity);
        self.last_refill = now;
        if self.tokens >= 1.0 {
            self.tokens -= 1.0;
            Duration::ZERO
        } else {
            Duration::from_secs_f64((1.0 - self.tokens) / self.rate_per_sec)
        }
    }
}

pub struct LlmBackend {
    config: LlmConfig,
    api_key: String,
    agent: ureq::Agent,
    cache: Option<ResponseCache>,
    limiter: Option<Mutex<TokenBucket>>,
    usage: UsageCounters,
}

impl LlmBackend {
    /// Build the client; fails fast when the API key variable is unset or
    /// the cache directory cannot be created.
    pub fn new(config: LlmConfig) -> Result<Self, BackendError> {
        let api_key = std::env::var(&config.api_key_env).map_err(|_| {
            BackendError::Config(format!(
                "environment variable {} is not set (it must hold the API key)",
                config.api_key_env
            ))
        })?;
        let agent = ureq::AgentBuilder::new()
            .timeout(Duration::from_secs(config.timeout_secs))
            .build();
        let cache = match &config.cache_dir {
            Some(dir) => Some(ResponseCache::open(dir)?),
            None => None,
        };
        let limiter = config
            .requests_per_minute
            .map(|rpm| Mutex::new(TokenBucket::new(rpm)));
        Ok(LlmBackend {
            config,
            api_key,
            agent,
            cache,
            limiter,
            usage: UsageCounters::default(),
        })
    }

    pub fn config(&self) -> &LlmConfig {
        &self.config
    }

    pub fn usage(&self) -> UsageSnapshot {
        UsageSnapshot {
            requests: self.usage.requests.load(Ordering::Relaxed),
            cache_hits: self.usage.cache_hits.load(Ordering::Relaxed),
            prompt_tokens: self.usage.prompt_tokens.load(Ordering::Relaxed),
            completion_tokens: self.usage.completion_tokens.load(Ordering::Relaxed),
        }
    }

    fn wait_for_budget(&self) {
        if let Some(limiter) = &self.limiter {
            loop {
                let wait = limiter.lock().expect("rate limiter poisoned").try_take();
                if wait.is_zero() {
                    return;
                }
                std::thread::sleep(wait);
            }
        }
    }

    /// One request/response cycle with retries. Returns the raw reply text
    /// plus token usage when the endpoint reported it.
    fn complete(&self, prompt: &str) -> Result<(String, Option<u64>, Option<u64>), BackendError> {
        let url = format!(
            "{}/chat/completions",
            self.config.base_url.trim_end_matches('/')
        );
        let mut body = serde_json::json!({
            "model": self.config.model,
            "messages": [{"role": "system", "content": prompt}],
        });
        if let Some(t) = self.config.temperature {
            body["temperature"] = serde_json::json!(t);
        }

        let mut last_delay = Duration::ZERO;
        let mut last_error = String::new();
        for attempt in 1..=self.config.max_attempts {
            self.wait_for_budget();
            self.usage.requests.fetch_add(1, Ordering::Relaxed);
            let result = self
                .agent
                .post(&url)
                .set("Authorization", &format!("Bearer {}", self.api_key))
                .send_json(body.clone());

            let (retryable, server_delay) = match result {
                Ok(resp) => {
                    return parse_completion(resp);
                }
                Err(ureq::Error::Status(status, resp)) => {
                    let retry_after = resp
                        .header("retry-after")
                        .and_then(|v| v.trim().parse::<u64>().ok())
                        .map(Duration::from_secs);
                    let text = resp.into_string().unwrap_or_default();
                    if status == 429 || (500..600).contains(&status) {
                        last_error = format!("HTTP {status}: {text}");
                        (true, retry_after)
                    } else {
                        return Err(BackendError::NonRetryable { status, body: text });
                    }
                }
                Err(ureq::Error::Transport(t)) => {
                    last_error = format!("transport: {t}");
                    (true, None)
                }
            };
            debug_assert!(retryable);

            if attempt == self.config.max_attempts {
                break;
            }
            let exp = self
                .config
                .initial_backoff_ms
                .saturating_mul(1u64 << (attempt - 1).min(20))
                .min(self.config.max_backoff_ms);
            // jitter of up to half the base keeps the sequence non-decreasing
            let jitter = jitter_ms(exp / 2);
            let mut delay = Duration::from_millis(exp + jitter);
            if let Some(server) = server_delay {
                delay = delay.max(server);
            }
            delay = delay.max(last_delay);
            last_delay = delay;
            std::thread::sleep(delay);
        }
        Err(BackendError::AttemptsExhausted {
            attempts: self.config.max_attempts,
            last_error,
        })
    }
}

fn jitter_ms(bound: u64) -> u64 {
    if bound == 0 {
        return 0;
    }
    // wall-clock entropy is fine here; retry timing is not replayed
    let nanos = SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.subsec_nanos())
        .unwrap_or(0);
    u64::from(nanos) % bound
}

fn parse_completion(
    resp: ureq::Response,
) -> Result<(String, Option<u64>, Option<u64>), BackendError> {
    let value: serde_json::Value = resp
        .into_json()
        .map_err(|e| BackendError::MalformedResponse(format!("invalid JSON: {e}")))?;
    let content = value
        .pointer("/choices/0/message/content")
        .and_then(|v| v.as_str())
        .ok_or_else(|| {
            BackendError::MalformedResponse("missing choices[0].message.content".to_owned())
        })?
        .to_owned();
    let prompt_tokens = value.pointer("/usage/prompt_tokens").and_then(|v| v.as_u64());
    let completion_tokens = value
        .pointer("/usage/completion_tokens")
        .and_then(|v| v.as_u64());
    Ok((content, prompt_tokens, completion_tokens))
}

impl LlmBackend {
    /// Decide one agent-day: cache lookup, then the remote call.
    pub fn decide(&self, ctx: &DecisionContext) -> Result<DecisionOutcome, BackendError> {
        let prompt = build_prompt(ctx);
        let key = ResponseCache::key(&prompt, &self.config.model, self.config.temperature);
        if let Some(cache) = &self.cache {
            if let Some(entry) = cache.get(&key) {
                self.usage.cache_hits.fetch_add(1, Ordering::Relaxed);
                return Ok(parse_response(&entry.raw_response));
            }
        }
        let (raw, prompt_tokens, completion_tokens) = self.complete(&prompt)?;
        if let Some(n) = prompt_tokens {
            self.usage.prompt_tokens.fetch_add(n, Ordering::Relaxed);
        }
        if let Some(n) = completion_tokens {
            self.usage.completion_tokens.fetch_add(n, Ordering::Relaxed);
        }
        if let Some(cache) = &self.cache {
            let entry = CacheEntry {
                model: self.config.model.clone(),
                temperature: self.config.temperature,
                prompt,
                raw_response: raw.clone(),
                prompt_tokens,
                completion_tokens,
                created_unix: SystemTime::now()
                    .duration_since(UNIX_EPOCH)
                    .map(|d| d.as_secs())
                    .unwrap_or(0),
            };
            cache.put(&key, &entry)?;
        }
        Ok(parse_response(&raw))
    }
}
