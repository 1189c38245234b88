//! Chat-completion gateway.
//!
//! A [`Gateway`] wraps any [`Backend`] with request validation, bounded
//! in-flight concurrency and exponential-backoff retries. Two backends ship
//! with the crate: [`RemoteBackend`] speaks the OpenAI-compatible
//! chat-completions protocol and [`MockBackend`] is a deterministic,
//! extractive stand-in used for offline runs and tests.

mod mock;
mod remote;
mod tokens;

use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::{Arc, Condvar, Mutex};
use std::time::Duration;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use mock::{first_sentence, MockBackend};
pub use remote::{RemoteBackend, API_KEY_ENV};
pub use tokens::{estimate_cost, estimate_tokens, CostModel};

/// What the caller is asking for, plus the structured inputs that went into
/// the rendered prompt. Remote backends only read the prompt text; the mock
/// dispatches on this.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum RequestKind {
    Summarize {
        /// Material being summarized, exactly as embedded in the prompt.
        source: String,
        /// Repository seed context, when the prompt carries one.
        seed: Option<String>,
    },
    Rank {
        query: String,
        candidates: Vec<RankCandidate>,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RankCandidate {
    pub label: String,
    pub summary: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChatRequest {
    pub model_id: String,
    pub system_text: String,
    pub user_text: String,
    pub max_output_tokens: u32,
    pub temperature: f32,
    pub kind: RequestKind,
}

impl ChatRequest {
    pub fn validate(&self) -> Result<(), LlmError> {
        if self.user_text.is_empty() {
            return Err(LlmError::Precondition("user_text is empty".into()));
        }
        if self.max_output_tokens == 0 {
            return Err(LlmError::Precondition("max_output_tokens must be positive".into()));
        }
        if !(0.0..=2.0).contains(&self.temperature) {
            return Err(LlmError::Precondition(format!(
                "temperature {} outside [0, 2]",
                self.temperature
            )));
        }
        Ok(())
    }

    /// Estimated prompt size: system and user text together.
    pub fn prompt_estimate(&self) -> u64 {
        estimate_tokens(&self.system_text) + estimate_tokens(&self.user_text)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChatResponse {
    pub text: String,
    pub prompt_tokens: u64,
    pub completion_tokens: u64,
}

/// Per-stage model settings.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    pub model_id: String,
    pub max_output_tokens: u32,
    pub temperature: f32,
}

impl Default for ModelParams {
    fn default() -> Self {
        Self {
            model_id: "mock".into(),
            max_output_tokens: 512,
            temperature: 0.0,
        }
    }
}

impl ModelParams {
    pub fn request(&self, system_text: String, user_text: String, kind: RequestKind) -> ChatRequest {
        ChatRequest {
            model_id: self.model_id.clone(),
            system_text,
            user_text,
            max_output_tokens: self.max_output_tokens,
            temperature: self.temperature,
            kind,
        }
    }
}

#[derive(Debug, Clone, Error, PartialEq)]
pub enum LlmError {
    #[error("invalid request: {0}")]
    Precondition(String),
    #[error("backend configuration: {0}")]
    Config(String),
    #[error("authentication failed: {0}")]
    Auth(String),
    #[error("rate limited: {0}")]
    RateLimit(String),
    #[error("rate limit persisted after {attempts} attempts")]
    RateLimitExhausted { attempts: u32 },
    #[error("transient backend failure: {0}")]
    Transient(String),
    #[error("backend still failing after {attempts} attempts: {last}")]
    RetriesExhausted { attempts: u32, last: String },
    #[error("backend returned HTTP {status}: {body}")]
    Http { status: u16, body: String },
    #[error("malformed backend reply: {0}")]
    Malformed(String),
}

impl LlmError {
    pub fn is_retryable(&self) -> bool {
        matches!(self, LlmError::RateLimit(_) | LlmError::Transient(_))
    }
}

pub trait Backend: Send + Sync {
    fn name(&self) -> &str;
    fn complete(&self, request: &ChatRequest) -> Result<ChatResponse, LlmError>;
}

impl<B: Backend + ?Sized> Backend for Arc<B> {
    fn name(&self) -> &str {
        (**self).name()
    }

    fn complete(&self, request: &ChatRequest) -> Result<ChatResponse, LlmError> {
        (**self).complete(request)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RetryPolicy {
    pub max_retries: u32,
    pub initial_backoff: Duration,
    pub max_backoff: Duration,
    pub multiplier: f64,
}

impl Default for RetryPolicy {
    fn default() -> Self {
        Self {
            max_retries: 4,
            initial_backoff: Duration::from_millis(500),
            max_backoff: Duration::from_secs(30),
            multiplier: 2.0,
        }
    }
}

impl RetryPolicy {
    pub fn none() -> Self {
        Self {
            max_retries: 0,
            ..Self::default()
        }
    }

    /// Delay before retry number `retry` (0-based).
    pub fn backoff(&self, retry: u32) -> Duration {
        let factor = self.multiplier.powi(retry as i32);
        let delay = self.initial_backoff.as_secs_f64() * factor;
        Duration::from_secs_f64(delay.min(self.max_backoff.as_secs_f64()))
    }
}

/// Counting semaphore bounding in-flight backend requests.
struct Limiter {
    max: usize,
    in_flight: Mutex<usize>,
    freed: Condvar,
}

struct Permit<'a>(&'a Limiter);

impl Limiter {
    fn new(max: usize) -> Self {
        Self {
            max: max.max(1),
            in_flight: Mutex::new(0),
            freed: Condvar::new(),
        }
    }

    fn acquire(&self) -> Permit<'_> {
        let mut n = self.in_flight.lock().unwrap();
        while *n >= self.max {
            n = self.freed.wait(n).unwrap();
        }
        *n += 1;
        Permit(self)
    }
}

impl Drop for Permit<'_> {
    fn drop(&mut self) {
        *self.0.in_flight.lock().unwrap() -= 1;
        self.0.freed.notify_one();
    }
}

pub struct Gateway {
    backend: Arc<dyn Backend>,
    retry: RetryPolicy,
    limiter: Limiter,
    calls: AtomicU64,
}

impl std::fmt::Debug for Gateway {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Gateway")
            .field("backend", &self.backend.name())
            .field("retry", &self.retry)
            .field("max_inflight", &self.limiter.max)
            .finish()
    }
}

impl Gateway {
    pub fn new(backend: impl Backend + 'static) -> Self {
        Self::from_arc(Arc::new(backend))
    }

    pub fn from_arc(backend: Arc<dyn Backend>) -> Self {
        Self {
            backend,
            retry: RetryPolicy::default(),
            limiter: Limiter::new(4),
            calls: AtomicU64::new(0),
        }
    }

    pub fn mock() -> Self {
        Self::new(MockBackend)
    }

    pub fn with_retry(mut self, retry: RetryPolicy) -> Self {
        self.retry = retry;
        self
    }

    pub fn with_max_inflight(mut self, max: usize) -> Self {
        self.limiter = Limiter::new(max);
        self
    }

    pub fn max_inflight(&self) -> usize {
        self.limiter.max
    }

    pub fn backend_name(&self) -> &str {
        self.backend.name()
    }

    /// Number of `complete` calls made through this gateway, retries not
    /// counted separately.
    pub fn call_count(&self) -> u64 {
        self.calls.load(Ordering::SeqCst)
    }

    pub fn complete(&self, request: &ChatRequest) -> Result<ChatResponse, LlmError> {
        request.validate()?;
        self.calls.fetch_add(1, Ordering::SeqCst);

        let mut retry = 0;
        loop {
            let outcome = {
                let _permit = self.limiter.acquire();
                self.backend.complete(request)
            };
            match outcome {
                Ok(response) => return Ok(response),
                Err(err) if err.is_retryable() && retry < self.retry.max_retries => {
                    let delay = self.retry.backoff(retry);
                    log::warn!(
                        "{} call failed ({err}); retry {}/{} in {:?}",
                        self.backend.name(),
                        retry + 1,
                        self.retry.max_retries,
                        delay
                    );
                    std::thread::sleep(delay);
                    retry += 1;
                }
                Err(LlmError::RateLimit(_)) => {
                    return Err(LlmError::RateLimitExhausted { attempts: retry + 1 })
                }
                Err(LlmError::Transient(last)) => {
                    return Err(LlmError::RetriesExhausted {
                        attempts: retry + 1,
                        last,
                    })
                }
                Err(err) => return Err(err),
            }
        }
    }
}

/// Backend wrapper that records every request it forwards, in call order.
pub struct RecordingBackend<B> {
    inner: B,
    log: Mutex<Vec<ChatRequest>>,
}

impl<B: Backend> RecordingBackend<B> {
    pub fn new(inner: B) -> Self {
        Self {
            inner,
            log: Mutex::new(Vec::new()),
        }
    }

    pub fn requests(&self) -> Vec<ChatRequest> {
        self.log.lock().unwrap().clone()
    }

    pub fn len(&self) -> usize {
        self.log.lock().unwrap().len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn clear(&self) {
        self.log.lock().unwrap().clear();
    }
}

impl<B: Backend> Backend for RecordingBackend<B> {
    fn name(&self) -> &str {
        self.inner.name()
    }

    fn complete(&self, request: &ChatRequest) -> Result<ChatResponse, LlmError> {
        self.log.lock().unwrap().push(request.clone());
        self.inner.complete(request)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::sync::atomic::AtomicU32;

    fn request(user: &str) -> ChatRequest {
        ModelParams::default().request(
            String::new(),
            user.to_string(),
            RequestKind::Summarize {
                source: user.to_string(),
                seed: None,
            },
        )
    }

    /// Fails with `err` for the first `failures` calls, then succeeds.
    struct Flaky {
        failures: u32,
        err: LlmError,
        seen: AtomicU32,
    }

    impl Backend for Flaky {
        fn name(&self) -> &str {
            "flaky"
        }
        fn complete(&self, _: &ChatRequest) -> Result<ChatResponse, LlmError> {
            let n = self.seen.fetch_add(1, Ordering::SeqCst);
            if n < self.failures {
                Err(self.err.clone())
            } else {
                Ok(ChatResponse {
                    text: "ok".into(),
                    prompt_tokens: 1,
                    completion_tokens: 1,
                })
            }
        }
    }

    fn fast_retry(max_retries: u32) -> RetryPolicy {
        RetryPolicy {
            max_retries,
            initial_backoff: Duration::from_millis(1),
            max_backoff: Duration::from_millis(2),
            multiplier: 2.0,
        }
    }

    #[test]
    fn empty_user_text_is_rejected() {
        let gw = Gateway::mock();
        assert!(matches!(gw.complete(&request("")), Err(LlmError::Precondition(_))));
        assert_eq!(gw.call_count(), 0);
    }

    #[test]
    fn transient_failures_are_retried() {
        let backend = Arc::new(Flaky {
            failures: 2,
            err: LlmError::Transient("503".into()),
            seen: AtomicU32::new(0),
        });
        let gw = Gateway::from_arc(backend.clone()).with_retry(fast_retry(3));
        assert_eq!(gw.complete(&request("x")).unwrap().text, "ok");
        assert_eq!(backend.seen.load(Ordering::SeqCst), 3);
    }

    #[test]
    fn rate_limit_exhaustion() {
        let backend = Arc::new(Flaky {
            failures: 10,
            err: LlmError::RateLimit("429".into()),
            seen: AtomicU32::new(0),
        });
        let gw = Gateway::from_arc(backend.clone()).with_retry(fast_retry(2));
        assert_eq!(
            gw.complete(&request("x")).unwrap_err(),
            LlmError::RateLimitExhausted { attempts: 3 }
        );
        assert_eq!(backend.seen.load(Ordering::SeqCst), 3);
    }

    #[test]
    fn auth_failure_is_not_retried() {
        let backend = Arc::new(Flaky {
            failures: 10,
            err: LlmError::Auth("bad key".into()),
            seen: AtomicU32::new(0),
        });
        let gw = Gateway::from_arc(backend.clone()).with_retry(fast_retry(5));
        assert!(matches!(gw.complete(&request("x")), Err(LlmError::Auth(_))));
        assert_eq!(backend.seen.load(Ordering::SeqCst), 1);
    }

    #[test]
    fn backoff_grows_and_caps() {
        let p = RetryPolicy {
            max_retries: 5,
            initial_backoff: Duration::from_millis(100),
            max_backoff: Duration::from_millis(350),
            multiplier: 2.0,
        };
        assert_eq!(p.backoff(0), Duration::from_millis(100));
        assert_eq!(p.backoff(1), Duration::from_millis(200));
        assert_eq!(p.backoff(2), Duration::from_millis(350));
    }

    #[test]
    fn in_flight_limit_is_enforced() {
        struct Slow {
            current: AtomicU32,
            peak: AtomicU32,
        }
        impl Backend for Slow {
            fn name(&self) -> &str {
                "slow"
            }
            fn complete(&self, _: &ChatRequest) -> Result<ChatResponse, LlmError> {
                let now = self.current.fetch_add(1, Ordering::SeqCst) + 1;
                self.peak.fetch_max(now, Ordering::SeqCst);
                std::thread::sleep(Duration::from_millis(5));
                self.current.fetch_sub(1, Ordering::SeqCst);
                Ok(ChatResponse {
                    text: "ok".into(),
                    prompt_tokens: 1,
                    completion_tokens: 1,
                })
            }
        }
        let backend = Arc::new(Slow {
            current: AtomicU32::new(0),
            peak: AtomicU32::new(0),
        });
        let gw = Gateway::from_arc(backend.clone()).with_max_inflight(2);
        std::thread::scope(|s| {
            for _ in 0..8 {
                s.spawn(|| gw.complete(&request("x")).unwrap());
            }
        });
        assert!(backend.peak.load(Ordering::SeqCst) <= 2);
        assert_eq!(gw.call_count(), 8);
    }
}
