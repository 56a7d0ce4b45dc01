use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;
use core::sync::atomic::{AtomicUsize, Ordering};
use core::time::Duration;

use serde::{Deserialize, Serialize};

/// A text-generation service: prompt in, response text out.
pub trait GenerationBackend {
    fn id(&self) -> &str;

    /// Largest prompt, in whitespace tokens, the backend accepts.
    fn max_prompt_tokens(&self) -> usize;

    fn generate(&self, prompt: &str) -> Result<String, BackendError>;
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BackendError {
    pub message: String,
    /// Transport hiccups and rate limits are retryable; bad credentials or
    /// malformed requests are not.
    pub retryable: bool,
}

impl BackendError {
    pub fn transient(message: impl Into<String>) -> Self {
        BackendError {
            message: message.into(),
            retryable: true,
        }
    }

    pub fn permanent(message: impl Into<String>) -> Self {
        BackendError {
            message: message.into(),
            retryable: false,
        }
    }
}

impl fmt::Display for BackendError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

/// Blocks the caller between retries. The core crate has no clock, so the
/// std side supplies a real sleeper.
pub trait Sleep {
    fn sleep(&self, duration: Duration);
}

/// Returns immediately. Used with the mock backend and in tests.
#[derive(Debug, Clone, Copy, Default)]
pub struct NoSleep;

impl Sleep for NoSleep {
    fn sleep(&self, _duration: Duration) {}
}

/// Retry budget and exponential backoff for one backend call.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RetryPolicy {
    /// Retries after the first attempt.
    pub retries: u32,
    pub initial_backoff_ms: u64,
    pub max_backoff_ms: u64,
}

impl Default for RetryPolicy {
    fn default() -> Self {
        RetryPolicy {
            retries: 3,
            initial_backoff_ms: 1000,
            max_backoff_ms: 30_000,
        }
    }
}

impl RetryPolicy {
    pub fn immediate(retries: u32) -> Self {
        RetryPolicy {
            retries,
            initial_backoff_ms: 0,
            max_backoff_ms: 0,
        }
    }

    /// Delay before retry number `retry` (0-based): initial * 2^retry, capped.
    pub fn backoff(&self, retry: u32) -> Duration {
        let factor = 1u64.checked_shl(retry.min(32)).unwrap_or(u64::MAX);
        Duration::from_millis(
            self.initial_backoff_ms
                .saturating_mul(factor)
                .min(self.max_backoff_ms),
        )
    }
}

/// The call failed on every attempt.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RetryExhausted {
    pub backend: String,
    pub attempts: u32,
    pub last: BackendError,
}

impl fmt::Display for RetryExhausted {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "backend {} failed after {} attempt(s): {}",
            self.backend, self.attempts, self.last
        )
    }
}

/// Calls the backend, retrying retryable failures up to `policy.retries`
/// times with exponential backoff.
pub fn generate_with_retry(
    backend: &dyn GenerationBackend,
    prompt: &str,
    policy: &RetryPolicy,
    sleep: &dyn Sleep,
) -> Result<String, RetryExhausted> {
    let mut attempt = 0u32;
    loop {
        match backend.generate(prompt) {
            Ok(text) => return Ok(text),
            Err(err) => {
                attempt += 1;
                if !err.retryable || attempt > policy.retries {
                    return Err(RetryExhausted {
                        backend: backend.id().to_string(),
                        attempts: attempt,
                        last: err,
                    });
                }
                sleep.sleep(policy.backoff(attempt - 1));
            }
        }
    }
}

/// What the mock sends back for a prompt.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MockReply {
    Text(String),
    Fail(String),
}

/// Replies with `reply` whenever the prompt contains `contains`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MockRule {
    pub contains: String,
    pub reply: MockReply,
}

/// A deterministic stand-in for a language model.
///
/// Replies are chosen in this order: the next unused entry of the script,
/// then the first rule whose needle occurs in the prompt, then a fallback
/// markdown table derived from a hash of the prompt. Without a script the
/// reply depends only on the prompt.
#[derive(Debug, Default)]
pub struct MockBackend {
    id: String,
    max_prompt_tokens: usize,
    script: Vec<MockReply>,
    rules: Vec<MockRule>,
    cursor: AtomicUsize,
    calls: AtomicUsize,
}

impl MockBackend {
    pub fn new(id: &str) -> Self {
        MockBackend {
            id: id.to_string(),
            max_prompt_tokens: 128_000,
            ..Default::default()
        }
    }

    pub fn with_rules(mut self, rules: Vec<MockRule>) -> Self {
        self.rules = rules;
        self
    }

    pub fn with_rule(mut self, contains: &str, reply: MockReply) -> Self {
        self.rules.push(MockRule {
            contains: contains.to_string(),
            reply,
        });
        self
    }

    pub fn with_script(mut self, script: Vec<MockReply>) -> Self {
        self.script = script;
        self
    }

    pub fn with_max_prompt_tokens(mut self, tokens: usize) -> Self {
        self.max_prompt_tokens = tokens;
        self
    }

    /// Number of `generate` calls so far.
    pub fn calls(&self) -> usize {
        self.calls.load(Ordering::SeqCst)
    }

    fn fallback(prompt: &str) -> String {
        // FNV-1a
        let mut hash: u64 = 0xcbf2_9ce4_8422_2325;
        for byte in prompt.bytes() {
            hash ^= u64::from(byte);
            hash = hash.wrapping_mul(0x0000_0100_0000_01b3);
        }
        let tokens = prompt.split_whitespace().count();
        alloc::format!(
            "| Item | Detail |\n|---|---|\n| digest | {hash:016x} |\n| tokens | {tokens} |\n"
        )
    }
}

impl GenerationBackend for MockBackend {
    fn id(&self) -> &str {
        &self.id
    }

    fn max_prompt_tokens(&self) -> usize {
        self.max_prompt_tokens
    }

    fn generate(&self, prompt: &str) -> Result<String, BackendError> {
        self.calls.fetch_add(1, Ordering::SeqCst);
        let reply = if self.script.is_empty() {
            None
        } else {
            let slot = self.cursor.fetch_add(1, Ordering::SeqCst);
            self.script.get(slot)
        };
        let reply = reply.or_else(|| {
            self.rules
                .iter()
                .find(|r| prompt.contains(r.contains.as_str()))
                .map(|r| &r.reply)
        });
        match reply {
            Some(MockReply::Text(text)) => Ok(text.clone()),
            Some(MockReply::Fail(msg)) => Err(BackendError::transient(msg.clone())),
            None => Ok(Self::fallback(prompt)),
        }
    }
}
