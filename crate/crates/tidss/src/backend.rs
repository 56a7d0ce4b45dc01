//! Backend construction: the bundled mock and a generic HTTP client.

use std::collections::HashMap;
use std::sync::{Arc, Condvar, Mutex};
use std::time::Duration;

use serde::{Deserialize, Serialize};
use tidss_core::synthesis::{BackendError, GenerationBackend, MockBackend, MockRule, Sleep};

use crate::config::{BackendConfig, BackendKind};
use crate::error::Result;
use crate::formats::read_json;

pub type SharedBackend = Arc<dyn GenerationBackend + Send + Sync>;

/// Sleeps the calling thread.
#[derive(Debug, Clone, Copy, Default)]
pub struct ThreadSleep;

impl Sleep for ThreadSleep {
    fn sleep(&self, duration: Duration) {
        std::thread::sleep(duration);
    }
}

/// Counting semaphore for blocking callers.
#[derive(Debug)]
struct Permits {
    free: Mutex<usize>,
    released: Condvar,
}

struct Permit<'a>(&'a Permits);

impl Permits {
    fn new(n: usize) -> Self {
        Permits {
            free: Mutex::new(n),
            released: Condvar::new(),
        }
    }

    fn acquire(&self) -> Permit<'_> {
        let mut free = self.free.lock().unwrap_or_else(|e| e.into_inner());
        while *free == 0 {
            free = self.released.wait(free).unwrap_or_else(|e| e.into_inner());
        }
        *free -= 1;
        Permit(self)
    }
}

impl Drop for Permit<'_> {
    fn drop(&mut self) {
        *self.0.free.lock().unwrap_or_else(|e| e.into_inner()) += 1;
        self.0.released.notify_one();
    }
}

#[derive(Serialize)]
struct GenerateRequest<'a> {
    prompt: &'a str,
}

#[derive(Deserialize)]
struct GenerateResponse {
    text: String,
}

/// POSTs `{prompt}` to an endpoint and reads `{text}` back.
pub struct HttpBackend {
    id: String,
    endpoint: String,
    auth_token_env: Option<String>,
    max_prompt_tokens: usize,
    client: reqwest::blocking::Client,
    permits: Permits,
}

impl HttpBackend {
    pub fn new(
        id: &str,
        endpoint: &str,
        auth_token_env: Option<String>,
        timeout: Duration,
        max_in_flight: usize,
        max_prompt_tokens: usize,
    ) -> Self {
        let client = reqwest::blocking::Client::builder()
            .timeout(timeout)
            .build()
            .expect("http client with default TLS settings");
        HttpBackend {
            id: id.to_string(),
            endpoint: endpoint.to_string(),
            auth_token_env,
            max_prompt_tokens,
            client,
            permits: Permits::new(max_in_flight.max(1)),
        }
    }
}

impl GenerationBackend for HttpBackend {
    fn id(&self) -> &str {
        &self.id
    }

    fn max_prompt_tokens(&self) -> usize {
        self.max_prompt_tokens
    }

    fn generate(&self, prompt: &str) -> Result<String, BackendError> {
        let mut request = self
            .client
            .post(&self.endpoint)
            .json(&GenerateRequest { prompt });
        if let Some(var) = &self.auth_token_env {
            let token = std::env::var(var).map_err(|_| {
                BackendError::permanent(format!("environment variable {var} is not set"))
            })?;
            request = request.bearer_auth(token);
        }
        let _permit = self.permits.acquire();
        let response = request
            .send()
            .map_err(|e| BackendError::transient(e.to_string()))?;
        let status = response.status();
        if !status.is_success() {
            let message = format!("{} returned {status}", self.endpoint);
            return Err(if status.as_u16() == 429 || status.is_server_error() {
                BackendError::transient(message)
            } else {
                BackendError::permanent(message)
            });
        }
        response
            .json::<GenerateResponse>()
            .map(|r| r.text)
            .map_err(|e| BackendError::permanent(format!("unreadable response: {e}")))
    }
}

#[derive(Deserialize)]
struct RulesFile {
    rules: Vec<MockRule>,
}

/// Builds backends from config. HTTP clients are created once and shared so
/// their in-flight limit holds across jobs; mocks are rebuilt per call so
/// each job sees a fresh script.
#[derive(Default)]
pub struct Backends {
    http: Mutex<HashMap<String, SharedBackend>>,
}

impl Backends {
    pub fn build(&self, config: &BackendConfig) -> Result<SharedBackend> {
        match &config.kind {
            BackendKind::Mock {
                rules,
                rules_file,
                script,
            } => {
                let mut all = rules.clone();
                if let Some(path) = rules_file {
                    all.extend(read_json::<RulesFile>(path)?.rules);
                }
                Ok(Arc::new(
                    MockBackend::new(&config.id)
                        .with_rules(all)
                        .with_script(script.clone())
                        .with_max_prompt_tokens(config.max_prompt_tokens),
                ))
            }
            BackendKind::Http {
                endpoint,
                auth_token_env,
                timeout_ms,
            } => {
                let mut cache = self.http.lock().unwrap_or_else(|e| e.into_inner());
                let backend = cache.entry(config.id.clone()).or_insert_with(|| {
                    Arc::new(HttpBackend::new(
                        &config.id,
                        endpoint,
                        auth_token_env.clone(),
                        Duration::from_millis(*timeout_ms),
                        config.max_in_flight,
                        config.max_prompt_tokens,
                    ))
                });
                Ok(backend.clone())
            }
        }
    }
}
