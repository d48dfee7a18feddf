//! LLM providers: request `{"prompt"}` in, response `{"scenario_text"}` out.
//!
//! Two implementations: an HTTP chat-completion client and a replaying mock
//! (`mock:<dir>`) that serves numbered response files per target.

use std::path::PathBuf;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use serde::{Deserialize, Serialize};

use super::prompt::parse_target_line;
use super::short_hash;

/// Environment variable consulted for the API key by default.
pub const DEFAULT_API_KEY_ENV: &str = "FIKA_LLM_API_KEY";

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PromptRequest {
    pub prompt: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ScenarioResponse {
    pub scenario_text: String,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("provider error: {message}")]
pub struct ProviderError {
    pub message: String,
}

impl ProviderError {
    pub fn new(message: impl Into<String>) -> Self {
        ProviderError {
            message: message.into(),
        }
    }
}

pub trait LlmProvider: Sync {
    fn generate(&self, request: &PromptRequest) -> Result<ScenarioResponse, ProviderError>;
    /// Total calls to `generate`, successful or not.
    fn invocation_count(&self) -> usize;
}

/// Replays response files from `<dir>/<m_dp-hash>_<m_tpl-hash>/<n>.txt`,
/// numbering calls per target in arrival order.
pub struct MockProvider {
    dir: PathBuf,
    calls: AtomicUsize,
    per_target: Mutex<std::collections::BTreeMap<String, u32>>,
}

impl MockProvider {
    pub fn new(dir: impl Into<PathBuf>) -> Self {
        MockProvider {
            dir: dir.into(),
            calls: AtomicUsize::new(0),
            per_target: Mutex::new(Default::default()),
        }
    }

    /// Key of the response directory for a prompt, from its target line.
    fn key_for(&self, prompt: &str) -> Result<String, ProviderError> {
        let (m_dp, m_tpl) = parse_target_line(prompt)
            .ok_or_else(|| ProviderError::new("prompt has no target line to replay against"))?;
        Ok(format!("{}_{}", short_hash(&m_dp), short_hash(&m_tpl)))
    }
}

impl LlmProvider for MockProvider {
    fn generate(&self, request: &PromptRequest) -> Result<ScenarioResponse, ProviderError> {
        self.calls.fetch_add(1, Ordering::SeqCst);
        let key = self.key_for(&request.prompt)?;
        let n = {
            let mut per_target = self.per_target.lock().expect("mock lock");
            let counter = per_target.entry(key.clone()).or_insert(0);
            *counter += 1;
            *counter
        };
        let path = self.dir.join(&key).join(format!("{n}.txt"));
        let scenario_text = std::fs::read_to_string(&path).map_err(|e| {
            ProviderError::new(format!(
                "mock response file {} not found: {e}",
                path.display()
            ))
        })?;
        Ok(ScenarioResponse { scenario_text })
    }

    fn invocation_count(&self) -> usize {
        self.calls.load(Ordering::SeqCst)
    }
}

/// Chat-completion client configured by base URL and model name; the API key
/// is read from an environment variable at call time.
pub struct HttpProvider {
    pub base_url: String,
    pub model: String,
    pub api_key_env: String,
    calls: AtomicUsize,
}

impl HttpProvider {
    pub fn new(base_url: &str, model: &str, api_key_env: Option<&str>) -> Self {
        HttpProvider {
            base_url: base_url.trim_end_matches('/').to_string(),
            model: model.to_string(),
            api_key_env: api_key_env.unwrap_or(DEFAULT_API_KEY_ENV).to_string(),
            calls: AtomicUsize::new(0),
        }
    }
}

/// Wire body for a chat-completion request carrying the prompt.
pub fn chat_request_body(model: &str, prompt: &str) -> serde_json::Value {
    serde_json::json!({
        "model": model,
        "messages": [{"role": "user", "content": prompt}]
    })
}

/// Extracts the scenario text from a chat-completion response body.
pub fn extract_scenario_text(body: &serde_json::Value) -> Result<String, ProviderError> {
    body["choices"][0]["message"]["content"]
        .as_str()
        .map(str::to_string)
        .ok_or_else(|| ProviderError::new("response has no choices[0].message.content"))
}

impl LlmProvider for HttpProvider {
    fn generate(&self, request: &PromptRequest) -> Result<ScenarioResponse, ProviderError> {
        self.calls.fetch_add(1, Ordering::SeqCst);
        let api_key = std::env::var(&self.api_key_env).map_err(|_| {
            ProviderError::new(format!("API key variable {} is not set", self.api_key_env))
        })?;
        let url = format!("{}/chat/completions", self.base_url);
        let body = chat_request_body(&self.model, &request.prompt);
        let response = ureq::post(&url)
            .set("Authorization", &format!("Bearer {api_key}"))
            .set("Content-Type", "application/json")
            .send_string(&body.to_string())
            .map_err(|e| ProviderError::new(format!("request to {url} failed: {e}")))?;
        let value: serde_json::Value = response
            .into_json()
            .map_err(|e| ProviderError::new(format!("malformed response body: {e}")))?;
        Ok(ScenarioResponse {
            scenario_text: extract_scenario_text(&value)?,
        })
    }

    fn invocation_count(&self) -> usize {
        self.calls.load(Ordering::SeqCst)
    }
}

/// Provider selection from configuration.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProviderSpec {
    /// `mock:<dir>` or `http`.
    pub provider: String,
    #[serde(default)]
    pub base_url: Option<String>,
    #[serde(default)]
    pub model: Option<String>,
    #[serde(default)]
    pub api_key_env: Option<String>,
}

/// Instantiates the configured provider.
pub fn provider_from_spec(spec: &ProviderSpec) -> Result<Box<dyn LlmProvider>, ProviderError> {
    if let Some(dir) = spec.provider.strip_prefix("mock:") {
        if dir.is_empty() {
            return Err(ProviderError::new("mock provider needs a directory: mock:<dir>"));
        }
        return Ok(Box::new(MockProvider::new(dir)));
    }
    if spec.provider == "http" {
        let base_url = spec
            .base_url
            .as_deref()
            .ok_or_else(|| ProviderError::new("http provider needs base_url"))?;
        let model = spec
            .model
            .as_deref()
            .ok_or_else(|| ProviderError::new("http provider needs a model name"))?;
        return Ok(Box::new(HttpProvider::new(
            base_url,
            model,
            spec.api_key_env.as_deref(),
        )));
    }
    Err(ProviderError::new(format!(
        "unknown provider {:?} (expected \"http\" or \"mock:<dir>\")",
        spec.provider
    )))
}
