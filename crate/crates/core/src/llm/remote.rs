use std::time::Duration;

use serde::{Deserialize, Serialize};

use super::{estimate_tokens, Backend, ChatRequest, ChatResponse, LlmError};

/// Environment variable holding the bearer credential.
pub const API_KEY_ENV: &str = "REPOLENS_API_KEY";

/// OpenAI-compatible `POST {base_url}/chat/completions` client.
pub struct RemoteBackend {
    http: reqwest::blocking::Client,
    endpoint: String,
    api_key: String,
}

#[derive(Serialize)]
struct WireRequest<'a> {
    model: &'a str,
    messages: Vec<WireMessage<'a>>,
    temperature: f32,
    max_tokens: u32,
}

#[derive(Serialize)]
struct WireMessage<'a> {
    role: &'static str,
    content: &'a str,
}

#[derive(Deserialize)]
struct WireResponse {
    choices: Vec<WireChoice>,
    usage: Option<WireUsage>,
}

#[derive(Deserialize)]
struct WireChoice {
    message: WireReplyMessage,
}

#[derive(Deserialize)]
struct WireReplyMessage {
    content: Option<String>,
}

#[derive(Deserialize)]
struct WireUsage {
    prompt_tokens: Option<u64>,
    completion_tokens: Option<u64>,
}

impl RemoteBackend {
    pub fn new(base_url: &str, api_key: impl Into<String>, timeout: Duration) -> Result<Self, LlmError> {
        let base = base_url.trim_end_matches('/');
        if base.is_empty() {
            return Err(LlmError::Config("base_url is empty".into()));
        }
        let api_key = api_key.into();
        if api_key.is_empty() {
            return Err(LlmError::Config("API key is empty".into()));
        }
        let http = reqwest::blocking::Client::builder()
            .timeout(timeout)
            .build()
            .map_err(|e| LlmError::Config(e.to_string()))?;
        Ok(Self {
            http,
            endpoint: format!("{base}/chat/completions"),
            api_key,
        })
    }

    /// Reads the credential from [`API_KEY_ENV`].
    pub fn from_env(base_url: &str, timeout: Duration) -> Result<Self, LlmError> {
        let key = std::env::var(API_KEY_ENV)
            .map_err(|_| LlmError::Config(format!("{API_KEY_ENV} is not set")))?;
        Self::new(base_url, key, timeout)
    }
}

impl Backend for RemoteBackend {
    fn name(&self) -> &str {
        "remote"
    }

    fn complete(&self, request: &ChatRequest) -> Result<ChatResponse, LlmError> {
        let mut messages = Vec::with_capacity(2);
        if !request.system_text.is_empty() {
            messages.push(WireMessage {
                role: "system",
                content: &request.system_text,
            });
        }
        messages.push(WireMessage {
            role: "user",
            content: &request.user_text,
        });
        let body = WireRequest {
            model: &request.model_id,
            messages,
            temperature: request.temperature,
            max_tokens: request.max_output_tokens,
        };

        let response = self
            .http
            .post(&self.endpoint)
            .bearer_auth(&self.api_key)
            .json(&body)
            .send()
            .map_err(|e| LlmError::Transient(e.to_string()))?;

        let status = response.status();
        let text = response.text().map_err(|e| LlmError::Transient(e.to_string()))?;
        match status.as_u16() {
            200..=299 => {}
            401 | 403 => return Err(LlmError::Auth(text)),
            429 => return Err(LlmError::RateLimit(text)),
            408 | 500..=599 => return Err(LlmError::Transient(format!("HTTP {status}: {text}"))),
            code => return Err(LlmError::Http { status: code, body: text }),
        }

        let reply: WireResponse =
            serde_json::from_str(&text).map_err(|e| LlmError::Malformed(e.to_string()))?;
        let content = reply
            .choices
            .into_iter()
            .next()
            .and_then(|c| c.message.content)
            .ok_or_else(|| LlmError::Malformed("reply has no message content".into()))?;

        let usage = reply.usage.as_ref();
        let prompt_tokens = usage
            .and_then(|u| u.prompt_tokens)
            .unwrap_or_else(|| request.prompt_estimate());
        let completion_tokens = usage
            .and_then(|u| u.completion_tokens)
            .unwrap_or_else(|| estimate_tokens(&content));
        Ok(ChatResponse {
            text: content,
            prompt_tokens,
            completion_tokens,
        })
    }
}
