//! Chat-completions oracle over HTTP.
//!
//! Sends `{"model": ..., "messages": [{"role": "user", "content": prompt}]}`
//! with no sampling parameters and reads `choices[0].message.content`.

use std::time::Duration;

use serde_json::{json, Value};
use ureq::Agent;

use sense_bridge_core::oracle::{Oracle, OracleError, OracleRequest};

pub const ENDPOINT_VAR: &str = "SENSE_BRIDGE_ENDPOINT";
pub const API_KEY_VAR: &str = "SENSE_BRIDGE_API_KEY";

pub struct HttpChatOracle {
    agent: Agent,
    endpoint: String,
    model: String,
    api_key: Option<String>,
}

impl std::fmt::Debug for HttpChatOracle {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("HttpChatOracle")
            .field("endpoint", &self.endpoint)
            .field("model", &self.model)
            .field("api_key", &self.api_key.as_ref().map(|_| "<redacted>"))
            .finish()
    }
}

impl HttpChatOracle {
    pub fn new(endpoint: &str, model: &str, api_key: Option<String>, timeout: Duration) -> Self {
        let agent: Agent =
            Agent::config_builder().timeout_global(Some(timeout)).http_status_as_error(false).build().into();
        HttpChatOracle { agent, endpoint: endpoint.to_string(), model: model.to_string(), api_key }
    }

    fn post(&self, prompt: &str) -> Result<String, String> {
        let body = json!({
            "model": self.model,
            "messages": [{"role": "user", "content": prompt}],
        });
        let mut req = self.agent.post(&self.endpoint);
        if let Some(key) = &self.api_key {
            req = req.header("Authorization", &format!("Bearer {key}"));
        }
        let mut resp = req.send_json(&body).map_err(|e| e.to_string())?;
        let status = resp.status();
        let text = resp.body_mut().read_to_string().map_err(|e| e.to_string())?;
        if !status.is_success() {
            return Err(format!("HTTP {}: {}", status.as_u16(), truncate(&text, 200)));
        }
        let value: Value = serde_json::from_str(&text).map_err(|e| format!("invalid JSON response: {e}"))?;
        value
            .pointer("/choices/0/message/content")
            .and_then(Value::as_str)
            .map(str::to_string)
            .ok_or_else(|| String::from("response has no choices[0].message.content"))
    }
}

fn truncate(s: &str, n: usize) -> &str {
    match s.char_indices().nth(n) {
        Some((i, _)) => &s[..i],
        None => s,
    }
}

impl Oracle for HttpChatOracle {
    fn query(&self, request: &OracleRequest<'_>) -> Result<String, OracleError> {
        self.post(request.prompt.as_str()).map_err(OracleError::Transport)
    }
}
