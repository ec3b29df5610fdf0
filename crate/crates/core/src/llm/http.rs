use super::{note_http_request, ChatRequest, ClientConfig, HttpReply, Transport, TransportError, API_KEY_ENV};
use ureq::Agent;

/// Blocking chat-completions transport. The bearer token is read from
/// [`API_KEY_ENV`] on every request.
pub struct HttpTransport {
    agent: Agent,
}

impl HttpTransport {
    pub fn new(config: &ClientConfig) -> Self {
        let agent: Agent = Agent::config_builder()
            .http_status_as_error(false)
            .timeout_global(Some(config.request_timeout()))
            .build()
            .into();
        HttpTransport { agent }
    }
}

impl Transport for HttpTransport {
    fn send(&self, request: &ChatRequest, config: &ClientConfig) -> Result<HttpReply, TransportError> {
        let key = std::env::var(API_KEY_ENV)
            .map_err(|_| TransportError::Credential(format!("environment variable {API_KEY_ENV} is not set")))?;
        let body = serde_json::to_string(request).map_err(|e| TransportError::Connection(e.to_string()))?;
        note_http_request();
        let result = self
            .agent
            .post(&config.endpoint)
            .header("Authorization", format!("Bearer {key}"))
            .header("Content-Type", "application/json")
            .send(body);
        let mut response = match result {
            Ok(r) => r,
            Err(ureq::Error::Timeout(_)) => return Err(TransportError::Timeout),
            Err(e) => return Err(TransportError::Connection(e.to_string())),
        };
        let status = response.status().as_u16();
        let body = match response.body_mut().read_to_string() {
            Ok(b) => b,
            Err(ureq::Error::Timeout(_)) => return Err(TransportError::Timeout),
            Err(e) => return Err(TransportError::Connection(e.to_string())),
        };
        Ok(HttpReply { status, body })
    }
}
