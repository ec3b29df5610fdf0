use super::LlmError;
use serde::{Deserialize, Serialize};
use std::time::Duration;

/// Environment variable holding the API credential. It is never read from a
/// file or a flag.
pub const API_KEY_ENV: &str = "TEXT2PROC_API_KEY";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RetryPolicy {
    /// Total attempts, including the first.
    pub attempts: u32,
    pub backoff_ms: u64,
    pub multiplier: f64,
}

impl Default for RetryPolicy {
    fn default() -> Self {
        RetryPolicy {
            attempts: 3,
            backoff_ms: 1000,
            multiplier: 2.0,
        }
    }
}

impl RetryPolicy {
    /// Delay before attempt `n + 1`, for `n >= 1`.
    pub fn delay_after(&self, n: u32) -> Duration {
        let ms = self.backoff_ms as f64 * self.multiplier.powi(n.saturating_sub(1) as i32);
        Duration::from_millis(ms.min(u64::MAX as f64) as u64)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ClientConfig {
    pub endpoint: String,
    pub model_name: String,
    /// Sent with every request and recorded in the transcript.
    pub temperature: f64,
    pub max_output_tokens: u32,
    pub request_timeout_secs: u64,
    pub max_in_flight: usize,
    pub retry: RetryPolicy,
}

impl Default for ClientConfig {
    fn default() -> Self {
        ClientConfig {
            endpoint: "http://localhost:8080/v1/chat/completions".into(),
            model_name: "gpt-4".into(),
            temperature: 1.0,
            max_output_tokens: 4096,
            request_timeout_secs: 120,
            max_in_flight: 4,
            retry: RetryPolicy::default(),
        }
    }
}

impl ClientConfig {
    pub fn validate(&self) -> Result<(), LlmError> {
        let bad = |m: &str| Err(LlmError::InvalidConfig(m.to_string()));
        if self.max_in_flight < 1 {
            return bad("max_in_flight must be at least 1");
        }
        if !(self.temperature >= 0.0 && self.temperature.is_finite()) {
            return bad("temperature must be a finite number >= 0");
        }
        if self.retry.attempts < 1 {
            return bad("retry.attempts must be at least 1");
        }
        if !(self.retry.multiplier >= 1.0 && self.retry.multiplier.is_finite()) {
            return bad("retry.multiplier must be >= 1");
        }
        if self.endpoint.trim().is_empty() {
            return bad("endpoint is empty");
        }
        if self.model_name.trim().is_empty() {
            return bad("model_name is empty");
        }
        Ok(())
    }

    pub fn request_timeout(&self) -> Duration {
        Duration::from_secs(self.request_timeout_secs)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_validate() {
        assert!(ClientConfig::default().validate().is_ok());
    }

    #[test]
    fn invariants() {
        let c = ClientConfig {
            max_in_flight: 0,
            ..Default::default()
        };
        assert!(c.validate().is_err());
        let c = ClientConfig {
            temperature: -0.1,
            ..Default::default()
        };
        assert!(c.validate().is_err());
        let c = ClientConfig {
            temperature: f64::NAN,
            ..Default::default()
        };
        assert!(c.validate().is_err());
    }

    #[test]
    fn backoff_grows() {
        let r = RetryPolicy::default();
        assert_eq!(r.delay_after(1), Duration::from_millis(1000));
        assert_eq!(r.delay_after(3), Duration::from_millis(4000));
    }

    #[test]
    fn partial_toml() {
        let c: ClientConfig = toml::from_str("model_name = \"m\"\n[retry]\nattempts = 5\n").unwrap();
        assert_eq!(c.model_name, "m");
        assert_eq!(c.retry.attempts, 5);
        assert_eq!(c.retry.backoff_ms, 1000);
        assert!(toml::from_str::<ClientConfig>("api_key = \"x\"").is_err());
    }
}
