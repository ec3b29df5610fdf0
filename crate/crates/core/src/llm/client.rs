use super::{ClientConfig, LlmError, LlmExchange, TranscriptStore};
use crate::BpmTask;
use serde::{Deserialize, Serialize};
use std::sync::{Condvar, Mutex};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChatMessage {
    pub role: String,
    pub content: String,
}

/// Body of a chat-completions request. Always exactly one user message.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ChatRequest {
    pub model: String,
    pub messages: Vec<ChatMessage>,
    pub temperature: f64,
    pub max_tokens: u32,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HttpReply {
    pub status: u16,
    pub body: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TransportError {
    Timeout,
    Connection(String),
    Credential(String),
}

/// Sends one request and returns the raw HTTP reply.
pub trait Transport: Send + Sync {
    fn send(&self, request: &ChatRequest, config: &ClientConfig) -> Result<HttpReply, TransportError>;
}

impl<T: Transport + ?Sized> Transport for &T {
    fn send(&self, request: &ChatRequest, config: &ClientConfig) -> Result<HttpReply, TransportError> {
        (**self).send(request, config)
    }
}

/// Identity of one exchange in the transcript.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RunContext {
    pub run_id: String,
    pub task: BpmTask,
    pub variant_id: String,
    pub try_index: u32,
}

struct Gate {
    in_flight: Mutex<usize>,
    freed: Condvar,
    limit: usize,
}

struct Permit<'a>(&'a Gate);

impl Gate {
    fn acquire(&self) -> Permit<'_> {
        let mut n = self.in_flight.lock().expect("gate lock");
        while *n >= self.limit {
            n = self.freed.wait(n).expect("gate lock");
        }
        *n += 1;
        Permit(self)
    }
}

impl Drop for Permit<'_> {
    fn drop(&mut self) {
        *self.0.in_flight.lock().expect("gate lock") -= 1;
        self.0.freed.notify_one();
    }
}

#[derive(Deserialize)]
struct Completion {
    choices: Vec<Choice>,
}

#[derive(Deserialize)]
struct Choice {
    message: ChatMessage,
}

enum Attempt {
    Retry(LlmError),
    Fail(LlmError),
}

pub struct LlmClient<'s, T> {
    config: ClientConfig,
    transport: T,
    store: &'s TranscriptStore,
    gate: Gate,
}

impl<'s, T: Transport> LlmClient<'s, T> {
    pub fn new(config: ClientConfig, transport: T, store: &'s TranscriptStore) -> Result<Self, LlmError> {
        config.validate()?;
        let gate = Gate {
            in_flight: Mutex::new(0),
            freed: Condvar::new(),
            limit: config.max_in_flight,
        };
        Ok(LlmClient {
            config,
            transport,
            store,
            gate,
        })
    }

    pub fn config(&self) -> &ClientConfig {
        &self.config
    }

    /// Send `prompt` as a fresh single-message conversation and record the
    /// exchange before returning it. Safe to call from several threads; at
    /// most `max_in_flight` requests are outstanding at once.
    pub fn complete(&self, ctx: &RunContext, prompt: &str) -> Result<LlmExchange, LlmError> {
        if prompt.trim().is_empty() {
            return Err(LlmError::EmptyPrompt);
        }
        if self.store.contains(&ctx.run_id, ctx.try_index) {
            return Err(LlmError::DuplicateExchange {
                run_id: ctx.run_id.clone(),
                try_index: ctx.try_index,
            });
        }
        let request = ChatRequest {
            model: self.config.model_name.clone(),
            messages: vec![ChatMessage {
                role: "user".into(),
                content: prompt.to_string(),
            }],
            temperature: self.config.temperature,
            max_tokens: self.config.max_output_tokens,
        };

        let policy = &self.config.retry;
        let mut attempt = 1;
        let response_text = loop {
            let outcome = {
                let _permit = self.gate.acquire();
                self.attempt(&request, attempt)
            };
            match outcome {
                Ok(text) => break text,
                Err(Attempt::Retry(e)) if attempt < policy.attempts => {
                    let delay = policy.delay_after(attempt);
                    log::warn!(
                        "{} try {}: attempt {attempt}/{} failed ({e}); retrying in {delay:?}",
                        ctx.run_id,
                        ctx.try_index,
                        policy.attempts
                    );
                    std::thread::sleep(delay);
                    attempt += 1;
                }
                Err(Attempt::Retry(e)) | Err(Attempt::Fail(e)) => return Err(e),
            }
        };
        log::info!("{} try {}: completed after {attempt} attempt(s)", ctx.run_id, ctx.try_index);

        let exchange = LlmExchange {
            run_id: ctx.run_id.clone(),
            task: ctx.task,
            variant_id: ctx.variant_id.clone(),
            try_index: ctx.try_index,
            model_name: self.config.model_name.clone(),
            temperature: self.config.temperature,
            prompt_text: prompt.to_string(),
            response_text,
            created_at: chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Millis, true),
        };
        self.store.append(&exchange)?;
        Ok(exchange)
    }

    fn attempt(&self, request: &ChatRequest, attempt: u32) -> Result<String, Attempt> {
        let reply = match self.transport.send(request, &self.config) {
            Ok(r) => r,
            Err(TransportError::Timeout) => return Err(Attempt::Retry(LlmError::Timeout { attempts: attempt })),
            Err(TransportError::Connection(m)) => return Err(Attempt::Retry(LlmError::TransportFailure(m))),
            Err(TransportError::Credential(m)) => return Err(Attempt::Fail(LlmError::AuthFailure(m))),
        };
        match reply.status {
            200..=299 => {
                let parsed: Completion = serde_json::from_str(&reply.body).map_err(|e| {
                    Attempt::Fail(LlmError::TransportFailure(format!("malformed completion body: {e}")))
                })?;
                parsed
                    .choices
                    .into_iter()
                    .next()
                    .map(|c| c.message.content)
                    .ok_or_else(|| Attempt::Fail(LlmError::TransportFailure("completion has no choices".into())))
            }
            429 => Err(Attempt::Retry(LlmError::RateLimited { attempts: attempt })),
            401 | 403 => Err(Attempt::Fail(LlmError::AuthFailure(format!("HTTP {}", reply.status)))),
            408 => Err(Attempt::Retry(LlmError::Timeout { attempts: attempt })),
            500..=599 => Err(Attempt::Retry(LlmError::TransportFailure(format!("HTTP {}", reply.status)))),
            s => Err(Attempt::Fail(LlmError::TransportFailure(format!("HTTP {s}")))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::llm::RetryPolicy;
    use std::sync::atomic::{AtomicUsize, Ordering};
    use std::sync::Arc;

    fn ok_body(text: &str) -> String {
        serde_json::json!({"choices": [{"message": {"role": "assistant", "content": text}}]}).to_string()
    }

    struct Echo {
        calls: AtomicUsize,
        seen: Mutex<Vec<ChatRequest>>,
    }

    impl Transport for Echo {
        fn send(&self, request: &ChatRequest, _: &ClientConfig) -> Result<HttpReply, TransportError> {
            self.calls.fetch_add(1, Ordering::SeqCst);
            self.seen.lock().unwrap().push(request.clone());
            Ok(HttpReply {
                status: 200,
                body: ok_body(&request.messages[0].content),
            })
        }
    }

    /// Replies with the scripted statuses in order, then 200.
    struct Script {
        statuses: Mutex<Vec<u16>>,
        calls: AtomicUsize,
    }

    impl Script {
        fn new(statuses: &[u16]) -> Self {
            Script {
                statuses: Mutex::new(statuses.iter().rev().copied().collect()),
                calls: AtomicUsize::new(0),
            }
        }
    }

    impl Transport for Script {
        fn send(&self, _: &ChatRequest, _: &ClientConfig) -> Result<HttpReply, TransportError> {
            self.calls.fetch_add(1, Ordering::SeqCst);
            let status = self.statuses.lock().unwrap().pop().unwrap_or(200);
            Ok(HttpReply {
                status,
                body: if status == 200 { ok_body("done") } else { String::new() },
            })
        }
    }

    fn config(attempts: u32) -> ClientConfig {
        ClientConfig {
            retry: RetryPolicy {
                attempts,
                backoff_ms: 0,
                multiplier: 1.0,
            },
            ..ClientConfig::default()
        }
    }

    fn ctx(run: &str, t: u32) -> RunContext {
        RunContext {
            run_id: run.into(),
            task: BpmTask::Bpmn,
            variant_id: "original".into(),
            try_index: t,
        }
    }

    #[test]
    fn echo_is_recorded() {
        let store = TranscriptStore::in_memory();
        let echo = Echo {
            calls: AtomicUsize::new(0),
            seen: Mutex::new(Vec::new()),
        };
        let client = LlmClient::new(config(3), &echo, &store).unwrap();
        let ex = client.complete(&ctx("r", 1), "ping").unwrap();
        assert_eq!(ex.response_text, "ping");
        assert_eq!(store.get("r", 1).unwrap(), ex);
        client.complete(&ctx("r", 2), "ping").unwrap();
        let seen = echo.seen.lock().unwrap();
        assert!(seen.iter().all(|r| r.messages.len() == 1 && r.messages[0].role == "user"));
    }

    #[test]
    fn rate_limit_then_success() {
        let store = TranscriptStore::in_memory();
        let t = Script::new(&[429, 429]);
        let client = LlmClient::new(config(3), &t, &store).unwrap();
        assert_eq!(client.complete(&ctx("r", 1), "p").unwrap().response_text, "done");
        assert_eq!(t.calls.load(Ordering::SeqCst), 3);
    }

    #[test]
    fn retries_exhausted() {
        let store = TranscriptStore::in_memory();
        let t = Script::new(&[429; 10]);
        let client = LlmClient::new(config(2), &t, &store).unwrap();
        assert_eq!(client.complete(&ctx("r", 1), "p"), Err(LlmError::RateLimited { attempts: 2 }));
        assert_eq!(t.calls.load(Ordering::SeqCst), 2);
        assert!(store.is_empty());
    }

    #[test]
    fn auth_is_not_retried() {
        let store = TranscriptStore::in_memory();
        let t = Script::new(&[401]);
        let client = LlmClient::new(config(5), &t, &store).unwrap();
        assert!(matches!(client.complete(&ctx("r", 1), "p"), Err(LlmError::AuthFailure(_))));
        assert_eq!(t.calls.load(Ordering::SeqCst), 1);
    }

    #[test]
    fn server_errors_and_timeouts() {
        let store = TranscriptStore::in_memory();
        let t = Script::new(&[503, 408]);
        let client = LlmClient::new(config(3), &t, &store).unwrap();
        assert!(client.complete(&ctx("r", 1), "p").is_ok());
        let t = Script::new(&[408, 408]);
        let client = LlmClient::new(config(2), &t, &store).unwrap();
        assert_eq!(client.complete(&ctx("s", 1), "p"), Err(LlmError::Timeout { attempts: 2 }));
    }

    #[test]
    fn precondition_failures_skip_the_network() {
        let store = TranscriptStore::in_memory();
        let t = Script::new(&[]);
        let client = LlmClient::new(config(1), &t, &store).unwrap();
        assert_eq!(client.complete(&ctx("r", 1), "  "), Err(LlmError::EmptyPrompt));
        client.complete(&ctx("r", 1), "p").unwrap();
        assert!(matches!(client.complete(&ctx("r", 1), "p"), Err(LlmError::DuplicateExchange { .. })));
        assert_eq!(t.calls.load(Ordering::SeqCst), 1);
    }

    struct Slow {
        now: AtomicUsize,
        peak: AtomicUsize,
    }

    impl Transport for Slow {
        fn send(&self, _: &ChatRequest, _: &ClientConfig) -> Result<HttpReply, TransportError> {
            let n = self.now.fetch_add(1, Ordering::SeqCst) + 1;
            self.peak.fetch_max(n, Ordering::SeqCst);
            std::thread::sleep(std::time::Duration::from_millis(5));
            self.now.fetch_sub(1, Ordering::SeqCst);
            Ok(HttpReply {
                status: 200,
                body: ok_body("x"),
            })
        }
    }

    #[test]
    fn in_flight_is_bounded() {
        let store = TranscriptStore::in_memory();
        let slow = Slow {
            now: AtomicUsize::new(0),
            peak: AtomicUsize::new(0),
        };
        let client = Arc::new(
            LlmClient::new(
                ClientConfig {
                    max_in_flight: 2,
                    ..config(1)
                },
                &slow,
                &store,
            )
            .unwrap(),
        );
        std::thread::scope(|s| {
            for i in 0..8 {
                let client = Arc::clone(&client);
                s.spawn(move || client.complete(&ctx(&format!("r{i}"), 1), "p").unwrap());
            }
        });
        assert_eq!(store.len(), 8);
        assert!(slow.peak.load(Ordering::SeqCst) <= 2);
    }
}
