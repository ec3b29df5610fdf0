//! Stateless chat-completion client with a record/replay transcript store.
//!
//! Every live exchange is appended to a JSON Lines transcript before the
//! caller sees it. Replay reads the same file and never touches the network.

mod client;
mod config;
#[cfg(feature = "http")]
mod http;
mod store;

pub use client::{ChatMessage, ChatRequest, HttpReply, LlmClient, RunContext, Transport, TransportError};
pub use config::{ClientConfig, RetryPolicy, API_KEY_ENV};
#[cfg(feature = "http")]
pub use http::HttpTransport;
pub use store::{replay, LlmExchange, TranscriptStore};

use std::sync::atomic::{AtomicUsize, Ordering};

static HTTP_REQUESTS: AtomicUsize = AtomicUsize::new(0);

/// Number of HTTP requests this process has attempted so far.
pub fn http_requests_attempted() -> usize {
    HTTP_REQUESTS.load(Ordering::SeqCst)
}

#[cfg_attr(not(feature = "http"), allow(dead_code))]
pub(crate) fn note_http_request() {
    HTTP_REQUESTS.fetch_add(1, Ordering::SeqCst);
}

/// Conventional run id: `{task}/{variant}/{item}`.
pub fn run_id(task: crate::BpmTask, variant_id: &str, item_id: &str) -> String {
    format!("{task}/{variant_id}/{item_id}")
}

#[derive(Debug, thiserror::Error, Clone, PartialEq, Eq)]
pub enum LlmError {
    #[error("request timed out after {attempts} attempt(s)")]
    Timeout { attempts: u32 },
    #[error("rate limited after {attempts} attempt(s)")]
    RateLimited { attempts: u32 },
    #[error("authentication failed: {0}")]
    AuthFailure(String),
    #[error("transport failure: {0}")]
    TransportFailure(String),
    #[error("no recorded exchange for run `{run_id}` try {try_index}")]
    FixtureMiss { run_id: String, try_index: u32 },
    #[error("prompt is empty")]
    EmptyPrompt,
    #[error("run `{run_id}` try {try_index} is already recorded")]
    DuplicateExchange { run_id: String, try_index: u32 },
    #[error("transcript store: {0}")]
    Store(String),
    #[error("invalid client configuration: {0}")]
    InvalidConfig(String),
}
