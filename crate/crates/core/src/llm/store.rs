use super::LlmError;
use crate::BpmTask;
use serde::{Deserialize, Serialize};
use std::collections::HashMap;
use std::fs::{File, OpenOptions};
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};
use std::sync::Mutex;

/// One recorded request/response pair. `response_text` is stored verbatim.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LlmExchange {
    pub run_id: String,
    pub task: BpmTask,
    pub variant_id: String,
    pub try_index: u32,
    pub model_name: String,
    pub temperature: f64,
    pub prompt_text: String,
    pub response_text: String,
    /// RFC 3339.
    pub created_at: String,
}

impl LlmExchange {
    pub fn key(&self) -> (String, u32) {
        (self.run_id.clone(), self.try_index)
    }
}

#[derive(Debug, Default)]
struct Inner {
    file: Option<File>,
    exchanges: Vec<LlmExchange>,
    index: HashMap<(String, u32), usize>,
}

/// JSON Lines transcript keyed by `(run_id, try_index)`. Appends are
/// serialized and synced to disk before they return.
#[derive(Debug)]
pub struct TranscriptStore {
    path: Option<PathBuf>,
    writable: bool,
    inner: Mutex<Inner>,
}

fn read_exchanges(path: &Path) -> Result<Vec<LlmExchange>, LlmError> {
    let file = File::open(path).map_err(|e| LlmError::Store(format!("{}: {e}", path.display())))?;
    let mut out = Vec::new();
    for (i, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(|e| LlmError::Store(format!("{}: {e}", path.display())))?;
        if line.trim().is_empty() {
            continue;
        }
        let ex = serde_json::from_str(&line)
            .map_err(|e| LlmError::Store(format!("{}:{}: {e}", path.display(), i + 1)))?;
        out.push(ex);
    }
    Ok(out)
}

impl TranscriptStore {
    pub fn in_memory() -> Self {
        TranscriptStore {
            path: None,
            writable: true,
            inner: Mutex::new(Inner::default()),
        }
    }

    /// Read-only view of an existing transcript.
    pub fn load(path: impl AsRef<Path>) -> Result<Self, LlmError> {
        let path = path.as_ref();
        let store = TranscriptStore {
            path: Some(path.to_path_buf()),
            writable: false,
            inner: Mutex::new(Inner::default()),
        };
        store.ingest(read_exchanges(path)?)?;
        Ok(store)
    }

    /// Open for appending, creating the file if needed.
    pub fn open(path: impl AsRef<Path>) -> Result<Self, LlmError> {
        let path = path.as_ref();
        let existing = if path.exists() {
            read_exchanges(path)?
        } else {
            Vec::new()
        };
        let file = OpenOptions::new()
            .create(true)
            .append(true)
            .open(path)
            .map_err(|e| LlmError::Store(format!("{}: {e}", path.display())))?;
        let store = TranscriptStore {
            path: Some(path.to_path_buf()),
            writable: true,
            inner: Mutex::new(Inner {
                file: Some(file),
                ..Inner::default()
            }),
        };
        store.ingest(existing)?;
        Ok(store)
    }

    fn ingest(&self, exchanges: Vec<LlmExchange>) -> Result<(), LlmError> {
        let mut inner = self.inner.lock().expect("store lock");
        for ex in exchanges {
            let key = ex.key();
            if inner.index.contains_key(&key) {
                return Err(LlmError::DuplicateExchange {
                    run_id: key.0,
                    try_index: key.1,
                });
            }
            let n = inner.exchanges.len();
            inner.index.insert(key, n);
            inner.exchanges.push(ex);
        }
        Ok(())
    }

    pub fn path(&self) -> Option<&Path> {
        self.path.as_deref()
    }

    pub fn contains(&self, run_id: &str, try_index: u32) -> bool {
        let inner = self.inner.lock().expect("store lock");
        inner.index.contains_key(&(run_id.to_string(), try_index))
    }

    pub fn get(&self, run_id: &str, try_index: u32) -> Option<LlmExchange> {
        let inner = self.inner.lock().expect("store lock");
        inner
            .index
            .get(&(run_id.to_string(), try_index))
            .map(|i| inner.exchanges[*i].clone())
    }

    pub fn exchanges(&self) -> Vec<LlmExchange> {
        self.inner.lock().expect("store lock").exchanges.clone()
    }

    pub fn len(&self) -> usize {
        self.inner.lock().expect("store lock").exchanges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn append(&self, ex: &LlmExchange) -> Result<(), LlmError> {
        if !self.writable {
            return Err(LlmError::Store("transcript was loaded read-only".into()));
        }
        let mut inner = self.inner.lock().expect("store lock");
        let key = ex.key();
        if inner.index.contains_key(&key) {
            return Err(LlmError::DuplicateExchange {
                run_id: key.0,
                try_index: key.1,
            });
        }
        if let Some(file) = inner.file.as_mut() {
            let mut line = serde_json::to_string(ex).map_err(|e| LlmError::Store(e.to_string()))?;
            line.push('\n');
            file.write_all(line.as_bytes())
                .and_then(|_| file.flush())
                .and_then(|_| file.sync_data())
                .map_err(|e| LlmError::Store(e.to_string()))?;
        }
        let n = inner.exchanges.len();
        inner.index.insert(key, n);
        inner.exchanges.push(ex.clone());
        Ok(())
    }
}

/// Look up a recorded exchange without any network access.
pub fn replay(store: &TranscriptStore, run_id: &str, try_index: u32) -> Result<LlmExchange, LlmError> {
    store.get(run_id, try_index).ok_or_else(|| LlmError::FixtureMiss {
        run_id: run_id.to_string(),
        try_index,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn exchange(run_id: &str, try_index: u32, response: &str) -> LlmExchange {
        LlmExchange {
            run_id: run_id.into(),
            task: BpmTask::Ltl,
            variant_id: "original".into(),
            try_index,
            model_name: "m".into(),
            temperature: 1.0,
            prompt_text: "p".into(),
            response_text: response.into(),
            created_at: "2024-01-01T00:00:00Z".into(),
        }
    }

    #[test]
    fn append_then_reload() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("t.jsonl");
        {
            let store = TranscriptStore::open(&path).unwrap();
            store.append(&exchange("ltl/original/s1", 1, "  START -> a\n")).unwrap();
            store.append(&exchange("ltl/original/s1", 2, "x")).unwrap();
            assert!(matches!(
                store.append(&exchange("ltl/original/s1", 2, "y")),
                Err(LlmError::DuplicateExchange { .. })
            ));
        }
        let store = TranscriptStore::load(&path).unwrap();
        assert_eq!(store.len(), 2);
        let ex = replay(&store, "ltl/original/s1", 1).unwrap();
        assert_eq!(ex.response_text, "  START -> a\n");
        assert_eq!(replay(&store, "ltl/original/s1", 1).unwrap(), ex);
        assert_eq!(
            replay(&store, "ltl/original/s9", 1),
            Err(LlmError::FixtureMiss {
                run_id: "ltl/original/s9".into(),
                try_index: 1
            })
        );
        assert!(store.append(&exchange("z", 1, "")).is_err());
    }

    #[test]
    fn corrupt_line_names_position() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("t.jsonl");
        std::fs::write(&path, "{\"run_id\": 3}\n").unwrap();
        let err = TranscriptStore::load(&path).unwrap_err();
        assert!(err.to_string().contains("t.jsonl:1"), "{err}");
    }
}
