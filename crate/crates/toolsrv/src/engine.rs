//! The session engine: rounds, cursors, call logs, and tool dispatch.

use std::collections::{BTreeSet, HashMap};
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::{Arc, Mutex, RwLock, TryLockError};
use std::time::Instant;

use serde_json::Value;
use store::{next_page, search, Embedder, PageResult, SearchCursor, VectorIndex, EXHAUSTED_MESSAGE};

use crate::tools::{tool_names, tool_schemas, ToolSetting};
use crate::wire::{
    codes, Limits, SchemaResponse, ToolOutcome, ToolResponse, Trace, TraceStep, WireDocument,
    WireError,
};

/// Default tool-round budget per session.
pub const MAX_ROUNDS: u32 = 50;

#[derive(Debug, Clone, Copy)]
pub struct EngineConfig {
    pub setting: ToolSetting,
    pub max_rounds: u32,
}

impl Default for EngineConfig {
    fn default() -> Self {
        Self {
            setting: ToolSetting::ZeroShot,
            max_rounds: MAX_ROUNDS,
        }
    }
}

struct Session {
    task_id: String,
    rounds_used: u32,
    active_cursor: Option<SearchCursor>,
    call_log: Vec<TraceStep>,
}

/// Serves one document index to any number of concurrent sessions. Calls on
/// a single session are serialized: an overlapping call gets a `busy` error.
pub struct Engine {
    index: VectorIndex,
    embedder: Arc<dyn Embedder>,
    task_ids: BTreeSet<String>,
    setting: ToolSetting,
    max_rounds: u32,
    sessions: RwLock<HashMap<String, Arc<Mutex<Session>>>>,
    next_id: AtomicU64,
}

impl Engine {
    pub fn new(
        index: VectorIndex,
        embedder: Arc<dyn Embedder>,
        task_ids: impl IntoIterator<Item = String>,
        config: EngineConfig,
    ) -> Self {
        Self {
            index,
            embedder,
            task_ids: task_ids.into_iter().collect(),
            setting: config.setting,
            max_rounds: config.max_rounds,
            sessions: RwLock::new(HashMap::new()),
            next_id: AtomicU64::new(0),
        }
    }

    pub fn setting(&self) -> ToolSetting {
        self.setting
    }

    pub fn document_count(&self) -> usize {
        self.index.len()
    }

    pub fn task_count(&self) -> usize {
        self.task_ids.len()
    }

    pub fn open_session(&self, task_id: &str) -> Result<String, WireError> {
        if !self.task_ids.contains(task_id) {
            return Err(WireError::new(
                codes::UNKNOWN_TASK,
                format!("unknown task `{task_id}`"),
            ));
        }
        let n = self.next_id.fetch_add(1, Ordering::Relaxed);
        let session_id = format!("sess-{n:06}");
        let session = Session {
            task_id: task_id.to_string(),
            rounds_used: 0,
            active_cursor: None,
            call_log: Vec::new(),
        };
        self.sessions
            .write()
            .unwrap_or_else(|e| e.into_inner())
            .insert(session_id.clone(), Arc::new(Mutex::new(session)));
        Ok(session_id)
    }

    /// Handles one tool request. Unknown-session and busy rejections happen
    /// before the session is touched; everything else consumes one round and
    /// is appended to the call log, except calls arriving after the round
    /// budget is spent, which get `limit_reached` and mutate nothing.
    pub fn call_tool(&self, session_id: &str, tool_name: &str, arguments: &Value) -> ToolResponse {
        let slot = self
            .sessions
            .read()
            .unwrap_or_else(|e| e.into_inner())
            .get(session_id)
            .cloned();
        let Some(slot) = slot else {
            return ToolResponse::failure(WireError::new(
                codes::UNKNOWN_SESSION,
                format!("unknown session `{session_id}`"),
            ));
        };
        let mut session = match slot.try_lock() {
            Ok(guard) => guard,
            Err(TryLockError::WouldBlock) => {
                return ToolResponse::failure(WireError::new(
                    codes::BUSY,
                    "a call is already in flight for this session",
                ));
            }
            Err(TryLockError::Poisoned(e)) => e.into_inner(),
        };
        if session.rounds_used >= self.max_rounds {
            return ToolResponse::success(ToolOutcome::LimitReached {
                message: format!(
                    "The limit of {} tool calls for this session has been reached.",
                    self.max_rounds
                ),
            });
        }

        let started = Instant::now();
        let dispatched = self.dispatch(&mut session, tool_name, arguments);
        let elapsed_ms = started.elapsed().as_millis() as u64;
        let (response, doc_ids, result_summary) = match dispatched {
            Ok((outcome, doc_ids)) => {
                let summary = match &outcome {
                    ToolOutcome::Results { .. } if tool_name == tool_names::THINK_TOOL => {
                        "echo".to_string()
                    }
                    ToolOutcome::Results { documents, .. } => {
                        format!("{} documents", documents.len())
                    }
                    ToolOutcome::Exhausted { .. } => "exhausted".to_string(),
                    ToolOutcome::LimitReached { .. } => "limit_reached".to_string(),
                };
                (ToolResponse::success(outcome), doc_ids, summary)
            }
            Err(error) => {
                let summary = format!("error: {}", error.code);
                (ToolResponse::failure(error), Vec::new(), summary)
            }
        };
        session.rounds_used += 1;
        let round = session.rounds_used;
        session.call_log.push(TraceStep {
            round,
            tool: tool_name.to_string(),
            arguments: arguments.clone(),
            result_summary,
            doc_ids,
            elapsed_ms,
        });
        response
    }

    pub fn export_trace(&self, session_id: &str) -> Result<Trace, WireError> {
        let slot = self
            .sessions
            .read()
            .unwrap_or_else(|e| e.into_inner())
            .get(session_id)
            .cloned();
        let Some(slot) = slot else {
            return Err(WireError::new(
                codes::UNKNOWN_SESSION,
                format!("unknown session `{session_id}`"),
            ));
        };
        let session = slot.lock().unwrap_or_else(|e| e.into_inner());
        Ok(Trace {
            session_id: session_id.to_string(),
            task_id: session.task_id.clone(),
            rounds_used: session.rounds_used,
            steps: session.call_log.clone(),
        })
    }

    pub fn schema(&self) -> SchemaResponse {
        SchemaResponse {
            setting: self.setting.name().to_string(),
            tools: tool_schemas(self.setting),
            limits: Limits {
                max_rounds: self.max_rounds,
                max_next_pages: store::MAX_NEXT_PAGES as u32,
                page_size: store::PAGE_SIZE as u32,
            },
        }
    }

    /// Ids of every session opened so far, sorted. Lets an embedding
    /// process export all traces, e.g. when flushing on shutdown.
    pub fn session_ids(&self) -> Vec<String> {
        let mut ids: Vec<String> = self
            .sessions
            .read()
            .unwrap_or_else(|e| e.into_inner())
            .keys()
            .cloned()
            .collect();
        ids.sort();
        ids
    }

    fn dispatch(
        &self,
        session: &mut Session,
        tool_name: &str,
        args: &Value,
    ) -> Result<(ToolOutcome, Vec<String>), WireError> {
        if !self.setting.is_enabled(tool_name) {
            return Err(WireError::new(
                codes::UNKNOWN_TOOL,
                format!("unknown tool `{tool_name}`"),
            ));
        }
        match tool_name {
            tool_names::SEARCH_INFORMATION => {
                let query = required_str(args, "query")?;
                self.run_search(session, query)
            }
            tool_names::EXPLORE => {
                required_str(args, "new_explore_topic")?;
                required_str(args, "reasoning")?;
                let query = required_str(args, "query")?;
                self.run_search(session, query)
            }
            tool_names::REVISIT => {
                required_str(args, "revisit_topic")?;
                required_str(args, "reasoning")?;
                let query = required_str(args, "new_query")?;
                self.run_search(session, query)
            }
            tool_names::NEXT_PAGE => self.run_next_page(session),
            tool_names::THINK_TOOL => {
                let thought = required_str(args, "thought")?;
                Ok((
                    ToolOutcome::Results {
                        documents: Vec::new(),
                        text: thought.to_string(),
                    },
                    Vec::new(),
                ))
            }
            other => unreachable!("tool `{other}` passed the enabled filter"),
        }
    }

    fn run_search(
        &self,
        session: &mut Session,
        query: &str,
    ) -> Result<(ToolOutcome, Vec<String>), WireError> {
        match search(&self.index, query, self.embedder.as_ref()) {
            Ok((documents, cursor)) => {
                session.active_cursor = Some(cursor);
                let doc_ids: Vec<String> = documents.iter().map(|d| d.doc_id.clone()).collect();
                let documents = documents.iter().map(WireDocument::from).collect();
                Ok((
                    ToolOutcome::Results {
                        documents,
                        text: String::new(),
                    },
                    doc_ids,
                ))
            }
            Err(store::StoreError::EmptyQuery) => {
                Err(WireError::new(codes::EMPTY_QUERY, "empty query"))
            }
            Err(other) => Err(WireError::new(codes::INTERNAL, other.to_string())),
        }
    }

    fn run_next_page(&self, session: &mut Session) -> Result<(ToolOutcome, Vec<String>), WireError> {
        let Some(cursor) = session.active_cursor.as_ref() else {
            return Err(WireError::new(codes::NO_ACTIVE_SEARCH, "no active search"));
        };
        match next_page(&self.index, cursor) {
            Ok(PageResult::Page { documents, cursor }) => {
                session.active_cursor = Some(cursor);
                let doc_ids: Vec<String> = documents.iter().map(|d| d.doc_id.clone()).collect();
                let documents = documents.iter().map(WireDocument::from).collect();
                Ok((
                    ToolOutcome::Results {
                        documents,
                        text: String::new(),
                    },
                    doc_ids,
                ))
            }
            Ok(PageResult::Exhausted) => Ok((
                ToolOutcome::Exhausted {
                    message: EXHAUSTED_MESSAGE.to_string(),
                },
                Vec::new(),
            )),
            Err(other) => Err(WireError::new(codes::INTERNAL, other.to_string())),
        }
    }
}

fn required_str<'a>(args: &'a Value, key: &str) -> Result<&'a str, WireError> {
    args.get(key).and_then(Value::as_str).ok_or_else(|| {
        WireError::new(
            codes::BAD_ARGUMENTS,
            format!("missing string argument `{key}`"),
        )
    })
}
