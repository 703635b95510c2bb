//! Append-only JSON-lines event stream shared by every protocol driver.

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::hashing::{sha256, to_hex};
use crate::ledger::EntityId;

/// One transcript line. `actor` is an entity id (`P3`, `X1`), `escrow`, or `channel`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Event {
    pub height: u64,
    pub actor: String,
    pub event: String,
    pub payload_digest: String,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub ledger_delta: Vec<(EntityId, i64)>,
    #[serde(default, skip_serializing_if = "Value::is_null")]
    pub detail: Value,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Transcript {
    events: Vec<Event>,
}

impl Transcript {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, height: u64, actor: impl Into<String>, event: &str, payload: &[u8], detail: Value) {
        self.events.push(Event {
            height,
            actor: actor.into(),
            event: event.to_string(),
            payload_digest: to_hex(&sha256(payload)),
            ledger_delta: Vec::new(),
            detail,
        });
    }

    pub fn push_ledger(
        &mut self,
        height: u64,
        event: &str,
        delta: Vec<(EntityId, i64)>,
        detail: Value,
    ) {
        let payload = serde_json::to_vec(&delta).expect("ledger deltas serialize");
        self.events.push(Event {
            height,
            actor: "escrow".to_string(),
            event: event.to_string(),
            payload_digest: to_hex(&sha256(&payload)),
            ledger_delta: delta,
            detail,
        });
    }

    pub fn extend(&mut self, other: Transcript) {
        self.events.extend(other.events);
    }

    pub fn events(&self) -> &[Event] {
        &self.events
    }

    pub fn len(&self) -> usize {
        self.events.len()
    }

    pub fn is_empty(&self) -> bool {
        self.events.is_empty()
    }

    pub fn find(&self, event: &str) -> impl Iterator<Item = &Event> {
        let event = event.to_string();
        self.events.iter().filter(move |e| e.event == event)
    }

    pub fn to_jsonl(&self) -> String {
        let mut out = String::new();
        for e in &self.events {
            out.push_str(&serde_json::to_string(e).expect("events serialize"));
            out.push('\n');
        }
        out
    }
}
