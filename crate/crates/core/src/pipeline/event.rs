use std::collections::HashMap;
use std::sync::Mutex;

use thiserror::Error;

use crate::invariant::{Coord, Tick};
use crate::lineproto::{parse_int, push_field, tokenize};

/// A timestamped occurrence reported by a device or a person.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct EventRecord {
    pub id: String,
    pub source: String,
    pub timestamp: Tick,
    pub category: String,
    /// 0 (info) to 3 (critical).
    pub severity: u8,
    pub payload: Vec<(String, String)>,
}

impl EventRecord {
    pub fn payload_value(&self, key: &str) -> Option<&str> {
        self.payload
            .iter()
            .find(|(k, _)| k == key)
            .map(|(_, v)| v.as_str())
    }

    /// Grid location from the `x`/`y` payload fields.
    pub fn location(&self) -> Option<(Coord, Coord)> {
        let x = self.payload_value("x")?.parse().ok()?;
        let y = self.payload_value("y")?.parse().ok()?;
        Some((x, y))
    }

    /// The wire form of the record, without its id.
    pub fn to_line(&self) -> String {
        let mut out = String::from("evt");
        push_field(&mut out, "src", &self.source);
        push_field(&mut out, "t", &self.timestamp.to_string());
        push_field(&mut out, "cat", &self.category);
        push_field(&mut out, "sev", &self.severity.to_string());
        for (k, v) in &self.payload {
            push_field(&mut out, k, v);
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("malformed event: {0}")]
pub struct MalformedEvent(pub String);

fn malformed(reason: impl Into<String>) -> MalformedEvent {
    MalformedEvent(reason.into())
}

const RESERVED: [&str; 4] = ["src", "t", "cat", "sev"];

/// Parses `evt src=<id> t=<int> cat=<word> [sev=<0-3>] [key="value"]...`.
///
/// The record's id is `<source>-<sequence>`. Severity defaults to 1.
pub fn parse_event_line(line: &str, sequence: u64) -> Result<EventRecord, MalformedEvent> {
    let mut e = parse_unnumbered(line)?;
    e.id = format!("{}-{sequence}", e.source);
    Ok(e)
}

fn parse_unnumbered(line: &str) -> Result<EventRecord, MalformedEvent> {
    if line.contains('\n') {
        return Err(malformed("embedded newline"));
    }
    let rec = tokenize(line).map_err(|e| malformed(e.0))?;
    if rec.kind != "evt" {
        return Err(malformed(format!("expected 'evt', found {:?}", rec.kind)));
    }
    for key in RESERVED {
        if rec.all(key).count() > 1 {
            return Err(malformed(format!("duplicate {key}")));
        }
    }
    let source = rec.get("src").ok_or_else(|| malformed("missing src"))?;
    if source.is_empty() || source.contains(char::is_whitespace) {
        return Err(malformed("bad src"));
    }
    let timestamp = parse_int("t", rec.get("t").ok_or_else(|| malformed("missing t"))?)
        .map_err(|e| malformed(e.0))?;
    let category = rec.get("cat").ok_or_else(|| malformed("missing cat"))?;
    if category.is_empty()
        || !category
            .chars()
            .all(|c| c.is_ascii_alphanumeric() || c == '-' || c == '_')
    {
        return Err(malformed(format!("bad cat {category:?}")));
    }
    let severity = match rec.get("sev") {
        None => 1,
        Some(s) => match s.parse::<u8>() {
            Ok(v) if v <= 3 => v,
            _ => return Err(malformed(format!("sev out of range: {s:?}"))),
        },
    };
    let payload = rec
        .fields
        .iter()
        .filter(|(k, _)| !RESERVED.contains(&k.as_str()))
        .cloned()
        .collect();
    Ok(EventRecord {
        id: String::new(),
        source: source.to_string(),
        timestamp,
        category: category.to_string(),
        severity,
        payload,
    })
}

/// Assigns per-source sequence numbers to incoming lines. Shared by all
/// listener threads of a run.
#[derive(Debug, Default)]
pub struct Intake {
    sequences: Mutex<HashMap<String, u64>>,
}

impl Intake {
    pub fn new() -> Self {
        Intake::default()
    }

    pub fn accept(&self, line: &str) -> Result<EventRecord, MalformedEvent> {
        let mut e = parse_unnumbered(line)?;
        let seq = {
            let mut seqs = self.sequences.lock().unwrap_or_else(|p| p.into_inner());
            let n = seqs.entry(e.source.clone()).or_insert(0);
            *n += 1;
            *n
        };
        e.id = format!("{}-{seq}", e.source);
        Ok(e)
    }
}
