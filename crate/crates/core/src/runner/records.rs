//! JSON-lines stream records.

use std::io::{self, BufRead};

use chrono::{DateTime, NaiveDate, NaiveDateTime};
use log::warn;
use serde::{Deserialize, Deserializer, Serialize};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Timestamp {
    Seconds(u64),
    /// ISO-8601 date or date-time; validated when the stream is read.
    Iso(String),
}

impl Default for Timestamp {
    fn default() -> Self {
        Timestamp::Seconds(0)
    }
}

impl Timestamp {
    /// Seconds since the Unix epoch; 0 for an unparseable string.
    pub fn seconds(&self) -> u64 {
        match self {
            Timestamp::Seconds(s) => *s,
            Timestamp::Iso(s) => parse_iso(s).unwrap_or(0),
        }
    }
}

fn parse_iso(s: &str) -> Option<u64> {
    let secs = if let Ok(t) = DateTime::parse_from_rfc3339(s) {
        t.timestamp()
    } else if let Ok(t) = NaiveDateTime::parse_from_str(s, "%Y-%m-%dT%H:%M:%S") {
        t.and_utc().timestamp()
    } else if let Ok(t) = NaiveDateTime::parse_from_str(s, "%Y-%m-%d %H:%M:%S") {
        t.and_utc().timestamp()
    } else {
        NaiveDate::parse_from_str(s, "%Y-%m-%d")
            .ok()?
            .and_hms_opt(0, 0, 0)?
            .and_utc()
            .timestamp()
    };
    u64::try_from(secs).ok()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StreamRecord {
    #[serde(deserialize_with = "string_or_number")]
    pub id: String,
    #[serde(default)]
    pub timestamp: Timestamp,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub title: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub snippet: Option<String>,
    #[serde(default)]
    pub text: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cluster_id: Option<String>,
}

impl StreamRecord {
    pub fn to_json_line(&self) -> String {
        serde_json::to_string(self).expect("stream records always serialize")
    }
}

fn string_or_number<'de, D: Deserializer<'de>>(d: D) -> Result<String, D::Error> {
    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Id {
        S(String),
        N(u64),
    }
    Ok(match Id::deserialize(d)? {
        Id::S(s) => s,
        Id::N(n) => n.to_string(),
    })
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct StreamInput {
    pub records: Vec<StreamRecord>,
    /// Malformed lines that were skipped.
    pub skipped: usize,
    /// Records whose timestamp is earlier than their predecessor's.
    pub out_of_order: usize,
}

/// Reads one record per line in file order. Malformed lines are skipped and
/// counted; timestamp regressions are logged but the order is kept.
pub fn read_stream<R: BufRead>(input: R) -> io::Result<StreamInput> {
    let mut out = StreamInput::default();
    let mut last = 0;
    for (i, line) in input.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let record: StreamRecord = match serde_json::from_str(&line) {
            Ok(r) => r,
            Err(e) => {
                warn!("line {}: skipping malformed record: {e}", i + 1);
                out.skipped += 1;
                continue;
            }
        };
        if let Timestamp::Iso(s) = &record.timestamp {
            if parse_iso(s).is_none() {
                warn!("line {}: skipping record with bad timestamp {s:?}", i + 1);
                out.skipped += 1;
                continue;
            }
        }
        let ts = record.timestamp.seconds();
        if ts < last {
            warn!("line {}: timestamp {ts} precedes {last}", i + 1);
            out.out_of_order += 1;
        }
        last = last.max(ts);
        out.records.push(record);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_both_timestamp_forms() {
        let input = r#"{"id": "a", "timestamp": 5, "text": "x"}
{"id": 7, "timestamp": "2013-05-01T10:00:00Z", "title": "t", "text": "y", "cluster_id": "c1"}
{"id": "c", "timestamp": "2013-05-02", "text": "z"}
"#;
        let s = read_stream(input.as_bytes()).unwrap();
        assert_eq!(s.records.len(), 3);
        assert_eq!(s.skipped, 0);
        assert_eq!(s.records[1].id, "7");
        assert_eq!(s.records[1].timestamp.seconds(), 1_367_402_400);
        assert_eq!(s.records[2].timestamp.seconds(), 1_367_452_800);
        assert_eq!(s.records[1].cluster_id.as_deref(), Some("c1"));
    }

    #[test]
    fn skips_malformed_lines_and_counts_regressions() {
        let input = r#"{"id": "a", "timestamp": 10, "text": "x"}
not json
{"id": "b", "timestamp": 3, "text": "y"}
{"timestamp": 4, "text": "no id"}
{"id": "c", "timestamp": "yesterday", "text": "z"}

{"id": "d", "timestamp": 11}
"#;
        let s = read_stream(input.as_bytes()).unwrap();
        let ids: Vec<&str> = s.records.iter().map(|r| r.id.as_str()).collect();
        assert_eq!(ids, ["a", "b", "d"]);
        assert_eq!(s.skipped, 3);
        assert_eq!(s.out_of_order, 1);
    }

    #[test]
    fn serializes_back_to_one_line() {
        let r = StreamRecord {
            id: "x".into(),
            timestamp: Timestamp::Seconds(3),
            title: None,
            snippet: None,
            text: "hello".into(),
            cluster_id: Some("c".into()),
        };
        let line = r.to_json_line();
        assert_eq!(line, r#"{"id":"x","timestamp":3,"text":"hello","cluster_id":"c"}"#);
        assert_eq!(serde_json::from_str::<StreamRecord>(&line).unwrap(), r);
    }
}
