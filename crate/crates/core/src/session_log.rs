//! Raw post-editing session logs.
//!
//! A session log is a line-delimited JSON stream: one header record followed by
//! one record per keyboard/mouse event. Offsets are counted in Unicode scalar
//! values over the MT segments joined by a single `'\n'`.

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LogError {
    #[error("malformed record at line {line}: {reason}")]
    MalformedRecord { line: usize, reason: String },
    #[error("non-monotonic time at line {line}: t={t} follows t={prev}")]
    NonMonotonicTime { line: usize, prev: u64, t: u64 },
    #[error("event {index} out of bounds: pos={pos} len={len} in a document of {doc_len} chars")]
    OutOfBoundsEdit {
        index: usize,
        pos: usize,
        len: usize,
        doc_len: usize,
    },
    #[error("event {index} would add or remove a segment boundary")]
    CrossSegmentEdit { index: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum EventKind {
    InsertText,
    DeleteText,
    MouseClick,
    MouseSelect,
}

impl EventKind {
    pub fn is_mouse(self) -> bool {
        matches!(self, EventKind::MouseClick | EventKind::MouseSelect)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawEvent {
    /// Milliseconds since session start.
    pub t: u64,
    pub kind: EventKind,
    pub pos: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub len: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub text: Option<String>,
}

impl RawEvent {
    pub fn insert(t: u64, pos: usize, text: impl Into<String>) -> Self {
        RawEvent {
            t,
            kind: EventKind::InsertText,
            pos,
            len: None,
            text: Some(text.into()),
        }
    }

    pub fn delete(t: u64, pos: usize, len: usize) -> Self {
        RawEvent {
            t,
            kind: EventKind::DeleteText,
            pos,
            len: Some(len),
            text: None,
        }
    }

    pub fn click(t: u64, pos: usize) -> Self {
        RawEvent {
            t,
            kind: EventKind::MouseClick,
            pos,
            len: None,
            text: None,
        }
    }

    pub fn select(t: u64, pos: usize, len: usize) -> Self {
        RawEvent {
            t,
            kind: EventKind::MouseSelect,
            pos,
            len: Some(len),
            text: None,
        }
    }

    /// Character span touched by the event, `pos..pos+len` (empty for inserts and clicks).
    pub fn span_len(&self) -> usize {
        self.len.unwrap_or(0)
    }

    fn check_shape(&self) -> Result<(), String> {
        match self.kind {
            EventKind::InsertText => {
                if self.len.is_some() {
                    return Err("INSERT_TEXT must not carry len".into());
                }
                match &self.text {
                    Some(t) if !t.is_empty() => Ok(()),
                    _ => Err("INSERT_TEXT requires non-empty text".into()),
                }
            }
            EventKind::DeleteText | EventKind::MouseSelect => {
                if self.text.is_some() {
                    return Err(format!("{:?} must not carry text", self.kind));
                }
                match self.len {
                    Some(l) if l >= 1 => Ok(()),
                    _ => Err(format!("{:?} requires len >= 1", self.kind)),
                }
            }
            EventKind::MouseClick => {
                if self.text.is_some() || self.len.is_some() {
                    Err("MOUSE_CLICK carries neither len nor text".into())
                } else {
                    Ok(())
                }
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct Header {
    doc_id: String,
    editor_id: String,
    lang_pair: String,
    source_segments: Vec<String>,
    mt_segments: Vec<String>,
    end_t: u64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SessionLog {
    pub doc_id: String,
    pub editor_id: String,
    pub lang_pair: String,
    pub source_segments: Vec<String>,
    pub mt_segments: Vec<String>,
    pub events: Vec<RawEvent>,
    /// Session end in milliseconds.
    pub end_t: u64,
}

/// Mutable character buffer holding the current state of the document.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TextBuffer {
    chars: Vec<char>,
}

impl TextBuffer {
    pub fn from_segments<S: AsRef<str>>(segments: &[S]) -> Self {
        let mut chars = Vec::new();
        for (i, s) in segments.iter().enumerate() {
            if i > 0 {
                chars.push('\n');
            }
            chars.extend(s.as_ref().chars());
        }
        TextBuffer { chars }
    }

    pub fn len(&self) -> usize {
        self.chars.len()
    }

    pub fn is_empty(&self) -> bool {
        self.chars.is_empty()
    }

    pub fn chars(&self) -> &[char] {
        &self.chars
    }

    pub fn text(&self) -> String {
        self.chars.iter().collect()
    }

    /// Segment index and segment-relative offset of an absolute position.
    pub fn locate(&self, pos: usize) -> (usize, usize) {
        let mut seg = 0;
        let mut start = 0;
        for (i, &c) in self.chars[..pos.min(self.chars.len())].iter().enumerate() {
            if c == '\n' {
                seg += 1;
                start = i + 1;
            }
        }
        (seg, pos - start)
    }

    /// Text of segment `seg`.
    pub fn segment(&self, seg: usize) -> String {
        self.segment_chars(seg).iter().collect()
    }

    pub fn segment_chars(&self, seg: usize) -> &[char] {
        let mut cur = 0;
        let mut start = 0;
        for (i, &c) in self.chars.iter().enumerate() {
            if c == '\n' {
                if cur == seg {
                    return &self.chars[start..i];
                }
                cur += 1;
                start = i + 1;
            }
        }
        if cur == seg {
            &self.chars[start..]
        } else {
            &[]
        }
    }

    pub fn segments(&self) -> Vec<String> {
        self.text().split('\n').map(str::to_owned).collect()
    }

    /// Checks bounds for event `index` without modifying the buffer.
    pub fn check(&self, ev: &RawEvent, index: usize) -> Result<(), LogError> {
        let n = self.chars.len();
        let len = ev.span_len();
        let oob = || LogError::OutOfBoundsEdit {
            index,
            pos: ev.pos,
            len,
            doc_len: n,
        };
        if ev.pos > n || ev.pos + len > n {
            return Err(oob());
        }
        match ev.kind {
            EventKind::InsertText => {
                if ev.text.as_deref().unwrap_or("").contains('\n') {
                    return Err(LogError::CrossSegmentEdit { index });
                }
            }
            EventKind::DeleteText => {
                if self.chars[ev.pos..ev.pos + len].contains(&'\n') {
                    return Err(LogError::CrossSegmentEdit { index });
                }
            }
            EventKind::MouseClick | EventKind::MouseSelect => {}
        }
        Ok(())
    }

    /// Applies one event; mouse events leave the text unchanged.
    pub fn apply(&mut self, ev: &RawEvent, index: usize) -> Result<(), LogError> {
        self.check(ev, index)?;
        match ev.kind {
            EventKind::InsertText => {
                let text = ev.text.as_deref().unwrap_or("");
                let tail = self.chars.split_off(ev.pos);
                self.chars.extend(text.chars());
                self.chars.extend(tail);
            }
            EventKind::DeleteText => {
                self.chars.drain(ev.pos..ev.pos + ev.span_len());
            }
            EventKind::MouseClick | EventKind::MouseSelect => {}
        }
        Ok(())
    }
}

impl SessionLog {
    /// Checks every invariant, replaying the events against the MT text.
    pub fn validate(&self) -> Result<(), LogError> {
        let header_err = |reason: &str| LogError::MalformedRecord {
            line: 1,
            reason: reason.to_owned(),
        };
        if self.mt_segments.is_empty() {
            return Err(header_err("mt_segments must be non-empty"));
        }
        if self.source_segments.len() != self.mt_segments.len() {
            return Err(header_err("source_segments and mt_segments differ in length"));
        }
        if self
            .mt_segments
            .iter()
            .chain(&self.source_segments)
            .any(|s| s.contains('\n'))
        {
            return Err(header_err("segments must not contain newlines"));
        }
        let mut prev = 0u64;
        for (i, ev) in self.events.iter().enumerate() {
            ev.check_shape().map_err(|reason| LogError::MalformedRecord {
                line: i + 2,
                reason,
            })?;
            if ev.t < prev {
                return Err(LogError::NonMonotonicTime {
                    line: i + 2,
                    prev,
                    t: ev.t,
                });
            }
            prev = ev.t;
        }
        if self.end_t < prev {
            return Err(header_err("end_t precedes the last event"));
        }
        self.final_document().map(|_| ())
    }

    /// Replays every edit on the joined MT text and returns the post-edited document.
    pub fn final_document(&self) -> Result<String, LogError> {
        let mut buf = TextBuffer::from_segments(&self.mt_segments);
        for (i, ev) in self.events.iter().enumerate() {
            buf.apply(ev, i)?;
        }
        Ok(buf.text())
    }

    pub fn mt_text(&self) -> String {
        self.mt_segments.join("\n")
    }

    /// Canonical line-delimited serialization; parsing it back is byte-identical.
    pub fn to_jsonl(&self) -> String {
        let header = Header {
            doc_id: self.doc_id.clone(),
            editor_id: self.editor_id.clone(),
            lang_pair: self.lang_pair.clone(),
            source_segments: self.source_segments.clone(),
            mt_segments: self.mt_segments.clone(),
            end_t: self.end_t,
        };
        let mut out = serde_json::to_string(&header).expect("header serializes");
        out.push('\n');
        for ev in &self.events {
            out.push_str(&serde_json::to_string(ev).expect("event serializes"));
            out.push('\n');
        }
        out
    }
}

/// Parses and validates one session from its line-delimited form.
pub fn parse_session_log(input: &[u8]) -> Result<SessionLog, LogError> {
    let text = std::str::from_utf8(input).map_err(|e| LogError::MalformedRecord {
        line: 0,
        reason: format!("invalid UTF-8: {e}"),
    })?;
    let mut lines = text
        .lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty());
    let (_, first) = lines.next().ok_or_else(|| LogError::MalformedRecord {
        line: 1,
        reason: "empty stream, expected a header record".into(),
    })?;
    let header: Header = serde_json::from_str(first).map_err(|e| LogError::MalformedRecord {
        line: 1,
        reason: e.to_string(),
    })?;
    let mut events = Vec::new();
    for (idx, line) in lines {
        let ev: RawEvent = serde_json::from_str(line).map_err(|e| LogError::MalformedRecord {
            line: idx + 1,
            reason: e.to_string(),
        })?;
        events.push(ev);
    }
    let log = SessionLog {
        doc_id: header.doc_id,
        editor_id: header.editor_id,
        lang_pair: header.lang_pair,
        source_segments: header.source_segments,
        mt_segments: header.mt_segments,
        events,
        end_t: header.end_t,
    };
    log.validate()?;
    Ok(log)
}

pub fn final_document(log: &SessionLog) -> Result<String, LogError> {
    log.final_document()
}
