//! Compiles raw keyboard/mouse events into the word-level action alphabet.
//!
//! Consecutive keystrokes on one word coalesce into a single `R`/`I`/`D` whose
//! argument is the word's final form. A pending single-word edit is committed
//! when an input event targets a different word, when a mouse event occurs, or
//! at session end. A single event that changes two or more words becomes its
//! own `BD`/`BI` group. Each committed edit is emitted as
//! `W MC? MS? (JSF|JSB)? (JF|JB)? edit`, and the session ends with
//! `W MC? MS? S`.

use crate::session_log::{EventKind, LogError, RawEvent, SessionLog, TextBuffer};

use super::diff::{hint_token, word_diff, WordEdit};
use super::tokenize::{tokenize_spans, Token};
use super::{Action, ActionRecord};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum WordState {
    Present,
    Gone,
}

#[derive(Debug, Clone)]
struct Pending {
    sentence: usize,
    word: Option<usize>,
    state: WordState,
    snapshot: Vec<String>,
    begin: u64,
    first_event: usize,
}

#[derive(Debug, Clone)]
struct Group {
    begin: u64,
    first_event: usize,
    clicks: u32,
    selections: u32,
    sentence: usize,
    /// 0-based word index in its sentence.
    word: usize,
    actions: Vec<Action>,
}

/// Per-session result: the sequence plus the metadata columns of its record.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Extraction {
    pub record: ActionRecord,
}

struct Extractor<'a> {
    log: &'a SessionLog,
    buf: TextBuffer,
    sentences: Vec<Vec<String>>,
    pending: Option<Pending>,
    groups: Vec<Group>,
    clicks: u32,
    selections: u32,
}

fn texts(spans: &[Token]) -> Vec<String> {
    spans.iter().map(|t| t.text.clone()).collect()
}

impl<'a> Extractor<'a> {
    fn new(log: &'a SessionLog) -> Self {
        let buf = TextBuffer::from_segments(&log.mt_segments);
        let sentences = (0..log.mt_segments.len())
            .map(|s| texts(&tokenize_spans(buf.segment_chars(s))))
            .collect();
        Extractor {
            log,
            buf,
            sentences,
            pending: None,
            groups: Vec::new(),
            clicks: 0,
            selections: 0,
        }
    }

    fn push_group(&mut self, begin: u64, first_event: usize, sentence: usize, edit: &WordEdit) {
        self.groups.push(Group {
            begin,
            first_event,
            clicks: self.clicks,
            selections: self.selections,
            sentence,
            word: edit.pos() - 1,
            actions: edit.to_actions(),
        });
        self.clicks = 0;
        self.selections = 0;
    }

    fn commit(&mut self) {
        let Some(p) = self.pending.take() else {
            return;
        };
        let current = &self.sentences[p.sentence];
        if let Ok(edit) = word_diff(&p.snapshot, current, p.word.unwrap_or(0)) {
            self.push_group(p.begin, p.first_event, p.sentence, &edit);
        }
    }

    fn run(mut self) -> Result<Vec<Action>, LogError> {
        let events = &self.log.events;
        let mut i = 0;
        while i < events.len() {
            let ev = &events[i];
            if ev.kind.is_mouse() {
                self.buf.check(ev, i)?;
                self.commit();
                match ev.kind {
                    EventKind::MouseClick => self.clicks += 1,
                    _ => self.selections += 1,
                }
                i += 1;
                continue;
            }
            let (seg, rel) = self.buf.locate(ev.pos);
            let spans = tokenize_spans(self.buf.segment_chars(seg));
            let before = texts(&spans);
            let hint = hint_token(&spans, rel..rel + ev.span_len());
            self.buf.apply(ev, i)?;
            let mut after = texts(&tokenize_spans(self.buf.segment_chars(seg)));
            let mut diff = word_diff(&before, &after, hint);

            // A multi-word deletion directly followed by an insert at the same
            // offset is a selection-replacing paste: one BD+BI group.
            let mut consumed = 1;
            if let (Ok(WordEdit::Block { .. }), Some(next)) = (&diff, events.get(i + 1)) {
                if ev.kind == EventKind::DeleteText
                    && next.kind == EventKind::InsertText
                    && next.pos == ev.pos
                {
                    self.buf.apply(next, i + 1)?;
                    after = texts(&tokenize_spans(self.buf.segment_chars(seg)));
                    diff = word_diff(&before, &after, hint);
                    consumed = 2;
                }
            }
            // pending edits are committed against the pre-event state
            match diff {
                Err(_) => {
                    if self.pending.is_none() {
                        self.pending = Some(Pending {
                            sentence: seg,
                            word: None,
                            state: WordState::Present,
                            snapshot: before,
                            begin: ev.t,
                            first_event: i,
                        });
                    }
                }
                Ok(edit) if edit.is_block() => {
                    self.commit();
                    self.push_group(ev.t, i, seg, &edit);
                }
                Ok(edit) => {
                    let k = edit.pos() - 1;
                    if !self.continues(seg, k, &edit) {
                        self.commit();
                        self.pending = Some(Pending {
                            sentence: seg,
                            word: Some(k),
                            state: WordState::Present,
                            snapshot: before,
                            begin: ev.t,
                            first_event: i,
                        });
                    }
                    let p = self.pending.as_mut().expect("pending edit");
                    p.word = Some(k);
                    p.state = match edit {
                        WordEdit::Delete { .. } => WordState::Gone,
                        _ => WordState::Present,
                    };
                }
            }
            self.sentences[seg] = after;
            i += consumed;
        }
        self.commit();
        Ok(self.emit())
    }

    /// Whether a single-word event at word `k` of sentence `seg` continues the pending edit.
    fn continues(&self, seg: usize, k: usize, edit: &WordEdit) -> bool {
        let Some(p) = &self.pending else {
            return false;
        };
        if p.sentence != seg {
            return false;
        }
        match p.word {
            None => true,
            Some(w) if w != k => false,
            Some(_) => match (p.state, edit) {
                (WordState::Present, WordEdit::Replace { .. } | WordEdit::Delete { .. }) => true,
                (WordState::Gone, WordEdit::Insert { .. }) => true,
                _ => false,
            },
        }
    }

    fn emit(self) -> Vec<Action> {
        let events: &[RawEvent] = &self.log.events;
        let mut out = Vec::new();
        let push_mouse = |out: &mut Vec<Action>, c: u32, s: u32| {
            if c > 0 {
                out.push(Action::MouseClicks(c));
            }
            if s > 0 {
                out.push(Action::MouseSelections(s));
            }
        };
        let (mut cur_s, mut cur_w) = (0usize, 0usize);
        let mut prev_begin: Option<u64> = None;
        for g in &self.groups {
            match prev_begin {
                None if g.first_event != 0 => {
                    // first-wait split: time to the first event, then to the first edit
                    let t0 = events[0].t;
                    out.push(Action::Wait(secs(t0)));
                    push_mouse(&mut out, g.clicks, g.selections);
                    out.push(Action::Wait(secs(g.begin.saturating_sub(t0))));
                }
                None => {
                    out.push(Action::Wait(secs(g.begin)));
                    push_mouse(&mut out, g.clicks, g.selections);
                }
                Some(pb) => {
                    out.push(Action::Wait(secs(g.begin.saturating_sub(pb))));
                    push_mouse(&mut out, g.clicks, g.selections);
                }
            }
            if g.sentence > cur_s {
                out.push(Action::JumpSentenceForward((g.sentence - cur_s) as u32));
            } else if g.sentence < cur_s {
                out.push(Action::JumpSentenceBack((cur_s - g.sentence) as u32));
            }
            if g.word > cur_w {
                out.push(Action::JumpForward((g.word - cur_w) as u32));
            } else if g.word < cur_w {
                out.push(Action::JumpBack((cur_w - g.word) as u32));
            }
            out.extend(g.actions.iter().cloned());
            cur_s = g.sentence;
            cur_w = g.word;
            prev_begin = Some(g.begin);
        }
        let tail_start = prev_begin.unwrap_or(0);
        out.push(Action::Wait(secs(self.log.end_t.saturating_sub(tail_start))));
        push_mouse(&mut out, self.clicks, self.selections);
        out.push(Action::Stop);
        out
    }
}

/// Milliseconds to whole seconds, rounding half up.
fn secs(ms: u64) -> u64 {
    (ms + 500) / 1000
}

/// Compiles one session into its action sequence.
pub fn extract_actions(log: &SessionLog) -> Result<Vec<Action>, LogError> {
    Extractor::new(log).run()
}

impl Extraction {
    pub fn from_log(log: &SessionLog) -> Result<Extraction, LogError> {
        Ok(Extraction {
            record: ActionRecord {
                editor_id: log.editor_id.clone(),
                doc_id: log.doc_id.clone(),
                lang_pair: log.lang_pair.clone(),
                actions: extract_actions(log)?,
            },
        })
    }
}
