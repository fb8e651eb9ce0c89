#![allow(dead_code)]

use actseq::session_log::{EventKind, RawEvent, SessionLog};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const WORDS: [&str; 12] = ["la", "casa", "verde", "de", "mi", "amigo", "es", "muy", "grande", "y", "bonita", "hoy"];
const PUNCT: [&str; 4] = [",", ".", "!", ":)"];

fn random_sentence(rng: &mut ChaCha8Rng) -> String {
    let n = rng.gen_range(1..7);
    let mut words: Vec<String> = (0..n).map(|_| WORDS.choose(rng).unwrap().to_string()).collect();
    if rng.gen_bool(0.5) {
        let p = PUNCT.choose(rng).unwrap();
        let last = words.pop().unwrap();
        words.push(format!("{last}{p}"));
    }
    words.join(" ")
}

fn random_text(rng: &mut ChaCha8Rng) -> String {
    match rng.gen_range(0..5) {
        0 => WORDS.choose(rng).unwrap().to_string(),
        1 => format!(" {}", WORDS.choose(rng).unwrap()),
        2 => format!("{} {}", WORDS.choose(rng).unwrap(), WORDS.choose(rng).unwrap()),
        3 => PUNCT.choose(rng).unwrap().to_string(),
        _ => ((b'a' + rng.gen_range(0..26)) as char).to_string(),
    }
}

/// Segment index and in-segment offset bounds of every character slot.
fn segment_bounds(doc: &[char]) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    let mut start = 0;
    for (i, &c) in doc.iter().enumerate() {
        if c == '\n' {
            out.push((start, i));
            start = i + 1;
        }
    }
    out.push((start, doc.len()));
    out
}

/// A valid random session with `n_events` events; edits never cross or
/// create segment boundaries.
pub fn random_log(seed: u64, n_events: usize) -> SessionLog {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n_seg = rng.gen_range(1..4);
    let mt: Vec<String> = (0..n_seg).map(|_| random_sentence(&mut rng)).collect();
    let mut doc: Vec<char> = mt.join("\n").chars().collect();
    let mut events = Vec::with_capacity(n_events);
    let mut t = 0u64;
    for _ in 0..n_events {
        t += rng.gen_range(0..4000);
        let segs = segment_bounds(&doc);
        let &(a, b) = segs.choose(&mut rng).unwrap();
        let ev = match rng.gen_range(0..10) {
            0..=3 => {
                let pos = rng.gen_range(a..=b);
                let text = random_text(&mut rng);
                RawEvent::insert(t, pos, text)
            }
            4..=6 if b > a => {
                let pos = rng.gen_range(a..b);
                let len = rng.gen_range(1..=(b - pos).min(8));
                RawEvent::delete(t, pos, len)
            }
            7 if b > a => {
                let pos = rng.gen_range(a..b);
                let len = rng.gen_range(1..=(b - pos));
                RawEvent::select(t, pos, len)
            }
            _ => RawEvent::click(t, rng.gen_range(0..=doc.len())),
        };
        splice(&mut doc, &ev);
        events.push(ev);
    }
    let end_t = t + rng.gen_range(0..5000);
    SessionLog {
        doc_id: format!("doc{seed}"),
        editor_id: format!("ed{}", seed % 3),
        lang_pair: "es-en".into(),
        source_segments: mt.clone(),
        mt_segments: mt,
        events,
        end_t,
    }
}

fn splice(doc: &mut Vec<char>, ev: &RawEvent) {
    match ev.kind {
        EventKind::InsertText => {
            let text: Vec<char> = ev.text.as_deref().unwrap_or("").chars().collect();
            doc.splice(ev.pos..ev.pos, text);
        }
        EventKind::DeleteText => {
            doc.drain(ev.pos..ev.pos + ev.len.unwrap_or(0));
        }
        _ => {}
    }
}

/// Naive replay by string splicing, independent of the library's buffer.
pub fn splice_replay(log: &SessionLog) -> String {
    let mut s: String = log.mt_segments.join("\n");
    for ev in &log.events {
        let byte = |s: &str, c: usize| s.char_indices().nth(c).map_or(s.len(), |(b, _)| b);
        match ev.kind {
            EventKind::InsertText => {
                let at = byte(&s, ev.pos);
                s.insert_str(at, ev.text.as_deref().unwrap());
            }
            EventKind::DeleteText => {
                let from = byte(&s, ev.pos);
                let to = byte(&s, ev.pos + ev.len.unwrap());
                s.replace_range(from..to, "");
            }
            _ => {}
        }
    }
    s
}

/// Word-level Levenshtein distance by the textbook table.
pub fn levenshtein<T: PartialEq>(a: &[T], b: &[T]) -> usize {
    let mut d = vec![vec![0usize; b.len() + 1]; a.len() + 1];
    for (i, row) in d.iter_mut().enumerate() {
        row[0] = i;
    }
    for j in 0..=b.len() {
        d[0][j] = j;
    }
    for i in 1..=a.len() {
        for j in 1..=b.len() {
            let sub = d[i - 1][j - 1] + usize::from(a[i - 1] != b[j - 1]);
            d[i][j] = sub.min(d[i - 1][j] + 1).min(d[i][j - 1] + 1);
        }
    }
    d[a.len()][b.len()]
}

pub mod grad;
