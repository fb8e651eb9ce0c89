use rand::Rng as _;
use rand::SeedableRng;
use rand_distr::{Distribution, Exp1, Poisson};

use crate::neural::Rng;
use crate::session_log::{RawEvent, SessionLog};

use super::document::{lexicon, ErrorKind, ErrorSite, SynthDocument};
use super::{EditorProfile, SynthError};

/// Probability of a mouse click when navigating back to an earlier word.
pub const NAV_CLICK_PROB: f64 = 0.8;

const LANG_PAIR: &str = "xx-yy";
/// Shortest pause between the end of one edit and the next start.
const MIN_GAP_MS: f64 = 300.0;
/// Spacing of mouse events just before an edit.
const MOUSE_GAP_MS: f64 = 400.0;

/// Simulation facts kept next to each generated log.
#[derive(Debug, Clone, PartialEq)]
pub struct GroundTruth {
    pub session_id: String,
    pub editor_id: String,
    pub profile_id: String,
    pub doc_id: String,
    pub total_seconds: f64,
    pub source_words: usize,
}

impl GroundTruth {
    /// Natural log of seconds per source word.
    pub fn log_time_per_word(&self) -> f64 {
        (self.total_seconds / self.source_words.max(1) as f64).ln()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GeneratedSession {
    pub log: SessionLog,
    pub truth: GroundTruth,
    /// Tokens the editor produced, one list per sentence.
    pub target: Vec<Vec<String>>,
}

struct Sim<'a> {
    profile: &'a EditorProfile,
    rng: Rng,
    tokens: Vec<Vec<String>>,
    events: Vec<RawEvent>,
    /// Milliseconds.
    t: f64,
    /// The next event follows the preceding pause without a delay of its own.
    immediate: bool,
}

fn chars(w: &str) -> usize {
    w.chars().count()
}

impl Sim<'_> {
    fn seg_start(&self, s: usize) -> usize {
        self.tokens[..s].iter().map(|t| seg_len(t) + 1).sum()
    }

    fn tok_pos(&self, s: usize, k: usize) -> usize {
        self.seg_start(s) + self.tokens[s][..k].iter().map(|w| chars(w) + 1).sum::<usize>()
    }

    fn now(&self) -> u64 {
        self.t.round() as u64
    }

    fn keystroke_pause(&mut self) {
        let d = self.profile.typing_interval_ms.sample(&mut self.rng).max(20.0);
        if !std::mem::take(&mut self.immediate) {
            self.t += d;
        }
    }

    fn type_text(&mut self, mut pos: usize, text: &str) {
        for c in text.chars() {
            self.keystroke_pause();
            self.events.push(RawEvent::insert(self.now(), pos, c.to_string()));
            pos += 1;
        }
    }

    /// Backspaces `n` characters ending at `end`.
    fn backspace(&mut self, end: usize, n: usize) {
        for i in 0..n {
            self.keystroke_pause();
            self.events.push(RawEvent::delete(self.now(), end - i - 1, 1));
        }
    }

    fn replace_token(&mut self, s: usize, k: usize, w: &str) {
        let p = self.tok_pos(s, k);
        let old = chars(&self.tokens[s][k]);
        self.backspace(p + old, old);
        self.type_text(p, w);
        self.tokens[s][k] = w.to_owned();
    }

    fn delete_token(&mut self, s: usize, k: usize) {
        let p = self.tok_pos(s, k);
        let len = chars(&self.tokens[s][k]);
        self.backspace(p + len, len);
        if self.tokens[s].len() > 1 {
            // the separating space: before the word, or after it at sentence start
            let at = if k > 0 { p - 1 } else { p };
            self.keystroke_pause();
            self.events.push(RawEvent::delete(self.now(), at, 1));
        }
        self.tokens[s].remove(k);
    }

    fn insert_token(&mut self, s: usize, k: usize, w: &str) {
        let (space_at, word_at) = if k == 0 {
            let p = self.seg_start(s);
            (p, p)
        } else {
            let p = self.tok_pos(s, k - 1) + chars(&self.tokens[s][k - 1]);
            (p, p + 1)
        };
        if !self.tokens[s].is_empty() {
            self.keystroke_pause();
            self.events.push(RawEvent::insert(self.now(), space_at, " "));
        }
        self.type_text(word_at, w);
        self.tokens[s].insert(k, w.to_owned());
    }

    /// One selection-replacing paste over `mt_len` tokens.
    fn block_replace(&mut self, s: usize, k: usize, mt_len: usize, fix: &[String]) {
        let p = self.tok_pos(s, k);
        let span = seg_len(&self.tokens[s][k..k + mt_len]);
        self.keystroke_pause();
        self.events.push(RawEvent::select(self.now(), p, span));
        self.keystroke_pause();
        self.events.push(RawEvent::delete(self.now(), p, span));
        self.t += 150.0;
        self.events.push(RawEvent::insert(self.now(), p, fix.join(" ")));
        self.tokens[s].splice(k..k + mt_len, fix.iter().cloned());
    }

    /// A click or word selection near token `k`, at the current time.
    fn mouse_near(&mut self, s: usize, k: usize, click: bool) {
        let k = k.min(self.tokens[s].len().saturating_sub(1));
        let p = self.tok_pos(s, k);
        let len = self.tokens[s].get(k).map_or(0, |w| chars(w));
        if click || len == 0 {
            self.events.push(RawEvent::click(self.now(), p));
        } else {
            self.events.push(RawEvent::select(self.now(), p, len));
        }
    }
}

fn seg_len(tokens: &[String]) -> usize {
    let n: usize = tokens.iter().map(|w| chars(w)).sum();
    n + tokens.len().saturating_sub(1)
}

/// Extra single-word substitutions on untouched MT words, up to the profile's edit rate.
fn preferential_sites(doc: &SynthDocument, profile: &EditorProfile, rng: &mut Rng) -> Vec<ErrorSite> {
    let words = doc.mt.iter().flatten().filter(|w| *w != ".").count();
    let want = (profile.edit_rate * words as f64).round() as usize;
    let mut extra = want.saturating_sub(doc.sites.len());
    let mut busy: Vec<(usize, usize, usize)> = doc.sites.iter().map(|x| (x.sentence, x.start, x.start + x.mt_len)).collect();
    let mut slots: Vec<(usize, usize)> = doc
        .mt
        .iter()
        .enumerate()
        .flat_map(|(s, t)| (0..t.len()).filter(move |&k| t[k] != ".").map(move |k| (s, k)))
        .collect();
    rand::seq::SliceRandom::shuffle(slots.as_mut_slice(), rng);
    let mut out = Vec::new();
    for (s, k) in slots {
        if extra == 0 {
            break;
        }
        // one untouched token on each side, sites with mt_len 0 included
        if busy.iter().any(|&(bs, a, b)| bs == s && k + 1 >= a && k <= b) {
            continue;
        }
        let old = &doc.mt[s][k];
        let lex = lexicon();
        let new = loop {
            let w = &lex[rng.gen_range(0..lex.len())];
            if w != old {
                break w.clone();
            }
        };
        busy.push((s, k, k + 1));
        out.push(ErrorSite {
            kind: ErrorKind::Substitute,
            sentence: s,
            start: k,
            mt_len: 1,
            fix: vec![new],
        });
        extra -= 1;
    }
    out
}

/// Edit order: left to right, except that with the jump-back probability a
/// site is skipped and revisited right after the next site.
fn plan_order(n: usize, jump_back_prob: f64, rng: &mut Rng) -> Vec<usize> {
    let mut order = Vec::with_capacity(n);
    let mut i = 0;
    while i < n {
        if i + 1 < n && jump_back_prob > 0.0 && rng.gen_bool(jump_back_prob) {
            order.extend([i + 1, i]);
            i += 2;
        } else {
            order.push(i);
            i += 1;
        }
    }
    order
}

/// Simulates one editor post-editing one document.
pub fn generate_session(
    profile: &EditorProfile,
    doc: &SynthDocument,
    session_id: &str,
    editor_id: &str,
    seed: u64,
) -> Result<GeneratedSession, SynthError> {
    profile.validate()?;
    let mut rng = Rng::seed_from_u64(seed);
    let mut sites = doc.sites.clone();
    sites.extend(preferential_sites(doc, profile, &mut rng));
    sites.sort_by_key(|x| (x.sentence, x.start));
    let order = plan_order(sites.len(), profile.jump_back_prob, &mut rng);

    let source_words = doc.source_word_count();
    let read_first = profile.read_first_seconds.sample(&mut rng) * 1000.0;
    let noise = (0.1 * rng.sample::<f64, _>(rand_distr::StandardNormal)).exp();
    let thinking = profile.speed_multiplier * source_words as f64 * noise * 1000.0;
    // pauses before edits 2..n and the tail share the thinking budget
    let weights: Vec<f64> = (0..sites.len().max(1))
        .map(|_| {
            let e: f64 = Exp1.sample(&mut rng);
            0.2 + e
        })
        .collect();
    let wsum: f64 = weights.iter().sum();
    let pauses: Vec<f64> = weights.iter().map(|w| thinking * w / wsum).collect();
    let mouse = (profile.mouse_rate > 0.0).then(|| Poisson::new(profile.mouse_rate).expect("positive rate"));

    let mut sim = Sim {
        profile,
        rng,
        tokens: doc.mt.clone(),
        events: Vec::new(),
        t: 0.0,
        immediate: false,
    };
    let mut applied: Vec<usize> = Vec::new();
    let mut last: Option<(usize, usize)> = None;
    let mut last_begin = 0.0;
    for (step, &i) in order.iter().enumerate() {
        let site = &sites[i];
        let shift: i64 = applied
            .iter()
            .map(|&j| &sites[j])
            .filter(|a| a.sentence == site.sentence && a.start < site.start)
            .map(|a| a.fix.len() as i64 - a.mt_len as i64)
            .sum();
        let (s, k) = (site.sentence, (site.start as i64 + shift) as usize);

        let back = matches!(last, Some((ls, lk)) if s < ls || (s == ls && k < lk));
        let mut clicks: Vec<bool> = Vec::new();
        if back && sim.rng.gen_bool(NAV_CLICK_PROB) {
            clicks.push(true);
        }
        let n_mouse = mouse.as_ref().map_or(0, |d| d.sample(&mut sim.rng) as usize);
        clicks.extend((0..n_mouse).map(|_| sim.rng.gen_bool(0.5)));

        if step == 0 {
            sim.t = read_first;
            for (j, &click) in clicks.iter().enumerate() {
                if j > 0 {
                    sim.t += sim.rng.gen_range(200.0..900.0);
                }
                sim.mouse_near(s, k, click);
            }
            sim.immediate = clicks.is_empty();
        } else {
            // edits start a thinking pause after the previous start; mouse
            // work happens inside the pause
            let begin = (last_begin + pauses[step - 1]).max(sim.t + MIN_GAP_MS);
            let room = (begin - sim.t) / (clicks.len() + 1) as f64;
            let gap = room.min(MOUSE_GAP_MS);
            for (j, &click) in clicks.iter().enumerate() {
                sim.t = begin - gap * (clicks.len() - j) as f64;
                sim.mouse_near(s, k, click);
            }
            sim.t = begin;
            sim.immediate = true;
        }
        let first_event = sim.events.len();
        let (m, f) = (site.mt_len, site.fix.len());
        if m >= 2 && f >= 2 && sim.rng.gen_bool(profile.block_op_prob) {
            sim.block_replace(s, k, m, &site.fix);
        } else {
            let common = m.min(f);
            for j in 0..common {
                sim.replace_token(s, k + j, &site.fix[j]);
            }
            for _ in common..m {
                sim.delete_token(s, k + common);
            }
            for j in common..f {
                sim.insert_token(s, k + j, &site.fix[j]);
            }
        }
        if let Some(e) = sim.events.get(first_event) {
            last_begin = e.t as f64;
        }
        applied.push(i);
        last = Some((s, k));
    }
    if order.is_empty() {
        sim.t = read_first;
        last_begin = read_first;
    }
    sim.t = (last_begin + pauses[pauses.len() - 1]).max(sim.t + MIN_GAP_MS);
    let end_t = sim.now().max(sim.events.last().map_or(0, |e| e.t));

    let log = SessionLog {
        doc_id: doc.doc_id.clone(),
        editor_id: editor_id.to_owned(),
        lang_pair: LANG_PAIR.to_owned(),
        source_segments: doc.source.clone(),
        mt_segments: doc.mt_segments(),
        events: sim.events,
        end_t,
    };
    let truth = GroundTruth {
        session_id: session_id.to_owned(),
        editor_id: editor_id.to_owned(),
        profile_id: profile.profile_id.clone(),
        doc_id: doc.doc_id.clone(),
        total_seconds: end_t as f64 / 1000.0,
        source_words,
    };
    Ok(GeneratedSession {
        log,
        truth,
        target: sim.tokens,
    })
}
