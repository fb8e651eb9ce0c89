use std::sync::OnceLock;

use rand::seq::SliceRandom;
use rand::Rng as _;
use rand::SeedableRng;

use crate::neural::Rng;

use super::SynthError;

const LEXICON_SIZE: usize = 200;
const ONSETS: [&str; 14] = ["b", "d", "f", "g", "k", "l", "m", "n", "p", "r", "s", "t", "v", "z"];
const VOWELS: [&str; 5] = ["a", "e", "i", "o", "u"];

/// The fixed 200-word target lexicon. Words are two or three open syllables.
pub fn lexicon() -> &'static [String] {
    static LEX: OnceLock<Vec<String>> = OnceLock::new();
    LEX.get_or_init(|| {
        let syl: Vec<String> = ONSETS
            .iter()
            .flat_map(|o| VOWELS.iter().map(move |v| format!("{o}{v}")))
            .collect();
        let n = syl.len();
        // k -> k * 1291 permutes the n * n syllable pairs
        (0..LEXICON_SIZE)
            .map(|k| {
                let pair = (k * 1291) % (n * n);
                let mut w = format!("{}{}", syl[pair / n], syl[pair % n]);
                if k % 3 == 0 {
                    w.push_str(&syl[(k * 17 + 5) % n]);
                }
                w
            })
            .collect()
    })
}

/// Source-side spelling of lexicon entry `i`.
fn source_word(i: usize) -> String {
    lexicon()[(i * 73 + 19) % LEXICON_SIZE].chars().rev().collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    Substitute,
    Spurious,
    Missing,
    Phrase,
}

/// Replace MT tokens `start..start + mt_len` of one sentence by `fix`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ErrorSite {
    pub kind: ErrorKind,
    pub sentence: usize,
    pub start: usize,
    pub mt_len: usize,
    pub fix: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SynthDocument {
    pub doc_id: String,
    pub source: Vec<String>,
    /// MT tokens per sentence; segments are the tokens joined by single spaces.
    pub mt: Vec<Vec<String>>,
    /// Non-overlapping error sites, sorted by position.
    pub sites: Vec<ErrorSite>,
}

impl SynthDocument {
    pub fn mt_segments(&self) -> Vec<String> {
        self.mt.iter().map(|s| s.join(" ")).collect()
    }

    /// MT with every site fixed.
    pub fn reference(&self) -> Vec<Vec<String>> {
        apply_sites(&self.mt, &self.sites)
    }

    pub fn mt_token_count(&self) -> usize {
        self.mt.iter().map(Vec::len).sum()
    }

    pub fn source_word_count(&self) -> usize {
        self.source.iter().map(|s| s.split_whitespace().count()).sum()
    }
}

/// Applies non-overlapping sites, right to left within each sentence.
pub(crate) fn apply_sites(mt: &[Vec<String>], sites: &[ErrorSite]) -> Vec<Vec<String>> {
    let mut out = mt.to_vec();
    let mut sorted: Vec<&ErrorSite> = sites.iter().collect();
    sorted.sort_by_key(|s| (s.sentence, std::cmp::Reverse(s.start)));
    for s in sorted {
        out[s.sentence].splice(s.start..s.start + s.mt_len, s.fix.iter().cloned());
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DocumentSpec {
    pub n_sentences: usize,
    /// Mean tokens per sentence, the final period included.
    pub words_per_sentence: usize,
    /// Error sites per MT word.
    pub error_fraction: f64,
}

impl DocumentSpec {
    pub fn validate(&self) -> Result<(), SynthError> {
        if self.n_sentences == 0 || self.words_per_sentence == 0 {
            return Err(SynthError::InvalidDocument("sizes must be at least 1".into()));
        }
        if !(0.0..=1.0).contains(&self.error_fraction) {
            return Err(SynthError::InvalidDocument("error_fraction must lie in [0, 1]".into()));
        }
        Ok(())
    }
}

fn random_word(rng: &mut Rng, avoid: &[&str]) -> String {
    loop {
        let w = &lexicon()[rng.gen_range(0..LEXICON_SIZE)];
        if !avoid.contains(&w.as_str()) {
            return w.clone();
        }
    }
}

/// Source and MT for one document; deterministic in `seed`.
pub fn generate_document(doc_id: &str, spec: &DocumentSpec, seed: u64) -> Result<SynthDocument, SynthError> {
    spec.validate()?;
    let mut rng = Rng::seed_from_u64(seed);
    let wps = spec.words_per_sentence;
    let jitter = if wps >= 4 { 2 } else { 0 };

    // reference translation as lexicon indices, source mirrors it word by word
    let mut reference: Vec<Vec<usize>> = Vec::with_capacity(spec.n_sentences);
    for _ in 0..spec.n_sentences {
        let len = (wps as i64 + rng.gen_range(-(jitter as i64)..=jitter as i64)).max(1) as usize;
        let words = len.saturating_sub(1).max(1);
        reference.push((0..words).map(|_| rng.gen_range(0..LEXICON_SIZE)).collect());
    }
    let with_period = wps > 1;
    let source: Vec<String> = reference
        .iter()
        .map(|s| {
            let mut w: Vec<String> = s.iter().map(|&i| source_word(i)).collect();
            if with_period {
                w.push(".".into());
            }
            w.join(" ")
        })
        .collect();

    // choose error positions over reference words, one free word between sites
    let total_words: usize = reference.iter().map(Vec::len).sum();
    let n_err = (spec.error_fraction * total_words as f64).round() as usize;
    let mut slots: Vec<(usize, usize)> = reference
        .iter()
        .enumerate()
        .flat_map(|(s, w)| (0..w.len()).map(move |k| (s, k)))
        .collect();
    slots.shuffle(&mut rng);
    let mut chosen: Vec<(usize, usize, usize, ErrorKind)> = Vec::new();
    for (s, k) in slots {
        if chosen.len() == n_err {
            break;
        }
        let room = reference[s].len() - k;
        let kind = match rng.gen_range(0..20) {
            0..=9 => ErrorKind::Substitute,
            10..=12 => ErrorKind::Spurious,
            13..=15 if with_period || reference[s].len() > 1 => ErrorKind::Missing,
            _ if room >= 2 => ErrorKind::Phrase,
            _ => ErrorKind::Substitute,
        };
        let span = if kind == ErrorKind::Phrase { rng.gen_range(2..=room.min(3)) } else { 1 };
        let clear = chosen
            .iter()
            .filter(|c| c.0 == s)
            .all(|&(_, k2, span2, _)| k >= k2 + span2 + 1 || k + span + 1 <= k2);
        if clear {
            chosen.push((s, k, span, kind));
        }
    }
    chosen.sort_by_key(|c| (c.0, c.1));

    let lex = lexicon();
    let mut mt = Vec::with_capacity(reference.len());
    let mut sites = Vec::new();
    for (s, words) in reference.iter().enumerate() {
        let mut out: Vec<String> = Vec::with_capacity(words.len() + 2);
        let mut k = 0;
        while k < words.len() {
            let here = chosen.iter().find(|c| c.0 == s && c.1 == k);
            let Some(&(_, _, span, kind)) = here else {
                out.push(lex[words[k]].clone());
                k += 1;
                continue;
            };
            let right: Vec<&str> = words[k..(k + span + 1).min(words.len())].iter().map(|&i| lex[i].as_str()).collect();
            match kind {
                ErrorKind::Substitute => {
                    sites.push(ErrorSite {
                        kind,
                        sentence: s,
                        start: out.len(),
                        mt_len: 1,
                        fix: vec![lex[words[k]].clone()],
                    });
                    out.push(random_word(&mut rng, &right));
                }
                ErrorKind::Spurious => {
                    out.push(lex[words[k]].clone());
                    sites.push(ErrorSite {
                        kind,
                        sentence: s,
                        start: out.len(),
                        mt_len: 1,
                        fix: Vec::new(),
                    });
                    out.push(random_word(&mut rng, &right));
                }
                ErrorKind::Missing => {
                    sites.push(ErrorSite {
                        kind,
                        sentence: s,
                        start: out.len(),
                        mt_len: 0,
                        fix: vec![lex[words[k]].clone()],
                    });
                }
                ErrorKind::Phrase => {
                    let m = rng.gen_range(2..=3);
                    let fix: Vec<String> = words[k..k + span].iter().map(|&i| lex[i].clone()).collect();
                    sites.push(ErrorSite {
                        kind,
                        sentence: s,
                        start: out.len(),
                        mt_len: m,
                        fix,
                    });
                    for _ in 0..m {
                        out.push(random_word(&mut rng, &right));
                    }
                }
            }
            k += span;
        }
        if with_period {
            out.push(".".into());
        }
        mt.push(out);
    }
    Ok(SynthDocument {
        doc_id: doc_id.to_owned(),
        source,
        mt,
        sites,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::actions::tokenize;

    fn spec(n: usize, w: usize, e: f64) -> DocumentSpec {
        DocumentSpec {
            n_sentences: n,
            words_per_sentence: w,
            error_fraction: e,
        }
    }

    #[test]
    fn lexicon_has_200_distinct_words() {
        let lex = lexicon();
        assert_eq!(lex.len(), 200);
        let set: std::collections::HashSet<_> = lex.iter().collect();
        assert_eq!(set.len(), 200);
        assert!(lex.iter().all(|w| w.chars().all(|c| c.is_ascii_lowercase())));
    }

    #[test]
    fn deterministic_in_seed() {
        let s = spec(5, 8, 0.15);
        assert_eq!(generate_document("d", &s, 4).unwrap(), generate_document("d", &s, 4).unwrap());
        assert_ne!(generate_document("d", &s, 4).unwrap(), generate_document("d", &s, 5).unwrap());
    }

    #[test]
    fn document_scale() {
        // 12 sentences of about 10 tokens
        let mut total = 0;
        for seed in 0..50 {
            let d = generate_document("d", &spec(12, 10, 0.0), seed).unwrap();
            total += tokenize(&d.mt_segments()).word_count();
        }
        let avg = total as f64 / 50.0;
        assert!((avg - 116.6).abs() / 116.6 < 0.05, "{avg}");
    }

    #[test]
    fn zero_error_fraction_needs_no_edits() {
        let d = generate_document("d", &spec(6, 9, 0.0), 1).unwrap();
        assert!(d.sites.is_empty());
        assert_eq!(d.reference(), d.mt);
    }

    #[test]
    fn sites_are_separated_and_fix_the_mt() {
        for seed in 0..30 {
            let d = generate_document("d", &spec(6, 9, 0.3), seed).unwrap();
            assert!(!d.sites.is_empty());
            for w in d.sites.windows(2) {
                if w[0].sentence == w[1].sentence {
                    assert!(w[0].start + w[0].mt_len < w[1].start, "{:?}", w);
                }
            }
            let fixed = d.reference();
            for (s, toks) in fixed.iter().enumerate() {
                let words = toks.iter().filter(|t| *t != ".").count();
                let src = d.source[s].split(' ').filter(|t| *t != ".").count();
                assert_eq!(words, src);
            }
            assert_eq!(tokenize(&d.mt_segments()).sentences, d.mt);
        }
    }

    #[test]
    fn sizes_must_be_positive() {
        assert!(generate_document("d", &spec(0, 5, 0.1), 0).is_err());
        // a one-word sentence has no period
        let d = generate_document("d", &spec(1, 1, 1.0), 0).unwrap();
        assert_eq!(d.reference()[0].len(), 1);
    }
}
