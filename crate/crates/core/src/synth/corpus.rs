use std::fmt::Write as _;

use crate::models::parallel_map;
use crate::session_log::SessionLog;

use super::document::{generate_document, DocumentSpec, SynthDocument};
use super::session::{generate_session, GroundTruth};
use super::{derive_seed, EditorProfile, SynthError};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CorpusSpec {
    /// Documents; every editor post-edits each of them once.
    pub rounds: usize,
    pub document: DocumentSpec,
    pub seed: u64,
}

/// Sessions in chronological order: round by round, editors in input order.
#[derive(Debug, Clone, PartialEq)]
pub struct SynthCorpus {
    pub sessions: Vec<SessionLog>,
    pub truth: Vec<GroundTruth>,
}

impl SynthCorpus {
    /// Editor profile of each session.
    pub fn labels(&self) -> Vec<&str> {
        self.truth.iter().map(|t| t.profile_id.as_str()).collect()
    }

    pub fn log_times(&self) -> Vec<f64> {
        self.truth.iter().map(GroundTruth::log_time_per_word).collect()
    }

    pub fn len(&self) -> usize {
        self.sessions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sessions.is_empty()
    }
}

const DOC_STREAM: u64 = 1 << 40;

/// Generates `rounds × editors` sessions; session `i` draws from its own
/// stream derived from `(seed, i)`, so the result does not depend on `threads`.
pub fn generate_corpus(editors: &[EditorProfile], spec: &CorpusSpec, threads: usize) -> Result<SynthCorpus, SynthError> {
    spec.document.validate()?;
    for p in editors {
        p.validate()?;
    }
    let docs: Vec<SynthDocument> = parallel_map(&(0..spec.rounds).collect::<Vec<_>>(), threads, |&r| {
        generate_document(&format!("doc{r:05}"), &spec.document, derive_seed(spec.seed, DOC_STREAM + r as u64))
    })
    .into_iter()
    .collect::<Result<_, _>>()?;
    let jobs: Vec<(usize, usize)> = (0..spec.rounds)
        .flat_map(|r| (0..editors.len()).map(move |e| (r, e)))
        .collect();
    let out = parallel_map(&jobs, threads, |&(r, e)| {
        let i = r * editors.len() + e;
        let p = &editors[e];
        generate_session(p, &docs[r], &format!("s{i:06}"), &p.profile_id, derive_seed(spec.seed, i as u64))
    });
    let mut corpus = SynthCorpus {
        sessions: Vec::with_capacity(out.len()),
        truth: Vec::with_capacity(out.len()),
    };
    for g in out {
        let g = g?;
        corpus.sessions.push(g.log);
        corpus.truth.push(g.truth);
    }
    Ok(corpus)
}

const TRUTH_HEADER: &str = "session_id\teditor_id\tprofile_id\tdoc_id\ttotal_seconds\tsource_words\tlog_time_per_word";

/// Ground-truth sidecar table.
pub fn truth_tsv(truth: &[GroundTruth]) -> String {
    let mut out = String::from(TRUTH_HEADER);
    out.push('\n');
    for t in truth {
        let _ = writeln!(
            out,
            "{}\t{}\t{}\t{}\t{:.3}\t{}\t{:.6}",
            t.session_id,
            t.editor_id,
            t.profile_id,
            t.doc_id,
            t.total_seconds,
            t.source_words,
            t.log_time_per_word()
        );
    }
    out
}

pub fn read_truth_tsv(text: &str) -> Result<Vec<GroundTruth>, SynthError> {
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if i == 0 && line.starts_with("session_id") || line.trim().is_empty() {
            continue;
        }
        let bad = |reason: String| SynthError::Truth { line: i + 1, reason };
        let cols: Vec<&str> = line.split('\t').collect();
        if cols.len() < 6 {
            return Err(bad(format!("expected 7 columns, found {}", cols.len())));
        }
        out.push(GroundTruth {
            session_id: cols[0].to_owned(),
            editor_id: cols[1].to_owned(),
            profile_id: cols[2].to_owned(),
            doc_id: cols[3].to_owned(),
            total_seconds: cols[4].parse().map_err(|e| bad(format!("total_seconds: {e}")))?,
            source_words: cols[5].parse().map_err(|e| bad(format!("source_words: {e}")))?,
        });
    }
    Ok(out)
}
