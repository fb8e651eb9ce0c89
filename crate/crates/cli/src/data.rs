//! File formats that pass data between subcommands.

use std::collections::HashMap;
use std::path::{Path, PathBuf};

use actseq::actions::{read_action_records, tokenize, ActionRecord, TokenizedDoc};
use actseq::editor_space::Splits;
use actseq::models::{parallel_map, TextVocab};
use actseq::session_log::{parse_session_log, SessionLog};
use actseq::symbols::{read_symbolized, SymbolizedSession, Vocabulary};

use crate::error::CliError;

pub fn read_text(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| CliError::data(path.display(), e))
}

pub fn write_text(path: &Path, text: &str) -> Result<(), CliError> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|e| CliError::data(dir.display(), e))?;
    }
    std::fs::write(path, text).map_err(|e| CliError::data(path.display(), e))
}

pub fn write_bytes(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    std::fs::write(path, bytes).map_err(|e| CliError::data(path.display(), e))
}

/// `path` with `suffix` appended to its file name.
pub fn sidecar(path: &Path, suffix: &str) -> PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(suffix);
    PathBuf::from(s)
}

/// Session-log files of a directory in name order, or a single file.
pub fn log_files(path: &Path) -> Result<Vec<PathBuf>, CliError> {
    if !path.is_dir() {
        return Ok(vec![path.to_owned()]);
    }
    let mut files: Vec<PathBuf> = std::fs::read_dir(path)
        .map_err(|e| CliError::data(path.display(), e))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "jsonl"))
        .collect();
    files.sort();
    if files.is_empty() {
        return Err(CliError::Data(format!("{}: no .jsonl session logs", path.display())));
    }
    Ok(files)
}

pub fn load_logs(path: &Path, threads: usize) -> Result<Vec<SessionLog>, CliError> {
    let files = log_files(path)?;
    parallel_map(&files, threads, |f| -> Result<SessionLog, CliError> {
        let bytes = std::fs::read(f).map_err(|e| CliError::data(f.display(), e))?;
        parse_session_log(&bytes).map_err(|e| CliError::data(f.display(), e))
    })
    .into_iter()
    .collect()
}

/// Source, MT and final document of a log, tokenized.
pub fn texts(log: &SessionLog) -> Result<(TokenizedDoc, TokenizedDoc, TokenizedDoc), CliError> {
    let pe = log.final_document()?;
    Ok((
        tokenize(&log.source_segments),
        tokenize(&log.mt_segments),
        tokenize(&pe.split('\n').collect::<Vec<_>>()),
    ))
}

pub fn load_actions(path: &Path, anonymized: bool) -> Result<Vec<ActionRecord>, CliError> {
    read_action_records(&read_text(path)?, anonymized).map_err(|e| CliError::data(path.display(), e))
}

pub fn load_vocab(path: &Path) -> Result<Vocabulary, CliError> {
    Vocabulary::from_file_str(&read_text(path)?).map_err(|e| CliError::data(path.display(), e))
}

pub fn load_symbolized(path: &Path) -> Result<Vec<SymbolizedSession>, CliError> {
    read_symbolized(&read_text(path)?).map_err(|e| CliError::data(path.display(), e))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Split {
    Train,
    Dev,
    Test,
}

impl Split {
    pub fn parse(s: &str) -> Result<Split, CliError> {
        match s {
            "train" => Ok(Split::Train),
            "dev" => Ok(Split::Dev),
            "test" => Ok(Split::Test),
            _ => Err(CliError::Usage(format!("unknown split {s}"))),
        }
    }

    fn as_str(self) -> &'static str {
        match self {
            Split::Train => "train",
            Split::Dev => "dev",
            Split::Test => "test",
        }
    }
}

/// Split assignment over line indices of a session file.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SplitFile {
    pub editors: Vec<String>,
    pub rows: Vec<(Split, usize)>,
}

impl SplitFile {
    pub fn from_splits(s: &Splits) -> Self {
        let mut rows: Vec<(Split, usize)> = Vec::new();
        rows.extend(s.train.iter().map(|&i| (Split::Train, i)));
        rows.extend(s.dev.iter().map(|&i| (Split::Dev, i)));
        rows.extend(s.test.iter().map(|&i| (Split::Test, i)));
        SplitFile {
            editors: s.editors.clone(),
            rows,
        }
    }

    /// `#editors` header line, then `split TAB index` rows.
    pub fn to_text(&self) -> String {
        let mut out = format!("#editors\t{}\n", self.editors.join("\t"));
        for (s, i) in &self.rows {
            out.push_str(&format!("{}\t{i}\n", s.as_str()));
        }
        out
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = read_text(path)?;
        let bad = |line: usize, m: &str| CliError::Data(format!("{}:{line}: {m}", path.display()));
        let mut lines = text.lines().enumerate();
        let editors = match lines.next() {
            Some((_, l)) if l.starts_with("#editors\t") => l.split('\t').skip(1).map(str::to_owned).collect(),
            _ => return Err(bad(1, "missing #editors header")),
        };
        let mut rows = Vec::new();
        for (i, l) in lines.filter(|(_, l)| !l.trim().is_empty()) {
            let (s, idx) = l.split_once('\t').ok_or_else(|| bad(i + 1, "expected split TAB index"))?;
            let split = Split::parse(s).map_err(|_| bad(i + 1, "unknown split"))?;
            rows.push((split, idx.parse().map_err(|_| bad(i + 1, "bad index"))?));
        }
        Ok(SplitFile { editors, rows })
    }

    pub fn label_map(&self) -> HashMap<&str, usize> {
        self.editors.iter().enumerate().map(|(i, e)| (e.as_str(), i)).collect()
    }

    /// Indices of one split, checked against the number of sessions.
    pub fn indices(&self, split: Split, n_sessions: usize) -> Result<Vec<usize>, CliError> {
        let v: Vec<usize> = self.rows.iter().filter(|r| r.0 == split).map(|r| r.1).collect();
        if let Some(&i) = v.iter().find(|&&i| i >= n_sessions) {
            return Err(CliError::Data(format!("split index {i} beyond {n_sessions} sessions")));
        }
        Ok(v)
    }
}

/// Labeled examples of a split; every row's editor must be a split editor.
pub fn labeled<T: Clone>(
    splits: &SplitFile,
    split: Split,
    items: &[T],
    editor_of: impl Fn(&T) -> &str,
) -> Result<Vec<(T, usize)>, CliError> {
    let labels = splits.label_map();
    splits
        .indices(split, items.len())?
        .into_iter()
        .map(|i| {
            let e = editor_of(&items[i]);
            let y = *labels
                .get(e)
                .ok_or_else(|| CliError::Data(format!("session {i}: editor {e} is not in the split file")))?;
            Ok((items[i].clone(), y))
        })
        .collect()
}

/// Text vocabulary sidecar: one word per line.
pub fn write_text_vocab(path: &Path, v: &TextVocab) -> Result<(), CliError> {
    let mut s = v.words().join("\n");
    s.push('\n');
    write_text(path, &s)
}

pub fn load_text_vocab(path: &Path) -> Result<TextVocab, CliError> {
    Ok(TextVocab::from_words(
        read_text(path)?.lines().filter(|l| !l.is_empty()).map(str::to_owned).collect(),
    ))
}

/// Checks that two line-aligned session files describe the same sessions.
pub fn check_aligned<'a>(
    a: impl ExactSizeIterator<Item = (&'a str, &'a str)>,
    b: impl ExactSizeIterator<Item = (&'a str, &'a str)>,
) -> Result<(), CliError> {
    if a.len() != b.len() {
        return Err(CliError::Data(format!("session counts differ: {} vs {}", a.len(), b.len())));
    }
    for (i, (x, y)) in a.zip(b).enumerate() {
        if x != y {
            return Err(CliError::Data(format!(
                "session {i} differs between inputs: {}/{} vs {}/{}",
                x.0, x.1, y.0, y.1
            )));
        }
    }
    Ok(())
}
