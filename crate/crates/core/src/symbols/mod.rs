//! Discrete symbol space for action sequences.
//!
//! Numeric arguments are binned, editing arguments are looked up in a small
//! word vocabulary (everything else becomes `UNK`), and every (type, argument)
//! pair gets a dense [`SymbolId`].

mod import;
mod io;

use std::collections::HashMap;
use std::fmt;

use thiserror::Error;

use crate::actions::{Action, ActionRecord, ActionType, Lexeme};

pub use import::{import_dataset, ImportConfig};
pub use io::{read_symbolized, SymbolizedSession};

pub const DEFAULT_VOCAB_WORDS: usize = 50;

/// Edges for wait times (seconds) and word jumps; the last bin is open-ended.
pub const WAIT_WORD_JUMP_EDGES: [u64; 16] = [0, 1, 2, 3, 4, 5, 7, 10, 15, 20, 30, 50, 75, 100, 150, 200];
/// Edges for sentence jumps and mouse counts; the last bin is open-ended.
pub const SENTENCE_MOUSE_EDGES: [u64; 8] = [0, 1, 2, 3, 4, 5, 7, 10];

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SymbolError {
    #[error("cannot build a vocabulary from an empty corpus")]
    EmptyCorpus,
    #[error("symbol id {0} out of range")]
    IdOutOfRange(u32),
    #[error("vocabulary file: {0}")]
    BadVocabFile(String),
    #[error("symbolized dataset line {line}: {reason}")]
    BadDatasetLine { line: usize, reason: String },
    #[error("import: {0}")]
    Import(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BinKind {
    Wait,
    WordJump,
    SentenceJump,
    Mouse,
}

impl BinKind {
    pub fn of(kind: ActionType) -> Option<BinKind> {
        match kind {
            ActionType::W => Some(BinKind::Wait),
            ActionType::JF | ActionType::JB => Some(BinKind::WordJump),
            ActionType::JSF | ActionType::JSB => Some(BinKind::SentenceJump),
            ActionType::MC | ActionType::MS => Some(BinKind::Mouse),
            _ => None,
        }
    }

    pub fn edges(self) -> &'static [u64] {
        match self {
            BinKind::Wait | BinKind::WordJump => &WAIT_WORD_JUMP_EDGES,
            BinKind::SentenceJump | BinKind::Mouse => &SENTENCE_MOUSE_EDGES,
        }
    }
}

/// One bin of a [`BinKind`]: `index` into its edge list.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Bin {
    pub index: usize,
    pub edge: u64,
    pub open: bool,
}

impl fmt::Display for Bin {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.open {
            write!(f, "{}+", self.edge)
        } else {
            write!(f, "{}", self.edge)
        }
    }
}

/// Smallest edge `>= v`; values at or beyond the last edge fall in the open bin.
pub fn bin_value(kind: BinKind, v: u64) -> Bin {
    let edges = kind.edges();
    let last = edges.len() - 1;
    let index = edges.iter().position(|&e| e >= v).unwrap_or(last);
    Bin {
        index,
        edge: edges[index],
        open: index == last,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SymbolArg {
    Word(usize),
    Unk,
    Bin(usize),
    None,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Symbol {
    pub kind: ActionType,
    pub arg: SymbolArg,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SymbolId(pub u32);

impl SymbolId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

/// Word list plus the full symbol table derived from it.
#[derive(Debug, Clone, PartialEq)]
pub struct Vocabulary {
    words: Vec<String>,
    word_index: HashMap<String, usize>,
    table: Vec<Symbol>,
    lookup: HashMap<Symbol, SymbolId>,
}

impl Vocabulary {
    /// Builds the symbol table for an ordered word list.
    ///
    /// Layout: the five editing types × (words + UNK), then `W`, `JF`, `JB` × 16
    /// bins, then `JSF`, `JSB`, `MC`, `MS` × 8 bins, then `S`.
    pub fn from_words(words: Vec<String>) -> Vocabulary {
        let mut table = Vec::new();
        for kind in ActionType::EDITS {
            table.extend((0..words.len()).map(|w| Symbol {
                kind,
                arg: SymbolArg::Word(w),
            }));
            table.push(Symbol {
                kind,
                arg: SymbolArg::Unk,
            });
        }
        for kind in [
            ActionType::W,
            ActionType::JF,
            ActionType::JB,
            ActionType::JSF,
            ActionType::JSB,
            ActionType::MC,
            ActionType::MS,
        ] {
            let bins = BinKind::of(kind).expect("numeric type").edges().len();
            table.extend((0..bins).map(|b| Symbol {
                kind,
                arg: SymbolArg::Bin(b),
            }));
        }
        table.push(Symbol {
            kind: ActionType::S,
            arg: SymbolArg::None,
        });
        let lookup = table
            .iter()
            .enumerate()
            .map(|(i, s)| (*s, SymbolId(i as u32)))
            .collect();
        let word_index = words
            .iter()
            .enumerate()
            .map(|(i, w)| (w.clone(), i))
            .collect();
        Vocabulary {
            words,
            word_index,
            table,
            lookup,
        }
    }

    /// Vocabulary for already-anonymized corpora whose word ids are `0..n`.
    pub fn anonymous(n: usize) -> Vocabulary {
        Vocabulary::from_words((0..n).map(|i| i.to_string()).collect())
    }

    pub fn words(&self) -> &[String] {
        &self.words
    }

    pub fn word_id(&self, w: &str) -> Option<usize> {
        self.word_index.get(w).copied()
    }

    /// Total number of symbols.
    pub fn size(&self) -> usize {
        self.table.len()
    }

    pub fn symbols(&self) -> &[Symbol] {
        &self.table
    }

    pub fn encode(&self, s: &Symbol) -> Option<SymbolId> {
        self.lookup.get(s).copied()
    }

    pub fn decode(&self, id: SymbolId) -> Result<Symbol, SymbolError> {
        self.table
            .get(id.index())
            .copied()
            .ok_or(SymbolError::IdOutOfRange(id.0))
    }

    fn lexeme_arg(&self, l: &Lexeme) -> SymbolArg {
        let id = match l {
            Lexeme::Word(w) => self.word_id(w),
            Lexeme::Id(i) => Some(*i).filter(|&i| i < self.words.len()),
            Lexeme::Unk => None,
        };
        id.map_or(SymbolArg::Unk, SymbolArg::Word)
    }

    pub fn symbol_of(&self, a: &Action) -> Symbol {
        let kind = a.kind();
        let arg = if let Some(l) = a.lexeme() {
            self.lexeme_arg(l)
        } else if let Some(bk) = BinKind::of(kind) {
            SymbolArg::Bin(bin_value(bk, a.count().expect("numeric action")).index)
        } else {
            SymbolArg::None
        };
        Symbol { kind, arg }
    }

    pub fn symbolize(&self, seq: &[Action]) -> Vec<SymbolId> {
        seq.iter()
            .map(|a| self.encode(&self.symbol_of(a)).expect("symbol table is total"))
            .collect()
    }

    /// Human-readable label of a symbol, e.g. `W:30`, `D:se`, `R:UNK`, `S`.
    pub fn label(&self, s: &Symbol) -> String {
        match s.arg {
            SymbolArg::Word(w) => format!("{}:{}", s.kind, self.words[w]),
            SymbolArg::Unk => format!("{}:UNK", s.kind),
            SymbolArg::Bin(b) => {
                let bk = BinKind::of(s.kind).expect("numeric type");
                let edges = bk.edges();
                let bin = Bin {
                    index: b,
                    edge: edges[b],
                    open: b == edges.len() - 1,
                };
                format!("{}:{}", s.kind, bin)
            }
            SymbolArg::None => s.kind.to_string(),
        }
    }
}

/// Counts editing-argument words (blocks count as whole strings) and keeps the
/// `max_words` most frequent, ties broken lexicographically.
pub fn build_vocab<'a, I>(corpus: I, max_words: usize) -> Result<Vocabulary, SymbolError>
where
    I: IntoIterator<Item = &'a [Action]>,
{
    let mut counts: HashMap<&str, usize> = HashMap::new();
    let mut n_seq = 0;
    for seq in corpus {
        n_seq += 1;
        for a in seq {
            if let Some(Lexeme::Word(w)) = a.lexeme() {
                *counts.entry(w.as_str()).or_default() += 1;
            }
        }
    }
    if n_seq == 0 {
        return Err(SymbolError::EmptyCorpus);
    }
    let mut ranked: Vec<(&str, usize)> = counts.into_iter().collect();
    ranked.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(b.0)));
    ranked.truncate(max_words);
    Ok(Vocabulary::from_words(
        ranked.into_iter().map(|(w, _)| w.to_owned()).collect(),
    ))
}

pub fn symbolize(seq: &[Action], vocab: &Vocabulary) -> Vec<SymbolId> {
    vocab.symbolize(seq)
}

/// Replaces editor ids by dense integers (first-appearance order) and editing
/// arguments by vocabulary indices or `UNK`.
pub fn anonymize(corpus: &[ActionRecord], vocab: &Vocabulary) -> Vec<ActionRecord> {
    let mut editors: HashMap<&str, usize> = HashMap::new();
    corpus
        .iter()
        .map(|rec| {
            let next = editors.len();
            let id = *editors.entry(rec.editor_id.as_str()).or_insert(next);
            let actions = rec
                .actions
                .iter()
                .map(|a| {
                    let mut a = a.clone();
                    if let Some(l) = a.lexeme_mut() {
                        *l = match vocab.lexeme_arg(l) {
                            SymbolArg::Word(i) => Lexeme::Id(i),
                            _ => Lexeme::Unk,
                        };
                    }
                    a
                })
                .collect();
            ActionRecord {
                editor_id: id.to_string(),
                doc_id: rec.doc_id.clone(),
                lang_pair: rec.lang_pair.clone(),
                actions,
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::actions::parse_sequence;

    #[test]
    fn binning_examples() {
        assert_eq!(bin_value(BinKind::Wait, 0).to_string(), "0");
        assert_eq!(bin_value(BinKind::Wait, 23).to_string(), "30");
        assert_eq!(bin_value(BinKind::Wait, 6).to_string(), "7");
        assert_eq!(bin_value(BinKind::Wait, 200).to_string(), "200+");
        assert_eq!(bin_value(BinKind::Wait, 10_000).to_string(), "200+");
        assert_eq!(bin_value(BinKind::Mouse, 12).to_string(), "10+");
        assert_eq!(bin_value(BinKind::SentenceJump, 5).to_string(), "5");
    }

    #[test]
    fn vocabulary_sizes() {
        let v = Vocabulary::from_words(vec!["a".into(), "b".into(), "c".into()]);
        assert_eq!(v.size(), 5 * 4 + 48 + 32 + 1);
        assert_eq!(v.size(), 101);
        assert_eq!(Vocabulary::anonymous(50).size(), 336);
    }

    #[test]
    fn build_keeps_top_words_with_lexicographic_ties() {
        let seq = parse_sequence("D:b D:a D:c D:c R:c I:b I:a BI:x%20y S:--", false).unwrap();
        let v = build_vocab([seq.as_slice()], 2).unwrap();
        assert_eq!(v.words(), ["c", "a"]);
        assert!(matches!(
            build_vocab(std::iter::empty::<&[Action]>(), 50),
            Err(SymbolError::EmptyCorpus)
        ));
    }

    #[test]
    fn unknown_words_map_to_unk() {
        let seq = parse_sequence("D:se R:rareword S:--", false).unwrap();
        let v = Vocabulary::from_words(vec!["se".into()]);
        let ids = v.symbolize(&seq);
        assert_eq!(
            v.decode(ids[0]).unwrap(),
            Symbol {
                kind: ActionType::D,
                arg: SymbolArg::Word(0)
            }
        );
        assert_eq!(v.decode(ids[1]).unwrap().arg, SymbolArg::Unk);
        assert_eq!(v.decode(ids[2]).unwrap().kind, ActionType::S);
        assert!(v.decode(SymbolId(10_000)).is_err());
    }

    #[test]
    fn anonymize_relabels_densely() {
        let mk = |ed: &str, seq: &str| ActionRecord {
            editor_id: ed.into(),
            doc_id: "d".into(),
            lang_pair: "en-fr".into(),
            actions: parse_sequence(seq, false).unwrap(),
        };
        let corpus = vec![mk("zoe", "D:se S:--"), mk("al", "R:x S:--"), mk("zoe", "W:3 S:--")];
        let words: Vec<String> = (0..7).map(|i| format!("w{i}")).chain(["se".into()]).collect();
        let vocab = Vocabulary::from_words(words);
        let anon = anonymize(&corpus, &vocab);
        assert_eq!(anon[0].editor_id, "0");
        assert_eq!(anon[1].editor_id, "1");
        assert_eq!(anon[2].editor_id, "0");
        assert_eq!(anon[0].actions[0].to_token(), "D:7");
        assert_eq!(anon[1].actions[0].to_token(), "R:UNK");
        assert_eq!(anonymize(&anon, &vocab), anon);
    }
}
