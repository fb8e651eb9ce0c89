//! Word-level action sequences compiled from raw session logs.
//!
//! The alphabet has five text-editing actions (`R`, `I`, `D`, `BI`, `BD`) and
//! eight non-editing ones (`JF`, `JB`, `JSF`, `JSB`, `MC`, `MS`, `W`, `S`).

mod diff;
mod extract;
mod replay;
mod tokenize;

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

pub use diff::{hint_token, word_diff, DiffError, WordEdit};
pub use extract::{extract_actions, Extraction};
pub use replay::{replay, ReplayError};
pub use tokenize::{is_punct, tokenize, tokenize_sentence, tokenize_spans, Token, TokenizedDoc};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ActionType {
    R,
    I,
    D,
    BI,
    BD,
    JF,
    JB,
    JSF,
    JSB,
    MC,
    MS,
    W,
    S,
}

impl ActionType {
    pub const ALL: [ActionType; 13] = [
        ActionType::R,
        ActionType::I,
        ActionType::D,
        ActionType::BI,
        ActionType::BD,
        ActionType::JF,
        ActionType::JB,
        ActionType::JSF,
        ActionType::JSB,
        ActionType::MC,
        ActionType::MS,
        ActionType::W,
        ActionType::S,
    ];

    pub const EDITS: [ActionType; 5] = [
        ActionType::R,
        ActionType::I,
        ActionType::D,
        ActionType::BI,
        ActionType::BD,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ActionType::R => "R",
            ActionType::I => "I",
            ActionType::D => "D",
            ActionType::BI => "BI",
            ActionType::BD => "BD",
            ActionType::JF => "JF",
            ActionType::JB => "JB",
            ActionType::JSF => "JSF",
            ActionType::JSB => "JSB",
            ActionType::MC => "MC",
            ActionType::MS => "MS",
            ActionType::W => "W",
            ActionType::S => "S",
        }
    }

    pub fn is_edit(self) -> bool {
        Self::EDITS.contains(&self)
    }
}

impl fmt::Display for ActionType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ActionType {
    type Err = FormatError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        ActionType::ALL
            .into_iter()
            .find(|t| t.as_str() == s)
            .ok_or_else(|| FormatError::UnknownType(s.to_owned()))
    }
}

/// Lexical argument of an editing action.
///
/// Raw extraction produces [`Lexeme::Word`]; anonymized corpora carry vocabulary
/// indices or the unknown marker instead.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Lexeme {
    Word(String),
    Id(usize),
    Unk,
}

impl Lexeme {
    pub fn word(w: impl Into<String>) -> Self {
        Lexeme::Word(w.into())
    }

    pub fn as_word(&self) -> Option<&str> {
        match self {
            Lexeme::Word(w) => Some(w),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Action {
    Replace(Lexeme),
    Insert(Lexeme),
    Delete(Lexeme),
    /// Block arguments join their words with a single space.
    InsertBlock(Lexeme),
    DeleteBlock(Lexeme),
    JumpForward(u32),
    JumpBack(u32),
    JumpSentenceForward(u32),
    JumpSentenceBack(u32),
    MouseClicks(u32),
    MouseSelections(u32),
    /// Whole seconds.
    Wait(u64),
    Stop,
}

impl Action {
    pub fn kind(&self) -> ActionType {
        match self {
            Action::Replace(_) => ActionType::R,
            Action::Insert(_) => ActionType::I,
            Action::Delete(_) => ActionType::D,
            Action::InsertBlock(_) => ActionType::BI,
            Action::DeleteBlock(_) => ActionType::BD,
            Action::JumpForward(_) => ActionType::JF,
            Action::JumpBack(_) => ActionType::JB,
            Action::JumpSentenceForward(_) => ActionType::JSF,
            Action::JumpSentenceBack(_) => ActionType::JSB,
            Action::MouseClicks(_) => ActionType::MC,
            Action::MouseSelections(_) => ActionType::MS,
            Action::Wait(_) => ActionType::W,
            Action::Stop => ActionType::S,
        }
    }

    pub fn lexeme(&self) -> Option<&Lexeme> {
        match self {
            Action::Replace(l)
            | Action::Insert(l)
            | Action::Delete(l)
            | Action::InsertBlock(l)
            | Action::DeleteBlock(l) => Some(l),
            _ => None,
        }
    }

    pub fn lexeme_mut(&mut self) -> Option<&mut Lexeme> {
        match self {
            Action::Replace(l)
            | Action::Insert(l)
            | Action::Delete(l)
            | Action::InsertBlock(l)
            | Action::DeleteBlock(l) => Some(l),
            _ => None,
        }
    }

    /// Numeric argument of counting actions (`W` included).
    pub fn count(&self) -> Option<u64> {
        match *self {
            Action::JumpForward(n)
            | Action::JumpBack(n)
            | Action::JumpSentenceForward(n)
            | Action::JumpSentenceBack(n)
            | Action::MouseClicks(n)
            | Action::MouseSelections(n) => Some(n as u64),
            Action::Wait(s) => Some(s),
            _ => None,
        }
    }

    fn with_lexeme(kind: ActionType, l: Lexeme) -> Action {
        match kind {
            ActionType::R => Action::Replace(l),
            ActionType::I => Action::Insert(l),
            ActionType::D => Action::Delete(l),
            ActionType::BI => Action::InsertBlock(l),
            ActionType::BD => Action::DeleteBlock(l),
            _ => unreachable!("not an editing action"),
        }
    }

    /// `TYPE:arg` token; spaces inside block arguments are percent-escaped.
    pub fn to_token(&self) -> String {
        let arg = match self {
            Action::Stop => "--".to_owned(),
            a => match a.lexeme() {
                Some(Lexeme::Word(w)) => escape(w),
                Some(Lexeme::Id(i)) => i.to_string(),
                Some(Lexeme::Unk) => "UNK".to_owned(),
                None => a.count().expect("counting action").to_string(),
            },
        };
        format!("{}:{}", self.kind(), arg)
    }

    /// Parses a `TYPE:arg` token; a bare `S` is also read as stop. With `anonymized`, editing arguments are read as
    /// vocabulary indices or `UNK`.
    pub fn parse_token(tok: &str, anonymized: bool) -> Result<Action, FormatError> {
        if tok == "S" {
            return Ok(Action::Stop);
        }
        let (ty, arg) = tok
            .split_once(':')
            .ok_or_else(|| FormatError::BadToken(tok.to_owned()))?;
        let kind: ActionType = ty.parse()?;
        let num = || -> Result<u64, FormatError> {
            arg.parse::<u64>()
                .map_err(|_| FormatError::BadToken(tok.to_owned()))
        };
        let small = || -> Result<u32, FormatError> {
            u32::try_from(num()?).map_err(|_| FormatError::BadToken(tok.to_owned()))
        };
        Ok(match kind {
            ActionType::R | ActionType::I | ActionType::D | ActionType::BI | ActionType::BD => {
                let lex = if anonymized {
                    if arg == "UNK" {
                        Lexeme::Unk
                    } else {
                        Lexeme::Id(
                            arg.parse()
                                .map_err(|_| FormatError::BadToken(tok.to_owned()))?,
                        )
                    }
                } else {
                    Lexeme::Word(unescape(arg).ok_or_else(|| FormatError::BadToken(tok.to_owned()))?)
                };
                Action::with_lexeme(kind, lex)
            }
            ActionType::JF => Action::JumpForward(small()?),
            ActionType::JB => Action::JumpBack(small()?),
            ActionType::JSF => Action::JumpSentenceForward(small()?),
            ActionType::JSB => Action::JumpSentenceBack(small()?),
            ActionType::MC => Action::MouseClicks(small()?),
            ActionType::MS => Action::MouseSelections(small()?),
            ActionType::W => Action::Wait(num()?),
            ActionType::S => Action::Stop,
        })
    }
}

impl fmt::Display for Action {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_token())
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FormatError {
    #[error("unknown action type {0:?}")]
    UnknownType(String),
    #[error("malformed action token {0:?}")]
    BadToken(String),
    #[error("malformed sequence line: {0}")]
    BadLine(String),
}

fn escape(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '%' => out.push_str("%25"),
            ' ' => out.push_str("%20"),
            '\t' => out.push_str("%09"),
            '\n' => out.push_str("%0A"),
            '\r' => out.push_str("%0D"),
            c => out.push(c),
        }
    }
    out
}

fn unescape(s: &str) -> Option<String> {
    let mut out = String::with_capacity(s.len());
    let mut it = s.chars();
    while let Some(c) = it.next() {
        if c == '%' {
            let hex: String = it.by_ref().take(2).collect();
            let b = u8::from_str_radix(&hex, 16).ok()?;
            out.push(b as char);
        } else {
            out.push(c);
        }
    }
    Some(out)
}

/// Formats a sequence as space-separated tokens.
pub fn format_sequence(actions: &[Action]) -> String {
    actions
        .iter()
        .map(Action::to_token)
        .collect::<Vec<_>>()
        .join(" ")
}

pub fn parse_sequence(s: &str, anonymized: bool) -> Result<Vec<Action>, FormatError> {
    s.split_whitespace()
        .map(|t| Action::parse_token(t, anonymized))
        .collect()
}

/// One line of an action-sequence file: metadata columns then the sequence.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ActionRecord {
    pub editor_id: String,
    pub doc_id: String,
    pub lang_pair: String,
    pub actions: Vec<Action>,
}

impl ActionRecord {
    pub fn to_line(&self) -> String {
        format!(
            "{}\t{}\t{}\t{}",
            self.editor_id,
            self.doc_id,
            self.lang_pair,
            format_sequence(&self.actions)
        )
    }

    pub fn parse_line(line: &str, anonymized: bool) -> Result<ActionRecord, FormatError> {
        let mut cols = line.splitn(4, '\t');
        let mut next = |what: &str| {
            cols.next()
                .ok_or_else(|| FormatError::BadLine(format!("missing {what} column")))
        };
        let editor_id = next("editor_id")?.to_owned();
        let doc_id = next("doc_id")?.to_owned();
        let lang_pair = next("lang_pair")?.to_owned();
        let actions = parse_sequence(next("actions")?, anonymized)?;
        Ok(ActionRecord {
            editor_id,
            doc_id,
            lang_pair,
            actions,
        })
    }
}

pub fn read_action_records(text: &str, anonymized: bool) -> Result<Vec<ActionRecord>, FormatError> {
    text.lines()
        .filter(|l| !l.trim().is_empty())
        .map(|l| ActionRecord::parse_line(l, anonymized))
        .collect()
}
