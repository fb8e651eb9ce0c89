//! Adapter for externally released, already-anonymized action datasets.
//!
//! The released archives are delimited text files with one session per row.
//! Column positions and separators vary between releases, so they are
//! configured rather than hard-coded.

use crate::actions::{Action, ActionRecord};

use super::SymbolError;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ImportConfig {
    pub column_separator: char,
    pub editor_column: usize,
    /// When absent, documents are numbered by row.
    pub doc_column: Option<usize>,
    pub sequence_column: usize,
    /// Separator between action tokens inside the sequence column.
    pub token_separator: char,
    /// Separator between the action type and its argument.
    pub arg_separator: char,
    pub skip_header: bool,
    pub lang_pair: String,
}

impl Default for ImportConfig {
    fn default() -> Self {
        ImportConfig {
            column_separator: '\t',
            editor_column: 0,
            doc_column: None,
            sequence_column: 1,
            token_separator: ' ',
            arg_separator: ':',
            skip_header: false,
            lang_pair: "unk".to_owned(),
        }
    }
}

/// Maps rows of a released dataset file into anonymized action records.
///
/// A bare `S` token (without argument) is accepted for the stop symbol.
pub fn import_dataset(text: &str, cfg: &ImportConfig) -> Result<Vec<ActionRecord>, SymbolError> {
    let mut out = Vec::new();
    let rows = text
        .lines()
        .enumerate()
        .skip(usize::from(cfg.skip_header))
        .filter(|(_, l)| !l.trim().is_empty());
    for (row, line) in rows {
        let err = |m: String| SymbolError::Import(format!("row {}: {m}", row + 1));
        let cols: Vec<&str> = line.split(cfg.column_separator).collect();
        let col = |i: usize| -> Result<&str, SymbolError> {
            cols.get(i)
                .map(|c| c.trim().trim_matches('"'))
                .ok_or_else(|| err(format!("missing column {i}")))
        };
        let editor_id = col(cfg.editor_column)?.to_owned();
        let doc_id = match cfg.doc_column {
            Some(c) => col(c)?.to_owned(),
            None => format!("row{}", row + 1),
        };
        let mut actions = Vec::new();
        for tok in col(cfg.sequence_column)?
            .split(cfg.token_separator)
            .filter(|t| !t.is_empty())
        {
            let normalized = if tok == "S" {
                "S:--".to_owned()
            } else {
                tok.replacen(cfg.arg_separator, ":", 1)
            };
            let a = Action::parse_token(&normalized, true).map_err(|e| err(e.to_string()))?;
            actions.push(a);
        }
        if actions.last() != Some(&Action::Stop) {
            actions.push(Action::Stop);
        }
        out.push(ActionRecord {
            editor_id,
            doc_id,
            lang_pair: cfg.lang_pair.clone(),
            actions,
        });
    }
    Ok(out)
}
