use std::ops::Range;

use thiserror::Error;

use super::{Action, Lexeme, Token};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DiffError {
    #[error("token lists are identical")]
    NoChange,
}

/// Word-level change between two versions of a sentence. Positions are 1-based.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum WordEdit {
    Replace { pos: usize, old: String, new: String },
    Insert { pos: usize, word: String },
    Delete { pos: usize, word: String },
    /// Multi-word change: the deleted block then the inserted block, both at `pos`.
    Block {
        pos: usize,
        deleted: Vec<String>,
        inserted: Vec<String>,
    },
}

impl WordEdit {
    pub fn pos(&self) -> usize {
        match *self {
            WordEdit::Replace { pos, .. }
            | WordEdit::Insert { pos, .. }
            | WordEdit::Delete { pos, .. }
            | WordEdit::Block { pos, .. } => pos,
        }
    }

    pub fn is_block(&self) -> bool {
        matches!(self, WordEdit::Block { .. })
    }

    pub fn to_actions(&self) -> Vec<Action> {
        match self {
            WordEdit::Replace { new, .. } => vec![Action::Replace(Lexeme::word(new.clone()))],
            WordEdit::Insert { word, .. } => vec![Action::Insert(Lexeme::word(word.clone()))],
            WordEdit::Delete { word, .. } => vec![Action::Delete(Lexeme::word(word.clone()))],
            WordEdit::Block {
                deleted, inserted, ..
            } => {
                let mut out = Vec::new();
                if !deleted.is_empty() {
                    out.push(Action::DeleteBlock(Lexeme::word(deleted.join(" "))));
                }
                if !inserted.is_empty() {
                    out.push(Action::InsertBlock(Lexeme::word(inserted.join(" "))));
                }
                out
            }
        }
    }
}

/// Index of the token at (or right after) sentence character offset `range.start`.
pub fn hint_token(spans: &[Token], range: Range<usize>) -> usize {
    spans.iter().take_while(|t| t.span.end <= range.start).count()
}

/// Classifies the change from `before` to `after` as one word-level edit.
///
/// The changed window is the minimal one left after trimming the common prefix
/// and suffix. When repeated tokens make several windows equally small, the one
/// starting closest to `hint` (0-based token index of the edited location in
/// `before`) is chosen.
pub fn word_diff<T: AsRef<str>>(before: &[T], after: &[T], hint: usize) -> Result<WordEdit, DiffError> {
    let (n, m) = (before.len(), after.len());
    let eq = |a: &T, b: &T| a.as_ref() == b.as_ref();
    let lcp = before
        .iter()
        .zip(after)
        .take_while(|(a, b)| eq(a, b))
        .count();
    if lcp == n && n == m {
        return Err(DiffError::NoChange);
    }
    let lcs = before
        .iter()
        .rev()
        .zip(after.iter().rev())
        .take_while(|(a, b)| eq(a, b))
        .count();
    let total = (lcp + lcs).min(n.min(m));
    let lo = total.saturating_sub(lcs);
    let hi = lcp.min(total);
    let p = hint.clamp(lo, hi);
    let s = total - p;
    let owned = |xs: &[T]| xs.iter().map(|x| x.as_ref().to_owned()).collect::<Vec<_>>();
    let deleted = owned(&before[p..n - s]);
    let inserted = owned(&after[p..m - s]);
    let pos = p + 1;
    Ok(match (deleted.len(), inserted.len()) {
        (1, 1) => WordEdit::Replace {
            pos,
            old: deleted[0].clone(),
            new: inserted[0].clone(),
        },
        (0, 1) => WordEdit::Insert {
            pos,
            word: inserted[0].clone(),
        },
        (1, 0) => WordEdit::Delete {
            pos,
            word: deleted[0].clone(),
        },
        _ => WordEdit::Block {
            pos,
            deleted,
            inserted,
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(s: &str) -> Vec<String> {
        s.split_whitespace().map(str::to_owned).collect()
    }

    #[test]
    fn single_word_changes() {
        assert_eq!(
            word_diff(&v("a b c"), &v("a x c"), 0).unwrap(),
            WordEdit::Replace {
                pos: 2,
                old: "b".into(),
                new: "x".into()
            }
        );
        assert_eq!(
            word_diff(&v("a b c"), &v("a c"), 0).unwrap(),
            WordEdit::Delete {
                pos: 2,
                word: "b".into()
            }
        );
        assert_eq!(
            word_diff(&v("a c"), &v("a b c"), 0).unwrap(),
            WordEdit::Insert {
                pos: 2,
                word: "b".into()
            }
        );
    }

    #[test]
    fn block_change() {
        let e = word_diff(&v("a b c d"), &v("a x y z d"), 1).unwrap();
        assert_eq!(
            e,
            WordEdit::Block {
                pos: 2,
                deleted: v("b c"),
                inserted: v("x y z")
            }
        );
        assert_eq!(
            format!("{:?}", e.to_actions().iter().map(|a| a.to_token()).collect::<Vec<_>>()),
            r#"["BD:b%20c", "BI:x%20y%20z"]"#
        );
    }

    #[test]
    fn no_change() {
        assert_eq!(word_diff(&v("a b"), &v("a b"), 0), Err(DiffError::NoChange));
    }

    #[test]
    fn hint_disambiguates_repeats() {
        let before = v("a a b");
        let after = v("a b");
        assert_eq!(word_diff(&before, &after, 0).unwrap().pos(), 1);
        assert_eq!(word_diff(&before, &after, 1).unwrap().pos(), 2);
        assert_eq!(word_diff(&before, &after, 7).unwrap().pos(), 2);
        // inserting at a sentence end next to a repeated token
        assert_eq!(word_diff(&v("x x"), &v("x x x"), 2).unwrap().pos(), 3);
    }
}
