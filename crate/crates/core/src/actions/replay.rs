use thiserror::Error;

use super::{Action, Lexeme, TokenizedDoc};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ReplayError {
    #[error("action {index}: cursor ({sentence},{word}) leaves the document")]
    InvalidJump {
        index: usize,
        sentence: usize,
        word: usize,
    },
    #[error("action {index}: {reason}")]
    MalformedSequence { index: usize, reason: String },
}

/// Applies an action sequence to a tokenized document.
///
/// The cursor starts at sentence 1, word 1. Sentence jumps keep the word index;
/// word indices are only checked against the sentence length when an edit is
/// applied (an insert may target one past the last word).
pub fn replay(mt: &TokenizedDoc, actions: &[Action]) -> Result<TokenizedDoc, ReplayError> {
    let mut doc = mt.clone();
    let n_sent = doc.sentences.len();
    let (mut s, mut w) = (1usize, 1usize);
    for (index, a) in actions.iter().enumerate() {
        let bad_jump = |s: usize, w: usize| ReplayError::InvalidJump {
            index,
            sentence: s,
            word: w,
        };
        let malformed = |reason: &str| ReplayError::MalformedSequence {
            index,
            reason: reason.to_owned(),
        };
        match a {
            Action::Wait(_) | Action::MouseClicks(_) | Action::MouseSelections(_) => {}
            Action::Stop => {
                if index + 1 != actions.len() {
                    return Err(malformed("actions after S"));
                }
                return Ok(doc);
            }
            Action::JumpSentenceForward(n) => {
                s += *n as usize;
                if s > n_sent {
                    return Err(bad_jump(s, w));
                }
            }
            Action::JumpSentenceBack(n) => {
                let n = *n as usize;
                if n >= s {
                    return Err(bad_jump(0, w));
                }
                s -= n;
            }
            Action::JumpForward(n) => w += *n as usize,
            Action::JumpBack(n) => {
                let n = *n as usize;
                if n >= w {
                    return Err(bad_jump(s, 0));
                }
                w -= n;
            }
            edit => {
                let sentence = doc
                    .sentences
                    .get_mut(s - 1)
                    .ok_or_else(|| malformed("document has no sentences"))?;
                let len = sentence.len();
                let lex = edit.lexeme().expect("editing action");
                let text = match lex {
                    Lexeme::Word(t) => t.as_str(),
                    _ => return Err(malformed("replay needs lexical arguments")),
                };
                let at = w - 1;
                match edit {
                    Action::Replace(_) | Action::Delete(_) => {
                        if at >= len {
                            return Err(bad_jump(s, w));
                        }
                        if let Action::Replace(_) = edit {
                            sentence[at] = text.to_owned();
                        } else {
                            if sentence[at] != text {
                                return Err(malformed("deleted word does not match"));
                            }
                            sentence.remove(at);
                        }
                    }
                    Action::Insert(_) => {
                        if at > len {
                            return Err(bad_jump(s, w));
                        }
                        sentence.insert(at, text.to_owned());
                    }
                    Action::DeleteBlock(_) => {
                        let words: Vec<&str> = text.split(' ').collect();
                        if at + words.len() > len {
                            return Err(bad_jump(s, w));
                        }
                        if sentence[at..at + words.len()]
                            .iter()
                            .zip(&words)
                            .any(|(a, b)| a != b)
                        {
                            return Err(malformed("deleted block does not match"));
                        }
                        sentence.drain(at..at + words.len());
                    }
                    Action::InsertBlock(_) => {
                        if at > len {
                            return Err(bad_jump(s, w));
                        }
                        let words = text.split(' ').map(str::to_owned);
                        sentence.splice(at..at, words);
                    }
                    _ => unreachable!(),
                }
            }
        }
    }
    Err(ReplayError::MalformedSequence {
        index: actions.len(),
        reason: "sequence does not end with S".into(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::actions::{parse_sequence, tokenize};

    #[test]
    fn waits_only_is_identity() {
        let doc = tokenize(&["a b", "c"]);
        let out = replay(&doc, &parse_sequence("W:5 S:--", false).unwrap()).unwrap();
        assert_eq!(out, doc);
    }

    #[test]
    fn jumps_out_of_bounds() {
        let doc = tokenize(&["a b", "c"]);
        let seq = parse_sequence("JSF:2 S:--", false).unwrap();
        assert!(matches!(replay(&doc, &seq), Err(ReplayError::InvalidJump { .. })));
        let seq = parse_sequence("JB:1 S:--", false).unwrap();
        assert!(matches!(replay(&doc, &seq), Err(ReplayError::InvalidJump { .. })));
        let seq = parse_sequence("JF:5 D:a S:--", false).unwrap();
        assert!(matches!(replay(&doc, &seq), Err(ReplayError::InvalidJump { .. })));
    }

    #[test]
    fn missing_stop_is_malformed() {
        let doc = tokenize(&["a"]);
        let seq = parse_sequence("W:1", false).unwrap();
        assert!(matches!(
            replay(&doc, &seq),
            Err(ReplayError::MalformedSequence { .. })
        ));
        let seq = parse_sequence("D:7 S:--", true).unwrap();
        assert!(matches!(
            replay(&doc, &seq),
            Err(ReplayError::MalformedSequence { .. })
        ));
    }

    #[test]
    fn blocks_and_inserts_at_end() {
        let doc = tokenize(&["a b c d"]);
        let seq = parse_sequence("JF:1 BD:b%20c BI:x%20y%20z JF:4 I:e S:--", false).unwrap();
        let out = replay(&doc, &seq).unwrap();
        assert_eq!(out, tokenize(&["a x y z d e"]));
    }
}
