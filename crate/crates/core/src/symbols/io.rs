use super::{SymbolArg, SymbolError, SymbolId, Vocabulary};

const VOCAB_MAGIC: &str = "actseq-vocab 1";

impl Vocabulary {
    /// Line-delimited dump: magic, word list, then the full symbol table.
    pub fn to_file_string(&self) -> String {
        let mut out = format!("{VOCAB_MAGIC}\nwords {}\n", self.words().len());
        for w in self.words() {
            out.push_str(w);
            out.push('\n');
        }
        out.push_str(&format!("symbols {}\n", self.size()));
        for (i, s) in self.symbols().iter().enumerate() {
            let arg = match s.arg {
                SymbolArg::Word(w) => format!("word:{w}"),
                SymbolArg::Unk => "UNK".to_owned(),
                SymbolArg::Bin(b) => format!("bin:{b}"),
                SymbolArg::None => "--".to_owned(),
            };
            out.push_str(&format!("{i}\t{}\t{arg}\t{}\n", s.kind, self.label(s)));
        }
        out
    }

    /// Parses [`Vocabulary::to_file_string`] output; the symbol dump must match the
    /// table implied by the word list.
    pub fn from_file_str(s: &str) -> Result<Vocabulary, SymbolError> {
        let bad = |m: &str| SymbolError::BadVocabFile(m.to_owned());
        let mut lines = s.lines();
        if lines.next() != Some(VOCAB_MAGIC) {
            return Err(bad("missing header"));
        }
        let n: usize = lines
            .next()
            .and_then(|l| l.strip_prefix("words "))
            .and_then(|n| n.parse().ok())
            .ok_or_else(|| bad("missing word count"))?;
        let mut words = Vec::with_capacity(n);
        for _ in 0..n {
            words.push(lines.next().ok_or_else(|| bad("truncated word list"))?.to_owned());
        }
        let vocab = Vocabulary::from_words(words);
        let m: usize = lines
            .next()
            .and_then(|l| l.strip_prefix("symbols "))
            .and_then(|n| n.parse().ok())
            .ok_or_else(|| bad("missing symbol count"))?;
        if m != vocab.size() {
            return Err(bad("symbol count does not match the word list"));
        }
        let expected = vocab.to_file_string();
        let table_start = expected.lines().skip(n + 3);
        for (got, want) in lines.by_ref().take(m).zip(table_start) {
            if got != want {
                return Err(bad(&format!("symbol table mismatch at {got:?}")));
            }
        }
        Ok(vocab)
    }
}

/// One line of a symbolized dataset: `editor_id TAB doc_id TAB ids`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SymbolizedSession {
    pub editor_id: String,
    pub doc_id: String,
    pub ids: Vec<SymbolId>,
}

impl SymbolizedSession {
    pub fn to_line(&self) -> String {
        let ids: Vec<String> = self.ids.iter().map(|i| i.0.to_string()).collect();
        format!("{}\t{}\t{}", self.editor_id, self.doc_id, ids.join(" "))
    }
}

pub fn read_symbolized(text: &str) -> Result<Vec<SymbolizedSession>, SymbolError> {
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| {
            let err = |reason: &str| SymbolError::BadDatasetLine {
                line: i + 1,
                reason: reason.to_owned(),
            };
            let mut cols = l.splitn(3, '\t');
            let editor_id = cols.next().ok_or_else(|| err("missing editor"))?.to_owned();
            let doc_id = cols.next().ok_or_else(|| err("missing doc"))?.to_owned();
            let ids = cols
                .next()
                .ok_or_else(|| err("missing ids"))?
                .split_whitespace()
                .map(|t| t.parse::<u32>().map(SymbolId).map_err(|_| err("bad id")))
                .collect::<Result<Vec<_>, _>>()?;
            Ok(SymbolizedSession {
                editor_id,
                doc_id,
                ids,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn vocab_file_round_trip() {
        let v = Vocabulary::from_words(vec!["se".into(), "par".into(), "b c".into()]);
        let s = v.to_file_string();
        assert!(s.contains("\tW\tbin:15\tW:200+\n"));
        assert_eq!(Vocabulary::from_file_str(&s).unwrap(), v);
        let tampered = s.replace("bin:15\tW:200+", "bin:14\tW:200+");
        assert!(Vocabulary::from_file_str(&tampered).is_err());
        assert!(Vocabulary::from_file_str("nope").is_err());
    }

    #[test]
    fn dataset_lines() {
        let sess = SymbolizedSession {
            editor_id: "3".into(),
            doc_id: "d9".into(),
            ids: vec![SymbolId(4), SymbolId(335)],
        };
        let line = sess.to_line();
        assert_eq!(line, "3\td9\t4 335");
        assert_eq!(read_symbolized(&line).unwrap(), vec![sess]);
        assert!(read_symbolized("a\tb\tx").is_err());
    }
}
