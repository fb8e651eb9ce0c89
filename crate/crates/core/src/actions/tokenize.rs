use std::ops::Range;

/// Sentences of word and punctuation tokens.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct TokenizedDoc {
    pub sentences: Vec<Vec<String>>,
}

impl TokenizedDoc {
    pub fn word_count(&self) -> usize {
        self.sentences.iter().map(Vec::len).sum()
    }

    pub fn flatten(&self) -> Vec<String> {
        self.sentences.iter().flatten().cloned().collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Token {
    pub text: String,
    /// Character span within the sentence.
    pub span: Range<usize>,
}

/// Punctuation in the Unicode `P*` sense for the common ranges. Math and currency
/// symbols such as `<`, `>`, `+`, `$` are not punctuation, so `<Name>` stays whole.
pub fn is_punct(c: char) -> bool {
    matches!(
        c,
        '!' | '"'
            | '#'
            | '%'
            | '&'
            | '\''
            | '('
            | ')'
            | '*'
            | ','
            | '-'
            | '.'
            | '/'
            | ':'
            | ';'
            | '?'
            | '@'
            | '['
            | '\\'
            | ']'
            | '_'
            | '{'
            | '}'
            | '¡'
            | '§'
            | '«'
            | '¶'
            | '·'
            | '»'
            | '¿'
            | '‐'..='‧'
            | '‰'..='⁞'
            | '、'..='〃'
            | '〈'..='】'
    )
}

/// Tokenizes one sentence, keeping character spans.
///
/// Whitespace-separated chunks are split into leading punctuation run, body and
/// trailing punctuation run; a chunk made only of punctuation (`:)`) is one token.
pub fn tokenize_spans(chars: &[char]) -> Vec<Token> {
    let mut out = Vec::new();
    let mut i = 0;
    let n = chars.len();
    while i < n {
        if chars[i].is_whitespace() {
            i += 1;
            continue;
        }
        let start = i;
        while i < n && !chars[i].is_whitespace() {
            i += 1;
        }
        let end = i;
        let chunk = &chars[start..end];
        if chunk.iter().all(|&c| is_punct(c)) {
            out.push(make(chars, start..end));
            continue;
        }
        let lead = chunk.iter().take_while(|&&c| is_punct(c)).count();
        let trail = chunk.iter().rev().take_while(|&&c| is_punct(c)).count();
        if lead > 0 {
            out.push(make(chars, start..start + lead));
        }
        out.push(make(chars, start + lead..end - trail));
        if trail > 0 {
            out.push(make(chars, end - trail..end));
        }
    }
    out
}

fn make(chars: &[char], span: Range<usize>) -> Token {
    Token {
        text: chars[span.clone()].iter().collect(),
        span,
    }
}

pub fn tokenize_sentence(text: &str) -> Vec<String> {
    let chars: Vec<char> = text.chars().collect();
    tokenize_spans(&chars).into_iter().map(|t| t.text).collect()
}

pub fn tokenize<S: AsRef<str>>(segments: &[S]) -> TokenizedDoc {
    TokenizedDoc {
        sentences: segments
            .iter()
            .map(|s| tokenize_sentence(s.as_ref()))
            .collect(),
    }
}
