use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use rand::SeedableRng;

use crate::actions::TokenizedDoc;
use crate::neural::{
    classification_step, read_checkpoint, relu, relu_backward, write_checkpoint, Dense, Dropout, Embedding,
    Gradients, Network, NeuralError, Params, Rng,
};
use crate::scalar::Scalar;
use crate::symbols::{bin_value, BinKind};

use super::encoder::{CrossAttention, CrossCache, SeqCache, SeqEncoder};
use super::train::{fit, DevScore, TrainReport};
use super::{accuracy, ModelConfig, ModelError};

/// Corpus vocabulary for the text baselines: UNK, a sentence separator, then
/// the most frequent tokens.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TextVocab {
    words: Vec<String>,
    index: HashMap<String, usize>,
}

pub const TEXT_UNK: usize = 0;
pub const TEXT_SEP: usize = 1;
const SEP_TOKEN: &str = "</s>";

impl TextVocab {
    /// Keeps the `max_words` most frequent tokens; ties break lexicographically.
    pub fn build<'a>(docs: impl IntoIterator<Item = &'a TokenizedDoc>, max_words: usize) -> Self {
        let mut counts: HashMap<&str, usize> = HashMap::new();
        for d in docs {
            for w in d.sentences.iter().flatten() {
                *counts.entry(w.as_str()).or_default() += 1;
            }
        }
        let mut ranked: Vec<(&str, usize)> = counts.into_iter().collect();
        ranked.sort_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(b.0)));
        Self::from_words(ranked.into_iter().take(max_words).map(|(w, _)| w.to_owned()).collect())
    }

    pub fn from_words(words: Vec<String>) -> Self {
        let mut all = vec!["<unk>".to_owned(), SEP_TOKEN.to_owned()];
        all.extend(words);
        let index = all.iter().enumerate().map(|(i, w)| (w.clone(), i)).collect();
        TextVocab { words: all, index }
    }

    /// Number of embedding rows, including UNK and the separator.
    pub fn size(&self) -> usize {
        self.words.len()
    }

    /// Content words (without the two reserved entries).
    pub fn words(&self) -> &[String] {
        &self.words[2..]
    }

    /// Token ids with a separator between sentences; an empty document
    /// encodes as a single UNK.
    pub fn encode(&self, doc: &TokenizedDoc) -> Vec<usize> {
        let mut out = Vec::new();
        for (i, s) in doc.sentences.iter().enumerate() {
            if i > 0 {
                out.push(TEXT_SEP);
            }
            out.extend(s.iter().map(|w| *self.index.get(w).unwrap_or(&TEXT_UNK)));
        }
        if out.iter().all(|&t| t == TEXT_SEP) {
            return vec![TEXT_UNK];
        }
        out
    }
}

/// Five coarse document statistics used by the Delta baseline.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DeltaFeatures {
    pub sentence_count: u32,
    pub word_edit_distance: u32,
    pub source_word_count: u32,
    pub mt_word_count: u32,
    pub pe_word_count: u32,
}

impl DeltaFeatures {
    pub fn as_array(&self) -> [u32; 5] {
        [
            self.sentence_count,
            self.word_edit_distance,
            self.source_word_count,
            self.mt_word_count,
            self.pe_word_count,
        ]
    }

    /// Bin index of each feature on the wait/word-jump edge set.
    pub fn bins(&self) -> [usize; 5] {
        self.as_array().map(|v| bin_value(BinKind::Wait, v as u64).index)
    }
}

/// Word-level Levenshtein distance.
pub fn word_edit_distance(a: &[String], b: &[String]) -> usize {
    let mut prev: Vec<usize> = (0..=b.len()).collect();
    let mut cur = vec![0; b.len() + 1];
    for (i, x) in a.iter().enumerate() {
        cur[0] = i + 1;
        for (j, y) in b.iter().enumerate() {
            let sub = prev[j] + usize::from(x != y);
            cur[j + 1] = sub.min(prev[j + 1] + 1).min(cur[j] + 1);
        }
        std::mem::swap(&mut prev, &mut cur);
    }
    prev[b.len()]
}

pub fn featurize_delta(source: &TokenizedDoc, mt: &TokenizedDoc, pe: &TokenizedDoc) -> DeltaFeatures {
    let m = mt.flatten();
    let p = pe.flatten();
    DeltaFeatures {
        sentence_count: mt.sentences.len() as u32,
        word_edit_distance: word_edit_distance(&m, &p) as u32,
        source_word_count: source.word_count() as u32,
        mt_word_count: m.len() as u32,
        pe_word_count: p.len() as u32,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BaselineKind {
    Delta,
    Mt,
    Pe,
    MtPe,
    MtPeAtt,
}

impl BaselineKind {
    pub const ALL: [BaselineKind; 5] = [
        BaselineKind::Delta,
        BaselineKind::Mt,
        BaselineKind::Pe,
        BaselineKind::MtPe,
        BaselineKind::MtPeAtt,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            BaselineKind::Delta => "delta",
            BaselineKind::Mt => "mt",
            BaselineKind::Pe => "pe",
            BaselineKind::MtPe => "mt+pe",
            BaselineKind::MtPeAtt => "mt+pe+att",
        }
    }
}

impl fmt::Display for BaselineKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for BaselineKind {
    type Err = ModelError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        BaselineKind::ALL
            .into_iter()
            .find(|k| k.as_str().eq_ignore_ascii_case(s))
            .ok_or_else(|| ModelError::Config(super::ConfigError::BadValue {
                key: "baseline".into(),
                value: s.to_owned(),
            }))
    }
}

/// Input of any baseline: Delta uses `delta`, text models use `mt`/`pe` ids.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BaselineInput {
    pub delta: DeltaFeatures,
    pub mt: Vec<usize>,
    pub pe: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Arch {
    Delta { embs: [Embedding; 5], ff: Dense },
    Single { enc: SeqEncoder, ff: Dense, use_pe: bool },
    Dual { mt: SeqEncoder, pe: SeqEncoder, ff: Dense },
    Att { cross: CrossAttention },
}

#[derive(Debug, Clone)]
pub struct BaselineModel<S> {
    pub kind: BaselineKind,
    pub params: Params<S>,
    pub config: ModelConfig,
    pub labels: Vec<String>,
    pub text_vocab_size: usize,
    arch: Arch,
    dropout: Dropout,
    out: Dense,
}

enum Body<S> {
    Delta { bins: [usize; 5], x: Vec<S>, h: Vec<S> },
    Single { c: SeqCache<S>, h: Vec<S> },
    Dual { cm: SeqCache<S>, cp: SeqCache<S>, x: Vec<S>, h: Vec<S> },
    Att { c: CrossCache<S> },
}

pub struct BaselineCache<S> {
    body: Body<S>,
    /// Input to the output layer after dropout.
    z: Vec<S>,
    mask: Option<Vec<S>>,
}

/// Number of bins of the wait/word-jump scheme.
const DELTA_BINS: usize = 16;

impl<S: Scalar> BaselineModel<S> {
    pub fn new(
        kind: BaselineKind,
        text_vocab_size: usize,
        labels: Vec<String>,
        config: ModelConfig,
        seed: u64,
    ) -> Result<Self, ModelError> {
        config.validate()?;
        let mut rng = Rng::seed_from_u64(seed);
        let mut p = Params::new();
        let e = &config.encoder;
        let ff_dim = config.ff_dim;
        let arch = match kind {
            BaselineKind::Delta => {
                let names = ["sentences", "distance", "source_words", "mt_words", "pe_words"];
                let embs = names.map(|n| {
                    Embedding::new(&mut p, &format!("delta.{n}"), DELTA_BINS, config.delta_embed_dim, &mut rng)
                });
                let ff = Dense::new(&mut p, "ff", 5 * config.delta_embed_dim, ff_dim, &mut rng);
                Arch::Delta { embs, ff }
            }
            BaselineKind::Mt | BaselineKind::Pe => {
                let emb = Embedding::new(&mut p, "words", text_vocab_size, e.embed_dim, &mut rng);
                let enc = SeqEncoder::new(&mut p, "encoder", emb, e, &mut rng);
                let ff = Dense::new(&mut p, "ff", 2 * e.hidden_dim, ff_dim, &mut rng);
                Arch::Single {
                    enc,
                    ff,
                    use_pe: kind == BaselineKind::Pe,
                }
            }
            BaselineKind::MtPe => {
                let emb = Embedding::new(&mut p, "words", text_vocab_size, e.embed_dim, &mut rng);
                let mt = SeqEncoder::new(&mut p, "enc_mt", emb, e, &mut rng);
                let pe = SeqEncoder::new(&mut p, "enc_pe", emb, e, &mut rng);
                let ff = Dense::new(&mut p, "ff", 4 * e.hidden_dim, ff_dim, &mut rng);
                Arch::Dual { mt, pe, ff }
            }
            BaselineKind::MtPeAtt => {
                let emb = Embedding::new(&mut p, "words", text_vocab_size, e.embed_dim, &mut rng);
                let cross = CrossAttention::new(&mut p, "cross", emb, e, ff_dim, &mut rng);
                Arch::Att { cross }
            }
        };
        let in_dim = match &arch {
            Arch::Att { cross } => cross.output_dim(),
            _ => ff_dim,
        };
        let out = Dense::new(&mut p, "softmax", in_dim, labels.len(), &mut rng);
        Ok(BaselineModel {
            kind,
            params: p,
            dropout: Dropout::new(e.dropout_rate),
            config,
            labels,
            text_vocab_size,
            arch,
            out,
        })
    }

    pub fn predict(&self, x: &BaselineInput) -> Result<Vec<S>, NeuralError> {
        super::predict_proba(self, x)
    }

    pub fn to_checkpoint(&self) -> Vec<u8> {
        let meta = serde_json::json!({
            "kind": "baseline",
            "baseline": self.kind.as_str(),
            "labels": self.labels,
            "text_vocab_size": self.text_vocab_size,
            "config": self.config,
        });
        write_checkpoint(&self.params, &meta)
    }

    pub fn from_checkpoint(bytes: &[u8]) -> Result<Self, ModelError> {
        let ck = read_checkpoint(bytes)?;
        let bad = |m: String| ModelError::Checkpoint(m);
        if ck.meta["kind"] != "baseline" {
            return Err(bad("not a baseline checkpoint".into()));
        }
        let kind: BaselineKind = ck.meta["baseline"].as_str().unwrap_or("").parse()?;
        let labels: Vec<String> =
            serde_json::from_value(ck.meta["labels"].clone()).map_err(|e| bad(e.to_string()))?;
        let config: ModelConfig =
            serde_json::from_value(ck.meta["config"].clone()).map_err(|e| bad(e.to_string()))?;
        let n = ck.meta["text_vocab_size"]
            .as_u64()
            .ok_or_else(|| bad("missing text_vocab_size".into()))? as usize;
        let mut m = Self::new(kind, n, labels, config, 0)?;
        ck.load_into(&mut m.params)?;
        Ok(m)
    }
}

impl<S: Scalar> Network<S> for BaselineModel<S> {
    type Input = BaselineInput;
    type Cache = BaselineCache<S>;

    fn params(&self) -> &Params<S> {
        &self.params
    }

    fn params_mut(&mut self) -> &mut Params<S> {
        &mut self.params
    }

    fn forward(&self, x: &BaselineInput, rng: Option<&mut Rng>) -> Result<(Vec<S>, Self::Cache), NeuralError> {
        let p = &self.params;
        let (pre, body) = match &self.arch {
            Arch::Delta { embs, ff } => {
                let bins = x.delta.bins();
                let mut v = Vec::with_capacity(5 * self.config.delta_embed_dim);
                for (e, &b) in embs.iter().zip(&bins) {
                    v.extend(e.forward(p, &[b])?.remove(0));
                }
                let h = relu(&ff.forward(p, &v));
                (h.clone(), Body::Delta { bins, x: v, h })
            }
            Arch::Single { enc, ff, use_pe } => {
                let ids = if *use_pe { &x.pe } else { &x.mt };
                let c = enc.forward(p, ids)?;
                let h = relu(&ff.forward(p, &c.out.last));
                (h.clone(), Body::Single { c, h })
            }
            Arch::Dual { mt, pe, ff } => {
                let cm = mt.forward(p, &x.mt)?;
                let cp = pe.forward(p, &x.pe)?;
                let v = [cm.out.last.as_slice(), &cp.out.last].concat();
                let h = relu(&ff.forward(p, &v));
                (h.clone(), Body::Dual { cm, cp, x: v, h })
            }
            Arch::Att { cross } => {
                let (u, c) = cross.forward(p, &x.mt, &x.pe)?;
                (u, Body::Att { c })
            }
        };
        let (z, mask) = self.dropout.forward(&pre, rng);
        let logits = self.out.forward(p, &z);
        Ok((logits, BaselineCache { body, z, mask }))
    }

    fn backward(&self, x: &BaselineInput, c: Self::Cache, d_out: &[S], grads: &mut Gradients<S>) {
        let p = &self.params;
        let dz = self.out.backward(p, &c.z, d_out, grads);
        let dpre = Dropout::backward(c.mask.as_deref(), &dz);
        match (&self.arch, c.body) {
            (Arch::Delta { embs, ff }, Body::Delta { bins, x: v, h }) => {
                let dv = ff.backward(p, &v, &relu_backward(&h, &dpre), grads);
                for (k, (e, &b)) in embs.iter().zip(&bins).enumerate() {
                    let w = e.dim;
                    e.backward(&[b], &[dv[k * w..(k + 1) * w].to_vec()], grads);
                }
            }
            (Arch::Single { enc, ff, use_pe }, Body::Single { c: sc, h }) => {
                let ids = if *use_pe { &x.pe } else { &x.mt };
                let dl = ff.backward(p, &sc.out.last, &relu_backward(&h, &dpre), grads);
                enc.backward(p, ids, &sc, None, Some(&dl), grads);
            }
            (Arch::Dual { mt, pe, ff }, Body::Dual { cm, cp, x: v, h }) => {
                let dv = ff.backward(p, &v, &relu_backward(&h, &dpre), grads);
                let (dm, dp) = dv.split_at(cm.out.last.len());
                mt.backward(p, &x.mt, &cm, None, Some(dm), grads);
                pe.backward(p, &x.pe, &cp, None, Some(dp), grads);
            }
            (Arch::Att { cross }, Body::Att { c: cc }) => {
                cross.backward(p, &x.mt, &x.pe, &cc, &dpre, grads);
            }
            _ => unreachable!("cache does not match architecture"),
        }
    }
}

pub fn train_baseline<S: Scalar>(
    kind: BaselineKind,
    train: &[(BaselineInput, usize)],
    dev: &[(BaselineInput, usize)],
    labels: Vec<String>,
    text_vocab_size: usize,
    config: &ModelConfig,
    seed: u64,
) -> Result<(BaselineModel<S>, TrainReport), ModelError> {
    if labels.len() < 2 {
        return Err(ModelError::TooFewEditors(labels.len()));
    }
    if train.is_empty() {
        return Err(ModelError::EmptyDataset);
    }
    if let Some(&(_, y)) = train.iter().chain(dev).find(|(_, y)| *y >= labels.len()) {
        return Err(ModelError::LabelOutOfRange(y));
    }
    let mut model = BaselineModel::<S>::new(kind, text_vocab_size, labels, config.clone(), seed)?;
    let mut rng = Rng::seed_from_u64(seed.wrapping_add(1));
    let eval_set = if dev.is_empty() { train } else { dev };
    let report = fit(
        &mut model,
        train,
        config,
        "accuracy",
        &mut rng,
        |net, (x, y), rng, g| classification_step(net, x, *y, Some(rng), g),
        |net| {
            Ok(DevScore {
                score: accuracy(net, eval_set)?,
                extra: Vec::new(),
            })
        },
    )?;
    Ok((model, report))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::actions::tokenize;

    fn doc(s: &[&str]) -> TokenizedDoc {
        tokenize(s)
    }

    #[test]
    fn levenshtein_cases() {
        let w = |s: &str| s.split(' ').map(String::from).collect::<Vec<_>>();
        assert_eq!(word_edit_distance(&w("a b c"), &w("a b c")), 0);
        assert_eq!(word_edit_distance(&w("a b c"), &[]), 3);
        assert_eq!(word_edit_distance(&w("a b c d"), &w("a x c")), 2);
    }

    #[test]
    fn text_vocab_ranks_and_encodes() {
        let d1 = doc(&["b a a", "c"]);
        let d2 = doc(&["a b"]);
        let v = TextVocab::build([&d1, &d2], 2);
        assert_eq!(v.words(), &["a".to_owned(), "b".to_owned()]);
        assert_eq!(v.encode(&d1), vec![3, 2, 2, TEXT_SEP, TEXT_UNK]);
        assert_eq!(v.encode(&doc(&[""])), vec![TEXT_UNK]);
    }

    #[test]
    fn kinds_parse() {
        for k in BaselineKind::ALL {
            assert_eq!(k.as_str().parse::<BaselineKind>().unwrap(), k);
        }
        assert!("nope".parse::<BaselineKind>().is_err());
    }

    #[test]
    fn every_kind_predicts_and_round_trips() {
        let mut c = ModelConfig::default();
        c.encoder.embed_dim = 3;
        c.encoder.hidden_dim = 3;
        c.ff_dim = 4;
        c.delta_embed_dim = 2;
        let x = BaselineInput {
            delta: featurize_delta(&doc(&["a b"]), &doc(&["a b"]), &doc(&["a"])),
            mt: vec![2, 3],
            pe: vec![2],
        };
        for k in BaselineKind::ALL {
            let m = BaselineModel::<f64>::new(k, 5, vec!["a".into(), "b".into(), "c".into()], c.clone(), 1).unwrap();
            let p = m.predict(&x).unwrap();
            assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-9);
            let back = BaselineModel::<f64>::from_checkpoint(&m.to_checkpoint()).unwrap();
            assert_eq!(back.kind, k);
            let q = back.predict(&x).unwrap();
            for (a, b) in p.iter().zip(&q) {
                assert!((a - b).abs() < 1e-6);
            }
        }
    }
}
