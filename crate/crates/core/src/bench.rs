//! Experiment drivers over synthetic corpora: editor identification against
//! the text and statistics baselines, the ablation grid, behavioral
//! correlations and time prediction with dynamic editor embeddings.

use std::fmt::Write as _;

use thiserror::Error;

use crate::actions::{extract_actions, tokenize, Action, TokenizedDoc};
use crate::editor_space::{behavior_features, pearson, BehaviorFeatures, DynamicStore, EditorError};
use crate::models::{
    ablate_sequence, accuracy, featurize_delta, ids_of, parallel_map, train_baseline, train_identifier,
    train_time_predictor, evaluate_time, Ablation, BaselineInput, BaselineKind, ModelConfig, ModelError,
    TextVocab, TimeInput, TrainReport,
};
use crate::neural::EncoderConfig;
use crate::session_log::LogError;
use crate::symbols::{build_vocab, SymbolError, SymbolId, Vocabulary};
use crate::synth::{generate_corpus, CorpusSpec, DocumentSpec, EditorProfile, GroundTruth, SynthError};

#[derive(Debug, Error)]
pub enum BenchError {
    #[error(transparent)]
    Synth(#[from] SynthError),
    #[error(transparent)]
    Log(#[from] LogError),
    #[error(transparent)]
    Symbol(#[from] SymbolError),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Editor(#[from] EditorError),
}

impl From<crate::neural::NeuralError> for BenchError {
    fn from(e: crate::neural::NeuralError) -> Self {
        BenchError::Model(e.into())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Split {
    Train,
    Dev,
    Test,
}

/// Corpus layout: every editor edits each document once; documents are
/// split by round, so no document crosses splits.
#[derive(Debug, Clone, PartialEq)]
pub struct BenchSpec {
    pub train_rounds: usize,
    pub dev_rounds: usize,
    pub test_rounds: usize,
    pub document: DocumentSpec,
    pub model: ModelConfig,
    /// Argument words kept in the symbol vocabulary.
    pub vocab_words: usize,
}

/// Small model sized for single-core runs.
pub fn bench_model_config() -> ModelConfig {
    ModelConfig {
        encoder: EncoderConfig {
            embed_dim: 16,
            hidden_dim: 16,
            num_layers: 2,
            dropout_rate: 0.2,
        },
        repr_dim: 32,
        ff_dim: 32,
        delta_embed_dim: 8,
        text_vocab: 1000,
        lr: 5e-3,
        batch_size: 16,
        max_epochs: 30,
        patience: 5,
        clip_norm: 5.0,
    }
}

impl BenchSpec {
    /// 200/40/40 sessions per editor on short documents.
    pub fn identification() -> Self {
        BenchSpec {
            train_rounds: 200,
            dev_rounds: 40,
            test_rounds: 40,
            document: DocumentSpec {
                n_sentences: 5,
                words_per_sentence: 8,
                error_fraction: 0.12,
            },
            model: bench_model_config(),
            vocab_words: 50,
        }
    }

    /// 60/15/15 sessions per editor, for editor populations of about 20.
    pub fn time_prediction() -> Self {
        BenchSpec {
            train_rounds: 60,
            dev_rounds: 15,
            test_rounds: 15,
            ..Self::identification()
        }
    }

    pub fn rounds(&self) -> usize {
        self.train_rounds + self.dev_rounds + self.test_rounds
    }

    pub fn split_of(&self, round: usize) -> Split {
        if round < self.train_rounds {
            Split::Train
        } else if round < self.train_rounds + self.dev_rounds {
            Split::Dev
        } else {
            Split::Test
        }
    }
}

/// One compiled session with every model input.
#[derive(Debug, Clone, PartialEq)]
pub struct BenchSession {
    pub label: usize,
    pub split: Split,
    pub actions: Vec<Action>,
    pub symbols: Vec<SymbolId>,
    pub baseline: BaselineInput,
    pub source_ids: Vec<usize>,
    pub mt_tokens: usize,
    pub truth: GroundTruth,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Prepared {
    pub editors: Vec<String>,
    pub vocab: Vocabulary,
    pub text_vocab: TextVocab,
    /// Chronological order.
    pub sessions: Vec<BenchSession>,
}

impl Prepared {
    fn split(&self, split: Split) -> impl Iterator<Item = &BenchSession> {
        self.sessions.iter().filter(move |s| s.split == split)
    }
}

/// Generates, compiles and featurizes a corpus. Vocabularies come from the
/// training split only.
pub fn prepare(editors: &[EditorProfile], spec: &BenchSpec, seed: u64, threads: usize) -> Result<Prepared, BenchError> {
    let corpus = generate_corpus(
        editors,
        &CorpusSpec {
            rounds: spec.rounds(),
            document: spec.document,
            seed,
        },
        threads,
    )?;
    let compiled = parallel_map(&corpus.sessions, threads, |log| -> Result<_, LogError> {
        let actions = extract_actions(log)?;
        let source = tokenize(&log.source_segments);
        let mt = tokenize(&log.mt_segments);
        let pe_text = log.final_document()?;
        let pe = tokenize(&pe_text.split('\n').collect::<Vec<_>>());
        Ok((actions, source, mt, pe))
    });
    let compiled: Vec<(Vec<Action>, TokenizedDoc, TokenizedDoc, TokenizedDoc)> =
        compiled.into_iter().collect::<Result<_, _>>()?;
    let n_ed = editors.len();
    let split_of = |i: usize| spec.split_of(i / n_ed);

    let train_idx: Vec<usize> = (0..compiled.len()).filter(|&i| split_of(i) == Split::Train).collect();
    let vocab = build_vocab(train_idx.iter().map(|&i| compiled[i].0.as_slice()), spec.vocab_words)?;
    let text_vocab = TextVocab::build(
        train_idx
            .iter()
            .flat_map(|&i| [&compiled[i].1, &compiled[i].2, &compiled[i].3]),
        spec.model.text_vocab,
    );
    let sessions = compiled
        .into_iter()
        .zip(corpus.truth)
        .enumerate()
        .map(|(i, ((actions, source, mt, pe), truth))| BenchSession {
            label: i % n_ed,
            split: split_of(i),
            symbols: vocab.symbolize(&actions),
            baseline: BaselineInput {
                delta: featurize_delta(&source, &mt, &pe),
                mt: text_vocab.encode(&mt),
                pe: text_vocab.encode(&pe),
            },
            source_ids: text_vocab.encode(&source),
            mt_tokens: mt.word_count(),
            actions,
            truth,
        })
        .collect();
    Ok(Prepared {
        editors: editors.iter().map(|p| p.profile_id.clone()).collect(),
        vocab,
        text_vocab,
        sessions,
    })
}

/// Dev and test accuracy of one trained classifier.
#[derive(Debug, Clone, PartialEq)]
pub struct ClassifierResult {
    pub model: String,
    pub dev_accuracy: f64,
    pub test_accuracy: f64,
    pub report: TrainReport,
}

/// Ablated symbols; a sequence left with nothing but the stop symbol is kept
/// as that bare stop, so every session stays in its split.
fn ablated(p: &Prepared, split: Split, ablation: Option<&Ablation>) -> Result<Vec<(Vec<usize>, usize)>, ModelError> {
    p.split(split)
        .map(|s| {
            let ids = match ablation {
                Some(a) => match ablate_sequence(&s.symbols, &p.vocab, a) {
                    Err(ModelError::EmptyAfterAblation) => s.symbols.last().copied().into_iter().collect(),
                    r => r?,
                },
                None => s.symbols.clone(),
            };
            Ok((ids_of(&ids), s.label))
        })
        .collect()
}

/// Trains the action-sequence identifier, optionally on ablated sequences.
pub fn run_identifier(p: &Prepared, config: &ModelConfig, ablation: Option<&Ablation>, seed: u64) -> Result<ClassifierResult, BenchError> {
    let train = ablated(p, Split::Train, ablation)?;
    let dev = ablated(p, Split::Dev, ablation)?;
    let test = ablated(p, Split::Test, ablation)?;
    let (model, report) = train_identifier::<f32>(&train, &dev, p.editors.clone(), p.vocab.size(), config, seed)?;
    Ok(ClassifierResult {
        model: ablation.map_or_else(|| "actionseq".to_owned(), |a| a.name()),
        dev_accuracy: accuracy(&model, &dev)?,
        test_accuracy: accuracy(&model, &test)?,
        report,
    })
}

pub fn run_baseline(p: &Prepared, kind: BaselineKind, config: &ModelConfig, seed: u64) -> Result<ClassifierResult, BenchError> {
    let data = |split| -> Vec<(BaselineInput, usize)> { p.split(split).map(|s| (s.baseline.clone(), s.label)).collect() };
    let (train, dev, test) = (data(Split::Train), data(Split::Dev), data(Split::Test));
    let (model, report) = train_baseline::<f32>(kind, &train, &dev, p.editors.clone(), p.text_vocab.size(), config, seed)?;
    Ok(ClassifierResult {
        model: kind.as_str().to_owned(),
        dev_accuracy: accuracy(&model, &dev)?,
        test_accuracy: accuracy(&model, &test)?,
        report,
    })
}

/// Untrained identifier accuracy on the test split.
pub fn untrained_accuracy(p: &Prepared, config: &ModelConfig, seed: u64) -> Result<f64, BenchError> {
    let model = crate::models::IdentifierModel::<f32>::new(p.vocab.size(), p.editors.clone(), config.clone(), seed)?;
    Ok(accuracy(&model, &ablated(p, Split::Test, None)?)?)
}

/// The ablation variants: full, each category alone, each category dropped.
pub fn ablation_variants() -> Vec<Option<Ablation>> {
    use crate::models::Category;
    let mut v = vec![None];
    v.extend(Category::ALL.iter().map(|&c| Some(Ablation::only(&[c]))));
    v.extend(Category::ALL.iter().map(|&c| Some(Ablation::drop(&[c]))));
    v
}

/// Fixed-format result table; equal inputs give byte-identical output.
pub fn results_tsv(rows: &[(u64, ClassifierResult)]) -> String {
    let mut out = String::from("seed\tmodel\tbest_epoch\tdev_accuracy\ttest_accuracy\n");
    for (seed, r) in rows {
        let _ = writeln!(
            out,
            "{seed}\t{}\t{}\t{:.6}\t{:.6}",
            r.model, r.report.best_epoch, r.dev_accuracy, r.test_accuracy
        );
    }
    out
}

/// Per-editor behavior features and the two correlations over editors.
#[derive(Debug, Clone, PartialEq)]
pub struct CorrelationReport {
    pub editors: Vec<(String, usize, BehaviorFeatures)>,
    pub mouse_vs_jump_backs: f64,
    pub first_wait_vs_jump_backs: f64,
}

pub fn correlation_study(
    editors: &[EditorProfile],
    sessions_per_editor: usize,
    document: DocumentSpec,
    seed: u64,
    threads: usize,
) -> Result<CorrelationReport, BenchError> {
    let corpus = generate_corpus(
        editors,
        &CorpusSpec {
            rounds: sessions_per_editor,
            document,
            seed,
        },
        threads,
    )?;
    let compiled = parallel_map(&corpus.sessions, threads, |log| -> Result<_, LogError> {
        Ok((extract_actions(log)?, tokenize(&log.mt_segments).word_count()))
    });
    let compiled: Vec<(Vec<Action>, usize)> = compiled.into_iter().collect::<Result<_, _>>()?;
    correlation_from_sessions(editors.iter().map(|p| p.profile_id.as_str()), &compiled, editors.len())
}

/// Sessions laid out round-robin over `n_editors`.
fn correlation_from_sessions<'a>(
    ids: impl Iterator<Item = &'a str>,
    compiled: &[(Vec<Action>, usize)],
    n_editors: usize,
) -> Result<CorrelationReport, BenchError> {
    let mut rows = Vec::new();
    for (e, id) in ids.enumerate() {
        let mine: Vec<&(Vec<Action>, usize)> = compiled.iter().skip(e).step_by(n_editors).collect();
        let pairs: Vec<(&[Action], usize)> = mine.iter().map(|(a, n)| (a.as_slice(), *n)).collect();
        rows.push((id.to_owned(), pairs.len(), behavior_features(&pairs)?));
    }
    let col = |f: fn(&BehaviorFeatures) -> f64| rows.iter().map(|r| f(&r.2)).collect::<Vec<_>>();
    let jb = col(|f| f.jump_backs_per_mt_token);
    Ok(CorrelationReport {
        mouse_vs_jump_backs: pearson(&col(|f| f.mouse_events_per_mt_token), &jb),
        first_wait_vs_jump_backs: pearson(&col(|f| f.avg_first_wait), &jb),
        editors: rows,
    })
}

/// Time prediction with and without dynamic editor embeddings.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeReport {
    pub identifier_test_accuracy: f64,
    pub with_editor: TimeScores,
    pub without_editor: TimeScores,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeScores {
    pub dev_mse: f64,
    pub dev_pearson: f64,
    pub test_mse: f64,
    pub test_pearson: f64,
}

impl TimeReport {
    pub fn to_tsv(&self) -> String {
        let mut out = format!("identifier_test_accuracy\t{:.6}\nmodel\tdev_mse\tdev_pearson\ttest_mse\ttest_pearson\n", self.identifier_test_accuracy);
        for (name, s) in [("editor", &self.with_editor), ("no_editor", &self.without_editor)] {
            let _ = writeln!(
                out,
                "{name}\t{:.6}\t{:.6}\t{:.6}\t{:.6}",
                s.dev_mse, s.dev_pearson, s.test_mse, s.test_pearson
            );
        }
        out
    }
}

/// Trains the identifier on the training rounds, walks the corpus in
/// chronological order querying each session's editor vector from a
/// [`DynamicStore`] before adding its own embedding, and trains the time
/// predictor once with these vectors and once with zeros.
pub fn time_study(p: &Prepared, config: &ModelConfig, seed: u64) -> Result<TimeReport, BenchError> {
    let train_ids = ablated(p, Split::Train, None)?;
    let dev_ids = ablated(p, Split::Dev, None)?;
    let (ident, _) = train_identifier::<f32>(&train_ids, &dev_ids, p.editors.clone(), p.vocab.size(), config, seed)?;
    let identifier_test_accuracy = accuracy(&ident, &ablated(p, Split::Test, None)?)?;

    let dim = config.repr_dim;
    let mut store = DynamicStore::<f32>::new(dim);
    let mut editor_vecs = Vec::with_capacity(p.sessions.len());
    for s in &p.sessions {
        let editor = &p.editors[s.label];
        editor_vecs.push(store.query(editor));
        store.update(editor, ident.session_embedding(&ids_of(&s.symbols))?)?;
    }
    let mut scores = Vec::new();
    for use_editor in [true, false] {
        let data = |split| -> Vec<(TimeInput<f32>, f64)> {
            p.sessions
                .iter()
                .zip(&editor_vecs)
                .filter(|(s, _)| s.split == split)
                .map(|(s, v)| {
                    let editor = if use_editor { v.clone() } else { vec![0.0; dim] };
                    (
                        TimeInput {
                            source: s.source_ids.clone(),
                            mt: s.baseline.mt.clone(),
                            editor,
                        },
                        s.truth.log_time_per_word(),
                    )
                })
                .collect()
        };
        let (train, dev, test) = (data(Split::Train), data(Split::Dev), data(Split::Test));
        let (model, _) = train_time_predictor::<f32>(&train, &dev, p.text_vocab.size(), dim, config, seed)?;
        let (dev_mse, dev_pearson) = evaluate_time(&model, &dev)?;
        let (test_mse, test_pearson) = evaluate_time(&model, &test)?;
        scores.push(TimeScores {
            dev_mse,
            dev_pearson,
            test_mse,
            test_pearson,
        });
    }
    Ok(TimeReport {
        identifier_test_accuracy,
        with_editor: scores[0],
        without_editor: scores[1],
    })
}
