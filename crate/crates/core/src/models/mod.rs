//! Editor identifier, text and statistics baselines, sequence ablation and
//! the post-editing time predictor.

mod ablation;
mod baselines;
mod config;
mod encoder;
mod identifier;
mod time;
mod train;

pub use ablation::{ablate_sequence, Ablation, Category};
pub use baselines::{
    featurize_delta, train_baseline, word_edit_distance, BaselineCache, BaselineInput, BaselineKind,
    BaselineModel, DeltaFeatures, TextVocab, TEXT_SEP, TEXT_UNK,
};
pub use config::{kv_lines, ConfigError, ModelConfig, MODEL_KEYS};
pub use encoder::{CrossAttention, SeqEncoder};
pub use identifier::{ids_of, train_identifier, IdentifierCache, IdentifierModel, LabeledSeq};
pub use time::{evaluate_time, time_loss, train_time_predictor, TimeCache, TimeInput, TimePredictor};
pub use train::{fit, parallel_map, DevScore, EpochRecord, TrainReport};

use crate::neural::{softmax, Network, NeuralError};
use crate::scalar::Scalar;

#[derive(Debug, thiserror::Error)]
pub enum ModelError {
    #[error(transparent)]
    Neural(#[from] NeuralError),
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("training diverged at epoch {epoch}")]
    Divergence { epoch: usize },
    #[error("need at least 2 editors, got {0}")]
    TooFewEditors(usize),
    #[error("label {0} out of range")]
    LabelOutOfRange(usize),
    #[error("empty dataset")]
    EmptyDataset,
    #[error("non-finite regression target")]
    NonFiniteTarget,
    #[error("nothing but the stop symbol remains after ablation")]
    EmptyAfterAblation,
    #[error("symbol: {0}")]
    Symbol(String),
    #[error("checkpoint: {0}")]
    Checkpoint(String),
}

/// Softmax of the evaluation-mode logits.
pub fn predict_proba<S: Scalar, N: Network<S>>(net: &N, x: &N::Input) -> Result<Vec<S>, NeuralError> {
    Ok(softmax(&net.forward(x, None)?.0))
}

/// Index of the largest value; ties go to the lowest index.
pub fn argmax<S: Scalar>(v: &[S]) -> usize {
    let mut best = 0;
    for (i, &x) in v.iter().enumerate() {
        if x > v[best] {
            best = i;
        }
    }
    best
}

/// Fraction of samples whose evaluation-mode argmax equals the label.
pub fn accuracy<S, N, X>(net: &N, data: &[(X, usize)]) -> Result<f64, NeuralError>
where
    S: Scalar,
    N: Network<S>,
    X: std::borrow::Borrow<N::Input>,
{
    if data.is_empty() {
        return Ok(0.0);
    }
    let mut hits = 0usize;
    for (x, y) in data {
        let (logits, _) = net.forward(x.borrow(), None)?;
        hits += usize::from(argmax(&logits) == *y);
    }
    Ok(hits as f64 / data.len() as f64)
}
