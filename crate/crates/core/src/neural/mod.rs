//! Minimal neural-network core with hand-written backward passes.
//!
//! Everything is generic over [`Scalar`] so the same code runs in `f32` for
//! training and in `f64` for finite-difference gradient checks. Sequences are
//! processed one sample at a time; minibatches accumulate per-sample
//! gradients, which makes padding and masking unnecessary.

mod adam;
mod attention;
mod checkpoint;
mod gradcheck;
mod layers;
mod loss;
mod lstm;
mod tensor;

pub use adam::{Adam, AdamConfig, AdamState};
pub use attention::{attend, attend_backward, Attention, AttentionGrads};
pub use checkpoint::{read_checkpoint, write_checkpoint, Checkpoint};
pub use gradcheck::{grad_check, relative_error, GradCheckOptions, GradCheckReport, Stencil};
pub use layers::{relu, relu_backward, Dense, Dropout, Embedding};
pub use loss::{mse, softmax, softmax_cross_entropy};
pub use lstm::{BiLstm, EncoderCache, EncoderOutput, LstmCell, LstmTrace};
pub use tensor::{Gradients, ParamId, Params, Tensor};

use crate::scalar::Scalar;

/// Shape of a bidirectional sequence encoder.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct EncoderConfig {
    pub embed_dim: usize,
    /// Per direction.
    pub hidden_dim: usize,
    pub num_layers: usize,
    pub dropout_rate: f64,
}

impl Default for EncoderConfig {
    fn default() -> Self {
        EncoderConfig {
            embed_dim: 64,
            hidden_dim: 128,
            num_layers: 2,
            dropout_rate: 0.3,
        }
    }
}

impl EncoderConfig {
    pub fn validate(&self) -> Result<(), String> {
        if self.embed_dim == 0 || self.hidden_dim == 0 || self.num_layers == 0 {
            return Err("encoder dimensions must be at least 1".into());
        }
        if !(0.0..1.0).contains(&self.dropout_rate) {
            return Err("dropout_rate must be in [0, 1)".into());
        }
        Ok(())
    }
}

/// Random generator used for initialization, dropout and shuffling.
pub type Rng = rand_chacha::ChaCha8Rng;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum NeuralError {
    #[error("index {id} out of range for table with {rows} rows")]
    IdOutOfRange { id: usize, rows: usize },
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimMismatch { expected: usize, got: usize },
    #[error("empty input sequence")]
    EmptySequence,
    #[error("non-finite loss")]
    NonFiniteLoss,
    #[error("checkpoint: {0}")]
    Checkpoint(String),
}

/// A differentiable model with a flat output vector (logits or a scalar).
///
/// `forward` receives a dropout generator in training mode and `None` at
/// inference; the returned cache is what `backward` needs to accumulate
/// parameter gradients into `grads`.
pub trait Network<S: Scalar> {
    type Input: ?Sized;
    type Cache;

    fn params(&self) -> &Params<S>;
    fn params_mut(&mut self) -> &mut Params<S>;
    fn forward(
        &self,
        input: &Self::Input,
        rng: Option<&mut Rng>,
    ) -> Result<(Vec<S>, Self::Cache), NeuralError>;
    fn backward(
        &self,
        input: &Self::Input,
        cache: Self::Cache,
        d_out: &[S],
        grads: &mut Gradients<S>,
    );
}

/// Forward, cross-entropy and backward for one labelled sample; returns the loss.
pub fn classification_step<S: Scalar, N: Network<S>>(
    net: &N,
    input: &N::Input,
    label: usize,
    rng: Option<&mut Rng>,
    grads: &mut Gradients<S>,
) -> Result<S, NeuralError> {
    let (logits, cache) = net.forward(input, rng)?;
    let (loss, d) = softmax_cross_entropy(&logits, label)?;
    net.backward(input, cache, &d, grads);
    Ok(loss)
}

/// Forward, squared error and backward for one regression sample.
pub fn regression_step<S: Scalar, N: Network<S>>(
    net: &N,
    input: &N::Input,
    target: S,
    rng: Option<&mut Rng>,
    grads: &mut Gradients<S>,
) -> Result<S, NeuralError> {
    let (out, cache) = net.forward(input, rng)?;
    let (loss, d) = mse(&out, &[target])?;
    net.backward(input, cache, &d, grads);
    Ok(loss)
}
