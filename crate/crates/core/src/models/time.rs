use rand::SeedableRng;

use crate::editor_space::pearson;
use crate::neural::{
    mse, read_checkpoint, regression_step, relu, relu_backward, write_checkpoint, Dense, Dropout, Embedding,
    Gradients, Network, NeuralError, Params, Rng,
};
use crate::scalar::Scalar;

use super::encoder::{CrossAttention, CrossCache};
use super::train::{fit, DevScore, TrainReport};
use super::{ModelConfig, ModelError};

/// Source and MT token ids plus the editor vector (zeros when unknown).
#[derive(Debug, Clone, PartialEq)]
pub struct TimeInput<S> {
    pub source: Vec<usize>,
    pub mt: Vec<usize>,
    pub editor: Vec<S>,
}

/// Cross-attending source/MT encoders whose pooled outputs are concatenated
/// with an editor vector and regressed to log seconds per source word.
#[derive(Debug, Clone)]
pub struct TimePredictor<S> {
    pub params: Params<S>,
    pub config: ModelConfig,
    pub text_vocab_size: usize,
    pub editor_dim: usize,
    cross: CrossAttention,
    dropout: Dropout,
    head: Dense,
    out: Dense,
}

pub struct TimeCache<S> {
    cross: CrossCache<S>,
    z: Vec<S>,
    mask: Option<Vec<S>>,
    h: Vec<S>,
}

impl<S: Scalar> TimePredictor<S> {
    pub fn new(text_vocab_size: usize, editor_dim: usize, config: ModelConfig, seed: u64) -> Result<Self, ModelError> {
        config.validate()?;
        let mut rng = Rng::seed_from_u64(seed);
        let mut p = Params::new();
        let e = &config.encoder;
        let emb = Embedding::new(&mut p, "words", text_vocab_size, e.embed_dim, &mut rng);
        let cross = CrossAttention::new(&mut p, "cross", emb, e, config.ff_dim, &mut rng);
        let head = Dense::new(&mut p, "head", cross.output_dim() + editor_dim, config.ff_dim, &mut rng);
        let out = Dense::new(&mut p, "out", config.ff_dim, 1, &mut rng);
        Ok(TimePredictor {
            params: p,
            dropout: Dropout::new(e.dropout_rate),
            config,
            text_vocab_size,
            editor_dim,
            cross,
            head,
            out,
        })
    }

    pub fn predict_log_time(&self, x: &TimeInput<S>) -> Result<S, NeuralError> {
        Ok(self.forward(x, None)?.0[0])
    }

    pub fn to_checkpoint(&self) -> Vec<u8> {
        let meta = serde_json::json!({
            "kind": "time",
            "text_vocab_size": self.text_vocab_size,
            "editor_dim": self.editor_dim,
            "config": self.config,
        });
        write_checkpoint(&self.params, &meta)
    }

    pub fn from_checkpoint(bytes: &[u8]) -> Result<Self, ModelError> {
        let ck = read_checkpoint(bytes)?;
        let bad = |m: &str| ModelError::Checkpoint(m.to_owned());
        if ck.meta["kind"] != "time" {
            return Err(bad("not a time-predictor checkpoint"));
        }
        let config: ModelConfig =
            serde_json::from_value(ck.meta["config"].clone()).map_err(|e| bad(&e.to_string()))?;
        let n = ck.meta["text_vocab_size"].as_u64().ok_or_else(|| bad("missing text_vocab_size"))?;
        let d = ck.meta["editor_dim"].as_u64().ok_or_else(|| bad("missing editor_dim"))?;
        let mut m = Self::new(n as usize, d as usize, config, 0)?;
        ck.load_into(&mut m.params)?;
        Ok(m)
    }
}

impl<S: Scalar> Network<S> for TimePredictor<S> {
    type Input = TimeInput<S>;
    type Cache = TimeCache<S>;

    fn params(&self) -> &Params<S> {
        &self.params
    }

    fn params_mut(&mut self) -> &mut Params<S> {
        &mut self.params
    }

    fn forward(&self, x: &TimeInput<S>, rng: Option<&mut Rng>) -> Result<(Vec<S>, Self::Cache), NeuralError> {
        if x.editor.len() != self.editor_dim {
            return Err(NeuralError::DimMismatch {
                expected: self.editor_dim,
                got: x.editor.len(),
            });
        }
        let p = &self.params;
        let (u, cross) = self.cross.forward(p, &x.source, &x.mt)?;
        let joined = [u.as_slice(), &x.editor].concat();
        let (z, mask) = self.dropout.forward(&joined, rng);
        let h = relu(&self.head.forward(p, &z));
        let y = self.out.forward(p, &h);
        Ok((y, TimeCache { cross, z, mask, h }))
    }

    fn backward(&self, x: &TimeInput<S>, c: Self::Cache, d_out: &[S], grads: &mut Gradients<S>) {
        let p = &self.params;
        let dh = self.out.backward(p, &c.h, d_out, grads);
        let dz = self.head.backward(p, &c.z, &relu_backward(&c.h, &dh), grads);
        let dj = Dropout::backward(c.mask.as_deref(), &dz);
        let du = &dj[..self.cross.output_dim()];
        self.cross.backward(p, &x.source, &x.mt, &c.cross, du, grads);
    }
}

/// Mean squared error and Pearson correlation of predictions on `data`.
pub fn evaluate_time<S: Scalar>(model: &TimePredictor<S>, data: &[(TimeInput<S>, f64)]) -> Result<(f64, f64), ModelError> {
    let mut preds = Vec::with_capacity(data.len());
    let mut err = 0.0;
    for (x, y) in data {
        let p = model.predict_log_time(x)?.as_f64();
        err += (p - y) * (p - y);
        preds.push(p);
    }
    let truth: Vec<f64> = data.iter().map(|(_, y)| *y).collect();
    Ok((err / data.len().max(1) as f64, pearson(&preds, &truth)))
}

/// Trains with squared error; early stopping on dev MSE. The report carries
/// dev Pearson per epoch.
pub fn train_time_predictor<S: Scalar>(
    train: &[(TimeInput<S>, f64)],
    dev: &[(TimeInput<S>, f64)],
    text_vocab_size: usize,
    editor_dim: usize,
    config: &ModelConfig,
    seed: u64,
) -> Result<(TimePredictor<S>, TrainReport), ModelError> {
    if train.is_empty() {
        return Err(ModelError::EmptyDataset);
    }
    if train.iter().chain(dev).any(|(_, y)| !y.is_finite()) {
        return Err(ModelError::NonFiniteTarget);
    }
    let mut model = TimePredictor::<S>::new(text_vocab_size, editor_dim, config.clone(), seed)?;
    let mut rng = Rng::seed_from_u64(seed.wrapping_add(1));
    let eval_set = if dev.is_empty() { train } else { dev };
    let report = fit(
        &mut model,
        train,
        config,
        "neg_mse",
        &mut rng,
        |net, (x, y), rng, g| regression_step(net, x, S::of(*y), Some(rng), g),
        |net| {
            let (m, r) = evaluate_time(net, eval_set)?;
            Ok(DevScore {
                score: -m,
                extra: vec![("pearson".into(), r)],
            })
        },
    )?;
    Ok((model, report))
}

/// Squared error of a single prediction; exposed for gradient checks.
pub fn time_loss<S: Scalar>(model: &TimePredictor<S>, x: &TimeInput<S>, y: S, rng: Option<&mut Rng>) -> Result<S, NeuralError> {
    let (out, _) = model.forward(x, rng)?;
    Ok(mse(&out, &[y])?.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tiny() -> ModelConfig {
        let mut c = ModelConfig::default();
        c.encoder.embed_dim = 4;
        c.encoder.hidden_dim = 4;
        c.encoder.num_layers = 1;
        c.encoder.dropout_rate = 0.0;
        c.ff_dim = 8;
        c
    }

    fn sample(i: usize) -> TimeInput<f64> {
        TimeInput {
            source: vec![i % 5, (i + 1) % 5],
            mt: vec![(i + 2) % 5, i % 5, 3],
            editor: vec![i as f64 * 0.1, 0.0],
        }
    }

    #[test]
    fn memorizes_four_samples() {
        let mut c = tiny();
        c.lr = 0.01;
        c.max_epochs = 400;
        c.patience = 400;
        c.batch_size = 4;
        let data: Vec<_> = (0..4).map(|i| (sample(i), [0.5, -0.3, 1.2, 0.1][i])).collect();
        let (m, _) = train_time_predictor(&data, &[], 5, 2, &c, 3).unwrap();
        let (mse, _) = evaluate_time(&m, &data).unwrap();
        assert!(mse < 1e-3, "mse {mse}");
    }

    #[test]
    fn constant_targets_give_nan_pearson() {
        let mut c = tiny();
        c.max_epochs = 3;
        let data: Vec<_> = (0..4).map(|i| (sample(i), 1.0)).collect();
        let (_, report) = train_time_predictor(&data, &data, 5, 2, &c, 3).unwrap();
        assert!(report.epochs.iter().all(|e| e.extra[0].1.is_nan()));
        assert!(report.to_jsonl().contains("\"dev_pearson\":null"));
    }

    #[test]
    fn rejects_bad_inputs() {
        let m = TimePredictor::<f64>::new(5, 2, tiny(), 0).unwrap();
        let mut x = sample(0);
        x.editor.push(1.0);
        assert!(m.predict_log_time(&x).is_err());
        let r = train_time_predictor(&[(sample(0), f64::NAN)], &[], 5, 2, &tiny(), 0);
        assert!(matches!(r, Err(ModelError::NonFiniteTarget)));
        let back = TimePredictor::<f64>::from_checkpoint(&m.to_checkpoint()).unwrap();
        assert!((back.predict_log_time(&sample(1)).unwrap() - m.predict_log_time(&sample(1)).unwrap()).abs() < 1e-5);
    }
}
