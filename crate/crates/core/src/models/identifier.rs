use rand::SeedableRng;

use crate::neural::{
    classification_step, read_checkpoint, relu, relu_backward, write_checkpoint, Dense, Dropout, Embedding,
    Gradients, Network, NeuralError, Params, Rng,
};
use crate::scalar::Scalar;
use crate::symbols::SymbolId;

use super::encoder::{SeqCache, SeqEncoder};
use super::train::{fit, DevScore, TrainReport};
use super::{accuracy, ModelConfig, ModelError};

/// Symbol embeddings, bidirectional encoder, dropout, ReLU representation
/// layer and a softmax projection over editors.
#[derive(Debug, Clone)]
pub struct IdentifierModel<S> {
    pub params: Params<S>,
    pub config: ModelConfig,
    pub labels: Vec<String>,
    pub vocab_size: usize,
    enc: SeqEncoder,
    dropout: Dropout,
    repr: Dense,
    out: Dense,
}

pub struct IdentifierCache<S> {
    seq: SeqCache<S>,
    mask: Option<Vec<S>>,
    dropped: Vec<S>,
    h: Vec<S>,
}

/// One training example: symbol ids and an editor label index.
pub type LabeledSeq = (Vec<usize>, usize);

pub fn ids_of(ids: &[SymbolId]) -> Vec<usize> {
    ids.iter().map(|i| i.0 as usize).collect()
}

impl<S: Scalar> IdentifierModel<S> {
    pub fn new(vocab_size: usize, labels: Vec<String>, config: ModelConfig, seed: u64) -> Result<Self, ModelError> {
        config.validate()?;
        let mut rng = Rng::seed_from_u64(seed);
        let mut params = Params::new();
        let e = &config.encoder;
        let emb = Embedding::new(&mut params, "symbols", vocab_size, e.embed_dim, &mut rng);
        let enc = SeqEncoder::new(&mut params, "encoder", emb, e, &mut rng);
        let repr = Dense::new(&mut params, "repr", 2 * e.hidden_dim, config.repr_dim, &mut rng);
        let out = Dense::new(&mut params, "softmax", config.repr_dim, labels.len(), &mut rng);
        Ok(IdentifierModel {
            params,
            dropout: Dropout::new(e.dropout_rate),
            config,
            labels,
            vocab_size,
            enc,
            repr,
            out,
        })
    }

    /// Probability vector over editors.
    pub fn predict(&self, ids: &[usize]) -> Result<Vec<S>, NeuralError> {
        super::predict_proba(self, ids)
    }

    /// Representation-layer output `h` (post-ReLU) in evaluation mode.
    pub fn session_embedding(&self, ids: &[usize]) -> Result<Vec<S>, NeuralError> {
        let (_, cache) = self.forward(ids, None)?;
        Ok(cache.h)
    }

    pub fn to_checkpoint(&self) -> Vec<u8> {
        let meta = serde_json::json!({
            "kind": "identifier",
            "labels": self.labels,
            "vocab_size": self.vocab_size,
            "config": self.config,
        });
        write_checkpoint(&self.params, &meta)
    }

    pub fn from_checkpoint(bytes: &[u8]) -> Result<Self, ModelError> {
        let ck = read_checkpoint(bytes)?;
        if ck.meta["kind"] != "identifier" {
            return Err(ModelError::Checkpoint("not an identifier checkpoint".into()));
        }
        let labels: Vec<String> = serde_json::from_value(ck.meta["labels"].clone())
            .map_err(|e| ModelError::Checkpoint(e.to_string()))?;
        let config: ModelConfig = serde_json::from_value(ck.meta["config"].clone())
            .map_err(|e| ModelError::Checkpoint(e.to_string()))?;
        let vocab_size = ck.meta["vocab_size"]
            .as_u64()
            .ok_or_else(|| ModelError::Checkpoint("missing vocab_size".into()))? as usize;
        let mut m = Self::new(vocab_size, labels, config, 0)?;
        ck.load_into(&mut m.params)?;
        Ok(m)
    }
}

impl<S: Scalar> Network<S> for IdentifierModel<S> {
    type Input = [usize];
    type Cache = IdentifierCache<S>;

    fn params(&self) -> &Params<S> {
        &self.params
    }

    fn params_mut(&mut self) -> &mut Params<S> {
        &mut self.params
    }

    fn forward(&self, ids: &[usize], rng: Option<&mut Rng>) -> Result<(Vec<S>, Self::Cache), NeuralError> {
        let seq = self.enc.forward(&self.params, ids)?;
        let (dropped, mask) = self.dropout.forward(&seq.out.last, rng);
        let h = relu(&self.repr.forward(&self.params, &dropped));
        let logits = self.out.forward(&self.params, &h);
        Ok((logits, IdentifierCache { seq, mask, dropped, h }))
    }

    fn backward(&self, ids: &[usize], c: Self::Cache, d_out: &[S], grads: &mut Gradients<S>) {
        let p = &self.params;
        let dh = self.out.backward(p, &c.h, d_out, grads);
        let dz = relu_backward(&c.h, &dh);
        let dd = self.repr.backward(p, &c.dropped, &dz, grads);
        let d_last = Dropout::backward(c.mask.as_deref(), &dd);
        self.enc.backward(p, ids, &c.seq, None, Some(&d_last), grads);
    }
}

/// Trains with cross-entropy and early stopping on dev accuracy (train
/// accuracy when `dev` is empty).
pub fn train_identifier<S: Scalar>(
    train: &[LabeledSeq],
    dev: &[LabeledSeq],
    labels: Vec<String>,
    vocab_size: usize,
    config: &ModelConfig,
    seed: u64,
) -> Result<(IdentifierModel<S>, TrainReport), ModelError> {
    if labels.len() < 2 {
        return Err(ModelError::TooFewEditors(labels.len()));
    }
    if train.is_empty() {
        return Err(ModelError::EmptyDataset);
    }
    if let Some(&(_, y)) = train.iter().chain(dev).find(|(_, y)| *y >= labels.len()) {
        return Err(ModelError::LabelOutOfRange(y));
    }
    let mut model = IdentifierModel::<S>::new(vocab_size, labels, config.clone(), seed)?;
    let mut rng = Rng::seed_from_u64(seed.wrapping_add(1));
    let eval_set = if dev.is_empty() { train } else { dev };
    let report = fit(
        &mut model,
        train,
        config,
        "accuracy",
        &mut rng,
        |net, (x, y), rng, g| classification_step(net, x.as_slice(), *y, Some(rng), g),
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

    fn tiny() -> ModelConfig {
        let mut c = ModelConfig::default();
        c.encoder.embed_dim = 4;
        c.encoder.hidden_dim = 4;
        c.repr_dim = 6;
        c
    }

    #[test]
    fn predictions_are_distributions_and_deterministic() {
        let m = IdentifierModel::<f64>::new(10, vec!["a".into(), "b".into(), "c".into()], tiny(), 1).unwrap();
        let p = m.predict(&[1, 2, 3]).unwrap();
        assert_eq!(p.len(), 3);
        assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-9);
        assert_eq!(p, m.predict(&[1, 2, 3]).unwrap());
        assert!(m.predict(&[10]).is_err());
        let h = m.session_embedding(&[4, 5]).unwrap();
        assert_eq!(h.len(), 6);
        assert!(h.iter().all(|&v| v >= 0.0));
    }

    #[test]
    fn default_representation_is_128() {
        let m = IdentifierModel::<f32>::new(5, vec!["a".into(), "b".into()], ModelConfig::default(), 0).unwrap();
        assert_eq!(m.session_embedding(&[0, 1]).unwrap().len(), 128);
    }

    #[test]
    fn checkpoint_round_trip() {
        let m = IdentifierModel::<f32>::new(7, vec!["x".into(), "y".into()], tiny(), 3).unwrap();
        let back = IdentifierModel::<f32>::from_checkpoint(&m.to_checkpoint()).unwrap();
        assert_eq!(back.params, m.params);
        assert_eq!(back.labels, m.labels);
        assert_eq!(back.predict(&[1, 2]).unwrap(), m.predict(&[1, 2]).unwrap());
    }

    #[test]
    fn memorizes_two_sessions() {
        let mut c = tiny();
        c.encoder.dropout_rate = 0.0;
        c.lr = 0.02;
        c.max_epochs = 200;
        c.patience = 200;
        let data = vec![(vec![0, 1, 2, 3], 0), (vec![3, 2, 2, 4, 0], 1)];
        let (m, report) =
            train_identifier::<f32>(&data, &[], vec!["p".into(), "q".into()], 5, &c, 7).unwrap();
        assert_eq!(report.best_dev_metric, 1.0);
        for (x, y) in &data {
            let p = m.predict(x).unwrap();
            let arg = if p[0] > p[1] { 0 } else { 1 };
            assert_eq!(arg, *y);
        }
    }

    #[test]
    fn rejects_single_editor() {
        let r = train_identifier::<f32>(&[(vec![0], 0)], &[], vec!["a".into()], 2, &tiny(), 0);
        assert!(matches!(r, Err(ModelError::TooFewEditors(1))));
    }
}
