use rand::seq::SliceRandom;
use serde::Serialize;

use crate::neural::{Adam, Gradients, Network, NeuralError, Rng};
use crate::scalar::Scalar;

use super::{ModelConfig, ModelError};

/// One line of a training report.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EpochRecord {
    pub epoch: usize,
    pub train_loss: f64,
    /// Early-stopping score; higher is better.
    pub dev_metric: f64,
    /// Additional named dev statistics (e.g. Pearson for regression).
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub extra: Vec<(String, f64)>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrainReport {
    pub metric: String,
    pub epochs: Vec<EpochRecord>,
    pub best_epoch: usize,
    pub best_dev_metric: f64,
}

impl TrainReport {
    /// Line-delimited JSON, one record per epoch.
    pub fn to_jsonl(&self) -> String {
        let mut out = String::new();
        for e in &self.epochs {
            let mut obj = serde_json::Map::new();
            obj.insert("epoch".into(), e.epoch.into());
            obj.insert("train_loss".into(), json_num(e.train_loss));
            obj.insert(format!("dev_{}", self.metric), json_num(e.dev_metric));
            for (k, v) in &e.extra {
                obj.insert(format!("dev_{k}"), json_num(*v));
            }
            out.push_str(&serde_json::Value::Object(obj).to_string());
            out.push('\n');
        }
        out
    }
}

/// NaN and infinities become JSON null.
pub(crate) fn json_num(v: f64) -> serde_json::Value {
    serde_json::Number::from_f64(v)
        .map(serde_json::Value::Number)
        .unwrap_or(serde_json::Value::Null)
}

/// Dev evaluation result: early-stopping score plus extra statistics.
pub struct DevScore {
    pub score: f64,
    pub extra: Vec<(String, f64)>,
}

/// Minibatch Adam with per-sample gradient accumulation, early stopping on a
/// dev score, and restoration of the best parameters.
///
/// `step` runs forward+backward for one sample and returns its loss;
/// `evaluate` scores the current parameters on dev data.
pub fn fit<S, N, D, St, Ev>(
    net: &mut N,
    train: &[D],
    config: &ModelConfig,
    metric: &str,
    rng: &mut Rng,
    mut step: St,
    mut evaluate: Ev,
) -> Result<TrainReport, ModelError>
where
    S: Scalar,
    N: Network<S>,
    St: FnMut(&N, &D, &mut Rng, &mut Gradients<S>) -> Result<S, NeuralError>,
    Ev: FnMut(&N) -> Result<DevScore, ModelError>,
{
    let mut opt = Adam::new(net.params(), config.adam());
    let mut grads = net.params().zeros_like();
    let mut order: Vec<usize> = (0..train.len()).collect();
    let mut report = TrainReport {
        metric: metric.to_owned(),
        epochs: Vec::new(),
        best_epoch: 0,
        best_dev_metric: f64::NEG_INFINITY,
    };
    let mut best = net.params().clone();
    let mut stale = 0;
    for epoch in 1..=config.max_epochs {
        order.shuffle(rng);
        let mut total = 0.0;
        for batch in order.chunks(config.batch_size) {
            grads.zero();
            for &i in batch {
                let loss = match step(net, &train[i], rng, &mut grads) {
                    Err(NeuralError::NonFiniteLoss) => return Err(ModelError::Divergence { epoch }),
                    r => r?,
                };
                total += loss.as_f64();
            }
            grads.scale(S::one() / S::of(batch.len() as f64));
            if !grads.is_finite() {
                return Err(ModelError::Divergence { epoch });
            }
            opt.step(net.params_mut(), &grads);
        }
        let train_loss = total / train.len().max(1) as f64;
        if !train_loss.is_finite() {
            return Err(ModelError::Divergence { epoch });
        }
        let dev = evaluate(net)?;
        log::info!("epoch {epoch} loss {train_loss:.4} dev {metric} {:.4}", dev.score);
        report.epochs.push(EpochRecord {
            epoch,
            train_loss,
            dev_metric: dev.score,
            extra: dev.extra,
        });
        if dev.score > report.best_dev_metric {
            report.best_dev_metric = dev.score;
            report.best_epoch = epoch;
            best = net.params().clone();
            stale = 0;
        } else {
            stale += 1;
            if stale >= config.patience {
                break;
            }
        }
    }
    *net.params_mut() = best;
    Ok(report)
}

/// Maps `f` over `items` on up to `threads` scoped workers, preserving order.
pub fn parallel_map<T: Sync, R: Send>(items: &[T], threads: usize, f: impl Fn(&T) -> R + Sync) -> Vec<R> {
    if threads <= 1 || items.len() < 2 {
        return items.iter().map(f).collect();
    }
    let chunk = items.len().div_ceil(threads);
    std::thread::scope(|s| {
        let handles: Vec<_> = items
            .chunks(chunk)
            .map(|c| {
                let f = &f;
                s.spawn(move || c.iter().map(f).collect::<Vec<R>>())
            })
            .collect();
        handles
            .into_iter()
            .flat_map(|h| h.join().expect("worker panicked"))
            .collect()
    })
}
