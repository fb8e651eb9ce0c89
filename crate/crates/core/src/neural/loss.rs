use crate::scalar::Scalar;

use super::NeuralError;

/// Numerically stable softmax.
pub fn softmax<S: Scalar>(x: &[S]) -> Vec<S> {
    let m = x.iter().copied().fold(S::neg_infinity(), S::max);
    let e: Vec<S> = x.iter().map(|&v| (v - m).exp()).collect();
    let z: S = e.iter().copied().sum();
    e.into_iter().map(|v| v / z).collect()
}

/// Cross-entropy of `softmax(logits)` against `label`, with `dL/dlogits`.
pub fn softmax_cross_entropy<S: Scalar>(logits: &[S], label: usize) -> Result<(S, Vec<S>), NeuralError> {
    if label >= logits.len() {
        return Err(NeuralError::IdOutOfRange {
            id: label,
            rows: logits.len(),
        });
    }
    let m = logits.iter().copied().fold(S::neg_infinity(), S::max);
    let lse = logits.iter().map(|&v| (v - m).exp()).sum::<S>().ln() + m;
    let loss = lse - logits[label];
    if !loss.is_finite() {
        return Err(NeuralError::NonFiniteLoss);
    }
    let mut d = softmax(logits);
    d[label] -= S::one();
    Ok((loss, d))
}

/// Mean squared error and its gradient.
pub fn mse<S: Scalar>(pred: &[S], target: &[S]) -> Result<(S, Vec<S>), NeuralError> {
    if pred.len() != target.len() || pred.is_empty() {
        return Err(NeuralError::DimMismatch {
            expected: target.len(),
            got: pred.len(),
        });
    }
    let n = S::of(pred.len() as f64);
    let diff: Vec<S> = pred.iter().zip(target).map(|(&p, &t)| p - t).collect();
    let loss = diff.iter().map(|&d| d * d).sum::<S>() / n;
    if !loss.is_finite() {
        return Err(NeuralError::NonFiniteLoss);
    }
    let two = S::of(2.0);
    Ok((loss, diff.into_iter().map(|d| two * d / n).collect()))
}
