use crate::scalar::{axpy, dot, Scalar};

use super::{softmax, NeuralError};

/// Scaled dot-product attention of one query over a sequence.
#[derive(Debug, Clone, PartialEq)]
pub struct Attention<S> {
    pub weights: Vec<S>,
    pub context: Vec<S>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AttentionGrads<S> {
    pub d_query: Vec<S>,
    pub d_keys: Vec<Vec<S>>,
    pub d_values: Vec<Vec<S>>,
}

pub fn attend<S: Scalar>(
    query: &[S],
    keys: &[Vec<S>],
    values: &[Vec<S>],
) -> Result<Attention<S>, NeuralError> {
    if keys.is_empty() {
        return Err(NeuralError::EmptySequence);
    }
    if keys.len() != values.len() {
        return Err(NeuralError::DimMismatch {
            expected: keys.len(),
            got: values.len(),
        });
    }
    let d = query.len();
    if let Some(k) = keys.iter().find(|k| k.len() != d) {
        return Err(NeuralError::DimMismatch {
            expected: d,
            got: k.len(),
        });
    }
    let scale = S::one() / S::of(d as f64).sqrt();
    let scores: Vec<S> = keys.iter().map(|k| dot(query, k) * scale).collect();
    let weights = softmax(&scores);
    let mut context = vec![S::zero(); values[0].len()];
    for (a, v) in weights.iter().zip(values) {
        axpy(*a, v, &mut context);
    }
    Ok(Attention { weights, context })
}

pub fn attend_backward<S: Scalar>(
    query: &[S],
    keys: &[Vec<S>],
    values: &[Vec<S>],
    weights: &[S],
    d_context: &[S],
) -> AttentionGrads<S> {
    let scale = S::one() / S::of(query.len() as f64).sqrt();
    let d_a: Vec<S> = values.iter().map(|v| dot(d_context, v)).collect();
    let mean: S = weights.iter().zip(&d_a).map(|(&a, &g)| a * g).sum();
    let mut d_query = vec![S::zero(); query.len()];
    let mut d_keys = Vec::with_capacity(keys.len());
    let mut d_values = Vec::with_capacity(values.len());
    for j in 0..keys.len() {
        let ds = weights[j] * (d_a[j] - mean) * scale;
        axpy(ds, &keys[j], &mut d_query);
        d_keys.push(query.iter().map(|&q| q * ds).collect());
        d_values.push(d_context.iter().map(|&g| g * weights[j]).collect());
    }
    AttentionGrads {
        d_query,
        d_keys,
        d_values,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn weights_are_a_distribution_and_peak_on_matching_key() {
        let q = vec![2.0f64, 0.0];
        let keys = vec![vec![1.0, 0.0], vec![0.0, 1.0], vec![-1.0, 0.0]];
        let att = attend(&q, &keys, &keys).unwrap();
        let s: f64 = att.weights.iter().sum();
        assert!((s - 1.0).abs() < 1e-12);
        assert!(att.weights[0] > att.weights[1] && att.weights[1] > att.weights[2]);
        // hand computation: scores 2/sqrt2, 0, -2/sqrt2
        let r = 2.0f64.sqrt();
        let z = r.exp() + 1.0 + (-r).exp();
        assert!((att.weights[0] - r.exp() / z).abs() < 1e-12);
    }

    #[test]
    fn identical_keys_give_uniform_weights() {
        let keys = vec![vec![0.3f64, -0.1]; 4];
        let values = vec![vec![1.0], vec![2.0], vec![3.0], vec![4.0]];
        let att = attend(&[0.5, 0.5], &keys, &values).unwrap();
        assert!(att.weights.iter().all(|&w| (w - 0.25).abs() < 1e-12));
        assert!((att.context[0] - 2.5).abs() < 1e-12);
    }

    #[test]
    fn backward_matches_finite_differences() {
        let q = vec![0.4f64, -0.7, 0.2];
        let keys = vec![vec![0.1, 0.5, -0.3], vec![-0.2, 0.3, 0.9], vec![0.6, -0.4, 0.0]];
        let values = keys.clone();
        let dc = vec![1.0, -2.0, 0.5];
        let f = |q: &[f64]| -> f64 {
            let a = attend(q, &keys, &values).unwrap();
            a.context.iter().zip(&dc).map(|(c, g)| c * g).sum()
        };
        let a = attend(&q, &keys, &values).unwrap();
        let g = attend_backward(&q, &keys, &values, &a.weights, &dc);
        for i in 0..3 {
            let mut qp = q.clone();
            qp[i] += 1e-6;
            let mut qm = q.clone();
            qm[i] -= 1e-6;
            let num = (f(&qp) - f(&qm)) / 2e-6;
            assert!((num - g.d_query[i]).abs() < 1e-7);
        }
    }

    #[test]
    fn rejects_empty() {
        assert!(attend::<f64>(&[1.0], &[], &[]).is_err());
    }
}
