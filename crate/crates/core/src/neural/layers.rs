use rand::Rng as _;

use crate::scalar::{axpy, dot, Scalar};

use super::{Gradients, NeuralError, ParamId, Params, Rng, Tensor};

/// Lookup table of `rows` vectors of width `dim`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Embedding {
    pub table: ParamId,
    pub rows: usize,
    pub dim: usize,
}

impl Embedding {
    pub fn new<S: Scalar>(
        params: &mut Params<S>,
        name: &str,
        rows: usize,
        dim: usize,
        rng: &mut Rng,
    ) -> Self {
        let table = params.add(name, Tensor::uniform(&[rows, dim], 0.1, rng));
        Embedding { table, rows, dim }
    }

    pub fn forward<S: Scalar>(
        &self,
        params: &Params<S>,
        ids: &[usize],
    ) -> Result<Vec<Vec<S>>, NeuralError> {
        let t = params.get(self.table);
        ids.iter()
            .map(|&id| {
                if id >= self.rows {
                    Err(NeuralError::IdOutOfRange {
                        id,
                        rows: self.rows,
                    })
                } else {
                    Ok(t.row(id).to_vec())
                }
            })
            .collect()
    }

    pub fn backward<S: Scalar>(&self, ids: &[usize], d: &[Vec<S>], grads: &mut Gradients<S>) {
        let g = grads.get_mut(self.table);
        for (&id, dv) in ids.iter().zip(d) {
            axpy(S::one(), dv, g.row_mut(id));
        }
    }
}

/// Affine map `y = W x + b` with `W` of shape `[output, input]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Dense {
    pub w: ParamId,
    pub b: ParamId,
    pub input: usize,
    pub output: usize,
}

impl Dense {
    pub fn new<S: Scalar>(
        params: &mut Params<S>,
        name: &str,
        input: usize,
        output: usize,
        rng: &mut Rng,
    ) -> Self {
        let bound = (6.0 / (input + output) as f64).sqrt();
        let w = params.add(format!("{name}.w"), Tensor::uniform(&[output, input], bound, rng));
        let b = params.add(format!("{name}.b"), Tensor::zeros(&[output]));
        Dense {
            w,
            b,
            input,
            output,
        }
    }

    pub fn forward<S: Scalar>(&self, params: &Params<S>, x: &[S]) -> Vec<S> {
        debug_assert_eq!(x.len(), self.input);
        let w = params.get(self.w);
        let b = params.get(self.b).data();
        (0..self.output).map(|r| b[r] + dot(w.row(r), x)).collect()
    }

    /// Accumulates parameter gradients and returns `dL/dx`.
    pub fn backward<S: Scalar>(
        &self,
        params: &Params<S>,
        x: &[S],
        dy: &[S],
        grads: &mut Gradients<S>,
    ) -> Vec<S> {
        let w = params.get(self.w);
        let mut dx = vec![S::zero(); self.input];
        {
            let gw = grads.get_mut(self.w);
            for (r, &d) in dy.iter().enumerate() {
                if d != S::zero() {
                    axpy(d, x, gw.row_mut(r));
                }
            }
        }
        let gb = grads.get_mut(self.b).data_mut();
        for (r, &d) in dy.iter().enumerate() {
            gb[r] += d;
            if d != S::zero() {
                axpy(d, w.row(r), &mut dx);
            }
        }
        dx
    }
}

pub fn relu<S: Scalar>(x: &[S]) -> Vec<S> {
    x.iter().map(|&v| v.max(S::zero())).collect()
}

/// Gradient through ReLU given its output `y`.
pub fn relu_backward<S: Scalar>(y: &[S], dy: &[S]) -> Vec<S> {
    y.iter()
        .zip(dy)
        .map(|(&v, &d)| if v > S::zero() { d } else { S::zero() })
        .collect()
}

/// Inverted dropout: kept units are scaled by `1/(1-rate)` during training so
/// inference is the identity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Dropout {
    pub rate: f64,
}

impl Dropout {
    pub fn new(rate: f64) -> Self {
        assert!((0.0..1.0).contains(&rate), "dropout rate must be in [0, 1)");
        Dropout { rate }
    }

    /// Returns the output and the applied mask (`None` at inference).
    pub fn forward<S: Scalar>(&self, x: &[S], rng: Option<&mut Rng>) -> (Vec<S>, Option<Vec<S>>) {
        match rng {
            Some(rng) if self.rate > 0.0 => {
                let keep = S::of(1.0 / (1.0 - self.rate));
                let mask: Vec<S> = x
                    .iter()
                    .map(|_| {
                        if rng.gen::<f64>() < self.rate {
                            S::zero()
                        } else {
                            keep
                        }
                    })
                    .collect();
                let y = x.iter().zip(&mask).map(|(&a, &m)| a * m).collect();
                (y, Some(mask))
            }
            _ => (x.to_vec(), None),
        }
    }

    pub fn backward<S: Scalar>(mask: Option<&[S]>, dy: &[S]) -> Vec<S> {
        match mask {
            Some(m) => dy.iter().zip(m).map(|(&d, &k)| d * k).collect(),
            None => dy.to_vec(),
        }
    }
}
