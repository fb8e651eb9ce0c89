use crate::scalar::{axpy, dot, sigmoid, Scalar};

use super::{Gradients, NeuralError, ParamId, Params, Rng, Tensor};

/// One LSTM direction. `W` is `[4H, I+H]` acting on `[x; h_prev]`, gate rows
/// ordered input, forget, candidate, output.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LstmCell {
    pub w: ParamId,
    pub b: ParamId,
    pub input: usize,
    pub hidden: usize,
}

/// Activations of one direction over a sequence, in processing order.
#[derive(Debug, Clone)]
pub struct LstmTrace<S> {
    steps: usize,
    xh: Vec<S>,
    gates: Vec<S>,
    /// `c[0]` is the zero initial state.
    c: Vec<S>,
    tanh_c: Vec<S>,
    h: Vec<S>,
}

impl<S: Scalar> LstmTrace<S> {
    pub fn len(&self) -> usize {
        self.steps
    }

    pub fn is_empty(&self) -> bool {
        self.steps == 0
    }

    /// Hidden state after processing step `t`.
    pub fn h(&self, t: usize) -> &[S] {
        let hd = self.h.len() / (self.steps + 1);
        &self.h[(t + 1) * hd..(t + 2) * hd]
    }
}

impl LstmCell {
    pub fn new<S: Scalar>(
        params: &mut Params<S>,
        name: &str,
        input: usize,
        hidden: usize,
        rng: &mut Rng,
    ) -> Self {
        let bound = 1.0 / (hidden as f64).sqrt();
        let w = params.add(
            format!("{name}.w"),
            Tensor::uniform(&[4 * hidden, input + hidden], bound, rng),
        );
        let mut bias = Tensor::zeros(&[4 * hidden]);
        bias.data_mut()[hidden..2 * hidden].fill(S::one());
        let b = params.add(format!("{name}.b"), bias);
        LstmCell {
            w,
            b,
            input,
            hidden,
        }
    }

    pub fn run<S: Scalar>(&self, params: &Params<S>, xs: &[&[S]]) -> LstmTrace<S> {
        let (i_dim, h_dim) = (self.input, self.hidden);
        let t_len = xs.len();
        let w = params.get(self.w);
        let b = params.get(self.b).data();
        let mut tr = LstmTrace {
            steps: t_len,
            xh: Vec::with_capacity(t_len * (i_dim + h_dim)),
            gates: vec![S::zero(); t_len * 4 * h_dim],
            c: vec![S::zero(); (t_len + 1) * h_dim],
            tanh_c: vec![S::zero(); t_len * h_dim],
            h: vec![S::zero(); (t_len + 1) * h_dim],
        };
        for (t, x) in xs.iter().enumerate() {
            debug_assert_eq!(x.len(), i_dim);
            tr.xh.extend_from_slice(x);
            let (h_prev, _) = tr.h[t * h_dim..].split_at(h_dim);
            let h_prev = h_prev.to_vec();
            tr.xh.extend_from_slice(&h_prev);
            let xh = &tr.xh[t * (i_dim + h_dim)..];
            let gates = &mut tr.gates[t * 4 * h_dim..(t + 1) * 4 * h_dim];
            for r in 0..4 * h_dim {
                let z = b[r] + dot(w.row(r), xh);
                gates[r] = if (2 * h_dim..3 * h_dim).contains(&r) {
                    z.tanh()
                } else {
                    sigmoid(z)
                };
            }
            for k in 0..h_dim {
                let (ig, fg, gg, og) = (
                    gates[k],
                    gates[h_dim + k],
                    gates[2 * h_dim + k],
                    gates[3 * h_dim + k],
                );
                let c = fg * tr.c[t * h_dim + k] + ig * gg;
                tr.c[(t + 1) * h_dim + k] = c;
                let tc = c.tanh();
                tr.tanh_c[t * h_dim + k] = tc;
                tr.h[(t + 1) * h_dim + k] = og * tc;
            }
        }
        tr
    }

    /// Backpropagation through time. `dh` holds `dL/dh_t` for every step
    /// (flattened, processing order); returns `dL/dx_t` flattened likewise.
    pub fn backward<S: Scalar>(
        &self,
        params: &Params<S>,
        tr: &LstmTrace<S>,
        dh: &[S],
        grads: &mut Gradients<S>,
    ) -> Vec<S> {
        let (i_dim, h_dim) = (self.input, self.hidden);
        let xh_dim = i_dim + h_dim;
        let w = params.get(self.w);
        let mut dx = vec![S::zero(); tr.steps * i_dim];
        let mut dh_next = vec![S::zero(); h_dim];
        let mut dc_next = vec![S::zero(); h_dim];
        let mut dz = vec![S::zero(); 4 * h_dim];
        let mut dxh = vec![S::zero(); xh_dim];
        let one = S::one();
        for t in (0..tr.steps).rev() {
            let gates = &tr.gates[t * 4 * h_dim..(t + 1) * 4 * h_dim];
            for k in 0..h_dim {
                let (ig, fg, gg, og) = (
                    gates[k],
                    gates[h_dim + k],
                    gates[2 * h_dim + k],
                    gates[3 * h_dim + k],
                );
                let tc = tr.tanh_c[t * h_dim + k];
                let d_h = dh[t * h_dim + k] + dh_next[k];
                let d_o = d_h * tc;
                let d_c = dc_next[k] + d_h * og * (one - tc * tc);
                let d_i = d_c * gg;
                let d_g = d_c * ig;
                let d_f = d_c * tr.c[t * h_dim + k];
                dz[k] = d_i * ig * (one - ig);
                dz[h_dim + k] = d_f * fg * (one - fg);
                dz[2 * h_dim + k] = d_g * (one - gg * gg);
                dz[3 * h_dim + k] = d_o * og * (one - og);
                dc_next[k] = d_c * fg;
            }
            let xh = &tr.xh[t * xh_dim..(t + 1) * xh_dim];
            dxh.fill(S::zero());
            {
                let gw = grads.get_mut(self.w);
                for (r, &d) in dz.iter().enumerate() {
                    axpy(d, xh, gw.row_mut(r));
                }
            }
            {
                let gb = grads.get_mut(self.b).data_mut();
                for (g, &d) in gb.iter_mut().zip(&dz) {
                    *g += d;
                }
            }
            for (r, &d) in dz.iter().enumerate() {
                axpy(d, w.row(r), &mut dxh);
            }
            dx[t * i_dim..(t + 1) * i_dim].copy_from_slice(&dxh[..i_dim]);
            dh_next.copy_from_slice(&dxh[i_dim..]);
        }
        dx
    }
}

/// Stacked bidirectional LSTM. Layer `l > 0` reads the concatenated
/// forward/backward states of layer `l - 1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BiLstm {
    pub layers: Vec<(LstmCell, LstmCell)>,
    pub input: usize,
    pub hidden: usize,
}

#[derive(Debug, Clone)]
pub struct EncoderOutput<S> {
    /// Top-layer `[fwd; bwd]` state per position, width `2H`.
    pub states: Vec<Vec<S>>,
    /// Final forward state concatenated with the final backward state.
    pub last: Vec<S>,
}

#[derive(Debug, Clone)]
pub struct EncoderCache<S> {
    traces: Vec<(LstmTrace<S>, LstmTrace<S>)>,
}

impl BiLstm {
    pub fn new<S: Scalar>(
        params: &mut Params<S>,
        name: &str,
        input: usize,
        hidden: usize,
        layers: usize,
        rng: &mut Rng,
    ) -> Self {
        assert!(layers >= 1);
        let layers = (0..layers)
            .map(|l| {
                let inp = if l == 0 { input } else { 2 * hidden };
                (
                    LstmCell::new(params, &format!("{name}.l{l}.fwd"), inp, hidden, rng),
                    LstmCell::new(params, &format!("{name}.l{l}.bwd"), inp, hidden, rng),
                )
            })
            .collect();
        BiLstm {
            layers,
            input,
            hidden,
        }
    }

    pub fn output_dim(&self) -> usize {
        2 * self.hidden
    }

    pub fn forward<S: Scalar>(
        &self,
        params: &Params<S>,
        xs: &[Vec<S>],
    ) -> Result<(EncoderOutput<S>, EncoderCache<S>), NeuralError> {
        if xs.is_empty() {
            return Err(NeuralError::EmptySequence);
        }
        if let Some(x) = xs.iter().find(|x| x.len() != self.input) {
            return Err(NeuralError::DimMismatch {
                expected: self.input,
                got: x.len(),
            });
        }
        let t_len = xs.len();
        let mut traces = Vec::with_capacity(self.layers.len());
        let mut current: Vec<Vec<S>> = xs.to_vec();
        for (fwd, bwd) in &self.layers {
            let refs: Vec<&[S]> = current.iter().map(Vec::as_slice).collect();
            let rev: Vec<&[S]> = refs.iter().rev().copied().collect();
            let tf = fwd.run(params, &refs);
            let tb = bwd.run(params, &rev);
            current = (0..t_len)
                .map(|t| {
                    let mut v = tf.h(t).to_vec();
                    v.extend_from_slice(tb.h(t_len - 1 - t));
                    v
                })
                .collect();
            traces.push((tf, tb));
        }
        let (tf, tb) = traces.last().expect("at least one layer");
        let mut last = tf.h(t_len - 1).to_vec();
        last.extend_from_slice(tb.h(t_len - 1));
        Ok((
            EncoderOutput {
                states: current,
                last,
            },
            EncoderCache { traces },
        ))
    }

    /// Accumulates gradients given upstream gradients on the per-position
    /// states and/or the final state; returns gradients on the inputs.
    pub fn backward<S: Scalar>(
        &self,
        params: &Params<S>,
        cache: &EncoderCache<S>,
        d_states: Option<&[Vec<S>]>,
        d_last: Option<&[S]>,
        grads: &mut Gradients<S>,
    ) -> Vec<Vec<S>> {
        let h = self.hidden;
        let t_len = cache.traces[0].0.len();
        let mut d_cur: Vec<Vec<S>> = match d_states {
            Some(d) => d.to_vec(),
            None => vec![vec![S::zero(); 2 * h]; t_len],
        };
        for (l, (fwd, bwd)) in self.layers.iter().enumerate().rev() {
            let (tf, tb) = &cache.traces[l];
            let mut dh_f = vec![S::zero(); t_len * h];
            let mut dh_b = vec![S::zero(); t_len * h];
            for t in 0..t_len {
                dh_f[t * h..(t + 1) * h].copy_from_slice(&d_cur[t][..h]);
                let k = t_len - 1 - t;
                dh_b[k * h..(k + 1) * h].copy_from_slice(&d_cur[t][h..]);
            }
            if l + 1 == self.layers.len() {
                if let Some(dl) = d_last {
                    let end = (t_len - 1) * h;
                    axpy(S::one(), &dl[..h], &mut dh_f[end..]);
                    axpy(S::one(), &dl[h..], &mut dh_b[end..]);
                }
            }
            let dx_f = fwd.backward(params, tf, &dh_f, grads);
            let dx_b = bwd.backward(params, tb, &dh_b, grads);
            let i_dim = fwd.input;
            d_cur = (0..t_len)
                .map(|t| {
                    let k = t_len - 1 - t;
                    dx_f[t * i_dim..(t + 1) * i_dim]
                        .iter()
                        .zip(&dx_b[k * i_dim..(k + 1) * i_dim])
                        .map(|(&a, &b)| a + b)
                        .collect()
                })
                .collect();
        }
        d_cur
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;

    fn seq(rng: &mut Rng, t: usize, d: usize) -> Vec<Vec<f64>> {
        (0..t)
            .map(|_| Tensor::<f64>::uniform(&[d], 1.0, rng).data().to_vec())
            .collect()
    }

    #[test]
    fn zero_parameters_are_a_fixed_point() {
        let mut rng = Rng::seed_from_u64(3);
        let mut p = Params::<f64>::new();
        let enc = BiLstm::new(&mut p, "enc", 3, 4, 2, &mut rng);
        for t in p.tensors_mut() {
            t.fill(0.0);
        }
        let xs = seq(&mut rng, 5, 3);
        let (out, _) = enc.forward(&p, &xs).unwrap();
        assert!(out.states.iter().flatten().all(|&v| v == 0.0));
        assert!(out.last.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn reversed_input_swaps_directions_when_tied() {
        let mut rng = Rng::seed_from_u64(5);
        let mut p = Params::<f64>::new();
        let enc = BiLstm::new(&mut p, "enc", 3, 4, 1, &mut rng);
        let (fwd, bwd) = enc.layers[0];
        let w = p.get(fwd.w).clone();
        let b = p.get(fwd.b).clone();
        *p.get_mut(bwd.w) = w;
        *p.get_mut(bwd.b) = b;
        let xs = seq(&mut rng, 6, 3);
        let rev: Vec<_> = xs.iter().rev().cloned().collect();
        let (a, _) = enc.forward(&p, &xs).unwrap();
        let (r, _) = enc.forward(&p, &rev).unwrap();
        for k in 0..4 {
            assert!((a.last[k] - r.last[4 + k]).abs() < 1e-12);
            assert!((a.last[4 + k] - r.last[k]).abs() < 1e-12);
        }
    }

    #[test]
    fn rejects_empty_and_misshaped() {
        let mut rng = Rng::seed_from_u64(5);
        let mut p = Params::<f64>::new();
        let enc = BiLstm::new(&mut p, "enc", 3, 2, 1, &mut rng);
        assert_eq!(enc.forward(&p, &[]).unwrap_err(), NeuralError::EmptySequence);
        assert!(enc.forward(&p, &[vec![0.0; 2]]).is_err());
    }

    #[test]
    fn forget_bias_starts_at_one() {
        let mut rng = Rng::seed_from_u64(1);
        let mut p = Params::<f32>::new();
        let cell = LstmCell::new(&mut p, "c", 2, 3, &mut rng);
        assert_eq!(p.get(cell.b).data(), &[0., 0., 0., 1., 1., 1., 0., 0., 0., 0., 0., 0.]);
    }
}
