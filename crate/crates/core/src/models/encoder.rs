use crate::neural::{
    attend, attend_backward, relu, relu_backward, Attention, BiLstm, Dense, Embedding, EncoderCache,
    EncoderConfig, EncoderOutput, Gradients, NeuralError, Params, Rng,
};
use crate::scalar::{axpy, Scalar};

/// Embedding lookup followed by a stacked bidirectional LSTM.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SeqEncoder {
    pub emb: Embedding,
    pub enc: BiLstm,
}

pub struct SeqCache<S> {
    pub out: EncoderOutput<S>,
    cache: EncoderCache<S>,
}

impl SeqEncoder {
    pub fn new<S: Scalar>(
        params: &mut Params<S>,
        name: &str,
        emb: Embedding,
        cfg: &EncoderConfig,
        rng: &mut Rng,
    ) -> Self {
        let enc = BiLstm::new(params, name, emb.dim, cfg.hidden_dim, cfg.num_layers, rng);
        SeqEncoder { emb, enc }
    }

    pub fn forward<S: Scalar>(&self, params: &Params<S>, ids: &[usize]) -> Result<SeqCache<S>, NeuralError> {
        let xs = self.emb.forward(params, ids)?;
        let (out, cache) = self.enc.forward(params, &xs)?;
        Ok(SeqCache { out, cache })
    }

    pub fn backward<S: Scalar>(
        &self,
        params: &Params<S>,
        ids: &[usize],
        cache: &SeqCache<S>,
        d_states: Option<&[Vec<S>]>,
        d_last: Option<&[S]>,
        grads: &mut Gradients<S>,
    ) {
        let dx = self.enc.backward(params, &cache.cache, d_states, d_last, grads);
        self.emb.backward(ids, &dx, grads);
    }
}

/// Two encoders whose final states attend over each other's hidden states.
///
/// `u_a = relu(FF_a([attend(last_a, states_b); last_a]))` and symmetrically
/// for `b`; the output is `[u_a; u_b]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CrossAttention {
    pub a: SeqEncoder,
    pub b: SeqEncoder,
    pub ff_a: Dense,
    pub ff_b: Dense,
}

pub struct CrossCache<S> {
    ca: SeqCache<S>,
    cb: SeqCache<S>,
    att_a: Attention<S>,
    att_b: Attention<S>,
    in_a: Vec<S>,
    in_b: Vec<S>,
    u_a: Vec<S>,
    u_b: Vec<S>,
}

impl CrossAttention {
    pub fn new<S: Scalar>(
        params: &mut Params<S>,
        name: &str,
        emb: Embedding,
        cfg: &EncoderConfig,
        ff_dim: usize,
        rng: &mut Rng,
    ) -> Self {
        let a = SeqEncoder::new(params, &format!("{name}.enc_a"), emb, cfg, rng);
        let b = SeqEncoder::new(params, &format!("{name}.enc_b"), emb, cfg, rng);
        let d = 4 * cfg.hidden_dim;
        let ff_a = Dense::new(params, &format!("{name}.ff_a"), d, ff_dim, rng);
        let ff_b = Dense::new(params, &format!("{name}.ff_b"), d, ff_dim, rng);
        CrossAttention { a, b, ff_a, ff_b }
    }

    pub fn output_dim(&self) -> usize {
        self.ff_a.output + self.ff_b.output
    }

    pub fn forward<S: Scalar>(
        &self,
        params: &Params<S>,
        ids_a: &[usize],
        ids_b: &[usize],
    ) -> Result<(Vec<S>, CrossCache<S>), NeuralError> {
        let ca = self.a.forward(params, ids_a)?;
        let cb = self.b.forward(params, ids_b)?;
        let att_a = attend(&ca.out.last, &cb.out.states, &cb.out.states)?;
        let att_b = attend(&cb.out.last, &ca.out.states, &ca.out.states)?;
        let in_a = [att_a.context.as_slice(), &ca.out.last].concat();
        let in_b = [att_b.context.as_slice(), &cb.out.last].concat();
        let u_a = relu(&self.ff_a.forward(params, &in_a));
        let u_b = relu(&self.ff_b.forward(params, &in_b));
        let out = [u_a.as_slice(), &u_b].concat();
        Ok((
            out,
            CrossCache {
                ca,
                cb,
                att_a,
                att_b,
                in_a,
                in_b,
                u_a,
                u_b,
            },
        ))
    }

    pub fn backward<S: Scalar>(
        &self,
        params: &Params<S>,
        ids_a: &[usize],
        ids_b: &[usize],
        c: &CrossCache<S>,
        d_out: &[S],
        grads: &mut Gradients<S>,
    ) {
        let (du_a, du_b) = d_out.split_at(self.ff_a.output);
        let dz_a = relu_backward(&c.u_a, du_a);
        let dz_b = relu_backward(&c.u_b, du_b);
        let din_a = self.ff_a.backward(params, &c.in_a, &dz_a, grads);
        let din_b = self.ff_b.backward(params, &c.in_b, &dz_b, grads);
        let w = c.ca.out.last.len();
        let (dctx_a, dlast_a) = din_a.split_at(w);
        let (dctx_b, dlast_b) = din_b.split_at(w);
        let mut d_last_a = dlast_a.to_vec();
        let mut d_last_b = dlast_b.to_vec();

        // a's query over b's states
        let ga = attend_backward(&c.ca.out.last, &c.cb.out.states, &c.cb.out.states, &c.att_a.weights, dctx_a);
        axpy(S::one(), &ga.d_query, &mut d_last_a);
        let mut d_states_b: Vec<Vec<S>> = ga.d_keys;
        for (d, v) in d_states_b.iter_mut().zip(&ga.d_values) {
            axpy(S::one(), v, d);
        }
        // b's query over a's states
        let gb = attend_backward(&c.cb.out.last, &c.ca.out.states, &c.ca.out.states, &c.att_b.weights, dctx_b);
        axpy(S::one(), &gb.d_query, &mut d_last_b);
        let mut d_states_a: Vec<Vec<S>> = gb.d_keys;
        for (d, v) in d_states_a.iter_mut().zip(&gb.d_values) {
            axpy(S::one(), v, d);
        }
        self.a.backward(params, ids_a, &c.ca, Some(&d_states_a), Some(&d_last_a), grads);
        self.b.backward(params, ids_b, &c.cb, Some(&d_states_b), Some(&d_last_b), grads);
    }
}
