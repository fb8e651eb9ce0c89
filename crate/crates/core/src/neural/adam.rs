use crate::scalar::Scalar;

use super::{Gradients, Params};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AdamConfig {
    pub lr: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub eps: f64,
    /// Rescale gradients whose global norm exceeds this value.
    pub clip_norm: Option<f64>,
}

impl Default for AdamConfig {
    fn default() -> Self {
        AdamConfig {
            lr: 1e-3,
            beta1: 0.9,
            beta2: 0.999,
            eps: 1e-8,
            clip_norm: Some(5.0),
        }
    }
}

/// First and second moment estimates plus the step counter.
#[derive(Debug, Clone, PartialEq)]
pub struct AdamState<S> {
    pub m: Gradients<S>,
    pub v: Gradients<S>,
    pub t: u64,
}

#[derive(Debug, Clone)]
pub struct Adam<S> {
    pub config: AdamConfig,
    pub state: AdamState<S>,
}

impl<S: Scalar> Adam<S> {
    pub fn new(params: &Params<S>, config: AdamConfig) -> Self {
        Adam {
            config,
            state: AdamState {
                m: params.zeros_like(),
                v: params.zeros_like(),
                t: 0,
            },
        }
    }

    /// One update with bias-corrected moments.
    pub fn step(&mut self, params: &mut Params<S>, grads: &Gradients<S>) {
        let c = self.config;
        let clip = match c.clip_norm {
            Some(max) => {
                let n = grads.global_norm().as_f64();
                if n > max {
                    max / n
                } else {
                    1.0
                }
            }
            None => 1.0,
        };
        let st = &mut self.state;
        st.t += 1;
        let (b1, b2) = (S::of(c.beta1), S::of(c.beta2));
        let bc1 = S::of(1.0 - c.beta1.powi(st.t as i32));
        let bc2 = S::of(1.0 - c.beta2.powi(st.t as i32));
        let (lr, eps, clip) = (S::of(c.lr), S::of(c.eps), S::of(clip));
        let one = S::one();
        let grads_t = grads.tensors();
        for (i, p) in params.tensors_mut().enumerate() {
            let g = grads_t[i].data();
            let m = st.m.tensors_mut()[i].data_mut();
            for (mj, &gj) in m.iter_mut().zip(g) {
                *mj = b1 * *mj + (one - b1) * gj * clip;
            }
            let v = st.v.tensors_mut()[i].data_mut();
            for (vj, &gj) in v.iter_mut().zip(g) {
                let gc = gj * clip;
                *vj = b2 * *vj + (one - b2) * gc * gc;
            }
            let m = st.m.tensors()[i].data();
            let v = st.v.tensors()[i].data();
            for ((pj, &mj), &vj) in p.data_mut().iter_mut().zip(m).zip(v) {
                *pj -= lr * (mj / bc1) / ((vj / bc2).sqrt() + eps);
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::neural::Tensor;

    #[test]
    fn single_step_by_hand() {
        let mut p = Params::<f64>::new();
        let id = p.add("x", Tensor::from_vec(&[2], vec![1.0, -2.0]).unwrap());
        let mut g = p.zeros_like();
        g.get_mut(id).data_mut().copy_from_slice(&[0.5, -0.1]);
        let cfg = AdamConfig {
            lr: 0.1,
            clip_norm: None,
            ..AdamConfig::default()
        };
        let mut opt = Adam::new(&p, cfg);
        opt.step(&mut p, &g);
        // m = 0.1 g, v = 0.001 g^2; corrected m = g, v = g^2; step = lr * g/(|g|+eps)
        let exp0 = 1.0 - 0.1 * 0.5 / (0.5 + 1e-8);
        let exp1 = -2.0 + 0.1 * 0.1 / (0.1 + 1e-8);
        assert!((p.get(id).data()[0] - exp0).abs() < 1e-12);
        assert!((p.get(id).data()[1] - exp1).abs() < 1e-12);
        // second step with the same gradient
        opt.step(&mut p, &g);
        let m = 0.9 * 0.05 + 0.1 * 0.5;
        let v = 0.999 * 0.001 * 0.25 + 0.001 * 0.25;
        let mh = m / (1.0 - 0.81);
        let vh = v / (1.0 - 0.999f64.powi(2));
        let exp0b = exp0 - 0.1 * mh / (vh.sqrt() + 1e-8);
        assert!((p.get(id).data()[0] - exp0b).abs() < 1e-12);
    }

    #[test]
    fn clipping_bounds_the_effective_gradient() {
        let mut p = Params::<f64>::new();
        let id = p.add("x", Tensor::zeros(&[1]));
        let mut g = p.zeros_like();
        g.get_mut(id).data_mut()[0] = 100.0;
        let mut opt = Adam::new(
            &p,
            AdamConfig {
                clip_norm: Some(1.0),
                ..AdamConfig::default()
            },
        );
        opt.step(&mut p, &g);
        assert!((opt.state.m.get(id).data()[0] - 0.1).abs() < 1e-12);
    }
}
