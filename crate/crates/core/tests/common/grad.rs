use actseq::models::{BaselineInput, BaselineKind, BaselineModel, DeltaFeatures, IdentifierModel, ModelConfig, TimeInput, TimePredictor};
use actseq::neural::{classification_step, grad_check, regression_step, GradCheckOptions, GradCheckReport, Network, Rng};
use rand::{Rng as _, SeedableRng};

const DROPOUT_SEED: u64 = 99;
const SCALE: f64 = 0.5;

pub fn toy_config() -> ModelConfig {
    let mut c = ModelConfig::default();
    c.encoder.embed_dim = 3;
    c.encoder.hidden_dim = 3;
    c.encoder.num_layers = 2;
    c.encoder.dropout_rate = 0.25;
    c.repr_dim = 4;
    c.ff_dim = 4;
    c.delta_embed_dim = 3;
    c
}

fn opts() -> GradCheckOptions {
    GradCheckOptions {
        max_coords: usize::MAX,
        ..GradCheckOptions::fourth_order()
    }
}

fn drop_rng() -> Rng {
    Rng::seed_from_u64(DROPOUT_SEED)
}

/// Moves the parameters to a random point away from the small initial scale,
/// where many gradients would vanish into finite-difference noise.
fn randomize<N: Network<f64>>(net: &mut N, seed: u64) {
    let mut rng = Rng::seed_from_u64(seed);
    for t in net.params_mut().tensors_mut() {
        for v in t.data_mut() {
            *v = rng.gen_range(-SCALE..SCALE);
        }
    }
}

/// Checks every parameter of a classifier at a random point, with a fixed dropout mask.
pub fn classifier_error<N: Network<f64>>(mut net: N, x: &N::Input, label: usize, seed: u64) -> GradCheckReport {
    randomize(&mut net, seed);
    let mut g = net.params().zeros_like();
    classification_step(&net, x, label, Some(&mut drop_rng()), &mut g).unwrap();
    let loss = |n: &N| {
        let (logits, _) = n.forward(x, Some(&mut drop_rng())).unwrap();
        actseq::neural::softmax_cross_entropy(&logits, label).unwrap().0
    };
    grad_check(&mut net, |n| n.params_mut(), loss, &g, opts())
}

pub fn regression_error<N: Network<f64>>(mut net: N, x: &N::Input, target: f64, seed: u64) -> GradCheckReport {
    randomize(&mut net, seed);
    let mut g = net.params().zeros_like();
    regression_step(&net, x, target, Some(&mut drop_rng()), &mut g).unwrap();
    let loss = |n: &N| {
        let (out, _) = n.forward(x, Some(&mut drop_rng())).unwrap();
        actseq::neural::mse(&out, &[target]).unwrap().0
    };
    grad_check(&mut net, |n| n.params_mut(), loss, &g, opts())
}

fn labels() -> Vec<String> {
    vec!["e0".into(), "e1".into(), "e2".into()]
}

fn baseline_input() -> BaselineInput {
    BaselineInput {
        delta: DeltaFeatures {
            sentence_count: 4,
            word_edit_distance: 3,
            source_word_count: 16,
            mt_word_count: 17,
            pe_word_count: 15,
        },
        mt: vec![2, 5, 1, 3],
        pe: vec![4, 2, 5],
    }
}

/// Gradient check of each architecture at toy dimensions, parameters drawn from `seed`.
pub fn all_architecture_errors(seed: u64) -> Vec<(String, GradCheckReport)> {
    let cfg = toy_config();
    let mut out = Vec::new();
    let id = IdentifierModel::<f64>::new(12, labels(), cfg.clone(), 1).unwrap();
    out.push(("identifier".to_owned(), classifier_error(id, &[3usize, 0, 7, 11, 5][..], 1, seed)));
    for kind in BaselineKind::ALL {
        let m = BaselineModel::<f64>::new(kind, 6, labels(), cfg.clone(), 2).unwrap();
        out.push((kind.as_str().to_owned(), classifier_error(m, &baseline_input(), 2, seed)));
    }
    let tp = TimePredictor::<f64>::new(6, 2, cfg, 3).unwrap();
    let x = TimeInput {
        source: vec![1, 4, 2],
        mt: vec![3, 5],
        editor: vec![0.4, -0.7],
    };
    out.push(("time".to_owned(), regression_error(tp, &x, 0.8, seed)));
    out
}
