use std::collections::HashMap;

use actseq::actions::{format_sequence, parse_sequence, Action};
use actseq::editor_space::{behavior_features, editor_embedding, pearson, project_2d, DynamicStore};
use nalgebra::{DMatrix, SymmetricEigen};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * (1.0 + a.abs().max(b.abs()))
}

fn random_cloud(n: usize, scales: &[f64], seed: u64) -> Vec<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| scales.iter().map(|s| s * rng.gen_range(-1.0..1.0) + 3.0).collect())
        .collect()
}

/// Sample covariance eigenpairs, largest first, from a dense solver.
fn eigen_oracle(pts: &[Vec<f64>]) -> Vec<(f64, Vec<f64>)> {
    let (n, d) = (pts.len(), pts[0].len());
    let x = DMatrix::from_fn(n, d, |i, j| pts[i][j]);
    let mean = x.row_mean();
    let c = DMatrix::from_fn(n, d, |i, j| x[(i, j)] - mean[j]);
    let cov = c.transpose() * &c / (n as f64 - 1.0);
    let eig = SymmetricEigen::new(cov);
    let mut pairs: Vec<(f64, Vec<f64>)> = (0..d)
        .map(|k| (eig.eigenvalues[k], eig.eigenvectors.column(k).iter().copied().collect()))
        .collect();
    pairs.sort_by(|a, b| b.0.total_cmp(&a.0));
    pairs
}

fn sample_variance(xs: impl Iterator<Item = f64> + Clone) -> f64 {
    let n = xs.clone().count() as f64;
    let m = xs.clone().sum::<f64>() / n;
    xs.map(|x| (x - m).powi(2)).sum::<f64>() / (n - 1.0)
}

#[test]
fn pca_matches_dense_eigensolver() {
    for seed in 0..5 {
        let pts = random_cloud(60, &[5.0, 3.0, 1.5, 0.7, 0.2], seed);
        let p = project_2d(&pts).unwrap();
        let oracle = eigen_oracle(&pts);
        for k in 0..2 {
            assert!(close(p.eigenvalues[k], oracle[k].0, 1e-6), "{k}: {} vs {}", p.eigenvalues[k], oracle[k].0);
            let var = sample_variance(p.coords.iter().map(|c| c[k]));
            assert!(close(var, oracle[k].0, 1e-6));
            let dot: f64 = p.components[k].iter().zip(&oracle[k].1).map(|(a, b)| a * b).sum();
            assert!(close(dot.abs(), 1.0, 1e-6), "component {k} off by {dot}");
            // sign convention: largest-magnitude coordinate positive
            let top = p.components[k].iter().copied().fold(0.0f64, |m, v| if v.abs() > m.abs() { v } else { m });
            assert!(top > 0.0);
        }
    }
}

#[test]
fn planar_points_keep_their_distances() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let q = DMatrix::from_fn(6, 6, |_, _| rng.gen_range(-1.0..1.0)).qr().q();
    let plane: Vec<[f64; 2]> = (0..25).map(|_| [rng.gen_range(-4.0..4.0), rng.gen_range(-1.0..1.0)]).collect();
    let pts: Vec<Vec<f64>> = plane
        .iter()
        .map(|&[a, b]| (0..6).map(|r| a * q[(r, 0)] + b * q[(r, 1)] + 1.5).collect())
        .collect();
    let p = project_2d(&pts).unwrap();
    for i in 0..pts.len() {
        for j in 0..i {
            let d_in: f64 = pts[i].iter().zip(&pts[j]).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt();
            let (ci, cj) = (p.coords[i], p.coords[j]);
            let d_out = ((ci[0] - cj[0]).powi(2) + (ci[1] - cj[1]).powi(2)).sqrt();
            assert!((d_in - d_out).abs() < 1e-6);
        }
    }
}

#[test]
fn collinear_points_have_no_second_component() {
    let pts: Vec<Vec<f64>> = (0..10).map(|i| vec![i as f64, 2.0 * i as f64, -(i as f64)]).collect();
    let p = project_2d(&pts).unwrap();
    assert!(p.eigenvalues[1].abs() < 1e-9);
    assert!(p.coords.iter().all(|c| c[1].abs() < 1e-6));
}

#[test]
fn identical_points_are_degenerate() {
    assert!(project_2d(&[vec![1.0f64, 2.0], vec![1.0, 2.0]]).is_err());
}

#[derive(Debug, Clone)]
struct Update {
    editor: usize,
    vector: Vec<f64>,
}

fn updates(n_editors: usize, dim: usize, max_len: usize) -> impl Strategy<Value = Vec<Update>> {
    prop::collection::vec(
        (0..n_editors, prop::collection::vec(-10.0..10.0f64, dim)).prop_map(|(editor, vector)| Update { editor, vector }),
        0..max_len,
    )
}

fn check_store(ups: &[Update], capacity: usize, dim: usize, n_editors: usize) -> Result<(), TestCaseError> {
    let mut store = DynamicStore::with_capacity(dim, capacity);
    let mut history: HashMap<usize, Vec<Vec<f64>>> = HashMap::new();
    for u in ups {
        let id = format!("ed{}", u.editor);
        store.update(&id, u.vector.clone()).unwrap();
        history.entry(u.editor).or_default().push(u.vector.clone());
        for e in 0..n_editors {
            let id = format!("ed{e}");
            let all = history.get(&e).cloned().unwrap_or_default();
            let recent = &all[all.len().saturating_sub(capacity)..];
            prop_assert!(store.len_of(&id) <= capacity);
            prop_assert_eq!(store.stored(&id), recent.to_vec());
            let q = store.query(&id);
            for j in 0..dim {
                let want = if recent.is_empty() {
                    0.0
                } else {
                    recent.iter().map(|v| v[j]).sum::<f64>() / recent.len() as f64
                };
                prop_assert!((q[j] - want).abs() < 1e-9);
            }
        }
    }
    Ok(())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn store_matches_brute_force(ups in updates(6, 3, 80), capacity in 1..13usize) {
        check_store(&ups, capacity, 3, 6)?;
    }

    #[test]
    fn pearson_is_affine_invariant(
        pairs in prop::collection::vec((-100.0..100.0f64, -100.0..100.0f64), 3..40),
        a in 0.1..10.0f64,
        b in -50.0..50.0f64,
    ) {
        let (xs, ys): (Vec<f64>, Vec<f64>) = pairs.into_iter().unzip();
        let r = pearson(&xs, &ys);
        prop_assume!(r.is_finite());
        let scaled: Vec<f64> = xs.iter().map(|x| a * x + b).collect();
        prop_assert!((pearson(&scaled, &ys) - r).abs() < 1e-9);
        let neg: Vec<f64> = ys.iter().map(|y| -y).collect();
        prop_assert!((pearson(&xs, &neg) + r).abs() < 1e-9);
        prop_assert!((pearson(&ys, &xs) - r).abs() < 1e-12);
    }

    #[test]
    fn editor_embedding_ignores_order(vs in prop::collection::vec(prop::collection::vec(-5.0..5.0f64, 4), 1..20), seed in any::<u64>()) {
        let mut shuffled = vs.clone();
        use rand::seq::SliceRandom;
        shuffled.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
        let a = editor_embedding("e", &vs).unwrap();
        let b = editor_embedding("e", &shuffled).unwrap();
        for (x, y) in a.vector.iter().zip(&b.vector) {
            prop_assert!((x - y).abs() < 1e-12);
        }
    }
}

#[test]
fn store_brute_force_20_editors() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let ups: Vec<Update> = (0..1200)
        .map(|_| Update {
            editor: rng.gen_range(0..20),
            vector: (0..4).map(|_| rng.gen_range(-1.0..1.0)).collect(),
        })
        .collect();
    check_store(&ups, 10, 4, 20).unwrap();
}

#[test]
fn pearson_degenerate_is_nan() {
    assert!(pearson(&[1.0], &[2.0]).is_nan());
    assert!(pearson(&[1.0, 1.0, 1.0], &[1.0, 2.0, 3.0]).is_nan());
    assert!(pearson(&[1.0, 2.0], &[1.0]).is_nan());
}

/// Features recounted from the serialized sequences.
fn recount(sessions: &[(String, usize)]) -> (f64, f64, f64) {
    let mut first = 0.0;
    let (mut jb, mut mouse, mut tokens) = (0.0, 0.0, 0.0);
    for (text, n) in sessions {
        let toks: Vec<(&str, &str)> = text.split(' ').map(|t| t.split_once(':').unwrap()).collect();
        if let Some((_, v)) = toks.iter().find(|(k, _)| *k == "W") {
            first += v.parse::<f64>().unwrap();
        }
        jb += toks.iter().filter(|(k, _)| *k == "JB").count() as f64;
        mouse += toks
            .iter()
            .filter(|(k, _)| *k == "MC" || *k == "MS")
            .map(|(_, v)| v.parse::<f64>().unwrap())
            .sum::<f64>();
        tokens += *n as f64;
    }
    (first / sessions.len() as f64, jb / tokens, mouse / tokens)
}

#[test]
fn behavior_features_agree_with_a_recount() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for _ in 0..50 {
        let sessions: Vec<(Vec<Action>, usize)> = (0..rng.gen_range(1..6))
            .map(|_| {
                let mut toks = vec![format!("W:{}", rng.gen_range(0..90))];
                for _ in 0..rng.gen_range(0..15) {
                    toks.push(match rng.gen_range(0..5) {
                        0 => format!("JB:{}", rng.gen_range(1..9)),
                        1 => format!("MC:{}", rng.gen_range(1..4)),
                        2 => format!("MS:{}", rng.gen_range(1..4)),
                        3 => format!("W:{}", rng.gen_range(0..9)),
                        _ => "R:x".to_owned(),
                    });
                }
                toks.push("S:--".into());
                (parse_sequence(&toks.join(" "), false).unwrap(), rng.gen_range(5..40))
            })
            .collect();
        let f = behavior_features(&sessions).unwrap();
        let texts: Vec<(String, usize)> = sessions.iter().map(|(a, n)| (format_sequence(a), *n)).collect();
        let (fw, jb, mouse) = recount(&texts);
        assert!((f.avg_first_wait - fw).abs() < 1e-12);
        assert!((f.jump_backs_per_mt_token - jb).abs() < 1e-12);
        assert!((f.mouse_events_per_mt_token - mouse).abs() < 1e-12);
    }
}
