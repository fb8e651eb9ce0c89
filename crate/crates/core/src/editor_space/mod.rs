//! Editor-level artifacts built from session embeddings and action sequences.

mod balance;
mod export;
mod project;
mod store;

pub use balance::{balance_dataset, SplitSizes, Splits};
pub use export::{editor_table_tsv, percentile_ranks, scatter_svg, EditorRow, ScatterPoint};
pub use project::{project_2d, Projection};
pub use store::{DynamicStore, SharedStore, DEFAULT_CAPACITY};

use crate::actions::Action;
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum EditorError {
    #[error("empty input")]
    EmptyInput,
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimMismatch { expected: usize, got: usize },
    #[error("need {needed} editors with enough sessions, found {found}")]
    NotEnoughEditors { needed: usize, found: usize },
    #[error("editor {editor} has only {found} usable sessions, {needed} needed")]
    NotEnoughSessions { editor: String, needed: usize, found: usize },
    #[error("degenerate input: {0}")]
    DegenerateInput(String),
}

/// Mean of one editor's session vectors.
#[derive(Debug, Clone, PartialEq)]
pub struct EditorEmbedding<S> {
    pub editor_id: String,
    pub vector: Vec<S>,
    pub n_sessions: usize,
}

/// Coordinate-wise mean of a non-empty list of equal-length vectors.
pub fn mean_vector<S: Scalar, V: AsRef<[S]>>(vs: &[V]) -> Result<Vec<S>, EditorError> {
    let first = vs.first().ok_or(EditorError::EmptyInput)?.as_ref();
    let mut acc = vec![S::zero(); first.len()];
    for v in vs {
        let v = v.as_ref();
        if v.len() != acc.len() {
            return Err(EditorError::DimMismatch {
                expected: acc.len(),
                got: v.len(),
            });
        }
        for (a, &x) in acc.iter_mut().zip(v) {
            *a += x;
        }
    }
    let n = S::of(vs.len() as f64);
    acc.iter_mut().for_each(|a| *a /= n);
    Ok(acc)
}

pub fn editor_embedding<S: Scalar, V: AsRef<[S]>>(
    editor_id: &str,
    sessions: &[V],
) -> Result<EditorEmbedding<S>, EditorError> {
    Ok(EditorEmbedding {
        editor_id: editor_id.to_owned(),
        vector: mean_vector(sessions)?,
        n_sessions: sessions.len(),
    })
}

/// Behavioral summary of an editor's sessions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BehaviorFeatures {
    /// Mean of each session's first `W` argument, in seconds.
    pub avg_first_wait: f64,
    /// `JB` occurrences over MT tokens, pooled across sessions.
    pub jump_backs_per_mt_token: f64,
    /// Sum of `MC` and `MS` arguments over MT tokens, pooled across sessions.
    pub mouse_events_per_mt_token: f64,
}

/// Features over `(actions, MT token count)` pairs.
pub fn behavior_features<A: AsRef<[Action]>>(sessions: &[(A, usize)]) -> Result<BehaviorFeatures, EditorError> {
    if sessions.is_empty() {
        return Err(EditorError::EmptyInput);
    }
    let mut first_wait = 0.0;
    let (mut jb, mut mouse, mut tokens) = (0u64, 0u64, 0u64);
    for (seq, n) in sessions {
        let seq = seq.as_ref();
        if let Some(w) = seq.iter().find_map(|a| match a {
            Action::Wait(v) => Some(*v),
            _ => None,
        }) {
            first_wait += w as f64;
        }
        for a in seq {
            match a {
                Action::JumpBack(_) => jb += 1,
                Action::MouseClicks(c) | Action::MouseSelections(c) => mouse += u64::from(*c),
                _ => {}
            }
        }
        tokens += *n as u64;
    }
    let t = tokens.max(1) as f64;
    Ok(BehaviorFeatures {
        avg_first_wait: first_wait / sessions.len() as f64,
        jump_backs_per_mt_token: jb as f64 / t,
        mouse_events_per_mt_token: mouse as f64 / t,
    })
}

/// Product-moment correlation. Degenerate input (length < 2, mismatched
/// lengths, or zero variance) yields NaN with a warning.
pub fn pearson(xs: &[f64], ys: &[f64]) -> f64 {
    if xs.len() != ys.len() || xs.len() < 2 {
        log::warn!("pearson: need two equal-length lists of at least 2 values");
        return f64::NAN;
    }
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (&x, &y) in xs.iter().zip(ys) {
        let (dx, dy) = (x - mx, y - my);
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if sxx <= 0.0 || syy <= 0.0 || !sxx.is_finite() || !syy.is_finite() {
        log::warn!("pearson: zero variance");
        return f64::NAN;
    }
    (sxy / (sxx.sqrt() * syy.sqrt())).clamp(-1.0, 1.0)
}

/// Cosine similarity; zero when either vector is zero.
pub fn cosine<S: Scalar>(a: &[S], b: &[S]) -> f64 {
    let dot: f64 = a.iter().zip(b).map(|(x, y)| x.as_f64() * y.as_f64()).sum();
    let na: f64 = a.iter().map(|x| x.as_f64().powi(2)).sum::<f64>().sqrt();
    let nb: f64 = b.iter().map(|x| x.as_f64().powi(2)).sum::<f64>().sqrt();
    if na == 0.0 || nb == 0.0 {
        0.0
    } else {
        dot / (na * nb)
    }
}
