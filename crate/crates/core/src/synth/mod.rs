//! Synthetic post-editors.
//!
//! Documents are built from a fixed 200-word lexicon with marked MT errors;
//! sessions are keystroke/mouse logs sampled from behavioral profiles, so every
//! downstream experiment runs on data with known ground truth.

mod corpus;
mod document;
mod session;

use rand::Rng as _;
use rand::SeedableRng;
use rand_distr::{Distribution, LogNormal};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::neural::Rng;

pub use corpus::{generate_corpus, read_truth_tsv, truth_tsv, CorpusSpec, SynthCorpus};
pub use document::{generate_document, lexicon, DocumentSpec, ErrorKind, ErrorSite, SynthDocument};
pub use session::{generate_session, GeneratedSession, GroundTruth, NAV_CLICK_PROB};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SynthError {
    #[error("invalid profile {profile}: {reason}")]
    InvalidProfile { profile: String, reason: String },
    #[error("invalid document spec: {0}")]
    InvalidDocument(String),
    #[error("malformed ground-truth table at line {line}: {reason}")]
    Truth { line: usize, reason: String },
}

/// Mean and standard deviation of a positive quantity.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeanSd {
    pub mean: f64,
    pub sd: f64,
}

impl MeanSd {
    pub const fn new(mean: f64, sd: f64) -> Self {
        MeanSd { mean, sd }
    }

    /// Log-normal draw with exactly this mean and standard deviation.
    pub fn sample(&self, rng: &mut Rng) -> f64 {
        if self.sd <= 0.0 {
            return self.mean;
        }
        let s2 = (1.0 + (self.sd / self.mean).powi(2)).ln();
        let mu = self.mean.ln() - 0.5 * s2;
        LogNormal::new(mu, s2.sqrt()).expect("finite parameters").sample(rng)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EditorProfile {
    pub profile_id: String,
    /// Pause before the first event, in seconds.
    pub read_first_seconds: MeanSd,
    /// Interval between keystrokes.
    pub typing_interval_ms: MeanSd,
    /// Expected mouse events per edit, besides navigation clicks.
    pub mouse_rate: f64,
    /// Probability of postponing an edit and jumping back to it later.
    pub jump_back_prob: f64,
    /// Probability of fixing a multi-word error by one selection-replacing paste.
    pub block_op_prob: f64,
    /// Thinking seconds per source word, spread over the pauses between edits.
    pub speed_multiplier: f64,
    /// Fraction of MT words edited; marked errors are always fixed.
    pub edit_rate: f64,
}

impl EditorProfile {
    pub fn validate(&self) -> Result<(), SynthError> {
        let bad = |reason: &str| {
            Err(SynthError::InvalidProfile {
                profile: self.profile_id.clone(),
                reason: reason.to_owned(),
            })
        };
        for (name, p) in [
            ("jump_back_prob", self.jump_back_prob),
            ("block_op_prob", self.block_op_prob),
            ("edit_rate", self.edit_rate),
        ] {
            if !(0.0..=1.0).contains(&p) {
                return bad(&format!("{name} must lie in [0, 1]"));
            }
        }
        for (name, v) in [
            ("read_first_seconds.mean", self.read_first_seconds.mean),
            ("typing_interval_ms.mean", self.typing_interval_ms.mean),
            ("speed_multiplier", self.speed_multiplier),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return bad(&format!("{name} must be positive"));
            }
        }
        if !(self.mouse_rate >= 0.0 && self.mouse_rate.is_finite()) {
            return bad("mouse_rate must be non-negative");
        }
        if !(self.read_first_seconds.sd >= 0.0 && self.typing_interval_ms.sd >= 0.0) {
            return bad("standard deviations must be non-negative");
        }
        if self.profile_id.is_empty() || self.profile_id.contains(char::is_whitespace) {
            return bad("profile_id must be a non-empty token");
        }
        Ok(())
    }

    /// Reads the full document before editing, rarely jumps back.
    pub fn planner(profile_id: &str) -> Self {
        EditorProfile {
            profile_id: profile_id.to_owned(),
            read_first_seconds: MeanSd::new(35.0, 8.0),
            typing_interval_ms: MeanSd::new(180.0, 50.0),
            mouse_rate: 0.3,
            jump_back_prob: 0.05,
            block_op_prob: 0.3,
            speed_multiplier: 2.0,
            edit_rate: 0.2,
        }
    }

    /// Starts right away and revisits earlier words as it goes.
    pub fn jumper(profile_id: &str) -> Self {
        EditorProfile {
            profile_id: profile_id.to_owned(),
            read_first_seconds: MeanSd::new(5.0, 1.5),
            jump_back_prob: 0.45,
            ..Self::planner(profile_id)
        }
    }
}

#[derive(Clone, Copy)]
enum Speed {
    Fast,
    Slow,
}

fn shaped(id: &str, planner: bool, mouse_heavy: bool, block_heavy: bool, speed: Speed, edit_rate: f64) -> EditorProfile {
    let mut p = if planner {
        EditorProfile::planner(id)
    } else {
        EditorProfile::jumper(id)
    };
    p.mouse_rate = if mouse_heavy { 1.2 } else { 0.1 };
    p.block_op_prob = if block_heavy { 0.85 } else { 0.1 };
    let (secs, typing) = match speed {
        Speed::Fast => (1.0, 110.0),
        Speed::Slow => (3.5, 260.0),
    };
    p.speed_multiplier = secs;
    p.typing_interval_ms = MeanSd::new(typing, 0.3 * typing);
    p.edit_rate = edit_rate;
    p
}

/// The six benchmark profiles over planner/jumper, mouse-heavy/keyboard,
/// block-heavy/word-by-word, speed and edit rate. Profiles come in pairs that
/// agree on what waits reveal (reading time, speed, edit count) and differ in
/// mouse habits; no two share planning, mouse and block habits together.
pub fn default_profiles() -> Vec<EditorProfile> {
    use Speed::*;
    vec![
        shaped("p1", true, true, false, Fast, 0.15),
        shaped("p2", true, false, true, Fast, 0.15),
        shaped("p3", false, true, true, Slow, 0.15),
        shaped("p4", false, false, false, Slow, 0.15),
        shaped("p5", true, true, true, Slow, 0.25),
        shaped("p6", true, false, false, Slow, 0.25),
    ]
}

/// A population of editors alternating between the planner and jumper
/// archetypes, with every parameter jittered per editor. Mouse habits and
/// speed are drawn independently of the archetype.
pub fn sample_population(n: usize, seed: u64) -> Vec<EditorProfile> {
    let mut rng = Rng::seed_from_u64(seed);
    (0..n)
        .map(|i| {
            let id = format!("ed{i:03}");
            let mut p = if i % 2 == 0 {
                EditorProfile::planner(&id)
            } else {
                EditorProfile::jumper(&id)
            };
            let mut jitter = |v: f64| v * rng.gen_range(0.7..1.3);
            p.read_first_seconds.mean = jitter(p.read_first_seconds.mean);
            p.jump_back_prob = jitter(p.jump_back_prob).min(1.0);
            let typing = rng.gen_range(110.0..260.0);
            p.typing_interval_ms = MeanSd::new(typing, 0.3 * typing);
            p.mouse_rate = rng.gen_range(0.05..0.4);
            p.block_op_prob = rng.gen_range(0.05..0.6);
            p.speed_multiplier = rng.gen_range(0.8..4.0);
            p.edit_rate = rng.gen_range(0.1..0.3);
            p
        })
        .collect()
}

/// Seed of the `index`-th stream derived from `seed`.
pub fn derive_seed(seed: u64, index: u64) -> u64 {
    fn mix(mut z: u64) -> u64 {
        z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }
    mix(seed ^ mix(index))
}
