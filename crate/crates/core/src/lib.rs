//! Post-editing action sequences.
//!
//! Compiles raw keystroke and mouse logs of machine-translation post-editing
//! sessions into word-level action sequences, learns editor identification
//! models and editor embeddings from them, and predicts post-editing time.

pub mod actions;
pub mod bench;
pub mod editor_space;
pub mod fixtures;
pub mod models;
pub mod neural;
pub mod scalar;
pub mod session_log;
pub mod symbols;
pub mod synth;

pub use scalar::Scalar;

pub type IdentifierModelF32 = models::IdentifierModel<f32>;
pub type IdentifierModelF64 = models::IdentifierModel<f64>;
pub type BaselineModelF32 = models::BaselineModel<f32>;
pub type BaselineModelF64 = models::BaselineModel<f64>;
pub type TimePredictorF32 = models::TimePredictor<f32>;
pub type TimePredictorF64 = models::TimePredictor<f64>;
pub type DynamicStoreF32 = editor_space::DynamicStore<f32>;
pub type EditorEmbeddingF32 = editor_space::EditorEmbedding<f32>;
