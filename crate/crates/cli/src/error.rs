use actseq::bench::BenchError;
use actseq::models::ModelError;
use actseq::neural::NeuralError;

/// Failure classes and their exit codes.
#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Data(String),
    Divergence(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Data(_) => 3,
            CliError::Divergence(_) => 4,
        }
    }

    /// Single-line JSON record for stderr.
    pub fn to_json_line(&self) -> String {
        let (kind, message) = match self {
            CliError::Usage(m) => ("usage", m),
            CliError::Data(m) => ("data", m),
            CliError::Divergence(m) => ("divergence", m),
        };
        serde_json::json!({
            "error": kind,
            "code": self.exit_code(),
            "message": message,
        })
        .to_string()
    }

    pub fn data(context: impl std::fmt::Display, e: impl std::fmt::Display) -> Self {
        CliError::Data(format!("{context}: {e}"))
    }
}

impl From<ModelError> for CliError {
    fn from(e: ModelError) -> Self {
        match e {
            ModelError::Divergence { .. } | ModelError::Neural(NeuralError::NonFiniteLoss) => {
                CliError::Divergence(e.to_string())
            }
            ModelError::Config(_) => CliError::Usage(e.to_string()),
            _ => CliError::Data(e.to_string()),
        }
    }
}

impl From<NeuralError> for CliError {
    fn from(e: NeuralError) -> Self {
        ModelError::from(e).into()
    }
}

impl From<BenchError> for CliError {
    fn from(e: BenchError) -> Self {
        match e {
            BenchError::Model(m) => m.into(),
            other => CliError::Data(other.to_string()),
        }
    }
}

macro_rules! data_errors {
    ($($t:ty),*) => {$(
        impl From<$t> for CliError {
            fn from(e: $t) -> Self {
                CliError::Data(e.to_string())
            }
        }
    )*};
}

data_errors!(
    actseq::session_log::LogError,
    actseq::actions::FormatError,
    actseq::actions::ReplayError,
    actseq::symbols::SymbolError,
    actseq::editor_space::EditorError,
    actseq::synth::SynthError
);
