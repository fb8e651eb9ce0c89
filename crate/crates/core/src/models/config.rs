use serde::{Deserialize, Serialize};

use crate::neural::{AdamConfig, EncoderConfig};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ConfigError {
    #[error("line {line}: expected key=value")]
    Syntax { line: usize },
    #[error("unknown key {0}")]
    UnknownKey(String),
    #[error("bad value for {key}: {value}")]
    BadValue { key: String, value: String },
    #[error("invalid configuration: {0}")]
    Invalid(String),
}

/// Hyperparameters shared by every model and its trainer.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelConfig {
    pub encoder: EncoderConfig,
    /// Width of the identifier's representation layer.
    pub repr_dim: usize,
    /// Width of the baseline and time-predictor feed-forward layers.
    pub ff_dim: usize,
    pub delta_embed_dim: usize,
    pub text_vocab: usize,
    pub lr: f64,
    pub batch_size: usize,
    pub max_epochs: usize,
    pub patience: usize,
    /// Gradient norm clip; 0 disables clipping.
    pub clip_norm: f64,
}

impl Default for ModelConfig {
    fn default() -> Self {
        ModelConfig {
            encoder: EncoderConfig::default(),
            repr_dim: 128,
            ff_dim: 128,
            delta_embed_dim: 16,
            text_vocab: 1000,
            lr: 1e-3,
            batch_size: 32,
            max_epochs: 100,
            patience: 5,
            clip_norm: 5.0,
        }
    }
}

pub const MODEL_KEYS: &[&str] = &[
    "embed_dim",
    "hidden_dim",
    "num_layers",
    "dropout",
    "repr_dim",
    "ff_dim",
    "delta_embed_dim",
    "text_vocab",
    "lr",
    "batch_size",
    "max_epochs",
    "patience",
    "clip_norm",
];

fn parse<T: std::str::FromStr>(key: &str, value: &str) -> Result<T, ConfigError> {
    value.trim().parse().map_err(|_| ConfigError::BadValue {
        key: key.to_owned(),
        value: value.to_owned(),
    })
}

/// Iterates `key=value` lines, skipping blanks and `#` comments.
pub fn kv_lines(text: &str) -> impl Iterator<Item = Result<(&str, &str), ConfigError>> {
    text.lines().enumerate().filter_map(|(i, l)| {
        let l = l.trim();
        if l.is_empty() || l.starts_with('#') {
            return None;
        }
        Some(
            l.split_once('=')
                .map(|(k, v)| (k.trim(), v.trim()))
                .ok_or(ConfigError::Syntax { line: i + 1 }),
        )
    })
}

impl ModelConfig {
    /// Sets one hyperparameter by name.
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), ConfigError> {
        match key {
            "embed_dim" => self.encoder.embed_dim = parse(key, value)?,
            "hidden_dim" => self.encoder.hidden_dim = parse(key, value)?,
            "num_layers" => self.encoder.num_layers = parse(key, value)?,
            "dropout" => self.encoder.dropout_rate = parse(key, value)?,
            "repr_dim" => self.repr_dim = parse(key, value)?,
            "ff_dim" => self.ff_dim = parse(key, value)?,
            "delta_embed_dim" => self.delta_embed_dim = parse(key, value)?,
            "text_vocab" => self.text_vocab = parse(key, value)?,
            "lr" => self.lr = parse(key, value)?,
            "batch_size" => self.batch_size = parse(key, value)?,
            "max_epochs" => self.max_epochs = parse(key, value)?,
            "patience" => self.patience = parse(key, value)?,
            "clip_norm" => self.clip_norm = parse(key, value)?,
            _ => return Err(ConfigError::UnknownKey(key.to_owned())),
        }
        Ok(())
    }

    pub fn from_kv_str(text: &str) -> Result<Self, ConfigError> {
        let mut c = ModelConfig::default();
        for kv in kv_lines(text) {
            let (k, v) = kv?;
            c.set(k, v)?;
        }
        c.validate()?;
        Ok(c)
    }

    pub fn to_kv_string(&self) -> String {
        let e = &self.encoder;
        format!(
            "embed_dim={}\nhidden_dim={}\nnum_layers={}\ndropout={}\nrepr_dim={}\nff_dim={}\n\
             delta_embed_dim={}\ntext_vocab={}\nlr={}\nbatch_size={}\nmax_epochs={}\npatience={}\nclip_norm={}\n",
            e.embed_dim,
            e.hidden_dim,
            e.num_layers,
            e.dropout_rate,
            self.repr_dim,
            self.ff_dim,
            self.delta_embed_dim,
            self.text_vocab,
            self.lr,
            self.batch_size,
            self.max_epochs,
            self.patience,
            self.clip_norm
        )
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        self.encoder.validate().map_err(ConfigError::Invalid)?;
        if self.repr_dim == 0 || self.ff_dim == 0 || self.delta_embed_dim == 0 {
            return Err(ConfigError::Invalid("layer widths must be at least 1".into()));
        }
        if self.batch_size == 0 || self.max_epochs == 0 {
            return Err(ConfigError::Invalid("batch_size and max_epochs must be at least 1".into()));
        }
        if !(self.lr > 0.0) || self.clip_norm < 0.0 {
            return Err(ConfigError::Invalid("lr must be positive and clip_norm non-negative".into()));
        }
        Ok(())
    }

    pub fn adam(&self) -> AdamConfig {
        AdamConfig {
            lr: self.lr,
            clip_norm: (self.clip_norm > 0.0).then_some(self.clip_norm),
            ..AdamConfig::default()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_round_trip_through_text() {
        let c = ModelConfig::default();
        assert_eq!(c.repr_dim, 128);
        assert_eq!(ModelConfig::from_kv_str(&c.to_kv_string()).unwrap(), c);
    }

    #[test]
    fn overrides_and_rejections() {
        let c = ModelConfig::from_kv_str("# tiny\nhidden_dim = 8\nlr=0.01\n").unwrap();
        assert_eq!(c.encoder.hidden_dim, 8);
        assert_eq!(c.lr, 0.01);
        assert_eq!(
            ModelConfig::from_kv_str("bogus=1"),
            Err(ConfigError::UnknownKey("bogus".into()))
        );
        assert!(matches!(
            ModelConfig::from_kv_str("lr=fast"),
            Err(ConfigError::BadValue { .. })
        ));
        assert!(matches!(ModelConfig::from_kv_str("lr"), Err(ConfigError::Syntax { line: 1 })));
        assert!(ModelConfig::from_kv_str("dropout=1.0").is_err());
        for k in MODEL_KEYS {
            assert!(ModelConfig::default().set(k, "1").is_ok() || *k == "dropout");
        }
    }
}
