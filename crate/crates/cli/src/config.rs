//! `key=value` run configuration shared by every subcommand.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use actseq::bench::bench_model_config;
use actseq::models::{kv_lines, ModelConfig, MODEL_KEYS};
use actseq::symbols::ImportConfig;
use actseq::synth::DocumentSpec;

use crate::error::CliError;

/// Non-model keys: name, default, description.
const RUN_KEYS: &[(&str, &str, &str)] = &[
    ("vocab_words", "50", "editing-argument words kept in the symbol vocabulary"),
    ("k", "6", "editors selected by balance"),
    ("train", "200", "training sessions per editor"),
    ("dev", "40", "dev sessions per editor"),
    ("test", "40", "test sessions per editor"),
    ("profiles", "default", "synth editors: default (six benchmark profiles) or population"),
    ("population", "20", "editors sampled when profiles=population"),
    ("rounds", "280", "documents generated by synth; every editor edits each once"),
    ("sentences", "5", "sentences per synthetic document"),
    ("words_per_sentence", "8", "mean tokens per synthetic sentence"),
    ("error_fraction", "0.12", "MT error sites per word in synthetic documents"),
    ("ablation", "full", "full, only:<cats> or drop:<cats> over editing, mouse, wait, first_wait"),
    ("split", "test", "split evaluated by eval-id and eval-time"),
    ("min_sessions", "10", "editors with fewer sessions are left out of editor tables"),
    ("store_capacity", "10", "recent sessions averaged into a dynamic editor vector"),
    ("use_editor", "true", "train-time feeds dynamic editor vectors (false: zeros)"),
    ("color_by", "none", "project coloring: none, first_wait, jump_backs or mouse"),
    ("column_separator", "\\t", "import-dataset column separator"),
    ("editor_column", "0", "import-dataset editor column"),
    ("doc_column", "none", "import-dataset document column (none: row number)"),
    ("sequence_column", "1", "import-dataset action-sequence column"),
    ("token_separator", "space", "import-dataset separator between action tokens"),
    ("arg_separator", ":", "import-dataset separator between type and argument"),
    ("skip_header", "false", "import-dataset skips the first row"),
    ("lang_pair", "unk", "language pair recorded by import-dataset"),
];

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    values: BTreeMap<String, String>,
}

fn model_defaults() -> Vec<(String, String)> {
    bench_model_config()
        .to_kv_string()
        .lines()
        .filter_map(|l| l.split_once('='))
        .map(|(k, v)| (k.to_owned(), v.to_owned()))
        .collect()
}

impl Default for RunConfig {
    fn default() -> Self {
        let mut values: BTreeMap<String, String> = model_defaults().into_iter().collect();
        for (k, v, _) in RUN_KEYS {
            values.insert((*k).to_owned(), (*v).to_owned());
        }
        RunConfig { values }
    }
}

impl RunConfig {
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), CliError> {
        match self.values.get_mut(key) {
            Some(v) => {
                *v = value.to_owned();
                Ok(())
            }
            None => Err(CliError::Usage(format!("unknown config key {key}"))),
        }
    }

    /// Applies a `key=value` file, then `overrides` in order.
    pub fn load(file: Option<&str>, overrides: &[String]) -> Result<Self, CliError> {
        let mut c = RunConfig::default();
        if let Some(text) = file {
            for kv in kv_lines(text) {
                let (k, v) = kv.map_err(|e| CliError::Usage(format!("config file: {e}")))?;
                c.set(k, v)?;
            }
        }
        for o in overrides {
            let (k, v) = o
                .split_once('=')
                .ok_or_else(|| CliError::Usage(format!("expected key=value, got {o}")))?;
            c.set(k.trim(), v.trim())?;
        }
        c.model()?;
        Ok(c)
    }

    pub fn get(&self, key: &str) -> &str {
        self.values.get(key).map(String::as_str).expect("known key")
    }

    pub fn parse<T: std::str::FromStr>(&self, key: &str) -> Result<T, CliError> {
        let v = self.get(key);
        v.parse()
            .map_err(|_| CliError::Usage(format!("bad value for {key}: {v}")))
    }

    pub fn flag(&self, key: &str) -> Result<bool, CliError> {
        match self.get(key) {
            "true" | "1" | "yes" => Ok(true),
            "false" | "0" | "no" => Ok(false),
            v => Err(CliError::Usage(format!("bad value for {key}: {v}"))),
        }
    }

    pub fn model(&self) -> Result<ModelConfig, CliError> {
        let mut m = bench_model_config();
        for k in MODEL_KEYS {
            m.set(k, self.get(k)).map_err(|e| CliError::Usage(e.to_string()))?;
        }
        m.validate().map_err(|e| CliError::Usage(e.to_string()))?;
        Ok(m)
    }

    pub fn document(&self) -> Result<DocumentSpec, CliError> {
        Ok(DocumentSpec {
            n_sentences: self.parse("sentences")?,
            words_per_sentence: self.parse("words_per_sentence")?,
            error_fraction: self.parse("error_fraction")?,
        })
    }

    pub fn import(&self) -> Result<ImportConfig, CliError> {
        let ch = |key: &str| -> Result<char, CliError> {
            let v = self.get(key);
            let c = match v {
                "\\t" | "tab" => Some('\t'),
                "space" => Some(' '),
                "comma" => Some(','),
                _ => {
                    let mut it = v.chars();
                    it.next().filter(|_| it.next().is_none())
                }
            };
            c.ok_or_else(|| CliError::Usage(format!("{key} must be one character, got {v}")))
        };
        Ok(ImportConfig {
            column_separator: ch("column_separator")?,
            editor_column: self.parse("editor_column")?,
            doc_column: match self.get("doc_column") {
                "none" => None,
                _ => Some(self.parse("doc_column")?),
            },
            sequence_column: self.parse("sequence_column")?,
            token_separator: ch("token_separator")?,
            arg_separator: ch("arg_separator")?,
            skip_header: self.flag("skip_header")?,
            lang_pair: self.get("lang_pair").to_owned(),
        })
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::Value::Object(
            self.values
                .iter()
                .map(|(k, v)| (k.clone(), serde_json::Value::String(v.clone())))
                .collect(),
        )
    }
}

/// Help text listing every key with its default.
pub fn keys_help() -> String {
    let mut out = String::from("Configuration keys (--config FILE with key=value lines, or --set key=value):\n");
    for (k, v) in model_defaults() {
        let _ = writeln!(out, "  {k:<20} {v:<10} model hyperparameter");
    }
    for (k, v, doc) in RUN_KEYS {
        let _ = writeln!(out, "  {k:<20} {v:<10} {doc}");
    }
    out
}
