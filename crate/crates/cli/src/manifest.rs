use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use sha2::{Digest, Sha256};

use crate::config::RunConfig;
use crate::error::CliError;

fn hex(bytes: &[u8]) -> String {
    bytes.iter().fold(String::with_capacity(64), |mut s, b| {
        let _ = write!(s, "{b:02x}");
        s
    })
}

/// SHA-256 of a file, or of the sorted `name digest` lines of a directory.
pub fn digest(path: &Path) -> Result<String, CliError> {
    if path.is_dir() {
        let mut entries: Vec<PathBuf> = std::fs::read_dir(path)
            .map_err(|e| CliError::data(path.display(), e))?
            .filter_map(|e| e.ok().map(|e| e.path()))
            .collect();
        entries.sort();
        let mut h = Sha256::new();
        for p in entries {
            let name = p.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
            h.update(format!("{name} {}\n", digest(&p)?));
        }
        Ok(hex(&h.finalize()))
    } else {
        let bytes = std::fs::read(path).map_err(|e| CliError::data(path.display(), e))?;
        Ok(hex(&Sha256::digest(&bytes)))
    }
}

pub struct Run<'a> {
    pub command: &'a str,
    pub config: &'a RunConfig,
    pub seed: u64,
    pub threads: usize,
    pub inputs: Vec<PathBuf>,
    pub outputs: Vec<PathBuf>,
}

impl Run<'_> {
    pub fn to_json(&self) -> Result<serde_json::Value, CliError> {
        let files = |ps: &[PathBuf]| -> Result<Vec<serde_json::Value>, CliError> {
            ps.iter()
                .map(|p| Ok(serde_json::json!({"path": p.display().to_string(), "sha256": digest(p)?})))
                .collect()
        };
        Ok(serde_json::json!({
            "command": self.command,
            "seed": self.seed,
            "threads": self.threads,
            "config": self.config.to_json(),
            "versions": {
                "actseq": env!("CARGO_PKG_VERSION"),
            },
            "inputs": files(&self.inputs)?,
            "outputs": files(&self.outputs)?,
        }))
    }

    pub fn write(&self, path: &Path) -> Result<(), CliError> {
        let mut text = serde_json::to_string_pretty(&self.to_json()?).expect("json value");
        text.push('\n');
        std::fs::write(path, text).map_err(|e| CliError::data(path.display(), e))
    }
}

/// `<primary output>.manifest.json`
pub fn default_path(primary: &Path) -> PathBuf {
    let mut s = primary.as_os_str().to_owned();
    s.push(".manifest.json");
    PathBuf::from(s)
}
