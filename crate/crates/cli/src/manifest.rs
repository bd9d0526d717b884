use crate::error::{CliError, CliResult};
use serde::Serialize;
use serde_json::Value;
use sha2::{Digest, Sha256};
use std::fs;
use std::path::{Path, PathBuf};

/// The run manifest written next to every set of outputs.
#[derive(Debug, Serialize)]
pub struct Manifest {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: String,
    pub config: Value,
    pub derived: Value,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub wall_sha256: Option<String>,
    /// Output file name to a description of its columns, units and conventions.
    pub outputs: Value,
}

impl Manifest {
    pub fn new(command: impl Into<String>, config: Value, derived: Value, outputs: Value) -> Self {
        Manifest {
            tool: "ergo",
            version: env!("CARGO_PKG_VERSION"),
            command: command.into(),
            config,
            derived,
            wall_sha256: None,
            outputs,
        }
    }
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

pub fn out_dir(dir: &Path) -> CliResult<PathBuf> {
    fs::create_dir_all(dir).map_err(CliError::io(dir))?;
    Ok(dir.to_path_buf())
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> CliResult<()> {
    let mut text = serde_json::to_string_pretty(value).map_err(|source| CliError::Json { path: path.into(), source })?;
    text.push('\n');
    fs::write(path, text).map_err(CliError::io(path))
}

pub fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> CliResult<T> {
    let text = fs::read_to_string(path).map_err(CliError::io(path))?;
    serde_json::from_str(&text).map_err(|source| CliError::Json { path: path.into(), source })
}
