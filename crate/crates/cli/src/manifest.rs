use std::collections::BTreeMap;
use std::fs;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::CliError;

pub const TOOL: &str = "gpembed";

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct InputDigest {
    pub path: String,
    pub sha256: String,
}

/// Everything needed to re-run a command: its argument list (minus output
/// paths), the digests of the files it read, the seed and an echo of the
/// numeric parameters.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunManifest {
    pub tool: String,
    pub version: String,
    pub command: String,
    pub args: Vec<String>,
    pub inputs: BTreeMap<String, InputDigest>,
    pub seed: Option<u64>,
    pub params: BTreeMap<String, String>,
    /// Names of the invariants this output certifies.
    pub certifies: Vec<String>,
}

impl RunManifest {
    pub fn new(command: &str, args: &[String]) -> Self {
        RunManifest {
            tool: TOOL.to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            command: command.to_string(),
            args: replay_args(args),
            inputs: BTreeMap::new(),
            seed: None,
            params: BTreeMap::new(),
            certifies: Vec::new(),
        }
    }

    pub fn input(&mut self, name: &str, path: &str, bytes: &[u8]) {
        self.inputs.insert(name.to_string(), InputDigest { path: path.to_string(), sha256: sha256_hex(bytes) });
    }

    pub fn param(&mut self, name: &str, value: impl ToString) {
        self.params.insert(name.to_string(), value.to_string());
    }

    pub fn certifies(&mut self, names: &[&str]) {
        self.certifies = names.iter().map(|s| s.to_string()).collect();
    }

    /// Fails if any recorded input changed since the manifest was written.
    pub fn verify_inputs(&self) -> Result<(), CliError> {
        for (name, d) in &self.inputs {
            let bytes = fs::read(&d.path).map_err(|e| CliError::io(&d.path, e))?;
            let found = sha256_hex(&bytes);
            if found != d.sha256 {
                return Err(CliError::Invalid(format!(
                    "input {name} ({}) has sha256 {found}, manifest records {}",
                    d.path, d.sha256
                )));
            }
        }
        Ok(())
    }

    /// Accepts a bare manifest or any command output that embeds one.
    pub fn from_json_str(text: &str) -> Result<Self, CliError> {
        let mut value: serde_json::Value =
            serde_json::from_str(text).map_err(|e| CliError::Invalid(format!("manifest JSON: {e}")))?;
        if let Some(inner) = value.get_mut("manifest") {
            value = inner.take();
        }
        serde_json::from_value(value).map_err(|e| CliError::Invalid(format!("manifest JSON: {e}")))
    }
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

/// Drops `--out` so a replay can write elsewhere without changing the manifest.
fn replay_args(args: &[String]) -> Vec<String> {
    let mut out = Vec::with_capacity(args.len());
    let mut skip = false;
    for a in args {
        if skip {
            skip = false;
        } else if a == "--out" {
            skip = true;
        } else if !a.starts_with("--out=") {
            out.push(a.clone());
        }
    }
    out
}
