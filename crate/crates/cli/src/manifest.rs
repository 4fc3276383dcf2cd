//! Run manifests: everything needed to re-run a command and check that its
//! outputs come out byte-identical.

use std::path::{Path, PathBuf};

use diwt::quad::QuadSpec;
use serde::{Deserialize, Serialize};

use crate::commands::Command;
use crate::config::JobConfig;
use crate::failure::Failure;

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputDigest {
    pub path: PathBuf,
    pub sha256: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunManifest {
    pub command: Command,
    /// The configuration after command-line overrides.
    pub config: JobConfig,
    pub tool_version: String,
    pub quad: QuadSpec,
    pub wall_time_seconds: f64,
    pub exit_code: i32,
    pub outputs: Vec<OutputDigest>,
}

/// `<output>.manifest.json`.
pub fn manifest_path(output: &Path) -> PathBuf {
    let mut name = output.as_os_str().to_owned();
    name.push(".manifest.json");
    PathBuf::from(name)
}

impl RunManifest {
    pub fn load(path: &Path) -> Result<Self, Failure> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Failure::Usage(format!("cannot read manifest {}: {e}", path.display())))?;
        let manifest: RunManifest = serde_json::from_str(&text)
            .map_err(|e| Failure::Persistence(format!("invalid manifest {}: {e}", path.display())))?;
        if manifest.tool_version != TOOL_VERSION {
            return Err(Failure::Persistence(format!(
                "manifest written by version {}, this is {TOOL_VERSION}",
                manifest.tool_version
            )));
        }
        Ok(manifest)
    }
}
