//! Output plumbing: config-hashed CSV files, JSON results carrying the
//! full resolved config, and the per-run manifest.
//!
//! Outputs are bit-deterministic for a given config and seed: no
//! timestamps, fixed float formatting, ordered reductions.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use serde_json::json;
use sha2::{Digest, Sha256};

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

pub struct OutputWriter {
    dir: PathBuf,
    experiment: &'static str,
    config_hash: String,
    config: serde_json::Value,
    files: Vec<String>,
}

impl OutputWriter {
    pub fn new(dir: &Path, experiment: &'static str, config: serde_json::Value) -> Result<Self> {
        fs::create_dir_all(dir)
            .with_context(|| format!("creating output directory {}", dir.display()))?;
        let canonical = serde_json::to_string(&config).expect("config serializes");
        let config_hash = hex_digest(&canonical);
        Ok(Self {
            dir: dir.to_path_buf(),
            experiment,
            config_hash,
            config,
            files: Vec::new(),
        })
    }

    /// CSV with the one-line `#` header carrying tool version and config
    /// hash, then the body produced by the caller.
    pub fn write_csv(&mut self, name: &str, body: &str) -> Result<PathBuf> {
        let header = format!(
            "# floq v{TOOL_VERSION} experiment={} config_sha256={}\n",
            self.experiment, self.config_hash
        );
        let path = self.dir.join(name);
        fs::write(&path, header + body).with_context(|| format!("writing {}", path.display()))?;
        self.files.push(name.to_string());
        Ok(path)
    }

    /// JSON result embedding schema version, tool version, and the full
    /// resolved config.
    pub fn write_json(&mut self, name: &str, results: serde_json::Value) -> Result<PathBuf> {
        let doc = json!({
            "schema_version": crate::config::SCHEMA_VERSION,
            "tool_version": TOOL_VERSION,
            "experiment": self.experiment,
            "config_sha256": self.config_hash,
            "config": self.config,
            "results": results,
        });
        let path = self.dir.join(name);
        fs::write(&path, serde_json::to_string_pretty(&doc).expect("json"))
            .with_context(|| format!("writing {}", path.display()))?;
        self.files.push(name.to_string());
        Ok(path)
    }

    /// Write the manifest listing every produced file; call last.
    pub fn finish(mut self) -> Result<PathBuf> {
        let mut files = self.files.clone();
        files.sort();
        let doc = json!({
            "schema_version": crate::config::SCHEMA_VERSION,
            "tool_version": TOOL_VERSION,
            "experiment": self.experiment,
            "config_sha256": self.config_hash,
            "config": self.config,
            "files": files,
        });
        let path = self.dir.join("manifest.json");
        fs::write(&path, serde_json::to_string_pretty(&doc).expect("json"))
            .with_context(|| format!("writing {}", path.display()))?;
        self.files.push("manifest.json".into());
        Ok(path)
    }
}

pub fn hex_digest(text: &str) -> String {
    let mut hasher = Sha256::new();
    hasher.update(text.as_bytes());
    let out = hasher.finalize();
    out.iter().map(|b| format!("{b:02x}")).collect()
}
