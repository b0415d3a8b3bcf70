use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

pub const MANIFEST_FILE: &str = "manifest.json";

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

pub fn file_sha256(path: &Path) -> Result<String> {
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    Ok(sha256_hex(&bytes))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct InputDigest {
    pub role: String,
    /// File name only, so the manifest does not depend on where inputs live.
    pub file: String,
    pub sha256: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct OutputEntry {
    /// Path relative to the output directory, `/`-separated.
    pub path: String,
    pub sha256: String,
    pub bytes: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Seeds {
    pub community: u64,
    pub null_model: u64,
}

/// Record of one run. Holds no timestamps or absolute paths, so identical
/// inputs give an identical manifest.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RunManifest {
    pub tool: String,
    pub version: String,
    pub config_sha256: String,
    pub inputs: Vec<InputDigest>,
    pub seeds: Seeds,
    pub modules: BTreeMap<String, String>,
    /// Stages that finished, in order.
    pub stages: Vec<String>,
    pub complete: bool,
    pub error: Option<String>,
    pub outputs: Vec<OutputEntry>,
}

pub const MODULES: [&str; 9] = [
    "corpus",
    "graph",
    "metrics",
    "community",
    "null_model",
    "decompose",
    "diff",
    "stats",
    "pipeline",
];

impl RunManifest {
    pub fn new(config_sha256: String, seeds: Seeds) -> Self {
        let version = env!("CARGO_PKG_VERSION").to_string();
        RunManifest {
            tool: "idnet".into(),
            version: version.clone(),
            config_sha256,
            inputs: Vec::new(),
            seeds,
            modules: MODULES.iter().map(|m| (m.to_string(), version.clone())).collect(),
            stages: Vec::new(),
            complete: false,
            error: None,
            outputs: Vec::new(),
        }
    }
}

/// Writes artifacts under one root and remembers their digests.
#[derive(Debug)]
pub struct ArtifactWriter {
    root: PathBuf,
    entries: BTreeMap<String, OutputEntry>,
}

impl ArtifactWriter {
    pub fn create(root: &Path) -> Result<Self> {
        fs::create_dir_all(root).map_err(|e| Error::io(root, e))?;
        Ok(ArtifactWriter {
            root: root.to_path_buf(),
            entries: BTreeMap::new(),
        })
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    pub fn write(&mut self, rel: &str, body: impl AsRef<[u8]>) -> Result<()> {
        let body = body.as_ref();
        let path = self.root.join(rel);
        if let Some(parent) = path.parent() {
            fs::create_dir_all(parent).map_err(|e| Error::io(parent, e))?;
        }
        fs::write(&path, body).map_err(|e| Error::io(&path, e))?;
        self.entries.insert(
            rel.to_string(),
            OutputEntry {
                path: rel.to_string(),
                sha256: sha256_hex(body),
                bytes: body.len() as u64,
            },
        );
        Ok(())
    }

    pub fn write_json<T: Serialize>(&mut self, rel: &str, value: &T) -> Result<()> {
        let mut s = serde_json::to_string_pretty(value)?;
        s.push('\n');
        self.write(rel, s)
    }

    pub fn entries(&self) -> Vec<OutputEntry> {
        self.entries.values().cloned().collect()
    }

    /// Write the manifest itself (not listed among its own outputs).
    pub fn finish(&self, manifest: &RunManifest) -> Result<()> {
        let mut s = serde_json::to_string_pretty(manifest)?;
        s.push('\n');
        let path = self.root.join(MANIFEST_FILE);
        fs::write(&path, s).map_err(|e| Error::io(&path, e))
    }
}
