//! Reproducibility manifests: one JSON object per line recording how an
//! output was produced.

use std::fs::OpenOptions;
use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use serde::Serialize;
use sha2::{Digest, Sha256};

#[derive(Debug, Serialize)]
pub struct FileDigest {
    pub path: String,
    pub sha256: String,
}

#[derive(Debug, Serialize)]
pub struct Versions {
    pub infusion: &'static str,
    pub cli: &'static str,
}

#[derive(Debug, Serialize)]
pub struct Manifest {
    pub command: String,
    /// Arguments that reproduce the outputs, with the seed made explicit.
    pub argv: Vec<String>,
    pub seed: u64,
    pub versions: Versions,
    pub inputs: Vec<FileDigest>,
    pub outputs: Vec<FileDigest>,
    /// Extra facts specific to the command (true sources, estimated time...).
    pub details: serde_json::Value,
}

impl Manifest {
    pub fn new(command: &str, argv: Vec<String>, seed: u64) -> Self {
        Manifest {
            command: command.to_string(),
            argv,
            seed,
            versions: Versions {
                infusion: infusion_version(),
                cli: env!("CARGO_PKG_VERSION"),
            },
            inputs: Vec::new(),
            outputs: Vec::new(),
            details: serde_json::Value::Null,
        }
    }

    pub fn input(&mut self, path: &Path) -> Result<()> {
        self.inputs.push(digest_file(path)?);
        Ok(())
    }

    pub fn output(&mut self, path: &Path) -> Result<()> {
        self.outputs.push(digest_file(path)?);
        Ok(())
    }

    /// Appends the manifest as one line to `path`, or prints it to stderr.
    pub fn write(&self, path: Option<&Path>) -> Result<()> {
        let line = serde_json::to_string(self)?;
        match path {
            Some(p) => {
                let mut f = OpenOptions::new()
                    .create(true)
                    .append(true)
                    .open(p)
                    .with_context(|| format!("cannot open manifest {}", p.display()))?;
                writeln!(f, "{line}")?;
            }
            None => eprintln!("{line}"),
        }
        Ok(())
    }
}

fn infusion_version() -> &'static str {
    // the library shares the workspace version
    env!("CARGO_PKG_VERSION")
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

fn digest_file(path: &Path) -> Result<FileDigest> {
    let bytes = std::fs::read(path).with_context(|| format!("cannot read {}", path.display()))?;
    Ok(FileDigest {
        path: path.display().to_string(),
        sha256: sha256_hex(&bytes),
    })
}

/// Manifest location for a file output: `<out>.manifest.jsonl`.
pub fn manifest_path_for(out: &Path) -> PathBuf {
    let mut s = out.as_os_str().to_owned();
    s.push(".manifest.jsonl");
    PathBuf::from(s)
}
