//! Output-directory session: collects data files with checksums, then
//! writes the deterministic `config.json` sidecar and the (timestamped)
//! `run_manifest.json`.

use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::time::{SystemTime, UNIX_EPOCH};

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::CliError;

pub struct OutDir {
    root: PathBuf,
    files: Vec<FileEntry>,
}

#[derive(Debug, Clone, Serialize)]
struct FileEntry {
    name: String,
    sha256: String,
}

#[derive(Serialize)]
struct Sidecar<'a, C: Serialize> {
    command: &'a str,
    version: &'a str,
    config: &'a C,
    files: &'a [FileEntry],
}

#[derive(Serialize)]
struct Manifest {
    timestamp_unix_seconds: u64,
    argv: Vec<String>,
}

impl OutDir {
    pub fn create(root: impl Into<PathBuf>) -> Result<Self, CliError> {
        let root = root.into();
        fs::create_dir_all(&root).map_err(CliError::io_at(&root))?;
        Ok(Self {
            root,
            files: Vec::new(),
        })
    }

    /// Writes one data file via `fill`, recording its checksum.
    pub fn write_file<F>(&mut self, name: &str, fill: F) -> Result<(), CliError>
    where
        F: FnOnce(&mut Vec<u8>) -> std::io::Result<()>,
    {
        let mut bytes = Vec::new();
        fill(&mut bytes).map_err(CliError::io_at(&self.root.join(name)))?;
        self.write_bytes(name, &bytes)
    }

    pub fn write_bytes(&mut self, name: &str, bytes: &[u8]) -> Result<(), CliError> {
        let path = self.root.join(name);
        if let Some(parent) = path.parent() {
            fs::create_dir_all(parent).map_err(CliError::io_at(parent))?;
        }
        let mut f = fs::File::create(&path).map_err(CliError::io_at(&path))?;
        f.write_all(bytes).map_err(CliError::io_at(&path))?;
        let mut hasher = Sha256::new();
        hasher.update(bytes);
        self.files.push(FileEntry {
            name: name.to_string(),
            sha256: hex_digest(&hasher.finalize()),
        });
        Ok(())
    }

    pub fn write_json<T: Serialize>(&mut self, name: &str, value: &T) -> Result<(), CliError> {
        let text = serde_json::to_string_pretty(value).expect("serializable value");
        self.write_bytes(name, text.as_bytes())
    }

    /// Writes the deterministic sidecar and the timestamped manifest.
    pub fn finish<C: Serialize>(mut self, command: &str, config: &C) -> Result<(), CliError> {
        let sidecar = Sidecar {
            command,
            version: env!("CARGO_PKG_VERSION"),
            config,
            files: &self.files,
        };
        let text = serde_json::to_string_pretty(&sidecar).expect("serializable sidecar");
        let path = self.root.join("config.json");
        fs::write(&path, text).map_err(CliError::io_at(&path))?;

        let manifest = Manifest {
            timestamp_unix_seconds: SystemTime::now()
                .duration_since(UNIX_EPOCH)
                .map(|d| d.as_secs())
                .unwrap_or(0),
            argv: std::env::args().collect(),
        };
        let path = self.root.join("run_manifest.json");
        let text = serde_json::to_string_pretty(&manifest).expect("serializable manifest");
        fs::write(&path, text).map_err(CliError::io_at(&path))?;
        self.files.clear();
        Ok(())
    }
}

fn hex_digest(bytes: &[u8]) -> String {
    let mut s = String::with_capacity(bytes.len() * 2);
    for b in bytes {
        s.push_str(&format!("{b:02x}"));
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hex_digest_formats() {
        assert_eq!(hex_digest(&[0x00, 0xff, 0x10]), "00ff10");
    }
}
