//! `manifest.txt`: what produced a run directory and what it contains.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use sha2::{Digest, Sha256};

use crate::{Error, Result};

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().fold(String::with_capacity(64), |mut s, b| {
        write!(s, "{b:02x}").unwrap();
        s
    })
}

pub fn unix_seconds(t: SystemTime) -> f64 {
    t.duration_since(UNIX_EPOCH).map(|d| d.as_secs_f64()).unwrap_or(0.0)
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunManifest {
    pub command: String,
    pub config_hash: String,
    pub version: String,
    pub master_seed: u64,
    pub started: SystemTime,
    pub finished: SystemTime,
    /// Emitted files relative to the output directory.
    pub files: Vec<PathBuf>,
}

impl RunManifest {
    pub fn begin(command: &str, config_hash: &str, master_seed: u64) -> Self {
        let now = SystemTime::now();
        RunManifest {
            command: command.to_string(),
            config_hash: config_hash.to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            master_seed,
            started: now,
            finished: now,
            files: Vec::new(),
        }
    }

    /// Renders the manifest, hashing each listed file under `out_dir`.
    pub fn render(&self, out_dir: &Path) -> Result<String> {
        let mut s = String::new();
        writeln!(s, "command = {}", self.command).unwrap();
        writeln!(s, "version = {}", self.version).unwrap();
        writeln!(s, "config_hash = {}", self.config_hash).unwrap();
        writeln!(s, "master_seed = {}", self.master_seed).unwrap();
        writeln!(s, "start_unix_s = {:.3}", unix_seconds(self.started)).unwrap();
        writeln!(s, "end_unix_s = {:.3}", unix_seconds(self.finished)).unwrap();
        for f in &self.files {
            let path = out_dir.join(f);
            let bytes = std::fs::read(&path).map_err(|e| Error::io(&path, e))?;
            writeln!(s, "file = {} sha256={}", f.display(), sha256_hex(&bytes)).unwrap();
        }
        Ok(s)
    }

    /// Stamps the finish time and writes `manifest.txt` into `out_dir`.
    pub fn finish(mut self, out_dir: &Path) -> Result<PathBuf> {
        self.finished = SystemTime::now();
        let path = out_dir.join("manifest.txt");
        std::fs::write(&path, self.render(out_dir)?).map_err(|e| Error::io(&path, e))?;
        Ok(path)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn known_digest() {
        assert_eq!(
            sha256_hex(b"abc"),
            "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad"
        );
    }

    #[test]
    fn lists_file_hashes() {
        let dir = tempfile::tempdir().unwrap();
        std::fs::write(dir.path().join("a.csv"), "x\n1\n").unwrap();
        let mut m = RunManifest::begin("twa", "h", 7);
        m.files.push("a.csv".into());
        let path = m.finish(dir.path()).unwrap();
        let text = std::fs::read_to_string(path).unwrap();
        assert!(text.contains("master_seed = 7"));
        assert!(text.contains(&format!("file = a.csv sha256={}", sha256_hex(b"x\n1\n"))));
    }
}
