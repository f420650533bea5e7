//! File writers. Floats in CSV use 17 significant digits in scientific
//! notation, which round-trips every `f64`; lines end in LF.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::CliError;

pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

/// A CSV table built in memory with LF record terminators. Cells holding
/// commas (regime labels) are quoted.
pub struct Csv {
    inner: csv::Writer<Vec<u8>>,
}

impl Csv {
    pub fn new(header: &[&str]) -> Self {
        let inner = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(Vec::new());
        let mut c = Self { inner };
        c.row(header.iter().map(|s| s.to_string()));
        c
    }

    pub fn row<I: IntoIterator<Item = String>>(&mut self, cells: I) {
        self.inner
            .write_record(cells.into_iter().collect::<Vec<_>>())
            .expect("in-memory write");
    }

    pub fn into_string(self) -> String {
        let bytes = self.inner.into_inner().expect("in-memory flush");
        String::from_utf8(bytes).expect("cells are UTF-8")
    }
}

/// Collects output files and writes them, in order, from a single thread.
#[derive(Debug)]
pub struct Writer {
    dir: PathBuf,
    written: Vec<PathBuf>,
}

impl Writer {
    pub fn new(dir: &Path) -> Result<Self, CliError> {
        fs::create_dir_all(dir).map_err(|e| CliError::Io(dir.to_path_buf(), e))?;
        Ok(Self {
            dir: dir.to_path_buf(),
            written: Vec::new(),
        })
    }

    pub fn write(&mut self, name: &str, contents: &str) -> Result<(), CliError> {
        let path = self.dir.join(name);
        fs::write(&path, contents).map_err(|e| CliError::Io(path.clone(), e))?;
        log::info!("wrote {}", path.display());
        self.written.push(path);
        Ok(())
    }

    pub fn write_json<T: Serialize>(&mut self, name: &str, value: &T) -> Result<(), CliError> {
        let mut text = serde_json::to_string_pretty(value).expect("output serializes");
        text.push('\n');
        self.write(name, &text)
    }

    pub fn finish(mut self, mut manifest: RunManifest) -> Result<Vec<PathBuf>, CliError> {
        manifest.outputs = self
            .written
            .iter()
            .map(|p| p.file_name().unwrap().to_string_lossy().into_owned())
            .collect();
        manifest.finished = now();
        self.write_json("manifest.json", &manifest)?;
        Ok(self.written)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: String,
    /// SHA-256 of `canonical_config`.
    pub config_hash: String,
    pub canonical_config: String,
    pub tool_version: String,
    pub seeds: Vec<u64>,
    pub started: String,
    pub finished: String,
    /// File names relative to the output directory.
    pub outputs: Vec<String>,
}

impl RunManifest {
    pub fn start(command: &str, canonical_config: String, seeds: Vec<u64>) -> Self {
        Self {
            command: command.to_string(),
            config_hash: config_hash(&canonical_config),
            canonical_config,
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            seeds,
            started: now(),
            finished: String::new(),
            outputs: Vec::new(),
        }
    }
}

pub fn config_hash(canonical: &str) -> String {
    hex::encode(Sha256::digest(canonical.as_bytes()))
}

fn now() -> String {
    chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Millis, true)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn floats_round_trip() {
        for x in [0.1, 1.0 / 3.0, 0.8535533905932737, 1e-300, 0.0, 1.0] {
            let s = fmt_f64(x);
            assert_eq!(s.parse::<f64>().unwrap(), x, "{s}");
        }
        assert_eq!(fmt_f64(0.5), "5.0000000000000000e-1");
    }

    #[test]
    fn csv_layout() {
        let mut c = Csv::new(&["a", "b"]);
        c.row([fmt_f64(1.0), "x, y".to_string()]);
        assert_eq!(c.into_string(), "a,b\n1.0000000000000000e0,\"x, y\"\n");
    }

    #[test]
    fn hash_is_sha256_hex() {
        assert_eq!(
            config_hash(""),
            "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855"
        );
    }
}
