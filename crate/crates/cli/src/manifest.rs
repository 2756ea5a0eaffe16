use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::Value;
use sha2::{Digest, Sha256};

use crate::error::{CliError, CliResult};

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

#[derive(Debug, Serialize)]
struct Manifest<'a> {
    subcommand: &'a str,
    versions: BTreeMap<&'static str, &'static str>,
    seed: u64,
    config: &'a Value,
    config_hash: String,
    inputs: &'a BTreeMap<String, String>,
    outputs: &'a BTreeMap<String, String>,
}

/// Output directory of one run. Everything written through it is atomic and
/// checksummed into `manifest.<subcommand>.json` by [`RunDir::finish`].
#[derive(Debug)]
pub struct RunDir {
    subcommand: &'static str,
    dir: PathBuf,
    seed: u64,
    config: Value,
    inputs: BTreeMap<String, String>,
    outputs: BTreeMap<String, String>,
}

impl RunDir {
    pub fn new(subcommand: &'static str, dir: &Path, seed: u64, config: Value) -> CliResult<Self> {
        std::fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
        Ok(Self {
            subcommand,
            dir: dir.to_path_buf(),
            seed,
            config,
            inputs: BTreeMap::new(),
            outputs: BTreeMap::new(),
        })
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn path(&self, name: &str) -> PathBuf {
        self.dir.join(name)
    }

    /// Records the checksum of an input file, or of every file in an input
    /// directory. Keys are paths as given on the command line.
    pub fn input(&mut self, path: &Path) -> CliResult<()> {
        if path.is_dir() {
            let mut entries: Vec<PathBuf> = std::fs::read_dir(path)
                .map_err(|e| CliError::io(path, e))?
                .filter_map(|e| e.ok().map(|e| e.path()))
                .filter(|p| p.is_file())
                .collect();
            entries.sort();
            for p in entries {
                self.input(&p)?;
            }
            return Ok(());
        }
        let bytes = std::fs::read(path).map_err(|e| CliError::io(path, e))?;
        self.inputs.insert(path.display().to_string(), sha256_hex(&bytes));
        Ok(())
    }

    pub fn write(&mut self, name: &str, bytes: &[u8]) -> CliResult<()> {
        scsl_core::io::write_atomic(&self.dir.join(name), bytes)?;
        self.outputs.insert(name.to_string(), sha256_hex(bytes));
        Ok(())
    }

    pub fn write_json<T: Serialize + ?Sized>(&mut self, name: &str, value: &T) -> CliResult<()> {
        let mut bytes = serde_json::to_vec_pretty(value).map_err(|e| CliError::usage(e.to_string()))?;
        bytes.push(b'\n');
        self.write(name, &bytes)
    }

    pub fn write_jsonl<T: Serialize>(&mut self, name: &str, records: &[T]) -> CliResult<()> {
        self.write(name, &scsl_core::io::to_jsonl(records)?)
    }

    /// Registers a file that some library call already wrote into the directory.
    pub fn adopt(&mut self, name: &str) -> CliResult<()> {
        let path = self.dir.join(name);
        let bytes = std::fs::read(&path).map_err(|e| CliError::io(&path, e))?;
        self.outputs.insert(name.to_string(), sha256_hex(&bytes));
        Ok(())
    }

    pub fn finish(self) -> CliResult<()> {
        let canonical = serde_json::json!({
            "subcommand": self.subcommand,
            "seed": self.seed,
            "config": &self.config,
        });
        let manifest = Manifest {
            subcommand: self.subcommand,
            versions: BTreeMap::from([
                ("scsl", env!("CARGO_PKG_VERSION")),
                ("model_format", scsl_core::scorer::MODEL_MAGIC),
            ]),
            seed: self.seed,
            config: &self.config,
            config_hash: sha256_hex(canonical.to_string().as_bytes()),
            inputs: &self.inputs,
            outputs: &self.outputs,
        };
        let mut bytes = serde_json::to_vec_pretty(&manifest).map_err(|e| CliError::usage(e.to_string()))?;
        bytes.push(b'\n');
        let name = format!("manifest.{}.json", self.subcommand);
        scsl_core::io::write_atomic(&self.dir.join(name), &bytes)?;
        Ok(())
    }
}
