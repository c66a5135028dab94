//! Output layout, input hashing and run manifests.

use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::config::PipelineConfig;
use crate::error::{CliError, CliResult};

pub const CORPUS_RECORDS: &str = "corpus/records.jsonl";
pub const CORPUS_MANIFEST: &str = "corpus/manifest.json";
pub const CANDIDATES_JSON: &str = "candidates.json";
pub const CANDIDATES_CSV: &str = "candidates.csv";
pub const VALIDATED_JSON: &str = "validated.json";
pub const CLUSTERS_CSV: &str = "ontology/clusters.csv";

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FileDigest {
    pub path: String,
    pub sha256: String,
}

/// Machine-readable record of one subcommand run. Contains no clock
/// values, so identical runs produce identical manifests.
#[derive(Debug, Clone, Serialize)]
pub struct RunManifest {
    pub command: String,
    pub version: &'static str,
    pub parallel: bool,
    pub config: PipelineConfig,
    pub inputs: Vec<FileDigest>,
    pub outputs: Vec<FileDigest>,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// One subcommand invocation: resolves paths under the output directory
/// and tracks what was read and written.
pub struct Run<'a> {
    pub config: &'a PipelineConfig,
    command: String,
    inputs: Vec<FileDigest>,
    outputs: Vec<FileDigest>,
}

impl<'a> Run<'a> {
    pub fn new(config: &'a PipelineConfig, command: impl Into<String>) -> Self {
        Run {
            config,
            command: command.into(),
            inputs: Vec::new(),
            outputs: Vec::new(),
        }
    }

    pub fn out(&self, rel: &str) -> PathBuf {
        self.config.paths.out.join(rel)
    }

    /// Path of an artifact produced by an earlier subcommand.
    pub fn require(&self, rel: &str, step: &'static str) -> CliResult<PathBuf> {
        let path = self.out(rel);
        if path.is_file() {
            Ok(path)
        } else {
            Err(CliError::MissingArtifact { path, step })
        }
    }

    /// Reads and hashes an input file.
    pub fn read(&mut self, path: &Path) -> CliResult<Vec<u8>> {
        let bytes = fs::read(path).map_err(|e| CliError::io(path, e))?;
        self.note_input(path, &bytes);
        Ok(bytes)
    }

    pub fn note_input(&mut self, path: &Path, bytes: &[u8]) {
        let path = path.display().to_string();
        if !self.inputs.iter().any(|d| d.path == path) {
            self.inputs.push(FileDigest {
                path,
                sha256: sha256_hex(bytes),
            });
        }
    }

    /// Hashes every regular file directly inside `dir`, in name order.
    pub fn note_input_dir(&mut self, dir: &Path) -> CliResult<()> {
        let mut files: Vec<PathBuf> = fs::read_dir(dir)
            .map_err(|e| CliError::io(dir, e))?
            .filter_map(|e| e.ok().map(|e| e.path()))
            .filter(|p| p.is_file())
            .collect();
        files.sort();
        for f in files {
            self.read(&f)?;
        }
        Ok(())
    }

    /// Writes an artifact under the output directory.
    pub fn write(&mut self, rel: &str, bytes: &[u8]) -> CliResult<PathBuf> {
        let path = self.out(rel);
        write_file(&path, bytes)?;
        self.note_output(&path, bytes);
        Ok(path)
    }

    pub fn write_json<T: Serialize>(&mut self, rel: &str, value: &T) -> CliResult<PathBuf> {
        let text = serde_json::to_string_pretty(value)? + "\n";
        self.write(rel, text.as_bytes())
    }

    /// Records a file written outside `write` (for example by a library call).
    pub fn note_output(&mut self, path: &Path, bytes: &[u8]) {
        let path = path.display().to_string();
        self.outputs.retain(|d| d.path != path);
        self.outputs.push(FileDigest {
            path,
            sha256: sha256_hex(bytes),
        });
    }

    pub fn note_output_file(&mut self, path: &Path) -> CliResult<()> {
        let bytes = fs::read(path).map_err(|e| CliError::io(path, e))?;
        self.note_output(path, &bytes);
        Ok(())
    }

    /// Writes `runs/<command>.json` and returns the manifest.
    pub fn finish(self) -> CliResult<RunManifest> {
        let manifest = RunManifest {
            command: self.command.clone(),
            version: env!("CARGO_PKG_VERSION"),
            parallel: segforms::par::is_parallel(),
            config: self.config.clone(),
            inputs: self.inputs,
            outputs: self.outputs,
        };
        let name = self.command.replace(' ', "-");
        let path = self.config.paths.out.join("runs").join(format!("{name}.json"));
        write_file(&path, (serde_json::to_string_pretty(&manifest)? + "\n").as_bytes())?;
        Ok(manifest)
    }
}

/// Creates parent directories, then writes through a temporary file so a
/// crash never leaves a half-written artifact.
pub fn write_file(path: &Path, bytes: &[u8]) -> CliResult<()> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    }
    let tmp = path.with_extension("tmp");
    fs::write(&tmp, bytes).map_err(|e| CliError::io(&tmp, e))?;
    fs::rename(&tmp, path).map_err(|e| CliError::io(path, e))
}
