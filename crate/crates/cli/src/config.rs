//! Pipeline configuration: a TOML file of record plus command-line overrides.

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Paths {
    /// Bibliographic export (CSV, or TSV when the extension is .tsv/.txt).
    pub corpus: Option<PathBuf>,
    /// Directory of stop-lexicon category files; the bundled lexicon when unset.
    pub lexicon: Option<PathBuf>,
    /// Embedding JSON-lines file for the ontology step.
    pub embeddings: Option<PathBuf>,
    /// Labeling CSV read by the ontology step and written by the server.
    pub labeling: Option<PathBuf>,
    /// Coding journal; defaults to `<out>/journal.jsonl`.
    pub journal: Option<PathBuf>,
    /// Reference keys to drop from co-citation, one per line.
    pub cocitation_exclusions: Option<PathBuf>,
    /// Published form list for `code import-validated`, one term per line.
    pub validated_list: Option<PathBuf>,
    pub out: PathBuf,
}

impl Default for Paths {
    fn default() -> Self {
        Paths {
            corpus: None,
            lexicon: None,
            embeddings: None,
            labeling: None,
            journal: None,
            cocitation_exclusions: None,
            validated_list: None,
            out: PathBuf::from("out"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Thresholds {
    pub min_cocitations: u64,
    pub coupling_min: u64,
    pub country_min_docs: u64,
    pub top_k: usize,
    /// Co-occurrence edges lighter than this are dropped.
    pub min_cooccurrence: u64,
}

impl Default for Thresholds {
    fn default() -> Self {
        Thresholds {
            min_cocitations: 10,
            coupling_min: 5,
            country_min_docs: 5,
            top_k: 1000,
            min_cooccurrence: 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Seeds {
    pub louvain: u64,
    pub slm: u64,
}

impl Default for Seeds {
    fn default() -> Self {
        Seeds { louvain: 42, slm: 42 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ServeConfig {
    pub bind: String,
    /// Shared token expected in the `x-segforms-token` header; open when unset.
    pub token: Option<String>,
    pub page_size: usize,
}

impl Default for ServeConfig {
    fn default() -> Self {
        ServeConfig {
            bind: "127.0.0.1:8080".into(),
            token: None,
            page_size: 50,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PipelineConfig {
    pub anchor: String,
    pub discipline_universe: usize,
    /// Clusters cut from the ontology dendrogram.
    pub n_clusters: usize,
    /// Window of the moving averages written by `metrics`.
    pub moving_average_window: u32,
    /// Coders whose verdicts are all required for consensus; empty means
    /// every coder who decided on the candidate.
    pub coders: BTreeSet<String>,
    pub paths: Paths,
    pub thresholds: Thresholds,
    pub seeds: Seeds,
    pub serve: ServeConfig,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            anchor: "segregation".into(),
            discipline_universe: segforms::metrics::DEFAULT_DISCIPLINE_UNIVERSE,
            n_clusters: segforms::ontology::DEFAULT_TYPE_COUNT,
            moving_average_window: 5,
            coders: BTreeSet::new(),
            paths: Paths::default(),
            thresholds: Thresholds::default(),
            seeds: Seeds::default(),
            serve: ServeConfig::default(),
        }
    }
}

impl PipelineConfig {
    pub fn from_toml(text: &str) -> CliResult<Self> {
        toml::from_str(text).map_err(|e| CliError::Config {
            key: e.span().map(|s| key_at(text, s.start)).unwrap_or_default(),
            message: e.message().to_owned(),
        })
    }

    pub fn load(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        Self::from_toml(&text)
    }

    /// Checks value ranges; the error names the first offending key.
    pub fn validate(&self) -> CliResult<()> {
        let bad = |key: &str, message: &str| {
            Err(CliError::Config {
                key: key.into(),
                message: message.into(),
            })
        };
        let t = &self.thresholds;
        if self.anchor.trim().is_empty() {
            return bad("anchor", "must be nonempty");
        }
        if self.anchor.split_whitespace().count() != 1 || self.anchor != self.anchor.to_lowercase() {
            return bad("anchor", "must be a single lowercase token");
        }
        for (key, v) in [
            ("thresholds.min_cocitations", t.min_cocitations),
            ("thresholds.coupling_min", t.coupling_min),
            ("thresholds.country_min_docs", t.country_min_docs),
            ("thresholds.min_cooccurrence", t.min_cooccurrence),
            ("thresholds.top_k", t.top_k as u64),
        ] {
            if v == 0 {
                return bad(key, "must be positive");
            }
        }
        if self.discipline_universe < 2 {
            return bad("discipline_universe", "must be at least 2");
        }
        if self.n_clusters == 0 {
            return bad("n_clusters", "must be positive");
        }
        if self.moving_average_window == 0 {
            return bad("moving_average_window", "must be positive");
        }
        if self.serve.page_size == 0 {
            return bad("serve.page_size", "must be positive");
        }
        Ok(())
    }

    pub fn journal_path(&self) -> PathBuf {
        self.paths
            .journal
            .clone()
            .unwrap_or_else(|| self.paths.out.join("journal.jsonl"))
    }
}

/// Dotted key of the TOML line holding byte offset `pos`, qualified by the
/// enclosing `[table]` header.
fn key_at(text: &str, pos: usize) -> String {
    let line_start = text[..pos].rfind('\n').map_or(0, |i| i + 1);
    let line_end = text[pos..].find('\n').map_or(text.len(), |i| pos + i);
    let line = &text[line_start..line_end];
    let key = line.split('=').next().unwrap_or(line).trim().trim_matches(['[', ']']);
    let table = text[..line_start]
        .lines()
        .rev()
        .map(str::trim)
        .find(|l| l.starts_with('[') && l.ends_with(']'))
        .map(|l| l.trim_matches(['[', ']']).trim());
    match table {
        Some(t) if !line.trim_start().starts_with('[') => format!("{t}.{key}"),
        _ => key.to_owned(),
    }
}
