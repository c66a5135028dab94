//! Command-line arguments.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use segforms::codebook::{Resolution, Verdict};

use crate::config::PipelineConfig;

#[derive(Debug, Parser)]
#[command(name = "segforms", version, about = "Mine, validate and analyse 'X segregation' term forms")]
pub struct Cli {
    /// TOML configuration file; flags override its values.
    #[arg(short, long, global = true)]
    pub config: Option<PathBuf>,

    #[command(flatten)]
    pub overrides: Overrides,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Default, Args)]
pub struct Overrides {
    /// Output directory (paths.out).
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Bibliographic export to ingest (paths.corpus).
    #[arg(long, global = true)]
    pub corpus: Option<PathBuf>,
    /// Stop-lexicon directory (paths.lexicon).
    #[arg(long, global = true)]
    pub lexicon: Option<PathBuf>,
    /// Embedding file (paths.embeddings).
    #[arg(long, global = true)]
    pub embeddings: Option<PathBuf>,
    /// Labeling CSV (paths.labeling).
    #[arg(long, global = true)]
    pub labeling: Option<PathBuf>,
    /// Coding journal (paths.journal).
    #[arg(long, global = true)]
    pub journal: Option<PathBuf>,
    /// Published form list for import-validated (paths.validated_list).
    #[arg(long, global = true)]
    pub validated_list: Option<PathBuf>,
    /// Final token of every candidate.
    #[arg(long, global = true)]
    pub anchor: Option<String>,
    /// Seed for both community algorithms.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Minimum co-citations per reference pair
    #[arg(long, global = true)]
    pub min_cocitations: Option<u64>,
    /// Minimum total citations of a journal for coupling
    #[arg(long, global = true)]
    pub coupling_min: Option<u64>,
    /// Minimum documents per country
    #[arg(long, global = true)]
    pub country_min_docs: Option<u64>,
    /// Nodes kept per scholarly network
    #[arg(long, global = true)]
    pub top_k: Option<usize>,
    /// Number of ontology clusters
    #[arg(long, global = true)]
    pub n_clusters: Option<usize>,
    /// Address for `serve` (serve.bind).
    #[arg(long, global = true)]
    pub bind: Option<String>,
}

impl Overrides {
    pub fn apply(&self, c: &mut PipelineConfig) {
        fn set<T: Clone>(slot: &mut T, v: &Option<T>) {
            if let Some(v) = v {
                *slot = v.clone();
            }
        }
        fn set_opt<T: Clone>(slot: &mut Option<T>, v: &Option<T>) {
            if v.is_some() {
                *slot = v.clone();
            }
        }
        set(&mut c.paths.out, &self.out);
        set_opt(&mut c.paths.corpus, &self.corpus);
        set_opt(&mut c.paths.lexicon, &self.lexicon);
        set_opt(&mut c.paths.embeddings, &self.embeddings);
        set_opt(&mut c.paths.labeling, &self.labeling);
        set_opt(&mut c.paths.journal, &self.journal);
        set_opt(&mut c.paths.validated_list, &self.validated_list);
        set(&mut c.anchor, &self.anchor);
        set(&mut c.seeds.louvain, &self.seed);
        set(&mut c.seeds.slm, &self.seed);
        set(&mut c.thresholds.min_cocitations, &self.min_cocitations);
        set(&mut c.thresholds.coupling_min, &self.coupling_min);
        set(&mut c.thresholds.country_min_docs, &self.country_min_docs);
        set(&mut c.thresholds.top_k, &self.top_k);
        set(&mut c.n_clusters, &self.n_clusters);
        set(&mut c.serve.bind, &self.bind);
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Read the bibliographic export into the corpus store.
    Ingest,
    /// Mine bigram and trigram candidates ending in the anchor.
    Extract,
    /// Record coding decisions, close rounds, export the validated set.
    Code {
        #[command(subcommand)]
        action: CodeCommand,
    },
    /// Yearly indices, growth fits, disciplinarity and intersectionality.
    Metrics,
    /// Co-occurrence network, centralities and communities.
    Conet,
    /// Co-citation, journal coupling and country co-authorship networks.
    Schol,
    /// Cluster form embeddings and build the type network.
    Ontology,
    /// Serve the coding and labeling API.
    Serve,
    /// Write the validated forms as CSV and JSON lines.
    Export,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum VerdictArg {
    Valid,
    Invalid,
    Discuss,
}

impl From<VerdictArg> for Verdict {
    fn from(v: VerdictArg) -> Self {
        match v {
            VerdictArg::Valid => Verdict::Valid,
            VerdictArg::Invalid => Verdict::Invalid,
            VerdictArg::Discuss => Verdict::Discuss,
        }
    }
}

#[derive(Debug, Subcommand)]
pub enum CodeCommand {
    /// Record one coder's verdict.
    Decide {
        #[arg(long)]
        term: String,
        #[arg(long)]
        coder: String,
        #[arg(long, value_enum)]
        verdict: VerdictArg,
        /// Defaults to the open round.
        #[arg(long)]
        round: Option<u32>,
        #[arg(long, default_value = "")]
        comment: String,
    },
    /// Close the open round, settling every discrepancy.
    Resolve {
        #[arg(long)]
        valid: Vec<String>,
        #[arg(long)]
        invalid: Vec<String>,
        /// Carry the candidate over to the next round.
        #[arg(long)]
        defer: Vec<String>,
        #[arg(long, default_value = "")]
        note: String,
    },
    /// Print and save coding progress.
    Stats,
    /// Write the validated form set.
    Export,
    /// Mark the forms of a published list as valid.
    ImportValidated,
}

pub fn resolutions(valid: Vec<String>, invalid: Vec<String>, defer: Vec<String>) -> Vec<Resolution> {
    let tag = |terms: Vec<String>, verdict: Option<Verdict>| {
        terms.into_iter().map(move |term| Resolution {
            term,
            verdict,
            note: String::new(),
        })
    };
    tag(valid, Some(Verdict::Valid))
        .chain(tag(invalid, Some(Verdict::Invalid)))
        .chain(tag(defer, None))
        .collect()
}
