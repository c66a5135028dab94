//! Command-line pipeline for segforms: configuration, batch subcommands
//! with run manifests, and the review server.

pub mod args;
pub mod config;
pub mod error;
pub mod pipeline;
pub mod run;
pub mod serve;

use std::collections::BTreeMap;

use segforms::ontology::LabelingFile;

pub use config::PipelineConfig;
pub use error::{CliError, CliResult};

use crate::args::{Cli, CodeCommand, Command};
use crate::pipeline::CodeAction;
use crate::run::CLUSTERS_CSV;
use crate::serve::{AppState, LabelingStore};

/// Loads the config file (if any), applies flag overrides and validates.
pub fn resolve_config(cli: &Cli) -> CliResult<PipelineConfig> {
    let mut config = match &cli.config {
        Some(path) => PipelineConfig::load(path)?,
        None => PipelineConfig::default(),
    };
    cli.overrides.apply(&mut config);
    config.validate()?;
    Ok(config)
}

pub fn run(cli: Cli) -> CliResult<()> {
    let config = resolve_config(&cli)?;
    let manifest = match cli.command {
        Command::Ingest => pipeline::ingest(&config)?,
        Command::Extract => pipeline::extract(&config)?,
        Command::Code { action } => pipeline::code(&config, code_action(action)?)?,
        Command::Metrics => pipeline::metrics(&config)?,
        Command::Conet => pipeline::conet(&config)?,
        Command::Schol => pipeline::schol(&config)?,
        Command::Ontology => pipeline::ontology(&config)?,
        Command::Export => pipeline::export(&config)?,
        Command::Serve => return serve_blocking(&config),
    };
    log::info!("{}: {} outputs written", manifest.command, manifest.outputs.len());
    Ok(())
}

fn code_action(cmd: CodeCommand) -> CliResult<CodeAction> {
    Ok(match cmd {
        CodeCommand::Decide {
            term,
            coder,
            verdict,
            round,
            comment,
        } => CodeAction::Decide {
            term,
            coder,
            verdict: verdict.into(),
            round,
            comment,
        },
        CodeCommand::Resolve {
            valid,
            invalid,
            defer,
            note,
        } => CodeAction::Resolve {
            resolutions: args::resolutions(valid, invalid, defer),
            note,
        },
        CodeCommand::Stats => CodeAction::Stats,
        CodeCommand::Export => CodeAction::Export,
        CodeCommand::ImportValidated => CodeAction::ImportValidated,
    })
}

/// Server state from the artifacts in the output directory.
pub fn app_state(config: &PipelineConfig) -> CliResult<AppState> {
    let mut run = run::Run::new(config, "serve");
    let candidates = pipeline::load_candidates(&mut run)?;
    let codebook = pipeline::open_codebook(config, &candidates)?;
    let path = config
        .paths
        .labeling
        .clone()
        .unwrap_or_else(|| config.paths.out.join("labeling.csv"));
    let file = if path.is_file() {
        let f = std::fs::File::open(&path).map_err(|e| CliError::io(&path, e))?;
        LabelingFile::read(f)?
    } else {
        LabelingFile::default()
    };
    let clusters_path = config.paths.out.join(CLUSTERS_CSV);
    let clusters: BTreeMap<String, usize> = if clusters_path.is_file() {
        pipeline::read_clusters(&clusters_path)?.into_iter().collect()
    } else {
        BTreeMap::new()
    };
    let labeling = LabelingStore {
        file,
        clusters,
        path: Some(path),
    };
    Ok(AppState::new(
        candidates,
        codebook,
        labeling,
        config.serve.token.clone(),
        config.serve.page_size,
    ))
}

fn serve_blocking(config: &PipelineConfig) -> CliResult<()> {
    let state = app_state(config)?;
    let bind = config.serve.bind.clone();
    let rt = tokio::runtime::Runtime::new().map_err(|e| CliError::Usage(format!("tokio runtime: {e}")))?;
    rt.block_on(async move {
        let listener = tokio::net::TcpListener::bind(&bind).await.map_err(|e| CliError::Config {
            key: "serve.bind".into(),
            message: format!("{bind}: {e}"),
        })?;
        log::info!("serving on http://{bind}");
        axum::serve(listener, serve::router(state))
            .with_graceful_shutdown(async {
                let _ = tokio::signal::ctrl_c().await;
            })
            .await
            .map_err(|e| CliError::Usage(format!("server: {e}")))
    })
}
