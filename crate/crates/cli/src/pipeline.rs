//! Batch subcommands. Each one reads earlier artifacts from the output
//! directory, writes its own, and ends with a run manifest.

use std::collections::{BTreeMap, BTreeSet};
use std::io::Write;
use std::path::Path;

use chrono::Utc;
use serde::Serialize;
use serde_json::json;

use segforms::codebook::{
    export_validated, Codebook, CodingDecision, ConsensusPolicy, Journal, Resolution, Verdict,
};
use segforms::community::{louvain, slm_cluster};
use segforms::conet::{build_cooccurrence, centralities, path_dependence, CentralityTable};
use segforms::corpus::{ingest_bytes, ColumnMap, CorpusStore};
use segforms::export::{ontology_to_graph, series_svg, to_json_graph, write_graphml, Annotations};
use segforms::extract::{canonicalize_reversed, extract_candidates, write_candidates_csv, NGramCandidate, StopLexicon};
use segforms::forms::ValidatedFormSet;
use segforms::graph::{CommunityPartition, WeightedGraph};
use segforms::metrics::{
    annual_growth_rate, classify_all, diversity_per_year, exp_fit, forms_by_continent, forms_by_country,
    forms_per_year, intersectionality, moving_average, multidisciplinarity_per_year, new_forms_per_year,
    publications_per_year, transdisciplinarity_of_form, trigram_precedence_stats, PositionLexicon, YearSeries,
};
use segforms::ontology::{
    agglomerative_complete, apply_labeling, cosine_distance_matrix, cut_dendrogram, lexical_fallback_similarity,
    load_embeddings, type_network, CutCriterion, LabelingFile,
};
use segforms::scholnet::{build_coauthorship_countries, build_cocitation, build_coupling, write_network_csv};

use crate::config::PipelineConfig;
use crate::error::{CliError, CliResult};
use crate::run::{
    Run, RunManifest, CANDIDATES_CSV, CANDIDATES_JSON, CLUSTERS_CSV, CORPUS_MANIFEST, CORPUS_RECORDS,
    VALIDATED_JSON,
};

fn missing_key(key: &str) -> CliError {
    CliError::Config {
        key: key.into(),
        message: "required by this subcommand but not set".into(),
    }
}

pub fn load_store(run: &mut Run<'_>) -> CliResult<CorpusStore> {
    let records = run.require(CORPUS_RECORDS, "ingest")?;
    let manifest = run.require(CORPUS_MANIFEST, "ingest")?;
    run.read(&records)?;
    run.read(&manifest)?;
    Ok(CorpusStore::load(&records, &manifest)?)
}

pub fn load_candidates(run: &mut Run<'_>) -> CliResult<Vec<NGramCandidate>> {
    let path = run.require(CANDIDATES_JSON, "extract")?;
    let bytes = run.read(&path)?;
    Ok(serde_json::from_slice(&bytes)?)
}

fn load_validated(run: &mut Run<'_>) -> CliResult<ValidatedFormSet> {
    load_candidates(run)?;
    let path = run.require(VALIDATED_JSON, "code export")?;
    let bytes = run.read(&path)?;
    Ok(serde_json::from_slice(&bytes)?)
}

pub fn policy(config: &PipelineConfig) -> ConsensusPolicy {
    ConsensusPolicy {
        registered_coders: config.coders.clone(),
    }
}

pub fn open_codebook(config: &PipelineConfig, candidates: &[NGramCandidate]) -> CliResult<Codebook> {
    let terms: Vec<String> = candidates.iter().map(NGramCandidate::term).collect();
    let journal = config.journal_path();
    if let Some(dir) = journal.parent() {
        std::fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    }
    Ok(Codebook::open(
        Journal::new(journal),
        terms.iter().map(String::as_str),
        policy(config),
    )?)
}

pub fn ingest(config: &PipelineConfig) -> CliResult<RunManifest> {
    let mut run = Run::new(config, "ingest");
    let path = config.paths.corpus.as_deref().ok_or_else(|| missing_key("paths.corpus"))?;
    let data = run.read(path)?;
    let tsv = matches!(
        path.extension().and_then(|e| e.to_str()).map(str::to_ascii_lowercase).as_deref(),
        Some("tsv" | "txt")
    );
    let store = ingest_bytes(&data, &path.display().to_string(), if tsv { b'\t' } else { b',' }, &ColumnMap::scopus())?;
    let m = store.manifest();
    log::info!("ingest: {} rows read, {} accepted, {} rejected", m.rows_read, m.accepted, m.rejected);
    let records = run.out(CORPUS_RECORDS);
    let manifest = run.out(CORPUS_MANIFEST);
    std::fs::create_dir_all(records.parent().expect("nested path")).map_err(|e| CliError::io(&records, e))?;
    store.save(&records, &manifest)?;
    run.note_output_file(&records)?;
    run.note_output_file(&manifest)?;
    run.finish()
}

pub fn extract(config: &PipelineConfig) -> CliResult<RunManifest> {
    let mut run = Run::new(config, "extract");
    let store = load_store(&mut run)?;
    let lexicon = match &config.paths.lexicon {
        Some(dir) => {
            run.note_input_dir(dir)?;
            StopLexicon::load_dir(dir)?
        }
        None => StopLexicon::bundled(),
    };
    let candidates = canonicalize_reversed(extract_candidates(&store, &config.anchor, &lexicon)?);
    log::info!("extract: {} candidates", candidates.len());
    let mut csv = Vec::new();
    write_candidates_csv(&mut csv, &candidates)?;
    run.write(CANDIDATES_CSV, &csv)?;
    run.write(CANDIDATES_JSON, (serde_json::to_string(&candidates)? + "\n").as_bytes())?;
    run.finish()
}

/// `code` actions.
#[derive(Debug, Clone)]
pub enum CodeAction {
    Decide {
        term: String,
        coder: String,
        verdict: Verdict,
        round: Option<u32>,
        comment: String,
    },
    Resolve {
        resolutions: Vec<Resolution>,
        note: String,
    },
    Stats,
    Export,
    ImportValidated,
}

pub fn code(config: &PipelineConfig, action: CodeAction) -> CliResult<RunManifest> {
    let name = match &action {
        CodeAction::Decide { .. } => "code decide",
        CodeAction::Resolve { .. } => "code resolve",
        CodeAction::Stats => "code stats",
        CodeAction::Export => "code export",
        CodeAction::ImportValidated => "code import-validated",
    };
    let mut run = Run::new(config, name);
    let candidates = load_candidates(&mut run)?;
    let mut cb = open_codebook(config, &candidates)?;
    match action {
        CodeAction::Decide {
            term,
            coder,
            verdict,
            round,
            comment,
        } => {
            let round = round.unwrap_or_else(|| cb.state().current_round());
            cb.record_decision(CodingDecision {
                term: term.clone(),
                coder_id: coder,
                round,
                verdict,
                comment,
                timestamp: Utc::now(),
            })?;
            log::info!("{term}: consensus {:?}", cb.state().consensus(&term));
        }
        CodeAction::Resolve { resolutions, note } => {
            let version = cb.resolve_round(&resolutions, &note)?;
            log::info!("codebook version {version}, round {} open", cb.state().current_round());
        }
        CodeAction::Stats => {
            let progress = cb.state().progress();
            // a closed pipe (for example `| head`) is not an error
            let _ = writeln!(std::io::stdout(), "{}", serde_json::to_string_pretty(&progress)?);
            run.write_json("code/progress.json", &progress)?;
        }
        CodeAction::Export => {
            let validated = export_validated(cb.state(), &candidates);
            log::info!(
                "export: {} validated forms ({} bigrams, {} trigrams)",
                validated.len(),
                validated.bigrams().count(),
                validated.trigrams().count()
            );
            run.write(VALIDATED_JSON, (serde_json::to_string(&validated)? + "\n").as_bytes())?;
            let mut table = Vec::new();
            validated.write_table_csv(&mut table)?;
            run.write("forms.csv", &table)?;
        }
        CodeAction::ImportValidated => {
            let path = config
                .paths
                .validated_list
                .as_deref()
                .ok_or_else(|| missing_key("paths.validated_list"))?;
            let text = String::from_utf8_lossy(&run.read(path)?).into_owned();
            let terms: Vec<String> = text
                .lines()
                .map(str::trim)
                .filter(|l| !l.is_empty() && !l.starts_with('#'))
                .map(str::to_owned)
                .collect();
            let n = cb.import_validated(&terms, &format!("imported from {}", path.display()))?;
            log::info!("imported {n} validated forms");
        }
    }
    let journal = config.journal_path();
    if journal.is_file() {
        run.note_output_file(&journal)?;
    }
    run.finish()
}

fn series_csv(run: &mut Run<'_>, rel: &str, s: &YearSeries) -> CliResult<()> {
    let mut out = Vec::new();
    s.write_csv(&mut out)?;
    run.write(rel, &out)?;
    Ok(())
}

fn or_null<T: Serialize>(what: &str, r: segforms::Result<T>) -> serde_json::Value {
    match r {
        Ok(v) => serde_json::to_value(v).unwrap_or(serde_json::Value::Null),
        Err(e) => {
            log::warn!("{what}: {e}");
            serde_json::Value::Null
        }
    }
}

pub fn metrics(config: &PipelineConfig) -> CliResult<RunManifest> {
    let mut run = Run::new(config, "metrics");
    let forms = load_validated(&mut run)?;
    let store = load_store(&mut run)?;

    let forms_year = forms_per_year(&forms);
    let new_forms = new_forms_per_year(&forms);
    let pubs = publications_per_year(&forms);
    let diversity = if forms.is_empty() { YearSeries::default() } else { diversity_per_year(&forms)? };
    let multi = multidisciplinarity_per_year(&forms, &store)?;
    let inter = intersectionality(&forms, &PositionLexicon::bundled())?;
    let window = config.moving_average_window;

    series_csv(&mut run, "metrics/forms_per_year.csv", &forms_year)?;
    series_csv(&mut run, "metrics/new_forms_per_year.csv", &new_forms)?;
    series_csv(&mut run, "metrics/publications_per_year.csv", &pubs)?;
    series_csv(&mut run, "metrics/diversity.csv", &diversity)?;
    series_csv(&mut run, "metrics/multidisciplinarity.csv", &multi)?;
    series_csv(&mut run, "metrics/intersectionality_entropy.csv", &inter.entropy)?;
    if let Ok(ma) = moving_average(&diversity, window) {
        series_csv(&mut run, "metrics/diversity_moving_average.csv", &ma)?;
    }
    run.write(
        "metrics/growth.svg",
        series_svg("Forms and publications per year", &[("forms", &forms_year), ("publications", &pubs)]).as_bytes(),
    )?;
    run.write(
        "metrics/diversity.svg",
        series_svg("Diversity of forms", &[("entropy", &diversity), ("multidisciplinarity", &multi)]).as_bytes(),
    )?;

    let last_year = forms.forms().iter().flat_map(|f| f.docs.values()).max().copied().unwrap_or(0);
    let mut trans = csv::Writer::from_writer(Vec::new());
    trans.write_record(["form", "transdisciplinarity"]).map_err(segforms::Error::from)?;
    for f in forms.forms() {
        let t = transdisciplinarity_of_form(f, &store, last_year, config.discipline_universe)?;
        trans.write_record([f.term(), format!("{t:.6}")]).map_err(segforms::Error::from)?;
    }
    let trans = trans.into_inner().map_err(|e| CliError::Usage(e.to_string()))?;
    run.write("metrics/transdisciplinarity.csv", &trans)?;

    let single_doc = forms.forms().iter().filter(|f| f.n_docs() == 1).count();
    let summary = json!({
        "forms": forms.len(),
        "bigrams": forms.bigrams().count(),
        "trigrams": forms.trigrams().count(),
        "single_document_forms": single_doc,
        "exp_fit_publications": or_null("exp fit of publications", exp_fit(&pubs)),
        "exp_fit_forms": or_null("exp fit of forms", exp_fit(&forms_year)),
        "annual_growth_publications": or_null("growth of publications", annual_growth_rate(&pubs)),
        "annual_growth_forms": or_null("growth of forms", annual_growth_rate(&forms_year)),
        "trigram_precedence": trigram_precedence_stats(&forms),
        "origin_vs_dominant": classify_all(&forms, &store),
        "forms_by_country": forms_by_country(&forms),
        "forms_by_continent": forms_by_continent(&forms),
        "intersectionality": inter,
    });
    run.write_json("metrics/summary.json", &summary)?;
    run.finish()
}

fn graph_outputs(
    run: &mut Run<'_>,
    stem: &str,
    g: &WeightedGraph,
    notes: Annotations<'_>,
) -> CliResult<()> {
    let mut gml = Vec::new();
    write_graphml(&mut gml, g, notes)?;
    run.write(&format!("{stem}.graphml"), &gml)?;
    run.write_json(&format!("{stem}.json"), &to_json_graph(g, notes)?)?;
    Ok(())
}

fn communities(g: &WeightedGraph, what: &str, f: impl Fn(&WeightedGraph) -> segforms::Result<CommunityPartition>) -> Option<CommunityPartition> {
    if g.edge_count() == 0 {
        log::warn!("{what}: no edges, communities skipped");
        return None;
    }
    match f(g) {
        Ok(p) => Some(p),
        Err(e) => {
            log::warn!("{what}: {e}");
            None
        }
    }
}

pub fn conet(config: &PipelineConfig) -> CliResult<RunManifest> {
    let mut run = Run::new(config, "conet");
    let forms = load_validated(&mut run)?;
    let g = build_cooccurrence(&forms, config.thresholds.min_cooccurrence)?;
    let table: CentralityTable = centralities(&g);
    let seed = config.seeds.louvain;
    let partition = communities(&g, "co-occurrence", |g| louvain(g, 1.0, seed));
    let notes = Annotations {
        centrality: Some(&table),
        partition: partition.as_ref(),
    };
    graph_outputs(&mut run, "conet/network", &g, notes)?;
    let mut csv = Vec::new();
    table.write_csv(&mut csv)?;
    run.write("conet/centrality.csv", &csv)?;
    let summary = json!({
        "nodes": g.node_count(),
        "edges": g.edge_count(),
        "total_weight": g.total_weight(),
        "communities": partition.as_ref().map(CommunityPartition::community_count),
        "modularity": partition.as_ref().map(|p| p.modularity),
        "path_dependence": or_null("path dependence", path_dependence(&g, &table)),
    });
    run.write_json("conet/summary.json", &summary)?;
    run.finish()
}

pub fn schol(config: &PipelineConfig) -> CliResult<RunManifest> {
    let mut run = Run::new(config, "schol");
    let store = load_store(&mut run)?;
    let t = &config.thresholds;
    let excluded: BTreeSet<String> = match &config.paths.cocitation_exclusions {
        Some(p) => String::from_utf8_lossy(&run.read(p)?)
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty())
            .map(str::to_owned)
            .collect(),
        None => BTreeSet::new(),
    };
    let networks = [
        ("cocitation", "citation_count", build_cocitation(&store, t.min_cocitations, t.top_k, &excluded)?),
        ("coupling", "citations", build_coupling(&store, t.coupling_min, t.top_k)?),
        ("countries", "doc_count", build_coauthorship_countries(&store, t.country_min_docs)?),
    ];
    let mut summary = BTreeMap::new();
    for (name, count_attr, g) in &networks {
        let seed = config.seeds.slm;
        let partition = communities(g, name, |g| slm_cluster(g, seed));
        let mut csv = Vec::new();
        write_network_csv(&mut csv, g, count_attr, partition.as_ref())?;
        run.write(&format!("schol/{name}.csv"), &csv)?;
        let notes = Annotations {
            centrality: None,
            partition: partition.as_ref(),
        };
        graph_outputs(&mut run, &format!("schol/{name}"), g, notes)?;
        summary.insert(
            *name,
            json!({
                "nodes": g.node_count(),
                "edges": g.edge_count(),
                "communities": partition.as_ref().map(CommunityPartition::community_count),
                "modularity": partition.as_ref().map(|p| p.modularity),
            }),
        );
    }
    run.write_json("schol/summary.json", &summary)?;
    run.finish()
}

/// Form → cluster pairs written by `ontology`.
pub fn read_clusters(path: &Path) -> CliResult<Vec<(String, usize)>> {
    let mut rdr = csv::Reader::from_path(path).map_err(segforms::Error::from)?;
    let mut out = Vec::new();
    for row in rdr.records() {
        let row = row.map_err(segforms::Error::from)?;
        let cluster = row
            .get(1)
            .and_then(|c| c.parse().ok())
            .ok_or_else(|| CliError::Usage(format!("{}: bad cluster row {row:?}", path.display())))?;
        out.push((row.get(0).unwrap_or_default().to_owned(), cluster));
    }
    Ok(out)
}

pub fn ontology(config: &PipelineConfig) -> CliResult<RunManifest> {
    let mut run = Run::new(config, "ontology");
    let forms = load_validated(&mut run)?;
    let all: Vec<String> = forms.forms().iter().map(NGramCandidate::term).collect();
    let (terms, matrix) = match &config.paths.embeddings {
        Some(path) => {
            run.read(path)?;
            let (table, missing) = load_embeddings(path, &all)?;
            if !missing.is_empty() {
                log::warn!("{} forms have no embedding and are left out of the clustering", missing.len());
            }
            let terms: Vec<String> = all.iter().filter(|t| table.vector(t).is_some()).cloned().collect();
            let matrix = cosine_distance_matrix(&table.subset(&terms)?)?;
            (terms, matrix)
        }
        None => {
            log::warn!("paths.embeddings not set; clustering on lexical overlap of qualifiers");
            let tokens: Vec<Vec<String>> = forms.forms().iter().map(|f| f.terms.clone()).collect();
            (all.clone(), lexical_fallback_similarity(&tokens, &config.anchor))
        }
    };
    if terms.len() < 2 {
        return Err(CliError::Usage(format!("ontology: need at least 2 forms to cluster, have {}", terms.len())));
    }
    let dendrogram = agglomerative_complete(&matrix);
    let k = config.n_clusters.min(terms.len());
    let clusters = cut_dendrogram(&dendrogram, CutCriterion::NClusters(k))?;
    run.write_json("ontology/dendrogram.json", &json!({ "terms": terms, "dendrogram": dendrogram }))?;
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["form", "cluster"]).map_err(segforms::Error::from)?;
    for (t, c) in terms.iter().zip(&clusters) {
        w.write_record([t.as_str(), &c.to_string()]).map_err(segforms::Error::from)?;
    }
    let bytes = w.into_inner().map_err(|e| CliError::Usage(e.to_string()))?;
    run.write(CLUSTERS_CSV, &bytes)?;

    if let Some(path) = config.paths.labeling.as_deref().filter(|p| p.is_file()) {
        let file = LabelingFile::read(run.read(path)?.as_slice())?;
        let labeling = apply_labeling(&terms, &clusters, &file, None)?;
        let mut csv = Vec::new();
        labeling.write_csv(&mut csv)?;
        run.write("ontology/labeling.csv", &csv)?;
        let net = type_network(&labeling);
        run.write_json("ontology/type_network.json", &net)?;
        let mut gml = Vec::new();
        write_graphml(&mut gml, &ontology_to_graph(&net)?, Annotations::default())?;
        run.write("ontology/type_network.graphml", &gml)?;
    } else {
        log::info!("no labeling file yet; label clusters through `serve` or paths.labeling");
    }
    run.finish()
}

pub fn export(config: &PipelineConfig) -> CliResult<RunManifest> {
    let mut run = Run::new(config, "export");
    let forms = load_validated(&mut run)?;
    let mut table = Vec::new();
    forms.write_table_csv(&mut table)?;
    run.write("export/forms.csv", &table)?;
    let mut lines = String::new();
    for f in forms.forms() {
        let row = json!({
            "form": f.term(),
            "arity": f.arity,
            "first_year": f.first_year,
            "first_countries": f.first_countries,
            "n_publications": f.n_docs(),
            "origin_discipline": f.origin_discipline(),
            "per_year": f.per_year_counts,
        });
        lines.push_str(&serde_json::to_string(&row)?);
        lines.push('\n');
    }
    run.write("export/forms.jsonl", lines.as_bytes())?;
    // input for the embedding adapter
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["form"]).map_err(segforms::Error::from)?;
    for f in forms.forms() {
        w.write_record([f.term()]).map_err(segforms::Error::from)?;
    }
    let bytes = w.into_inner().map_err(|e| CliError::Usage(e.to_string()))?;
    run.write("export/embed_input.csv", &bytes)?;
    run.finish()
}
