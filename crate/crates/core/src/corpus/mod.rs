//! Bibliographic record ingest, anchor filtering and corpus summaries.

mod countries;

pub use countries::{countries, CountryTable};

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::fs;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::text::{contains_token, fold};
use crate::par;

pub const MIN_YEAR: i32 = 1500;
pub const MAX_YEAR: i32 = 2100;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DocType {
    Article,
    Chapter,
    Book,
    ConferencePaper,
    Editorial,
    Review,
    Other,
}

impl DocType {
    /// Maps export labels such as "Article" or "Book Chapter".
    pub fn parse(label: &str) -> Self {
        match fold(label).as_str() {
            "article" | "ar" => DocType::Article,
            "chapter" | "book chapter" | "ch" => DocType::Chapter,
            "book" | "bk" => DocType::Book,
            "conference paper" | "cp" => DocType::ConferencePaper,
            "editorial" | "ed" => DocType::Editorial,
            "review" | "re" => DocType::Review,
            _ => DocType::Other,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            DocType::Article => "article",
            DocType::Chapter => "chapter",
            DocType::Book => "book",
            DocType::ConferencePaper => "conference_paper",
            DocType::Editorial => "editorial",
            DocType::Review => "review",
            DocType::Other => "other",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DocumentRecord {
    pub doc_id: String,
    pub title: String,
    #[serde(rename = "abstract")]
    pub abstract_text: String,
    pub keywords: Vec<String>,
    pub year: i32,
    pub source_title: String,
    pub doc_type: DocType,
    /// Discipline codes in source order; position 0 is the primary field.
    pub asjc_fields: Vec<String>,
    pub authors: Vec<String>,
    pub countries: BTreeSet<String>,
    pub references: Vec<String>,
    pub language: String,
    /// Times cited, when the export carries it.
    #[serde(default)]
    pub cited_by: u32,
}

impl DocumentRecord {
    /// A record with only the required fields set.
    pub fn new(doc_id: impl Into<String>, year: i32) -> Self {
        DocumentRecord {
            doc_id: doc_id.into(),
            title: String::new(),
            abstract_text: String::new(),
            keywords: Vec::new(),
            year,
            source_title: String::new(),
            doc_type: DocType::Article,
            asjc_fields: Vec::new(),
            authors: Vec::new(),
            countries: BTreeSet::new(),
            references: Vec::new(),
            language: String::new(),
            cited_by: 0,
        }
    }

    pub fn mentions(&self, anchor: &str) -> bool {
        contains_token(&self.title, anchor)
            || contains_token(&self.abstract_text, anchor)
            || self.keywords.iter().any(|k| contains_token(k, anchor))
    }
}

/// Export column names for each record field. Multi-valued cells are split
/// on `;`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct ColumnMap {
    /// `None` synthesizes ids as `row-NNNNNN` from the 1-based data row.
    pub doc_id: Option<String>,
    pub title: Option<String>,
    #[serde(rename = "abstract")]
    pub abstract_text: Option<String>,
    /// Several keyword columns may be merged (author and index keywords).
    pub keywords: Vec<String>,
    pub year: Option<String>,
    pub source_title: Option<String>,
    pub doc_type: Option<String>,
    pub asjc: Option<String>,
    pub authors: Option<String>,
    pub affiliations: Option<String>,
    pub references: Option<String>,
    pub language: Option<String>,
    pub cited_by: Option<String>,
}

impl Default for ColumnMap {
    fn default() -> Self {
        Self::scopus()
    }
}

impl ColumnMap {
    /// Column names of a standard Scopus CSV export.
    pub fn scopus() -> Self {
        ColumnMap {
            doc_id: Some("EID".into()),
            title: Some("Title".into()),
            abstract_text: Some("Abstract".into()),
            keywords: vec!["Author Keywords".into(), "Index Keywords".into()],
            year: Some("Year".into()),
            source_title: Some("Source title".into()),
            doc_type: Some("Document Type".into()),
            asjc: Some("ASJC".into()),
            authors: Some("Author(s) ID".into()),
            affiliations: Some("Affiliations".into()),
            references: Some("References".into()),
            language: Some("Language of Original Document".into()),
            cited_by: Some("Cited by".into()),
        }
    }

    /// Drops optional columns that the header does not carry, keeping the
    /// required ones so that a missing title or year still fails loudly.
    pub fn restricted_to(&self, header: &[String]) -> Self {
        let has = |c: &Option<String>| c.as_ref().filter(|c| header.contains(c)).cloned();
        ColumnMap {
            doc_id: has(&self.doc_id),
            title: self.title.clone(),
            abstract_text: has(&self.abstract_text),
            keywords: self
                .keywords
                .iter()
                .filter(|c| header.contains(c))
                .cloned()
                .collect(),
            year: self.year.clone(),
            source_title: has(&self.source_title),
            doc_type: has(&self.doc_type),
            asjc: has(&self.asjc),
            authors: has(&self.authors),
            affiliations: has(&self.affiliations),
            references: has(&self.references),
            language: has(&self.language),
            cited_by: has(&self.cited_by),
        }
    }

    fn resolve(&self, header: &[String]) -> Result<ResolvedColumns> {
        let title = self.title.as_ref().ok_or(Error::MissingField("title"))?;
        let year = self.year.as_ref().ok_or(Error::MissingField("year"))?;
        let mut missing = Vec::new();
        let mut find = |name: &String| -> usize {
            match header.iter().position(|h| h == name) {
                Some(i) => i,
                None => {
                    missing.push(name.clone());
                    usize::MAX
                }
            }
        };
        let cols = ResolvedColumns {
            doc_id: self.doc_id.as_ref().map(&mut find),
            title: find(title),
            abstract_text: self.abstract_text.as_ref().map(&mut find),
            keywords: self.keywords.iter().map(&mut find).collect(),
            year: find(year),
            source_title: self.source_title.as_ref().map(&mut find),
            doc_type: self.doc_type.as_ref().map(&mut find),
            asjc: self.asjc.as_ref().map(&mut find),
            authors: self.authors.as_ref().map(&mut find),
            affiliations: self.affiliations.as_ref().map(&mut find),
            references: self.references.as_ref().map(&mut find),
            language: self.language.as_ref().map(&mut find),
            cited_by: self.cited_by.as_ref().map(&mut find),
        };
        if missing.is_empty() {
            Ok(cols)
        } else {
            Err(Error::MissingColumns(missing))
        }
    }
}

struct ResolvedColumns {
    doc_id: Option<usize>,
    title: usize,
    abstract_text: Option<usize>,
    keywords: Vec<usize>,
    year: usize,
    source_title: Option<usize>,
    doc_type: Option<usize>,
    asjc: Option<usize>,
    authors: Option<usize>,
    affiliations: Option<usize>,
    references: Option<usize>,
    language: Option<usize>,
    cited_by: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RejectReason {
    UnparseableYear,
    YearOutOfRange,
    NoText,
    DuplicateDocId,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FilterStep {
    pub anchor: String,
    pub kept: usize,
    pub dropped: usize,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct IngestManifest {
    pub source: String,
    pub source_sha256: String,
    pub delimiter: String,
    pub rows_read: usize,
    pub accepted: usize,
    pub rejected: usize,
    pub reject_reasons: BTreeMap<RejectReason, usize>,
    pub unmatched_country_segments: usize,
    #[serde(default)]
    pub filters: Vec<FilterStep>,
}

impl IngestManifest {
    /// Record count the store must hold: accepted rows, narrowed by filters.
    pub fn expected_records(&self) -> usize {
        self.filters.last().map_or(self.accepted, |f| f.kept)
    }
}

/// Immutable set of accepted records, ordered by `doc_id`.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct CorpusStore {
    records: Vec<DocumentRecord>,
    manifest: IngestManifest,
}

enum RowOutcome {
    Accepted(Box<DocumentRecord>, usize),
    Rejected(RejectReason),
}

fn split_multi(cell: &str) -> Vec<String> {
    cell.split(';')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(str::to_owned)
        .collect()
}

fn parse_row(row: &csv::StringRecord, index: usize, cols: &ResolvedColumns) -> RowOutcome {
    let cell = |i: usize| row.get(i).unwrap_or("").trim();
    let opt = |i: Option<usize>| i.map(cell).unwrap_or("");

    let year = match cell(cols.year).parse::<i32>() {
        Ok(y) => y,
        Err(_) => return RowOutcome::Rejected(RejectReason::UnparseableYear),
    };
    if !(MIN_YEAR..=MAX_YEAR).contains(&year) {
        return RowOutcome::Rejected(RejectReason::YearOutOfRange);
    }

    let title = cell(cols.title).to_owned();
    let abstract_text = opt(cols.abstract_text).to_owned();
    let keywords: Vec<String> = cols.keywords.iter().flat_map(|&i| split_multi(cell(i))).collect();
    if title.is_empty() && abstract_text.is_empty() && keywords.is_empty() {
        return RowOutcome::Rejected(RejectReason::NoText);
    }

    let doc_id = match cols.doc_id.map(cell).filter(|s| !s.is_empty()) {
        Some(id) => id.to_owned(),
        None => format!("row-{:06}", index + 1),
    };

    let table = countries();
    let mut countries = BTreeSet::new();
    let mut unmatched = 0;
    for affiliation in split_multi(opt(cols.affiliations)) {
        match table.from_affiliation(&affiliation) {
            Some(c) => {
                countries.insert(c.to_owned());
            }
            None => {
                log::debug!("{doc_id}: no country in affiliation {affiliation:?}");
                unmatched += 1;
            }
        }
    }

    let record = DocumentRecord {
        doc_id,
        title,
        abstract_text,
        keywords,
        year,
        source_title: opt(cols.source_title).to_owned(),
        doc_type: cols.doc_type.map(|i| DocType::parse(cell(i))).unwrap_or(DocType::Other),
        asjc_fields: split_multi(opt(cols.asjc)),
        authors: split_multi(opt(cols.authors)),
        countries,
        references: split_multi(opt(cols.references)),
        language: opt(cols.language).to_owned(),
        cited_by: opt(cols.cited_by).parse().unwrap_or(0),
    };
    RowOutcome::Accepted(Box::new(record), unmatched)
}

/// Tab when the path says so or the header line has more tabs than commas.
fn detect_delimiter(path: &Path, data: &[u8]) -> u8 {
    match path.extension().and_then(|e| e.to_str()) {
        Some("tsv") | Some("tab") => return b'\t',
        Some("csv") => return b',',
        _ => {}
    }
    let first = data.split(|&b| b == b'\n').next().unwrap_or(&[]);
    let tabs = first.iter().filter(|&&b| b == b'\t').count();
    let commas = first.iter().filter(|&&b| b == b',').count();
    if tabs > commas {
        b'\t'
    } else {
        b','
    }
}

/// Reads a delimited export with a header row. Bad rows are counted in the
/// manifest, never fatal; structural problems (ragged rows, bad quoting,
/// unknown columns) are errors.
pub fn ingest_csv(path: &Path, column_map: &ColumnMap) -> Result<CorpusStore> {
    let data = fs::read(path).map_err(|e| Error::io(path, e))?;
    let delimiter = detect_delimiter(path, &data);
    ingest_bytes(&data, &path.display().to_string(), delimiter, column_map)
}

pub fn ingest_bytes(
    data: &[u8],
    source: &str,
    delimiter: u8,
    column_map: &ColumnMap,
) -> Result<CorpusStore> {
    let source_sha256 = hex::encode(Sha256::digest(data));
    let body = data.strip_prefix(b"\xEF\xBB\xBF").unwrap_or(data);
    let mut reader = csv::ReaderBuilder::new()
        .delimiter(delimiter)
        .has_headers(true)
        .flexible(false)
        .from_reader(body);
    let header: Vec<String> = reader.headers()?.iter().map(|h| h.trim().to_owned()).collect();
    let cols = column_map.resolve(&header)?;
    let rows = reader.records().collect::<std::result::Result<Vec<_>, _>>()?;

    let indexed: Vec<(usize, &csv::StringRecord)> = rows.iter().enumerate().collect();
    let outcomes = par::map(&indexed, |(i, row)| parse_row(row, *i, &cols));

    let mut manifest = IngestManifest {
        source: source.to_owned(),
        source_sha256,
        delimiter: (delimiter as char).escape_default().to_string(),
        rows_read: rows.len(),
        ..Default::default()
    };
    let mut seen = HashSet::new();
    let mut records = Vec::new();
    for outcome in outcomes {
        match outcome {
            RowOutcome::Accepted(record, unmatched) if seen.insert(record.doc_id.clone()) => {
                manifest.unmatched_country_segments += unmatched;
                records.push(*record);
            }
            RowOutcome::Accepted(..) => {
                *manifest.reject_reasons.entry(RejectReason::DuplicateDocId).or_default() += 1;
            }
            RowOutcome::Rejected(reason) => {
                *manifest.reject_reasons.entry(reason).or_default() += 1;
            }
        }
    }
    manifest.accepted = records.len();
    manifest.rejected = manifest.rows_read - manifest.accepted;
    Ok(CorpusStore::from_parts(records, manifest))
}

impl CorpusStore {
    /// Builds a store, sorting by `doc_id`. The manifest is taken as given.
    pub fn from_parts(mut records: Vec<DocumentRecord>, manifest: IngestManifest) -> Self {
        records.sort_by(|a, b| a.doc_id.cmp(&b.doc_id));
        CorpusStore { records, manifest }
    }

    /// Store over in-memory records with a synthetic manifest.
    pub fn from_records(records: Vec<DocumentRecord>) -> Self {
        let manifest = IngestManifest {
            source: "<memory>".into(),
            rows_read: records.len(),
            accepted: records.len(),
            ..Default::default()
        };
        Self::from_parts(records, manifest)
    }

    pub fn records(&self) -> &[DocumentRecord] {
        &self.records
    }

    pub fn manifest(&self) -> &IngestManifest {
        &self.manifest
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn get(&self, doc_id: &str) -> Option<&DocumentRecord> {
        self.records
            .binary_search_by(|r| r.doc_id.as_str().cmp(doc_id))
            .ok()
            .map(|i| &self.records[i])
    }

    /// Records whose title, abstract or keywords contain `anchor` as a whole
    /// token (case-insensitive).
    pub fn filter_by_anchor(&self, anchor: &str) -> CorpusStore {
        let anchor = anchor.to_lowercase();
        let keep = par::map(&self.records, |r| r.mentions(&anchor));
        let records: Vec<DocumentRecord> = self
            .records
            .iter()
            .zip(keep)
            .filter(|(_, k)| *k)
            .map(|(r, _)| r.clone())
            .collect();
        let mut manifest = self.manifest.clone();
        manifest.filters.push(FilterStep {
            anchor,
            kept: records.len(),
            dropped: self.records.len() - records.len(),
        });
        CorpusStore { records, manifest }
    }

    /// Writes records as JSON lines plus a pretty-printed manifest.
    pub fn save(&self, records_path: &Path, manifest_path: &Path) -> Result<()> {
        let file = fs::File::create(records_path).map_err(|e| Error::io(records_path, e))?;
        let mut out = BufWriter::new(file);
        for r in &self.records {
            serde_json::to_writer(&mut out, r)?;
            out.write_all(b"\n").map_err(|e| Error::io(records_path, e))?;
        }
        out.flush().map_err(|e| Error::io(records_path, e))?;
        let manifest = serde_json::to_string_pretty(&self.manifest)? + "\n";
        fs::write(manifest_path, manifest).map_err(|e| Error::io(manifest_path, e))
    }

    pub fn load(records_path: &Path, manifest_path: &Path) -> Result<Self> {
        let file = fs::File::open(records_path).map_err(|e| Error::io(records_path, e))?;
        let mut records = Vec::new();
        for line in BufReader::new(file).lines() {
            let line = line.map_err(|e| Error::io(records_path, e))?;
            if !line.trim().is_empty() {
                records.push(serde_json::from_str(&line)?);
            }
        }
        let text = fs::read_to_string(manifest_path).map_err(|e| Error::io(manifest_path, e))?;
        let manifest = serde_json::from_str(&text)?;
        Ok(Self::from_parts(records, manifest))
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CorpusStats {
    pub records: usize,
    pub by_doc_type: BTreeMap<DocType, usize>,
    pub by_year: BTreeMap<i32, usize>,
    pub by_country: BTreeMap<String, usize>,
    pub distinct_sources: usize,
    pub distinct_authors: usize,
    pub total_references: usize,
}

pub fn corpus_stats(store: &CorpusStore) -> CorpusStats {
    let mut stats = CorpusStats {
        records: store.len(),
        ..Default::default()
    };
    let mut sources = BTreeSet::new();
    let mut authors = BTreeSet::new();
    for r in store.records() {
        *stats.by_doc_type.entry(r.doc_type).or_default() += 1;
        *stats.by_year.entry(r.year).or_default() += 1;
        for c in &r.countries {
            *stats.by_country.entry(c.clone()).or_default() += 1;
        }
        if !r.source_title.is_empty() {
            sources.insert(fold(&r.source_title));
        }
        authors.extend(r.authors.iter().map(String::as_str));
        stats.total_references += r.references.len();
    }
    stats.distinct_sources = sources.len();
    stats.distinct_authors = authors.len();
    stats
}

#[cfg(test)]
mod tests {
    use super::*;

    const HEADER: &str = "EID,Title,Abstract,Author Keywords,Year,Source title,Document Type,ASJC,Author(s) ID,Affiliations,References";

    fn ingest(body: &str) -> Result<CorpusStore> {
        ingest_bytes(body.as_bytes(), "test", b',', &ColumnMap::scopus().restricted_to(
            &HEADER.split(',').map(String::from).collect::<Vec<_>>(),
        ))
    }

    #[test]
    fn early_record_accepted() {
        let csv = format!(
            "{HEADER}\ne1,Racial segregation in the city,,,1913,J,Article,3312,a1,\"Chicago, USA\",\n"
        );
        let store = ingest(&csv).unwrap();
        assert_eq!(store.len(), 1);
        let r = &store.records()[0];
        assert_eq!(r.year, 1913);
        assert!(r.countries.contains("United States"));
    }

    #[test]
    fn header_only() {
        let store = ingest(&format!("{HEADER}\n")).unwrap();
        assert_eq!(store.len(), 0);
        assert_eq!(store.manifest().rejected, 0);
        assert_eq!(store.manifest().rows_read, 0);
    }

    #[test]
    fn blank_year_rejected() {
        let rows = [
            "e1,A segregation,,,2001,J,Article,,,,",
            "e2,B segregation,,,2002,J,Review,,,,",
            "e3,C segregation,,,,J,Article,,,,",
            "e4,D segregation,,,2004,J,Book,,,,",
            "e5,E segregation,,,2005,J,Article,,,,",
        ];
        let store = ingest(&format!("{HEADER}\n{}\n", rows.join("\n"))).unwrap();
        let m = store.manifest();
        assert_eq!((store.len(), m.accepted, m.rejected, m.rows_read), (4, 4, 1, 5));
        assert_eq!(m.reject_reasons[&RejectReason::UnparseableYear], 1);
        assert_eq!(m.expected_records(), store.len());
    }

    #[test]
    fn reject_reasons() {
        let rows = [
            "e1,,,,2001,J,Article,,,,",
            "e2,T,,,1400,J,Article,,,,",
            "e3,T,,,2001,J,Article,,,,",
            "e3,T2,,,2002,J,Article,,,,",
        ];
        let store = ingest(&format!("{HEADER}\n{}\n", rows.join("\n"))).unwrap();
        let m = store.manifest();
        assert_eq!(store.len(), 1);
        assert_eq!(m.reject_reasons[&RejectReason::NoText], 1);
        assert_eq!(m.reject_reasons[&RejectReason::YearOutOfRange], 1);
        assert_eq!(m.reject_reasons[&RejectReason::DuplicateDocId], 1);
        assert_eq!(store.get("e3").unwrap().title, "T");
    }

    #[test]
    fn missing_column_is_error() {
        let map = ColumnMap {
            title: Some("Headline".into()),
            ..ColumnMap::scopus()
        };
        let err = ingest_bytes(b"Title,Year\nx,2000\n", "t", b',', &map).unwrap_err();
        assert!(matches!(err, Error::MissingColumns(ref c) if c.contains(&"Headline".to_string())));
    }

    #[test]
    fn ragged_row_is_error() {
        let err = ingest(&format!("{HEADER}\ne1,T\n")).unwrap_err();
        assert!(matches!(err, Error::Csv(_)));
    }

    #[test]
    fn multivalued_cells_and_synthesized_ids() {
        let map = ColumnMap {
            doc_id: None,
            ..ColumnMap::scopus()
        };
        let header = "Title,Year,Author Keywords,ASJC,Affiliations";
        let body = format!(
            "{header}\nT1,1999,gender segregation; schools,3312; 1207,\"U Porto, Porto, Portugal; MIT, Cambridge, United States\"\n"
        );
        let cols: Vec<String> = header.split(',').map(String::from).collect();
        let store = ingest_bytes(body.as_bytes(), "t", b',', &map.restricted_to(&cols)).unwrap();
        let r = &store.records()[0];
        assert_eq!(r.doc_id, "row-000001");
        assert_eq!(r.keywords, vec!["gender segregation", "schools"]);
        assert_eq!(r.asjc_fields, vec!["3312", "1207"]);
        assert_eq!(
            r.countries.iter().cloned().collect::<Vec<_>>(),
            vec!["Portugal", "United States"]
        );
    }

    fn rec(id: &str, year: i32, abs: &str, t: DocType) -> DocumentRecord {
        DocumentRecord {
            abstract_text: abs.into(),
            doc_type: t,
            ..DocumentRecord::new(id, year)
        }
    }

    #[test]
    fn anchor_filter_token_boundary() {
        let store = CorpusStore::from_records(vec![
            rec("a", 2000, "rising residential segregation", DocType::Article),
            rec("b", 2000, "segregationist policies", DocType::Article),
        ]);
        let sub = store.filter_by_anchor("segregation");
        assert_eq!(sub.len(), 1);
        assert_eq!(sub.records()[0].doc_id, "a");
        assert_eq!(sub.manifest().expected_records(), 1);
        assert_eq!(sub.filter_by_anchor("segregation"), {
            let mut again = sub.clone();
            again.manifest.filters.push(FilterStep {
                anchor: "segregation".into(),
                kept: 1,
                dropped: 0,
            });
            again
        });
    }

    #[test]
    fn anchor_filter_counts() {
        let records = (0..10)
            .map(|i| {
                let text = if i < 7 { "on segregation" } else { "on housing" };
                rec(&format!("d{i}"), 2000, text, DocType::Article)
            })
            .collect();
        let store = CorpusStore::from_records(records);
        assert_eq!(store.filter_by_anchor("segregation").len(), 7);
    }

    #[test]
    fn stats_by_type() {
        let store = CorpusStore::from_records(vec![
            rec("a", 2000, "", DocType::Article),
            rec("b", 2001, "", DocType::Article),
            rec("c", 2001, "", DocType::Review),
        ]);
        let s = corpus_stats(&store);
        assert_eq!(s.by_doc_type.len(), 2);
        assert_eq!(s.by_doc_type[&DocType::Article], 2);
        assert_eq!(s.by_doc_type[&DocType::Review], 1);
        assert_eq!(s.by_doc_type.values().sum::<usize>(), s.records);
        assert_eq!(corpus_stats(&CorpusStore::default()), CorpusStats::default());
    }

    #[test]
    fn save_load_roundtrip() {
        let dir = tempfile::tempdir().unwrap();
        let store = CorpusStore::from_records(vec![rec("a", 2000, "x", DocType::Book)]);
        let (rp, mp) = (dir.path().join("c.jsonl"), dir.path().join("m.json"));
        store.save(&rp, &mp).unwrap();
        let first = fs::read(&rp).unwrap();
        let loaded = CorpusStore::load(&rp, &mp).unwrap();
        assert_eq!(loaded, store);
        loaded.save(&rp, &mp).unwrap();
        assert_eq!(fs::read(&rp).unwrap(), first);
    }
}
