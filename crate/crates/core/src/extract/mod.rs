//! Bigram/trigram candidates ending in an anchor token.
//!
//! Each field of a record (title, abstract, every keyword entry) is a
//! separate token stream, so n-grams never span fields. At each anchor
//! occurrence the extractor prefers the trigram when both preceding tokens
//! pass the lexicon, falls back to the bigram when only the nearer one does,
//! and records nothing otherwise. A trigram occurrence therefore never also
//! counts as its embedded bigram.

mod lexicon;

pub use lexicon::{StopLexicon, CATEGORIES};

use std::collections::{BTreeMap, BTreeSet};
use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::corpus::{CorpusStore, DocumentRecord};
use crate::error::{Error, Result};
use crate::par;
use crate::text;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FieldTag {
    Title,
    Abstract,
    /// Index of the keyword entry within the record.
    Keyword(u32),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FieldTokens {
    pub tag: FieldTag,
    pub tokens: Vec<String>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct TokenStream {
    pub fields: Vec<FieldTokens>,
}

impl TokenStream {
    pub fn total_tokens(&self) -> usize {
        self.fields.iter().map(|f| f.tokens.len()).sum()
    }
}

/// Splits a record into per-field token streams. Empty fields are kept so
/// that field tags stay aligned with the record.
pub fn tokenize(record: &DocumentRecord) -> TokenStream {
    let mut fields = vec![
        FieldTokens {
            tag: FieldTag::Title,
            tokens: text::tokenize(&record.title),
        },
        FieldTokens {
            tag: FieldTag::Abstract,
            tokens: text::tokenize(&record.abstract_text),
        },
    ];
    for (i, k) in record.keywords.iter().enumerate() {
        fields.push(FieldTokens {
            tag: FieldTag::Keyword(i as u32),
            tokens: text::tokenize(k),
        });
    }
    TokenStream { fields }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Occurrence {
    pub doc_id: String,
    pub field: FieldTag,
    /// Token index of the anchor within its field.
    pub position: u32,
}

/// Earliest record carrying discipline codes, and its primary code.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Origin {
    pub year: i32,
    pub doc_id: String,
    pub discipline: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NGramCandidate {
    /// Qualifier tokens followed by the anchor.
    pub terms: Vec<String>,
    pub arity: u8,
    pub occurrences: Vec<Occurrence>,
    /// doc_id -> publication year, for every document with an occurrence.
    pub docs: BTreeMap<String, i32>,
    /// year -> number of documents.
    pub per_year_counts: BTreeMap<i32, usize>,
    pub first_year: i32,
    pub first_countries: BTreeSet<String>,
    pub origin: Option<Origin>,
}

impl NGramCandidate {
    fn empty(terms: Vec<String>) -> Self {
        NGramCandidate {
            arity: terms.len() as u8,
            terms,
            occurrences: Vec::new(),
            docs: BTreeMap::new(),
            per_year_counts: BTreeMap::new(),
            first_year: i32::MAX,
            first_countries: BTreeSet::new(),
            origin: None,
        }
    }

    /// Tokens joined by single spaces.
    pub fn term(&self) -> String {
        self.terms.join(" ")
    }

    pub fn qualifiers(&self) -> &[String] {
        &self.terms[..self.terms.len() - 1]
    }

    pub fn n_docs(&self) -> usize {
        self.docs.len()
    }

    pub fn n_occurrences(&self) -> usize {
        self.occurrences.len()
    }

    pub fn doc_set(&self) -> impl Iterator<Item = &str> {
        self.docs.keys().map(String::as_str)
    }

    pub fn origin_discipline(&self) -> Option<&str> {
        self.origin.as_ref().map(|o| o.discipline.as_str())
    }
}

/// The n-gram (if any) captured at `tokens[pos]`, which must be the anchor.
pub fn ngram_at<'a>(tokens: &'a [String], pos: usize, lexicon: &StopLexicon) -> Option<&'a [String]> {
    if pos >= 2 && lexicon.passes(&tokens[pos - 2]) && lexicon.passes(&tokens[pos - 1]) {
        Some(&tokens[pos - 2..=pos])
    } else if pos >= 1 && lexicon.passes(&tokens[pos - 1]) {
        Some(&tokens[pos - 1..=pos])
    } else {
        None
    }
}

type Hits = Vec<(Vec<String>, Occurrence)>;

fn document_hits(record: &DocumentRecord, anchor: &str, lexicon: &StopLexicon) -> Hits {
    let mut hits = Vec::new();
    for field in tokenize(record).fields {
        for (pos, tok) in field.tokens.iter().enumerate() {
            if tok != anchor {
                continue;
            }
            if let Some(gram) = ngram_at(&field.tokens, pos, lexicon) {
                hits.push((
                    gram.to_vec(),
                    Occurrence {
                        doc_id: record.doc_id.clone(),
                        field: field.tag,
                        position: pos as u32,
                    },
                ));
            }
        }
    }
    hits
}

/// Mines candidates over the whole store and fills their aggregates.
/// Output is sorted by token sequence.
pub fn extract_candidates(
    store: &CorpusStore,
    anchor: &str,
    lexicon: &StopLexicon,
) -> Result<Vec<NGramCandidate>> {
    if anchor.is_empty() || text::tokenize(anchor) != [anchor] {
        return Err(Error::InvalidArgument(format!(
            "anchor {anchor:?} must be a single lowercase token"
        )));
    }
    if let Some(cat) = lexicon.category_of(anchor) {
        return Err(Error::InvalidArgument(format!(
            "anchor {anchor:?} is listed in lexicon category {cat}"
        )));
    }
    let per_doc = par::map(store.records(), |r| document_hits(r, anchor, lexicon));

    // Store order is doc_id order, so the merge is schedule-independent.
    let mut by_term: BTreeMap<Vec<String>, NGramCandidate> = BTreeMap::new();
    for hits in per_doc {
        for (terms, occ) in hits {
            by_term
                .entry(terms)
                .or_insert_with_key(|t| NGramCandidate::empty(t.clone()))
                .occurrences
                .push(occ);
        }
    }
    let mut candidates: Vec<NGramCandidate> = by_term.into_values().collect();
    aggregate_firsts(&mut candidates, store);
    Ok(candidates)
}

/// Recomputes document sets, per-year counts, first year, first countries
/// and origin discipline from each candidate's occurrences.
pub fn aggregate_firsts(candidates: &mut [NGramCandidate], store: &CorpusStore) {
    for cand in candidates.iter_mut() {
        cand.occurrences.sort();
        cand.occurrences.dedup();
        cand.docs.clear();
        for occ in &cand.occurrences {
            match store.get(&occ.doc_id) {
                Some(r) => {
                    cand.docs.insert(r.doc_id.clone(), r.year);
                }
                None => log::warn!("{}: document {} not in store", cand.term(), occ.doc_id),
            }
        }
        cand.per_year_counts.clear();
        for &year in cand.docs.values() {
            *cand.per_year_counts.entry(year).or_default() += 1;
        }
        cand.first_year = cand.per_year_counts.keys().next().copied().unwrap_or(i32::MAX);
        cand.first_countries = cand
            .docs
            .iter()
            .filter(|(_, &y)| y == cand.first_year)
            .filter_map(|(id, _)| store.get(id))
            .flat_map(|r| r.countries.iter().cloned())
            .collect();
        cand.origin = cand
            .docs
            .iter()
            .filter_map(|(id, &year)| {
                let r = store.get(id)?;
                let code = r.asjc_fields.first()?;
                Some(Origin {
                    year,
                    doc_id: id.clone(),
                    discipline: code.clone(),
                })
            })
            .min_by(|a, b| (a.year, &a.doc_id).cmp(&(b.year, &b.doc_id)));
    }
}

fn merge_twins(winner: NGramCandidate, other: NGramCandidate) -> NGramCandidate {
    let first_year = winner.first_year.min(other.first_year);
    let mut merged = winner;
    let mut first_countries = BTreeSet::new();
    for c in [&merged, &other] {
        if c.first_year == first_year {
            first_countries.extend(c.first_countries.iter().cloned());
        }
    }
    merged.occurrences.extend(other.occurrences);
    merged.occurrences.sort();
    merged.occurrences.dedup();
    merged.docs.extend(other.docs);
    merged.per_year_counts.clear();
    for &y in merged.docs.values() {
        *merged.per_year_counts.entry(y).or_default() += 1;
    }
    merged.first_year = first_year;
    merged.first_countries = first_countries;
    merged.origin = match (merged.origin.take(), other.origin) {
        (Some(a), Some(b)) => Some(if (b.year, &b.doc_id) < (a.year, &a.doc_id) { b } else { a }),
        (a, b) => a.or(b),
    };
    merged
}

/// Merges trigrams whose qualifiers are each other's reversal. The order
/// published first wins; equal first years go to the order with more
/// occurrences, then to the lexicographically smaller order.
pub fn canonicalize_reversed(candidates: Vec<NGramCandidate>) -> Vec<NGramCandidate> {
    let mut out: BTreeMap<Vec<String>, NGramCandidate> = BTreeMap::new();
    let mut twins: BTreeMap<Vec<String>, Vec<NGramCandidate>> = BTreeMap::new();
    for cand in candidates {
        let q = cand.qualifiers();
        if cand.arity == 3 && q[0] != q[1] {
            let mut key = q.to_vec();
            key.sort();
            key.push(cand.terms[2].clone());
            twins.entry(key).or_default().push(cand);
        } else {
            out.insert(cand.terms.clone(), cand);
        }
    }
    for (_, mut group) in twins {
        group.sort_by(|a, b| {
            a.first_year
                .cmp(&b.first_year)
                .then_with(|| b.n_occurrences().cmp(&a.n_occurrences()))
                .then_with(|| a.terms.cmp(&b.terms))
        });
        let mut iter = group.into_iter();
        let mut merged = iter.next().expect("group is non-empty");
        for other in iter {
            merged = merge_twins(merged, other);
        }
        out.insert(merged.terms.clone(), merged);
    }
    out.into_values().collect()
}

/// Candidate table: term, arity, n_docs, n_occurrences, first_year,
/// first_countries (`;`-joined), origin_discipline.
pub fn write_candidates_csv<W: Write>(out: W, candidates: &[NGramCandidate]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record([
        "term",
        "arity",
        "n_docs",
        "n_occurrences",
        "first_year",
        "first_countries",
        "origin_discipline",
    ])?;
    for c in candidates {
        w.write_record([
            c.term(),
            c.arity.to_string(),
            c.n_docs().to_string(),
            c.n_occurrences().to_string(),
            c.first_year.to_string(),
            c.first_countries.iter().cloned().collect::<Vec<_>>().join(";"),
            c.origin_discipline().unwrap_or("").to_owned(),
        ])?;
    }
    w.flush().map_err(|e| Error::io("<candidates csv>", e))?;
    Ok(())
}
