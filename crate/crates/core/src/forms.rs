//! The validated form set consumed by every analysis.

use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::extract::NGramCandidate;

/// Validated forms, sorted by token sequence, with their extraction
/// aggregates.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValidatedFormSet {
    forms: Vec<NGramCandidate>,
}

impl ValidatedFormSet {
    pub fn new(mut forms: Vec<NGramCandidate>) -> Self {
        forms.sort_by(|a, b| a.terms.cmp(&b.terms));
        forms.dedup_by(|a, b| a.terms == b.terms);
        ValidatedFormSet { forms }
    }

    pub fn forms(&self) -> &[NGramCandidate] {
        &self.forms
    }

    pub fn len(&self) -> usize {
        self.forms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.forms.is_empty()
    }

    pub fn bigrams(&self) -> impl Iterator<Item = &NGramCandidate> {
        self.forms.iter().filter(|f| f.arity == 2)
    }

    pub fn trigrams(&self) -> impl Iterator<Item = &NGramCandidate> {
        self.forms.iter().filter(|f| f.arity == 3)
    }

    pub fn index_of(&self, term: &str) -> Option<usize> {
        let tokens: Vec<String> = term.split(' ').map(str::to_owned).collect();
        self.forms.binary_search_by(|f| f.terms.cmp(&tokens)).ok()
    }

    pub fn get(&self, term: &str) -> Option<&NGramCandidate> {
        self.index_of(term).map(|i| &self.forms[i])
    }

    /// doc_id -> indices of the forms it contains, ascending.
    pub fn doc_index(&self) -> BTreeMap<&str, Vec<usize>> {
        let mut index: BTreeMap<&str, Vec<usize>> = BTreeMap::new();
        for (i, f) in self.forms.iter().enumerate() {
            for doc in f.doc_set() {
                index.entry(doc).or_default().push(i);
            }
        }
        index
    }

    pub fn save_json(&self, path: &Path) -> Result<()> {
        let text = serde_json::to_string(self)? + "\n";
        fs::write(path, text).map_err(|e| Error::io(path, e))
    }

    pub fn load_json(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Ok(serde_json::from_str(&text)?)
    }

    /// Summary table: form, first_year, first_countries, n_publications.
    pub fn write_table_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["form", "first_year", "first_countries", "n_publications"])?;
        for f in &self.forms {
            w.write_record([
                f.term(),
                f.first_year.to_string(),
                f.first_countries.iter().cloned().collect::<Vec<_>>().join(";"),
                f.n_docs().to_string(),
            ])?;
        }
        w.flush().map_err(|e| Error::io("<forms csv>", e))?;
        Ok(())
    }
}

#[cfg(test)]
pub(crate) mod testing {
    use std::collections::{BTreeMap, BTreeSet};

    use crate::extract::NGramCandidate;

    /// A form over `(doc_id, year)` pairs with one occurrence per document.
    pub fn form(term: &str, docs: &[(&str, i32)]) -> NGramCandidate {
        let terms: Vec<String> = term.split(' ').map(str::to_owned).collect();
        let docs: BTreeMap<String, i32> = docs.iter().map(|(d, y)| (d.to_string(), *y)).collect();
        let mut per_year_counts = BTreeMap::new();
        for &y in docs.values() {
            *per_year_counts.entry(y).or_default() += 1;
        }
        NGramCandidate {
            arity: terms.len() as u8,
            occurrences: docs
                .keys()
                .map(|d| crate::extract::Occurrence {
                    doc_id: d.clone(),
                    field: crate::extract::FieldTag::Abstract,
                    position: 0,
                })
                .collect(),
            first_year: per_year_counts.keys().next().copied().unwrap_or(i32::MAX),
            terms,
            docs,
            per_year_counts,
            first_countries: BTreeSet::new(),
            origin: None,
        }
    }
}
