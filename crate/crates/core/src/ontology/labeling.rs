//! Multi-label type assignment and the type network.

use std::collections::{BTreeMap, BTreeSet};
use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const MAX_LABELS: usize = 8;
pub const DEFAULT_TYPE_COUNT: usize = 32;

/// Prefix marking a labeling row that names a cluster's default type.
pub const CLUSTER_PREFIX: &str = "cluster:";

/// Form -> its type labels (1 to 8 each).
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct TypeLabeling {
    labels: BTreeMap<String, BTreeSet<String>>,
}

fn check_size(term: &str, n: usize) -> Result<()> {
    if n == 0 || n > MAX_LABELS {
        return Err(Error::Labeling(format!("{term}: {n} labels, expected 1 to {MAX_LABELS}")));
    }
    Ok(())
}

impl TypeLabeling {
    pub fn get(&self, term: &str) -> Option<&BTreeSet<String>> {
        self.labels.get(term)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &BTreeSet<String>)> {
        self.labels.iter().map(|(k, v)| (k.as_str(), v))
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    /// Replaces the labels of `term`.
    pub fn set(&mut self, term: &str, labels: impl IntoIterator<Item = String>) -> Result<()> {
        let set: BTreeSet<String> = labels
            .into_iter()
            .map(|l| l.trim().to_owned())
            .filter(|l| !l.is_empty())
            .collect();
        check_size(term, set.len())?;
        self.labels.insert(term.to_owned(), set);
        Ok(())
    }

    pub fn types(&self) -> BTreeSet<&str> {
        self.labels.values().flatten().map(String::as_str).collect()
    }

    /// Same layout as the input file: form, label1..label8.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let mut header = vec!["form".to_string()];
        header.extend((1..=MAX_LABELS).map(|i| format!("label{i}")));
        w.write_record(&header)?;
        for (term, labels) in &self.labels {
            let mut row = vec![term.clone()];
            row.extend(labels.iter().cloned());
            row.resize(MAX_LABELS + 1, String::new());
            w.write_record(&row)?;
        }
        w.flush().map_err(|e| Error::io("<labeling csv>", e))?;
        Ok(())
    }
}

/// Rows of a labeling file: per-form overrides and per-cluster defaults.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct LabelingFile {
    pub forms: BTreeMap<String, Vec<String>>,
    pub clusters: BTreeMap<usize, String>,
}

impl LabelingFile {
    /// CSV with a header row; the first column is the form (or
    /// `cluster:<id>`), the rest are labels, blanks ignored.
    pub fn read<R: Read>(input: R) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new().flexible(true).from_reader(input);
        let mut file = LabelingFile::default();
        for row in rdr.records() {
            let row = row?;
            let Some(key) = row.get(0).map(str::trim).filter(|k| !k.is_empty()) else {
                continue;
            };
            let labels: Vec<String> = row
                .iter()
                .skip(1)
                .map(str::trim)
                .filter(|l| !l.is_empty())
                .map(str::to_owned)
                .collect();
            if labels.len() > MAX_LABELS {
                return Err(Error::Labeling(format!("{key}: {} labels, at most {MAX_LABELS}", labels.len())));
            }
            if let Some(id) = key.strip_prefix(CLUSTER_PREFIX) {
                let id: usize = id
                    .trim()
                    .parse()
                    .map_err(|_| Error::Labeling(format!("bad cluster id in {key}")))?;
                match labels.as_slice() {
                    [one] => {
                        file.clusters.insert(id, one.clone());
                    }
                    _ => return Err(Error::Labeling(format!("{key}: a cluster takes exactly one label"))),
                }
            } else if file.forms.insert(key.to_owned(), labels).is_some() {
                return Err(Error::Labeling(format!("{key}: listed twice")));
            }
        }
        Ok(file)
    }
}

/// Each form starts from its cluster's default label; a non-empty per-form
/// row replaces it. Forms ending with no label are left out. Unknown forms,
/// unknown types (when `universe` is given) and label sets outside 1..8 are
/// errors.
pub fn apply_labeling(
    terms: &[String],
    clustering: &[usize],
    file: &LabelingFile,
    universe: Option<&BTreeSet<String>>,
) -> Result<TypeLabeling> {
    if terms.len() != clustering.len() {
        return Err(Error::LengthMismatch(terms.len(), clustering.len()));
    }
    let known: BTreeSet<&str> = terms.iter().map(String::as_str).collect();
    if let Some(unknown) = file.forms.keys().find(|f| !known.contains(f.as_str())) {
        return Err(Error::Labeling(format!("unknown form {unknown}")));
    }
    if let Some(u) = universe {
        let used = file.forms.values().flatten().chain(file.clusters.values());
        if let Some(bad) = used.into_iter().find(|l| !u.contains(*l)) {
            return Err(Error::Labeling(format!("unknown type {bad}")));
        }
    }
    let mut out = TypeLabeling::default();
    for (term, &cluster) in terms.iter().zip(clustering) {
        let labels: Vec<String> = match file.forms.get(term) {
            Some(own) if !own.is_empty() => own.clone(),
            _ => file.clusters.get(&cluster).cloned().into_iter().collect(),
        };
        if !labels.is_empty() {
            out.set(term, labels)?;
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TypeNode {
    pub id: usize,
    pub label: String,
    pub freq: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FormNode {
    pub term: String,
    pub labels: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TypeEdge {
    pub a: String,
    pub b: String,
    pub weight: usize,
}

/// Types (inner ring), forms (outer ring) with their memberships, and
/// type-type edges weighted by the number of forms carrying both types.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct OntologyGraph {
    pub types: Vec<TypeNode>,
    pub forms: Vec<FormNode>,
    pub type_edges: Vec<TypeEdge>,
}

pub fn type_network(labeling: &TypeLabeling) -> OntologyGraph {
    let mut freq: BTreeMap<&str, usize> = BTreeMap::new();
    let mut pairs: BTreeMap<(&str, &str), usize> = BTreeMap::new();
    let mut forms = Vec::with_capacity(labeling.len());
    for (term, labels) in labeling.iter() {
        let list: Vec<&str> = labels.iter().map(String::as_str).collect();
        for (i, &a) in list.iter().enumerate() {
            *freq.entry(a).or_default() += 1;
            for &b in &list[i + 1..] {
                *pairs.entry((a, b)).or_default() += 1;
            }
        }
        forms.push(FormNode {
            term: term.to_owned(),
            labels: labels.iter().cloned().collect(),
        });
    }
    OntologyGraph {
        types: freq
            .iter()
            .enumerate()
            .map(|(id, (label, &freq))| TypeNode {
                id,
                label: (*label).to_owned(),
                freq,
            })
            .collect(),
        forms,
        type_edges: pairs
            .into_iter()
            .map(|((a, b), weight)| TypeEdge {
                a: a.to_owned(),
                b: b.to_owned(),
                weight,
            })
            .collect(),
    }
}
