//! Discipline-based indices over the journal classification codes of each
//! publication.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::entropy::shannon_entropy;
use super::series::YearSeries;
use crate::corpus::CorpusStore;
use crate::error::{Error, Result};
use crate::extract::NGramCandidate;
use crate::forms::ValidatedFormSet;

pub const DEFAULT_DISCIPLINE_UNIVERSE: usize = 169;

fn distinct_fields(fields: &[String]) -> impl Iterator<Item = &str> {
    let mut seen: Vec<&str> = fields.iter().map(String::as_str).collect();
    seen.sort_unstable();
    seen.dedup();
    seen.into_iter()
}

/// Per year, entropy of form-publications across disciplines. Each
/// document counts once per (form, distinct discipline) pair. Years without
/// any classified publication are omitted.
pub fn multidisciplinarity_per_year(forms: &ValidatedFormSet, store: &CorpusStore) -> Result<YearSeries> {
    let mut by_year: BTreeMap<i32, BTreeMap<&str, u64>> = BTreeMap::new();
    for f in forms.forms() {
        for id in f.doc_set() {
            let Some(r) = store.get(id) else { continue };
            for field in distinct_fields(&r.asjc_fields) {
                *by_year.entry(r.year).or_default().entry(field).or_default() += 1;
            }
        }
    }
    let mut points = Vec::with_capacity(by_year.len());
    for (year, counts) in by_year {
        points.push((year, shannon_entropy(counts.values().map(|&c| c as f64))?));
    }
    YearSeries::new(points)
}

/// Cumulative publication counts of a form per discipline, optionally
/// restricted to documents published up to `up_to_year`.
pub fn discipline_counts(form: &NGramCandidate, store: &CorpusStore, up_to_year: Option<i32>) -> BTreeMap<String, u64> {
    let mut counts: BTreeMap<String, u64> = BTreeMap::new();
    for (id, &year) in &form.docs {
        if up_to_year.is_some_and(|y| year > y) {
            continue;
        }
        let Some(r) = store.get(id) else { continue };
        for field in distinct_fields(&r.asjc_fields) {
            *counts.entry(field.to_owned()).or_default() += 1;
        }
    }
    counts
}

/// Entropy of the form's discipline distribution up to `up_to_year`,
/// divided by `ln(universe)`.
pub fn transdisciplinarity_of_form(
    form: &NGramCandidate,
    store: &CorpusStore,
    up_to_year: i32,
    universe: usize,
) -> Result<f64> {
    if universe < 2 {
        return Err(Error::InvalidArgument(format!("discipline universe of {universe} is too small")));
    }
    let counts = discipline_counts(form, store, Some(up_to_year));
    if counts.len() > universe {
        return Err(Error::InvalidArgument(format!(
            "{} disciplines observed for {} but the universe has {universe}",
            counts.len(),
            form.term()
        )));
    }
    let h = shannon_entropy(counts.values().map(|&c| c as f64))?;
    Ok((h / (universe as f64).ln()).clamp(0.0, 1.0))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OriginClass {
    SameAsOrigin,
    DifferentFromOrigin,
    MultipleDominant,
    NoData,
}

fn argmax(counts: &BTreeMap<String, u64>) -> Vec<&str> {
    let Some(&best) = counts.values().max() else {
        return Vec::new();
    };
    counts.iter().filter(|(_, &c)| c == best).map(|(k, _)| k.as_str()).collect()
}

pub fn classify_origin_vs_dominant(form: &NGramCandidate, store: &CorpusStore) -> OriginClass {
    let counts = discipline_counts(form, store, None);
    let top = argmax(&counts);
    match (top.as_slice(), form.origin_discipline()) {
        ([], _) | (_, None) => OriginClass::NoData,
        ([only], Some(origin)) if *only == origin => OriginClass::SameAsOrigin,
        ([_], Some(_)) => OriginClass::DifferentFromOrigin,
        _ => OriginClass::MultipleDominant,
    }
}

/// The dominant discipline, with ties resolved to the origin discipline
/// when it is among the tied ones, else to the smallest code.
pub fn dominant_discipline(form: &NGramCandidate, store: &CorpusStore) -> Option<String> {
    let counts = discipline_counts(form, store, None);
    let top = argmax(&counts);
    let origin = form.origin_discipline();
    match origin {
        Some(o) if top.contains(&o) => Some(o.to_owned()),
        _ => top.first().map(|s| (*s).to_owned()),
    }
}

/// Number of forms in each class; the counts sum to `forms.len()`.
pub fn classify_all(forms: &ValidatedFormSet, store: &CorpusStore) -> BTreeMap<OriginClass, usize> {
    let classes = crate::par::map(forms.forms(), |f| classify_origin_vs_dominant(f, store));
    let mut out = BTreeMap::new();
    for c in classes {
        *out.entry(c).or_default() += 1;
    }
    out
}
