//! Scalar and time-series indices over validated forms.

mod disciplinarity;
mod entropy;
mod intersectionality;
mod precedence;
mod regional;
mod series;
mod spearman;

use std::collections::BTreeMap;

pub use disciplinarity::{
    classify_all, classify_origin_vs_dominant, discipline_counts, dominant_discipline,
    multidisciplinarity_per_year, transdisciplinarity_of_form, OriginClass, DEFAULT_DISCIPLINE_UNIVERSE,
};
pub use entropy::{shannon_entropy, Distribution};
pub use intersectionality::{intersectionality, IntersectionalityReport, PositionLexicon, POSITIONS};
pub use precedence::{trigram_precedence_stats, PrecedenceStats};
pub use regional::{forms_by_continent, forms_by_country};
pub use series::{annual_growth_rate, exp_fit, moving_average, ExpFit, YearSeries};
pub use spearman::{spearman, Correlation};

use crate::error::Result;
use crate::forms::ValidatedFormSet;

/// Per year, entropy of that year's publications across forms. A
/// publication counts once for each distinct form it contains.
pub fn diversity_per_year(forms: &ValidatedFormSet) -> Result<YearSeries> {
    let mut by_year: BTreeMap<i32, Vec<f64>> = BTreeMap::new();
    for (i, f) in forms.forms().iter().enumerate() {
        for (&year, &count) in &f.per_year_counts {
            let row = by_year.entry(year).or_insert_with(|| vec![0.0; forms.len()]);
            row[i] += count as f64;
        }
    }
    let mut points = Vec::with_capacity(by_year.len());
    for (year, weights) in by_year {
        points.push((year, shannon_entropy(weights)?));
    }
    YearSeries::new(points)
}

/// Number of distinct forms published in each year.
pub fn forms_per_year(forms: &ValidatedFormSet) -> YearSeries {
    let mut counts: BTreeMap<i32, f64> = BTreeMap::new();
    for f in forms.forms() {
        for &year in f.per_year_counts.keys() {
            *counts.entry(year).or_default() += 1.0;
        }
    }
    YearSeries::from_map(&counts)
}

/// Number of forms first published in each year.
pub fn new_forms_per_year(forms: &ValidatedFormSet) -> YearSeries {
    let mut counts: BTreeMap<i32, f64> = BTreeMap::new();
    for f in forms.forms().iter().filter(|f| !f.docs.is_empty()) {
        *counts.entry(f.first_year).or_default() += 1.0;
    }
    YearSeries::from_map(&counts)
}

/// Number of documents per year containing at least one form.
pub fn publications_per_year(forms: &ValidatedFormSet) -> YearSeries {
    let mut docs: BTreeMap<&str, i32> = BTreeMap::new();
    for f in forms.forms() {
        for (id, &year) in &f.docs {
            docs.insert(id, year);
        }
    }
    let mut counts: BTreeMap<i32, f64> = BTreeMap::new();
    for year in docs.into_values() {
        *counts.entry(year).or_default() += 1.0;
    }
    YearSeries::from_map(&counts)
}
