//! Intersectional forms and co-occurrences over social positions.

use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::entropy::shannon_entropy;
use super::series::YearSeries;
use crate::error::{Error, Result};
use crate::forms::ValidatedFormSet;

/// The seven position categories, in bundled-file order.
pub const POSITIONS: [&str; 7] = [
    "sex_gender_sexual_orientation",
    "race_ethnicity",
    "ses_income",
    "age_generation",
    "immigration_nationality",
    "health_disability",
    "religion",
];

/// Maps qualifier tokens to position categories; each token belongs to at
/// most one category.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PositionLexicon {
    categories: BTreeMap<String, BTreeSet<String>>,
    by_token: BTreeMap<String, String>,
}

impl PositionLexicon {
    pub fn bundled() -> Self {
        Self::parse(include_str!("../../data/positions.tsv")).expect("bundled position lexicon is valid")
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text)
    }

    /// Tab-separated `category<TAB>space separated tokens`; `#` lines are
    /// comments.
    pub fn parse(text: &str) -> Result<Self> {
        let mut categories: BTreeMap<String, BTreeSet<String>> = BTreeMap::new();
        for line in text.lines().map(str::trim).filter(|l| !l.is_empty() && !l.starts_with('#')) {
            let (name, tokens) = line
                .split_once('\t')
                .ok_or_else(|| Error::InvalidArgument(format!("position line without tab: {line}")))?;
            categories
                .entry(name.trim().to_owned())
                .or_default()
                .extend(tokens.split_whitespace().map(str::to_lowercase));
        }
        Self::from_categories(categories)
    }

    pub fn from_categories(categories: BTreeMap<String, BTreeSet<String>>) -> Result<Self> {
        let mut by_token = BTreeMap::new();
        for (name, tokens) in &categories {
            if tokens.is_empty() {
                return Err(Error::InvalidArgument(format!("position category {name} is empty")));
            }
            for t in tokens {
                if let Some(prev) = by_token.insert(t.clone(), name.clone()) {
                    return Err(Error::InvalidArgument(format!("token {t} is in both {prev} and {name}")));
                }
            }
        }
        if categories.is_empty() {
            return Err(Error::InvalidArgument("position lexicon has no categories".into()));
        }
        Ok(PositionLexicon { categories, by_token })
    }

    pub fn categories(&self) -> impl Iterator<Item = &str> {
        self.categories.keys().map(String::as_str)
    }

    pub fn category_of(&self, token: &str) -> Option<&str> {
        self.by_token.get(token).map(String::as_str)
    }

    pub fn categories_of<'a>(&'a self, tokens: &[String]) -> BTreeSet<&'a str> {
        tokens.iter().filter_map(|t| self.category_of(t)).collect()
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct IntersectionalityReport {
    /// Forms whose qualifiers span two or more categories.
    pub intersectional_forms: BTreeSet<String>,
    /// Documents whose forms jointly span two or more categories, per year.
    pub intersectional_works: BTreeMap<i32, usize>,
    /// Intersectional form pairs co-occurring in a document, per year.
    pub co_counts: BTreeMap<i32, usize>,
    /// Per year, counts per unordered category pair `a|b` (a < b).
    pub pair_counts: BTreeMap<i32, BTreeMap<String, usize>>,
    /// Per year, entropy of `pair_counts`.
    pub entropy: YearSeries,
}

/// A co-occurring pair of forms is intersectional when both carry a
/// position and together they cover at least two categories. Its
/// contribution goes to every unordered pair of distinct categories drawn
/// one from each form.
pub fn intersectionality(forms: &ValidatedFormSet, lexicon: &PositionLexicon) -> Result<IntersectionalityReport> {
    let cats: Vec<BTreeSet<&str>> = forms.forms().iter().map(|f| lexicon.categories_of(f.qualifiers())).collect();
    let mut report = IntersectionalityReport::default();
    for (f, c) in forms.forms().iter().zip(&cats) {
        if c.len() >= 2 {
            report.intersectional_forms.insert(f.term());
        }
    }

    let mut years: BTreeMap<&str, i32> = BTreeMap::new();
    for f in forms.forms() {
        years.extend(f.docs.iter().map(|(d, &y)| (d.as_str(), y)));
    }
    for (doc, members) in forms.doc_index() {
        let year = years[doc];
        let union: BTreeSet<&str> = members.iter().flat_map(|&i| cats[i].iter().copied()).collect();
        if union.len() >= 2 {
            *report.intersectional_works.entry(year).or_default() += 1;
        }
        for (k, &i) in members.iter().enumerate() {
            for &j in &members[k + 1..] {
                let (a, b) = (&cats[i], &cats[j]);
                if a.is_empty() || b.is_empty() || a.union(b).count() < 2 {
                    continue;
                }
                *report.co_counts.entry(year).or_default() += 1;
                let mut pairs = BTreeSet::new();
                for &x in a {
                    for &y in b {
                        if x != y {
                            pairs.insert(if x < y { (x, y) } else { (y, x) });
                        }
                    }
                }
                let year_pairs = report.pair_counts.entry(year).or_default();
                for (x, y) in pairs {
                    *year_pairs.entry(format!("{x}|{y}")).or_default() += 1;
                }
            }
        }
    }
    let mut points = Vec::new();
    for (&year, counts) in &report.pair_counts {
        if counts.values().any(|&c| c > 0) {
            points.push((year, shannon_entropy(counts.values().map(|&c| c as f64))?));
        }
    }
    report.entropy = YearSeries::new(points)?;
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::forms::testing::form;

    #[test]
    fn bundled_is_disjoint_and_complete() {
        let lex = PositionLexicon::bundled();
        assert_eq!(lex.categories().collect::<BTreeSet<_>>(), POSITIONS.into_iter().collect());
        assert_eq!(lex.category_of("racialized"), Some("race_ethnicity"));
        assert_eq!(lex.category_of("economic"), Some("ses_income"));
        assert_eq!(lex.category_of("residential"), None);
    }

    #[test]
    fn overlapping_categories_rejected() {
        assert!(PositionLexicon::parse("a\tx y\nb\ty z\n").is_err());
        assert!(PositionLexicon::parse("").is_err());
    }

    #[test]
    fn form_and_work_flags() {
        let lex = PositionLexicon::bundled();
        let set = ValidatedFormSet::new(vec![
            form("racialized economic segregation", &[("d0", 1999)]),
            form("racial segregation", &[("d1", 2000), ("d2", 2001)]),
            form("gender segregation", &[("d1", 2000), ("d3", 2001)]),
            form("residential segregation", &[("d2", 2001)]),
        ]);
        let r = intersectionality(&set, &lex).unwrap();
        assert_eq!(r.intersectional_forms, BTreeSet::from(["racialized economic segregation".to_string()]));
        assert_eq!(r.intersectional_works, BTreeMap::from([(1999, 1), (2000, 1)]));
        assert_eq!(r.co_counts, BTreeMap::from([(2000, 1)]));
        assert_eq!(r.pair_counts[&2000]["race_ethnicity|sex_gender_sexual_orientation"], 1);
        assert_eq!(r.entropy.points(), &[(2000, 0.0)]);
    }

    #[test]
    fn pair_entropy_over_category_pairs() {
        let lex = PositionLexicon::bundled();
        let set = ValidatedFormSet::new(vec![
            form("racial segregation", &[("d1", 2000), ("d2", 2000)]),
            form("gender segregation", &[("d1", 2000)]),
            form("income segregation", &[("d2", 2000)]),
        ]);
        let r = intersectionality(&set, &lex).unwrap();
        assert_eq!(r.co_counts[&2000], 2);
        assert!((r.entropy.get(2000).unwrap() - 2f64.ln()).abs() < 1e-15);
    }
}
