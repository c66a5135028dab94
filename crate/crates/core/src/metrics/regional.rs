//! Where forms were first published.

use std::collections::BTreeMap;

use crate::corpus::countries;
use crate::forms::ValidatedFormSet;

/// Number of forms whose first-year publications include each country.
pub fn forms_by_country(forms: &ValidatedFormSet) -> BTreeMap<String, usize> {
    let mut out = BTreeMap::new();
    for f in forms.forms() {
        for c in &f.first_countries {
            *out.entry(c.clone()).or_default() += 1;
        }
    }
    out
}

/// Like [`forms_by_country`] but per continent; a form counts once per
/// continent. Countries missing from the bundled table go to "Unknown".
pub fn forms_by_continent(forms: &ValidatedFormSet) -> BTreeMap<String, usize> {
    let table = countries();
    let mut out = BTreeMap::new();
    for f in forms.forms() {
        let mut seen: Vec<&str> = f
            .first_countries
            .iter()
            .map(|c| table.continent(c).unwrap_or("Unknown"))
            .collect();
        seen.sort_unstable();
        seen.dedup();
        for c in seen {
            *out.entry(c.to_owned()).or_default() += 1;
        }
    }
    out
}
