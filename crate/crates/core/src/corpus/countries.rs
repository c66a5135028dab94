//! Country names from affiliation strings.
//!
//! The last comma-separated segment of an affiliation is matched against a
//! bundled country list (with a small alias table). Matching is on the
//! folded form, first exactly, then as a trailing token run so that segments
//! like "MA 02138 United States" still resolve.

use std::collections::BTreeMap;
use std::sync::OnceLock;

use crate::text::{fold, tokenize};

const COUNTRIES_TSV: &str = include_str!("../../data/countries.tsv");
const ALIASES_TSV: &str = include_str!("../../data/country_aliases.tsv");

#[derive(Debug)]
pub struct CountryTable {
    /// folded name or alias -> canonical country name
    lookup: BTreeMap<String, &'static str>,
    /// token form of every key, longest first, for trailing matches
    token_keys: Vec<(Vec<String>, &'static str)>,
    continents: BTreeMap<&'static str, &'static str>,
}

fn rows(tsv: &'static str) -> impl Iterator<Item = (&'static str, &'static str)> {
    tsv.lines()
        .filter(|l| !l.starts_with('#') && !l.trim().is_empty())
        .filter_map(|l| l.split_once('\t'))
}

impl CountryTable {
    fn bundled() -> Self {
        let mut lookup = BTreeMap::new();
        let mut continents = BTreeMap::new();
        for (name, continent) in rows(COUNTRIES_TSV) {
            lookup.insert(fold(name), name);
            continents.insert(name, continent);
        }
        for (alias, name) in rows(ALIASES_TSV) {
            let canonical = continents
                .get_key_value(name)
                .map(|(k, _)| *k)
                .expect("alias table points at a listed country");
            lookup.insert(fold(alias), canonical);
        }
        let mut token_keys: Vec<(Vec<String>, &'static str)> = lookup
            .iter()
            .map(|(k, v)| (tokenize(k), *v))
            .filter(|(t, _)| !t.is_empty())
            .collect();
        token_keys.sort_by(|a, b| b.0.len().cmp(&a.0.len()).then_with(|| a.0.cmp(&b.0)));
        CountryTable {
            lookup,
            token_keys,
            continents,
        }
    }

    /// Resolves a free-text segment to a canonical country name.
    pub fn resolve(&self, segment: &str) -> Option<&'static str> {
        let folded = fold(segment.trim().trim_end_matches('.'));
        if let Some(name) = self.lookup.get(&folded) {
            return Some(name);
        }
        let tokens = tokenize(&folded);
        self.token_keys
            .iter()
            .find(|(key, _)| tokens.len() > key.len() && tokens.ends_with(key))
            .map(|(_, name)| *name)
    }

    /// Country named by the trailing segment of one affiliation string.
    pub fn from_affiliation(&self, affiliation: &str) -> Option<&'static str> {
        let last = affiliation.rsplit(',').next()?;
        self.resolve(last)
    }

    pub fn continent(&self, country: &str) -> Option<&'static str> {
        self.continents.get(country).copied()
    }
}

/// The bundled table, built once.
pub fn countries() -> &'static CountryTable {
    static TABLE: OnceLock<CountryTable> = OnceLock::new();
    TABLE.get_or_init(CountryTable::bundled)
}
