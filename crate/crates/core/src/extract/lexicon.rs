//! Noise lexicon applied to n-gram qualifiers.

use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::path::Path;

use crate::error::{Error, Result};

/// Category names, in the order they are shipped.
pub const CATEGORIES: [&str; 7] = [
    "function_words",
    "conjunctive_adverbs",
    "subordinating_conjunctions",
    "auxiliary_verbs",
    "common_verbs",
    "common_adverbs",
    "jargon",
];

const BUNDLED: [(&str, &str); 7] = [
    ("function_words", include_str!("../../data/lexicon/function_words.txt")),
    ("conjunctive_adverbs", include_str!("../../data/lexicon/conjunctive_adverbs.txt")),
    (
        "subordinating_conjunctions",
        include_str!("../../data/lexicon/subordinating_conjunctions.txt"),
    ),
    ("auxiliary_verbs", include_str!("../../data/lexicon/auxiliary_verbs.txt")),
    ("common_verbs", include_str!("../../data/lexicon/common_verbs.txt")),
    ("common_adverbs", include_str!("../../data/lexicon/common_adverbs.txt")),
    ("jargon", include_str!("../../data/lexicon/jargon.txt")),
];

/// Named sets of tokens that disqualify an n-gram qualifier.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct StopLexicon {
    categories: BTreeMap<String, BTreeSet<String>>,
}

fn parse_entries(category: &str, text: &str) -> Result<BTreeSet<String>> {
    let mut out = BTreeSet::new();
    for line in text.lines() {
        let entry = line.trim();
        if entry.is_empty() || entry.starts_with('#') {
            continue;
        }
        if entry.chars().any(|c| c.is_whitespace() || c.is_uppercase()) {
            return Err(Error::InvalidArgument(format!(
                "lexicon category {category}: entry {entry:?} must be one lowercase token"
            )));
        }
        out.insert(entry.to_owned());
    }
    Ok(out)
}

impl StopLexicon {
    /// The lexicon compiled into the crate.
    pub fn bundled() -> Self {
        let mut lex = StopLexicon::default();
        for (name, text) in BUNDLED {
            let entries = parse_entries(name, text).expect("bundled lexicon is well formed");
            lex.categories.insert(name.to_owned(), entries);
        }
        lex
    }

    /// Loads every `<category>.txt` in `dir`; one token per line, `#` starts
    /// a comment line.
    pub fn load_dir(dir: &Path) -> Result<Self> {
        let mut lex = StopLexicon::default();
        let entries = fs::read_dir(dir).map_err(|e| Error::io(dir, e))?;
        let mut paths: Vec<_> = entries
            .filter_map(|e| e.ok().map(|e| e.path()))
            .filter(|p| p.extension().is_some_and(|x| x == "txt"))
            .collect();
        paths.sort();
        for path in paths {
            let name = path.file_stem().unwrap_or_default().to_string_lossy().into_owned();
            let text = fs::read_to_string(&path).map_err(|e| Error::io(&path, e))?;
            lex.categories.insert(name.clone(), parse_entries(&name, &text)?);
        }
        Ok(lex)
    }

    pub fn from_categories<I, S>(categories: I) -> Result<Self>
    where
        I: IntoIterator<Item = (S, Vec<S>)>,
        S: AsRef<str>,
    {
        let mut lex = StopLexicon::default();
        for (name, tokens) in categories {
            let joined = tokens.iter().map(AsRef::as_ref).collect::<Vec<_>>().join("\n");
            let set = parse_entries(name.as_ref(), &joined)?;
            lex.categories.insert(name.as_ref().to_owned(), set);
        }
        Ok(lex)
    }

    /// True when `token` belongs to no category.
    pub fn passes(&self, token: &str) -> bool {
        !self.categories.values().any(|set| set.contains(token))
    }

    /// First category (in name order) that holds `token`.
    pub fn category_of(&self, token: &str) -> Option<&str> {
        self.categories
            .iter()
            .find(|(_, set)| set.contains(token))
            .map(|(name, _)| name.as_str())
    }

    pub fn categories(&self) -> impl Iterator<Item = (&str, &BTreeSet<String>)> {
        self.categories.iter().map(|(k, v)| (k.as_str(), v))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bundled_has_every_category() {
        let lex = StopLexicon::bundled();
        let names: Vec<&str> = lex.categories().map(|(n, _)| n).collect();
        for c in CATEGORIES {
            assert!(names.contains(&c), "{c}");
        }
        for word in ["whether", "i", "you", "to", "moreover", "although", "would", "know", "actually", "fig", "et", "al"] {
            assert!(!lex.passes(word), "{word} should be filtered");
        }
        for word in ["racial", "residential", "gender", "occupational", "self", "de", "facto", "segregation"] {
            assert!(lex.passes(word), "{word} should pass");
        }
    }

    #[test]
    fn rejects_multiword_entries() {
        assert!(StopLexicon::from_categories([("jargon", vec!["et al"])]).is_err());
        assert!(StopLexicon::from_categories([("jargon", vec!["Fig"])]).is_err());
    }
}
