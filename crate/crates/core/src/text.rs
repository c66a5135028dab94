//! Text normalization shared by the corpus filter and the n-gram extractor.

use unicode_normalization::{char::is_combining_mark, UnicodeNormalization};

/// Lowercases, folds diacritics and splits on anything that is not a letter
/// or digit. Hyphens and apostrophes split too, so "self-segregation" gives
/// `["self", "segregation"]`.
pub fn tokenize(text: &str) -> Vec<String> {
    let mut tokens = Vec::new();
    let mut current = String::new();
    for c in text.nfd().filter(|c| !is_combining_mark(*c)) {
        if c.is_alphanumeric() {
            current.extend(c.to_lowercase());
        } else if !current.is_empty() {
            tokens.push(std::mem::take(&mut current));
        }
    }
    if !current.is_empty() {
        tokens.push(current);
    }
    tokens
}

/// Token-boundary containment test: true when `anchor` appears as a whole
/// token of `text`.
pub fn contains_token(text: &str, anchor: &str) -> bool {
    tokenize(text).iter().any(|t| t == anchor)
}

/// Lowercased, diacritic-folded, whitespace-collapsed form of `text`, with
/// punctuation kept. Used for journal and country names.
pub fn fold(text: &str) -> String {
    let folded: String = text
        .nfd()
        .filter(|c| !is_combining_mark(*c))
        .flat_map(char::to_lowercase)
        .collect();
    folded.split_whitespace().collect::<Vec<_>>().join(" ")
}
