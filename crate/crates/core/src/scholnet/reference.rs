//! Matching keys for cited-reference strings.

use std::sync::OnceLock;

use regex::Regex;
use serde::{Deserialize, Serialize};

use crate::text::tokenize;

const TITLE_TOKENS: usize = 5;

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct ReferenceKey {
    pub key: String,
    pub surname: Option<String>,
    pub year: Option<i32>,
    pub title_prefix: Vec<String>,
    /// False when the key is the normalized full string.
    pub parsed: bool,
}

struct Patterns {
    year_paren: Regex,
    bare_year: Regex,
    surname: Regex,
    author: Regex,
}

fn patterns() -> &'static Patterns {
    static P: OnceLock<Patterns> = OnceLock::new();
    P.get_or_init(|| Patterns {
        year_paren: Regex::new(r"\((1[5-9]\d\d|20\d\d)[a-z]?\)").unwrap(),
        bare_year: Regex::new(r"\b(1[5-9]\d\d|20\d\d)\b").unwrap(),
        surname: Regex::new(r"^\s*([\p{L}][\p{L}'’\-]*)").unwrap(),
        author: Regex::new(r"^(&\s*)?[\p{L}'’\- ]+,?\s+(\p{Lu}\.\s*)+(-\s*\p{Lu}\.\s*)*$|^et al\.?$").unwrap(),
    })
}

/// Title text of an author-date reference: everything after "(YYYY)."
/// up to the next sentence end.
fn author_date_title(after: &str) -> Option<&str> {
    let rest = after.trim_start().strip_prefix('.')?.trim_start();
    let end = rest.find(". ").or_else(|| rest.find('?').map(|i| i + 1)).unwrap_or(rest.len());
    let title = rest[..end].trim();
    (!title.is_empty()).then_some(title)
}

/// Title of a comma-separated export reference: the first segment after
/// the leading author segments.
fn export_title(raw: &str) -> Option<String> {
    let p = patterns();
    raw.split(", ")
        .map(str::trim)
        .find(|seg| !seg.is_empty() && !p.author.is_match(seg) && !p.year_paren.is_match(seg))
        .map(str::to_owned)
}

/// Builds `surname|year|t1|..|t5` when surname, year and title are all
/// found, else the space-joined tokens of the whole string.
pub fn normalize_reference(raw: &str) -> ReferenceKey {
    let p = patterns();
    let surname = p
        .surname
        .captures(raw)
        .and_then(|c| tokenize(&c[1]).into_iter().next());
    let paren = p.year_paren.captures(raw);
    let year = paren
        .as_ref()
        .map(|c| c[1].parse().unwrap())
        .or_else(|| p.bare_year.captures(raw).map(|c| c[1].parse().unwrap()));
    let title = match &paren {
        Some(c) => {
            let m = c.get(0).unwrap();
            author_date_title(&raw[m.end()..])
                .map(str::to_owned)
                .or_else(|| export_title(&raw[..m.start()]).or_else(|| export_title(raw)))
        }
        None => export_title(raw),
    };
    let title_prefix: Vec<String> = title
        .map(|t| tokenize(&t).into_iter().take(TITLE_TOKENS).collect())
        .unwrap_or_default();

    match (&surname, year) {
        (Some(s), Some(y)) if !title_prefix.is_empty() => ReferenceKey {
            key: format!("{s}|{y}|{}", title_prefix.join("|")),
            surname,
            year,
            title_prefix,
            parsed: true,
        },
        _ => ReferenceKey {
            key: tokenize(raw).join(" "),
            surname,
            year,
            title_prefix,
            parsed: false,
        },
    }
}
