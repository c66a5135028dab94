//! Embedding files and distance matrices.

use std::collections::BTreeSet;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::par;

#[derive(Debug, Deserialize)]
struct Header {
    dimension: usize,
    model_tag: String,
}

#[derive(Debug, Serialize, Deserialize)]
struct Row {
    term: String,
    vector: Vec<f64>,
}

/// Term vectors of one shared dimension.
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingTable {
    pub dimension: usize,
    pub model_tag: String,
    terms: Vec<String>,
    vectors: Vec<Vec<f64>>,
}

impl EmbeddingTable {
    pub fn new(dimension: usize, model_tag: impl Into<String>, rows: Vec<(String, Vec<f64>)>) -> Result<Self> {
        if dimension == 0 {
            return Err(Error::Embedding("dimension must be positive".into()));
        }
        let mut seen = BTreeSet::new();
        let (mut terms, mut vectors) = (Vec::with_capacity(rows.len()), Vec::with_capacity(rows.len()));
        for (term, v) in rows {
            if v.len() != dimension {
                return Err(Error::Embedding(format!(
                    "{term}: dimension {} but the header declares {dimension}",
                    v.len()
                )));
            }
            if v.iter().any(|x| !x.is_finite()) {
                return Err(Error::Embedding(format!("{term}: non-finite component")));
            }
            if !seen.insert(term.clone()) {
                return Err(Error::Embedding(format!("{term}: listed twice")));
            }
            terms.push(term);
            vectors.push(v);
        }
        Ok(EmbeddingTable {
            dimension,
            model_tag: model_tag.into(),
            terms,
            vectors,
        })
    }

    /// JSON lines: a `{dimension, model_tag}` header, then one
    /// `{term, vector}` object per line. Blank lines are ignored.
    pub fn parse(text: &str) -> Result<Self> {
        let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
        let (_, first) = lines.next().ok_or_else(|| Error::Embedding("empty embedding file".into()))?;
        let header: Header =
            serde_json::from_str(first).map_err(|e| Error::Embedding(format!("line 1: bad header: {e}")))?;
        let mut rows = Vec::new();
        for (no, line) in lines {
            let row: Row =
                serde_json::from_str(line).map_err(|e| Error::Embedding(format!("line {}: {e}", no + 1)))?;
            rows.push((row.term, row.vector));
        }
        Self::new(header.dimension, header.model_tag, rows)
    }

    pub fn to_jsonl(&self) -> String {
        let mut out = serde_json::json!({"dimension": self.dimension, "model_tag": self.model_tag}).to_string();
        out.push('\n');
        for (term, vector) in self.terms.iter().zip(&self.vectors) {
            let row = Row {
                term: term.clone(),
                vector: vector.clone(),
            };
            out.push_str(&serde_json::to_string(&row).expect("rows serialize"));
            out.push('\n');
        }
        out
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> &[String] {
        &self.terms
    }

    pub fn vector(&self, term: &str) -> Option<&[f64]> {
        self.terms.iter().position(|t| t == term).map(|i| self.vectors[i].as_slice())
    }

    /// Terms of `wanted` without a vector, in input order.
    pub fn missing_terms<'a>(&self, wanted: impl IntoIterator<Item = &'a str>) -> Vec<String> {
        let have: BTreeSet<&str> = self.terms.iter().map(String::as_str).collect();
        wanted.into_iter().filter(|t| !have.contains(t)).map(str::to_owned).collect()
    }

    /// The rows for `terms`, in that order; fails on the first missing one.
    pub fn subset(&self, terms: &[String]) -> Result<EmbeddingTable> {
        let rows = terms
            .iter()
            .map(|t| {
                self.vector(t)
                    .map(|v| (t.clone(), v.to_vec()))
                    .ok_or_else(|| Error::Embedding(format!("no vector for {t}")))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(self.dimension, self.model_tag.clone(), rows)
    }
}

/// Reads an embedding file and logs a warning listing expected terms that
/// have no vector.
pub fn load_embeddings(path: &Path, expected: &[String]) -> Result<(EmbeddingTable, Vec<String>)> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let table = EmbeddingTable::parse(&text)?;
    let missing = table.missing_terms(expected.iter().map(String::as_str));
    if !missing.is_empty() {
        log::warn!("{}: {} terms without vectors: {}", path.display(), missing.len(), missing.join(", "));
    }
    Ok((table, missing))
}

/// Dense symmetric matrix with zero diagonal.
#[derive(Debug, Clone, PartialEq)]
pub struct DistanceMatrix {
    n: usize,
    data: Vec<f64>,
}

impl DistanceMatrix {
    /// From full rows; must be square, symmetric, finite, zero on the
    /// diagonal and nonnegative.
    pub fn from_rows(rows: Vec<Vec<f64>>) -> Result<Self> {
        let n = rows.len();
        let mut data = Vec::with_capacity(n * n);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != n {
                return Err(Error::InvalidArgument(format!("row {i} has {} entries, expected {n}", row.len())));
            }
            for (j, &d) in row.iter().enumerate() {
                if !d.is_finite() || d < 0.0 || (i == j && d != 0.0) || d != rows[j][i] {
                    return Err(Error::InvalidArgument(format!("invalid distance at ({i}, {j})")));
                }
            }
            data.extend_from_slice(row);
        }
        Ok(DistanceMatrix { n, data })
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.n..(i + 1) * self.n]
    }
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// `1 - cos(v_i, v_j)`, clamped to [0, 2], computed by rows in parallel.
pub fn cosine_distance_matrix(t: &EmbeddingTable) -> Result<DistanceMatrix> {
    if t.len() < 2 {
        return Err(Error::TooFewPoints { needed: 2, got: t.len() });
    }
    let norms: Vec<f64> = t.vectors.iter().map(|v| norm(v)).collect();
    if let Some(i) = norms.iter().position(|&x| x == 0.0) {
        return Err(Error::ZeroVector(t.terms[i].clone()));
    }
    let n = t.len();
    let rows = par::map_range(n, |i| {
        (0..n)
            .map(|j| {
                if i == j {
                    return 0.0;
                }
                // symmetric by construction: the product is taken in index order
                let (a, b) = if i < j { (i, j) } else { (j, i) };
                let dot: f64 = t.vectors[a].iter().zip(&t.vectors[b]).map(|(x, y)| x * y).sum();
                (1.0 - dot / (norms[a] * norms[b])).clamp(0.0, 2.0)
            })
            .collect::<Vec<f64>>()
    });
    Ok(DistanceMatrix {
        n,
        data: rows.into_iter().flatten().collect(),
    })
}

/// `1 - Jaccard` of the forms' token sets with the anchor removed.
pub fn lexical_fallback_similarity(forms: &[Vec<String>], anchor: &str) -> DistanceMatrix {
    let sets: Vec<BTreeSet<&str>> = forms
        .iter()
        .map(|f| f.iter().map(String::as_str).filter(|t| *t != anchor).collect())
        .collect();
    let n = sets.len();
    let rows = par::map_range(n, |i| {
        (0..n)
            .map(|j| {
                let (a, b) = (&sets[i], &sets[j]);
                if i == j || a == b {
                    return 0.0;
                }
                let inter = a.intersection(b).count() as f64;
                let union = a.union(b).count() as f64;
                1.0 - inter / union
            })
            .collect::<Vec<f64>>()
    });
    DistanceMatrix {
        n,
        data: rows.into_iter().flatten().collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toks(s: &str) -> Vec<String> {
        s.split(' ').map(str::to_owned).collect()
    }

    #[test]
    fn parse_and_validate() {
        let t = EmbeddingTable::parse(
            "{\"dimension\":2,\"model_tag\":\"m\"}\n{\"term\":\"a\",\"vector\":[1,0]}\n\n{\"term\":\"b\",\"vector\":[1,1]}\n",
        )
        .unwrap();
        assert_eq!(t.len(), 2);
        assert_eq!(EmbeddingTable::parse(&t.to_jsonl()).unwrap(), t);
        assert_eq!(t.missing_terms(["a", "c"]), vec!["c".to_string()]);
        assert!(EmbeddingTable::parse("{\"dimension\":2,\"model_tag\":\"m\"}\n{\"term\":\"a\",\"vector\":[1]}").is_err());
        assert!(EmbeddingTable::parse("").is_err());
        assert!(EmbeddingTable::new(1, "m", vec![("a".into(), vec![f64::NAN])]).is_err());
    }

    #[test]
    fn cosine_values() {
        let t = EmbeddingTable::new(
            2,
            "m",
            vec![
                ("a".into(), vec![1.0, 0.0]),
                ("b".into(), vec![1.0, 1.0]),
                ("c".into(), vec![0.0, 3.0]),
                ("d".into(), vec![2.0, 0.0]),
            ],
        )
        .unwrap();
        let d = cosine_distance_matrix(&t).unwrap();
        assert!((d.get(0, 1) - (1.0 - 1.0 / 2f64.sqrt())).abs() < 1e-12);
        assert!((d.get(0, 2) - 1.0).abs() < 1e-15);
        assert_eq!(d.get(0, 3), 0.0);
        assert_eq!(d.get(1, 0), d.get(0, 1));
        let z = EmbeddingTable::new(1, "m", vec![("a".into(), vec![0.0]), ("b".into(), vec![1.0])]).unwrap();
        assert!(matches!(cosine_distance_matrix(&z), Err(Error::ZeroVector(t)) if t == "a"));
    }

    #[test]
    fn lexical() {
        let forms = [
            toks("racial segregation"),
            toks("gender segregation"),
            toks("racial residential segregation"),
            toks("residential segregation"),
        ];
        let d = lexical_fallback_similarity(&forms, "segregation");
        assert_eq!(d.get(0, 0), 0.0);
        assert_eq!(d.get(0, 1), 1.0);
        assert_eq!(d.get(2, 3), 0.5);
    }

    #[test]
    fn matrix_validation() {
        assert!(DistanceMatrix::from_rows(vec![vec![0.0, 1.0], vec![2.0, 0.0]]).is_err());
        assert!(DistanceMatrix::from_rows(vec![vec![0.0, 1.0], vec![1.0, 0.0]]).is_ok());
    }
}
