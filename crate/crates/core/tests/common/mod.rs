//! Independent oracles and generators shared by the integration tests.
#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use segforms::corpus::{CorpusStore, DocumentRecord};
use segforms::extract::{FieldTag, NGramCandidate, Occurrence};
use segforms::graph::{Node, WeightedGraph};

pub fn graph_from_edges(n: usize, edges: &[(usize, usize)]) -> WeightedGraph {
    let mut g = WeightedGraph::new();
    for i in 0..n {
        g.add_node(Node::new(format!("v{i:02}")));
    }
    for &(u, v) in edges {
        g.add_edge(u, v, 1, None).unwrap();
    }
    g
}

/// Erdos-Renyi graph with `n` nodes and edge probability `p`.
pub fn random_edges(rng: &mut ChaCha8Rng, n: usize, p: f64) -> Vec<(usize, usize)> {
    let mut edges = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            if rng.random::<f64>() < p {
                edges.push((u, v));
            }
        }
    }
    edges
}

/// Betweenness by listing every shortest path of every unordered pair.
pub fn brute_betweenness(n: usize, edges: &[(usize, usize)]) -> Vec<f64> {
    let mut adj = vec![Vec::new(); n];
    for &(u, v) in edges {
        adj[u].push(v);
        adj[v].push(u);
    }
    // all-pairs hop distances by repeated relaxation
    let inf = usize::MAX / 4;
    let mut d = vec![vec![inf; n]; n];
    for i in 0..n {
        d[i][i] = 0;
        for &j in &adj[i] {
            d[i][j] = 1;
        }
    }
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                if d[i][k] + d[k][j] < d[i][j] {
                    d[i][j] = d[i][k] + d[k][j];
                }
            }
        }
    }
    fn walk(
        adj: &[Vec<usize>],
        d: &[Vec<usize>],
        t: usize,
        path: &mut Vec<usize>,
        out: &mut Vec<Vec<usize>>,
    ) {
        let cur = *path.last().unwrap();
        if cur == t {
            out.push(path.clone());
            return;
        }
        for &next in &adj[cur] {
            if d[next][t] + 1 == d[cur][t] {
                path.push(next);
                walk(adj, d, t, path, out);
                path.pop();
            }
        }
    }
    let mut b = vec![0.0; n];
    for s in 0..n {
        for t in s + 1..n {
            if d[s][t] >= inf {
                continue;
            }
            let mut paths = Vec::new();
            walk(&adj, &d, t, &mut vec![s], &mut paths);
            let total = paths.len() as f64;
            for p in &paths {
                for &v in &p[1..p.len() - 1] {
                    b[v] += 1.0 / total;
                }
            }
        }
    }
    b
}

/// Complete linkage recomputed from scratch at every step: clusters are
/// leaf sets, the linkage is the maximum original distance between members.
/// Returns `(id_a, id_b, distance)` per merge, ties to the smallest id pair.
pub fn brute_complete_linkage(d: &[Vec<f64>]) -> Vec<(usize, usize, f64)> {
    let n = d.len();
    let mut clusters: Vec<(usize, Vec<usize>)> = (0..n).map(|i| (i, vec![i])).collect();
    let mut out = Vec::new();
    let mut next = n;
    while clusters.len() > 1 {
        let mut best: Option<(f64, usize, usize, usize, usize)> = None;
        for x in 0..clusters.len() {
            for y in 0..clusters.len() {
                if x == y || clusters[x].0 > clusters[y].0 {
                    continue;
                }
                let link = clusters[x]
                    .1
                    .iter()
                    .flat_map(|&i| clusters[y].1.iter().map(move |&j| (i, j)))
                    .map(|(i, j)| d[i][j])
                    .fold(f64::NEG_INFINITY, f64::max);
                let cand = (link, clusters[x].0, clusters[y].0, x, y);
                let better = match best {
                    None => true,
                    Some(b) => cand.0 < b.0 || (cand.0 == b.0 && (cand.1, cand.2) < (b.1, b.2)),
                };
                if better {
                    best = Some(cand);
                }
            }
        }
        let (dist, a, b, x, y) = best.unwrap();
        let mut members = clusters[x].1.clone();
        members.extend(clusters[y].1.iter().copied());
        let (hi, lo) = if x > y { (x, y) } else { (y, x) };
        clusters.remove(hi);
        clusters.remove(lo);
        clusters.push((next, members));
        next += 1;
        out.push((a, b, dist));
    }
    out
}

pub const CONTENT: [&str; 12] = [
    "racial", "residential", "gender", "school", "urban", "spatial", "income", "ethnic", "occupational",
    "economic", "social", "religious",
];
pub const STOP: [&str; 10] = ["the", "of", "and", "in", "by", "is", "this", "that", "examines", "increasing"];

/// A seeded corpus whose fields are space-joined tokens from a small
/// vocabulary, so positions can be counted without a tokenizer. Returns
/// the store and the raw token lists of every field.
pub fn synthetic_corpus(seed: u64, docs: usize, anchor: &str) -> (CorpusStore, Vec<Vec<String>>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut fields = Vec::new();
    let mut records = Vec::new();
    for i in 0..docs {
        let field = |rng: &mut ChaCha8Rng, len: usize| -> Vec<String> {
            (0..len)
                .map(|_| match rng.random_range(0..10) {
                    0..=2 => anchor.to_string(),
                    3..=6 => CONTENT[rng.random_range(0..CONTENT.len())].to_string(),
                    _ => STOP[rng.random_range(0..STOP.len())].to_string(),
                })
                .collect()
        };
        let mut r = DocumentRecord::new(format!("S{i:04}"), 1950 + rng.random_range(0..70));
        let len = rng.random_range(0..6);
        let title = field(&mut rng, len);
        let len = rng.random_range(0..40);
        let abs = field(&mut rng, len);
        let n_kw = rng.random_range(0..4);
        let kws: Vec<Vec<String>> = (0..n_kw)
            .map(|_| {
                let len = rng.random_range(1..4);
                field(&mut rng, len)
            })
            .collect();
        r.title = title.join(" ");
        r.abstract_text = abs.join(" ");
        r.keywords = kws.iter().map(|k| k.join(" ")).collect();
        fields.push(title);
        fields.push(abs);
        fields.extend(kws);
        records.push(r);
    }
    (CorpusStore::from_records(records), fields)
}

pub fn stop_set() -> BTreeSet<&'static str> {
    STOP.into_iter().collect()
}

/// A validated form present in the given documents, one occurrence each.
pub fn candidate(term: &str, docs: &[(&str, i32)]) -> NGramCandidate {
    let terms: Vec<String> = term.split(' ').map(str::to_owned).collect();
    let docs: BTreeMap<String, i32> = docs.iter().map(|(d, y)| (d.to_string(), *y)).collect();
    let mut per_year_counts = BTreeMap::new();
    for &y in docs.values() {
        *per_year_counts.entry(y).or_default() += 1;
    }
    NGramCandidate {
        arity: terms.len() as u8,
        occurrences: docs
            .keys()
            .map(|d| Occurrence {
                doc_id: d.clone(),
                field: FieldTag::Title,
                position: terms.len() as u32 - 1,
            })
            .collect(),
        first_year: per_year_counts.keys().next().copied().unwrap_or(i32::MAX),
        terms,
        docs,
        per_year_counts,
        first_countries: BTreeSet::new(),
        origin: None,
    }
}
