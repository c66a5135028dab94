//! Degree and betweenness centrality.

use std::collections::VecDeque;
use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::WeightedGraph;
use crate::par;

/// Sources per work unit. Fixed so the summation order, and hence every
/// bit of the result, does not depend on the thread count.
const SOURCES_PER_CHUNK: usize = 16;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CentralityRow {
    pub id: String,
    pub label: String,
    /// Distinct neighbours.
    pub degree: usize,
    /// Sum of incident edge weights.
    pub weighted_degree: u64,
    pub betweenness: f64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct CentralityTable {
    pub rows: Vec<CentralityRow>,
}

impl CentralityTable {
    /// Rows by descending degree, then descending betweenness, then id.
    pub fn ranked(&self) -> Vec<&CentralityRow> {
        let mut rows: Vec<&CentralityRow> = self.rows.iter().collect();
        rows.sort_by(|a, b| {
            b.degree
                .cmp(&a.degree)
                .then(b.betweenness.total_cmp(&a.betweenness))
                .then(a.id.cmp(&b.id))
        });
        rows
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["node", "degree", "weighted_degree", "betweenness"])?;
        for r in self.ranked() {
            w.write_record([
                r.label.clone(),
                r.degree.to_string(),
                r.weighted_degree.to_string(),
                format!("{:.2}", r.betweenness),
            ])?;
        }
        w.flush().map_err(|e| Error::io("<centrality csv>", e))?;
        Ok(())
    }
}

fn neighbours(g: &WeightedGraph) -> Vec<Vec<usize>> {
    g.adjacency().into_iter().map(|row| row.into_iter().map(|p| p.0).collect()).collect()
}

/// Adds the dependencies of source `s` to `acc`.
fn accumulate(adj: &[Vec<usize>], s: usize, acc: &mut [f64], scratch: &mut Scratch) {
    let Scratch { sigma, dist, delta, stack, preds, queue } = scratch;
    sigma.fill(0.0);
    dist.fill(usize::MAX);
    delta.fill(0.0);
    stack.clear();
    for p in preds.iter_mut() {
        p.clear();
    }
    sigma[s] = 1.0;
    dist[s] = 0;
    queue.push_back(s);
    while let Some(v) = queue.pop_front() {
        stack.push(v);
        for &w in &adj[v] {
            if dist[w] == usize::MAX {
                dist[w] = dist[v] + 1;
                queue.push_back(w);
            }
            if dist[w] == dist[v] + 1 {
                sigma[w] += sigma[v];
                preds[w].push(v);
            }
        }
    }
    while let Some(w) = stack.pop() {
        for &v in &preds[w] {
            delta[v] += sigma[v] / sigma[w] * (1.0 + delta[w]);
        }
        if w != s {
            acc[w] += delta[w];
        }
    }
}

struct Scratch {
    sigma: Vec<f64>,
    dist: Vec<usize>,
    delta: Vec<f64>,
    stack: Vec<usize>,
    preds: Vec<Vec<usize>>,
    queue: VecDeque<usize>,
}

impl Scratch {
    fn new(n: usize) -> Self {
        Scratch {
            sigma: vec![0.0; n],
            dist: vec![0; n],
            delta: vec![0.0; n],
            stack: Vec::with_capacity(n),
            preds: vec![Vec::new(); n],
            queue: VecDeque::with_capacity(n),
        }
    }
}

/// Unnormalized betweenness over unweighted shortest paths, each unordered
/// pair counted once and split evenly among equally short paths.
pub fn betweenness(g: &WeightedGraph) -> Vec<f64> {
    let n = g.node_count();
    let adj = neighbours(g);
    let partials = par::map_chunks(n, SOURCES_PER_CHUNK, |sources| {
        let mut acc = vec![0.0; n];
        let mut scratch = Scratch::new(n);
        for s in sources {
            accumulate(&adj, s, &mut acc, &mut scratch);
        }
        acc
    });
    let mut total = vec![0.0; n];
    for part in partials {
        for (t, p) in total.iter_mut().zip(part) {
            *t += p;
        }
    }
    total.iter_mut().for_each(|b| *b /= 2.0);
    total
}

pub fn centralities(g: &WeightedGraph) -> CentralityTable {
    let degree = g.degrees();
    let strength = g.strengths();
    let between = betweenness(g);
    CentralityTable {
        rows: g
            .nodes()
            .iter()
            .enumerate()
            .map(|(i, node)| CentralityRow {
                id: node.id.clone(),
                label: node.label.clone(),
                degree: degree[i],
                weighted_degree: strength[i],
                betweenness: between[i],
            })
            .collect(),
    }
}
