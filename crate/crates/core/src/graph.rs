//! Undirected weighted graph shared by the form and scholarly networks.

use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Node {
    pub id: String,
    pub label: String,
    pub first_year: Option<i32>,
    /// Free-form per-node metadata (counts, disciplines, ...).
    #[serde(default)]
    pub attrs: BTreeMap<String, Value>,
}

impl Node {
    pub fn new(id: impl Into<String>) -> Self {
        let id = id.into();
        Node {
            label: id.clone(),
            id,
            first_year: None,
            attrs: BTreeMap::new(),
        }
    }

    pub fn with_year(mut self, year: i32) -> Self {
        self.first_year = Some(year);
        self
    }

    pub fn with_attr(mut self, key: &str, value: impl Into<Value>) -> Self {
        self.attrs.insert(key.to_owned(), value.into());
        self
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Edge {
    pub weight: u64,
    pub first_co_year: Option<i32>,
    /// Weight contributed per year, when the edge is time-stamped.
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub per_year: BTreeMap<i32, u64>,
}

/// Simple undirected graph: no self-loops, one edge per unordered pair,
/// weights at least one. Nodes keep insertion order.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct WeightedGraph {
    nodes: Vec<Node>,
    index: HashMap<String, usize>,
    edges: BTreeMap<(usize, usize), Edge>,
}

fn key(u: usize, v: usize) -> (usize, usize) {
    if u < v {
        (u, v)
    } else {
        (v, u)
    }
}

impl WeightedGraph {
    pub fn new() -> Self {
        Self::default()
    }

    /// Adds a node, or returns the index of the existing node with that id.
    pub fn add_node(&mut self, node: Node) -> usize {
        if let Some(&i) = self.index.get(&node.id) {
            return i;
        }
        let i = self.nodes.len();
        self.index.insert(node.id.clone(), i);
        self.nodes.push(node);
        i
    }

    /// Adds `weight` to the edge `{u, v}`. A `year` stamps the contribution
    /// and lowers `first_co_year` if earlier.
    pub fn add_edge(&mut self, u: usize, v: usize, weight: u64, year: Option<i32>) -> Result<()> {
        if u == v {
            return Err(Error::SelfLoop(self.nodes[u].id.clone()));
        }
        if u >= self.nodes.len() || v >= self.nodes.len() {
            return Err(Error::UnknownNode(format!("{}", u.max(v))));
        }
        if weight == 0 {
            return Ok(());
        }
        let e = self.edges.entry(key(u, v)).or_default();
        e.weight += weight;
        if let Some(y) = year {
            *e.per_year.entry(y).or_default() += weight;
            e.first_co_year = Some(e.first_co_year.map_or(y, |f| f.min(y)));
        }
        Ok(())
    }

    pub fn add_edge_by_id(&mut self, u: &str, v: &str, weight: u64, year: Option<i32>) -> Result<()> {
        let ui = self.node_index(u).ok_or_else(|| Error::UnknownNode(u.into()))?;
        let vi = self.node_index(v).ok_or_else(|| Error::UnknownNode(v.into()))?;
        self.add_edge(ui, vi, weight, year)
    }

    /// Inserts a fully formed edge, replacing any existing one.
    pub fn set_edge(&mut self, u: usize, v: usize, edge: Edge) -> Result<()> {
        if u == v {
            return Err(Error::SelfLoop(self.nodes[u].id.clone()));
        }
        if edge.weight > 0 {
            self.edges.insert(key(u, v), edge);
        }
        Ok(())
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn node(&self, i: usize) -> &Node {
        &self.nodes[i]
    }

    pub fn node_mut(&mut self, i: usize) -> &mut Node {
        &mut self.nodes[i]
    }

    pub fn node_index(&self, id: &str) -> Option<usize> {
        self.index.get(id).copied()
    }

    pub fn edge(&self, u: usize, v: usize) -> Option<&Edge> {
        self.edges.get(&key(u, v))
    }

    pub fn edge_by_id(&self, u: &str, v: &str) -> Option<&Edge> {
        self.edge(self.node_index(u)?, self.node_index(v)?)
    }

    /// Edges as `(u, v, edge)` with `u < v`, in index order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize, &Edge)> {
        self.edges.iter().map(|(&(u, v), e)| (u, v, e))
    }

    pub fn total_weight(&self) -> u64 {
        self.edges.values().map(|e| e.weight).sum()
    }

    /// Neighbour lists with weights, sorted by neighbour index.
    pub fn adjacency(&self) -> Vec<Vec<(usize, f64)>> {
        let mut adj = vec![Vec::new(); self.nodes.len()];
        for (&(u, v), e) in &self.edges {
            adj[u].push((v, e.weight as f64));
            adj[v].push((u, e.weight as f64));
        }
        for list in &mut adj {
            list.sort_by_key(|&(n, _)| n);
        }
        adj
    }

    /// Sum of incident edge weights per node.
    pub fn strengths(&self) -> Vec<u64> {
        let mut s = vec![0; self.nodes.len()];
        for (&(u, v), e) in &self.edges {
            s[u] += e.weight;
            s[v] += e.weight;
        }
        s
    }

    /// Keeps only edges satisfying `keep`.
    pub fn retain_edges(&mut self, mut keep: impl FnMut(usize, usize, &Edge) -> bool) {
        self.edges.retain(|&(u, v), e| keep(u, v, e));
    }

    /// Subgraph on the nodes satisfying `keep`, preserving relative order.
    pub fn induced(&self, keep: impl Fn(usize, &Node) -> bool) -> WeightedGraph {
        let mut g = WeightedGraph::new();
        let mut map = vec![usize::MAX; self.nodes.len()];
        for (i, n) in self.nodes.iter().enumerate() {
            if keep(i, n) {
                map[i] = g.add_node(n.clone());
            }
        }
        for (&(u, v), e) in &self.edges {
            if map[u] != usize::MAX && map[v] != usize::MAX {
                g.edges.insert(key(map[u], map[v]), e.clone());
            }
        }
        g
    }

    /// Incident-edge count per node.
    pub fn degrees(&self) -> Vec<usize> {
        let mut d = vec![0; self.nodes.len()];
        for &(u, v) in self.edges.keys() {
            d[u] += 1;
            d[v] += 1;
        }
        d
    }
}

/// Community assignment per node index, with the modularity it achieves.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CommunityPartition {
    /// Community ids are dense, numbered by first appearance in node order.
    pub assignment: Vec<usize>,
    pub modularity: f64,
}

impl CommunityPartition {
    /// Renumbers arbitrary labels densely by first appearance.
    pub fn from_labels(labels: &[usize], modularity: f64) -> Self {
        CommunityPartition {
            assignment: relabel(labels),
            modularity,
        }
    }

    pub fn community_count(&self) -> usize {
        self.assignment.iter().max().map_or(0, |m| m + 1)
    }

    /// Members of each community, in node order.
    pub fn communities(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.community_count()];
        for (node, &c) in self.assignment.iter().enumerate() {
            out[c].push(node);
        }
        out
    }
}

pub(crate) fn relabel(labels: &[usize]) -> Vec<usize> {
    let mut map = HashMap::new();
    labels
        .iter()
        .map(|l| {
            let next = map.len();
            *map.entry(*l).or_insert(next)
        })
        .collect()
}
