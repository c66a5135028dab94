//! Knowledge-production networks: document co-citation, journal
//! bibliographic coupling and country co-authorship.

mod reference;

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::io::Write;

pub use reference::{normalize_reference, ReferenceKey};
pub use crate::community::slm_cluster;

use crate::corpus::CorpusStore;
use crate::error::{Error, Result};
use crate::graph::{CommunityPartition, Node, WeightedGraph};
use crate::par;
use crate::text::fold;

const DOCS_PER_CHUNK: usize = 256;

/// Node order and strengths after ranking by total link strength
/// (descending, ties by id).
#[derive(Debug, Clone, PartialEq)]
pub struct LinkStrengthRanking {
    pub ranked: Vec<(String, u64)>,
}

impl LinkStrengthRanking {
    pub fn of(g: &WeightedGraph) -> Self {
        let strengths = g.strengths();
        let mut ranked: Vec<(String, u64)> = g
            .nodes()
            .iter()
            .zip(strengths)
            .map(|(n, s)| (n.id.clone(), s))
            .collect();
        ranked.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
        LinkStrengthRanking { ranked }
    }
}

/// Weighted pair counts from per-item sorted member lists, counted in
/// parallel chunks and merged by addition.
fn count_pairs(groups: &[Vec<u32>]) -> BTreeMap<(u32, u32), u64> {
    let partials = par::map_chunks(groups.len(), DOCS_PER_CHUNK, |range| {
        let mut counts: HashMap<(u32, u32), u64> = HashMap::new();
        for members in &groups[range] {
            for (k, &a) in members.iter().enumerate() {
                for &b in &members[k + 1..] {
                    *counts.entry((a, b)).or_default() += 1;
                }
            }
        }
        counts
    });
    let mut total = BTreeMap::new();
    for part in partials {
        for (k, v) in part {
            *total.entry(k).or_default() += v;
        }
    }
    total
}

/// Assembles a graph from interned ids, applying `min_weight` to edges and
/// then keeping the `top_k` nodes by total link strength. With
/// `drop_isolated`, nodes left without edges after the weight filter are
/// removed before ranking.
fn assemble(
    nodes: Vec<Node>,
    pairs: BTreeMap<(u32, u32), u64>,
    min_weight: u64,
    top_k: usize,
    drop_isolated: bool,
) -> Result<WeightedGraph> {
    let mut g = WeightedGraph::new();
    for n in nodes {
        g.add_node(n);
    }
    for ((a, b), w) in pairs {
        if w >= min_weight {
            g.add_edge(a as usize, b as usize, w, None)?;
        }
    }
    let degree = g.degrees();
    let strengths = g.strengths();
    let mut order: Vec<usize> = (0..g.node_count())
        .filter(|&i| !drop_isolated || degree[i] > 0)
        .collect();
    order.sort_by(|&a, &b| strengths[b].cmp(&strengths[a]).then_with(|| g.node(a).id.cmp(&g.node(b).id)));
    order.truncate(top_k);
    let keep: BTreeSet<usize> = order.iter().copied().collect();
    for &i in &keep {
        let s = strengths[i];
        g.node_mut(i).attrs.insert("total_link_strength".into(), s.into());
    }
    Ok(g.induced(|i, _| keep.contains(&i)))
}

/// Co-citation network of cited references. References in `excluded`
/// (matched by key) are dropped first, then pairs co-cited fewer than
/// `min_cocitations` times, then all but the `top_k` strongest nodes.
pub fn build_cocitation(
    store: &CorpusStore,
    min_cocitations: u64,
    top_k: usize,
    excluded: &BTreeSet<String>,
) -> Result<WeightedGraph> {
    let keyed: Vec<Vec<(String, usize)>> = par::map(store.records(), |r| {
        let mut keys: Vec<(String, usize)> = r
            .references
            .iter()
            .enumerate()
            .map(|(i, raw)| (normalize_reference(raw).key, i))
            .filter(|(k, _)| !k.is_empty() && !excluded.contains(k))
            .collect();
        keys.sort_by(|a, b| a.0.cmp(&b.0));
        keys.dedup_by(|a, b| a.0 == b.0);
        keys
    });
    let mut ids: BTreeMap<&str, (&str, u64)> = BTreeMap::new();
    for (doc, r) in keyed.iter().zip(store.records()) {
        for (k, i) in doc {
            ids.entry(k).or_insert((&r.references[*i], 0)).1 += 1;
        }
    }
    let index: HashMap<&str, u32> = ids.keys().enumerate().map(|(i, k)| (*k, i as u32)).collect();
    let nodes = ids
        .iter()
        .map(|(k, (raw, count))| {
            let mut n = Node::new(*k).with_attr("citation_count", *count);
            n.label = (*raw).to_owned();
            n
        })
        .collect();
    let groups: Vec<Vec<u32>> = keyed
        .iter()
        .map(|doc| doc.iter().map(|(k, _)| index[k.as_str()]).collect())
        .collect();
    assemble(nodes, count_pairs(&groups), min_cocitations.max(1), top_k, true)
}

fn journal_name(source_title: &str) -> String {
    fold(source_title).trim_end_matches(['.', ',', ';', ' ']).to_owned()
}

/// Bibliographic coupling of journals: the edge weight is the number of
/// distinct reference keys cited by both. Journals whose documents are
/// cited fewer than `min_citations` times in total are dropped before
/// the edges are counted; then the `top_k` strongest remain.
pub fn build_coupling(store: &CorpusStore, min_citations: u64, top_k: usize) -> Result<WeightedGraph> {
    let mut journals: BTreeMap<String, (String, u64, u64, BTreeSet<String>)> = BTreeMap::new();
    let keys = par::map(store.records(), |r| {
        r.references
            .iter()
            .map(|raw| normalize_reference(raw).key)
            .filter(|k| !k.is_empty())
            .collect::<Vec<_>>()
    });
    for (r, keys) in store.records().iter().zip(keys) {
        let name = journal_name(&r.source_title);
        if name.is_empty() {
            continue;
        }
        let entry = journals
            .entry(name)
            .or_insert_with(|| (r.source_title.trim().to_owned(), 0, 0, BTreeSet::new()));
        entry.1 += 1;
        entry.2 += u64::from(r.cited_by);
        entry.3.extend(keys);
    }
    journals.retain(|_, j| j.2 >= min_citations);

    let mut cited_by: BTreeMap<&str, Vec<u32>> = BTreeMap::new();
    let mut nodes = Vec::with_capacity(journals.len());
    for (i, (name, (label, docs, citations, refs))) in journals.iter().enumerate() {
        let mut n = Node::new(name.clone())
            .with_attr("doc_count", *docs)
            .with_attr("citations", *citations);
        n.label = label.clone();
        nodes.push(n);
        for k in refs {
            cited_by.entry(k).or_default().push(i as u32);
        }
    }
    let groups: Vec<Vec<u32>> = cited_by.into_values().filter(|g| g.len() > 1).collect();
    assemble(nodes, count_pairs(&groups), 1, top_k, false)
}

/// Countries with at least `min_docs` documents; the edge weight is the
/// number of documents listing both countries.
pub fn build_coauthorship_countries(store: &CorpusStore, min_docs: u64) -> Result<WeightedGraph> {
    let mut docs: BTreeMap<&str, u64> = BTreeMap::new();
    for r in store.records() {
        for c in &r.countries {
            *docs.entry(c).or_default() += 1;
        }
    }
    docs.retain(|_, n| *n >= min_docs);
    let index: HashMap<&str, u32> = docs.keys().enumerate().map(|(i, c)| (*c, i as u32)).collect();
    let nodes = docs.iter().map(|(c, n)| Node::new(*c).with_attr("doc_count", *n)).collect();
    let groups: Vec<Vec<u32>> = store
        .records()
        .iter()
        .map(|r| r.countries.iter().filter_map(|c| index.get(c.as_str()).copied()).collect())
        .collect();
    assemble(nodes, count_pairs(&groups), 1, usize::MAX, false)
}

/// CSV with columns node, count, total_link_strength, community. `count`
/// reads the node attribute `count_attr`.
pub fn write_network_csv<W: Write>(
    out: W,
    g: &WeightedGraph,
    count_attr: &str,
    partition: Option<&CommunityPartition>,
) -> Result<()> {
    if let Some(p) = partition {
        if p.assignment.len() != g.node_count() {
            return Err(Error::IncompletePartition(format!(
                "{} of {} nodes assigned",
                p.assignment.len(),
                g.node_count()
            )));
        }
    }
    let strengths = g.strengths();
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["node", "count", "total_link_strength", "community"])?;
    for (i, n) in g.nodes().iter().enumerate() {
        let count = n.attrs.get(count_attr).map(|v| v.to_string()).unwrap_or_default();
        let community = partition.map(|p| p.assignment[i].to_string()).unwrap_or_default();
        w.write_record([n.label.clone(), count, strengths[i].to_string(), community])?;
    }
    w.flush().map_err(|e| Error::io("<network csv>", e))?;
    Ok(())
}
