//! Co-occurrence network of validated forms.

mod centrality;

use std::collections::BTreeMap;

pub use centrality::{betweenness, centralities, CentralityRow, CentralityTable};
pub use crate::community::{louvain, modularity};

use crate::error::Result;
use crate::forms::ValidatedFormSet;
use crate::graph::{Edge, Node, WeightedGraph};
use crate::metrics::{spearman, Correlation};
use crate::par;

/// One node per form found in at least one document; every document adds
/// one to the edge of each pair of distinct forms it contains, stamped
/// with its year. Edges lighter than `min_weight` are dropped.
pub fn build_cooccurrence(forms: &ValidatedFormSet, min_weight: u64) -> Result<WeightedGraph> {
    let mut g = WeightedGraph::new();
    let mut node_of = vec![usize::MAX; forms.len()];
    for (i, f) in forms.forms().iter().enumerate() {
        if f.docs.is_empty() {
            continue;
        }
        let term = f.term();
        node_of[i] = g.add_node(
            Node::new(term)
                .with_year(f.first_year)
                .with_attr("n_publications", f.n_docs() as u64),
        );
    }
    let mut years: BTreeMap<&str, i32> = BTreeMap::new();
    for f in forms.forms() {
        years.extend(f.docs.iter().map(|(d, &y)| (d.as_str(), y)));
    }
    let docs: Vec<(&str, Vec<usize>)> = forms.doc_index().into_iter().collect();
    let pairs = par::map(&docs, |(doc, members)| {
        let mut out = Vec::with_capacity(members.len() * members.len().saturating_sub(1) / 2);
        for (k, &a) in members.iter().enumerate() {
            for &b in &members[k + 1..] {
                out.push((node_of[a], node_of[b]));
            }
        }
        (years[doc], out)
    });
    for (year, list) in pairs {
        for (u, v) in list {
            g.add_edge(u, v, 1, Some(year))?;
        }
    }
    g.retain_edges(|_, _, e| e.weight >= min_weight.max(1));
    Ok(g)
}

/// The network as of `up_to_year`: edge weights recomputed from
/// contributions up to that year, nodes without a publication by then
/// removed.
pub fn temporal_slice(g: &WeightedGraph, up_to_year: i32) -> Result<WeightedGraph> {
    let mut out = g.induced(|_, n| n.first_year.is_some_and(|y| y <= up_to_year));
    let mut kept = Vec::new();
    for (u, v, e) in g.edges() {
        let per_year: BTreeMap<i32, u64> = e.per_year.range(..=up_to_year).map(|(&y, &w)| (y, w)).collect();
        let weight: u64 = per_year.values().sum();
        if weight > 0 {
            kept.push((g.node(u).id.clone(), g.node(v).id.clone(), Edge {
                weight,
                first_co_year: per_year.keys().next().copied(),
                per_year,
            }));
        }
    }
    out.retain_edges(|_, _, _| false);
    for (a, b, e) in kept {
        let (Some(u), Some(v)) = (out.node_index(&a), out.node_index(&b)) else {
            continue;
        };
        out.set_edge(u, v, e)?;
    }
    Ok(out)
}

/// Spearman correlation between each node's age (years elapsed between its
/// first publication and the newest node's) and its betweenness. Nodes
/// without a first year are skipped.
pub fn path_dependence(g: &WeightedGraph, table: &CentralityTable) -> Result<Correlation> {
    let newest = g.nodes().iter().filter_map(|n| n.first_year).max().unwrap_or(0);
    let (mut age, mut between) = (Vec::new(), Vec::new());
    for (node, row) in g.nodes().iter().zip(&table.rows) {
        if let Some(y) = node.first_year {
            age.push(f64::from(newest - y));
            between.push(row.betweenness);
        }
    }
    spearman(&age, &between)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::forms::testing::form;

    fn sample() -> ValidatedFormSet {
        ValidatedFormSet::new(vec![
            form("racial segregation", &[("d1", 2000), ("d2", 2002), ("d3", 2004)]),
            form("gender segregation", &[("d1", 2000), ("d2", 2002)]),
            form("urban segregation", &[("d1", 2000), ("d4", 2003)]),
            form("school segregation", &[("d5", 2006)]),
        ])
    }

    #[test]
    fn triangle_from_one_document() {
        let set = ValidatedFormSet::new(vec![
            form("a segregation", &[("d", 1)]),
            form("b segregation", &[("d", 1)]),
            form("c segregation", &[("d", 1)]),
        ]);
        let g = build_cooccurrence(&set, 1).unwrap();
        assert_eq!(g.edge_count(), 3);
        assert!(g.edges().all(|(_, _, e)| e.weight == 1));
    }

    #[test]
    fn weights_and_first_years() {
        let g = build_cooccurrence(&sample(), 1).unwrap();
        assert_eq!(g.node_count(), 4);
        let e = g.edge_by_id("gender segregation", "racial segregation").unwrap();
        assert_eq!((e.weight, e.first_co_year), (2, Some(2000)));
        assert_eq!(g.edge_count(), 3);
        let heavy = build_cooccurrence(&sample(), 2).unwrap();
        assert_eq!(heavy.edge_count(), 1);
    }

    #[test]
    fn slices() {
        let g = build_cooccurrence(&sample(), 1).unwrap();
        assert!(temporal_slice(&g, 1999).unwrap().is_empty());
        assert_eq!(temporal_slice(&g, 2010).unwrap(), g);
        let s = temporal_slice(&g, 2001).unwrap();
        assert_eq!(s.node_count(), 3);
        assert_eq!(s.edge_by_id("gender segregation", "racial segregation").unwrap().weight, 1);
    }
}
