//! Graph and series serialization: GraphML, JSON edge lists and SVG line
//! plots.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::io::Write;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::conet::CentralityTable;
use crate::error::{Error, Result};
use crate::graph::{CommunityPartition, Node, WeightedGraph};
use crate::metrics::YearSeries;
use crate::ontology::OntologyGraph;

fn escape(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            '\'' => out.push_str("&apos;"),
            c => out.push(c),
        }
    }
    out
}

fn graphml_type(v: &Value) -> &'static str {
    match v {
        Value::Bool(_) => "boolean",
        Value::Number(n) if n.is_i64() || n.is_u64() => "long",
        Value::Number(_) => "double",
        _ => "string",
    }
}

fn value_text(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

/// Per-node analysis results merged into the exported attributes.
#[derive(Debug, Clone, Copy, Default)]
pub struct Annotations<'a> {
    pub centrality: Option<&'a CentralityTable>,
    pub partition: Option<&'a CommunityPartition>,
}

impl Annotations<'_> {
    fn check(&self, g: &WeightedGraph) -> Result<()> {
        if self.partition.is_some_and(|p| p.assignment.len() != g.node_count()) {
            return Err(Error::IncompletePartition("partition does not match the graph".into()));
        }
        if self.centrality.is_some_and(|c| c.rows.len() != g.node_count()) {
            return Err(Error::InvalidArgument("centrality table does not match the graph".into()));
        }
        Ok(())
    }

    fn node_attrs(&self, i: usize, node: &Node) -> BTreeMap<String, Value> {
        let mut attrs = node.attrs.clone();
        if let Some(y) = node.first_year {
            attrs.insert("first_year".into(), y.into());
        }
        if let Some(p) = self.partition {
            attrs.insert("community".into(), p.assignment[i].into());
        }
        if let Some(c) = self.centrality {
            attrs.insert("degree".into(), c.rows[i].degree.into());
            attrs.insert("weighted_degree".into(), c.rows[i].weighted_degree.into());
            attrs.insert("betweenness".into(), c.rows[i].betweenness.into());
        }
        attrs
    }
}

/// GraphML with one `<key>` per node attribute seen, typed from its first
/// value, plus `weight` and `first_co_year` on edges.
pub fn write_graphml<W: Write>(mut out: W, g: &WeightedGraph, notes: Annotations<'_>) -> Result<()> {
    notes.check(g)?;
    let attrs: Vec<BTreeMap<String, Value>> = g
        .nodes()
        .iter()
        .enumerate()
        .map(|(i, n)| notes.node_attrs(i, n))
        .collect();
    let mut keys: BTreeMap<&str, &'static str> = BTreeMap::new();
    for a in &attrs {
        for (k, v) in a {
            keys.entry(k).or_insert_with(|| graphml_type(v));
        }
    }
    let mut s = String::new();
    s.push_str("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n");
    s.push_str("<graphml xmlns=\"http://graphml.graphdrawing.org/xmlns\">\n");
    s.push_str("  <key id=\"label\" for=\"node\" attr.name=\"label\" attr.type=\"string\"/>\n");
    for (k, t) in &keys {
        let k = escape(k);
        writeln!(s, "  <key id=\"n_{k}\" for=\"node\" attr.name=\"{k}\" attr.type=\"{t}\"/>").unwrap();
    }
    s.push_str("  <key id=\"weight\" for=\"edge\" attr.name=\"weight\" attr.type=\"long\"/>\n");
    s.push_str("  <key id=\"first_co_year\" for=\"edge\" attr.name=\"first_co_year\" attr.type=\"int\"/>\n");
    s.push_str("  <graph id=\"G\" edgedefault=\"undirected\">\n");
    for (n, a) in g.nodes().iter().zip(&attrs) {
        writeln!(s, "    <node id=\"{}\">", escape(&n.id)).unwrap();
        writeln!(s, "      <data key=\"label\">{}</data>", escape(&n.label)).unwrap();
        for (k, v) in a {
            writeln!(s, "      <data key=\"n_{}\">{}</data>", escape(k), escape(&value_text(v))).unwrap();
        }
        s.push_str("    </node>\n");
    }
    for (u, v, e) in g.edges() {
        writeln!(
            s,
            "    <edge source=\"{}\" target=\"{}\">",
            escape(&g.node(u).id),
            escape(&g.node(v).id)
        )
        .unwrap();
        writeln!(s, "      <data key=\"weight\">{}</data>", e.weight).unwrap();
        if let Some(y) = e.first_co_year {
            writeln!(s, "      <data key=\"first_co_year\">{y}</data>").unwrap();
        }
        s.push_str("    </edge>\n");
    }
    s.push_str("  </graph>\n</graphml>\n");
    out.write_all(s.as_bytes()).map_err(|e| Error::io("<graphml>", e))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JsonNode {
    pub id: String,
    pub label: String,
    pub first_year: Option<i32>,
    pub community: Option<usize>,
    pub degree: Option<usize>,
    pub betweenness: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JsonEdge {
    pub source: String,
    pub target: String,
    pub weight: u64,
    pub first_co_year: Option<i32>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JsonGraph {
    pub nodes: Vec<JsonNode>,
    pub edges: Vec<JsonEdge>,
}

pub fn to_json_graph(g: &WeightedGraph, notes: Annotations<'_>) -> Result<JsonGraph> {
    notes.check(g)?;
    let nodes = g
        .nodes()
        .iter()
        .enumerate()
        .map(|(i, n)| JsonNode {
            id: n.id.clone(),
            label: n.label.clone(),
            first_year: n.first_year,
            community: notes.partition.map(|p| p.assignment[i]),
            degree: notes.centrality.map(|c| c.rows[i].degree),
            betweenness: notes.centrality.map(|c| c.rows[i].betweenness),
        })
        .collect();
    let edges = g
        .edges()
        .map(|(u, v, e)| JsonEdge {
            source: g.node(u).id.clone(),
            target: g.node(v).id.clone(),
            weight: e.weight,
            first_co_year: e.first_co_year,
        })
        .collect();
    Ok(JsonGraph { nodes, edges })
}

/// Types and forms as nodes (attribute `kind`), membership edges of
/// weight 1 and type-type edges weighted by shared forms.
pub fn ontology_to_graph(o: &OntologyGraph) -> Result<WeightedGraph> {
    let mut g = WeightedGraph::new();
    for t in &o.types {
        let mut n = Node::new(format!("type:{}", t.label))
            .with_attr("kind", "type")
            .with_attr("freq", t.freq as u64);
        n.label = t.label.clone();
        g.add_node(n);
    }
    for f in &o.forms {
        let mut n = Node::new(format!("form:{}", f.term)).with_attr("kind", "form");
        n.label = f.term.clone();
        let fi = g.add_node(n);
        for l in &f.labels {
            let ti = g
                .node_index(&format!("type:{l}"))
                .ok_or_else(|| Error::UnknownNode(l.clone()))?;
            g.add_edge(fi, ti, 1, None)?;
        }
    }
    for e in &o.type_edges {
        g.add_edge_by_id(&format!("type:{}", e.a), &format!("type:{}", e.b), e.weight as u64, None)?;
    }
    Ok(g)
}

/// A minimal SVG line chart of one or more series on shared axes.
pub fn series_svg(title: &str, series: &[(&str, &YearSeries)]) -> String {
    const W: f64 = 720.0;
    const H: f64 = 420.0;
    const PAD: f64 = 56.0;
    const COLOURS: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf"];

    let points: Vec<(i32, f64)> = series.iter().flat_map(|(_, s)| s.points().iter().copied()).collect();
    let (x0, x1) = points.iter().fold((i32::MAX, i32::MIN), |(a, b), p| (a.min(p.0), b.max(p.0)));
    let (y0, y1) = points
        .iter()
        .fold((0.0f64, f64::NEG_INFINITY), |(a, b), p| (a.min(p.1), b.max(p.1)));
    let xspan = f64::from((x1 - x0).max(1));
    let yspan = if y1 > y0 { y1 - y0 } else { 1.0 };
    let sx = |x: i32| PAD + f64::from(x - x0) / xspan * (W - 2.0 * PAD);
    let sy = |y: f64| H - PAD - (y - y0) / yspan * (H - 2.0 * PAD);

    let mut s = String::new();
    writeln!(
        s,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{W}\" height=\"{H}\" viewBox=\"0 0 {W} {H}\" font-family=\"sans-serif\" font-size=\"12\">"
    )
    .unwrap();
    writeln!(s, "<rect width=\"{W}\" height=\"{H}\" fill=\"white\"/>").unwrap();
    writeln!(s, "<text x=\"{}\" y=\"24\" text-anchor=\"middle\" font-size=\"15\">{}</text>", W / 2.0, escape(title)).unwrap();
    if points.is_empty() {
        s.push_str("</svg>\n");
        return s;
    }
    writeln!(
        s,
        "<path d=\"M{PAD},{} V{} H{}\" stroke=\"black\" fill=\"none\"/>",
        PAD,
        H - PAD,
        W - PAD
    )
    .unwrap();
    writeln!(s, "<text x=\"{PAD}\" y=\"{}\" text-anchor=\"middle\">{x0}</text>", H - PAD + 18.0).unwrap();
    writeln!(s, "<text x=\"{}\" y=\"{}\" text-anchor=\"middle\">{x1}</text>", W - PAD, H - PAD + 18.0).unwrap();
    writeln!(s, "<text x=\"{}\" y=\"{}\" text-anchor=\"end\">{}</text>", PAD - 6.0, H - PAD, fmt_tick(y0)).unwrap();
    writeln!(s, "<text x=\"{}\" y=\"{}\" text-anchor=\"end\">{}</text>", PAD - 6.0, PAD + 4.0, fmt_tick(y1)).unwrap();
    for (k, (name, ser)) in series.iter().enumerate() {
        let colour = COLOURS[k % COLOURS.len()];
        let pts: Vec<String> = ser
            .points()
            .iter()
            .map(|&(x, y)| format!("{:.1},{:.1}", sx(x), sy(y)))
            .collect();
        writeln!(
            s,
            "<polyline points=\"{}\" fill=\"none\" stroke=\"{colour}\" stroke-width=\"1.5\"/>",
            pts.join(" ")
        )
        .unwrap();
        let ly = PAD + 16.0 * k as f64;
        writeln!(
            s,
            "<text x=\"{}\" y=\"{ly}\" fill=\"{colour}\" text-anchor=\"end\">{}</text>",
            W - PAD,
            escape(name)
        )
        .unwrap();
    }
    s.push_str("</svg>\n");
    s
}

fn fmt_tick(v: f64) -> String {
    if v.abs() >= 1000.0 || v == v.trunc() {
        format!("{v:.0}")
    } else {
        format!("{v:.3}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::community::fixtures::two_triangles;
    use crate::conet::centralities;
    use crate::ontology::{type_network, TypeLabeling};

    #[test]
    fn graphml_shape() {
        let mut g = two_triangles();
        g.node_mut(0).label = "a & <b>".into();
        let c = centralities(&g);
        let p = crate::community::louvain(&g, 1.0, 1).unwrap();
        let mut buf = Vec::new();
        write_graphml(&mut buf, &g, Annotations { centrality: Some(&c), partition: Some(&p) }).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.contains("a &amp; &lt;b&gt;"));
        assert_eq!(text.matches("<node ").count(), 6);
        assert_eq!(text.matches("<edge ").count(), 6);
        assert!(text.contains("attr.name=\"betweenness\" attr.type=\"double\""));
        assert!(text.contains("attr.name=\"community\" attr.type=\"long\""));
    }

    #[test]
    fn json_graph() {
        let g = two_triangles();
        let j = to_json_graph(&g, Annotations::default()).unwrap();
        assert_eq!(j.nodes.len(), 6);
        assert_eq!(j.edges[0].source, "n000");
        assert!(j.nodes[0].community.is_none());
        let bad = CommunityPartition::from_labels(&[0, 0], 0.0);
        assert!(to_json_graph(&g, Annotations { centrality: None, partition: Some(&bad) }).is_err());
    }

    #[test]
    fn ontology_graph() {
        let mut l = TypeLabeling::default();
        l.set("f1", ["A".to_string(), "B".to_string()]).unwrap();
        l.set("f2", ["A".to_string()]).unwrap();
        let g = ontology_to_graph(&type_network(&l)).unwrap();
        assert_eq!(g.node_count(), 4);
        assert_eq!(g.edge_by_id("type:A", "type:B").unwrap().weight, 1);
        assert_eq!(g.edge_count(), 4);
    }

    #[test]
    fn svg_plot() {
        let s = YearSeries::new(vec![(2000, 1.0), (2001, 3.0), (2002, 2.0)]).unwrap();
        let svg = series_svg("Forms per year", &[("forms", &s)]);
        assert!(svg.starts_with("<svg"));
        assert!(svg.contains("<polyline"));
        assert!(svg.trim_end().ends_with("</svg>"));
    }
}
