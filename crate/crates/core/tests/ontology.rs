use std::collections::BTreeSet;

use proptest::prelude::*;
use segforms::ontology::{
    agglomerative_complete, apply_labeling, cosine_distance_matrix, cut_dendrogram, load_embeddings, type_network,
    CutCriterion, EmbeddingTable, LabelingFile, TypeLabeling, MAX_LABELS,
};

const EMBEDDINGS: &str = r#"{"dimension": 3, "model_tag": "toy-3d"}
{"term": "racial segregation", "vector": [1.0, 0.1, 0.0]}
{"term": "ethnic segregation", "vector": [0.9, 0.2, 0.0]}
{"term": "residential segregation", "vector": [0.0, 1.0, 0.1]}
{"term": "urban segregation", "vector": [0.1, 0.9, 0.0]}
{"term": "gender segregation", "vector": [0.0, 0.1, 1.0]}
"#;

fn terms(t: &EmbeddingTable) -> Vec<String> {
    t.terms().to_vec()
}

#[test]
fn embedding_contract_round_trips() {
    let t = EmbeddingTable::parse(EMBEDDINGS).unwrap();
    assert_eq!(t.dimension, 3);
    assert_eq!(t.model_tag, "toy-3d");
    assert_eq!(t.len(), 5);
    assert_eq!(EmbeddingTable::parse(&t.to_jsonl()).unwrap(), t);
}

#[test]
fn malformed_embeddings_are_rejected() {
    let bad_dim = "{\"dimension\": 2, \"model_tag\": \"m\"}\n{\"term\": \"a segregation\", \"vector\": [1, 2, 3]}\n";
    assert!(EmbeddingTable::parse(bad_dim).is_err());
    let dup = "{\"dimension\": 1, \"model_tag\": \"m\"}\n{\"term\": \"a\", \"vector\": [1]}\n{\"term\": \"a\", \"vector\": [2]}\n";
    assert!(EmbeddingTable::parse(dup).is_err());
    assert!(EmbeddingTable::parse("").is_err());
    assert!(EmbeddingTable::parse("{\"term\": \"a\", \"vector\": [1]}").is_err());
}

#[test]
fn missing_terms_are_reported() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("emb.jsonl");
    std::fs::write(&path, EMBEDDINGS).unwrap();
    let wanted = vec!["racial segregation".to_string(), "school segregation".to_string()];
    let (table, missing) = load_embeddings(&path, &wanted).unwrap();
    assert_eq!(table.len(), 5);
    assert_eq!(missing, ["school segregation"]);
}

#[test]
fn embeddings_to_type_network() {
    let t = EmbeddingTable::parse(EMBEDDINGS).unwrap();
    let d = cosine_distance_matrix(&t).unwrap();
    let dg = agglomerative_complete(&d);
    assert_eq!(dg.merges.len(), 4);
    let clusters = cut_dendrogram(&dg, CutCriterion::NClusters(3)).unwrap();
    assert_eq!(clusters, [0, 0, 1, 1, 2]);

    let csv = "form,label1,label2\n\
               cluster:0,Ethnoracial\n\
               cluster:1,Spatial\n\
               cluster:2,Gender\n\
               urban segregation,Spatial,Urban\n";
    let file = LabelingFile::read(csv.as_bytes()).unwrap();
    let universe: BTreeSet<String> = ["Ethnoracial", "Spatial", "Gender", "Urban"].map(String::from).into();
    let labeling = apply_labeling(&terms(&t), &clusters, &file, Some(&universe)).unwrap();
    assert_eq!(labeling.len(), 5);
    let net = type_network(&labeling);
    let freq: Vec<(&str, usize)> = net.types.iter().map(|n| (n.label.as_str(), n.freq)).collect();
    assert_eq!(freq, [("Ethnoracial", 2), ("Gender", 1), ("Spatial", 2), ("Urban", 1)]);
    assert_eq!(net.type_edges.len(), 1);
    assert_eq!((net.type_edges[0].a.as_str(), net.type_edges[0].b.as_str(), net.type_edges[0].weight), ("Spatial", "Urban", 1));

    let mut out = Vec::new();
    labeling.write_csv(&mut out).unwrap();
    let text = String::from_utf8(out).unwrap();
    assert!(text.starts_with("form,label1,"));
    assert!(text.contains("urban segregation,Spatial,Urban"));
}

#[test]
fn labeling_errors() {
    let terms = vec!["a segregation".to_string()];
    let unknown_form = LabelingFile::read("form,label1\nb segregation,X\n".as_bytes()).unwrap();
    assert!(apply_labeling(&terms, &[0], &unknown_form, None).is_err());
    let file = LabelingFile::read("form,label1\na segregation,X\n".as_bytes()).unwrap();
    let universe: BTreeSet<String> = ["Y".to_string()].into();
    assert!(apply_labeling(&terms, &[0], &file, Some(&universe)).is_err());
    assert!(LabelingFile::read("form,l\ncluster:0,A,B\n".as_bytes()).is_err());
    let nine = format!("form{}\na segregation{}\n", ",l".repeat(9), (0..9).map(|i| format!(",T{i}")).collect::<String>());
    assert!(LabelingFile::read(nine.as_bytes()).is_err());
}

proptest! {
    #[test]
    fn cosine_matrix_is_a_dissimilarity(rows in prop::collection::vec(prop::collection::vec(-5.0f64..5.0, 4), 2..12)) {
        prop_assume!(rows.iter().all(|r| r.iter().map(|x| x * x).sum::<f64>() > 1e-6));
        let table = EmbeddingTable::new(
            4,
            "random",
            rows.into_iter().enumerate().map(|(i, v)| (format!("t{i}"), v)).collect(),
        ).unwrap();
        let d = cosine_distance_matrix(&table).unwrap();
        for i in 0..d.len() {
            prop_assert_eq!(d.get(i, i), 0.0);
            for j in 0..d.len() {
                prop_assert_eq!(d.get(i, j), d.get(j, i));
                prop_assert!((0.0..=2.0).contains(&d.get(i, j)));
            }
        }
        let dg = agglomerative_complete(&d);
        prop_assert!(dg.merges.windows(2).all(|w| w[0].distance <= w[1].distance));
        for k in 1..=d.len() {
            let labels = cut_dendrogram(&dg, CutCriterion::NClusters(k)).unwrap();
            prop_assert_eq!(labels.iter().collect::<BTreeSet<_>>().len(), k);
        }
    }

    #[test]
    fn label_sets_stay_within_bounds(n in 0usize..12) {
        let mut l = TypeLabeling::default();
        let labels: Vec<String> = (0..n).map(|i| format!("T{i}")).collect();
        let ok = l.set("x segregation", labels).is_ok();
        prop_assert_eq!(ok, (1..=MAX_LABELS).contains(&n));
    }
}
