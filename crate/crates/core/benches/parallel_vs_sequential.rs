//! Hot loops that go through the parallel switch. Run once per build and
//! compare with criterion baselines:
//!
//! ```text
//! cargo bench -p segforms-core -- --save-baseline parallel
//! cargo bench -p segforms-core --no-default-features -- --baseline parallel
//! ```

use std::collections::BTreeSet;
use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use segforms::conet::betweenness;
use segforms::corpus::{CorpusStore, DocumentRecord};
use segforms::extract::{extract_candidates, StopLexicon};
use segforms::graph::{Node, WeightedGraph};
use segforms::ontology::{cosine_distance_matrix, EmbeddingTable};
use segforms::scholnet::build_cocitation;

const WORDS: [&str; 12] = [
    "racial", "residential", "school", "urban", "gender", "occupational", "the", "of", "and", "income", "spatial",
    "ethnic",
];

fn corpus(docs: usize, seed: u64) -> CorpusStore {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let records = (0..docs)
        .map(|i| {
            let mut r = DocumentRecord::new(format!("B{i:05}"), rng.random_range(1950..2020));
            let words: Vec<&str> = (0..200)
                .map(|_| if rng.random_bool(0.1) { "segregation" } else { WORDS[rng.random_range(0..WORDS.len())] })
                .collect();
            r.abstract_text = words.join(" ");
            r.references = (0..30)
                .map(|_| {
                    let k = rng.random_range(0..400);
                    format!("Author{k} A., Title number {k}, Journal, ({})", 1950 + k % 60)
                })
                .collect();
            r
        })
        .collect();
    CorpusStore::from_records(records)
}

fn random_graph(n: usize, p: f64, seed: u64) -> WeightedGraph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut g = WeightedGraph::new();
    for i in 0..n {
        g.add_node(Node::new(format!("v{i}")));
    }
    for u in 0..n {
        for v in u + 1..n {
            if rng.random_bool(p) {
                g.add_edge(u, v, 1, None).unwrap();
            }
        }
    }
    g
}

fn embeddings(n: usize, dim: usize, seed: u64) -> EmbeddingTable {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let rows = (0..n)
        .map(|i| (format!("t{i}"), (0..dim).map(|_| rng.random_range(-1.0..1.0)).collect()))
        .collect();
    EmbeddingTable::new(dim, "bench", rows).unwrap()
}

fn benches(c: &mut Criterion) {
    let mode = if segforms::par::is_parallel() { "parallel" } else { "sequential" };
    eprintln!("segforms build: {mode}");

    let g = random_graph(400, 0.02, 1);
    c.bench_function("betweenness/400", |b| b.iter(|| betweenness(black_box(&g))));

    let store = corpus(2000, 2);
    let lex = StopLexicon::bundled();
    c.bench_function("extract/2000_docs", |b| {
        b.iter(|| extract_candidates(black_box(&store), "segregation", &lex).unwrap())
    });

    let none = BTreeSet::new();
    c.bench_function("cocitation/2000_docs", |b| {
        b.iter(|| build_cocitation(black_box(&store), 2, 1000, &none).unwrap())
    });

    let t = embeddings(600, 128, 3);
    c.bench_function("cosine_matrix/600x128", |b| b.iter(|| cosine_distance_matrix(black_box(&t)).unwrap()));
}

criterion_group! {
    name = suite;
    config = Criterion::default().sample_size(20);
    targets = benches
}
criterion_main!(suite);
