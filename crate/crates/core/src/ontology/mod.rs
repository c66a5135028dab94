//! Bottom-up ontology: embedding ingestion, complete-linkage clustering of
//! forms, multi-label types and the type network.

mod cluster;
mod embedding;
mod labeling;

pub use cluster::{agglomerative_complete, cut_dendrogram, CutCriterion, Dendrogram, Merge};
pub use embedding::{
    cosine_distance_matrix, lexical_fallback_similarity, load_embeddings, DistanceMatrix, EmbeddingTable,
};
pub use labeling::{
    apply_labeling, type_network, FormNode, LabelingFile, OntologyGraph, TypeEdge, TypeLabeling, TypeNode,
    CLUSTER_PREFIX, DEFAULT_TYPE_COUNT, MAX_LABELS,
};
