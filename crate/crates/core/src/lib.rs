//! Corpus-to-ontology toolkit for "X segregation" term forms.
//!
//! The pipeline runs in stages, each backed by one module:
//!
//! - [`corpus`]: ingest a bibliographic CSV/TSV export into an immutable store.
//! - [`extract`]: mine bigram/trigram candidates that end in an anchor token.
//! - [`codebook`]: record coder verdicts across rounds and derive the validated form set.
//! - [`metrics`]: diversity, growth, disciplinarity and intersectionality indices.
//! - [`conet`]: the form co-occurrence network, centralities and Louvain clustering.
//! - [`community`]: modularity, Louvain and the refined local-moving variant.
//! - [`scholnet`]: co-citation, journal coupling and country co-authorship networks.
//! - [`ontology`]: embedding-based complete-linkage clustering and the type network.
//! - [`export`]: GraphML, JSON and CSV writers plus simple SVG line plots.
//!
//! Data-parallel loops go through [`par`], which uses rayon when the
//! `parallel` feature is enabled and plain iterators otherwise. Every
//! parallel reduction merges partial results in input order, so outputs are
//! identical under either build.

pub mod codebook;
pub mod community;
pub mod conet;
pub mod corpus;
pub mod error;
pub mod export;
pub mod extract;
pub mod forms;
pub mod graph;
pub mod metrics;
pub mod ontology;
pub mod par;
pub mod scholnet;
pub mod text;

pub use error::{Error, Result};
