//! Graph ingestion, SBM sampling, k-means and SCORE+ spectral community
//! detection.

mod graph;
mod kmeans;
mod score_plus;

pub use graph::{load_edge_list, load_node_labels, parse_edge_list, sample_sbm, Graph, LoadReport};
pub use kmeans::{kmeans, wcss, KMeansResult};
pub use score_plus::{
    regularized_matrix, score_plus, score_plus_with_embedding, sweep_communities, sweep_seed,
    ScorePlusParams, SpectralEmbedding, VANISHING_ENTRY,
};
