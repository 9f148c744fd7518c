//! MLP link predictor: embeddings, pairwise weights, weighted edge
//! reconstruction, cosine candidate sets and the learned graph.

pub mod candidates;
pub mod learned;
pub mod mlp;
pub mod reconstruction;

pub use candidates::{build_candidates, CandidateSets};
pub use learned::{build_learned_graph, clamped_weight, LearnedEdge, LearnedGraph, PairUniverse, Provenance};
pub use mlp::{embed, embed_backward, embed_cached, EmbedCache, LinkPredictorParams};
pub use reconstruction::{
    edge_weight, loss_reconstruction, sample_negatives, similarity_weight, FeatureRows, NegativeDraw,
    NegativeSampler, NegativeSet, ReconstructionProblem, SampleSign, MAX_NEGATIVE_EXPONENT,
};
