//! Two-layer GCN classifier over a weighted graph, its cross-entropy loss
//! and the label-smoothness regularizer.

pub mod gcn;
pub mod loss;
pub mod normalize;

pub use gcn::{gcn_backward, gcn_forward, gcn_forward_cached, gcn_regime, Dropout, GcnCache, GcnParams};
pub use loss::{
    build_smoothness_mask, classification_loss_and_grad, loss_classification, loss_smoothness,
    smoothness_loss_and_grad, MaskEntry, SmoothnessMask,
};
pub use normalize::{accumulate_adjacency_grad, normalize_adjacency, NormalizedAdjacency};
