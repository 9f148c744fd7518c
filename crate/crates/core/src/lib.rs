//! Joint graph denoising/densification and GCN node classification for
//! noisy, sparsely labeled graphs.
//!
//! The pipeline: an MLP link predictor scores original edges and
//! feature-similar candidate pairs, the thresholded scores form a learned
//! weighted graph, and a two-layer GCN classifies nodes on that graph. Both
//! networks are optimized together under a weighted sum of classification,
//! edge-reconstruction and label-smoothness losses.

// NaN-rejecting checks are written as negated comparisons on purpose.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod gnnclf;
pub mod graphdata;
pub mod linkpred;
pub mod numcore;
pub mod rng;
pub mod trainer;

pub use error::{Error, Result};
