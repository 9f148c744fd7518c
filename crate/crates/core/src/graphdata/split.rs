use rand::seq::SliceRandom;

use crate::error::{Error, Result};
use crate::rng;

use super::graph::{AttributedGraph, Masks};

/// Number of training nodes for a label rate: `round(rate · N)`.
pub fn train_count(num_nodes: usize, label_rate: f64) -> usize {
    (label_rate * num_nodes as f64).round() as usize
}

/// Samples disjoint train/val/test masks uniformly among labeled nodes.
pub fn split_labels(
    g: &AttributedGraph,
    label_rate: f64,
    val_size: usize,
    test_size: usize,
    seed: u64,
) -> Result<AttributedGraph> {
    if !(0.0..=1.0).contains(&label_rate) {
        return Err(Error::Config(format!("label rate {label_rate} outside [0, 1]")));
    }
    let n_train = train_count(g.num_nodes(), label_rate);
    let mut labeled: Vec<usize> = (0..g.num_nodes()).filter(|&i| g.labels()[i].is_some()).collect();
    if n_train + val_size + test_size > labeled.len() {
        return Err(Error::Config(format!(
            "split needs {n_train} train + {val_size} val + {test_size} test nodes but only {} are labeled",
            labeled.len()
        )));
    }
    let mut rng = rng::seeded(seed, rng::stream::SPLIT);
    labeled.shuffle(&mut rng);
    let masks = Masks {
        train: labeled[..n_train].to_vec(),
        val: labeled[n_train..n_train + val_size].to_vec(),
        test: labeled[n_train + val_size..n_train + val_size + test_size].to_vec(),
    };
    g.clone().with_masks(masks)
}
