#![allow(dead_code)]

use rsgnn::graphdata::{
    generate_planted_partition, inject_random_noise, split_labels, AttributedGraph, Masks, NoiseRecord,
    PlantedPartition,
};
use rsgnn::numcore::DenseMatrix;
use rsgnn::trainer::{TrainConfig, Variant};

/// Six nodes, two classes, a cycle plus one chord.
pub fn six_node_graph() -> AttributedGraph {
    let x = DenseMatrix::from_rows(&[
        [0.9, 0.1, 0.3],
        [0.8, 0.3, 0.0],
        [0.1, 0.9, 0.2],
        [0.2, 0.7, 0.6],
        [0.7, 0.2, 0.5],
        [0.0, 1.0, 0.4],
    ])
    .unwrap();
    let edges = vec![(0, 1), (1, 2), (2, 3), (3, 4), (4, 5), (0, 5), (1, 4)];
    let labels = [0, 0, 1, 1, 0, 1].into_iter().map(Some).collect();
    let (g, _) = AttributedGraph::new(x, edges, labels, 2).unwrap();
    g.with_masks(Masks {
        train: vec![0, 3],
        val: vec![1, 2],
        test: vec![4, 5],
    })
    .unwrap()
}

/// Small widths and a low smoothness threshold so every term is active.
pub fn six_node_config(variant: Variant) -> TrainConfig {
    TrainConfig {
        alpha: 0.3,
        beta: 0.5,
        sigma: 1.5,
        q: 2,
        k: 2,
        t_l: 0.1,
        t_h: 0.3,
        predictor_hidden: 5,
        gcn_hidden: 4,
        max_epochs: 40,
        patience: 10,
        learning_rate: 0.01,
        seed: 3,
        variant,
        ..Default::default()
    }
}

pub const TESTBED_NODES: usize = 400;
pub const TESTBED_CLASSES: usize = 4;
pub const TESTBED_FEATURE_DIM: usize = 16;
pub const TESTBED_VAL: usize = 40;
pub const TESTBED_TEST: usize = 200;
pub const TESTBED_K: usize = 20;

/// Noisy planted-partition testbed: 30% injected random edges, 1% labels.
pub fn testbed(seed: u64) -> (AttributedGraph, NoiseRecord) {
    let params = PlantedPartition {
        num_nodes: TESTBED_NODES,
        num_classes: TESTBED_CLASSES,
        p_in: 0.1,
        p_out: 0.01,
        feature_dim: TESTBED_FEATURE_DIM,
        feature_noise: 0.3,
        seed,
    };
    let clean = generate_planted_partition(&params).unwrap();
    let (noisy, record) = inject_random_noise(&clean, 0.3, 1.0, seed).unwrap();
    (split_labels(&noisy, 0.01, TESTBED_VAL, TESTBED_TEST, seed).unwrap(), record)
}

pub fn testbed_config(variant: Variant, seed: u64) -> TrainConfig {
    TrainConfig {
        k: TESTBED_K,
        seed,
        variant,
        ..Default::default()
    }
}
