//! Attributed graphs: representation, file formats, label splits, random
//! structural noise, involvement analysis and a synthetic generator.

pub mod graph;
pub mod involvement;
pub mod io;
pub mod noise;
pub mod split;
pub mod synthetic;

pub use graph::{canonical, AttributedGraph, CanonStats, Edge, Masks, NoiseRecord};
pub use involvement::{involvement_sweep, mean_std, uninvolved_rate, SweepAxis, SweepConfig, SweepRow};
pub use io::{load_cora, load_dataset, load_graph, read_edges, save_dataset, write_edge_file, CoraStats};
pub use noise::{inject_random_noise, sample_non_edges};
pub use split::{split_labels, train_count};
pub use synthetic::{generate_planted_partition, PlantedPartition};
