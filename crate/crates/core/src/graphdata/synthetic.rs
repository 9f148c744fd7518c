use rand::Rng as _;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numcore::DenseMatrix;
use crate::rng;

use super::graph::AttributedGraph;

/// Parameters of a planted-partition graph with class-centroid features.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlantedPartition {
    pub num_nodes: usize,
    pub num_classes: usize,
    pub p_in: f64,
    pub p_out: f64,
    pub feature_dim: usize,
    pub feature_noise: f64,
    pub seed: u64,
}

/// Node `i` belongs to class `i mod C`. Same-class pairs connect with
/// probability `p_in`, others with `p_out`. Features are the unit one-hot of
/// the class plus i.i.d. `N(0, feature_noise²)` noise.
pub fn generate_planted_partition(params: &PlantedPartition) -> Result<AttributedGraph> {
    let &PlantedPartition {
        num_nodes: n,
        num_classes: c,
        p_in,
        p_out,
        feature_dim: d,
        feature_noise,
        seed,
    } = params;
    if !(0.0 <= p_out && p_out < p_in && p_in <= 1.0) {
        return Err(Error::Config(format!(
            "need 0 <= p_out < p_in <= 1, got p_in={p_in}, p_out={p_out}"
        )));
    }
    if c == 0 || d < c {
        return Err(Error::Config(format!(
            "feature_dim ({d}) must be at least num_classes ({c}) > 0"
        )));
    }
    if !(feature_noise >= 0.0) {
        return Err(Error::Config(format!("feature noise {feature_noise} must be >= 0")));
    }
    let mut rng = rng::seeded(seed, rng::stream::GENERATOR);
    let labels: Vec<usize> = (0..n).map(|i| i % c).collect();

    let mut x = DenseMatrix::zeros(n, d);
    let normal = Normal::new(0.0, feature_noise).map_err(|e| Error::Config(e.to_string()))?;
    for (i, &label) in labels.iter().enumerate() {
        let row = x.row_mut(i);
        if feature_noise > 0.0 {
            for v in row.iter_mut() {
                *v = normal.sample(&mut rng);
            }
        }
        row[label] += 1.0;
    }

    let mut edges = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            let p = if labels[u] == labels[v] { p_in } else { p_out };
            if rng.random::<f64>() < p {
                edges.push((u, v));
            }
        }
    }
    let (g, _) = AttributedGraph::new(x, edges, labels.into_iter().map(Some).collect(), c)?;
    Ok(g)
}
