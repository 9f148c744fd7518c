//! How many nodes a K-layer message-passing model never reaches from the
//! labeled set, and how that depends on label rate and edge density.

use std::collections::VecDeque;

use rand::seq::index;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::{self, Rng};

use super::graph::AttributedGraph;
use super::noise::sample_non_edges;
use super::split::train_count;

/// Fraction of nodes farther than `hops` from every training node.
pub fn uninvolved_rate(g: &AttributedGraph, hops: usize) -> Result<f64> {
    uninvolved_from(&g.adjacency(), g.train(), hops)
}

fn uninvolved_from(adj: &[Vec<usize>], sources: &[usize], hops: usize) -> Result<f64> {
    if sources.is_empty() {
        return Err(Error::Config("uninvolved rate needs a non-empty train mask".into()));
    }
    let n = adj.len();
    let mut dist = vec![usize::MAX; n];
    let mut queue = VecDeque::new();
    for &s in sources {
        if dist[s] != 0 {
            dist[s] = 0;
            queue.push_back(s);
        }
    }
    while let Some(u) = queue.pop_front() {
        if dist[u] == hops {
            continue;
        }
        for &v in &adj[u] {
            if dist[v] == usize::MAX {
                dist[v] = dist[u] + 1;
                queue.push_back(v);
            }
        }
    }
    let reached = dist.iter().filter(|&&d| d != usize::MAX).count();
    Ok((n - reached) as f64 / n as f64)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepAxis {
    LabelRate,
    Density,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub axis: SweepAxis,
    pub setting: f64,
    pub mean: f64,
    pub std: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepConfig {
    pub label_rates: Vec<f64>,
    /// `|E_A| / |E|` multipliers, each ≥ 1.
    pub densities: Vec<f64>,
    pub hops: usize,
    pub trials: usize,
    pub seed: u64,
    /// Label rate held fixed along the density axis.
    pub density_label_rate: f64,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self {
            label_rates: vec![0.01, 0.02, 0.05, 0.1, 0.15, 0.2, 0.25],
            densities: vec![1.0, 1.5, 2.0, 2.5, 3.0],
            hops: 2,
            trials: 5,
            seed: 0,
            density_label_rate: 0.01,
        }
    }
}

/// Population mean and standard deviation.
pub fn mean_std(values: &[f64]) -> (f64, f64) {
    if values.is_empty() {
        return (f64::NAN, f64::NAN);
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
    (mean, var.sqrt())
}

/// One trial: densify by `density`, then label `round(rate · N)` random
/// nodes (at least one) and measure.
fn trial(g: &AttributedGraph, density: f64, label_rate: f64, hops: usize, rng: &mut Rng) -> Result<f64> {
    let n = g.num_nodes();
    let extra = ((density - 1.0) * g.num_edges() as f64).round() as usize;
    let mut adj = g.adjacency();
    for (u, v) in sample_non_edges(n, &g.edge_set(), extra, rng)? {
        adj[u].push(v);
        adj[v].push(u);
    }
    let k = train_count(n, label_rate).clamp(1, n);
    let sources = index::sample(rng, n, k).into_vec();
    uninvolved_from(&adj, &sources, hops)
}

/// Mean and std of the uninvolved rate over `trials` random label draws,
/// along the label-rate axis (raw graph) and the density axis (fixed label
/// rate). Trial `t` uses seed `seed + t`, shared by both axes.
pub fn involvement_sweep(g: &AttributedGraph, cfg: &SweepConfig) -> Result<Vec<SweepRow>> {
    if cfg.trials == 0 {
        return Err(Error::Config("sweep needs at least one trial".into()));
    }
    if g.num_nodes() == 0 {
        return Err(Error::Config("sweep needs a non-empty graph".into()));
    }
    if let Some(r) = cfg
        .label_rates
        .iter()
        .chain([&cfg.density_label_rate])
        .find(|r| !(0.0..=1.0).contains(*r))
    {
        return Err(Error::Config(format!("label rate {r} outside [0, 1]")));
    }
    if let Some(d) = cfg.densities.iter().find(|d| !(**d >= 1.0)) {
        return Err(Error::Config(format!("density multiplier {d} must be >= 1")));
    }
    let run = |density: f64, rate: f64| -> Result<(f64, f64)> {
        let values = (0..cfg.trials)
            .map(|t| {
                let mut rng = rng::seeded(cfg.seed + t as u64, rng::stream::SWEEP);
                trial(g, density, rate, cfg.hops, &mut rng)
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(mean_std(&values))
    };
    let mut rows = Vec::new();
    for &rate in &cfg.label_rates {
        let (mean, std) = run(1.0, rate)?;
        rows.push(SweepRow { axis: SweepAxis::LabelRate, setting: rate, mean, std });
    }
    for &density in &cfg.densities {
        let (mean, std) = run(density, cfg.density_label_rate)?;
        rows.push(SweepRow { axis: SweepAxis::Density, setting: density, mean, std });
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graphdata::graph::Masks;
    use crate::numcore::DenseMatrix;

    fn path5(train: Vec<usize>) -> AttributedGraph {
        let edges = vec![(0, 1), (1, 2), (2, 3), (3, 4)];
        let (g, _) = AttributedGraph::new(DenseMatrix::zeros(5, 1), edges, vec![Some(0); 5], 1).unwrap();
        g.with_masks(Masks { train, ..Masks::default() }).unwrap()
    }

    #[test]
    fn hand_bfs_on_path() {
        assert_eq!(uninvolved_rate(&path5(vec![0]), 2).unwrap(), 0.4);
    }

    #[test]
    fn all_labeled_is_zero() {
        assert_eq!(uninvolved_rate(&path5((0..5).collect()), 2).unwrap(), 0.0);
    }

    #[test]
    fn zero_hops_is_unlabeled_fraction() {
        assert_eq!(uninvolved_rate(&path5(vec![1, 3]), 0).unwrap(), 0.6);
    }

    #[test]
    fn empty_train_rejected() {
        assert!(matches!(uninvolved_rate(&path5(vec![]), 2), Err(Error::Config(_))));
    }

    #[test]
    fn full_label_rate_row_is_zero() {
        let cfg = SweepConfig {
            label_rates: vec![1.0],
            densities: vec![],
            trials: 3,
            ..SweepConfig::default()
        };
        let rows = involvement_sweep(&path5(vec![]), &cfg).unwrap();
        assert_eq!(rows.len(), 1);
        assert_eq!((rows[0].mean, rows[0].std), (0.0, 0.0));
    }

    #[test]
    fn unit_density_matches_raw_label_axis() {
        let cfg = SweepConfig {
            label_rates: vec![0.01],
            densities: vec![1.0],
            ..SweepConfig::default()
        };
        let rows = involvement_sweep(&path5(vec![]), &cfg).unwrap();
        assert_eq!(rows[0].mean, rows[1].mean);
        assert_eq!(rows[0].std, rows[1].std);
    }

    #[test]
    fn population_std() {
        let (m, s) = mean_std(&[1.0, 3.0]);
        assert_eq!((m, s), (2.0, 1.0));
    }
}
