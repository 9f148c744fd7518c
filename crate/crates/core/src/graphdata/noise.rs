use std::collections::HashSet;

use rand::seq::index;
use rand::Rng as _;

use crate::error::{Error, Result};
use crate::rng::{self, Rng};

use super::graph::{canonical, AttributedGraph, Edge, NoiseRecord};

/// Draws `count` distinct node pairs that are not in `existing`, uniformly.
/// Returned in draw order.
pub fn sample_non_edges(
    num_nodes: usize,
    existing: &HashSet<Edge>,
    count: usize,
    rng: &mut Rng,
) -> Result<Vec<Edge>> {
    if count == 0 {
        return Ok(Vec::new());
    }
    let total = num_nodes * num_nodes.saturating_sub(1) / 2;
    let available = total - existing.len();
    if count > available {
        return Err(Error::Config(format!(
            "requested {count} new edges but only {available} node pairs are free"
        )));
    }
    if count * 2 > available {
        let mut free = Vec::with_capacity(available);
        for u in 0..num_nodes {
            for v in u + 1..num_nodes {
                if !existing.contains(&(u, v)) {
                    free.push((u, v));
                }
            }
        }
        return Ok(index::sample(rng, free.len(), count)
            .into_iter()
            .map(|k| free[k])
            .collect());
    }
    let mut chosen = HashSet::with_capacity(count);
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let u = rng.random_range(0..num_nodes);
        let v = rng.random_range(0..num_nodes);
        if u == v {
            continue;
        }
        let e = canonical(u, v);
        if existing.contains(&e) || !chosen.insert(e) {
            continue;
        }
        out.push(e);
    }
    Ok(out)
}

/// Adds `round(ptb · |E| · add_fraction)` uniformly random non-edges and
/// removes `round(ptb · |E| · (1 − add_fraction))` uniformly random edges.
pub fn inject_random_noise(
    g: &AttributedGraph,
    ptb_rate: f64,
    add_fraction: f64,
    seed: u64,
) -> Result<(AttributedGraph, NoiseRecord)> {
    if !(ptb_rate >= 0.0 && ptb_rate.is_finite()) {
        return Err(Error::Config(format!("perturbation rate {ptb_rate} must be >= 0")));
    }
    if !(0.0..=1.0).contains(&add_fraction) {
        return Err(Error::Config(format!("add fraction {add_fraction} outside [0, 1]")));
    }
    let m = g.num_edges() as f64;
    let n_add = (ptb_rate * m * add_fraction).round() as usize;
    let n_remove = (ptb_rate * m * (1.0 - add_fraction)).round() as usize;
    if n_remove > g.num_edges() {
        return Err(Error::Config(format!(
            "cannot remove {n_remove} edges from a graph with {}",
            g.num_edges()
        )));
    }
    let mut rng = rng::seeded(seed, rng::stream::NOISE);
    let existing = g.edge_set();
    let mut added = sample_non_edges(g.num_nodes(), &existing, n_add, &mut rng)?;
    let mut removed: Vec<Edge> = index::sample(&mut rng, g.num_edges(), n_remove)
        .into_iter()
        .map(|k| g.edges()[k])
        .collect();
    added.sort_unstable();
    removed.sort_unstable();

    let removed_set: HashSet<Edge> = removed.iter().copied().collect();
    let edges = g
        .edges()
        .iter()
        .copied()
        .filter(|e| !removed_set.contains(e))
        .chain(added.iter().copied());
    let perturbed = g.with_edges(edges)?;
    Ok((
        perturbed,
        NoiseRecord {
            added_edges: added,
            removed_edges: removed,
            perturbation_rate: ptb_rate,
            add_fraction,
        },
    ))
}
