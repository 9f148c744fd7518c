use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numcore::{DenseMatrix, SparseWeighted};

/// Canonical undirected edge, `0 <= .0 < .1`.
pub type Edge = (usize, usize);

pub fn canonical(u: usize, v: usize) -> Edge {
    if u < v {
        (u, v)
    } else {
        (v, u)
    }
}

/// Disjoint node sets, each sorted ascending.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Masks {
    pub train: Vec<usize>,
    pub val: Vec<usize>,
    pub test: Vec<usize>,
}

/// What canonicalization threw away while building a graph.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CanonStats {
    pub duplicate_edges: usize,
    pub self_loops: usize,
}

/// Node features, undirected edges, labels and train/val/test masks.
#[derive(Debug, Clone, PartialEq)]
pub struct AttributedGraph {
    features: DenseMatrix,
    edges: Vec<Edge>,
    labels: Vec<Option<usize>>,
    num_classes: usize,
    masks: Masks,
}

impl AttributedGraph {
    /// Canonicalizes `edges` (drops self-loops and duplicates, orders pairs)
    /// and validates labels against `num_classes`.
    pub fn new(
        features: DenseMatrix,
        edges: impl IntoIterator<Item = Edge>,
        labels: Vec<Option<usize>>,
        num_classes: usize,
    ) -> Result<(Self, CanonStats)> {
        let n = features.rows();
        if labels.len() != n {
            return Err(Error::Config(format!(
                "{} labels for {n} feature rows",
                labels.len()
            )));
        }
        if let Some(bad) = labels.iter().flatten().find(|&&c| c >= num_classes) {
            return Err(Error::Config(format!(
                "label {bad} out of range for {num_classes} classes"
            )));
        }
        let mut stats = CanonStats::default();
        let mut canon = Vec::new();
        for (u, v) in edges {
            if u >= n || v >= n {
                return Err(Error::Config(format!("edge ({u}, {v}) out of range for {n} nodes")));
            }
            if u == v {
                stats.self_loops += 1;
                continue;
            }
            canon.push(canonical(u, v));
        }
        canon.sort_unstable();
        let before = canon.len();
        canon.dedup();
        stats.duplicate_edges = before - canon.len();
        Ok((
            Self {
                features,
                edges: canon,
                labels,
                num_classes,
                masks: Masks::default(),
            },
            stats,
        ))
    }

    pub fn num_nodes(&self) -> usize {
        self.features.rows()
    }

    pub fn num_features(&self) -> usize {
        self.features.cols()
    }

    pub fn num_classes(&self) -> usize {
        self.num_classes
    }

    pub fn features(&self) -> &DenseMatrix {
        &self.features
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn labels(&self) -> &[Option<usize>] {
        &self.labels
    }

    pub fn masks(&self) -> &Masks {
        &self.masks
    }

    pub fn train(&self) -> &[usize] {
        &self.masks.train
    }

    /// Sorted neighbor lists.
    pub fn adjacency(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.num_nodes()];
        for &(u, v) in &self.edges {
            adj[u].push(v);
            adj[v].push(u);
        }
        for list in &mut adj {
            list.sort_unstable();
        }
        adj
    }

    pub fn edge_set(&self) -> HashSet<Edge> {
        self.edges.iter().copied().collect()
    }

    /// Binary adjacency as a symmetric sparse matrix.
    pub fn to_sparse(&self) -> SparseWeighted {
        let pairs: Vec<_> = self.edges.iter().map(|&(u, v)| (u, v, 1.0)).collect();
        SparseWeighted::from_undirected(self.num_nodes(), &pairs)
            .expect("canonical edges form a valid symmetric matrix")
    }

    /// Replaces the masks after checking they are disjoint, in range and
    /// only contain labeled nodes.
    pub fn with_masks(mut self, mut masks: Masks) -> Result<Self> {
        let n = self.num_nodes();
        let mut seen = vec![false; n];
        for (name, set) in [("train", &mut masks.train), ("val", &mut masks.val), ("test", &mut masks.test)] {
            set.sort_unstable();
            for &i in set.iter() {
                if i >= n {
                    return Err(Error::Config(format!("{name} mask node {i} out of range")));
                }
                if seen[i] {
                    return Err(Error::Config(format!("node {i} appears in more than one mask")));
                }
                if self.labels[i].is_none() {
                    return Err(Error::Config(format!("{name} mask node {i} has no label")));
                }
                seen[i] = true;
            }
        }
        self.masks = masks;
        Ok(self)
    }

    /// Same nodes, features, labels and masks over a different edge set.
    pub fn with_edges(&self, edges: impl IntoIterator<Item = Edge>) -> Result<Self> {
        let (mut g, _) = Self::new(
            self.features.clone(),
            edges,
            self.labels.clone(),
            self.num_classes,
        )?;
        g.masks = self.masks.clone();
        Ok(g)
    }
}

/// Ground truth of a random structural perturbation.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct NoiseRecord {
    pub added_edges: Vec<Edge>,
    pub removed_edges: Vec<Edge>,
    pub perturbation_rate: f64,
    pub add_fraction: f64,
}

impl NoiseRecord {
    pub fn is_empty(&self) -> bool {
        self.added_edges.is_empty() && self.removed_edges.is_empty()
    }
}
