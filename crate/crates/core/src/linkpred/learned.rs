use std::collections::HashSet;
use std::fmt;
use std::fmt::Write as _;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graphdata::{canonical, AttributedGraph, Edge};
use crate::numcore::{dot, DenseMatrix, ParamStore, SparseWeighted};

use super::candidates::CandidateSets;
use super::mlp::{embed, LinkPredictorParams};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Provenance {
    KeptOriginal,
    Densified,
}

impl fmt::Display for Provenance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Provenance::KeptOriginal => "kept-original",
            Provenance::Densified => "densified",
        })
    }
}

impl FromStr for Provenance {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "kept-original" => Ok(Provenance::KeptOriginal),
            "densified" => Ok(Provenance::Densified),
            other => Err(format!("unknown provenance {other:?}")),
        }
    }
}

/// Every unordered pair the predictor scores: original edges plus
/// candidate pairs, each once, sorted.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PairUniverse {
    num_nodes: usize,
    pairs: Vec<Edge>,
    original: Vec<bool>,
}

impl PairUniverse {
    pub fn new(g: &AttributedGraph, candidates: &CandidateSets) -> Self {
        let n = g.num_nodes();
        let mut pairs: Vec<Edge> = g.edges().to_vec();
        for i in 0..candidates.num_nodes() {
            for &j in candidates.of(i) {
                if i != j {
                    pairs.push(canonical(i, j));
                }
            }
        }
        pairs.sort_unstable();
        pairs.dedup();
        let edges: HashSet<Edge> = g.edge_set();
        let original = pairs.iter().map(|e| edges.contains(e)).collect();
        Self {
            num_nodes: n,
            pairs,
            original,
        }
    }

    pub fn num_nodes(&self) -> usize {
        self.num_nodes
    }

    pub fn pairs(&self) -> &[Edge] {
        &self.pairs
    }

    pub fn is_original(&self, k: usize) -> bool {
        self.original[k]
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    /// Raw inner products `z_i · z_j`, one per pair.
    pub fn scores(&self, z: &DenseMatrix) -> Vec<f64> {
        self.pairs.iter().map(|&(i, j)| dot(z.row(i), z.row(j))).collect()
    }
}

/// `min(1, ReLU(s))`
#[inline]
pub fn clamped_weight(score: f64) -> f64 {
    score.clamp(0.0, 1.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LearnedEdge {
    pub u: usize,
    pub v: usize,
    pub weight: f64,
    pub provenance: Provenance,
}

/// Thresholded, clamped predictor weights over the pair universe.
/// Entries satisfy `u < v` and `T_l < weight <= 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct LearnedGraph {
    num_nodes: usize,
    threshold: f64,
    edges: Vec<LearnedEdge>,
}

impl LearnedGraph {
    pub fn num_nodes(&self) -> usize {
        self.num_nodes
    }

    pub fn threshold(&self) -> f64 {
        self.threshold
    }

    pub fn edges(&self) -> &[LearnedEdge] {
        &self.edges
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    pub fn weight(&self, u: usize, v: usize) -> Option<f64> {
        self.position(u, v).map(|k| self.edges[k].weight)
    }

    /// Index of the pair `{u, v}` in [`edges`](Self::edges).
    pub fn position(&self, u: usize, v: usize) -> Option<usize> {
        let key = canonical(u, v);
        self.edges.binary_search_by(|e| (e.u, e.v).cmp(&key)).ok()
    }

    /// Symmetric sparse adjacency (no diagonal).
    pub fn to_sparse(&self) -> SparseWeighted {
        let pairs: Vec<_> = self.edges.iter().map(|e| (e.u, e.v, e.weight)).collect();
        SparseWeighted::from_undirected(self.num_nodes, &pairs)
            .expect("learned edges are canonical with weights in (T_l, 1]")
    }

    /// Builds from per-pair scores of a [`PairUniverse`].
    pub fn from_scores(universe: &PairUniverse, scores: &[f64], t_l: f64) -> Self {
        let edges = universe
            .pairs()
            .iter()
            .zip(scores)
            .enumerate()
            .filter_map(|(k, (&(u, v), &s))| {
                let weight = clamped_weight(s);
                (weight > t_l).then_some(LearnedEdge {
                    u,
                    v,
                    weight,
                    provenance: if universe.is_original(k) {
                        Provenance::KeptOriginal
                    } else {
                        Provenance::Densified
                    },
                })
            })
            .collect();
        Self {
            num_nodes: universe.num_nodes(),
            threshold: t_l,
            edges,
        }
    }

    /// `u<TAB>v<TAB>weight<TAB>provenance`, one line per unordered pair.
    pub fn to_tsv(&self) -> String {
        let mut out = String::new();
        for e in &self.edges {
            let _ = writeln!(out, "{}\t{}\t{}\t{}", e.u, e.v, e.weight, e.provenance);
        }
        out
    }

    /// Parses [`to_tsv`](Self::to_tsv) output.
    pub fn parse_tsv(text: &str, num_nodes: usize, threshold: f64, path: &Path) -> Result<Self> {
        let err = |line: usize, msg: String| Error::Format {
            path: path.to_path_buf(),
            line,
            msg,
        };
        let mut edges = Vec::new();
        for (k, line) in text.lines().enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            let cols: Vec<&str> = line.split('\t').collect();
            if cols.len() != 4 {
                return Err(err(k + 1, "expected u, v, weight, provenance".into()));
            }
            let u: usize = cols[0].parse().map_err(|_| err(k + 1, format!("bad node {:?}", cols[0])))?;
            let v: usize = cols[1].parse().map_err(|_| err(k + 1, format!("bad node {:?}", cols[1])))?;
            let weight: f64 = cols[2].parse().map_err(|_| err(k + 1, format!("bad weight {:?}", cols[2])))?;
            let provenance = cols[3].parse().map_err(|e| err(k + 1, e))?;
            if u >= v || v >= num_nodes.max(v + 1) {
                return Err(err(k + 1, format!("pair ({u}, {v}) is not canonical")));
            }
            edges.push(LearnedEdge { u, v, weight, provenance });
        }
        edges.sort_by_key(|e| (e.u, e.v));
        let num_nodes = edges.iter().map(|e| e.v + 1).max().unwrap_or(0).max(num_nodes);
        Ok(Self {
            num_nodes,
            threshold,
            edges,
        })
    }
}

/// Embeds the features and keeps every universe pair whose clamped
/// weight exceeds `t_l`.
pub fn build_learned_graph(
    store: &ParamStore,
    params: &LinkPredictorParams,
    g: &AttributedGraph,
    candidates: &CandidateSets,
    t_l: f64,
) -> Result<LearnedGraph> {
    if !(0.0..1.0).contains(&t_l) {
        return Err(Error::Config(format!("T_l must lie in [0, 1), got {t_l}")));
    }
    let z = embed(store, params, g.features())?;
    let universe = PairUniverse::new(g, candidates);
    Ok(LearnedGraph::from_scores(&universe, &universe.scores(&z), t_l))
}
