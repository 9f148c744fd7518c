//! Feature-similarity-weighted edge reconstruction with negative sampling.

use rand::seq::index;
use rand::Rng as _;

use crate::error::{Error, Result};
use crate::graphdata::AttributedGraph;
use crate::numcore::{dot, DenseMatrix, ParamStore};
use crate::rng::Rng;

use super::mlp::{embed, LinkPredictorParams};

/// Upper bound on the exponent of a negative-sample weight.
pub const MAX_NEGATIVE_EXPONENT: f64 = 50.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SampleSign {
    Positive,
    Negative,
}

/// `exp(∓‖x_i − x_j‖² / σ²)`; the negative-sample exponent is capped at
/// [`MAX_NEGATIVE_EXPONENT`].
pub fn similarity_weight(x_i: &[f64], x_j: &[f64], sigma: f64, sign: SampleSign) -> f64 {
    weight_from_sq_dist(crate::numcore::squared_distance(x_i, x_j), sigma, sign)
}

pub fn weight_from_sq_dist(sq_dist: f64, sigma: f64, sign: SampleSign) -> f64 {
    let a = sq_dist / (sigma * sigma);
    match sign {
        SampleSign::Positive => (-a).exp(),
        SampleSign::Negative => a.min(MAX_NEGATIVE_EXPONENT).exp(),
    }
}

/// `ReLU(z_i · z_j)`, the raw (unclamped) predicted edge weight.
pub fn edge_weight(z: &DenseMatrix, i: usize, j: usize) -> Result<f64> {
    if i == j {
        return Err(Error::Domain(format!("self-edge ({i}, {i}) is never scored")));
    }
    Ok(dot(z.row(i), z.row(j)).max(0.0))
}

/// Result of drawing negatives for one node.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NegativeDraw {
    pub nodes: Vec<usize>,
    /// The node had fewer non-neighbors than requested; `nodes` holds all of them.
    pub exhausted: bool,
}

/// Uniform sampler over `V \ (N(i) ∪ {i})` without replacement.
#[derive(Debug, Clone)]
pub struct NegativeSampler {
    adj: Vec<Vec<usize>>,
    stamp: Vec<u32>,
    generation: u32,
}

impl NegativeSampler {
    /// `adj` must hold sorted neighbor lists.
    pub fn new(adj: Vec<Vec<usize>>) -> Self {
        let n = adj.len();
        Self {
            adj,
            stamp: vec![0; n],
            generation: 0,
        }
    }

    pub fn num_nodes(&self) -> usize {
        self.adj.len()
    }

    pub fn neighbors(&self, i: usize) -> &[usize] {
        &self.adj[i]
    }

    fn is_excluded(&self, i: usize, v: usize) -> bool {
        v == i || self.adj[i].binary_search(&v).is_ok()
    }

    pub fn sample(&mut self, i: usize, q: usize, rng: &mut Rng) -> NegativeDraw {
        let n = self.adj.len();
        let free = n - 1 - self.adj[i].len();
        if q >= free || q * 2 > free {
            let pool: Vec<usize> = (0..n).filter(|&v| !self.is_excluded(i, v)).collect();
            if q >= pool.len() {
                return NegativeDraw {
                    exhausted: q > pool.len(),
                    nodes: pool,
                };
            }
            let nodes = index::sample(rng, pool.len(), q)
                .into_iter()
                .map(|k| pool[k])
                .collect();
            return NegativeDraw { nodes, exhausted: false };
        }
        self.generation = self.generation.wrapping_add(1);
        if self.generation == 0 {
            self.stamp.fill(0);
            self.generation = 1;
        }
        let mut nodes = Vec::with_capacity(q);
        while nodes.len() < q {
            let v = rng.random_range(0..n);
            if self.stamp[v] == self.generation || self.is_excluded(i, v) {
                continue;
            }
            self.stamp[v] = self.generation;
            nodes.push(v);
        }
        NegativeDraw { nodes, exhausted: false }
    }
}

/// Draws `q` distinct uniform non-neighbors of `i`.
pub fn sample_negatives(g: &AttributedGraph, i: usize, q: usize, rng: &mut Rng) -> NegativeDraw {
    NegativeSampler::new(g.adjacency()).sample(i, q, rng)
}

/// Squared distances between raw feature rows, computed over the nonzero
/// entries only. Summation order matches a dense left-to-right pass.
#[derive(Debug, Clone)]
pub struct FeatureRows {
    rows: Vec<Vec<(usize, f64)>>,
}

impl FeatureRows {
    pub fn new(x: &DenseMatrix) -> Self {
        let rows = (0..x.rows())
            .map(|i| {
                x.row(i)
                    .iter()
                    .enumerate()
                    .filter(|(_, v)| **v != 0.0)
                    .map(|(k, &v)| (k, v))
                    .collect()
            })
            .collect();
        Self { rows }
    }

    pub fn row(&self, i: usize) -> &[(usize, f64)] {
        &self.rows[i]
    }

    pub fn sq_dist(&self, i: usize, j: usize) -> f64 {
        let (a, b) = (&self.rows[i], &self.rows[j]);
        let (mut p, mut q) = (0, 0);
        let mut total = 0.0;
        while p < a.len() || q < b.len() {
            let d = match (a.get(p), b.get(q)) {
                (Some(&(ka, va)), Some(&(kb, vb))) if ka == kb => {
                    p += 1;
                    q += 1;
                    va - vb
                }
                (Some(&(ka, va)), Some(&(kb, _))) if ka < kb => {
                    p += 1;
                    va
                }
                (Some(_), Some(&(_, vb))) => {
                    q += 1;
                    -vb
                }
                (Some(&(_, va)), None) => {
                    p += 1;
                    va
                }
                (None, Some(&(_, vb))) => {
                    q += 1;
                    -vb
                }
                (None, None) => unreachable!(),
            };
            total += d * d;
        }
        total
    }
}

/// Negatives for every ordered positive pair, flattened, with their
/// similarity weights.
#[derive(Debug, Clone, PartialEq)]
pub struct NegativeSet {
    offsets: Vec<usize>,
    nodes: Vec<usize>,
    weights: Vec<f64>,
    /// Positives whose source node ran out of non-neighbors.
    pub exhausted: usize,
}

impl NegativeSet {
    pub fn for_positive(&self, k: usize) -> (&[usize], &[f64]) {
        let r = self.offsets[k]..self.offsets[k + 1];
        (&self.nodes[r.clone()], &self.weights[r])
    }

    pub fn total(&self) -> usize {
        self.nodes.len()
    }
}

/// Everything about `L_E` that stays fixed during training: ordered
/// positives (both directions of every edge) with their weights, the
/// negative sampler and the feature geometry.
#[derive(Debug, Clone)]
pub struct ReconstructionProblem {
    positives: Vec<(usize, usize)>,
    positive_weights: Vec<f64>,
    sampler: NegativeSampler,
    features: FeatureRows,
    sigma: f64,
    q: usize,
}

impl ReconstructionProblem {
    pub fn new(g: &AttributedGraph, sigma: f64, q: usize) -> Result<Self> {
        if !(sigma > 0.0) {
            return Err(Error::Config(format!("sigma must be > 0, got {sigma}")));
        }
        if q == 0 {
            return Err(Error::Config("Q must be >= 1".into()));
        }
        let adj = g.adjacency();
        let features = FeatureRows::new(g.features());
        let mut positives = Vec::with_capacity(2 * g.num_edges());
        for (i, list) in adj.iter().enumerate() {
            for &j in list {
                positives.push((i, j));
            }
        }
        let positive_weights = positives
            .iter()
            .map(|&(i, j)| weight_from_sq_dist(features.sq_dist(i, j), sigma, SampleSign::Positive))
            .collect();
        Ok(Self {
            positives,
            positive_weights,
            sampler: NegativeSampler::new(adj),
            features,
            sigma,
            q,
        })
    }

    pub fn positives(&self) -> &[(usize, usize)] {
        &self.positives
    }

    pub fn positive_weights(&self) -> &[f64] {
        &self.positive_weights
    }

    pub fn q(&self) -> usize {
        self.q
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    /// Fresh negatives: `Q` per ordered positive, drawn from the source
    /// node's non-neighbors.
    pub fn draw(&mut self, rng: &mut Rng) -> NegativeSet {
        let mut offsets = Vec::with_capacity(self.positives.len() + 1);
        let mut nodes = Vec::with_capacity(self.positives.len() * self.q);
        let mut exhausted = 0;
        offsets.push(0);
        for k in 0..self.positives.len() {
            let i = self.positives[k].0;
            let draw = self.sampler.sample(i, self.q, rng);
            exhausted += draw.exhausted as usize;
            nodes.extend(draw.nodes);
            offsets.push(nodes.len());
        }
        let mut weights = Vec::with_capacity(nodes.len());
        for k in 0..self.positives.len() {
            let i = self.positives[k].0;
            for &n in &nodes[offsets[k]..offsets[k + 1]] {
                weights.push(weight_from_sq_dist(
                    self.features.sq_dist(i, n),
                    self.sigma,
                    SampleSign::Negative,
                ));
            }
        }
        NegativeSet {
            offsets,
            nodes,
            weights,
            exhausted,
        }
    }

    /// `L_E` for embeddings `z` and a fixed negative set.
    pub fn loss(&self, z: &DenseMatrix, negs: &NegativeSet) -> f64 {
        self.evaluate(z, negs, None)
    }

    /// `L_E` and `dL_E/dZ`.
    pub fn loss_and_grad(&self, z: &DenseMatrix, negs: &NegativeSet) -> (f64, DenseMatrix) {
        let mut g = DenseMatrix::zeros(z.rows(), z.cols());
        let loss = self.evaluate(z, negs, Some(&mut g));
        (loss, g)
    }

    fn evaluate(&self, z: &DenseMatrix, negs: &NegativeSet, mut grad: Option<&mut DenseMatrix>) -> f64 {
        let mut loss = 0.0;
        let mut acc_i = vec![0.0; z.cols()];
        for (k, &(i, j)) in self.positives.iter().enumerate() {
            let zi = z.row(i);
            acc_i.fill(0.0);
            let (nodes, weights) = negs.for_positive(k);
            let targets = std::iter::once((j, self.positive_weights[k], 1.0))
                .chain(nodes.iter().zip(weights).map(|(&n, &c)| (n, c, 0.0)));
            for (j, coef, target) in targets {
                let zj = z.row(j);
                let s = dot(zi, zj);
                let w = s.max(0.0);
                loss += coef * (w - target) * (w - target);
                // d/ds of c·(relu(s) − t)² is 2c(relu(s) − t) for s > 0, else 0
                if let (Some(g), true) = (grad.as_deref_mut(), s > 0.0) {
                    let ds = 2.0 * coef * (w - target);
                    for (a, &v) in acc_i.iter_mut().zip(zj) {
                        *a += ds * v;
                    }
                    for (gj, &v) in g.row_mut(j).iter_mut().zip(zi) {
                        *gj += ds * v;
                    }
                }
            }
            if let Some(g) = grad.as_deref_mut() {
                for (gi, &a) in g.row_mut(i).iter_mut().zip(&acc_i) {
                    *gi += a;
                }
            }
        }
        loss
    }
}

/// `L_E` with freshly sampled negatives.
pub fn loss_reconstruction(
    store: &ParamStore,
    params: &LinkPredictorParams,
    g: &AttributedGraph,
    sigma: f64,
    q: usize,
    rng: &mut Rng,
) -> Result<f64> {
    let mut problem = ReconstructionProblem::new(g, sigma, q)?;
    let z = embed(store, params, g.features())?;
    let negs = problem.draw(rng);
    Ok(problem.loss(&z, &negs))
}
