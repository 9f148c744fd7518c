use rand::Rng as _;

use crate::error::{Error, Result};
use crate::numcore::{
    glorot_uniform, matmul, matmul_a_bt, matmul_at_b, relu, relu_backward, DenseMatrix, ParamId,
    ParamStore, SparseWeighted,
};
use crate::rng::Rng;

use super::normalize::accumulate_adjacency_grad;

/// Two-layer GCN weights (no biases) inside a shared [`ParamStore`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GcnParams {
    pub w1: ParamId,
    pub w2: ParamId,
}

impl GcnParams {
    pub const PREFIX: &'static str = "G.";

    pub fn init(store: &mut ParamStore, in_dim: usize, hidden: usize, classes: usize, rng: &mut Rng) -> Result<Self> {
        Ok(Self {
            w1: store.insert("G.w1", glorot_uniform(in_dim, hidden, rng))?,
            w2: store.insert("G.w2", glorot_uniform(hidden, classes, rng))?,
        })
    }
}

#[derive(Debug, Clone)]
pub struct GcnCache {
    xw1: DenseMatrix,
    pre_hidden: DenseMatrix,
    /// Post-ReLU (and post-dropout) hidden layer.
    pub hidden: DenseMatrix,
    hw2: DenseMatrix,
    dropout_scale: Option<Vec<f64>>,
    pub logits: DenseMatrix,
}

/// Inverted dropout on the hidden layer during training.
#[derive(Debug)]
pub struct Dropout<'a> {
    pub rate: f64,
    pub rng: &'a mut Rng,
}

/// `logits = Â · ReLU(Â · X · W₁) · W₂`; returns `(H, logits)`.
pub fn gcn_forward(
    store: &ParamStore,
    p: &GcnParams,
    a_hat: &SparseWeighted,
    x: &DenseMatrix,
) -> Result<(DenseMatrix, DenseMatrix)> {
    let c = gcn_forward_cached(store, p, a_hat, x, None)?;
    Ok((c.hidden, c.logits))
}

pub fn gcn_forward_cached(
    store: &ParamStore,
    p: &GcnParams,
    a_hat: &SparseWeighted,
    x: &DenseMatrix,
    dropout: Option<Dropout<'_>>,
) -> Result<GcnCache> {
    if a_hat.num_nodes() != x.rows() {
        return Err(Error::Shape {
            op: "gcn_forward",
            left: (a_hat.num_nodes(), a_hat.num_nodes()),
            right: x.shape(),
        });
    }
    let xw1 = matmul(x, store.value(p.w1))?;
    let pre_hidden = a_hat.spmm(&xw1)?;
    let mut hidden = relu(&pre_hidden);
    let dropout_scale = match dropout {
        Some(d) if d.rate > 0.0 => {
            let keep = 1.0 - d.rate;
            let scale: Vec<f64> = (0..hidden.data().len())
                .map(|_| if d.rng.random::<f64>() < keep { 1.0 / keep } else { 0.0 })
                .collect();
            hidden.data_mut().iter_mut().zip(&scale).for_each(|(h, s)| *h *= s);
            Some(scale)
        }
        _ => None,
    };
    let hw2 = matmul(&hidden, store.value(p.w2))?;
    let logits = a_hat.spmm(&hw2)?;
    Ok(GcnCache {
        xw1,
        pre_hidden,
        hidden,
        hw2,
        dropout_scale,
        logits,
    })
}

/// Accumulates `dL/dθ_G` and returns `dL/dÂ` per entry of `a_hat`.
pub fn gcn_backward(
    store: &mut ParamStore,
    p: &GcnParams,
    a_hat: &SparseWeighted,
    x: &DenseMatrix,
    cache: &GcnCache,
    grad_logits: &DenseMatrix,
) -> Result<Vec<f64>> {
    let mut grad_a = vec![0.0; a_hat.nnz()];
    accumulate_adjacency_grad(a_hat, grad_logits, &cache.hw2, &mut grad_a);
    // Â is symmetric, so Âᵀ·G = Â·G
    let g_hw2 = a_hat.spmm(grad_logits)?;
    store.accumulate_grad(p.w2, &matmul_at_b(&cache.hidden, &g_hw2)?)?;
    let mut g_hidden = matmul_a_bt(&g_hw2, store.value(p.w2))?;
    if let Some(scale) = &cache.dropout_scale {
        g_hidden.data_mut().iter_mut().zip(scale).for_each(|(g, s)| *g *= s);
    }
    let g_pre = relu_backward(&cache.pre_hidden, &g_hidden)?;
    accumulate_adjacency_grad(a_hat, &g_pre, &cache.xw1, &mut grad_a);
    let g_xw1 = a_hat.spmm(&g_pre)?;
    store.accumulate_grad(p.w1, &matmul_at_b(x, &g_xw1)?)?;
    Ok(grad_a)
}

/// Sign pattern of the hidden ReLU.
pub fn gcn_regime(cache: &GcnCache, h: &mut crate::numcore::RegimeHasher) {
    for &v in cache.pre_hidden.data() {
        h.push(v > 0.0);
    }
}
