use crate::error::{Error, Result};
use crate::numcore::{
    add_row_bias, add_row_bias_backward, glorot_uniform, matmul, matmul_a_bt, matmul_at_b, relu,
    relu_backward, DenseMatrix, ParamId, ParamStore, SparseWeighted,
};
use crate::rng::Rng;

/// Handles to the link predictor's weights inside a shared [`ParamStore`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LinkPredictorParams {
    pub w1: ParamId,
    pub b1: ParamId,
    pub w2: ParamId,
    pub b2: ParamId,
}

impl LinkPredictorParams {
    pub const PREFIX: &'static str = "E.";

    /// Glorot-uniform weights and zero biases for a `d → hidden → embed` MLP.
    pub fn init(
        store: &mut ParamStore,
        in_dim: usize,
        hidden: usize,
        embed_dim: usize,
        rng: &mut Rng,
    ) -> Result<Self> {
        Ok(Self {
            w1: store.insert("E.w1", glorot_uniform(in_dim, hidden, rng))?,
            b1: store.insert("E.b1", DenseMatrix::zeros(1, hidden))?,
            w2: store.insert("E.w2", glorot_uniform(hidden, embed_dim, rng))?,
            b2: store.insert("E.b2", DenseMatrix::zeros(1, embed_dim))?,
        })
    }

    pub fn embed_dim(&self, store: &ParamStore) -> usize {
        store.value(self.w2).cols()
    }
}

/// Intermediate values of one embedding pass, kept for the backward pass.
#[derive(Debug, Clone)]
pub struct EmbedCache {
    pre_hidden: DenseMatrix,
    hidden: DenseMatrix,
    pub z: DenseMatrix,
}

/// `Z = ReLU(X·W₁ + b₁)·W₂ + b₂`.
pub fn embed(store: &ParamStore, p: &LinkPredictorParams, x: &DenseMatrix) -> Result<DenseMatrix> {
    Ok(embed_cached(store, p, x, None)?.z)
}

/// Forward pass keeping intermediates. With `propagate = Some(Â)` each
/// layer aggregates over `Â` before adding the bias, turning the MLP into a
/// two-layer GCN encoder.
pub fn embed_cached(
    store: &ParamStore,
    p: &LinkPredictorParams,
    x: &DenseMatrix,
    propagate: Option<&SparseWeighted>,
) -> Result<EmbedCache> {
    let w1 = store.value(p.w1);
    if x.cols() != w1.rows() {
        return Err(Error::Shape {
            op: "embed",
            left: x.shape(),
            right: w1.shape(),
        });
    }
    let agg = |m: DenseMatrix| -> Result<DenseMatrix> {
        match propagate {
            Some(a) => a.spmm(&m),
            None => Ok(m),
        }
    };
    let xw1 = agg(matmul(x, w1)?)?;
    let pre_hidden = add_row_bias(&xw1, store.value(p.b1))?;
    let hidden = relu(&pre_hidden);
    let hw2 = agg(matmul(&hidden, store.value(p.w2))?)?;
    let z = add_row_bias(&hw2, store.value(p.b2))?;
    Ok(EmbedCache {
        pre_hidden,
        hidden,
        z,
    })
}

/// Accumulates `dL/dθ_E` given `dL/dZ`. `propagate` must match the forward
/// pass; `Â` is symmetric so its transpose is itself.
pub fn embed_backward(
    store: &mut ParamStore,
    p: &LinkPredictorParams,
    x: &DenseMatrix,
    cache: &EmbedCache,
    grad_z: &DenseMatrix,
    propagate: Option<&SparseWeighted>,
) -> Result<()> {
    let agg_t = |m: &DenseMatrix| -> Result<DenseMatrix> {
        match propagate {
            Some(a) => a.spmm(m),
            None => Ok(m.clone()),
        }
    };
    store.accumulate_grad(p.b2, &add_row_bias_backward(grad_z))?;
    let g_hw2 = agg_t(grad_z)?;
    store.accumulate_grad(p.w2, &matmul_at_b(&cache.hidden, &g_hw2)?)?;
    let g_hidden = matmul_a_bt(&g_hw2, store.value(p.w2))?;
    let g_pre = relu_backward(&cache.pre_hidden, &g_hidden)?;
    store.accumulate_grad(p.b1, &add_row_bias_backward(&g_pre))?;
    let g_xw1 = agg_t(&g_pre)?;
    store.accumulate_grad(p.w1, &matmul_at_b(x, &g_xw1)?)?;
    Ok(())
}

/// Sign pattern of the hidden ReLU, for finite-difference branch detection.
pub fn hidden_regime(cache: &EmbedCache, h: &mut crate::numcore::RegimeHasher) {
    for &v in cache.pre_hidden.data() {
        h.push(v > 0.0);
    }
}
