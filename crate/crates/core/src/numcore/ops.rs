//! Forward operations and their hand-derived backward rules.
//!
//! Every differentiable op `foo` has a matching `foo_backward` that maps the
//! upstream gradient of the op's output to gradients of its inputs. Composite
//! losses chain these explicitly.

use crate::error::{Error, Result};

use super::dense::DenseMatrix;

/// `a · b`. Zero entries of `a` are skipped, which makes sparse bag-of-words
/// feature matrices cheap.
pub fn matmul(a: &DenseMatrix, b: &DenseMatrix) -> Result<DenseMatrix> {
    if a.cols() != b.rows() {
        return Err(Error::Shape {
            op: "matmul",
            left: a.shape(),
            right: b.shape(),
        });
    }
    let (n, m) = (a.rows(), b.cols());
    let mut out = DenseMatrix::zeros(n, m);
    for i in 0..n {
        let arow = a.row(i);
        let orow = out.row_mut(i);
        for (k, &aik) in arow.iter().enumerate() {
            if aik == 0.0 {
                continue;
            }
            for (o, &bkj) in orow.iter_mut().zip(b.row(k)) {
                *o += aik * bkj;
            }
        }
    }
    Ok(out)
}

/// `aᵀ · b` without materializing the transpose.
pub fn matmul_at_b(a: &DenseMatrix, b: &DenseMatrix) -> Result<DenseMatrix> {
    if a.rows() != b.rows() {
        return Err(Error::Shape {
            op: "matmul_at_b",
            left: a.shape(),
            right: b.shape(),
        });
    }
    let mut out = DenseMatrix::zeros(a.cols(), b.cols());
    for i in 0..a.rows() {
        let brow = b.row(i);
        for (k, &aik) in a.row(i).iter().enumerate() {
            if aik == 0.0 {
                continue;
            }
            for (o, &bij) in out.row_mut(k).iter_mut().zip(brow) {
                *o += aik * bij;
            }
        }
    }
    Ok(out)
}

/// `a · bᵀ` without materializing the transpose.
pub fn matmul_a_bt(a: &DenseMatrix, b: &DenseMatrix) -> Result<DenseMatrix> {
    if a.cols() != b.cols() {
        return Err(Error::Shape {
            op: "matmul_a_bt",
            left: a.shape(),
            right: b.shape(),
        });
    }
    let mut out = DenseMatrix::zeros(a.rows(), b.rows());
    for i in 0..a.rows() {
        let arow = a.row(i);
        for j in 0..b.rows() {
            out.set(i, j, super::dense::dot(arow, b.row(j)));
        }
    }
    Ok(out)
}

/// Gradients of `c = a · b`: `dL/da = dL/dc · bᵀ`, `dL/db = aᵀ · dL/dc`.
pub fn matmul_backward(
    a: &DenseMatrix,
    b: &DenseMatrix,
    grad_out: &DenseMatrix,
) -> Result<(DenseMatrix, DenseMatrix)> {
    if grad_out.shape() != (a.rows(), b.cols()) {
        return Err(Error::Shape {
            op: "matmul_backward",
            left: (a.rows(), b.cols()),
            right: grad_out.shape(),
        });
    }
    Ok((matmul_a_bt(grad_out, b)?, matmul_at_b(a, grad_out)?))
}

pub fn relu(a: &DenseMatrix) -> DenseMatrix {
    let mut out = a.clone();
    out.data_mut().iter_mut().for_each(|v| *v = v.max(0.0));
    out
}

/// Passes the gradient where the forward input was strictly positive.
pub fn relu_backward(input: &DenseMatrix, grad_out: &DenseMatrix) -> Result<DenseMatrix> {
    if input.shape() != grad_out.shape() {
        return Err(Error::Shape {
            op: "relu_backward",
            left: input.shape(),
            right: grad_out.shape(),
        });
    }
    let data = input
        .data()
        .iter()
        .zip(grad_out.data())
        .map(|(&x, &g)| if x > 0.0 { g } else { 0.0 })
        .collect();
    DenseMatrix::new(input.rows(), input.cols(), data)
}

/// Adds a `1 × cols` bias to every row.
pub fn add_row_bias(a: &DenseMatrix, bias: &DenseMatrix) -> Result<DenseMatrix> {
    if bias.rows() != 1 || bias.cols() != a.cols() {
        return Err(Error::Shape {
            op: "add_row_bias",
            left: a.shape(),
            right: bias.shape(),
        });
    }
    let mut out = a.clone();
    for r in 0..out.rows() {
        for (o, b) in out.row_mut(r).iter_mut().zip(bias.data()) {
            *o += b;
        }
    }
    Ok(out)
}

/// Bias gradient: column sums of the upstream gradient.
pub fn add_row_bias_backward(grad_out: &DenseMatrix) -> DenseMatrix {
    let mut g = DenseMatrix::zeros(1, grad_out.cols());
    for r in 0..grad_out.rows() {
        for (o, v) in g.data_mut().iter_mut().zip(grad_out.row(r)) {
            *o += v;
        }
    }
    g
}

/// Row-wise softmax with max subtraction.
pub fn softmax_rows(logits: &DenseMatrix) -> DenseMatrix {
    let mut out = logits.clone();
    for r in 0..out.rows() {
        let row = out.row_mut(r);
        let max = row.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let mut total = 0.0;
        for v in row.iter_mut() {
            *v = (*v - max).exp();
            total += *v;
        }
        for v in row.iter_mut() {
            *v /= total;
        }
    }
    out
}

/// Vector-Jacobian product of the row-wise softmax:
/// `dL/dlogit = p ⊙ (g − ⟨g, p⟩)` per row.
pub fn softmax_backward(probs: &DenseMatrix, grad_probs: &DenseMatrix) -> Result<DenseMatrix> {
    if probs.shape() != grad_probs.shape() {
        return Err(Error::Shape {
            op: "softmax_backward",
            left: probs.shape(),
            right: grad_probs.shape(),
        });
    }
    let mut out = DenseMatrix::zeros(probs.rows(), probs.cols());
    for r in 0..probs.rows() {
        let p = probs.row(r);
        let g = grad_probs.row(r);
        let inner = super::dense::dot(p, g);
        for ((o, &pi), &gi) in out.row_mut(r).iter_mut().zip(p).zip(g) {
            *o = pi * (gi - inner);
        }
    }
    Ok(out)
}

/// Mean cross-entropy between `softmax(logits)` and one-hot targets.
/// Returns the loss and the probabilities.
pub fn softmax_cross_entropy(
    logits: &DenseMatrix,
    onehot: &DenseMatrix,
) -> Result<(f64, DenseMatrix)> {
    if logits.shape() != onehot.shape() {
        return Err(Error::Shape {
            op: "softmax_cross_entropy",
            left: logits.shape(),
            right: onehot.shape(),
        });
    }
    let probs = softmax_rows(logits);
    if logits.rows() == 0 {
        return Ok((0.0, probs));
    }
    let mut loss = 0.0;
    for r in 0..logits.rows() {
        let row = logits.row(r);
        let max = row.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let log_z = max + row.iter().map(|v| (v - max).exp()).sum::<f64>().ln();
        for (&l, &t) in row.iter().zip(onehot.row(r)) {
            if t != 0.0 {
                loss += t * (log_z - l);
            }
        }
    }
    Ok((loss / logits.rows() as f64, probs))
}

/// `(probs − onehot) / num_rows`
pub fn softmax_cross_entropy_backward(
    probs: &DenseMatrix,
    onehot: &DenseMatrix,
) -> Result<DenseMatrix> {
    if probs.shape() != onehot.shape() {
        return Err(Error::Shape {
            op: "softmax_cross_entropy_backward",
            left: probs.shape(),
            right: onehot.shape(),
        });
    }
    let mut g = probs.clone();
    g.add_scaled(-1.0, onehot)?;
    if probs.rows() > 0 {
        g.scale(1.0 / probs.rows() as f64);
    }
    Ok(g)
}
