use crate::numcore::{DenseMatrix, SparseWeighted};

/// `Â = D̃^{-1/2}(S + I)D̃^{-1/2}` together with what the backward pass
/// through the edge weights of `S` needs.
#[derive(Debug, Clone)]
pub struct NormalizedAdjacency {
    a_hat: SparseWeighted,
    /// `(S + I)` values aligned with `a_hat.entries()`.
    raw: Vec<f64>,
    /// `deg^{-1/2}` per node, `deg_i = 1 + Σ_j S_ij`.
    inv_sqrt_deg: Vec<f64>,
    degree: Vec<f64>,
}

impl NormalizedAdjacency {
    pub fn new(s: &SparseWeighted) -> Self {
        let n = s.num_nodes();
        let mut entries: Vec<(usize, usize, f64)> = Vec::with_capacity(s.nnz() + n);
        for i in 0..n {
            let row = s.row(i);
            let mut diag_done = false;
            for &(_, j, w) in row {
                if j == i {
                    entries.push((i, i, 1.0 + w));
                    diag_done = true;
                    continue;
                }
                if j > i && !diag_done {
                    entries.push((i, i, 1.0));
                    diag_done = true;
                }
                entries.push((i, j, w));
            }
            if !diag_done {
                entries.push((i, i, 1.0));
            }
        }
        let mut degree = vec![0.0; n];
        for &(i, _, w) in &entries {
            degree[i] += w;
        }
        let inv_sqrt_deg: Vec<f64> = degree.iter().map(|d| 1.0 / d.sqrt()).collect();
        let raw: Vec<f64> = entries.iter().map(|e| e.2).collect();
        let normalized = entries
            .into_iter()
            .map(|(i, j, w)| (i, j, w / (degree[i] * degree[j]).sqrt()))
            .collect();
        let a_hat = SparseWeighted::from_entries(n, normalized)
            .expect("normalized entries are symmetric and lie in [0, 1]");
        Self {
            a_hat,
            raw,
            inv_sqrt_deg,
            degree,
        }
    }

    pub fn a_hat(&self) -> &SparseWeighted {
        &self.a_hat
    }

    pub fn into_a_hat(self) -> SparseWeighted {
        self.a_hat
    }

    pub fn degree(&self) -> &[f64] {
        &self.degree
    }

    /// Maps `dL/dÂ` (one value per entry of `Â`, directed) to `dL/dS` (one
    /// value per entry of `s`, directed, in `s.entries()` order).
    pub fn backward(&self, s: &SparseWeighted, grad_a_hat: &[f64]) -> Vec<f64> {
        let r = &self.inv_sqrt_deg;
        let n = r.len();
        let mut grad_r = vec![0.0; n];
        for ((&(i, j, _), &g), &raw) in self.a_hat.entries().iter().zip(grad_a_hat).zip(&self.raw) {
            grad_r[i] += g * raw * r[j];
            grad_r[j] += g * raw * r[i];
        }
        // r = deg^{-1/2}  ⇒  dr/ddeg = −½ deg^{-3/2}
        let grad_deg: Vec<f64> = (0..n)
            .map(|i| -0.5 * grad_r[i] * r[i] / self.degree[i])
            .collect();
        let mut out = Vec::with_capacity(s.nnz());
        for &(i, j, _) in s.entries() {
            let k = self.entry_index(i, j);
            out.push(grad_a_hat[k] * r[i] * r[j] + grad_deg[i]);
        }
        out
    }

    fn entry_index(&self, i: usize, j: usize) -> usize {
        let entries = self.a_hat.entries();
        let start = entries.partition_point(|e| e.0 < i);
        let row = &entries[start..];
        start + row.partition_point(|e| e.0 == i && e.1 < j)
    }
}

/// Symmetric renormalization with self-loops; isolated nodes keep a
/// self-loop of weight 1.
pub fn normalize_adjacency(s: &SparseWeighted) -> SparseWeighted {
    NormalizedAdjacency::new(s).into_a_hat()
}

/// `dL/dÂ_ij = ⟨G_i, M_j⟩` for a product `Â·M` with upstream gradient `G`,
/// accumulated into `out` in `a_hat.entries()` order.
pub fn accumulate_adjacency_grad(a_hat: &SparseWeighted, g: &DenseMatrix, m: &DenseMatrix, out: &mut [f64]) {
    for (o, &(i, j, _)) in out.iter_mut().zip(a_hat.entries()) {
        *o += crate::numcore::dot(g.row(i), m.row(j));
    }
}
