//! Independent brute-force evaluators. They rebuild everything from plain
//! nested `Vec`s and loops and share no code with the library beyond the
//! input types.
#![allow(dead_code)]

use std::collections::BTreeMap;

pub type Mat = Vec<Vec<f64>>;

pub fn to_mat(m: &rsgnn::numcore::DenseMatrix) -> Mat {
    (0..m.rows()).map(|r| m.row(r).to_vec()).collect()
}

fn matmul(a: &Mat, b: &Mat) -> Mat {
    let (n, k, m) = (a.len(), b.len(), b[0].len());
    let mut out = vec![vec![0.0; m]; n];
    for i in 0..n {
        for j in 0..m {
            let mut s = 0.0;
            for t in 0..k {
                s += a[i][t] * b[t][j];
            }
            out[i][j] = s;
        }
    }
    out
}

/// `ReLU(X W1 + b1) W2 + b2`
pub fn mlp(x: &Mat, w1: &Mat, b1: &[f64], w2: &Mat, b2: &[f64]) -> Mat {
    let mut h = matmul(x, w1);
    for row in &mut h {
        for (v, b) in row.iter_mut().zip(b1) {
            *v = (*v + b).max(0.0);
        }
    }
    let mut z = matmul(&h, w2);
    for row in &mut z {
        for (v, b) in row.iter_mut().zip(b2) {
            *v += b;
        }
    }
    z
}

pub fn inner(a: &[f64], b: &[f64]) -> f64 {
    let mut s = 0.0;
    for k in 0..a.len() {
        s += a[k] * b[k];
    }
    s
}

pub fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    let mut s = 0.0;
    for k in 0..a.len() {
        s += (a[k] - b[k]).powi(2);
    }
    s
}

pub fn neighbors(n: usize, edges: &[(usize, usize)]) -> Vec<Vec<usize>> {
    let mut adj = vec![Vec::new(); n];
    for &(u, v) in edges {
        adj[u].push(v);
        adj[v].push(u);
    }
    for a in &mut adj {
        a.sort();
    }
    adj
}

/// Weighted reconstruction loss. `negatives[i][t]` lists the negatives drawn
/// for the `t`-th neighbor of node `i` (neighbors in ascending order).
pub fn reconstruction_loss(
    x: &Mat,
    z: &Mat,
    edges: &[(usize, usize)],
    negatives: &[Vec<Vec<usize>>],
    sigma: f64,
) -> f64 {
    let adj = neighbors(x.len(), edges);
    let mut total = 0.0;
    for i in 0..x.len() {
        for (t, &j) in adj[i].iter().enumerate() {
            let w = inner(&z[i], &z[j]).max(0.0);
            total += (-sq_dist(&x[i], &x[j]) / (sigma * sigma)).exp() * (w - 1.0).powi(2);
            for &n in &negatives[i][t] {
                let wn = inner(&z[i], &z[n]).max(0.0);
                let arg = (sq_dist(&x[i], &x[n]) / (sigma * sigma)).min(50.0);
                total += arg.exp() * wn * wn;
            }
        }
    }
    total
}

pub fn cosine(a: &[f64], b: &[f64]) -> f64 {
    let na = inner(a, a).sqrt();
    let nb = inner(b, b).sqrt();
    if na == 0.0 || nb == 0.0 {
        0.0
    } else {
        inner(a, b) / (na * nb)
    }
}

/// Full O(N²) ranking by descending cosine, then ascending index.
pub fn candidates(x: &Mat, k: usize) -> Vec<Vec<usize>> {
    let n = x.len();
    (0..n)
        .map(|i| {
            let mut others: Vec<(f64, usize)> = (0..n).filter(|&j| j != i).map(|j| (cosine(&x[i], &x[j]), j)).collect();
            others.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap().then(a.1.cmp(&b.1)));
            others.into_iter().take(k).map(|p| p.1).collect()
        })
        .collect()
}

/// Thresholded clamped weights over neighbors ∪ candidates:
/// `(u, v) -> (weight, is_original)` with `u < v`.
pub fn learned_graph(
    z: &Mat,
    edges: &[(usize, usize)],
    cands: &[Vec<usize>],
    t_l: f64,
) -> BTreeMap<(usize, usize), (f64, bool)> {
    let n = z.len();
    let adj = neighbors(n, edges);
    let mut out = BTreeMap::new();
    for i in 0..n {
        for &j in adj[i].iter().chain(&cands[i]) {
            let key = (i.min(j), i.max(j));
            let w = inner(&z[key.0], &z[key.1]).max(0.0).min(1.0);
            if w > t_l {
                out.insert(key, (w, adj[key.0].contains(&key.1)));
            }
        }
    }
    out
}

/// Mean cross-entropy over `rows`.
pub fn cross_entropy(logits: &Mat, labels: &[usize], rows: &[usize]) -> f64 {
    let mut total = 0.0;
    for &r in rows {
        let denom: f64 = logits[r].iter().map(|v| v.exp()).sum();
        total += -(logits[r][labels[r]].exp() / denom).ln();
    }
    total / rows.len() as f64
}

pub fn softmax(logits: &Mat) -> Mat {
    logits
        .iter()
        .map(|row| {
            let s: f64 = row.iter().map(|v| v.exp()).sum();
            row.iter().map(|v| v.exp() / s).collect()
        })
        .collect()
}

/// `Σ_{i unlabeled} Σ_j T_ij ‖p_i − p_j‖²` with `t` a dense symmetric matrix.
pub fn smoothness(probs: &Mat, t: &Mat, labeled: &[usize]) -> f64 {
    let n = probs.len();
    let mut total = 0.0;
    for i in 0..n {
        if labeled.contains(&i) {
            continue;
        }
        for j in 0..n {
            if t[i][j] != 0.0 {
                total += t[i][j] * sq_dist(&probs[i], &probs[j]);
            }
        }
    }
    total
}

/// Dense `D^{-1/2} (S + I) D^{-1/2}`.
pub fn normalized(s: &Mat) -> Mat {
    let n = s.len();
    let mut a = s.clone();
    for i in 0..n {
        a[i][i] += 1.0;
    }
    let deg: Vec<f64> = a.iter().map(|r| r.iter().sum()).collect();
    for i in 0..n {
        for j in 0..n {
            a[i][j] /= (deg[i] * deg[j]).sqrt();
        }
    }
    a
}

/// `Â ReLU(Â X W1) W2`
pub fn gcn(a: &Mat, x: &Mat, w1: &Mat, w2: &Mat) -> Mat {
    let mut h = matmul(a, &matmul(x, w1));
    for row in &mut h {
        for v in row.iter_mut() {
            *v = v.max(0.0);
        }
    }
    matmul(a, &matmul(&h, w2))
}
