use crate::error::{Error, Result};
use crate::graphdata::AttributedGraph;
use crate::linkpred::LearnedGraph;
use crate::numcore::{softmax_cross_entropy, softmax_cross_entropy_backward, DenseMatrix};

fn train_targets(logits: &DenseMatrix, g: &AttributedGraph) -> Result<(DenseMatrix, DenseMatrix)> {
    let rows = g.train();
    if rows.is_empty() {
        return Err(Error::Config("training mask is empty".into()));
    }
    if logits.rows() != g.num_nodes() || logits.cols() != g.num_classes() {
        return Err(Error::Shape {
            op: "loss_classification",
            left: logits.shape(),
            right: (g.num_nodes(), g.num_classes()),
        });
    }
    let mut onehot = DenseMatrix::zeros(rows.len(), g.num_classes());
    for (r, &i) in rows.iter().enumerate() {
        let y = g.labels()[i].expect("training nodes are labeled");
        onehot.set(r, y, 1.0);
    }
    Ok((logits.select_rows(rows), onehot))
}

/// Mean cross-entropy over the training rows.
pub fn loss_classification(logits: &DenseMatrix, g: &AttributedGraph) -> Result<f64> {
    let (sel, onehot) = train_targets(logits, g)?;
    Ok(softmax_cross_entropy(&sel, &onehot)?.0)
}

/// Loss and `dL/dlogits` (zero outside the training rows).
pub fn classification_loss_and_grad(logits: &DenseMatrix, g: &AttributedGraph) -> Result<(f64, DenseMatrix)> {
    let (sel, onehot) = train_targets(logits, g)?;
    let (loss, probs) = softmax_cross_entropy(&sel, &onehot)?;
    let grad_sel = softmax_cross_entropy_backward(&probs, &onehot)?;
    let mut grad = DenseMatrix::zeros(logits.rows(), logits.cols());
    for (r, &i) in g.train().iter().enumerate() {
        grad.row_mut(i).copy_from_slice(grad_sel.row(r));
    }
    Ok((loss, grad))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MaskEntry {
    pub u: usize,
    pub v: usize,
    pub weight: f64,
    /// Position of the pair in the source [`LearnedGraph`]'s edge list.
    pub edge: usize,
}

/// Learned edges with weight strictly above `T_h`, one per unordered pair.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct SmoothnessMask {
    pub entries: Vec<MaskEntry>,
}

impl SmoothnessMask {
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

pub fn build_smoothness_mask(s: &LearnedGraph, t_h: f64) -> SmoothnessMask {
    SmoothnessMask {
        entries: s
            .edges()
            .iter()
            .enumerate()
            .filter(|(_, e)| e.weight > t_h)
            .map(|(edge, e)| MaskEntry {
                u: e.u,
                v: e.v,
                weight: e.weight,
                edge,
            })
            .collect(),
    }
}

fn unlabeled_flags(g: &AttributedGraph) -> Vec<bool> {
    let mut flags = vec![true; g.num_nodes()];
    for &i in g.train() {
        flags[i] = false;
    }
    flags
}

/// `Σ_{i ∉ V_L} Σ_j T_ij ‖ŷ_i − ŷ_j‖²` over the mask. A pair with both
/// endpoints unlabeled appears once from each side.
pub fn loss_smoothness(probs: &DenseMatrix, mask: &SmoothnessMask, g: &AttributedGraph) -> f64 {
    smoothness_loss_and_grad(probs, mask, g).0
}

/// Loss, `dL/dŷ`, and `dL/dT` per mask entry.
pub fn smoothness_loss_and_grad(
    probs: &DenseMatrix,
    mask: &SmoothnessMask,
    g: &AttributedGraph,
) -> (f64, DenseMatrix, Vec<f64>) {
    let unlabeled = unlabeled_flags(g);
    let mut loss = 0.0;
    let mut grad = DenseMatrix::zeros(probs.rows(), probs.cols());
    let mut grad_t = Vec::with_capacity(mask.len());
    for e in &mask.entries {
        let count = unlabeled[e.u] as usize + unlabeled[e.v] as usize;
        if count == 0 {
            grad_t.push(0.0);
            continue;
        }
        let m = count as f64;
        let dist = crate::numcore::squared_distance(probs.row(e.u), probs.row(e.v));
        loss += m * e.weight * dist;
        grad_t.push(m * dist);
        let c = 2.0 * m * e.weight;
        for k in 0..probs.cols() {
            let diff = probs.get(e.u, k) - probs.get(e.v, k);
            grad.row_mut(e.u)[k] += c * diff;
            grad.row_mut(e.v)[k] -= c * diff;
        }
    }
    (loss, grad, grad_t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graphdata::Masks;
    use crate::linkpred::{LearnedGraph, PairUniverse};
    use crate::linkpred::CandidateSets;

    fn fixture() -> AttributedGraph {
        let labels = vec![Some(0), Some(1), Some(2), Some(0), Some(1)];
        let (g, _) = AttributedGraph::new(
            DenseMatrix::zeros(5, 1),
            vec![(0, 1), (1, 2), (2, 3), (3, 4), (0, 4)],
            labels,
            3,
        )
        .unwrap();
        g.with_masks(Masks {
            train: vec![0, 2],
            val: vec![1],
            test: vec![3, 4],
        })
        .unwrap()
    }

    #[test]
    fn uniform_logits_seven_classes_is_ln7() {
        let (g, _) = AttributedGraph::new(DenseMatrix::zeros(2, 1), vec![], vec![Some(3), Some(6)], 7).unwrap();
        let g = g
            .with_masks(Masks {
                train: vec![0, 1],
                val: vec![],
                test: vec![],
            })
            .unwrap();
        let l = loss_classification(&DenseMatrix::zeros(2, 7), &g).unwrap();
        assert!((l - 7f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn confident_correct_logits_give_near_zero() {
        let g = fixture();
        let logits = DenseMatrix::one_hot(&[0, 1, 2, 0, 1], 3);
        let mut scaled = logits.clone();
        scaled.scale(1000.0);
        assert!(loss_classification(&scaled, &g).unwrap() < 1e-12);
    }

    #[test]
    fn empty_train_mask_is_config_error() {
        let (g, _) = AttributedGraph::new(DenseMatrix::zeros(2, 1), vec![], vec![Some(0), Some(1)], 2).unwrap();
        assert!(matches!(
            loss_classification(&DenseMatrix::zeros(2, 2), &g),
            Err(Error::Config(_))
        ));
    }

    #[test]
    fn grad_is_zero_outside_train_rows() {
        let g = fixture();
        let logits = DenseMatrix::from_rows(&[[0.1, 0.2, 0.3]; 5]).unwrap();
        let (_, grad) = classification_loss_and_grad(&logits, &g).unwrap();
        for i in [1, 3, 4] {
            assert!(grad.row(i).iter().all(|&v| v == 0.0));
        }
    }

    fn learned(weights: &[f64]) -> LearnedGraph {
        let g = fixture();
        let u = PairUniverse::new(&g, &CandidateSets::empty(5));
        LearnedGraph::from_scores(&u, weights, 0.1)
    }

    #[test]
    fn mask_filters_strictly_above_threshold() {
        let lg = learned(&[0.5; 5]);
        assert!(build_smoothness_mask(&lg, 0.8).is_empty());
        assert_eq!(build_smoothness_mask(&lg, 0.0).len(), 5);
        let lg = learned(&[0.9, 0.8, 1.5, 0.2, 0.85]);
        let m = build_smoothness_mask(&lg, 0.8);
        let pairs: Vec<_> = m.entries.iter().map(|e| (e.u, e.v, e.weight)).collect();
        assert_eq!(pairs, vec![(0, 1, 0.9), (1, 2, 1.0), (3, 4, 0.85)]);
    }

    #[test]
    fn identical_rows_or_empty_mask_give_zero() {
        let g = fixture();
        let probs = DenseMatrix::filled(5, 3, 1.0 / 3.0);
        let m = build_smoothness_mask(&learned(&[0.9; 5]), 0.8);
        assert_eq!(loss_smoothness(&probs, &m, &g), 0.0);
        let p2 = DenseMatrix::from_rows(&[[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0], [0.5, 0.5, 0.0], [0.2, 0.2, 0.6]]).unwrap();
        assert_eq!(loss_smoothness(&p2, &SmoothnessMask::default(), &g), 0.0);
        assert!(loss_smoothness(&p2, &m, &g) > 0.0);
    }
}
