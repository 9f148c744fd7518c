use std::cmp::Ordering;

use log::warn;

use crate::error::{Error, Result};
use crate::numcore::DenseMatrix;

use super::reconstruction::FeatureRows;

/// Per node, the `K` other nodes with the highest raw-feature cosine
/// similarity, best first.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CandidateSets {
    lists: Vec<Vec<usize>>,
    /// Nodes whose feature row is all zeros.
    pub zero_rows: usize,
}

impl CandidateSets {
    pub fn empty(num_nodes: usize) -> Self {
        Self {
            lists: vec![Vec::new(); num_nodes],
            zero_rows: 0,
        }
    }

    pub fn of(&self, i: usize) -> &[usize] {
        &self.lists[i]
    }

    pub fn num_nodes(&self) -> usize {
        self.lists.len()
    }
}

/// Exact top-`k` cosine neighbors. Ties break toward the lower node index;
/// an all-zero row has similarity 0 to every node.
pub fn build_candidates(x: &DenseMatrix, k: usize) -> Result<CandidateSets> {
    if k == 0 {
        return Err(Error::Config("K must be >= 1".into()));
    }
    let n = x.rows();
    let rows = FeatureRows::new(x);
    let norms: Vec<f64> = (0..n)
        .map(|i| rows.row(i).iter().map(|(_, v)| v * v).sum::<f64>().sqrt())
        .collect();
    let zero_rows = norms.iter().filter(|&&v| v == 0.0).count();
    if zero_rows > 0 {
        warn!("{zero_rows} all-zero feature rows; their cosine similarity is taken as 0");
    }
    // inverted index: feature -> (node, value), nodes ascending
    let mut columns: Vec<Vec<(usize, f64)>> = vec![Vec::new(); x.cols()];
    for i in 0..n {
        for &(f, v) in rows.row(i) {
            columns[f].push((i, v));
        }
    }
    let take = k.min(n.saturating_sub(1));
    let mut acc = vec![0.0; n];
    let mut lists = Vec::with_capacity(n);
    for i in 0..n {
        acc.iter_mut().for_each(|a| *a = 0.0);
        for &(f, v) in rows.row(i) {
            for &(j, u) in &columns[f] {
                acc[j] += v * u;
            }
        }
        let mut scored: Vec<(f64, usize)> = (0..n)
            .filter(|&j| j != i)
            .map(|j| {
                let denom = norms[i] * norms[j];
                let cos = if denom == 0.0 { 0.0 } else { acc[j] / denom };
                (cos, j)
            })
            .collect();
        let order = |a: &(f64, usize), b: &(f64, usize)| -> Ordering {
            b.0.total_cmp(&a.0).then(a.1.cmp(&b.1))
        };
        if take < scored.len() && take > 0 {
            scored.select_nth_unstable_by(take - 1, order);
            scored.truncate(take);
        }
        scored.sort_unstable_by(order);
        scored.truncate(take);
        lists.push(scored.into_iter().map(|(_, j)| j).collect());
    }
    Ok(CandidateSets { lists, zero_rows })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn orthogonal_rows_tie_break_to_lowest_index() {
        let c = build_candidates(&DenseMatrix::identity(4), 1).unwrap();
        assert_eq!(c.of(0), &[1]);
        assert_eq!(c.of(1), &[0]);
        assert_eq!(c.of(3), &[0]);
    }

    #[test]
    fn parallel_beats_orthogonal() {
        let x = DenseMatrix::from_rows(&[[1.0, 0.0], [2.0, 0.0], [0.0, 1.0]]).unwrap();
        let c = build_candidates(&x, 1).unwrap();
        assert_eq!(c.of(0), &[1]);
    }

    #[test]
    fn list_length_is_capped_by_n_minus_one() {
        let c = build_candidates(&DenseMatrix::identity(3), 10).unwrap();
        assert!((0..3).all(|i| c.of(i).len() == 2));
    }

    #[test]
    fn zero_row_is_counted_and_scores_zero() {
        let x = DenseMatrix::from_rows(&[[0.0, 0.0], [1.0, 0.0], [-1.0, 0.0]]).unwrap();
        let c = build_candidates(&x, 2).unwrap();
        assert_eq!(c.zero_rows, 1);
        // node 1: cos(1,0)=0 beats cos(1,2)=-1
        assert_eq!(c.of(1), &[0, 2]);
        assert_eq!(c.of(0), &[1, 2]);
    }

    #[test]
    fn k_zero_rejected() {
        assert!(build_candidates(&DenseMatrix::identity(2), 0).is_err());
    }
}
