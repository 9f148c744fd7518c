use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

use super::dense::DenseMatrix;

/// Symmetric sparse matrix with weights in `[0, 1]`, stored row-sorted.
///
/// Diagonal entries are allowed (normalized adjacencies carry self-loops).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SparseWeighted {
    num_nodes: usize,
    entries: Vec<(usize, usize, f64)>,
    #[serde(skip)]
    row_ptr: Vec<usize>,
}

const SYMMETRY_TOL: f64 = 0.0;

impl SparseWeighted {
    /// Validates and sorts the entries.
    pub fn from_entries(num_nodes: usize, mut entries: Vec<(usize, usize, f64)>) -> Result<Self> {
        for &(i, j, w) in &entries {
            if i >= num_nodes || j >= num_nodes {
                return Err(Error::Domain(format!(
                    "sparse entry ({i}, {j}) out of range for {num_nodes} nodes"
                )));
            }
            if !(0.0..=1.0).contains(&w) {
                return Err(Error::Domain(format!(
                    "sparse entry ({i}, {j}) has weight {w} outside [0, 1]"
                )));
            }
        }
        entries.sort_by_key(|e| (e.0, e.1));
        if entries.windows(2).any(|w| (w[0].0, w[0].1) == (w[1].0, w[1].1)) {
            return Err(Error::Domain("duplicate sparse entry".into()));
        }
        let s = Self::assemble(num_nodes, entries);
        for &(i, j, w) in &s.entries {
            match s.get(j, i) {
                Some(m) if (m - w).abs() <= SYMMETRY_TOL => {}
                _ => {
                    return Err(Error::Domain(format!(
                        "sparse entry ({i}, {j}) has no symmetric partner"
                    )))
                }
            }
        }
        Ok(s)
    }

    /// Builds the symmetric matrix from upper-triangle pairs `(i, j, w)`,
    /// mirroring each off-diagonal entry.
    pub fn from_undirected(num_nodes: usize, pairs: &[(usize, usize, f64)]) -> Result<Self> {
        let mut entries = Vec::with_capacity(pairs.len() * 2);
        for &(i, j, w) in pairs {
            entries.push((i, j, w));
            if i != j {
                entries.push((j, i, w));
            }
        }
        Self::from_entries(num_nodes, entries)
    }

    fn assemble(num_nodes: usize, entries: Vec<(usize, usize, f64)>) -> Self {
        let mut row_ptr = vec![0usize; num_nodes + 1];
        for &(i, _, _) in &entries {
            row_ptr[i + 1] += 1;
        }
        for r in 0..num_nodes {
            row_ptr[r + 1] += row_ptr[r];
        }
        Self {
            num_nodes,
            entries,
            row_ptr,
        }
    }

    pub fn num_nodes(&self) -> usize {
        self.num_nodes
    }

    pub fn entries(&self) -> &[(usize, usize, f64)] {
        &self.entries
    }

    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    pub fn row(&self, r: usize) -> &[(usize, usize, f64)] {
        &self.entries[self.row_ptr[r]..self.row_ptr[r + 1]]
    }

    pub fn get(&self, i: usize, j: usize) -> Option<f64> {
        let row = self.row(i);
        row.binary_search_by(|e| e.1.cmp(&j)).ok().map(|k| row[k].2)
    }

    /// `self · m`
    pub fn spmm(&self, m: &DenseMatrix) -> Result<DenseMatrix> {
        if m.rows() != self.num_nodes {
            return Err(Error::Shape {
                op: "spmm",
                left: (self.num_nodes, self.num_nodes),
                right: m.shape(),
            });
        }
        let mut out = DenseMatrix::zeros(self.num_nodes, m.cols());
        for i in 0..self.num_nodes {
            for &(_, j, w) in self.row(i) {
                let src = m.row(j);
                for (o, s) in out.row_mut(i).iter_mut().zip(src) {
                    *o += w * s;
                }
            }
        }
        Ok(out)
    }

    pub fn to_dense(&self) -> DenseMatrix {
        let mut d = DenseMatrix::zeros(self.num_nodes, self.num_nodes);
        for &(i, j, w) in &self.entries {
            d.set(i, j, w);
        }
        d
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_asymmetric_and_out_of_range() {
        assert!(SparseWeighted::from_entries(2, vec![(0, 1, 0.5)]).is_err());
        assert!(SparseWeighted::from_entries(2, vec![(0, 2, 0.5), (2, 0, 0.5)]).is_err());
        assert!(SparseWeighted::from_entries(2, vec![(0, 1, 1.5), (1, 0, 1.5)]).is_err());
        assert!(SparseWeighted::from_entries(2, vec![(0, 1, 0.5), (1, 0, 0.4)]).is_err());
        assert!(
            SparseWeighted::from_entries(2, vec![(0, 1, 0.5), (1, 0, 0.5), (0, 1, 0.5)]).is_err()
        );
    }

    #[test]
    fn spmm_matches_dense() {
        let s = SparseWeighted::from_undirected(3, &[(0, 1, 0.5), (1, 2, 0.25), (2, 2, 1.0)]).unwrap();
        let m = DenseMatrix::from_rows(&[[1.0, 2.0], [3.0, 4.0], [5.0, 6.0]]).unwrap();
        let want = crate::numcore::ops::matmul(&s.to_dense(), &m).unwrap();
        assert!(s.spmm(&m).unwrap().max_abs_diff(&want) < 1e-15);
        assert_eq!(s.get(1, 0), Some(0.5));
        assert_eq!(s.get(0, 2), None);
    }
}
