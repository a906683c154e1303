//! Labeled binary biadjacency matrices and their weighted projections.
//!
//! The biadjacency matrix `B` has one row per agent and one column per
//! artifact; `B[i][j] = 1` when agent `i` is affiliated with artifact `j`.
//! Rows are stored as bitsets so that projection reduces to AND + popcount
//! over 64-bit words.

use std::collections::HashMap;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::matrix::SquareMatrix;

/// Row and column sums of a biadjacency matrix (the two degree sequences).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Margins {
    pub rows: Vec<usize>,
    pub cols: Vec<usize>,
}

/// A labeled binary bipartite graph (agents x artifacts).
#[derive(Debug, Clone, PartialEq)]
pub struct BipartiteGraph {
    m: usize,
    n: usize,
    words_per_row: usize,
    bits: Vec<u64>,
    row_labels: Vec<String>,
    col_labels: Vec<String>,
    row_index: HashMap<String, usize>,
}

impl BipartiteGraph {
    /// Build a graph from dense 0/1 rows. Labels must be unique per axis and
    /// both dimensions must be at least 1.
    pub fn from_rows(
        row_labels: Vec<String>,
        col_labels: Vec<String>,
        rows: &[Vec<u8>],
    ) -> Result<Self> {
        let m = row_labels.len();
        let n = col_labels.len();
        if m == 0 || n == 0 {
            return Err(Error::InvalidInput(
                "a bipartite graph needs at least one row and one column".into(),
            ));
        }
        if rows.len() != m {
            return Err(Error::InvalidInput(format!(
                "expected {m} rows, got {}",
                rows.len()
            )));
        }
        let words_per_row = n.div_ceil(64);
        let mut bits = vec![0u64; m * words_per_row];
        for (i, row) in rows.iter().enumerate() {
            if row.len() != n {
                return Err(Error::InvalidInput(format!(
                    "row {i} has {} entries, expected {n}",
                    row.len()
                )));
            }
            for (j, &v) in row.iter().enumerate() {
                match v {
                    0 => {}
                    1 => bits[i * words_per_row + j / 64] |= 1u64 << (j % 64),
                    other => {
                        return Err(Error::InvalidInput(format!(
                            "entry ({i}, {j}) is {other}; entries must be 0 or 1"
                        )))
                    }
                }
            }
        }
        Self::from_parts(row_labels, col_labels, words_per_row, bits)
    }

    pub(crate) fn from_parts(
        row_labels: Vec<String>,
        col_labels: Vec<String>,
        words_per_row: usize,
        bits: Vec<u64>,
    ) -> Result<Self> {
        let m = row_labels.len();
        let n = col_labels.len();
        let row_index = unique_index(&row_labels, "row")?;
        unique_index(&col_labels, "column")?;
        debug_assert_eq!(bits.len(), m * words_per_row);
        Ok(Self {
            m,
            n,
            words_per_row,
            bits,
            row_labels,
            col_labels,
            row_index,
        })
    }

    pub fn rows(&self) -> usize {
        self.m
    }

    pub fn cols(&self) -> usize {
        self.n
    }

    pub fn row_labels(&self) -> &[String] {
        &self.row_labels
    }

    pub fn col_labels(&self) -> &[String] {
        &self.col_labels
    }

    /// Index of the row with this label.
    pub fn row_position(&self, label: &str) -> Option<usize> {
        self.row_index.get(label).copied()
    }

    #[inline]
    pub fn entry(&self, i: usize, j: usize) -> bool {
        self.bits[i * self.words_per_row + j / 64] >> (j % 64) & 1 == 1
    }

    pub(crate) fn words_per_row(&self) -> usize {
        self.words_per_row
    }

    pub(crate) fn bit_rows(&self) -> &[u64] {
        &self.bits
    }

    #[inline]
    pub(crate) fn bit_row(&self, i: usize) -> &[u64] {
        &self.bits[i * self.words_per_row..(i + 1) * self.words_per_row]
    }

    /// Dense 0/1 copy, row-major.
    pub fn to_dense(&self) -> Vec<Vec<u8>> {
        (0..self.m)
            .map(|i| (0..self.n).map(|j| self.entry(i, j) as u8).collect())
            .collect()
    }

    /// Row sums and column sums.
    pub fn margins(&self) -> Margins {
        let rows = (0..self.m)
            .map(|i| self.bit_row(i).iter().map(|w| w.count_ones() as usize).sum())
            .collect();
        let mut cols = vec![0usize; self.n];
        for i in 0..self.m {
            for (j, c) in cols.iter_mut().enumerate() {
                *c += self.entry(i, j) as usize;
            }
        }
        Margins { rows, cols }
    }

    /// Total number of edges (sum over all entries).
    pub fn edge_total(&self) -> usize {
        self.bits.iter().map(|w| w.count_ones() as usize).sum()
    }

    /// Weighted unipartite projection `G = B * B^T`. Off-diagonal entries
    /// count shared artifacts; the diagonal holds agent degrees.
    pub fn project(&self) -> Projection {
        let m = self.m;
        let mut weights = SquareMatrix::<u32>::new(m);
        weights
            .data_mut()
            .par_chunks_mut(m)
            .enumerate()
            .for_each(|(i, out_row)| {
                let a = self.bit_row(i);
                for (j, out) in out_row.iter_mut().enumerate().skip(i) {
                    let b = self.bit_row(j);
                    *out = dot(a, b);
                }
            });
        // mirror the upper triangle
        for i in 0..m {
            for j in i + 1..m {
                let v = weights.get(i, j);
                weights.set(j, i, v);
            }
        }
        Projection {
            weights,
            row_labels: self.row_labels.clone(),
        }
    }
}

#[inline]
pub(crate) fn dot(a: &[u64], b: &[u64]) -> u32 {
    a.iter().zip(b).map(|(x, y)| (x & y).count_ones()).sum()
}

fn unique_index(labels: &[String], axis: &str) -> Result<HashMap<String, usize>> {
    let mut index = HashMap::with_capacity(labels.len());
    for (i, l) in labels.iter().enumerate() {
        if index.insert(l.clone(), i).is_some() {
            return Err(Error::InvalidInput(format!(
                "duplicate {axis} label {l:?}"
            )));
        }
    }
    Ok(index)
}

/// Symmetric weighted co-occurrence matrix with agent degrees on the
/// diagonal.
#[derive(Debug, Clone, PartialEq)]
pub struct Projection {
    weights: SquareMatrix<u32>,
    row_labels: Vec<String>,
}

impl Projection {
    /// Build a projection from an existing symmetric weight matrix.
    pub fn from_weights(row_labels: Vec<String>, weights: SquareMatrix<u32>) -> Result<Self> {
        if weights.n() != row_labels.len() {
            return Err(Error::InvalidInput(
                "label count does not match matrix size".into(),
            ));
        }
        if !weights.is_symmetric() {
            return Err(Error::InvalidInput("projection must be symmetric".into()));
        }
        unique_index(&row_labels, "row")?;
        Ok(Self {
            weights,
            row_labels,
        })
    }

    pub fn size(&self) -> usize {
        self.weights.n()
    }

    #[inline]
    pub fn weight(&self, i: usize, j: usize) -> u32 {
        self.weights.get(i, j)
    }

    /// Degree of agent `i` (diagonal entry).
    pub fn degree(&self, i: usize) -> u32 {
        self.weights.get(i, i)
    }

    pub fn row_labels(&self) -> &[String] {
        &self.row_labels
    }

    pub fn weights(&self) -> &SquareMatrix<u32> {
        &self.weights
    }

    /// Off-diagonal upper-triangle weights, the population over which
    /// statistic-valued thresholds are resolved.
    pub fn off_diagonal_weights(&self) -> Vec<f64> {
        self.weights
            .upper_triangle()
            .map(|(_, _, w)| w as f64)
            .collect()
    }

    /// Structural bounds on every off-diagonal weight given the artifact
    /// count `|W|` of the originating bipartite graph:
    /// `max(0, min(Gii, Gjj) - (|W| - max(Gii, Gjj))) <= Gij <= min(Gii, Gjj)`.
    pub fn edge_weight_bounds(&self, artifact_count: usize) -> Result<EdgeWeightBounds> {
        let m = self.size();
        let max_degree = (0..m).map(|i| self.degree(i)).max().unwrap_or(0);
        if (artifact_count as u64) < max_degree as u64 {
            return Err(Error::InvalidInput(format!(
                "artifact count {artifact_count} is smaller than the largest degree {max_degree}"
            )));
        }
        let mut lo = SquareMatrix::<u32>::new(m);
        let mut hi = SquareMatrix::<u32>::new(m);
        for i in 0..m {
            lo.set(i, i, self.degree(i));
            hi.set(i, i, self.degree(i));
            for j in i + 1..m {
                let (di, dj) = (self.degree(i) as i64, self.degree(j) as i64);
                let slack = artifact_count as i64 - di.max(dj);
                let m_ij = di.min(dj) - slack;
                lo.set_sym(i, j, m_ij.max(0) as u32);
                hi.set_sym(i, j, di.min(dj) as u32);
            }
        }
        Ok(EdgeWeightBounds { lo, hi })
    }
}

/// Per-pair lower/upper bounds from [`Projection::edge_weight_bounds`].
#[derive(Debug, Clone, PartialEq)]
pub struct EdgeWeightBounds {
    pub lo: SquareMatrix<u32>,
    pub hi: SquareMatrix<u32>,
}

impl EdgeWeightBounds {
    pub fn pair(&self, i: usize, j: usize) -> (u32, u32) {
        (self.lo.get(i, j), self.hi.get(i, j))
    }
}

/// Sample skewness `g1 = m3 / m2^(3/2)` with population-normalized moments.
/// Zero-variance samples have skewness 0; empty input is rejected.
pub fn skewness(values: &[f64]) -> Result<f64> {
    if values.is_empty() {
        return Err(Error::InvalidInput("skewness of an empty sample".into()));
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let m2 = values.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n;
    if m2 == 0.0 {
        return Ok(0.0);
    }
    let m3 = values.iter().map(|x| (x - mean).powi(3)).sum::<f64>() / n;
    Ok(m3 / m2.powf(1.5))
}

/// Skewness of integer counts (margins).
pub fn skewness_of_counts(counts: &[usize]) -> Result<f64> {
    let values: Vec<f64> = counts.iter().map(|&c| c as f64).collect();
    skewness(&values)
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn graph(rows: &[Vec<u8>]) -> BipartiteGraph {
        let m = rows.len();
        let n = rows[0].len();
        BipartiteGraph::from_rows(
            (0..m).map(|i| format!("r{i}")).collect(),
            (0..n).map(|j| format!("c{j}")).collect(),
            rows,
        )
        .unwrap()
    }

    #[test]
    fn identity_projection_is_diagonal() {
        let b = graph(&[vec![1, 0], vec![0, 1]]);
        let g = b.project();
        assert_eq!(g.weight(0, 0), 1);
        assert_eq!(g.weight(1, 1), 1);
        assert_eq!(g.weight(0, 1), 0);
    }

    #[test]
    fn hand_multiplied_projection() {
        // B = [[1,1,0],[1,1,1]] -> B*B^T = [[2,2],[2,3]]
        let b = graph(&[vec![1, 1, 0], vec![1, 1, 1]]);
        let g = b.project();
        assert_eq!(g.weight(0, 0), 2);
        assert_eq!(g.weight(0, 1), 2);
        assert_eq!(g.weight(1, 0), 2);
        assert_eq!(g.weight(1, 1), 3);
        assert_eq!(g.row_labels(), b.row_labels());
    }

    #[test]
    fn margins_count_rows_and_columns() {
        let b = graph(&[vec![0, 0, 0], vec![0, 0, 0]]);
        assert_eq!(b.margins(), Margins { rows: vec![0, 0], cols: vec![0, 0, 0] });

        let b = graph(&[vec![1, 1, 0], vec![1, 1, 1]]);
        let m = b.margins();
        assert_eq!(m.rows, vec![2, 3]);
        assert_eq!(m.cols, vec![2, 2, 1]);
        assert_eq!(m.rows.iter().sum::<usize>(), m.cols.iter().sum::<usize>());
    }

    #[test]
    fn rejects_non_binary_entries() {
        let err = BipartiteGraph::from_rows(
            vec!["a".into()],
            vec!["x".into()],
            &[vec![2]],
        )
        .unwrap_err();
        assert!(err.to_string().contains("0 or 1"));
    }

    #[test]
    fn rejects_duplicate_labels_and_empty_axes() {
        assert!(BipartiteGraph::from_rows(
            vec!["a".into(), "a".into()],
            vec!["x".into()],
            &[vec![1], vec![0]],
        )
        .is_err());
        assert!(BipartiteGraph::from_rows(vec![], vec!["x".into()], &[]).is_err());
    }

    #[test]
    fn bounds_formula() {
        // degrees 3 and 2 with |W| = 4: M = 2 - (4 - 3) = 1, hi = 2
        let mut w = SquareMatrix::<u32>::new(2);
        w.set(0, 0, 3);
        w.set(1, 1, 2);
        w.set_sym(0, 1, 2);
        let g = Projection::from_weights(vec!["a".into(), "b".into()], w).unwrap();
        let b = g.edge_weight_bounds(4).unwrap();
        assert_eq!(b.pair(0, 1), (1, 2));

        // degrees 2 and 2 with |W| = 10: M = 2 - 8 = -6, clamped to 0
        let mut w = SquareMatrix::<u32>::new(2);
        w.set(0, 0, 2);
        w.set(1, 1, 2);
        let g = Projection::from_weights(vec!["a".into(), "b".into()], w).unwrap();
        let b = g.edge_weight_bounds(10).unwrap();
        assert_eq!(b.pair(0, 1), (0, 2));
    }

    #[test]
    fn bounds_empty_row_and_inconsistent_count() {
        let b = graph(&[vec![0, 0], vec![1, 1]]);
        let g = b.project();
        let bounds = g.edge_weight_bounds(b.cols()).unwrap();
        assert_eq!(bounds.pair(0, 1), (0, 0));
        assert!(g.edge_weight_bounds(1).is_err());
    }

    #[test]
    fn skewness_matches_oracle() {
        assert_eq!(skewness(&[1.0, 1.0, 1.0]).unwrap(), 0.0);
        assert_eq!(skewness(&[1.0, 2.0, 3.0]).unwrap(), 0.0);
        // frozen from an independent statistics oracle
        let g1 = skewness(&[0.0, 0.0, 0.0, 1.0]).unwrap();
        assert!((g1 - 1.154_700_538_379_251_5).abs() < 1e-12);
        let g1 = skewness(&[0.0, 1.0, 1.0, 3.0, 7.0]).unwrap();
        assert!((g1 - 1.003_880_348_854_969_2).abs() < 1e-12);
        assert!(skewness(&[]).is_err());
    }

    #[test]
    fn projection_diagonal_sums_to_edge_total() {
        let b = graph(&[vec![1, 1, 0, 1], vec![0, 1, 1, 0], vec![1, 0, 0, 0]]);
        let g = b.project();
        let diag: u32 = (0..b.rows()).map(|i| g.degree(i)).sum();
        assert_eq!(diag as usize, b.edge_total());
    }
}
