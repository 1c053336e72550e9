//! Finite discrete memoryless channels stored row by row.

use crate::error::{Error, Result};

/// Rows whose nonzero fraction falls below this are stored sparsely.
pub const SPARSE_THRESHOLD: f64 = 0.1;

/// One row of a transition matrix, `p(y | x)` for a fixed input `x`.
#[derive(Debug, Clone, PartialEq)]
pub enum Row {
    Dense(Vec<f64>),
    Sparse { cols: Vec<u32>, vals: Vec<f64> },
}

impl Row {
    /// Builds a row from `(column, value)` pairs sorted by column. Zero values
    /// are dropped.
    pub fn from_sorted_entries(num_outputs: usize, entries: &[(u32, f64)]) -> Row {
        let nnz = entries.iter().filter(|(_, v)| *v != 0.0).count();
        if num_outputs == 0 || (nnz as f64) < SPARSE_THRESHOLD * num_outputs as f64 {
            let (cols, vals) = entries.iter().filter(|(_, v)| *v != 0.0).copied().unzip();
            Row::Sparse { cols, vals }
        } else {
            let mut dense = vec![0.0; num_outputs];
            for &(c, v) in entries {
                dense[c as usize] = v;
            }
            Row::Dense(dense)
        }
    }

    pub fn from_dense(values: Vec<f64>) -> Row {
        let n = values.len();
        let entries: Vec<(u32, f64)> = values
            .into_iter()
            .enumerate()
            .map(|(c, v)| (c as u32, v))
            .collect();
        Row::from_sorted_entries(n, &entries)
    }

    /// Nonzero entries in increasing column order.
    pub fn nonzeros(&self) -> RowIter<'_> {
        match self {
            Row::Dense(v) => RowIter::Dense(v.iter().enumerate()),
            Row::Sparse { cols, vals } => RowIter::Sparse(cols.iter().zip(vals.iter())),
        }
    }

    pub fn get(&self, col: usize) -> f64 {
        match self {
            Row::Dense(v) => v.get(col).copied().unwrap_or(0.0),
            Row::Sparse { cols, vals } => cols
                .binary_search(&(col as u32))
                .map_or(0.0, |k| vals[k]),
        }
    }

    pub fn sum(&self) -> f64 {
        self.nonzeros().map(|(_, v)| v).sum()
    }

    pub fn nnz(&self) -> usize {
        self.nonzeros().count()
    }

    pub fn is_sparse(&self) -> bool {
        matches!(self, Row::Sparse { .. })
    }

    fn scale(&mut self, factor: f64) {
        let vals = match self {
            Row::Dense(v) => v,
            Row::Sparse { vals, .. } => vals,
        };
        for v in vals {
            *v *= factor;
        }
    }

    /// Approximate heap footprint in bytes.
    pub fn heap_bytes(&self) -> usize {
        match self {
            Row::Dense(v) => v.len() * 8,
            Row::Sparse { cols, vals } => cols.len() * 4 + vals.len() * 8,
        }
    }
}

pub enum RowIter<'a> {
    Dense(std::iter::Enumerate<std::slice::Iter<'a, f64>>),
    Sparse(std::iter::Zip<std::slice::Iter<'a, u32>, std::slice::Iter<'a, f64>>),
}

impl Iterator for RowIter<'_> {
    type Item = (usize, f64);

    #[inline]
    fn next(&mut self) -> Option<(usize, f64)> {
        match self {
            RowIter::Dense(it) => it.find(|(_, v)| **v != 0.0).map(|(c, &v)| (c, v)),
            RowIter::Sparse(it) => it.next().map(|(&c, &v)| (c as usize, v)),
        }
    }
}

/// A channel with finitely many inputs and outputs.
#[derive(Debug, Clone, PartialEq)]
pub struct Dmc {
    num_outputs: usize,
    rows: Vec<Row>,
}

impl Dmc {
    pub fn new(num_outputs: usize, rows: Vec<Row>) -> Result<Self> {
        if rows.is_empty() {
            return Err(Error::InvalidParameter("channel needs at least one input".into()));
        }
        for (j, row) in rows.iter().enumerate() {
            let out_of_range = match row {
                Row::Dense(v) => v.len() != num_outputs,
                Row::Sparse { cols, vals } => {
                    cols.len() != vals.len()
                        || cols.iter().any(|&c| c as usize >= num_outputs)
                        || cols.windows(2).any(|w| w[0] >= w[1])
                }
            };
            if out_of_range {
                return Err(Error::InvalidParameter(format!(
                    "row {j} does not fit {num_outputs} outputs"
                )));
            }
            if row.nonzeros().any(|(_, v)| !(v.is_finite() && v >= 0.0)) {
                return Err(Error::InvalidParameter(format!(
                    "row {j} has a negative or non-finite entry"
                )));
            }
        }
        Ok(Self { num_outputs, rows })
    }

    pub fn from_dense(rows: Vec<Vec<f64>>) -> Result<Self> {
        let n = rows.first().map_or(0, Vec::len);
        Self::new(n, rows.into_iter().map(Row::from_dense).collect())
    }

    pub fn num_inputs(&self) -> usize {
        self.rows.len()
    }

    pub fn num_outputs(&self) -> usize {
        self.num_outputs
    }

    pub fn rows(&self) -> &[Row] {
        &self.rows
    }

    pub fn row(&self, j: usize) -> &Row {
        &self.rows[j]
    }

    pub fn entry(&self, j: usize, i: usize) -> f64 {
        self.rows[j].get(i)
    }

    pub fn nnz(&self) -> usize {
        self.rows.iter().map(Row::nnz).sum()
    }

    pub fn heap_bytes(&self) -> usize {
        self.rows.iter().map(Row::heap_bytes).sum()
    }

    pub fn row_sums(&self) -> Vec<f64> {
        self.rows.iter().map(Row::sum).collect()
    }

    /// Multiplies every entry by `factor`.
    pub fn scale(&mut self, factor: f64) {
        for r in &mut self.rows {
            r.scale(factor);
        }
    }

    /// Errors unless every row sums to one within `tol`.
    pub fn check_stochastic(&self, tol: f64) -> Result<()> {
        for (row, sum) in self.row_sums().into_iter().enumerate() {
            if !((sum - 1.0).abs() <= tol) {
                return Err(Error::NotStochastic { row, sum });
            }
        }
        Ok(())
    }

    /// Same channel with one extra, never-reached output appended.
    pub fn with_zero_column(&self) -> Dmc {
        let rows = self
            .rows
            .iter()
            .map(|r| match r {
                Row::Dense(v) => {
                    let mut v = v.clone();
                    v.push(0.0);
                    Row::Dense(v)
                }
                sparse => sparse.clone(),
            })
            .collect();
        Dmc {
            num_outputs: self.num_outputs + 1,
            rows,
        }
    }

    /// `p(y) = Σ_j q_j p(y | x_j)`, accumulated in row order.
    pub fn output_distribution(&self, input_dist: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.num_outputs];
        for (row, &q) in self.rows.iter().zip(input_dist) {
            if q == 0.0 {
                continue;
            }
            for (c, v) in row.nonzeros() {
                out[c] += q * v;
            }
        }
        out
    }
}

/// Validates a probability vector over `n` outcomes.
pub fn check_distribution(dist: &[f64], n: usize, tol: f64) -> Result<()> {
    if dist.len() != n {
        return Err(Error::InvalidDistribution(format!(
            "expected {n} entries, got {}",
            dist.len()
        )));
    }
    if let Some(bad) = dist.iter().find(|p| !(p.is_finite() && **p >= 0.0)) {
        return Err(Error::InvalidDistribution(format!("entry {bad} is not a probability")));
    }
    let sum: f64 = dist.iter().sum();
    if (sum - 1.0).abs() > tol {
        return Err(Error::InvalidDistribution(format!("entries sum to {sum}")));
    }
    Ok(())
}
