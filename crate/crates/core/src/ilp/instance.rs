use std::collections::BTreeMap;

use crate::error::{Error, Result};

/// Compressed sparse storage along one axis: `ptr[k]..ptr[k + 1]` indexes the
/// entries of lane `k` in `idx`/`val`, sorted by the cross index.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseLanes {
    ptr: Vec<usize>,
    idx: Vec<usize>,
    val: Vec<f64>,
}

impl SparseLanes {
    fn from_sorted(lanes: usize, entries: impl Iterator<Item = (usize, usize, f64)>) -> Self {
        let mut ptr = vec![0usize; lanes + 1];
        let mut idx = Vec::new();
        let mut val = Vec::new();
        for (lane, cross, v) in entries {
            ptr[lane + 1] += 1;
            idx.push(cross);
            val.push(v);
        }
        for k in 0..lanes {
            ptr[k + 1] += ptr[k];
        }
        SparseLanes { ptr, idx, val }
    }

    pub fn lanes(&self) -> usize {
        self.ptr.len() - 1
    }

    pub fn nnz(&self) -> usize {
        self.idx.len()
    }

    /// Nonzeros of lane `k` as `(cross_index, value)` pairs.
    #[inline]
    pub fn lane(&self, k: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let r = self.ptr[k]..self.ptr[k + 1];
        self.idx[r.clone()].iter().copied().zip(self.val[r].iter().copied())
    }

    #[inline]
    pub fn lane_len(&self, k: usize) -> usize {
        self.ptr[k + 1] - self.ptr[k]
    }
}

/// A binary ILP in canonical form: minimize `c·x` subject to `A x <= b`,
/// `x ∈ {0,1}^n`.
///
/// The constraint matrix is kept both row-major (activity and violation
/// updates) and column-major (flip deltas). Both layouts hold the same
/// triplets; neither stores explicit zeros.
#[derive(Debug, Clone, PartialEq)]
pub struct IlpInstance {
    name: String,
    c: Vec<f64>,
    b: Vec<f64>,
    rows: SparseLanes,
    cols: SparseLanes,
    metadata: BTreeMap<String, String>,
}

impl IlpInstance {
    /// Builds an instance from coordinate triplets `(row, col, value)`.
    ///
    /// Zero-valued triplets are dropped after the duplicate check, so a
    /// triplet list with `(0, 0, 0.0)` twice is still rejected.
    pub fn new(
        name: impl Into<String>,
        n: usize,
        m: usize,
        c: Vec<f64>,
        triplets: &[(usize, usize, f64)],
        b: Vec<f64>,
    ) -> Result<Self> {
        if n == 0 {
            return Err(Error::DimensionMismatch {
                what: "variable count",
                got: 0,
                expected: 1,
            });
        }
        if c.len() != n {
            return Err(Error::DimensionMismatch {
                what: "objective",
                got: c.len(),
                expected: n,
            });
        }
        if b.len() != m {
            return Err(Error::DimensionMismatch {
                what: "right-hand side",
                got: b.len(),
                expected: m,
            });
        }
        if c.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFiniteValue("objective"));
        }
        if b.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFiniteValue("right-hand side"));
        }
        for &(r, k, v) in triplets {
            if r >= m {
                return Err(Error::IndexOutOfRange { index: r, limit: m });
            }
            if k >= n {
                return Err(Error::IndexOutOfRange { index: k, limit: n });
            }
            if !v.is_finite() {
                return Err(Error::NonFiniteValue("constraint matrix"));
            }
        }

        let mut sorted: Vec<(usize, usize, f64)> = triplets.to_vec();
        sorted.sort_by_key(|&(r, k, _)| (r, k));
        if let Some(w) = sorted.windows(2).find(|w| w[0].0 == w[1].0 && w[0].1 == w[1].1) {
            return Err(Error::DuplicateEntry {
                row: w[0].0,
                col: w[0].1,
            });
        }
        sorted.retain(|&(_, _, v)| v != 0.0);

        let rows = SparseLanes::from_sorted(m, sorted.iter().copied());
        let mut by_col = sorted;
        by_col.sort_by_key(|&(r, k, _)| (k, r));
        let cols = SparseLanes::from_sorted(n, by_col.into_iter().map(|(r, k, v)| (k, r, v)));

        Ok(IlpInstance {
            name: name.into(),
            c,
            b,
            rows,
            cols,
            metadata: BTreeMap::new(),
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn set_name(&mut self, name: impl Into<String>) {
        self.name = name.into();
    }

    /// Number of variables.
    pub fn n(&self) -> usize {
        self.c.len()
    }

    /// Number of constraint rows.
    pub fn m(&self) -> usize {
        self.b.len()
    }

    pub fn nnz(&self) -> usize {
        self.rows.nnz()
    }

    pub fn objective_coeffs(&self) -> &[f64] {
        &self.c
    }

    pub fn rhs(&self) -> &[f64] {
        &self.b
    }

    pub fn rows(&self) -> &SparseLanes {
        &self.rows
    }

    pub fn cols(&self) -> &SparseLanes {
        &self.cols
    }

    /// Nonzeros of constraint row `k` as `(col, value)`.
    #[inline]
    pub fn row(&self, k: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.rows.lane(k)
    }

    /// Nonzeros of column `j` as `(row, value)`.
    #[inline]
    pub fn col(&self, j: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.cols.lane(j)
    }

    /// Triplets in row-major order.
    pub fn triplets(&self) -> Vec<(usize, usize, f64)> {
        (0..self.m())
            .flat_map(|r| self.row(r).map(move |(k, v)| (r, k, v)))
            .collect()
    }

    /// Triplets in column-major order.
    pub fn triplets_by_col(&self) -> Vec<(usize, usize, f64)> {
        (0..self.n())
            .flat_map(|k| self.col(k).map(move |(r, v)| (r, k, v)))
            .collect()
    }

    pub fn metadata(&self) -> &BTreeMap<String, String> {
        &self.metadata
    }

    pub fn metadata_mut(&mut self) -> &mut BTreeMap<String, String> {
        &mut self.metadata
    }

    pub fn with_metadata(mut self, key: impl Into<String>, value: impl Into<String>) -> Self {
        self.metadata.insert(key.into(), value.into());
        self
    }

    pub(crate) fn check_len(&self, x: &[bool]) -> Result<()> {
        if x.len() != self.n() {
            return Err(Error::DimensionMismatch {
                what: "assignment",
                got: x.len(),
                expected: self.n(),
            });
        }
        Ok(())
    }

    /// `c·x`.
    pub fn objective(&self, x: &[bool]) -> Result<f64> {
        self.check_len(x)?;
        Ok(self.objective_unchecked(x))
    }

    pub(crate) fn objective_unchecked(&self, x: &[bool]) -> f64 {
        self.c
            .iter()
            .zip(x)
            .filter(|(_, &on)| on)
            .map(|(&cj, _)| cj)
            .sum()
    }

    /// Row activities `A x`.
    pub fn activities(&self, x: &[bool]) -> Result<Vec<f64>> {
        self.check_len(x)?;
        Ok(self.activities_unchecked(x))
    }

    pub(crate) fn activities_unchecked(&self, x: &[bool]) -> Vec<f64> {
        (0..self.m())
            .map(|r| self.row(r).filter(|&(k, _)| x[k]).map(|(_, v)| v).sum())
            .collect()
    }
}
