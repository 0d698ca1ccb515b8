//! Compressed sparse row storage and the shifted sparse LU used by the
//! eigensolvers.

use faer::linalg::solvers::Solve;
use faer::sparse::{SparseColMat, Triplet};
use faer::Mat;

use crate::error::{Error, Result};

/// Accumulates `(row, col, value)` entries; duplicates are summed.
#[derive(Debug, Clone)]
pub struct TripletBuilder {
    n: usize,
    rows: Vec<Vec<(usize, f64)>>,
}

impl TripletBuilder {
    pub fn new(n: usize) -> Self {
        TripletBuilder {
            n,
            rows: vec![Vec::new(); n],
        }
    }

    #[inline]
    pub fn add(&mut self, row: usize, col: usize, value: f64) {
        debug_assert!(row < self.n && col < self.n);
        self.rows[row].push((col, value));
    }

    pub fn build(self) -> CsrMatrix {
        let mut indptr = Vec::with_capacity(self.n + 1);
        let mut indices = Vec::new();
        let mut values = Vec::new();
        indptr.push(0);
        for mut row in self.rows {
            row.sort_by_key(|&(c, _)| c);
            let mut last = usize::MAX;
            for (c, v) in row {
                if c == last {
                    *values.last_mut().expect("entry exists") += v;
                } else {
                    indices.push(c);
                    values.push(v);
                    last = c;
                }
            }
            indptr.push(indices.len());
        }
        CsrMatrix {
            n: self.n,
            indptr,
            indices,
            values,
        }
    }
}

/// Square real CSR matrix. Structural entries are kept even when their
/// value is zero.
#[derive(Debug, Clone, PartialEq)]
pub struct CsrMatrix {
    n: usize,
    indptr: Vec<usize>,
    indices: Vec<usize>,
    values: Vec<f64>,
}

impl CsrMatrix {
    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn row(&self, r: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let span = self.indptr[r]..self.indptr[r + 1];
        self.indices[span.clone()]
            .iter()
            .copied()
            .zip(self.values[span].iter().copied())
    }

    pub fn get(&self, r: usize, c: usize) -> Option<f64> {
        let span = self.indptr[r]..self.indptr[r + 1];
        let cols = &self.indices[span.clone()];
        cols.binary_search(&c).ok().map(|k| self.values[span.start + k])
    }

    pub fn matvec(&self, x: &[f64], y: &mut [f64]) {
        for (r, out) in y.iter_mut().enumerate() {
            *out = self.row(r).map(|(c, v)| v * x[c]).sum();
        }
    }

    /// Maximum absolute row sum.
    pub fn norm_inf(&self) -> f64 {
        (0..self.n)
            .map(|r| self.row(r).map(|(_, v)| v.abs()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    /// True when `(r, c)` is stored exactly when `(c, r)` is.
    pub fn is_structurally_symmetric(&self) -> bool {
        (0..self.n).all(|r| self.row(r).all(|(c, _)| self.get(c, r).is_some()))
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|v| v.is_finite())
    }

    fn to_faer_shifted(&self, shift: f64) -> Result<SparseColMat<usize, f64>> {
        let mut triplets = Vec::with_capacity(self.nnz() + self.n);
        let mut has_diag = vec![false; self.n];
        for (r, diag) in has_diag.iter_mut().enumerate() {
            for (c, v) in self.row(r) {
                let v = if r == c {
                    *diag = true;
                    v - shift
                } else {
                    v
                };
                triplets.push(Triplet::new(r, c, v));
            }
        }
        for (r, present) in has_diag.into_iter().enumerate() {
            if !present {
                triplets.push(Triplet::new(r, r, -shift));
            }
        }
        SparseColMat::try_new_from_triplets(self.n, self.n, &triplets)
            .map_err(|e| Error::Linalg(format!("sparse assembly: {e:?}")))
    }
}

/// LU factorization of `A - shift * I`.
pub struct ShiftedLu {
    lu: faer::sparse::linalg::solvers::Lu<usize, f64>,
    n: usize,
}

impl ShiftedLu {
    pub fn new(a: &CsrMatrix, shift: f64) -> Result<Self> {
        let shifted = a.to_faer_shifted(shift)?;
        let lu = shifted
            .sp_lu()
            .map_err(|e| Error::Linalg(format!("sparse LU failed: {e:?}")))?;
        Ok(ShiftedLu { lu, n: a.dim() })
    }

    /// Overwrites `x` with `(A - shift I)^{-1} x`.
    pub fn solve_in_place(&self, x: &mut [f64]) {
        let rhs = Mat::<f64>::from_fn(self.n, 1, |i, _| x[i]);
        let sol = self.lu.solve(&rhs);
        for (i, xi) in x.iter_mut().enumerate() {
            *xi = sol[(i, 0)];
        }
    }
}
