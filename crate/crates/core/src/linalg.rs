//! Sparse matrices in compressed-row form and a direct LU solver.
//!
//! Factorization is delegated to `faer`'s sparse LU (fill-reducing column
//! ordering, partial pivoting), built without thread parallelism so that
//! results are bit-reproducible.

use std::io::Write;

use faer::linalg::solvers::Solve;
use faer::sparse::linalg::solvers::Lu;
use faer::sparse::{SparseColMat, Triplet};
use faer::Mat;

use crate::error::{Error, Result};

/// Accumulates `(row, col, value)` entries; duplicates are summed in
/// insertion order when the matrix is built.
#[derive(Debug, Default, Clone)]
pub struct TripletBuilder {
    n: usize,
    entries: Vec<(usize, usize, f64)>,
}

impl TripletBuilder {
    pub fn new(n: usize) -> Self {
        Self { n, entries: Vec::new() }
    }

    pub fn with_capacity(n: usize, cap: usize) -> Self {
        Self {
            n,
            entries: Vec::with_capacity(cap),
        }
    }

    pub fn push(&mut self, row: usize, col: usize, value: f64) {
        debug_assert!(row < self.n && col < self.n);
        self.entries.push((row, col, value));
    }

    pub fn build(mut self) -> CsrMatrix {
        // stable sort keeps insertion order inside duplicate groups
        self.entries.sort_by_key(|&(r, c, _)| (r, c));
        let mut row_ptr = vec![0usize; self.n + 1];
        let mut col_idx = Vec::with_capacity(self.entries.len());
        let mut values: Vec<f64> = Vec::with_capacity(self.entries.len());
        let mut last: Option<(usize, usize)> = None;
        for (r, c, v) in self.entries {
            if last == Some((r, c)) {
                *values.last_mut().expect("duplicate follows an entry") += v;
            } else {
                col_idx.push(c);
                values.push(v);
                row_ptr[r + 1] += 1;
                last = Some((r, c));
            }
        }
        for i in 0..self.n {
            row_ptr[i + 1] += row_ptr[i];
        }
        CsrMatrix {
            n: self.n,
            row_ptr,
            col_idx,
            values,
        }
    }
}

/// Square sparse matrix, rows sorted by column.
#[derive(Debug, Clone)]
pub struct CsrMatrix {
    n: usize,
    row_ptr: Vec<usize>,
    col_idx: Vec<usize>,
    values: Vec<f64>,
}

impl CsrMatrix {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn row(&self, i: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let r = self.row_ptr[i]..self.row_ptr[i + 1];
        self.col_idx[r.clone()]
            .iter()
            .copied()
            .zip(self.values[r].iter().copied())
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        let r = self.row_ptr[i]..self.row_ptr[i + 1];
        match self.col_idx[r.clone()].binary_search(&j) {
            Ok(k) => self.values[r.start + k],
            Err(_) => 0.0,
        }
    }

    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        (0..self.n).map(|i| self.row(i).map(|(j, v)| v * x[j]).sum()).collect()
    }

    pub fn triplets(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        (0..self.n).flat_map(move |i| self.row(i).map(move |(j, v)| (i, j, v)))
    }

    pub fn norm_inf(&self) -> f64 {
        (0..self.n)
            .map(|i| self.row(i).map(|(_, v)| v.abs()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    /// Largest `|a_ij - a_ji|`.
    pub fn asymmetry(&self) -> f64 {
        self.triplets()
            .map(|(i, j, v)| (v - self.get(j, i)).abs())
            .fold(0.0, f64::max)
    }

    /// Coordinate dump, one `row col value` triplet per line.
    pub fn write_triplets<W: Write>(&self, mut out: W) -> Result<()> {
        for (i, j, v) in self.triplets() {
            writeln!(out, "{i} {j} {v:?}")?;
        }
        Ok(())
    }

    fn to_faer(&self) -> Result<SparseColMat<usize, f64>> {
        let trips: Vec<Triplet<usize, usize, f64>> = self.triplets().map(|(i, j, v)| Triplet::new(i, j, v)).collect();
        SparseColMat::try_new_from_triplets(self.n, self.n, &trips).map_err(|e| Error::LinearSolve {
            reason: format!("cannot build sparse matrix: {e:?}"),
            condition: f64::NAN,
        })
    }
}

/// LU factors of a [`CsrMatrix`].
pub struct SparseLu {
    lu: Lu<usize, f64>,
    matrix: CsrMatrix,
}

impl SparseLu {
    pub fn factor(a: &CsrMatrix) -> Result<Self> {
        if a.n == 0 {
            return Err(Error::LinearSolve {
                reason: "empty system".into(),
                condition: f64::NAN,
            });
        }
        let m = a.to_faer()?;
        // faer panics on an exactly zero pivot instead of returning an error
        let lu = std::panic::catch_unwind(std::panic::AssertUnwindSafe(|| m.sp_lu()))
            .map_err(|_| Error::LinearSolve {
                reason: "zero pivot".into(),
                condition: f64::INFINITY,
            })?
            .map_err(|e| Error::LinearSolve {
                reason: format!("factorization failed: {e:?}"),
                condition: f64::INFINITY,
            })?;
        Ok(Self { lu, matrix: a.clone() })
    }

    pub fn n(&self) -> usize {
        self.matrix.n
    }

    fn raw_solve(&self, b: &[f64]) -> Vec<f64> {
        let mut rhs = Mat::<f64>::from_fn(b.len(), 1, |i, _| b[i]);
        self.lu.solve_in_place(rhs.as_mut());
        (0..b.len()).map(|i| rhs[(i, 0)]).collect()
    }

    /// Solves `A x = b` with up to three steps of iterative refinement
    /// until `|A x - b|_inf <= abs_tol`. Non-finite output is reported as a
    /// singular system together with a crude condition estimate.
    pub fn solve(&self, b: &[f64], abs_tol: f64) -> Result<Vec<f64>> {
        let mut x = self.raw_solve(b);
        for _ in 0..3 {
            let r: Vec<f64> = self.matrix.matvec(&x).iter().zip(b).map(|(ax, bi)| bi - ax).collect();
            if !r.iter().all(|v| v.is_finite()) {
                break;
            }
            if r.iter().fold(0.0f64, |m, v| m.max(v.abs())) <= abs_tol {
                break;
            }
            let dx = self.raw_solve(&r);
            for (xi, di) in x.iter_mut().zip(&dx) {
                *xi += di;
            }
        }
        if !x.iter().all(|v| v.is_finite()) {
            return Err(Error::LinearSolve {
                reason: "singular or severely ill-conditioned system".into(),
                condition: self.condition_estimate(),
            });
        }
        Ok(x)
    }

    /// Residual `|A x - b|_inf`.
    pub fn residual(&self, x: &[f64], b: &[f64]) -> f64 {
        self.matrix
            .matvec(x)
            .iter()
            .zip(b)
            .map(|(ax, bi)| (bi - ax).abs())
            .fold(0.0, f64::max)
    }

    /// `|A|_inf * |A^{-1} e|_inf / |e|_inf` for a fixed probe vector; a
    /// lower bound on the infinity-norm condition number.
    pub fn condition_estimate(&self) -> f64 {
        let n = self.matrix.n;
        let probe: Vec<f64> = (0..n).map(|i| if i % 2 == 0 { 1.0 } else { -1.0 }).collect();
        let y = self.raw_solve(&probe);
        let ny = y.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        self.matrix.norm_inf() * ny
    }
}
