//! Sparse matrices, direct LU factorization and Lagrange-multiplier
//! saddle-point solves.
//!
//! Factorization is delegated to faer's sparse LU with partial pivoting. All
//! matrices are stored in CSR with column indices sorted within each row, so
//! assembly order never changes the stored values.

use std::sync::Once;

use faer::prelude::Solve;
use faer::sparse::{SparseColMat, Triplet};
use faer::Mat;

use crate::error::{Error, Result};

/// Accumulates `(row, col, value)` contributions; duplicates are summed in
/// insertion order when finalized.
#[derive(Debug, Clone)]
pub struct TripletBuilder {
    nrows: usize,
    ncols: usize,
    entries: Vec<(usize, usize, f64)>,
}

impl TripletBuilder {
    pub fn new(nrows: usize, ncols: usize) -> Self {
        Self {
            nrows,
            ncols,
            entries: Vec::new(),
        }
    }

    pub fn with_capacity(nrows: usize, ncols: usize, capacity: usize) -> Self {
        Self {
            nrows,
            ncols,
            entries: Vec::with_capacity(capacity),
        }
    }

    pub fn add(&mut self, row: usize, col: usize, value: f64) {
        debug_assert!(row < self.nrows && col < self.ncols);
        self.entries.push((row, col, value));
    }

    pub fn extend(&mut self, other: TripletBuilder) {
        debug_assert_eq!((self.nrows, self.ncols), (other.nrows, other.ncols));
        self.entries.extend(other.entries);
    }

    pub fn build(mut self) -> SparseOperator {
        // stable sort keeps insertion order among duplicates
        self.entries.sort_by_key(|&(r, c, _)| (r, c));
        let mut row_ptr = vec![0usize; self.nrows + 1];
        let mut col_idx = Vec::with_capacity(self.entries.len());
        let mut values: Vec<f64> = Vec::with_capacity(self.entries.len());
        let mut last: Option<(usize, usize)> = None;
        for (r, c, v) in self.entries {
            if last == Some((r, c)) {
                *values.last_mut().unwrap() += v;
            } else {
                col_idx.push(c);
                values.push(v);
                row_ptr[r + 1] += 1;
                last = Some((r, c));
            }
        }
        for r in 0..self.nrows {
            row_ptr[r + 1] += row_ptr[r];
        }
        SparseOperator {
            nrows: self.nrows,
            ncols: self.ncols,
            row_ptr,
            col_idx,
            values,
        }
    }
}

/// Compressed sparse row matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseOperator {
    nrows: usize,
    ncols: usize,
    row_ptr: Vec<usize>,
    col_idx: Vec<usize>,
    values: Vec<f64>,
}

impl SparseOperator {
    pub fn zeros(nrows: usize, ncols: usize) -> Self {
        TripletBuilder::new(nrows, ncols).build()
    }

    pub fn identity(n: usize) -> Self {
        let mut t = TripletBuilder::with_capacity(n, n, n);
        for i in 0..n {
            t.add(i, i, 1.0);
        }
        t.build()
    }

    /// From a row-major dense array, dropping exact zeros.
    pub fn from_dense(nrows: usize, ncols: usize, data: &[f64]) -> Self {
        assert_eq!(data.len(), nrows * ncols);
        let mut t = TripletBuilder::new(nrows, ncols);
        for i in 0..nrows {
            for j in 0..ncols {
                let v = data[i * ncols + j];
                if v != 0.0 {
                    t.add(i, j, v);
                }
            }
        }
        t.build()
    }

    pub fn nrows(&self) -> usize {
        self.nrows
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    /// Stored `(column, value)` pairs of one row, columns ascending.
    pub fn row(&self, i: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let range = self.row_ptr[i]..self.row_ptr[i + 1];
        self.col_idx[range.clone()]
            .iter()
            .copied()
            .zip(self.values[range].iter().copied())
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        let range = self.row_ptr[i]..self.row_ptr[i + 1];
        match self.col_idx[range.clone()].binary_search(&j) {
            Ok(k) => self.values[range.start + k],
            Err(_) => 0.0,
        }
    }

    pub fn triplets(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        (0..self.nrows).flat_map(move |i| self.row(i).map(move |(j, v)| (i, j, v)))
    }

    pub fn to_dense(&self) -> Vec<f64> {
        let mut out = vec![0.0; self.nrows * self.ncols];
        for (i, j, v) in self.triplets() {
            out[i * self.ncols + j] += v;
        }
        out
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.ncols, "operand length");
        (0..self.nrows)
            .map(|i| self.row(i).map(|(j, v)| v * x[j]).sum())
            .collect()
    }

    /// `x^T M y`.
    pub fn bilinear(&self, x: &[f64], y: &[f64]) -> f64 {
        assert_eq!(x.len(), self.nrows);
        assert_eq!(y.len(), self.ncols);
        (0..self.nrows)
            .map(|i| x[i] * self.row(i).map(|(j, v)| v * y[j]).sum::<f64>())
            .sum()
    }

    pub fn transpose(&self) -> SparseOperator {
        let mut t = TripletBuilder::with_capacity(self.ncols, self.nrows, self.nnz());
        for (i, j, v) in self.triplets() {
            t.add(j, i, v);
        }
        t.build()
    }

    /// `alpha * self + beta * other`.
    pub fn add_scaled(&self, alpha: f64, other: &SparseOperator, beta: f64) -> SparseOperator {
        assert_eq!((self.nrows, self.ncols), (other.nrows, other.ncols));
        let mut t = TripletBuilder::with_capacity(self.nrows, self.ncols, self.nnz() + other.nnz());
        for (i, j, v) in self.triplets() {
            t.add(i, j, alpha * v);
        }
        for (i, j, v) in other.triplets() {
            t.add(i, j, beta * v);
        }
        t.build()
    }

    /// Rows `rows` and columns `cols` (both given as ascending global indices).
    pub fn submatrix(&self, rows: &[usize], cols: &[usize]) -> SparseOperator {
        let mut col_map = vec![usize::MAX; self.ncols];
        for (local, &g) in cols.iter().enumerate() {
            col_map[g] = local;
        }
        let mut t = TripletBuilder::new(rows.len(), cols.len());
        for (li, &gi) in rows.iter().enumerate() {
            for (gj, v) in self.row(gi) {
                let lj = col_map[gj];
                if lj != usize::MAX {
                    t.add(li, lj, v);
                }
            }
        }
        t.build()
    }

    /// Rows `rows` of the matrix with all columns kept.
    pub fn select_rows(&self, rows: &[usize]) -> SparseOperator {
        let mut t = TripletBuilder::new(rows.len(), self.ncols);
        for (li, &gi) in rows.iter().enumerate() {
            for (j, v) in self.row(gi) {
                t.add(li, j, v);
            }
        }
        t.build()
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// `max |M - M^T|`.
    pub fn asymmetry(&self) -> f64 {
        assert_eq!(self.nrows, self.ncols);
        self.triplets()
            .map(|(i, j, v)| (v - self.get(j, i)).abs())
            .fold(0.0, f64::max)
    }

    fn to_faer(&self) -> Result<SparseColMat<usize, f64>> {
        let triplets: Vec<Triplet<usize, usize, f64>> = self
            .triplets()
            .map(|(row, col, val)| Triplet { row, col, val })
            .collect();
        SparseColMat::try_new_from_triplets(self.nrows, self.ncols, &triplets)
            .map_err(|e| Error::Solver(format!("sparse conversion failed: {e:?}")))
    }
}

static SEQUENTIAL: Once = Once::new();

fn sequential_kernels() {
    // outer parallelism comes from rayon over independent systems
    SEQUENTIAL.call_once(|| faer::set_global_parallelism(faer::Par::Seq));
}

/// Reusable LU factorization of a square sparse matrix.
pub struct Factorization {
    matrix: SparseOperator,
    lu: faer::sparse::linalg::solvers::Lu<usize, f64>,
}

impl std::fmt::Debug for Factorization {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Factorization")
            .field("n", &self.matrix.nrows)
            .field("nnz", &self.matrix.nnz())
            .finish()
    }
}

pub fn factorize(a: &SparseOperator) -> Result<Factorization> {
    if a.nrows != a.ncols {
        return Err(Error::Dimension {
            expected: a.nrows,
            got: a.ncols,
        });
    }
    sequential_kernels();
    let lu = a.to_faer()?.sp_lu().map_err(|e| match e {
        faer::sparse::linalg::LuError::SymbolicSingular { index } => Error::SingularMatrix {
            pivot: index,
            size: a.nrows,
        },
        faer::sparse::linalg::LuError::Generic(g) => {
            Error::Solver(format!("sparse factorization failed: {g:?}"))
        }
    })?;
    Ok(Factorization {
        matrix: a.clone(),
        lu,
    })
}

impl Factorization {
    pub fn size(&self) -> usize {
        self.matrix.nrows
    }

    pub fn solve(&self, rhs: &[f64]) -> Result<Vec<f64>> {
        let mut out = self.solve_many(&[rhs.to_vec()])?;
        Ok(out.pop().unwrap())
    }

    /// Solves for several right-hand sides with one pass over the factors.
    ///
    /// Solutions are checked for finiteness and backward error; a numerically
    /// singular matrix is reported instead of returning garbage.
    pub fn solve_many(&self, rhs: &[Vec<f64>]) -> Result<Vec<Vec<f64>>> {
        let n = self.size();
        if let Some(bad) = rhs.iter().find(|r| r.len() != n) {
            return Err(Error::Dimension {
                expected: n,
                got: bad.len(),
            });
        }
        if rhs.is_empty() {
            return Ok(Vec::new());
        }
        let b = Mat::from_fn(n, rhs.len(), |i, k| rhs[k][i]);
        let x = self.lu.solve(&b);
        let mut out = Vec::with_capacity(rhs.len());
        let anorm = self.matrix.max_abs();
        for k in 0..rhs.len() {
            let col: Vec<f64> = (0..n).map(|i| x[(i, k)]).collect();
            if let Some(index) = col.iter().position(|v| !v.is_finite()) {
                return Err(Error::NumericallySingular { index });
            }
            let r = self.matrix.mul_vec(&col);
            let res = r
                .iter()
                .zip(&rhs[k])
                .map(|(a, b)| (a - b).abs())
                .fold(0.0, f64::max);
            let xnorm = col.iter().fold(0.0f64, |m, v| m.max(v.abs()));
            let bnorm = rhs[k].iter().fold(0.0f64, |m, v| m.max(v.abs()));
            if res > 1e-8 * (bnorm + anorm * xnorm) {
                let index = r
                    .iter()
                    .zip(&rhs[k])
                    .map(|(a, b)| (a - b).abs())
                    .enumerate()
                    .fold((0, 0.0), |acc, (i, v)| if v > acc.1 { (i, v) } else { acc })
                    .0;
                return Err(Error::NumericallySingular { index });
            }
            out.push(col);
        }
        Ok(out)
    }
}

/// Whether a symmetric matrix admits a Cholesky factorization (i.e. is
/// numerically positive definite). Only the lower triangle is read.
pub fn is_positive_definite(a: &SparseOperator) -> bool {
    if a.nrows != a.ncols {
        return false;
    }
    sequential_kernels();
    match a.to_faer() {
        Ok(m) => m.sp_cholesky(faer::Side::Lower).is_ok(),
        Err(_) => false,
    }
}

/// `A x + C^T mu = rhs`, `C x = 0`.
#[derive(Debug, Clone)]
pub struct SaddleSystem {
    pub a: SparseOperator,
    pub c: SparseOperator,
    pub rhs: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SaddleSolution {
    pub x: Vec<f64>,
    pub multipliers: Vec<f64>,
}

/// Factorized block matrix `[[A, C^T], [C, 0]]`, reusable across right-hand sides.
#[derive(Debug)]
pub struct SaddleFactorization {
    n: usize,
    m: usize,
    factors: Factorization,
    constraints: SparseOperator,
}

impl SaddleFactorization {
    pub fn new(a: &SparseOperator, c: &SparseOperator) -> Result<Self> {
        let n = a.nrows();
        if a.ncols() != n {
            return Err(Error::Dimension {
                expected: n,
                got: a.ncols(),
            });
        }
        if c.ncols() != n {
            return Err(Error::Dimension {
                expected: n,
                got: c.ncols(),
            });
        }
        let m = c.nrows();
        if m > n {
            return Err(Error::RankDeficientConstraints {
                rows: (n..m).collect(),
            });
        }
        let mut t = TripletBuilder::with_capacity(n + m, n + m, a.nnz() + 2 * c.nnz());
        for (i, j, v) in a.triplets() {
            t.add(i, j, v);
        }
        for (i, j, v) in c.triplets() {
            t.add(n + i, j, v);
            t.add(j, n + i, v);
        }
        let block = t.build();
        let factors = match factorize(&block) {
            Ok(f) => f,
            Err(e) => return Err(diagnose_constraints(c).unwrap_or(e)),
        };
        Ok(Self {
            n,
            m,
            factors,
            constraints: c.clone(),
        })
    }

    pub fn solve(&self, rhs: &[f64]) -> Result<SaddleSolution> {
        Ok(self.solve_many(&[rhs.to_vec()])?.pop().unwrap())
    }

    pub fn solve_many(&self, rhs: &[Vec<f64>]) -> Result<Vec<SaddleSolution>> {
        let padded: Vec<Vec<f64>> = rhs
            .iter()
            .map(|r| {
                if r.len() != self.n {
                    return Err(Error::Dimension {
                        expected: self.n,
                        got: r.len(),
                    });
                }
                let mut p = r.clone();
                p.resize(self.n + self.m, 0.0);
                Ok(p)
            })
            .collect::<Result<_>>()?;
        // singular pivots may only surface as a failed solve
        let sols = self
            .factors
            .solve_many(&padded)
            .map_err(|e| diagnose_constraints(&self.constraints).unwrap_or(e))?;
        Ok(sols
            .into_iter()
            .map(|mut z| {
                let multipliers = z.split_off(self.n);
                SaddleSolution { x: z, multipliers }
            })
            .collect())
    }
}

pub fn solve_saddle(sys: &SaddleSystem) -> Result<SaddleSolution> {
    if sys.c.nrows() == 0 {
        let x = factorize(&sys.a)?.solve(&sys.rhs)?;
        return Ok(SaddleSolution {
            x,
            multipliers: Vec::new(),
        });
    }
    SaddleFactorization::new(&sys.a, &sys.c)?.solve(&sys.rhs)
}

/// Finds constraint rows that are linear combinations of earlier rows.
///
/// Only called after a failed factorization or solve, so the dense
/// Gram-Schmidt pass is acceptable.
fn diagnose_constraints(c: &SparseOperator) -> Option<Error> {
    let n = c.ncols();
    let mut basis: Vec<Vec<f64>> = Vec::new();
    let mut dependent = Vec::new();
    for i in 0..c.nrows() {
        let mut v = vec![0.0; n];
        for (j, val) in c.row(i) {
            v[j] = val;
        }
        let norm0 = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        for _ in 0..2 {
            for q in &basis {
                let d: f64 = q.iter().zip(&v).map(|(a, b)| a * b).sum();
                v.iter_mut().zip(q).for_each(|(x, qk)| *x -= d * qk);
            }
        }
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm <= 1e-10 * norm0.max(f64::MIN_POSITIVE) {
            dependent.push(i);
        } else {
            v.iter_mut().for_each(|x| *x /= norm);
            basis.push(v);
        }
    }
    (!dependent.is_empty()).then_some(Error::RankDeficientConstraints { rows: dependent })
}
