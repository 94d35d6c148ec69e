//! Small dense Hermitian linear algebra.
//!
//! Matrices here are at most a few tens of rows (predictor length plus one), so
//! everything is dense and row-major.

use num_complex::Complex64;
use thiserror::Error;

/// Relative ridge added by [`HermitianMatrix::regularized`].
pub const RIDGE_FACTOR: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LinalgError {
    #[error("matrix is not positive definite: pivot {pivot} is {value:e}")]
    NotPositiveDefinite { pivot: usize, value: f64 },
    #[error("entry ({row}, {col}) is not the conjugate of its transpose")]
    NotHermitian { row: usize, col: usize },
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("matrix dimension must be positive")]
    Empty,
}

#[derive(Debug, Clone, PartialEq)]
pub struct HermitianMatrix {
    dim: usize,
    entries: Vec<Complex64>,
}

impl HermitianMatrix {
    /// Builds a matrix from `f(row, col)`, checking the Hermitian symmetry to
    /// `1e-12` relative of the largest entry.
    pub fn from_fn(
        dim: usize,
        mut f: impl FnMut(usize, usize) -> Complex64,
    ) -> Result<Self, LinalgError> {
        if dim == 0 {
            return Err(LinalgError::Empty);
        }
        let entries: Vec<Complex64> = (0..dim * dim).map(|k| f(k / dim, k % dim)).collect();
        let scale = entries.iter().fold(0.0_f64, |m, z| m.max(z.norm()));
        let tol = 1e-12 * scale.max(f64::MIN_POSITIVE);
        for i in 0..dim {
            for j in i..dim {
                if (entries[i * dim + j] - entries[j * dim + i].conj()).norm() > tol {
                    return Err(LinalgError::NotHermitian { row: i, col: j });
                }
            }
        }
        Ok(Self { dim, entries })
    }

    pub fn from_real_fn(
        dim: usize,
        mut f: impl FnMut(usize, usize) -> f64,
    ) -> Result<Self, LinalgError> {
        Self::from_fn(dim, |i, j| Complex64::new(f(i, j), 0.0))
    }

    pub fn identity(dim: usize) -> Self {
        Self::diagonal(&vec![1.0; dim])
    }

    pub fn diagonal(values: &[f64]) -> Self {
        let dim = values.len();
        let mut entries = vec![Complex64::new(0.0, 0.0); dim * dim];
        for (i, &v) in values.iter().enumerate() {
            entries[i * dim + i] = Complex64::new(v, 0.0);
        }
        Self { dim, entries }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.entries[row * self.dim + col]
    }

    pub fn trace(&self) -> f64 {
        (0..self.dim).map(|i| self.get(i, i).re).sum()
    }

    /// Returns `self + eps * I`.
    pub fn with_ridge(&self, eps: f64) -> Self {
        let mut out = self.clone();
        for i in 0..self.dim {
            out.entries[i * self.dim + i] += eps;
        }
        out
    }

    /// Adds the ridge `RIDGE_FACTOR * trace / dim` to the diagonal.
    pub fn regularized(&self) -> Self {
        self.with_ridge(RIDGE_FACTOR * self.trace() / self.dim as f64)
    }

    pub fn mul_vec(&self, v: &[Complex64]) -> Result<Vec<Complex64>, LinalgError> {
        self.check_len(v.len())?;
        Ok((0..self.dim)
            .map(|i| (0..self.dim).map(|j| self.get(i, j) * v[j]).sum())
            .collect())
    }

    fn check_len(&self, len: usize) -> Result<(), LinalgError> {
        if len == self.dim {
            Ok(())
        } else {
            Err(LinalgError::DimensionMismatch {
                expected: self.dim,
                found: len,
            })
        }
    }
}

/// Lower-triangular `L` with `L L^H` equal to the factored matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct CholeskyFactor {
    dim: usize,
    lower: Vec<Complex64>,
}

impl CholeskyFactor {
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Entry `(row, col)`; zero above the diagonal.
    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        if col > row {
            Complex64::new(0.0, 0.0)
        } else {
            self.lower[row * self.dim + col]
        }
    }

    /// `L L^H` as a dense matrix.
    pub fn reconstruct(&self) -> HermitianMatrix {
        let n = self.dim;
        let entries = (0..n * n)
            .map(|k| {
                let (i, j) = (k / n, k % n);
                (0..=i.min(j))
                    .map(|p| self.get(i, p) * self.get(j, p).conj())
                    .sum()
            })
            .collect();
        HermitianMatrix { dim: n, entries }
    }

    /// `L z`.
    pub fn mul_vec(&self, z: &[Complex64]) -> Vec<Complex64> {
        (0..self.dim)
            .map(|i| (0..=i).map(|j| self.get(i, j) * z[j]).sum())
            .collect()
    }

    /// Solves `L y = b`.
    pub fn forward_substitute(&self, b: &[Complex64]) -> Result<Vec<Complex64>, LinalgError> {
        if b.len() != self.dim {
            return Err(LinalgError::DimensionMismatch {
                expected: self.dim,
                found: b.len(),
            });
        }
        let mut y = b.to_vec();
        for i in 0..self.dim {
            let mut acc = y[i];
            for j in 0..i {
                acc -= self.get(i, j) * y[j];
            }
            y[i] = acc / self.get(i, i);
        }
        Ok(y)
    }

    /// Solves `L L^H x = b`.
    pub fn solve(&self, b: &[Complex64]) -> Result<Vec<Complex64>, LinalgError> {
        let mut x = self.forward_substitute(b)?;
        for i in (0..self.dim).rev() {
            let mut acc = x[i];
            for j in i + 1..self.dim {
                acc -= self.get(j, i).conj() * x[j];
            }
            x[i] = acc / self.get(i, i).conj();
        }
        Ok(x)
    }
}

/// Cholesky factorization of a Hermitian positive definite matrix.
pub fn cholesky(m: &HermitianMatrix) -> Result<CholeskyFactor, LinalgError> {
    factor(m, None)
}

/// Cholesky factorization that tolerates a positive semidefinite input.
///
/// Pivots at or below `tolerance * max_diagonal` are treated as exact zeros and
/// their column is cleared, so rank-deficient covariances still produce a
/// factor whose `L L^H` reproduces the matrix. Meant for drawing correlated
/// Gaussian samples, not for solving.
pub fn cholesky_semidefinite(
    m: &HermitianMatrix,
    tolerance: f64,
) -> Result<CholeskyFactor, LinalgError> {
    factor(m, Some(tolerance))
}

fn factor(m: &HermitianMatrix, semidefinite: Option<f64>) -> Result<CholeskyFactor, LinalgError> {
    let n = m.dim;
    let max_diag = (0..n).fold(0.0_f64, |acc, i| acc.max(m.get(i, i).re));
    let mut lower = vec![Complex64::new(0.0, 0.0); n * n];
    for j in 0..n {
        let mut pivot = m.get(j, j).re;
        for p in 0..j {
            pivot -= lower[j * n + p].norm_sqr();
        }
        match semidefinite {
            Some(tol) if pivot <= tol * max_diag => {
                if pivot < -tol.sqrt() * max_diag {
                    return Err(LinalgError::NotPositiveDefinite {
                        pivot: j,
                        value: pivot,
                    });
                }
                // column j stays zero
                continue;
            }
            None if pivot.is_nan() || pivot <= 0.0 => {
                return Err(LinalgError::NotPositiveDefinite {
                    pivot: j,
                    value: pivot,
                });
            }
            _ => {}
        }
        let d = pivot.sqrt();
        lower[j * n + j] = Complex64::new(d, 0.0);
        for i in j + 1..n {
            let mut acc = m.get(i, j);
            for p in 0..j {
                acc -= lower[i * n + p] * lower[j * n + p].conj();
            }
            lower[i * n + j] = acc / d;
        }
    }
    Ok(CholeskyFactor { dim: n, lower })
}

/// Solves `m x = rhs` for Hermitian positive definite `m`.
pub fn solve_hermitian(
    m: &HermitianMatrix,
    rhs: &[Complex64],
) -> Result<Vec<Complex64>, LinalgError> {
    m.check_len(rhs.len())?;
    cholesky(m)?.solve(rhs)
}

/// `v^H m^-1 v`, computed as `|L^-1 v|^2` so the result is real and non-negative.
pub fn quadratic_form(m: &HermitianMatrix, v: &[Complex64]) -> Result<f64, LinalgError> {
    m.check_len(v.len())?;
    let y = cholesky(m)?.forward_substitute(v)?;
    Ok(y.iter().map(|z| z.norm_sqr()).sum::<f64>().max(0.0))
}
