//! Dense linear algebra for desk-scale matrices (at most ~64×64).

mod csv_io;
mod eigen;
mod matrix;
mod qr;

use itertools::Itertools;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

pub use csv_io::{read_matrix_csv, read_vector_csv, write_matrix_csv, write_vector_csv};
pub use eigen::{symmetric_eig, SymmetricEigen};
pub use matrix::{axpy, dot, norm, norm1, norm_inf, sub, Matrix};
pub use qr::{check_full_column_rank, Qr};

/// Numerical cutoffs used throughout the toolkit.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Tolerances<T> {
    /// Eigenvalue cutoff (relative to the largest) for rank decisions.
    pub rank_tol: T,
    /// Width within which two greedy scores count as tied.
    pub tie_tol: T,
    /// Width used when comparing certificate values to thresholds.
    pub cert_tol: T,
}

impl<T: Scalar> Default for Tolerances<T> {
    fn default() -> Self {
        Self {
            rank_tol: T::tol(1e-10, 100.0),
            tie_tol: T::tol(1e-9, 100.0),
            cert_tol: T::tol(1e-9, 100.0),
        }
    }
}

impl<T: Scalar> Tolerances<T> {
    pub fn new(rank_tol: T, tie_tol: T, cert_tol: T) -> Result<Self> {
        let limit = T::lit(1e-3);
        for (name, v) in [("rank_tol", rank_tol), ("tie_tol", tie_tol), ("cert_tol", cert_tol)] {
            if !(v >= T::zero() && v < limit) {
                return Err(Error::InvalidParams(format!(
                    "{name} = {v} must lie in [0, 1e-3)"
                )));
            }
        }
        Ok(Self {
            rank_tol,
            tie_tol,
            cert_tol,
        })
    }
}

/// `argmin ‖M x − y‖` for full-column-rank `M`.
pub fn least_squares<T: Scalar>(m: &Matrix<T>, y: &[T], tol: &Tolerances<T>) -> Result<Vec<T>> {
    if m.rows() != y.len() {
        return Err(Error::DimensionMismatch(format!(
            "{} rows vs length-{} vector",
            m.rows(),
            y.len()
        )));
    }
    Ok(Qr::new(m, tol)?.solve(y))
}

/// `P⊥ v = v − M M† v`. A zero-column `M` leaves `v` unchanged.
pub fn project_complement<T: Scalar>(m: &Matrix<T>, v: &[T], tol: &Tolerances<T>) -> Result<Vec<T>> {
    if m.rows() != v.len() {
        return Err(Error::DimensionMismatch(format!(
            "{} rows vs length-{} vector",
            m.rows(),
            v.len()
        )));
    }
    if m.cols() == 0 {
        return Ok(v.to_vec());
    }
    Ok(Qr::new(m, tol)?.project_complement(v))
}

/// Orthonormal basis of `ker(M)`, one basis vector per column (possibly none).
///
/// Taken from the eigenvectors of `MᵀM` whose eigenvalues fall below
/// `rank_tol · λ_max`.
pub fn kernel_basis<T: Scalar>(m: &Matrix<T>, tol: &Tolerances<T>) -> Matrix<T> {
    let eig = symmetric_eig(&m.gram()).expect("Gram matrices are symmetric");
    let cutoff = tol.rank_tol * eig.max();
    let idx: Vec<usize> = (0..m.cols())
        .filter(|&i| eig.max() <= T::zero() || eig.values[i] <= cutoff)
        .collect();
    eig.vectors.select_columns(&idx)
}

pub fn rank<T: Scalar>(m: &Matrix<T>, tol: &Tolerances<T>) -> usize {
    m.cols() - kernel_basis(m, tol).cols()
}

/// Spark of a matrix: the size of its smallest linearly dependent column subset.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Spark {
    Finite(usize),
    /// All columns are linearly independent.
    Independent,
}

impl Spark {
    /// `spark > t`, with `Independent` treated as +∞.
    pub fn exceeds(&self, t: usize) -> bool {
        match *self {
            Spark::Finite(s) => s > t,
            Spark::Independent => true,
        }
    }

    /// The value used in comparisons: `cols + 1` stands in for `Independent`.
    pub fn comparable(&self, cols: usize) -> usize {
        match *self {
            Spark::Finite(s) => s,
            Spark::Independent => cols + 1,
        }
    }

    pub fn finite(&self) -> Option<usize> {
        match *self {
            Spark::Finite(s) => Some(s),
            Spark::Independent => None,
        }
    }
}

fn gram_subset_deficient<T: Scalar>(gram: &Matrix<T>, idx: &[usize], tol: &Tolerances<T>) -> bool {
    let eig = symmetric_eig(&gram.principal(idx)).expect("principal Gram submatrix is symmetric");
    eig.max() <= T::zero() || eig.min() <= tol.rank_tol * eig.max()
}

/// Spark by exhaustive subset rank tests of increasing cardinality.
pub fn spark<T: Scalar>(m: &Matrix<T>, tol: &Tolerances<T>) -> Spark {
    let gram = m.gram();
    for q in 1..=m.cols() {
        if q > m.rows() {
            return Spark::Finite(q);
        }
        let dependent = (0..m.cols())
            .combinations(q)
            .any(|idx| gram_subset_deficient(&gram, &idx, tol));
        if dependent {
            return Spark::Finite(q);
        }
    }
    Spark::Independent
}
