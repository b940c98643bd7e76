use crate::error::{Error, Result};
use crate::linalg::{symmetric_eig, Matrix, Tolerances};
use crate::scalar::Scalar;

/// Householder QR of a tall full-column-rank matrix.
///
/// Used for least squares and for the orthogonal projector onto the
/// complement of the column span. Construction rejects matrices whose
/// Gram matrix has `λ_min <= rank_tol · λ_max`.
#[derive(Clone, Debug)]
pub struct Qr<T> {
    rows: usize,
    cols: usize,
    reflectors: Vec<Vec<T>>,
    betas: Vec<T>,
    r: Matrix<T>,
}

/// Fails with `RankDeficient` when the columns of `m` are numerically dependent.
pub fn check_full_column_rank<T: Scalar>(m: &Matrix<T>, tol: &Tolerances<T>) -> Result<()> {
    if m.cols() == 0 {
        return Ok(());
    }
    if m.cols() > m.rows() {
        return Err(Error::RankDeficient {
            smallest: 0.0,
            largest: f64::NAN,
        });
    }
    let eig = symmetric_eig(&m.gram())?;
    let (lo, hi) = (eig.min(), eig.max());
    if hi <= T::zero() || lo <= tol.rank_tol * hi {
        return Err(Error::RankDeficient {
            smallest: lo.as_f64(),
            largest: hi.as_f64(),
        });
    }
    Ok(())
}

impl<T: Scalar> Qr<T> {
    pub fn new(m: &Matrix<T>, tol: &Tolerances<T>) -> Result<Self> {
        check_full_column_rank(m, tol)?;
        let (rows, cols) = (m.rows(), m.cols());
        let mut a = m.clone();
        let mut reflectors = Vec::with_capacity(cols);
        let mut betas = Vec::with_capacity(cols);
        for k in 0..cols {
            let mut v: Vec<T> = (k..rows).map(|i| a[(i, k)]).collect();
            let xnorm = v.iter().map(|x| *x * *x).sum::<T>().sqrt();
            let alpha = if v[0] >= T::zero() { -xnorm } else { xnorm };
            v[0] -= alpha;
            let vnorm2: T = v.iter().map(|x| *x * *x).sum();
            let beta = if vnorm2 > T::zero() {
                T::lit(2.0) / vnorm2
            } else {
                T::zero()
            };
            for j in k..cols {
                let s: T = (k..rows).map(|i| v[i - k] * a[(i, j)]).sum();
                let f = beta * s;
                for i in k..rows {
                    a[(i, j)] -= f * v[i - k];
                }
            }
            reflectors.push(v);
            betas.push(beta);
        }
        let mut r = Matrix::zeros(cols, cols);
        for i in 0..cols {
            for j in i..cols {
                r[(i, j)] = a[(i, j)];
            }
        }
        Ok(Self {
            rows,
            cols,
            reflectors,
            betas,
            r,
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn r(&self) -> &Matrix<T> {
        &self.r
    }

    fn reflect(&self, k: usize, y: &mut [T]) {
        let v = &self.reflectors[k];
        let s: T = v.iter().zip(&y[k..]).map(|(&a, &b)| a * b).sum();
        let f = self.betas[k] * s;
        for (yi, &vi) in y[k..].iter_mut().zip(v) {
            *yi -= f * vi;
        }
    }

    /// `Qᵀ y` with the full orthogonal factor.
    pub fn apply_qt(&self, y: &[T]) -> Vec<T> {
        let mut out = y.to_vec();
        for k in 0..self.cols {
            self.reflect(k, &mut out);
        }
        out
    }

    /// `Q z` with the full orthogonal factor.
    pub fn apply_q(&self, z: &[T]) -> Vec<T> {
        let mut out = z.to_vec();
        for k in (0..self.cols).rev() {
            self.reflect(k, &mut out);
        }
        out
    }

    /// Least-squares coefficients `argmin ‖M x − y‖`.
    pub fn solve(&self, y: &[T]) -> Vec<T> {
        assert_eq!(y.len(), self.rows, "right-hand side length");
        let z = self.apply_qt(y);
        let c = self.cols;
        let mut x = vec![T::zero(); c];
        for i in (0..c).rev() {
            let s: T = ((i + 1)..c).map(|j| self.r[(i, j)] * x[j]).sum();
            x[i] = (z[i] - s) / self.r[(i, i)];
        }
        x
    }

    /// `P⊥ v`, the component of `v` orthogonal to the column span.
    pub fn project_complement(&self, v: &[T]) -> Vec<T> {
        assert_eq!(v.len(), self.rows, "vector length");
        let mut z = self.apply_qt(v);
        for zi in z.iter_mut().take(self.cols) {
            *zi = T::zero();
        }
        self.apply_q(&z)
    }

    /// `P v`, the orthogonal projection onto the column span.
    pub fn project(&self, v: &[T]) -> Vec<T> {
        let perp = self.project_complement(v);
        v.iter().zip(perp).map(|(&a, b)| a - b).collect()
    }
}
