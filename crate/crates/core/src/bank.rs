//! Seeded random dictionaries and sparse coefficient draws.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::dictionary::{generate, Construction, Dictionary, SupportSet};
use crate::error::Result;
use crate::linalg::{Matrix, Tolerances};
use crate::scalar::Scalar;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn gaussian_matrix<T: Scalar>(rows: usize, cols: usize, rng: &mut ChaCha8Rng) -> Matrix<T> {
    let data = (0..rows * cols)
        .map(|_| T::lit(rng.sample::<f64, _>(StandardNormal)))
        .collect();
    Matrix::from_row_major(rows, cols, data).expect("sizes agree")
}

/// Gaussian `rows × cols` dictionary with unit-norm columns.
pub fn gaussian_dictionary<T: Scalar>(rows: usize, cols: usize, seed: u64) -> Result<Dictionary<T>> {
    Dictionary::build(gaussian_matrix(rows, cols, &mut rng(seed)), true)
}

/// Orthogonal matrix from the QR factor of a Gaussian matrix (Gram-Schmidt).
fn random_rotation<T: Scalar>(m: usize, rng: &mut ChaCha8Rng) -> Matrix<T> {
    let g = gaussian_matrix::<T>(m, m, rng);
    let mut q: Matrix<T> = Matrix::zeros(m, m);
    for j in 0..m {
        let mut v = g.column(j);
        for _ in 0..2 {
            for i in 0..j {
                let qi = q.column(i);
                let c = crate::linalg::dot(&qi, &v);
                for (x, y) in v.iter_mut().zip(&qi) {
                    *x -= c * *y;
                }
            }
        }
        let nrm = crate::linalg::norm(&v);
        let unit: Vec<T> = v.iter().map(|&x| x / nrm).collect();
        q.set_column(j, &unit);
    }
    q
}

/// A rotated, perturbed copy of `base`, renormalized.
fn perturb<T: Scalar>(base: &Matrix<T>, sigma: f64, rng: &mut ChaCha8Rng) -> Result<Dictionary<T>> {
    let rot = random_rotation::<T>(base.rows(), rng);
    let mut a = rot.matmul(base)?;
    let noise = gaussian_matrix::<T>(a.rows(), a.cols(), rng);
    for j in 0..a.cols() {
        let col: Vec<T> = a
            .column(j)
            .iter()
            .zip(noise.column(j))
            .map(|(&x, e)| x + T::lit(sigma) * e)
            .collect();
        a.set_column(j, &col);
    }
    Dictionary::build(a, true)
}

/// How a bank dictionary was drawn.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Family {
    /// `n` atoms near a regular simplex in dimension `n−1`.
    NearSimplex,
    /// `n` nearly orthonormal atoms in dimension `n` or `n+2`.
    NearOrthonormal,
    /// Plain Gaussian atoms.
    Gaussian,
}

#[derive(Clone, Debug)]
pub struct BankEntry<T> {
    pub seed: u64,
    pub family: Family,
    pub dictionary: Dictionary<T>,
}

/// `count` dictionaries with `n ∈ 6..=10`, cycling through the families.
pub fn mixed_bank<T: Scalar>(count: usize, seed: u64) -> Result<Vec<BankEntry<T>>> {
    let mut out = Vec::with_capacity(count);
    for i in 0..count {
        let s = seed.wrapping_mul(0x9e37_79b9_7f4a_7c15).wrapping_add(i as u64);
        let mut r = rng(s);
        let n = 6 + i % 5;
        let sigma = r.random_range(0.0..0.06);
        let (family, dictionary) = match i % 3 {
            0 => {
                let (base, _) = generate::<T>(&Construction::Equiangular { k: n / 2, g: 0, b: n % 2 })?;
                (Family::NearSimplex, perturb(base.atoms(), sigma, &mut r)?)
            }
            1 => {
                let m = if i % 2 == 0 { n } else { n + 2 };
                let mut base = Matrix::zeros(m, n);
                for j in 0..n {
                    base[(j, j)] = T::one();
                }
                (Family::NearOrthonormal, perturb(&base, 2.0 * sigma, &mut r)?)
            }
            _ => {
                let m = n - 1 + (i % 4);
                (Family::Gaussian, Dictionary::build(gaussian_matrix(m, n, &mut r), true)?)
            }
        };
        out.push(BankEntry { seed: s, family, dictionary });
    }
    Ok(out)
}

/// `count` dictionaries with `n ∈ 5..=8` atoms in dimension `n−1`, each with a
/// one-dimensional kernel.
pub fn line_kernel_bank<T: Scalar>(count: usize, seed: u64, tol: &Tolerances<T>) -> Result<Vec<BankEntry<T>>> {
    let mut out = Vec::with_capacity(count);
    let mut attempt = 0u64;
    while out.len() < count {
        let s = seed.wrapping_mul(0x2545_f491_4f6c_dd1d).wrapping_add(attempt);
        attempt += 1;
        let n = 5 + out.len() % 4;
        let d: Dictionary<T> = gaussian_dictionary(n - 1, n, s)?;
        if d.kernel_basis(tol).cols() == 1 && d.spark(tol).comparable(n) == n {
            out.push(BankEntry {
                seed: s,
                family: Family::Gaussian,
                dictionary: d,
            });
        }
    }
    Ok(out)
}

/// Coefficients on `support` with magnitudes uniform in `[0.5, 1.5]` and
/// random signs; zero elsewhere.
pub fn coefficients<T: Scalar>(n: usize, support: &SupportSet, rng: &mut ChaCha8Rng) -> Vec<T> {
    let mut x = vec![T::zero(); n];
    for i in support.iter() {
        let mag: f64 = rng.random_range(0.5..=1.5);
        let sign = if rng.random_bool(0.5) { 1.0 } else { -1.0 };
        x[i] = T::lit(sign * mag);
    }
    x
}

/// Triples `(k, g, b)` with `g < k ≤ k_max`, `b ≤ b_max`, `k + b < n` and
/// `μ < 1/(2k−g+b−1)`.
pub fn coherent_triples(mu: f64, n: usize, k_max: usize, b_max: usize) -> Vec<(usize, usize, usize)> {
    let mut out = Vec::new();
    for k in 1..=k_max {
        for g in 0..k {
            for b in 0..=b_max {
                if k + b >= n {
                    continue;
                }
                let den = (2 * k - g + b) as f64 - 1.0;
                if den <= 0.0 || mu * den < 1.0 {
                    out.push((k, g, b));
                }
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn banks_are_reproducible() {
        let a = mixed_bank::<f64>(9, 7).unwrap();
        let b = mixed_bank::<f64>(9, 7).unwrap();
        for (x, y) in a.iter().zip(&b) {
            assert_eq!(x.dictionary.atoms(), y.dictionary.atoms());
        }
        assert_eq!(a[0].family, Family::NearSimplex);
        assert_eq!(a[0].dictionary.n(), 6);
        assert_eq!(a[0].dictionary.rows(), 5);
    }

    #[test]
    fn rotation_is_orthogonal() {
        let q = random_rotation::<f64>(5, &mut rng(3));
        let g = q.gram();
        assert!(g.max_abs_diff(&Matrix::identity(5)) < 1e-12);
    }

    #[test]
    fn line_kernels() {
        let tol = Tolerances::default();
        for e in line_kernel_bank::<f64>(6, 1, &tol).unwrap() {
            assert_eq!(e.dictionary.kernel_basis(&tol).cols(), 1);
        }
    }

    #[test]
    fn coefficient_range() {
        let s = SupportSet::new([1, 3]).unwrap();
        let x: Vec<f64> = coefficients(5, &s, &mut rng(9));
        assert_eq!(x[0], 0.0);
        for i in [1, 3] {
            assert!((0.5..=1.5).contains(&x[i].abs()));
        }
    }

    #[test]
    fn triples_respect_coherence() {
        let t = coherent_triples(0.3, 8, 3, 1);
        assert!(t.contains(&(1, 0, 0)));
        assert!(t.contains(&(2, 1, 0)));
        assert!(!t.contains(&(2, 0, 1)));
        assert!(t.iter().all(|&(k, g, b)| 0.3 * ((2 * k - g + b) as f64 - 1.0) < 1.0));
    }
}
