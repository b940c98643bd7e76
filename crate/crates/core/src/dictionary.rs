//! Dictionaries with unit-norm atoms, support sets, the worst-case
//! generators, and dictionaries projected away from an informed support.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, norm, symmetric_eig, Matrix, Qr, Spark, Tolerances};
use crate::scalar::Scalar;

/// Strictly increasing list of column indices.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct SupportSet(Vec<usize>);

impl SupportSet {
    /// Sorts `indices`; repeated indices are rejected.
    pub fn new(indices: impl IntoIterator<Item = usize>) -> Result<Self> {
        let mut v: Vec<usize> = indices.into_iter().collect();
        v.sort_unstable();
        if let Some(w) = v.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::DuplicateIndex(w[0]));
        }
        Ok(Self(v))
    }

    /// Wraps an index list the caller guarantees to be strictly increasing.
    pub(crate) fn from_sorted(v: Vec<usize>) -> Self {
        debug_assert!(v.windows(2).all(|w| w[0] < w[1]));
        Self(v)
    }

    pub fn empty() -> Self {
        Self(Vec::new())
    }

    pub fn range(range: std::ops::Range<usize>) -> Self {
        Self(range.collect())
    }

    /// Fails unless every index is below `n`.
    pub fn check(&self, n: usize) -> Result<()> {
        match self.0.last() {
            Some(&index) if index >= n => Err(Error::IndexOutOfRange { index, n }),
            _ => Ok(()),
        }
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn indices(&self) -> &[usize] {
        &self.0
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter().copied()
    }

    pub fn contains(&self, i: usize) -> bool {
        self.0.binary_search(&i).is_ok()
    }

    /// Inserts `i`, returning false when it was already present.
    pub fn insert(&mut self, i: usize) -> bool {
        match self.0.binary_search(&i) {
            Ok(_) => false,
            Err(pos) => {
                self.0.insert(pos, i);
                true
            }
        }
    }

    pub fn union(&self, other: &Self) -> Self {
        let mut v: Vec<usize> = self.0.iter().chain(&other.0).copied().collect();
        v.sort_unstable();
        v.dedup();
        Self(v)
    }

    pub fn intersection(&self, other: &Self) -> Self {
        Self(self.iter().filter(|&i| other.contains(i)).collect())
    }

    pub fn difference(&self, other: &Self) -> Self {
        Self(self.iter().filter(|&i| !other.contains(i)).collect())
    }

    /// `{0, …, n-1} \ self`.
    pub fn complement(&self, n: usize) -> Self {
        Self((0..n).filter(|&i| !self.contains(i)).collect())
    }
}

impl From<SupportSet> for Vec<usize> {
    fn from(s: SupportSet) -> Self {
        s.0
    }
}

impl fmt::Display for SupportSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|i| i.to_string()).collect();
        write!(f, "{}", parts.join(","))
    }
}

/// Parses a comma-separated index list; the empty string is the empty set.
impl FromStr for SupportSet {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.is_empty() {
            return Ok(Self::empty());
        }
        let idx = s
            .split(',')
            .map(|t| {
                t.trim().parse::<usize>().map_err(|e| Error::Parse {
                    line: 1,
                    message: format!("index `{}`: {e}", t.trim()),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(idx)
    }
}

/// Which projected atoms score a residual: `ã_i` for OMP, `b̃_i` for OLS.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Variant {
    Omp,
    Ols,
}

impl FromStr for Variant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "omp" => Ok(Variant::Omp),
            "ols" => Ok(Variant::Ols),
            other => Err(Error::InvalidParams(format!("unknown variant `{other}`"))),
        }
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Variant::Omp => "omp",
            Variant::Ols => "ols",
        })
    }
}

/// Matrix with unit-norm columns and its cached Gram matrix.
#[derive(Clone, Debug)]
pub struct Dictionary<T> {
    atoms: Matrix<T>,
    gram: Matrix<T>,
}

impl<T: Scalar> Dictionary<T> {
    /// Wraps `raw`, rescaling its columns when `normalize` is set and
    /// otherwise checking that they already have unit norm.
    pub fn build(raw: Matrix<T>, normalize: bool) -> Result<Self> {
        if raw.rows() == 0 || raw.cols() == 0 {
            return Err(Error::DimensionMismatch("empty dictionary".into()));
        }
        let mut atoms = raw;
        let tol = T::tol(1e-8, 64.0);
        for j in 0..atoms.cols() {
            let nj = atoms.column_norm(j);
            if nj == T::zero() {
                return Err(Error::ZeroColumn(j));
            }
            if normalize {
                let col: Vec<T> = atoms.column(j).into_iter().map(|x| x / nj).collect();
                atoms.set_column(j, &col);
            } else if (nj - T::one()).abs() > tol {
                return Err(Error::NotNormalized {
                    index: j,
                    norm: nj.as_f64(),
                });
            }
        }
        let gram = atoms.gram();
        Ok(Self { atoms, gram })
    }

    pub fn atoms(&self) -> &Matrix<T> {
        &self.atoms
    }

    pub fn gram(&self) -> &Matrix<T> {
        &self.gram
    }

    /// Signal dimension `m`.
    pub fn rows(&self) -> usize {
        self.atoms.rows()
    }

    /// Number of atoms `n`.
    pub fn n(&self) -> usize {
        self.atoms.cols()
    }

    pub fn atom(&self, i: usize) -> Vec<T> {
        self.atoms.column(i)
    }

    /// `A_S`.
    pub fn select(&self, s: &SupportSet) -> Matrix<T> {
        self.atoms.select_columns(s.indices())
    }

    /// `A x`.
    pub fn synthesize(&self, x: &[T]) -> Vec<T> {
        self.atoms.mul_vec(x)
    }

    /// `A_S c`.
    pub fn combine(&self, s: &SupportSet, coeffs: &[T]) -> Vec<T> {
        self.select(s).mul_vec(coeffs)
    }

    pub fn mutual_coherence(&self) -> T {
        mutual_coherence(self)
    }

    pub fn gram_submatrix_eigen(&self, s: &SupportSet) -> Vec<T> {
        gram_submatrix_eigen(self, s)
    }

    pub fn kernel_basis(&self, tol: &Tolerances<T>) -> Matrix<T> {
        linalg::kernel_basis(&self.atoms, tol)
    }

    pub fn spark(&self, tol: &Tolerances<T>) -> Spark {
        linalg::spark(&self.atoms, tol)
    }

    pub fn cast<U: Scalar>(&self) -> Dictionary<U> {
        Dictionary {
            atoms: self.atoms.cast(),
            gram: self.gram.cast(),
        }
    }
}

/// `max_{i≠j} |⟨a_i, a_j⟩|`, zero for a single atom.
pub fn mutual_coherence<T: Scalar>(d: &Dictionary<T>) -> T {
    let g = d.gram();
    let mut mu = T::zero();
    for i in 0..d.n() {
        for j in (i + 1)..d.n() {
            mu = mu.max(g[(i, j)].abs());
        }
    }
    mu
}

/// Eigenvalues of `A_Sᵀ A_S`, descending.
pub fn gram_submatrix_eigen<T: Scalar>(d: &Dictionary<T>, s: &SupportSet) -> Vec<T> {
    symmetric_eig(&d.gram().principal(s.indices()))
        .expect("principal submatrix of a Gram matrix is symmetric")
        .values
}

/// Parameterized worst-case and illustrative constructions.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "construction", content = "params", rename_all = "snake_case")]
pub enum Construction {
    /// `2k−g+b` atoms in dimension `2k−g+b−1` with all inner products `−1/(2k−g+b−1)`.
    Equiangular { k: usize, g: usize, b: usize },
    /// `n` atoms whose one-dimensional kernel is spanned by `(γ1, 1, 1)`.
    Example1 { n: usize, gamma: f64 },
    /// Block construction `diag(I_{g+b}, M)` with `δ_{k+b+1} = 1/√(k−g)`.
    Lemma1 { k: usize, g: usize, b: usize },
    /// `k+1` equiangular atoms with `μ = α/(2k−g−1)`.
    Example2 { k: usize, g: usize, alpha: f64 },
    /// Two atoms at inner product `μ` plus `k−1` orthonormal atoms orthogonal to both.
    Example3 { k: usize, mu: f64 },
}

impl Construction {
    pub fn name(&self) -> &'static str {
        match self {
            Construction::Equiangular { .. } => "equiangular",
            Construction::Example1 { .. } => "example1",
            Construction::Lemma1 { .. } => "lemma1",
            Construction::Example2 { .. } => "example2",
            Construction::Example3 { .. } => "example3",
        }
    }
}

/// What a generator reports alongside the dictionary.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Metadata {
    #[serde(flatten)]
    pub construction: Construction,
    pub k: Option<usize>,
    pub g: Option<usize>,
    pub b: Option<usize>,
    /// Mutual coherence targeted by the construction.
    pub mu: f64,
    pub canonical_q: Option<SupportSet>,
    pub canonical_qstar: Option<SupportSet>,
}

fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidParams(msg.into())
}

/// Gram matrix with unit diagonal and `off` everywhere else.
fn constant_gram<T: Scalar>(n: usize, off: T) -> Matrix<T> {
    let mut g = Matrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            g[(i, j)] = if i == j { T::one() } else { off };
        }
    }
    g
}

/// `A = Υ Uᵀ` with `Υ = [diag(√λ_1, …, √λ_r) 0]`, so that `AᵀA = G` when
/// `G` has rank at most `r`.
fn factor_gram<T: Scalar>(g: &Matrix<T>, r: usize) -> Result<Matrix<T>> {
    let eig = symmetric_eig(g)?;
    let n = g.rows();
    let mut a = Matrix::zeros(r, n);
    for i in 0..r {
        let s = eig.values[i].max(T::zero()).sqrt();
        for j in 0..n {
            a[(i, j)] = s * eig.vectors[(j, i)];
        }
    }
    Ok(a)
}

fn check_gram<T: Scalar>(a: &Matrix<T>, target: &Matrix<T>) -> Result<()> {
    let gap = a.gram().max_abs_diff(target);
    if gap > T::tol(1e-9, 1e3) {
        return Err(invalid(format!(
            "constructed Gram deviates from its target by {gap}"
        )));
    }
    Ok(())
}

fn equiangular<T: Scalar>(k: usize, g: usize, b: usize) -> Result<(Matrix<T>, Metadata)> {
    if k == 0 || g >= k {
        return Err(invalid(format!("equiangular requires 0 <= g < k (k={k}, g={g})")));
    }
    let n = 2 * k - g + b;
    let mu = 1.0 / (n as f64 - 1.0);
    let target = constant_gram(n, T::lit(-mu));
    let a = factor_gram(&target, n - 1)?;
    check_gram(&a, &target)?;
    let q = SupportSet::range(0..g + b);
    let qstar = SupportSet::range(0..g).union(&SupportSet::range(g + b..k + b));
    Ok((
        a,
        Metadata {
            construction: Construction::Equiangular { k, g, b },
            k: Some(k),
            g: Some(g),
            b: Some(b),
            mu,
            canonical_q: Some(q),
            canonical_qstar: Some(qstar),
        },
    ))
}

fn example1<T: Scalar>(n: usize, gamma: f64) -> Result<(Matrix<T>, Metadata)> {
    if n < 3 {
        return Err(invalid(format!("example1 requires n >= 3 (n={n})")));
    }
    let m = (n - 2) as f64;
    if !(gamma.abs() < 1.0 / m) {
        return Err(invalid(format!(
            "example1 requires |gamma| < 1/(n-2) = {} (gamma={gamma})",
            1.0 / m
        )));
    }
    let alpha = 0.5 * gamma * gamma * m - 1.0;
    let beta = -gamma / 2.0;
    let mut target = Matrix::identity(n);
    for i in 0..n - 2 {
        for j in [n - 2, n - 1] {
            target[(i, j)] = T::lit(beta);
            target[(j, i)] = T::lit(beta);
        }
    }
    target[(n - 2, n - 1)] = T::lit(alpha);
    target[(n - 1, n - 2)] = T::lit(alpha);
    let a = factor_gram(&target, n - 1)?;
    check_gram(&a, &target)?;
    let mu = beta.abs().max(alpha.abs());
    Ok((
        a,
        Metadata {
            construction: Construction::Example1 { n, gamma },
            k: Some(2),
            g: Some(1),
            b: Some(0),
            mu,
            canonical_q: Some(SupportSet::from_sorted(vec![n - 2])),
            canonical_qstar: Some(SupportSet::from_sorted(vec![n - 2, n - 1])),
        },
    ))
}

fn lemma1<T: Scalar>(k: usize, g: usize, b: usize) -> Result<(Matrix<T>, Metadata)> {
    if k == 0 || g >= k {
        return Err(invalid(format!("lemma1 requires 0 <= g < k (k={k}, g={g})")));
    }
    let n = k + b + 1;
    let s = k - g;
    let off = g + b;
    let mut a = Matrix::zeros(n, n);
    for i in 0..off {
        a[(i, i)] = T::one();
    }
    let mu;
    if s == 1 {
        // Two identical atoms: M = [[1, 1], [0, 0]].
        a[(off, off)] = T::one();
        a[(off, off + 1)] = T::one();
        mu = 1.0;
    } else {
        let inv = T::one() / T::from_usize_lossy(s);
        for i in 0..s {
            a[(off + i, off + i)] = T::one();
            a[(off + i, n - 1)] = inv;
        }
        a[(n - 1, n - 1)] = (T::from_usize_lossy(s - 1) * inv).sqrt();
        mu = 1.0 / s as f64;
    }
    Ok((
        a,
        Metadata {
            construction: Construction::Lemma1 { k, g, b },
            k: Some(k),
            g: Some(g),
            b: Some(b),
            mu,
            canonical_q: Some(SupportSet::range(0..g + b)),
            canonical_qstar: Some(SupportSet::range(b..k + b)),
        },
    ))
}

fn example2<T: Scalar>(k: usize, g: usize, alpha: f64) -> Result<(Matrix<T>, Metadata)> {
    if k == 0 || g >= k {
        return Err(invalid(format!("example2 requires 0 <= g < k (k={k}, g={g})")));
    }
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(invalid(format!("example2 requires alpha in (0, 1) (alpha={alpha})")));
    }
    if 2 * k - g < 2 {
        return Err(invalid("example2 requires 2k - g - 1 > 0"));
    }
    let mu = alpha / (2 * k - g - 1) as f64;
    if mu > 1.0 / k as f64 {
        return Err(invalid(format!("example2 requires mu <= 1/k (mu={mu})")));
    }
    let n = k + 1;
    let target = constant_gram(n, T::lit(-mu));
    let a = factor_gram(&target, n)?;
    check_gram(&a, &target)?;
    Ok((
        a,
        Metadata {
            construction: Construction::Example2 { k, g, alpha },
            k: Some(k),
            g: Some(g),
            b: Some(0),
            mu,
            canonical_q: None,
            canonical_qstar: None,
        },
    ))
}

fn example3<T: Scalar>(k: usize, mu: f64) -> Result<(Matrix<T>, Metadata)> {
    if k == 0 {
        return Err(invalid("example3 requires k >= 1"));
    }
    if !(mu.abs() < 1.0) {
        return Err(invalid(format!("example3 requires |mu| < 1 (mu={mu})")));
    }
    let n = k + 1;
    let mut a = Matrix::identity(n);
    a[(0, 1)] = T::lit(mu);
    a[(1, 1)] = T::lit((1.0 - mu * mu).sqrt());
    let mut target = Matrix::identity(n);
    target[(0, 1)] = T::lit(mu);
    target[(1, 0)] = T::lit(mu);
    check_gram(&a, &target)?;
    Ok((
        a,
        Metadata {
            construction: Construction::Example3 { k, mu },
            k: Some(k),
            g: None,
            b: Some(0),
            mu: mu.abs(),
            canonical_q: None,
            canonical_qstar: None,
        },
    ))
}

/// Builds the dictionary for `construction` together with its metadata.
pub fn generate<T: Scalar>(construction: &Construction) -> Result<(Dictionary<T>, Metadata)> {
    let (a, meta) = match *construction {
        Construction::Equiangular { k, g, b } => equiangular(k, g, b)?,
        Construction::Example1 { n, gamma } => example1(n, gamma)?,
        Construction::Lemma1 { k, g, b } => lemma1(k, g, b)?,
        Construction::Example2 { k, g, alpha } => example2(k, g, alpha)?,
        Construction::Example3 { k, mu } => example3(k, mu)?,
    };
    Ok((Dictionary::build(a, false)?, meta))
}

/// `Ã` and `B̃` for a fixed informed support `Q`.
#[derive(Clone, Debug)]
pub struct ProjectedDictionary<'a, T> {
    base: &'a Dictionary<T>,
    q: SupportSet,
    qr: Option<Qr<T>>,
    a_tilde: Matrix<T>,
    b_tilde: Matrix<T>,
    norms: Vec<T>,
}

impl<'a, T: Scalar> ProjectedDictionary<'a, T> {
    pub fn new(base: &'a Dictionary<T>, q: &SupportSet, tol: &Tolerances<T>) -> Result<Self> {
        q.check(base.n())?;
        let qr = if q.is_empty() {
            None
        } else {
            Some(Qr::new(&base.select(q), tol)?)
        };
        let (m, n) = (base.rows(), base.n());
        let mut a_tilde = Matrix::zeros(m, n);
        let mut b_tilde = Matrix::zeros(m, n);
        let mut norms = vec![T::zero(); n];
        for i in 0..n {
            if q.contains(i) {
                continue;
            }
            let a = base.atom(i);
            let at = match &qr {
                Some(f) => f.project_complement(&a),
                None => a,
            };
            let nrm = norm(&at);
            norms[i] = nrm;
            a_tilde.set_column(i, &at);
            if nrm >= tol.rank_tol {
                let bt: Vec<T> = at.iter().map(|&x| x / nrm).collect();
                b_tilde.set_column(i, &bt);
            }
        }
        Ok(Self {
            base,
            q: q.clone(),
            qr,
            a_tilde,
            b_tilde,
            norms,
        })
    }

    pub fn base(&self) -> &'a Dictionary<T> {
        self.base
    }

    pub fn q(&self) -> &SupportSet {
        &self.q
    }

    pub fn a_tilde(&self) -> &Matrix<T> {
        &self.a_tilde
    }

    pub fn b_tilde(&self) -> &Matrix<T> {
        &self.b_tilde
    }

    /// `C̃`: `Ã` for OMP, `B̃` for OLS.
    pub fn c_tilde(&self, variant: Variant) -> &Matrix<T> {
        match variant {
            Variant::Omp => &self.a_tilde,
            Variant::Ols => &self.b_tilde,
        }
    }

    /// `‖ã_i‖` (zero for `i ∈ Q`).
    pub fn norms(&self) -> &[T] {
        &self.norms
    }

    /// `P⊥_Q v`.
    pub fn project(&self, v: &[T]) -> Vec<T> {
        match &self.qr {
            Some(f) => f.project_complement(v),
            None => v.to_vec(),
        }
    }

    /// `⟨c̃_i, r⟩` for every atom; `None` on `Q`.
    pub fn correlations(&self, r: &[T], variant: Variant) -> Vec<Option<T>> {
        let c = self.c_tilde(variant);
        let ct_r = c.tr_mul_vec(r);
        ct_r
            .into_iter()
            .enumerate()
            .map(|(i, s)| if self.q.contains(i) { None } else { Some(s) })
            .collect()
    }
}

pub fn projected_dictionary<'a, T: Scalar>(
    d: &'a Dictionary<T>,
    q: &SupportSet,
    tol: &Tolerances<T>,
) -> Result<ProjectedDictionary<'a, T>> {
    ProjectedDictionary::new(d, q, tol)
}

#[cfg(test)]
mod tests;
