//! Informed ℓ0 search and kernel-line verification of ℓp minimizers.

use serde::{Deserialize, Serialize};

use crate::dictionary::{Dictionary, SupportSet};
use crate::error::{Error, Result};
use crate::linalg::{norm, norm_inf, sub, Qr, Tolerances};
use crate::scalar::Scalar;
use crate::subsets::{binomial, guard, subsets, ENUMERATION_LIMIT};

/// A coefficient vector whose entries at most `rank_tol` in magnitude are
/// stored as exact zeros.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SparseVector<T> {
    entries: Vec<T>,
    support: SupportSet,
}

impl<T: Scalar> SparseVector<T> {
    pub fn new(mut entries: Vec<T>, tol: &Tolerances<T>) -> Self {
        let mut idx = Vec::new();
        for (i, x) in entries.iter_mut().enumerate() {
            if x.abs() <= tol.rank_tol {
                *x = T::zero();
            } else {
                idx.push(i);
            }
        }
        Self {
            entries,
            support: SupportSet::from_sorted(idx),
        }
    }

    /// Places `coeffs` on `support` in a length-`n` vector.
    pub fn from_support(n: usize, support: &SupportSet, coeffs: &[T], tol: &Tolerances<T>) -> Self {
        let mut entries = vec![T::zero(); n];
        for (i, &c) in support.iter().zip(coeffs) {
            entries[i] = c;
        }
        Self::new(entries, tol)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> &[T] {
        &self.entries
    }

    pub fn support(&self) -> &SupportSet {
        &self.support
    }
}

fn objective<T: Scalar>(x: &[T], q: &SupportSet, p: T, zero: T) -> T {
    x.iter()
        .enumerate()
        .filter(|(i, _)| !q.contains(*i))
        .map(|(_, v)| {
            let a = v.abs();
            if a <= zero {
                T::zero()
            } else {
                power(a, p)
            }
        })
        .sum()
}

/// `Σ_{i∉Q} |x_i|^p`, counting nonzeros when `p = 0`.
pub fn lp_objective<T: Scalar>(x: &SparseVector<T>, q: &SupportSet, p: T) -> T {
    objective(x.entries(), q, p, T::zero())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct P0Solutions<T> {
    pub solutions: Vec<SparseVector<T>>,
    /// The atoms each solution adds beyond `Q`.
    pub extra_supports: Vec<SupportSet>,
    pub unique: bool,
}

const FIT_TOL: f64 = 1e-8;

/// Minimizers of `‖x_{Q̄}‖₀` subject to `Ax = y`, by enumerating supports
/// `S ⊆ Q̄` of increasing size up to `max_extra`.
pub fn solve_p0_informed<T: Scalar>(
    d: &Dictionary<T>,
    y: &[T],
    q: &SupportSet,
    max_extra: usize,
    tol: &Tolerances<T>,
) -> Result<P0Solutions<T>> {
    let n = d.n();
    q.check(n)?;
    if y.len() != d.rows() {
        return Err(Error::DimensionMismatch(format!(
            "y has length {}, dictionary has {} rows",
            y.len(),
            d.rows()
        )));
    }
    let rest = q.complement(n);
    let max_extra = max_extra.min(rest.len());
    let cost = (0..=max_extra).fold(0u128, |acc, s| acc.saturating_add(binomial(rest.len(), s)));
    guard(cost, ENUMERATION_LIMIT)?;
    let fit = T::lit(FIT_TOL) * norm(y);
    for s in 0..=max_extra {
        let mut solutions = Vec::new();
        let mut extras = Vec::new();
        for local in subsets(rest.len(), s) {
            let extra = SupportSet::from_sorted(local.iter().map(|j| rest.indices()[j]).collect());
            let cols = q.union(&extra);
            if cols.is_empty() {
                if norm(y) <= fit {
                    solutions.push(SparseVector::new(vec![T::zero(); n], tol));
                    extras.push(extra);
                }
                continue;
            }
            let Ok(qr) = Qr::new(&d.select(&cols), tol) else {
                continue;
            };
            let coeffs = qr.solve(y);
            let residual = sub(y, &d.combine(&cols, &coeffs));
            if norm(&residual) <= fit {
                solutions.push(SparseVector::from_support(n, &cols, &coeffs, tol));
                extras.push(extra);
            }
        }
        if !solutions.is_empty() {
            let unique = solutions.len() == 1;
            return Ok(P0Solutions {
                solutions,
                extra_supports: extras,
                unique,
            });
        }
    }
    Err(Error::Infeasible { max_extra })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MinimizerStatus {
    UniqueMinimizer,
    MinimizerNotUnique,
    NotMinimizer,
    Inconclusive,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MinimizerVerdict<T> {
    pub status: MinimizerStatus,
    pub objective: T,
    /// A feasible point at least as good as `x*`; present exactly when the
    /// status is `minimizer_not_unique` or `not_minimizer`.
    pub witness: Option<Vec<T>>,
    pub witness_objective: Option<T>,
    pub kernel_dim: usize,
}

const LINE_GRID: usize = 10_000;
const PLANE_GRID: usize = 100;

/// `|a|^p` for `a` above the zero cutoff.
fn power<T: Scalar>(a: T, p: T) -> T {
    if p == T::zero() {
        T::one()
    } else if p == T::one() {
        a
    } else if p == T::lit(0.5) {
        a.sqrt()
    } else {
        a.powf(p)
    }
}

/// Objective at a kernel offset, without materializing the point.
struct Line<'a, T> {
    x: &'a [T],
    dirs: &'a [Vec<T>],
    free: &'a [usize],
    p: T,
    zero: T,
}

impl<T: Scalar> Line<'_, T> {
    fn value(&self, coef: &[T; 2]) -> T {
        let mut total = T::zero();
        for &i in self.free {
            let mut v = self.x[i];
            for (d, &c) in self.dirs.iter().zip(coef) {
                v += c * d[i];
            }
            let a = v.abs();
            if a > self.zero {
                total += power(a, self.p);
            }
        }
        total
    }

    fn point(&self, coef: &[T; 2]) -> Vec<T> {
        along(self.x, self.dirs, &coef[..self.dirs.len()])
    }
}

#[derive(Clone, Copy)]
struct Best<T> {
    coef: [T; 2],
    value: T,
}

fn along<T: Scalar>(x: &[T], dirs: &[Vec<T>], coef: &[T]) -> Vec<T> {
    let mut out = x.to_vec();
    for (v, &c) in dirs.iter().zip(coef) {
        for (o, &vi) in out.iter_mut().zip(v) {
            *o += c * vi;
        }
    }
    out
}

/// Decides whether `x*` minimizes `‖x_{Q̄}‖_p^p` over `x* + ker(A)`.
pub fn verify_lp_minimizer<T: Scalar>(
    d: &Dictionary<T>,
    x_star: &SparseVector<T>,
    q: &SupportSet,
    p: T,
    tol: &Tolerances<T>,
) -> Result<MinimizerVerdict<T>> {
    if !(p >= T::zero() && p <= T::one()) {
        return Err(Error::InvalidParams(format!("p = {p} must lie in [0, 1]")));
    }
    if x_star.len() != d.n() {
        return Err(Error::DimensionMismatch(format!(
            "x* has length {}, dictionary has {} atoms",
            x_star.len(),
            d.n()
        )));
    }
    q.check(d.n())?;
    let kernel = d.kernel_basis(tol);
    let dim = kernel.cols();
    let x = x_star.entries();
    let zero = tol.rank_tol * norm_inf(x).max(T::one());
    let f0 = objective(x, q, p, zero);
    let verdict = |status, witness: Option<Vec<T>>, value: Option<T>| MinimizerVerdict {
        status,
        objective: f0,
        witness,
        witness_objective: value,
        kernel_dim: dim,
    };
    if dim == 0 {
        return Ok(verdict(MinimizerStatus::UniqueMinimizer, None, None));
    }
    if dim > 2 {
        return Err(Error::KernelTooLarge(dim));
    }
    let dirs: Vec<Vec<T>> = (0..dim).map(|j| kernel.column(j)).collect();
    let free: Vec<usize> = q.complement(d.n()).iter().collect();
    let active: Vec<usize> = free
        .iter()
        .copied()
        .filter(|&i| dirs.iter().any(|v| v[i].abs() > zero))
        .collect();
    let line = Line {
        x,
        dirs: &dirs,
        free: &free,
        p,
        zero,
    };

    // Exact candidates, plus the bounding box of an optional safety grid.
    let mut exact: Vec<[T; 2]> = Vec::new();
    let mut grid: Option<([T; 2], [T; 2], usize)> = None;
    if active.is_empty() {
        // The objective ignores every kernel direction.
        exact.push([T::one(); 2]);
    } else if dim == 1 {
        let v = &dirs[0];
        let mut breaks: Vec<T> = active.iter().map(|&i| -x[i] / v[i]).collect();
        breaks.sort_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal));
        let (lo, hi) = (breaks[0].min(-T::one()), breaks[breaks.len() - 1].max(T::one()));
        let span = hi - lo;
        exact.extend(breaks.iter().map(|&t| [t, T::zero()]));
        exact.push([lo - span, T::zero()]);
        exact.push([hi + span, T::zero()]);
        // Piecewise linear for p = 1, so breakpoints are exhaustive there.
        if p < T::one() {
            grid = Some(([lo, T::zero()], [hi, T::zero()], LINE_GRID));
        }
    } else {
        let (v1, v2) = (&dirs[0], &dirs[1]);
        for (a, &i) in active.iter().enumerate() {
            for &j in &active[a + 1..] {
                let det = v1[i] * v2[j] - v1[j] * v2[i];
                if det.abs() <= zero {
                    continue;
                }
                let s = (-x[i] * v2[j] + x[j] * v2[i]) / det;
                let t = (-v1[i] * x[j] + v1[j] * x[i]) / det;
                exact.push([s, t]);
            }
        }
        for &i in &active {
            // Foot of the perpendicular from the origin onto line i.
            let nn = v1[i] * v1[i] + v2[i] * v2[i];
            exact.push([-x[i] * v1[i] / nn, -x[i] * v2[i] / nn]);
        }
        let mut lo = [-T::one(); 2];
        let mut hi = [T::one(); 2];
        for vtx in &exact {
            for c in 0..2 {
                lo[c] = lo[c].min(vtx[c]);
                hi[c] = hi[c].max(vtx[c]);
            }
        }
        grid = Some((lo, hi, PLANE_GRID));
    }

    let coef_norm = |c: &[T; 2]| c[0].abs().max(c[1].abs());
    let scale = exact.iter().map(coef_norm).fold(T::one(), T::max);
    let away = tol.rank_tol.sqrt() * scale;
    let consider = |c: [T; 2], slot: &mut Option<Best<T>>| {
        if coef_norm(&c) <= away {
            return;
        }
        let value = line.value(&c);
        if slot.is_none_or(|b| value < b.value) {
            *slot = Some(Best { coef: c, value });
        }
    };
    let mut best_exact = None;
    for &c in &exact {
        consider(c, &mut best_exact);
    }
    let mut best_grid = None;
    if let Some((lo, hi, steps)) = grid {
        let at = |c: usize, s: usize| lo[c] + (hi[c] - lo[c]) * T::from_usize_lossy(s) / T::from_usize_lossy(steps);
        for a in 0..=steps {
            if dim == 1 {
                consider([at(0, a), T::zero()], &mut best_grid);
            } else {
                for b in 0..=steps {
                    consider([at(0, a), at(1, b)], &mut best_grid);
                }
            }
        }
    }

    let cert = tol.cert_tol;
    if let (Some(g), Some(e)) = (best_grid, best_exact) {
        if g.value < e.value - cert && g.value < f0 - cert {
            return Ok(verdict(MinimizerStatus::Inconclusive, None, None));
        }
    }
    let best = match (best_exact, best_grid) {
        (Some(e), Some(g)) if g.value < e.value => g,
        (Some(e), _) => e,
        (None, Some(g)) => g,
        (None, None) => return Ok(verdict(MinimizerStatus::UniqueMinimizer, None, None)),
    };
    let witness = || Some(line.point(&best.coef));
    if best.value < f0 - cert {
        Ok(verdict(MinimizerStatus::NotMinimizer, witness(), Some(best.value)))
    } else if best.value <= f0 + cert {
        if dim == 2 && best.value != f0 {
            Ok(verdict(MinimizerStatus::Inconclusive, None, None))
        } else {
            Ok(verdict(MinimizerStatus::MinimizerNotUnique, witness(), Some(best.value)))
        }
    } else {
        Ok(verdict(MinimizerStatus::UniqueMinimizer, None, None))
    }
}
