//! Exact-recovery certificates and the analytic bounds that relate them.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::dictionary::{Dictionary, ProjectedDictionary, SupportSet, Variant};
use crate::error::{Error, Result};
use crate::linalg::{check_full_column_rank, norm, norm1, symmetric_eig, Matrix, Qr, Tolerances};
use crate::scalar::Scalar;
use crate::subsets::{admissible_count, admissible_pairs, binomial, guard, subsets, ENUMERATION_LIMIT};

fn check_erc_sets(n: usize, q_star: &SupportSet, q: &SupportSet) -> Result<()> {
    q_star.check(n)?;
    q.check(n)?;
    if q_star.difference(q).is_empty() {
        return Err(Error::InvalidParams(
            "partial ERC needs at least one atom of Q* outside Q (g < k)".into(),
        ));
    }
    Ok(())
}

fn erc_from_projection<T: Scalar>(
    proj: &ProjectedDictionary<'_, T>,
    q_star: &SupportSet,
    variant: Variant,
    tol: &Tolerances<T>,
) -> Result<T> {
    let c = proj.c_tilde(variant);
    let missing = q_star.difference(proj.q());
    let qr = Qr::new(&c.select_columns(missing.indices()), tol)?;
    let mut worst = T::zero();
    for i in q_star.union(proj.q()).complement(c.cols()).iter() {
        worst = worst.max(norm1(&qr.solve(&c.column(i))));
    }
    Ok(worst)
}

/// `max_{i ∉ Q*} ‖C̃†_{Q*\Q} c̃_i‖₁`; atoms of `Q` contribute zero.
pub fn partial_erc<T: Scalar>(
    d: &Dictionary<T>,
    q_star: &SupportSet,
    q: &SupportSet,
    variant: Variant,
    tol: &Tolerances<T>,
) -> Result<T> {
    check_erc_sets(d.n(), q_star, q)?;
    check_full_column_rank(&d.select(&q_star.union(q)), tol)?;
    let proj = ProjectedDictionary::new(d, q, tol)?;
    erc_from_projection(&proj, q_star, variant, tol)
}

/// Largest partial ERC over every `(Q*, Q)` with `|Q*| = k`,
/// `|Q ∩ Q*| = g`, `|Q \ Q*| = b`.
pub fn theta_oxx<T: Scalar>(
    d: &Dictionary<T>,
    k: usize,
    g: usize,
    b: usize,
    variant: Variant,
    tol: &Tolerances<T>,
) -> Result<T> {
    let n = d.n();
    if g >= k || k + b > n {
        return Err(Error::InvalidParams(format!(
            "theta needs g < k and k + b <= n (k={k}, g={g}, b={b}, n={n})"
        )));
    }
    guard(admissible_count(n, k, g, b), ENUMERATION_LIMIT)?;
    let mut worst = T::zero();
    let mut cached: Option<ProjectedDictionary<'_, T>> = None;
    for (q, q_star) in admissible_pairs(n, k, g, b) {
        if cached.as_ref().is_none_or(|p| p.q() != &q) {
            cached = Some(ProjectedDictionary::new(d, &q, tol)?);
        }
        check_full_column_rank(&d.select(&q_star.union(&q)), tol)?;
        let proj = cached.as_ref().expect("projection cached above");
        worst = worst.max(erc_from_projection(proj, &q_star, variant, tol)?);
    }
    Ok(worst)
}

/// Value of a truncated null-space constant and whether it is exact.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct NspValue<T> {
    pub value: T,
    /// False when the kernel has dimension at least two and the value is a
    /// sampled lower bound.
    pub exact: bool,
    pub kernel_dim: usize,
}

/// `|v_i|^p` with entries at most `rank_tol · ‖v‖∞` treated as zero; `p = 0`
/// counts nonzeros.
fn powered<T: Scalar>(v: &[T], p: T, tol: &Tolerances<T>) -> Vec<T> {
    let vmax = v.iter().fold(T::zero(), |m, x| m.max(x.abs()));
    let cut = tol.rank_tol * vmax;
    v.iter()
        .map(|x| {
            let a = x.abs();
            if a <= cut {
                T::zero()
            } else if p == T::zero() {
                T::one()
            } else {
                a.powf(p)
            }
        })
        .collect()
}

/// `‖v_{Q*\Q}‖_p^p / ‖v_{(Q* ∪ Q)ᶜ}‖_p^p` for one kernel vector and one pair.
pub fn nsp_ratio<T: Scalar>(
    v: &[T],
    q_star: &SupportSet,
    q: &SupportSet,
    p: T,
    tol: &Tolerances<T>,
) -> T {
    let w = powered(v, p, tol);
    let num: T = q_star.difference(q).iter().map(|i| w[i]).sum();
    let den: T = q_star.union(q).complement(v.len()).iter().map(|i| w[i]).sum();
    num / den
}

/// Closed-form maximum over admissible pairs for a fixed kernel vector: the
/// `k−g` largest powered magnitudes over the `n−k−b` smallest.
pub fn nsp_sorted_ratio<T: Scalar>(v: &[T], k: usize, g: usize, b: usize, p: T, tol: &Tolerances<T>) -> T {
    let mut w = powered(v, p, tol);
    w.sort_by(|a, b| b.partial_cmp(a).unwrap_or(std::cmp::Ordering::Equal));
    let n = w.len();
    let num: T = w[..k - g].iter().copied().sum();
    let den: T = w[k + b..n].iter().copied().sum();
    num / den
}

const NSP_SAMPLES: usize = 10_000;
const NSP_REFINE_STEPS: usize = 50;
const NSP_SEED: u64 = 0x6b65_726e_656c;

fn unit_gaussian<T: Scalar>(rng: &mut ChaCha8Rng, dim: usize) -> Vec<T> {
    loop {
        let c: Vec<f64> = (0..dim).map(|_| StandardNormal.sample(rng)).collect();
        let nrm = c.iter().map(|x| x * x).sum::<f64>().sqrt();
        if nrm > 1e-12 {
            return c.into_iter().map(|x| T::lit(x / nrm)).collect();
        }
    }
}

/// `θ_p(k, g, b)`: exact on kernels of dimension at most one, a seeded
/// sampled lower bound otherwise.
pub fn theta_nsp<T: Scalar>(
    d: &Dictionary<T>,
    k: usize,
    g: usize,
    b: usize,
    p: T,
    tol: &Tolerances<T>,
) -> Result<NspValue<T>> {
    if !(p >= T::zero() && p <= T::one()) {
        return Err(Error::InvalidParams(format!("p = {p} must lie in [0, 1]")));
    }
    if g >= k || k + b > d.n() {
        return Err(Error::InvalidParams(format!(
            "theta needs g < k and k + b <= n (k={k}, g={g}, b={b}, n={})",
            d.n()
        )));
    }
    let spark = d.spark(tol);
    if !spark.exceeds(k + b) {
        return Err(Error::SparkTooSmall {
            spark: spark.finite().unwrap_or(d.n() + 1),
            required: k + b,
        });
    }
    let kernel = d.kernel_basis(tol);
    let dim = kernel.cols();
    let ratio = |v: &[T]| nsp_sorted_ratio(v, k, g, b, p, tol);
    match dim {
        0 => Ok(NspValue {
            value: T::zero(),
            exact: true,
            kernel_dim: 0,
        }),
        1 => Ok(NspValue {
            value: ratio(&kernel.column(0)),
            exact: true,
            kernel_dim: 1,
        }),
        _ => {
            let mut rng = ChaCha8Rng::seed_from_u64(NSP_SEED);
            let mut best_c = unit_gaussian::<T>(&mut rng, dim);
            let mut best = ratio(&kernel.mul_vec(&best_c));
            for _ in 1..NSP_SAMPLES {
                let c = unit_gaussian::<T>(&mut rng, dim);
                let r = ratio(&kernel.mul_vec(&c));
                if r > best {
                    best = r;
                    best_c = c;
                }
            }
            let mut step = T::lit(0.1);
            for _ in 0..NSP_REFINE_STEPS {
                let z = unit_gaussian::<T>(&mut rng, dim);
                let mut c: Vec<T> = best_c.iter().zip(&z).map(|(&a, &b)| a + step * b).collect();
                let nrm = norm(&c);
                for x in c.iter_mut() {
                    *x /= nrm;
                }
                let r = ratio(&kernel.mul_vec(&c));
                if r > best {
                    best = r;
                    best_c = c;
                } else {
                    step *= T::lit(0.8);
                }
            }
            Ok(NspValue {
                value: best,
                exact: false,
                kernel_dim: dim,
            })
        }
    }
}

fn isometry_gaps<T: Scalar>(g: &Matrix<T>) -> (T, T) {
    let eig = symmetric_eig(g).expect("Gram submatrices are symmetric");
    (T::one() - eig.min(), eig.max() - T::one())
}

/// Symmetric restricted isometry constant `δ_order`, by exhaustive enumeration.
pub fn ric<T: Scalar>(d: &Dictionary<T>, order: usize) -> Result<T> {
    if order == 0 || order > d.n() {
        return Err(Error::InvalidParams(format!(
            "RIC order {order} must lie in 1..={}",
            d.n()
        )));
    }
    guard(binomial(d.n(), order), ENUMERATION_LIMIT)?;
    let mut delta = T::zero();
    for s in subsets(d.n(), order) {
        let (low, up) = isometry_gaps(&d.gram().principal(s.indices()));
        delta = delta.max(low).max(up);
    }
    Ok(delta)
}

/// Tightest projected-RIP pair over disjoint `|Q'| = q`, `|Q| = l`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Prip<T> {
    pub delta_low: T,
    pub delta_up: T,
}

pub fn prip<T: Scalar>(d: &Dictionary<T>, q: usize, l: usize, tol: &Tolerances<T>) -> Result<Prip<T>> {
    let n = d.n();
    if q == 0 || q + l > n {
        return Err(Error::InvalidParams(format!(
            "P-RIP needs q >= 1 and q + l <= n (q={q}, l={l}, n={n})"
        )));
    }
    guard(binomial(n, l).saturating_mul(binomial(n - l, q)), ENUMERATION_LIMIT)?;
    let mut out = Prip {
        delta_low: T::neg_infinity(),
        delta_up: T::neg_infinity(),
    };
    for qs in subsets(n, l) {
        let proj = ProjectedDictionary::new(d, &qs, tol)?;
        let pg = proj.a_tilde().gram();
        let rest = qs.complement(n);
        for sub in subsets(rest.len(), q) {
            let idx: Vec<usize> = sub.iter().map(|j| rest.indices()[j]).collect();
            let (low, up) = isometry_gaps(&pg.principal(&idx));
            out.delta_low = out.delta_low.max(low);
            out.delta_up = out.delta_up.max(up);
        }
    }
    Ok(out)
}

/// `μ_l`: largest `|⟨c̃_i, c̃_j⟩|` over `|Q| = l` and distinct `i, j ∉ Q`.
pub fn projected_coherence<T: Scalar>(
    d: &Dictionary<T>,
    l: usize,
    variant: Variant,
    tol: &Tolerances<T>,
) -> Result<T> {
    let n = d.n();
    if l + 2 > n {
        return Err(Error::InvalidParams(format!(
            "projected coherence needs l + 2 <= n (l={l}, n={n})"
        )));
    }
    guard(binomial(n, l), ENUMERATION_LIMIT)?;
    let mut mu = T::zero();
    for qs in subsets(n, l) {
        let proj = ProjectedDictionary::new(d, &qs, tol)?;
        let pg = proj.c_tilde(variant).gram();
        let rest = qs.complement(n);
        for (a, &i) in rest.indices().iter().enumerate() {
            for &j in &rest.indices()[a + 1..] {
                mu = mu.max(pg[(i, j)].abs());
            }
        }
    }
    Ok(mu)
}

/// How a reported value is compared with its threshold.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Relation {
    #[serde(rename = "<")]
    Lt,
    #[serde(rename = "<=")]
    Le,
    #[serde(rename = ">")]
    Gt,
}

impl Relation {
    pub fn is_strict(self) -> bool {
        !matches!(self, Relation::Le)
    }

    /// Comparison at width `cert_tol`: strict relations must hold with that
    /// margin, non-strict ones may be violated by at most that much.
    pub fn holds(self, value: f64, threshold: f64, cert_tol: f64) -> bool {
        match self {
            Relation::Lt => value < threshold - cert_tol,
            Relation::Le => value <= threshold + cert_tol,
            Relation::Gt => value > threshold + cert_tol,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Context {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub g: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub b: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub q: Option<SupportSet>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub q_star: Option<SupportSet>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub variant: Option<Variant>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub order: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub l: Option<usize>,
}

impl Context {
    pub fn kgb(k: usize, g: usize, b: usize) -> Self {
        Self {
            k: Some(k),
            g: Some(g),
            b: Some(b),
            ..Self::default()
        }
    }
}

/// A named certificate value, optionally judged against a threshold.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConditionReport {
    pub name: String,
    pub value: f64,
    pub threshold: Option<f64>,
    pub relation: Option<Relation>,
    pub strict: bool,
    pub satisfied: Option<bool>,
    pub exact: bool,
    pub context: Context,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl ConditionReport {
    pub fn value(name: impl Into<String>, value: f64, exact: bool, context: Context) -> Self {
        Self {
            name: name.into(),
            value,
            threshold: None,
            relation: None,
            strict: false,
            satisfied: None,
            exact,
            context,
            note: None,
        }
    }

    pub fn judged(mut self, threshold: f64, relation: Relation, cert_tol: f64) -> Self {
        self.threshold = Some(threshold);
        self.relation = Some(relation);
        self.strict = relation.is_strict();
        self.satisfied = Some(relation.holds(self.value, threshold, cert_tol));
        self
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.note = Some(note.into());
        self
    }
}

/// Closed-form recovery conditions and bounds.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "bound", rename_all = "snake_case")]
pub enum Bound {
    /// `μ < 1/(2k−g+b−1)`.
    CoherenceMain { mu: f64, k: usize, g: usize, b: usize },
    /// `μ < 1/(2k−1)`.
    CoherenceClassic { mu: f64, k: usize },
    /// `δ_{k+1} < 1/√(k+1)`.
    RicOmpClassic { delta: f64, k: usize },
    /// `δ_{k+b+1} < 1/(√(k−g)+1)`.
    RicOmpInformed { delta: f64, k: usize, g: usize, b: usize },
    /// `δ_{2k} < 1/(1+√(2(1+(b−g)/k)))`.
    RicL1Informed { delta: f64, k: usize, g: usize, b: usize },
    /// `(k−g)μ/(1−(k+b−1)μ)`, an upper bound on the OMP partial ERC.
    Prop1 { mu: f64, k: usize, g: usize, b: usize },
    /// `(k−g)(δ̄_{2,g+b}+δ_{2,g+b}) / (2(1−δ_{k−g,g+b}))`.
    Lemma3 {
        delta_up_2: f64,
        delta_low_2: f64,
        delta_low_kg: f64,
        k: usize,
        g: usize,
    },
    /// `δ̄_{q,l} = (q−1)μ`.
    Lemma4Upper { mu: f64, q: usize, l: usize },
    /// `δ_{q,l} = (q−1)μ + μ²ql/(1−(l−1)μ)`.
    Lemma4Lower { mu: f64, q: usize, l: usize },
    /// `μ/(1−lμ)`, an upper bound on `μ_l^OLS`.
    Lemma5 { mu: f64, l: usize },
    /// `(δ̄_{2,l}+δ_{2,l})/2`, an upper bound on `μ_l^OMP`.
    Lemma10 { delta_up_2: f64, delta_low_2: f64 },
    /// `k+b+1 < spark(A)`; `spark = None` means all columns are independent.
    SparkOlsKminus1 {
        k: usize,
        b: usize,
        spark: Option<usize>,
        n: usize,
    },
}

fn out_of_domain(msg: String) -> Error {
    Error::OutOfDomain(msg)
}

fn coherence_domain(mu: f64, l: usize, what: &str) -> Result<()> {
    if !(0.0..=1.0).contains(&mu) {
        return Err(out_of_domain(format!("{what}: mu = {mu} outside [0, 1]")));
    }
    if l as f64 * mu >= 1.0 {
        return Err(out_of_domain(format!("{what} requires mu < 1/{l} (mu = {mu})")));
    }
    Ok(())
}

/// Evaluates `bound`, attaching a threshold and verdict when it is a condition.
pub fn analytic_bound(bound: &Bound, cert_tol: f64) -> Result<ConditionReport> {
    use Bound::*;
    let report = match *bound {
        CoherenceMain { mu, k, g, b } => {
            if g >= k {
                return Err(out_of_domain(format!("coherence_main requires g < k (k={k}, g={g})")));
            }
            let den = (2 * k - g + b - 1) as f64;
            if den <= 0.0 {
                return Err(out_of_domain("coherence_main requires 2k - g + b - 1 > 0".into()));
            }
            ConditionReport::value("coherence_main", mu, true, Context::kgb(k, g, b))
                .judged(1.0 / den, Relation::Lt, cert_tol)
        }
        CoherenceClassic { mu, k } => {
            if k == 0 {
                return Err(out_of_domain("coherence_classic requires k >= 1".into()));
            }
            ConditionReport::value(
                "coherence_classic",
                mu,
                true,
                Context {
                    k: Some(k),
                    ..Context::default()
                },
            )
            .judged(1.0 / (2 * k - 1) as f64, Relation::Lt, cert_tol)
        }
        RicOmpClassic { delta, k } => ConditionReport::value(
            "ric_omp_classic",
            delta,
            true,
            Context {
                k: Some(k),
                order: Some(k + 1),
                ..Context::default()
            },
        )
        .judged(1.0 / ((k + 1) as f64).sqrt(), Relation::Lt, cert_tol)
        .with_note(
            "threshold is the displayed 1/sqrt(k+1); the accompanying tightness \
             discussion is phrased with 1/(sqrt(k)+1) and delta = 1/sqrt(k)",
        ),
        RicOmpInformed { delta, k, g, b } => {
            if g >= k {
                return Err(out_of_domain(format!("ric_omp_informed requires g < k (k={k}, g={g})")));
            }
            ConditionReport::value(
                "ric_omp_informed",
                delta,
                true,
                Context {
                    order: Some(k + b + 1),
                    ..Context::kgb(k, g, b)
                },
            )
            .judged(1.0 / (((k - g) as f64).sqrt() + 1.0), Relation::Lt, cert_tol)
        }
        RicL1Informed { delta, k, g, b } => {
            if k == 0 || g > k {
                return Err(out_of_domain(format!("ric_l1_informed requires 0 <= g <= k, k >= 1 (k={k}, g={g})")));
            }
            let inner = 2.0 * (1.0 + (b as f64 - g as f64) / k as f64);
            ConditionReport::value(
                "ric_l1_informed",
                delta,
                true,
                Context {
                    order: Some(2 * k),
                    ..Context::kgb(k, g, b)
                },
            )
            .judged(1.0 / (1.0 + inner.sqrt()), Relation::Lt, cert_tol)
        }
        Prop1 { mu, k, g, b } => {
            if g >= k {
                return Err(out_of_domain(format!("prop1_bound requires g < k (k={k}, g={g})")));
            }
            coherence_domain(mu, k + b - 1, "prop1_bound")?;
            let value = (k - g) as f64 * mu / (1.0 - (k + b - 1) as f64 * mu);
            ConditionReport::value("prop1_bound", value, true, Context::kgb(k, g, b))
                .judged(1.0, Relation::Lt, cert_tol)
        }
        Lemma3 {
            delta_up_2,
            delta_low_2,
            delta_low_kg,
            k,
            g,
        } => {
            if g >= k {
                return Err(out_of_domain(format!("lemma3_bound requires g < k (k={k}, g={g})")));
            }
            if delta_low_kg >= 1.0 {
                return Err(out_of_domain(format!(
                    "lemma3_bound requires delta_low(k-g, g+b) < 1 (got {delta_low_kg})"
                )));
            }
            let value = (k - g) as f64 * (delta_up_2 + delta_low_2) / (2.0 * (1.0 - delta_low_kg));
            ConditionReport::value(
                "lemma3_bound",
                value,
                true,
                Context {
                    k: Some(k),
                    g: Some(g),
                    ..Context::default()
                },
            )
            .judged(1.0, Relation::Lt, cert_tol)
        }
        Lemma4Upper { mu, q, l } => {
            coherence_domain(mu, l.saturating_sub(1), "lemma4_upper")?;
            ConditionReport::value(
                "lemma4_upper",
                q.saturating_sub(1) as f64 * mu,
                true,
                Context {
                    order: Some(q),
                    l: Some(l),
                    ..Context::default()
                },
            )
        }
        Lemma4Lower { mu, q, l } => {
            coherence_domain(mu, l.saturating_sub(1), "lemma4_lower")?;
            let value = q.saturating_sub(1) as f64 * mu
                + mu * mu * (q * l) as f64 / (1.0 - l.saturating_sub(1) as f64 * mu);
            ConditionReport::value(
                "lemma4_lower",
                value,
                true,
                Context {
                    order: Some(q),
                    l: Some(l),
                    ..Context::default()
                },
            )
        }
        Lemma5 { mu, l } => {
            coherence_domain(mu, l, "lemma5_bound")?;
            ConditionReport::value(
                "lemma5_bound",
                mu / (1.0 - l as f64 * mu),
                true,
                Context {
                    l: Some(l),
                    ..Context::default()
                },
            )
        }
        Lemma10 {
            delta_up_2,
            delta_low_2,
        } => ConditionReport::value(
            "lemma10_bound",
            (delta_up_2 + delta_low_2) / 2.0,
            true,
            Context::default(),
        ),
        SparkOlsKminus1 { k, b, spark, n } => {
            ConditionReport::value(
                "spark_ols_kminus1",
                spark.unwrap_or(n + 1) as f64,
                true,
                Context {
                    k: Some(k),
                    b: Some(b),
                    ..Context::default()
                },
            )
            .judged((k + b + 1) as f64, Relation::Gt, 0.0)
        }
    };
    Ok(report)
}
