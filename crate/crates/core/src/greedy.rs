//! OMP and OLS started from an informed support, with explicit tie handling.

use serde::{Deserialize, Serialize};

use crate::dictionary::{Dictionary, ProjectedDictionary, SupportSet, Variant};
use crate::error::{Error, Result};
use crate::linalg::{axpy, norm, Tolerances};
use crate::scalar::Scalar;

/// How near-equal maximal scores are resolved.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TiePolicy {
    /// Prefer a tied atom outside the true support (a systematic bad decision).
    /// Without a true support this behaves like `Lexicographic`.
    Adversarial,
    /// Smallest tied index.
    Lexicographic,
}

impl std::str::FromStr for TiePolicy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "adversarial" | "adv" => Ok(TiePolicy::Adversarial),
            "lex" | "lexicographic" => Ok(TiePolicy::Lexicographic),
            other => Err(Error::InvalidParams(format!("unknown tie policy `{other}`"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GreedyConfig<T> {
    pub variant: Variant,
    pub tie_policy: TiePolicy,
    /// Defaults to `n − |Q_init|`.
    pub max_iterations: Option<usize>,
    pub tol: Tolerances<T>,
}

impl<T: Scalar> GreedyConfig<T> {
    pub fn new(variant: Variant, tie_policy: TiePolicy) -> Self {
        Self {
            variant,
            tie_policy,
            max_iterations: None,
            tol: Tolerances::default(),
        }
    }

    pub fn with_max_iterations(mut self, max: usize) -> Self {
        self.max_iterations = Some(max);
        self
    }

    pub fn with_tol(mut self, tol: Tolerances<T>) -> Self {
        self.tol = tol;
        self
    }
}

/// Outcome of one selection step.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Selection<T> {
    pub index: usize,
    /// `|⟨c̃_i, r⟩|` per atom; `None` for atoms already in the support.
    pub scores: Vec<Option<T>>,
    /// At least two candidates lie within the tie width of the maximum.
    pub tie: bool,
    /// Candidates within the tie width of the maximum, ascending.
    pub tied: Vec<usize>,
    /// Best score minus the second best.
    pub margin: T,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Iteration<T> {
    pub selected: usize,
    pub scores: Vec<Option<T>>,
    pub tie: bool,
    pub margin: T,
    /// `‖P⊥ y‖` after adding `selected` to the support.
    pub residual_norm: T,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Termination {
    ResidualZero,
    MaxIterations,
    RankFailure,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GreedyTrace<T> {
    pub variant: Variant,
    pub initial_support: SupportSet,
    /// `‖P⊥_{Q_init} y‖`.
    pub initial_residual_norm: T,
    pub iterations: Vec<Iteration<T>>,
    pub final_support: SupportSet,
    pub termination: Termination,
}

impl<T: Scalar> GreedyTrace<T> {
    pub fn selected(&self) -> Vec<usize> {
        self.iterations.iter().map(|it| it.selected).collect()
    }
}

/// Tie width used for a given maximal score.
pub fn tie_width<T: Scalar>(tol: &Tolerances<T>, s_max: T) -> T {
    tol.tie_tol * s_max.max(T::one())
}

fn select_from<T: Scalar>(
    proj: &ProjectedDictionary<'_, T>,
    r: &[T],
    config: &GreedyConfig<T>,
    q_star: Option<&SupportSet>,
) -> Result<Selection<T>> {
    let scores: Vec<Option<T>> = proj
        .correlations(r, config.variant)
        .into_iter()
        .map(|s| s.map(|x| x.abs()))
        .collect();
    let s_max = scores
        .iter()
        .flatten()
        .copied()
        .fold(None, |m: Option<T>, s| Some(m.map_or(s, |m| m.max(s))))
        .ok_or(Error::NoCandidates)?;
    let width = tie_width(&config.tol, s_max);
    let tied: Vec<usize> = scores
        .iter()
        .enumerate()
        .filter_map(|(i, s)| s.filter(|&s| s_max - s <= width).map(|_| i))
        .collect();
    let index = match (config.tie_policy, q_star) {
        (TiePolicy::Adversarial, Some(star)) => tied
            .iter()
            .copied()
            .find(|&i| !star.contains(i))
            .unwrap_or(tied[0]),
        _ => tied[0],
    };
    let top = scores[index].expect("selected a candidate");
    let runner_up = scores
        .iter()
        .enumerate()
        .filter(|&(i, _)| i != index)
        .filter_map(|(_, s)| *s)
        .fold(None, |m: Option<T>, s| Some(m.map_or(s, |m| m.max(s))));
    let margin = runner_up.map_or(top, |s| top - s);
    Ok(Selection {
        index,
        tie: tied.len() >= 2,
        tied,
        scores,
        margin,
    })
}

/// One selection step from support `q_current` with residual `r`.
pub fn select_next<T: Scalar>(
    d: &Dictionary<T>,
    q_current: &SupportSet,
    r: &[T],
    config: &GreedyConfig<T>,
    q_star: Option<&SupportSet>,
) -> Result<Selection<T>> {
    let proj = ProjectedDictionary::new(d, q_current, &config.tol)?;
    select_from(&proj, r, config, q_star)
}

/// Runs the greedy recursion from `q_init`, recomputing the residual by full
/// re-projection at every step.
pub fn run<T: Scalar>(
    d: &Dictionary<T>,
    y: &[T],
    q_init: &SupportSet,
    config: &GreedyConfig<T>,
    q_star: Option<&SupportSet>,
) -> Result<GreedyTrace<T>> {
    if y.len() != d.rows() {
        return Err(Error::DimensionMismatch(format!(
            "signal of length {} for a {}-row dictionary",
            y.len(),
            d.rows()
        )));
    }
    if let Some(star) = q_star {
        star.check(d.n())?;
    }
    let available = d.n() - q_init.len().min(d.n());
    let max_iterations = config.max_iterations.unwrap_or(available).min(available);
    let mut proj = ProjectedDictionary::new(d, q_init, &config.tol)?;
    let mut support = q_init.clone();
    let mut r = proj.project(y);
    let initial_residual_norm = norm(&r);
    let stop = config.tol.rank_tol * norm(y);
    let mut iterations = Vec::new();
    let mut residual_norm = initial_residual_norm;

    let termination = loop {
        if residual_norm <= stop {
            break Termination::ResidualZero;
        }
        if iterations.len() >= max_iterations {
            break Termination::MaxIterations;
        }
        let sel = select_from(&proj, &r, config, q_star)?;
        support.insert(sel.index);
        let next = match ProjectedDictionary::new(d, &support, &config.tol) {
            Ok(p) => p,
            Err(Error::RankDeficient { .. }) => {
                iterations.push(Iteration {
                    selected: sel.index,
                    scores: sel.scores,
                    tie: sel.tie,
                    margin: sel.margin,
                    residual_norm,
                });
                break Termination::RankFailure;
            }
            Err(e) => return Err(e),
        };
        proj = next;
        r = proj.project(y);
        residual_norm = norm(&r);
        iterations.push(Iteration {
            selected: sel.index,
            scores: sel.scores,
            tie: sel.tie,
            margin: sel.margin,
            residual_norm,
        });
    };
    Ok(GreedyTrace {
        variant: config.variant,
        initial_support: q_init.clone(),
        initial_residual_norm,
        iterations,
        final_support: support,
        termination,
    })
}

/// `k−g`-step success: the first `|Q* \ Q_init|` selections all lie in `Q* \ Q_init`.
pub fn success<T>(trace: &GreedyTrace<T>, q_star: &SupportSet, q_init: &SupportSet) -> bool {
    let missing = q_star.difference(q_init);
    trace.iterations.len() >= missing.len()
        && trace.iterations[..missing.len()]
            .iter()
            .all(|it| missing.contains(it.selected))
}

/// Input reaching an ordered atom sequence from the empty support.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Reachability<T> {
    pub y: Vec<T>,
    /// `ε_1 = 1, ε_2, …`; `y = Σ ε_p a_{r_p}`.
    pub epsilons: Vec<T>,
}

pub const MAX_HALVINGS: usize = 60;

/// Whether `trace` opens with `order`, each pick untied and ahead by more than the tie width.
pub fn strict_prefix<T: Scalar>(trace: &GreedyTrace<T>, order: &[usize], tol: &Tolerances<T>) -> bool {
    trace.iterations.len() >= order.len()
        && trace.iterations.iter().zip(order).all(|(it, &want)| {
            let top = it.scores[it.selected].unwrap_or_else(T::zero);
            it.selected == want && !it.tie && it.margin > tie_width(tol, top)
        })
}

/// Builds `y = a_{r_1} + ε_2 a_{r_2} + …` so that a run from `∅` selects the
/// atoms of `order` in exactly that order, each as a strict maximum. Each
/// `ε_p` is found by halving from 1.
pub fn reachability_input<T: Scalar>(
    d: &Dictionary<T>,
    order: &[usize],
    config: &GreedyConfig<T>,
) -> Result<Reachability<T>> {
    let set = SupportSet::new(order.iter().copied())?;
    set.check(d.n())?;
    if order.len() + 2 > d.n() && !order.is_empty() {
        return Err(Error::InvalidParams(format!(
            "reachable prefixes have at most n - 2 = {} atoms (got {})",
            d.n().saturating_sub(2),
            order.len()
        )));
    }
    if order.is_empty() {
        return Ok(Reachability {
            y: vec![T::zero(); d.rows()],
            epsilons: Vec::new(),
        });
    }
    let empty = SupportSet::empty();
    let mut y = d.atom(order[0]);
    let mut epsilons = vec![T::one()];
    let first = run(d, &y, &empty, &config.with_max_iterations(1), None)?;
    if !strict_prefix(&first, &order[..1], &config.tol) {
        return Err(Error::EpsilonSearchFailed {
            prefix: 1,
            halvings: 0,
        });
    }
    for p in 1..order.len() {
        let atom = d.atom(order[p]);
        let cfg = config.with_max_iterations(p + 1);
        let mut accepted = None;
        for h in 0..=MAX_HALVINGS {
            let eps = T::lit(0.5f64.powi(h as i32));
            let cand = axpy(&y, eps, &atom);
            let trace = run(d, &cand, &empty, &cfg, None)?;
            if strict_prefix(&trace, &order[..=p], &config.tol) {
                accepted = Some((eps, cand));
                break;
            }
        }
        match accepted {
            Some((eps, cand)) => {
                epsilons.push(eps);
                y = cand;
            }
            None => {
                return Err(Error::EpsilonSearchFailed {
                    prefix: p + 1,
                    halvings: MAX_HALVINGS,
                })
            }
        }
    }
    Ok(Reachability { y, epsilons })
}

/// A signal in `span(A_{Q*})` on which the first selection after `Q` is forced
/// to be a tie between two disjoint `(k−g)`-atom explanations.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AdversarialInstance<T> {
    pub y: Vec<T>,
    /// Coefficients of `y` on all `n` atoms (supported on `Q*`).
    pub x_star: Vec<T>,
    pub q_star: SupportSet,
    pub q: SupportSet,
    pub q_good: SupportSet,
    pub q1: SupportSet,
    pub q2: SupportSet,
    /// Atom picked by a lexicographic first selection on `P⊥_Q y`.
    pub pivot: usize,
}

fn ones_on<T: Scalar>(n: usize, s: &SupportSet, value: T) -> Vec<T> {
    let mut x = vec![T::zero(); n];
    for i in s.iter() {
        x[i] = value;
    }
    x
}

fn split_instance<T: Scalar>(
    d: &Dictionary<T>,
    q_good: SupportSet,
    q: SupportSet,
    q1: SupportSet,
    q2: SupportSet,
    tol: &Tolerances<T>,
) -> Result<AdversarialInstance<T>> {
    let n = d.n();
    let y2_tilde = {
        let proj = ProjectedDictionary::new(d, &q, tol)?;
        proj.project(&d.synthesize(&ones_on(n, &q1, T::one())))
    };
    let lex = GreedyConfig::new(Variant::Omp, TiePolicy::Lexicographic).with_tol(*tol);
    let pivot = select_next(d, &q, &y2_tilde, &lex, None)?.index;
    let (q_star, x2) = if q2.contains(pivot) {
        (q_good.union(&q1), ones_on(n, &q1, T::one()))
    } else {
        (q_good.union(&q2), ones_on(n, &q2, -T::one()))
    };
    let mut x_star = ones_on(n, &q_good, T::one());
    for (a, b) in x_star.iter_mut().zip(&x2) {
        *a += *b;
    }
    Ok(AdversarialInstance {
        y: d.synthesize(&x_star),
        x_star,
        q_star,
        q,
        q_good,
        q1,
        q2,
        pivot,
    })
}

/// Converse instance on the equiangular dictionary with `2k−g+b` atoms:
/// `Q` is the first `g+b` atoms (`Q_g` then `Q_b`), `Q_1` and `Q_2` the next
/// two blocks of `k−g`, and `Q*` is whichever of `Q_g ∪ Q_1`, `Q_g ∪ Q_2`
/// excludes the pivot atom.
pub fn adversarial_instance<T: Scalar>(
    d: &Dictionary<T>,
    k: usize,
    g: usize,
    b: usize,
    tol: &Tolerances<T>,
) -> Result<AdversarialInstance<T>> {
    if g >= k || d.n() != 2 * k - g + b {
        return Err(Error::InvalidParams(format!(
            "adversarial instance needs g < k and n = 2k - g + b (n={}, k={k}, g={g}, b={b})",
            d.n()
        )));
    }
    split_instance(
        d,
        SupportSet::range(0..g),
        SupportSet::range(0..g + b),
        SupportSet::range(g + b..k + b),
        SupportSet::range(k + b..2 * k - g + b),
        tol,
    )
}

/// Input on which the uninformed algorithm first selects the `g` atoms of
/// `Q = {0..g}` and then a bad atom.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IntermediateFailure<T> {
    pub y: Vec<T>,
    pub q: SupportSet,
    pub q_star: SupportSet,
    pub reach: Reachability<T>,
    /// Weight on the disjoint-representation component.
    pub epsilon: T,
}

/// `y = y_1 + ε y_2` on the equiangular dictionary with `b = 0`, where `y_1`
/// reaches `Q = {0..g}` and `y_2` is the converse-instance component.
pub fn intermediate_failure<T: Scalar>(
    d: &Dictionary<T>,
    k: usize,
    g: usize,
    config: &GreedyConfig<T>,
) -> Result<IntermediateFailure<T>> {
    let inst = adversarial_instance(d, k, g, 0, &config.tol)?;
    let order: Vec<usize> = (0..g).collect();
    let reach = reachability_input(d, &order, config)?;
    let x2: Vec<T> = inst
        .x_star
        .iter()
        .enumerate()
        .map(|(i, &x)| if i < g { T::zero() } else { x })
        .collect();
    let y2 = d.synthesize(&x2);
    let cfg = config.with_max_iterations(g + 1);
    let empty = SupportSet::empty();
    for h in 0..=MAX_HALVINGS {
        let eps = T::lit(0.5f64.powi(h as i32));
        let y = axpy(&reach.y, eps, &y2);
        let trace = run(d, &y, &empty, &cfg, Some(&inst.q_star))?;
        let good_prefix = strict_prefix(&trace, &order, &config.tol);
        let bad_next = trace
            .iterations
            .get(g)
            .is_some_and(|it| !inst.q_star.contains(it.selected));
        if good_prefix && bad_next {
            return Ok(IntermediateFailure {
                y,
                q: inst.q,
                q_star: inst.q_star,
                reach,
                epsilon: eps,
            });
        }
    }
    Err(Error::EpsilonSearchFailed {
        prefix: g + 1,
        halvings: MAX_HALVINGS,
    })
}
