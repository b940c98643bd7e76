//! Grids over `(k, g, b)` with one CSV row of certificates and greedy
//! success rates per cell.

use std::io::Write;

use log::warn;
use rayon::prelude::*;
use serde::Serialize;

use crate::bank::{coefficients, rng};
use crate::conditions::{analytic_bound, theta_nsp, theta_oxx, Bound};
use crate::dictionary::{generate, Construction, Dictionary, Variant};
use crate::error::{Error, Result};
use crate::greedy::{run, success, GreedyConfig, TiePolicy};
use crate::linalg::Tolerances;
use crate::subsets::{admissible_count, admissible_pairs, guard, ENUMERATION_LIMIT};

/// Where each cell's dictionary comes from.
#[derive(Clone, Debug)]
pub enum SweepSource {
    /// Regenerated per cell from the cell's `(k, g, b)`.
    Equiangular,
    Lemma1,
    /// The same dictionary for every cell.
    Fixed { name: String, dictionary: Dictionary<f64> },
}

impl SweepSource {
    fn name(&self) -> &str {
        match self {
            SweepSource::Equiangular => "equiangular",
            SweepSource::Lemma1 => "lemma1",
            SweepSource::Fixed { name, .. } => name,
        }
    }

    fn dictionary(&self, k: usize, g: usize, b: usize) -> Result<Dictionary<f64>> {
        match self {
            SweepSource::Equiangular => Ok(generate(&Construction::Equiangular { k, g, b })?.0),
            SweepSource::Lemma1 => Ok(generate(&Construction::Lemma1 { k, g, b })?.0),
            SweepSource::Fixed { dictionary, .. } => Ok(dictionary.clone()),
        }
    }
}

#[derive(Clone, Debug)]
pub struct SweepSpec {
    pub source: SweepSource,
    pub ks: Vec<usize>,
    pub gs: Vec<usize>,
    pub bs: Vec<usize>,
    /// Coefficient draws per `(Q*, Q)` pair.
    pub draws: usize,
    pub seed: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SweepRow {
    pub construction: String,
    pub k: usize,
    pub g: usize,
    pub b: usize,
    pub n: usize,
    pub mu: f64,
    pub coherence_threshold: f64,
    pub coherence_satisfied: bool,
    pub theta_omp: Option<f64>,
    pub theta_ols: Option<f64>,
    pub theta_p0: Option<f64>,
    pub theta_p05: Option<f64>,
    pub theta_p1: Option<f64>,
    pub theta_p_exact: Option<bool>,
    pub runs: usize,
    pub omp_adversarial: f64,
    pub omp_lexicographic: f64,
    pub ols_adversarial: f64,
    pub ols_lexicographic: f64,
}

fn keep<T>(what: &str, r: Result<T>) -> Option<T> {
    match r {
        Ok(v) => Some(v),
        Err(e) => {
            warn!("{what}: {e}");
            None
        }
    }
}

fn cell(spec: &SweepSpec, idx: usize, (k, g, b): (usize, usize, usize), tol: &Tolerances<f64>) -> Result<SweepRow> {
    let d = spec.source.dictionary(k, g, b)?;
    let n = d.n();
    guard(admissible_count(n, k, g, b), ENUMERATION_LIMIT)?;
    let mu = d.mutual_coherence();
    let coh = analytic_bound(&Bound::CoherenceMain { mu, k, g, b }, tol.cert_tol)?;
    let label = format!("{} ({k},{g},{b})", spec.source.name());
    let theta = |v| keep(&label, theta_oxx(&d, k, g, b, v, tol));
    let nsp = |p| keep(&label, theta_nsp(&d, k, g, b, p, tol));
    let (p0, p05, p1) = (nsp(0.0), nsp(0.5), nsp(1.0));
    let exact = match (&p0, &p05, &p1) {
        (Some(a), Some(b), Some(c)) => Some(a.exact && b.exact && c.exact),
        _ => None,
    };

    let configs = [
        (Variant::Omp, TiePolicy::Adversarial),
        (Variant::Omp, TiePolicy::Lexicographic),
        (Variant::Ols, TiePolicy::Adversarial),
        (Variant::Ols, TiePolicy::Lexicographic),
    ];
    let mut wins = [0usize; 4];
    let mut runs = 0usize;
    let mut r = rng(spec.seed.wrapping_add(idx as u64));
    for (q, q_star) in admissible_pairs(n, k, g, b) {
        for _ in 0..spec.draws {
            let y = d.synthesize(&coefficients::<f64>(n, &q_star, &mut r));
            for (slot, &(variant, policy)) in configs.iter().enumerate() {
                let cfg = GreedyConfig::new(variant, policy).with_tol(*tol);
                let star = (policy == TiePolicy::Adversarial).then_some(&q_star);
                let trace = run(&d, &y, &q, &cfg, star)?;
                if success(&trace, &q_star, &q) {
                    wins[slot] += 1;
                }
            }
            runs += 1;
        }
    }
    let rate = |w: usize| if runs == 0 { 0.0 } else { w as f64 / runs as f64 };
    Ok(SweepRow {
        construction: spec.source.name().to_string(),
        k,
        g,
        b,
        n,
        mu,
        coherence_threshold: coh.threshold.unwrap_or(f64::NAN),
        coherence_satisfied: coh.satisfied == Some(true),
        theta_omp: theta(Variant::Omp),
        theta_ols: theta(Variant::Ols),
        theta_p0: p0.map(|v| v.value),
        theta_p05: p05.map(|v| v.value),
        theta_p1: p1.map(|v| v.value),
        theta_p_exact: exact,
        runs,
        omp_adversarial: rate(wins[0]),
        omp_lexicographic: rate(wins[1]),
        ols_adversarial: rate(wins[2]),
        ols_lexicographic: rate(wins[3]),
    })
}

/// Valid cells of the grid in row-major `(k, g, b)` order.
pub fn cells(spec: &SweepSpec) -> Result<Vec<(usize, usize, usize)>> {
    let mut out = Vec::new();
    for &k in &spec.ks {
        for &g in &spec.gs {
            for &b in &spec.bs {
                if g >= k {
                    continue;
                }
                if let SweepSource::Fixed { dictionary, .. } = &spec.source {
                    if k + b > dictionary.n() {
                        continue;
                    }
                }
                out.push((k, g, b));
            }
        }
    }
    if out.is_empty() {
        return Err(Error::InvalidParams("sweep grid has no valid (k, g, b) cell".into()));
    }
    Ok(out)
}

/// Evaluates every cell, on `jobs` worker threads when given. Rows come back
/// in grid order whatever the thread count.
pub fn sweep(spec: &SweepSpec, tol: &Tolerances<f64>, jobs: Option<usize>) -> Result<Vec<SweepRow>> {
    let grid = cells(spec)?;
    let work = || -> Result<Vec<SweepRow>> {
        grid.par_iter()
            .enumerate()
            .map(|(i, &t)| cell(spec, i, t, tol))
            .collect()
    };
    match jobs {
        Some(j) => rayon::ThreadPoolBuilder::new()
            .num_threads(j.max(1))
            .build()
            .map_err(|e| Error::InvalidParams(format!("thread pool: {e}")))?
            .install(work),
        None => work(),
    }
}

pub fn write_csv<W: Write>(rows: &[SweepRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for row in rows {
        w.serialize(row).map_err(|e| Error::Io(e.to_string()))?;
    }
    w.flush().map_err(|e| Error::Io(e.to_string()))?;
    Ok(())
}
