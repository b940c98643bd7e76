//! Task definitions shared by subcommands and scenario files, and their
//! execution against a loaded dictionary.

use anyhow::{anyhow, bail, Context as _, Result};
use log::warn;
use serde::{Deserialize, Serialize};
use serde_json::json;

use sparsecert::bank::{coefficients, rng};
use sparsecert::conditions::{
    analytic_bound, partial_erc, prip, projected_coherence, ric, theta_nsp, theta_oxx, Bound, ConditionReport,
    Context, Relation,
};
use sparsecert::greedy::{run, success};
use sparsecert::linalg::{norm, sub};
use sparsecert::relax::{solve_p0_informed, verify_lp_minimizer};
use sparsecert::repro::reproduce_suite;
use sparsecert::sweep::{sweep, write_csv, SweepSource, SweepSpec};
use sparsecert::{Dictionary, Error, GreedyConfig, MinimizerStatus, SparseVector, SupportSet, TiePolicy, Tolerances, Variant};

/// Settings that apply to every task.
#[derive(Clone, Copy, Debug)]
pub struct Env {
    pub tol: Tolerances,
    pub seed: u64,
    pub jobs: Option<usize>,
}

/// Rendered output plus the verdict that decides the exit code.
#[derive(Debug)]
pub struct Outcome {
    pub text: String,
    pub pass: bool,
}

impl Outcome {
    fn json<S: Serialize>(value: &S, pass: bool) -> Result<Self> {
        let mut text = serde_json::to_string_pretty(value)?;
        text.push('\n');
        Ok(Self { text, pass })
    }
}

#[derive(Clone, Debug, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Task {
    Solve(SolveTask),
    Check(CheckTask),
    Relax(RelaxTask),
    Reproduce(ReproduceTask),
    Sweep(SweepTask),
}

impl Task {
    pub fn needs_dictionary(&self) -> bool {
        match self {
            Task::Reproduce(_) => false,
            Task::Sweep(s) => s.construction.is_none(),
            _ => true,
        }
    }

    pub fn execute(&self, d: Option<&Dictionary>, label: &str, env: &Env) -> Result<Outcome> {
        let dict = || d.ok_or_else(|| anyhow!("this task needs a dictionary"));
        match self {
            Task::Solve(t) => t.execute(dict()?, env),
            Task::Check(t) => t.execute(dict()?, env),
            Task::Relax(t) => t.execute(dict()?, env),
            Task::Reproduce(t) => t.execute(env),
            Task::Sweep(t) => t.execute(d, label, env),
        }
    }
}

fn omp() -> Variant {
    Variant::Omp
}

fn adversarial() -> TiePolicy {
    TiePolicy::Adversarial
}

/// `y = A x` with `x` drawn on `support` from the seeded generator.
fn draw(d: &Dictionary, support: &SupportSet, seed: u64) -> Result<Vec<f64>> {
    support.check(d.n())?;
    Ok(coefficients(d.n(), support, &mut rng(seed)))
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolveTask {
    /// Drawn on `true_support` from the seed when absent.
    #[serde(default)]
    pub y: Option<Vec<f64>>,
    #[serde(default)]
    pub init_support: SupportSet,
    #[serde(default = "omp")]
    pub variant: Variant,
    #[serde(default = "adversarial")]
    pub ties: TiePolicy,
    #[serde(default)]
    pub true_support: Option<SupportSet>,
    #[serde(default)]
    pub max_iterations: Option<usize>,
}

impl SolveTask {
    fn execute(&self, d: &Dictionary, env: &Env) -> Result<Outcome> {
        let y = match (&self.y, &self.true_support) {
            (Some(y), _) => y.clone(),
            (None, Some(s)) => d.synthesize(&draw(d, s, env.seed)?),
            (None, None) => bail!("solve needs a signal or a true support to draw one on"),
        };
        let mut cfg = GreedyConfig::new(self.variant, self.ties).with_tol(env.tol);
        if let Some(m) = self.max_iterations {
            cfg = cfg.with_max_iterations(m);
        } else if let Some(s) = &self.true_support {
            // The success criterion looks at the first k - g selections only.
            cfg = cfg.with_max_iterations(s.difference(&self.init_support).len());
        }
        let trace = run(d, &y, &self.init_support, &cfg, self.true_support.as_ref())?;
        let ok = self.true_support.as_ref().map(|s| success(&trace, s, &self.init_support));
        Outcome::json(&json!({ "y": y, "success": ok, "trace": trace }), ok.unwrap_or(true))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Cert {
    Mu,
    Erc,
    ThetaOxx,
    ThetaNsp,
    Ric,
    Prip,
    ProjCoherence,
    Bounds,
}

fn default_ps() -> Vec<f64> {
    vec![0.0, 0.5, 1.0]
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CheckTask {
    pub cert: Cert,
    #[serde(default)]
    pub k: Option<usize>,
    #[serde(default)]
    pub g: Option<usize>,
    #[serde(default)]
    pub b: Option<usize>,
    #[serde(default = "default_ps")]
    pub p: Vec<f64>,
    /// Both variants when absent.
    #[serde(default)]
    pub variant: Option<Variant>,
    #[serde(default)]
    pub q_star: Option<SupportSet>,
    #[serde(default)]
    pub q: SupportSet,
    /// Projection size for `prip` and `proj-coherence`.
    #[serde(default)]
    pub l: Option<usize>,
    /// Block size for `prip`.
    #[serde(default)]
    pub size: Option<usize>,
    /// RIC order; `k + b + 1` by default.
    #[serde(default)]
    pub order: Option<usize>,
}

impl CheckTask {
    fn kgb(&self) -> Option<(usize, usize, usize)> {
        Some((self.k?, self.g.unwrap_or(0), self.b.unwrap_or(0)))
    }

    fn need_kgb(&self) -> Result<(usize, usize, usize)> {
        self.kgb().ok_or_else(|| anyhow!("--cert {:?} needs --k (and optionally --g, --b)", self.cert))
    }

    fn variants(&self) -> Vec<Variant> {
        self.variant.map_or(vec![Variant::Omp, Variant::Ols], |v| vec![v])
    }

    pub fn reports(&self, d: &Dictionary, tol: &Tolerances) -> Result<Vec<ConditionReport>> {
        let c = tol.cert_tol;
        let mu = d.mutual_coherence();
        let mut out = Vec::new();
        match self.cert {
            Cert::Mu => match self.kgb() {
                Some((k, g, b)) => out.push(analytic_bound(&Bound::CoherenceMain { mu, k, g, b }, c)?),
                None => out.push(ConditionReport::value("mutual_coherence", mu, true, Context::default())),
            },
            Cert::Erc => {
                let q_star = self.q_star.as_ref().ok_or_else(|| anyhow!("--cert erc needs --qstar"))?;
                for v in self.variants() {
                    let value = partial_erc(d, q_star, &self.q, v, tol)?;
                    let ctx = Context {
                        q: Some(self.q.clone()),
                        q_star: Some(q_star.clone()),
                        variant: Some(v),
                        ..Context::default()
                    };
                    out.push(ConditionReport::value("partial_erc", value, true, ctx).judged(1.0, Relation::Lt, c));
                }
            }
            Cert::ThetaOxx => {
                let (k, g, b) = self.need_kgb()?;
                for v in self.variants() {
                    let value = theta_oxx(d, k, g, b, v, tol)?;
                    let ctx = Context {
                        variant: Some(v),
                        ..Context::kgb(k, g, b)
                    };
                    out.push(ConditionReport::value("theta_oxx", value, true, ctx).judged(1.0, Relation::Lt, c));
                }
            }
            Cert::ThetaNsp => {
                let (k, g, b) = self.need_kgb()?;
                for &p in &self.p {
                    let th = theta_nsp(d, k, g, b, p, tol)?;
                    let ctx = Context {
                        p: Some(p),
                        ..Context::kgb(k, g, b)
                    };
                    let mut r = ConditionReport::value("theta_nsp", th.value, th.exact, ctx).judged(1.0, Relation::Lt, c);
                    if !th.exact {
                        r = r.with_note(format!("lower bound over a {}-dimensional kernel", th.kernel_dim));
                    }
                    out.push(r);
                }
            }
            Cert::Ric => {
                let kgb = self.kgb();
                let order = match (self.order, kgb) {
                    (Some(o), _) => o,
                    (None, Some((k, _, b))) => k + b + 1,
                    (None, None) => bail!("--cert ric needs --order or --k"),
                };
                let delta = ric(d, order)?;
                match kgb {
                    Some((k, g, b)) if order == k + b + 1 => {
                        out.push(analytic_bound(&Bound::RicOmpInformed { delta, k, g, b }, c)?)
                    }
                    _ => {
                        let ctx = Context {
                            order: Some(order),
                            ..Context::default()
                        };
                        out.push(ConditionReport::value("ric", delta, true, ctx));
                    }
                }
            }
            Cert::Prip => {
                let size = self.size.unwrap_or(2);
                let l = self.l.ok_or_else(|| anyhow!("--cert prip needs --l"))?;
                let pr = prip(d, size, l, tol)?;
                let ctx = Context {
                    order: Some(size),
                    l: Some(l),
                    ..Context::default()
                };
                out.push(ConditionReport::value("prip_upper", pr.delta_up, true, ctx.clone()));
                out.push(ConditionReport::value("prip_lower", pr.delta_low, true, ctx));
            }
            Cert::ProjCoherence => {
                let l = self.l.ok_or_else(|| anyhow!("--cert proj-coherence needs --l"))?;
                for v in self.variants() {
                    let value = projected_coherence(d, l, v, tol)?;
                    let ctx = Context {
                        variant: Some(v),
                        l: Some(l),
                        ..Context::default()
                    };
                    out.push(ConditionReport::value("projected_coherence", value, true, ctx));
                }
            }
            Cert::Bounds => {
                let (k, g, b) = self.need_kgb()?;
                let n = d.n();
                let mut bounds = vec![
                    Bound::CoherenceMain { mu, k, g, b },
                    Bound::CoherenceClassic { mu, k },
                    Bound::Prop1 { mu, k, g, b },
                ];
                if k < n {
                    bounds.push(Bound::RicOmpClassic { delta: ric(d, k + 1)?, k });
                }
                if k + b < n {
                    bounds.push(Bound::RicOmpInformed {
                        delta: ric(d, k + b + 1)?,
                        k,
                        g,
                        b,
                    });
                }
                if 2 * k <= n {
                    bounds.push(Bound::RicL1Informed {
                        delta: ric(d, 2 * k)?,
                        k,
                        g,
                        b,
                    });
                }
                if g + 1 == k {
                    bounds.push(Bound::SparkOlsKminus1 {
                        k,
                        b,
                        spark: d.spark(tol).finite(),
                        n,
                    });
                }
                for bound in bounds {
                    match analytic_bound(&bound, c) {
                        Ok(r) => out.push(r),
                        Err(Error::OutOfDomain(why)) => warn!("skipping {bound:?}: {why}"),
                        Err(e) => return Err(e.into()),
                    }
                }
            }
        }
        Ok(out)
    }

    fn execute(&self, d: &Dictionary, env: &Env) -> Result<Outcome> {
        let reports = self.reports(d, &env.tol)?;
        let pass = reports.iter().all(|r| r.satisfied != Some(false));
        Outcome::json(&reports, pass)
    }
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RelaxTask {
    #[serde(default)]
    pub y: Option<Vec<f64>>,
    /// Candidate minimizer; the sparsest informed solution of `y` when absent.
    #[serde(default)]
    pub x_star: Option<Vec<f64>>,
    /// Draws `x*` on this support from the seed when neither `y` nor `x*` is given.
    #[serde(default)]
    pub true_support: Option<SupportSet>,
    #[serde(default)]
    pub q: SupportSet,
    #[serde(default = "default_ps")]
    pub p: Vec<f64>,
    #[serde(default)]
    pub max_extra: Option<usize>,
}

const FIT_TOL: f64 = 1e-8;

impl RelaxTask {
    fn execute(&self, d: &Dictionary, env: &Env) -> Result<Outcome> {
        let tol = &env.tol;
        self.q.check(d.n())?;
        let mut p0 = None;
        let x = match (&self.x_star, &self.y, &self.true_support) {
            (Some(x), y, _) => {
                if x.len() != d.n() {
                    bail!("x* has length {}, dictionary has {} atoms", x.len(), d.n());
                }
                if let Some(y) = y {
                    let gap = norm(&sub(&d.synthesize(x), y));
                    if gap > FIT_TOL * norm(y).max(1.0) {
                        bail!("x* does not reproduce y (residual {gap:e})");
                    }
                }
                x.clone()
            }
            (None, Some(y), _) => {
                let extra = self.max_extra.unwrap_or(d.n() - self.q.len());
                let sol = solve_p0_informed(d, y, &self.q, extra, tol)?;
                let x = sol.solutions[0].entries().to_vec();
                p0 = Some(sol);
                x
            }
            (None, None, Some(s)) => draw(d, s, env.seed)?,
            (None, None, None) => bail!("relax needs x*, y, or a true support to draw x* on"),
        };
        let sparse = SparseVector::new(x, tol);
        let mut verdicts = Vec::new();
        let mut pass = true;
        for &p in &self.p {
            let v = verify_lp_minimizer(d, &sparse, &self.q, p, tol)?;
            pass &= v.status == MinimizerStatus::UniqueMinimizer;
            verdicts.push(json!({ "p": p, "verdict": v }));
        }
        let body = json!({
            "x_star": sparse.entries(),
            "p0": p0,
            "verdicts": verdicts,
        });
        Outcome::json(&body, pass)
    }
}

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReproduceTask {
    /// Every registered claim when empty.
    #[serde(default)]
    pub claims: Vec<String>,
    #[serde(default)]
    pub timings: bool,
}

impl ReproduceTask {
    fn execute(&self, env: &Env) -> Result<Outcome> {
        let reports = reproduce_suite(&self.claims, &env.tol, self.timings)?;
        let pass = reports.iter().all(|r| r.pass);
        Outcome::json(&reports, pass)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum SweepConstruction {
    Equiangular,
    Lemma1,
}

fn default_draws() -> usize {
    5
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepTask {
    /// Regenerates a dictionary per cell; the loaded dictionary is used otherwise.
    #[serde(default)]
    pub construction: Option<SweepConstruction>,
    pub k: Vec<usize>,
    pub g: Vec<usize>,
    pub b: Vec<usize>,
    #[serde(default = "default_draws")]
    pub draws: usize,
}

impl SweepTask {
    fn execute(&self, d: Option<&Dictionary>, label: &str, env: &Env) -> Result<Outcome> {
        let source = match (self.construction, d) {
            (Some(SweepConstruction::Equiangular), _) => SweepSource::Equiangular,
            (Some(SweepConstruction::Lemma1), _) => SweepSource::Lemma1,
            (None, Some(d)) => SweepSource::Fixed {
                name: label.to_string(),
                dictionary: d.clone(),
            },
            (None, None) => bail!("sweep needs --construction or a dictionary"),
        };
        let spec = SweepSpec {
            source,
            ks: self.k.clone(),
            gs: self.g.clone(),
            bs: self.b.clone(),
            draws: self.draws,
            seed: env.seed,
        };
        let rows = sweep(&spec, &env.tol, env.jobs)?;
        let mut buf = Vec::new();
        write_csv(&rows, &mut buf)?;
        Ok(Outcome {
            text: String::from_utf8(buf).context("CSV output is not UTF-8")?,
            pass: true,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use sparsecert::dictionary::generate;
    use serde_json::Value;
    use sparsecert::{Construction, Matrix};

    fn env() -> Env {
        Env {
            tol: Tolerances::default(),
            seed: 3,
            jobs: None,
        }
    }

    fn check(cert: Cert) -> CheckTask {
        serde_json::from_value(json!({ "cert": cert_name(cert), "k": 3, "g": 1, "b": 1 })).unwrap()
    }

    fn cert_name(cert: Cert) -> &'static str {
        match cert {
            Cert::Mu => "mu",
            Cert::Bounds => "bounds",
            Cert::ThetaNsp => "theta-nsp",
            _ => unreachable!(),
        }
    }

    #[test]
    fn mu_on_equiangular_is_not_satisfied() {
        let (d, _) = generate::<f64>(&Construction::Equiangular { k: 3, g: 1, b: 1 }).unwrap();
        let r = check(Cert::Mu).reports(&d, &Tolerances::default()).unwrap();
        assert_eq!(r.len(), 1);
        assert!((r[0].value - 0.2).abs() < 1e-12);
        assert_eq!(r[0].satisfied, Some(false));
    }

    #[test]
    fn bounds_skip_out_of_domain_formulas() {
        let (d, _) = generate::<f64>(&Construction::Equiangular { k: 3, g: 1, b: 1 }).unwrap();
        let names: Vec<String> = check(Cert::Bounds)
            .reports(&d, &Tolerances::default())
            .unwrap()
            .into_iter()
            .map(|r| r.name)
            .collect();
        assert!(names.contains(&"coherence_main".to_string()));
        assert!(names.len() >= 3);
    }

    #[test]
    fn theta_nsp_reports_one_per_p() {
        let (d, _) = generate::<f64>(&Construction::Equiangular { k: 3, g: 1, b: 1 }).unwrap();
        let r = check(Cert::ThetaNsp).reports(&d, &Tolerances::default()).unwrap();
        assert_eq!(r.len(), 3);
        assert!(r.iter().all(|r| (r.value - 1.0).abs() < 1e-9 && r.exact));
    }

    #[test]
    fn solve_identity_stops_after_support() {
        let d = Dictionary::build(Matrix::identity(5), false).unwrap();
        let task: Task = serde_json::from_value(json!({ "solve": { "true_support": [1, 3] } })).unwrap();
        let out = task.execute(Some(&d), "identity", &env()).unwrap();
        assert!(out.pass);
        let v: Value = serde_json::from_str(&out.text).unwrap();
        assert_eq!(v["trace"]["iterations"].as_array().unwrap().len(), 2);
        assert_eq!(v["success"], json!(true));
    }

    #[test]
    fn relax_derives_x_star_from_y() {
        let d = Dictionary::build(Matrix::identity(3), false).unwrap();
        let task: Task = serde_json::from_value(json!({ "relax": { "y": [1.0, 0.0, 2.0] } })).unwrap();
        let out = task.execute(Some(&d), "identity", &env()).unwrap();
        assert!(out.pass);
        let v: Value = serde_json::from_str(&out.text).unwrap();
        assert_eq!(v["x_star"], json!([1.0, 0.0, 2.0]));
        assert_eq!(v["verdicts"][0]["verdict"]["status"], json!("unique_minimizer"));
    }

    #[test]
    fn unknown_task_fields_rejected() {
        let r: std::result::Result<Task, _> = serde_json::from_value(json!({ "check": { "cert": "mu", "kk": 2 } }));
        assert!(r.is_err());
    }
}
