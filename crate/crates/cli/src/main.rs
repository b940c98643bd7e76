//! `sparsecert` command line: dictionary generation, greedy runs, certificate
//! checks, relaxation verdicts, claim reproduction and sweeps.
//!
//! Exit status: 0 on pass, 1 on a certified failure, 2 on any error.

mod scenario;
mod tasks;

use std::fs::File;
use std::io::{BufReader, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context as _, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use log::info;
use serde_json::json;

use sparsecert::linalg::{read_vector_csv, write_matrix_csv};
use sparsecert::{Construction, Dictionary, SupportSet, TiePolicy, Variant};

use scenario::{DictionarySource, Scenario, TolOverrides};
use tasks::{Cert, CheckTask, Env, Outcome, RelaxTask, ReproduceTask, SolveTask, SweepConstruction, SweepTask, Task};

#[derive(Parser, Debug)]
#[command(name = "sparsecert", version, about = "Recovery certificates for sparse approximation with a partially known support")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct Global {
    /// Relative eigenvalue cutoff for rank decisions.
    #[arg(long, global = true)]
    tol_rank: Option<f64>,
    /// Width within which greedy scores tie.
    #[arg(long, global = true)]
    tol_tie: Option<f64>,
    /// Width used when judging certificates against thresholds.
    #[arg(long, global = true)]
    tol_cert: Option<f64>,
    /// Worker threads for sweeps.
    #[arg(long, global = true)]
    jobs: Option<usize>,
    /// Seed for coefficient draws and random dictionaries.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output file; stdout when absent.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

impl Global {
    fn tolerances(&self) -> TolOverrides {
        TolOverrides {
            rank_tol: self.tol_rank,
            tie_tol: self.tol_tie,
            cert_tol: self.tol_cert,
        }
    }
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Generate a dictionary as CSV plus a JSON metadata sidecar.
    Gen(GenArgs),
    /// Run OMP or OLS from an initial support and print the trace.
    Solve(SolveArgs),
    /// Evaluate a recovery certificate.
    Check(CheckArgs),
    /// Decide whether a vector uniquely minimizes the informed lp objective.
    Relax(RelaxArgs),
    /// Re-run registered claims; all of them when none are named.
    Reproduce(ReproduceArgs),
    /// Tabulate certificates and greedy success rates over a (k, g, b) grid.
    Sweep(SweepArgs),
    /// Execute a JSON scenario file.
    Run { scenario: PathBuf },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum GenKind {
    Equiangular,
    Example1,
    Lemma1,
    Example2,
    Example3,
    Identity,
    Gaussian,
}

#[derive(Args, Debug)]
struct GenArgs {
    construction: GenKind,
    #[arg(long)]
    k: Option<usize>,
    #[arg(long)]
    g: Option<usize>,
    #[arg(long)]
    b: Option<usize>,
    /// Atom count (example1, identity, gaussian).
    #[arg(long)]
    n: Option<usize>,
    /// Row count (gaussian); `n - 1` by default.
    #[arg(long)]
    rows: Option<usize>,
    #[arg(long)]
    gamma: Option<f64>,
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    mu: Option<f64>,
}

fn need<T>(v: Option<T>, flag: &str, kind: GenKind) -> Result<T> {
    v.with_context(|| format!("{kind:?} needs --{flag}"))
}

impl GenArgs {
    fn source(&self, seed: u64) -> Result<DictionarySource> {
        let c = self.construction;
        let kgb = || -> Result<(usize, usize, usize)> { Ok((need(self.k, "k", c)?, self.g.unwrap_or(0), self.b.unwrap_or(0))) };
        let spec = match c {
            GenKind::Equiangular => {
                let (k, g, b) = kgb()?;
                Construction::Equiangular { k, g, b }
            }
            GenKind::Lemma1 => {
                let (k, g, b) = kgb()?;
                Construction::Lemma1 { k, g, b }
            }
            GenKind::Example1 => Construction::Example1 {
                n: need(self.n, "n", c)?,
                gamma: need(self.gamma, "gamma", c)?,
            },
            GenKind::Example2 => Construction::Example2 {
                k: need(self.k, "k", c)?,
                g: self.g.unwrap_or(0),
                alpha: need(self.alpha, "alpha", c)?,
            },
            GenKind::Example3 => Construction::Example3 {
                k: need(self.k, "k", c)?,
                mu: need(self.mu, "mu", c)?,
            },
            GenKind::Identity => return Ok(DictionarySource::Identity { n: need(self.n, "n", c)? }),
            GenKind::Gaussian => {
                let cols = need(self.n, "n", c)?;
                return Ok(DictionarySource::Gaussian {
                    rows: self.rows.unwrap_or(cols.saturating_sub(1).max(1)),
                    cols,
                    seed,
                });
            }
        };
        Ok(DictionarySource::Generate(spec))
    }
}

#[derive(Args, Debug)]
struct DictArg {
    /// Dictionary CSV, one row per line.
    #[arg(long)]
    dict: PathBuf,
    /// Rescale columns to unit norm instead of rejecting them.
    #[arg(long)]
    normalize: bool,
}

impl DictArg {
    fn source(&self) -> DictionarySource {
        DictionarySource::File {
            path: self.dict.clone(),
            normalize: self.normalize,
        }
    }
}

#[derive(Args, Debug)]
struct SolveArgs {
    #[command(flatten)]
    dict: DictArg,
    /// Signal CSV; drawn on --true-support when absent.
    #[arg(long)]
    y: Option<PathBuf>,
    #[arg(long, default_value = "")]
    init_support: SupportSet,
    #[arg(long, default_value = "omp")]
    variant: Variant,
    #[arg(long, default_value = "adversarial")]
    ties: TiePolicy,
    #[arg(long)]
    true_support: Option<SupportSet>,
    #[arg(long)]
    max_iter: Option<usize>,
}

#[derive(Args, Debug)]
struct CheckArgs {
    #[command(flatten)]
    dict: DictArg,
    #[arg(long, value_enum)]
    cert: Cert,
    #[arg(long)]
    k: Option<usize>,
    #[arg(long)]
    g: Option<usize>,
    #[arg(long)]
    b: Option<usize>,
    /// Comma-separated exponents for theta-nsp.
    #[arg(long, value_delimiter = ',', default_value = "0,0.5,1")]
    p: Vec<f64>,
    /// Both variants when absent.
    #[arg(long)]
    variant: Option<Variant>,
    #[arg(long = "Qstar", alias = "qstar")]
    q_star: Option<SupportSet>,
    #[arg(long = "Q", alias = "q", default_value = "")]
    q: SupportSet,
    /// Projection size for prip and proj-coherence.
    #[arg(long)]
    l: Option<usize>,
    /// Block size for prip.
    #[arg(long)]
    size: Option<usize>,
    /// RIC order; k + b + 1 by default.
    #[arg(long)]
    order: Option<usize>,
}

#[derive(Args, Debug)]
struct RelaxArgs {
    #[command(flatten)]
    dict: DictArg,
    #[arg(long)]
    y: Option<PathBuf>,
    #[arg(long = "Q", alias = "q", default_value = "")]
    q: SupportSet,
    #[arg(long, value_delimiter = ',', default_value = "0,0.5,1")]
    p: Vec<f64>,
    /// Candidate minimizer CSV; the sparsest informed solution of y when absent.
    #[arg(long)]
    x_star: Option<PathBuf>,
    /// Draw x* on this support when neither --y nor --x-star is given.
    #[arg(long)]
    true_support: Option<SupportSet>,
    #[arg(long)]
    max_extra: Option<usize>,
}

#[derive(Args, Debug)]
struct ReproduceArgs {
    claims: Vec<String>,
    /// Include wall-clock runtimes (makes output non-deterministic).
    #[arg(long)]
    timings: bool,
}

#[derive(Args, Debug)]
struct SweepArgs {
    #[arg(long, value_enum, conflicts_with = "dict")]
    construction: Option<SweepConstruction>,
    #[arg(long)]
    dict: Option<PathBuf>,
    #[arg(long)]
    normalize: bool,
    #[arg(long, value_delimiter = ',', required = true)]
    k: Vec<usize>,
    #[arg(long, value_delimiter = ',', required = true)]
    g: Vec<usize>,
    #[arg(long, value_delimiter = ',', required = true)]
    b: Vec<usize>,
    #[arg(long, default_value_t = 5)]
    draws: usize,
}

fn read_vector(path: &Path) -> Result<Vec<f64>> {
    let f = File::open(path).with_context(|| format!("opening {}", path.display()))?;
    read_vector_csv(BufReader::new(f)).with_context(|| format!("reading {}", path.display()))
}

fn emit(text: &str, out: Option<&Path>) -> Result<()> {
    match out {
        Some(path) => std::fs::write(path, text).with_context(|| format!("writing {}", path.display())),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(text.as_bytes())?;
            stdout.flush()?;
            Ok(())
        }
    }
}

fn gen(args: &GenArgs, env: &Env, out: Option<&Path>) -> Result<bool> {
    let source = args.source(env.seed)?;
    let (d, sidecar) = source.load(Path::new("."), &env.tol)?;
    match out {
        Some(path) => {
            let f = File::create(path).with_context(|| format!("creating {}", path.display()))?;
            write_matrix_csv(d.atoms(), std::io::BufWriter::new(f))?;
            let side_path = path.with_extension("json");
            let mut text = serde_json::to_string_pretty(&sidecar)?;
            text.push('\n');
            std::fs::write(&side_path, text).with_context(|| format!("writing {}", side_path.display()))?;
            info!("wrote {} and {}", path.display(), side_path.display());
        }
        None => {
            let rows: Vec<&[f64]> = (0..d.rows()).map(|i| d.atoms().row(i)).collect();
            let mut text = serde_json::to_string_pretty(&json!({ "metadata": sidecar, "rows": rows }))?;
            text.push('\n');
            emit(&text, None)?;
        }
    }
    Ok(true)
}

fn load(source: &DictionarySource, base: &Path, env: &Env) -> Result<Dictionary> {
    Ok(source.load(base, &env.tol)?.0)
}

fn run_task(task: &Task, source: Option<&DictionarySource>, base: &Path, env: &Env) -> Result<Outcome> {
    let d = match source {
        Some(s) => Some(load(s, base, env)?),
        None if task.needs_dictionary() => bail!("this task needs a dictionary"),
        None => None,
    };
    let label = source.map_or_else(String::new, |s| s.label());
    task.execute(d.as_ref(), &label, env)
}

fn execute(cli: Cli) -> Result<bool> {
    let g = &cli.global;
    let mut env = Env {
        tol: g.tolerances().resolve()?,
        seed: g.seed.unwrap_or(0),
        jobs: g.jobs,
    };
    let here = Path::new(".");
    let out = g.out.as_deref();
    let outcome = match &cli.command {
        Command::Gen(a) => return gen(a, &env, out),
        Command::Solve(a) => {
            let task = Task::Solve(SolveTask {
                y: a.y.as_deref().map(read_vector).transpose()?,
                init_support: a.init_support.clone(),
                variant: a.variant,
                ties: a.ties,
                true_support: a.true_support.clone(),
                max_iterations: a.max_iter,
            });
            run_task(&task, Some(&a.dict.source()), here, &env)?
        }
        Command::Check(a) => {
            let task = Task::Check(CheckTask {
                cert: a.cert,
                k: a.k,
                g: a.g,
                b: a.b,
                p: a.p.clone(),
                variant: a.variant,
                q_star: a.q_star.clone(),
                q: a.q.clone(),
                l: a.l,
                size: a.size,
                order: a.order,
            });
            run_task(&task, Some(&a.dict.source()), here, &env)?
        }
        Command::Relax(a) => {
            let task = Task::Relax(RelaxTask {
                y: a.y.as_deref().map(read_vector).transpose()?,
                x_star: a.x_star.as_deref().map(read_vector).transpose()?,
                true_support: a.true_support.clone(),
                q: a.q.clone(),
                p: a.p.clone(),
                max_extra: a.max_extra,
            });
            run_task(&task, Some(&a.dict.source()), here, &env)?
        }
        Command::Reproduce(a) => {
            let task = Task::Reproduce(ReproduceTask {
                claims: a.claims.clone(),
                timings: a.timings,
            });
            run_task(&task, None, here, &env)?
        }
        Command::Sweep(a) => {
            let task = Task::Sweep(SweepTask {
                construction: a.construction,
                k: a.k.clone(),
                g: a.g.clone(),
                b: a.b.clone(),
                draws: a.draws,
            });
            let source = a.dict.as_ref().map(|p| DictionarySource::File {
                path: p.clone(),
                normalize: a.normalize,
            });
            if source.is_none() && a.construction.is_none() {
                bail!("sweep needs --construction or --dict");
            }
            run_task(&task, source.as_ref(), here, &env)?
        }
        Command::Run { scenario } => {
            let s = Scenario::read(scenario)?;
            let base = scenario.parent().unwrap_or(here);
            env.tol = g.tolerances().over(s.tolerances).resolve()?;
            env.seed = g.seed.or(s.seed).unwrap_or(0);
            env.jobs = g.jobs.or(s.jobs);
            let outcome = run_task(&s.task, s.dictionary.as_ref(), base, &env)?;
            let target = out.map(Path::to_path_buf).or_else(|| s.output.as_ref().map(|p| base.join(p)));
            emit(&outcome.text, target.as_deref())?;
            return Ok(outcome.pass);
        }
    };
    emit(&outcome.text, out)?;
    Ok(outcome.pass)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("SPARSECERT_LOG", "warn")).init();
    let cli = Cli::parse();
    match execute(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

