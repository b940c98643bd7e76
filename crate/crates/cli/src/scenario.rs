//! Scenario files: a dictionary source, one task, and run settings.

use std::fs::File;
use std::io::BufReader;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context as _, Result};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use sparsecert::bank::gaussian_dictionary;
use sparsecert::dictionary::generate;
use sparsecert::linalg::read_matrix_csv;
use sparsecert::{Construction, Dictionary, Matrix, SupportSet, Tolerances};

use crate::tasks::Task;

#[derive(Clone, Debug, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum DictionarySource {
    File {
        path: PathBuf,
        #[serde(default)]
        normalize: bool,
    },
    Generate(Construction),
    Identity {
        n: usize,
    },
    Gaussian {
        rows: usize,
        cols: usize,
        seed: u64,
    },
    Inline {
        rows: Vec<Vec<f64>>,
        #[serde(default)]
        normalize: bool,
    },
}

/// What `gen` writes next to a dictionary.
#[derive(Clone, Debug, Serialize)]
pub struct Sidecar {
    pub construction: String,
    pub params: Value,
    pub mu: f64,
    /// `null` when every column subset is independent.
    pub spark: Option<usize>,
    pub kernel_dim: usize,
    #[serde(rename = "canonical_Q")]
    pub canonical_q: Option<SupportSet>,
    #[serde(rename = "canonical_Qstar")]
    pub canonical_qstar: Option<SupportSet>,
}

fn load_matrix_csv(path: &Path) -> Result<Matrix> {
    let f = File::open(path).with_context(|| format!("opening {}", path.display()))?;
    read_matrix_csv(BufReader::new(f)).with_context(|| format!("reading {}", path.display()))
}

impl DictionarySource {
    /// Short name used as the sweep `construction` column.
    pub fn label(&self) -> String {
        match self {
            DictionarySource::File { path, .. } => path
                .file_stem()
                .map_or_else(|| "file".into(), |s| s.to_string_lossy().into_owned()),
            DictionarySource::Generate(spec) => spec.name().into(),
            DictionarySource::Identity { .. } => "identity".into(),
            DictionarySource::Gaussian { .. } => "gaussian".into(),
            DictionarySource::Inline { .. } => "inline".into(),
        }
    }

    /// Relative file paths resolve against `base`.
    pub fn load(&self, base: &Path, tol: &Tolerances) -> Result<(Dictionary, Sidecar)> {
        let (d, params, canonical) = match self {
            DictionarySource::File { path, normalize } => {
                let full = base.join(path);
                let m = load_matrix_csv(&full)?;
                let d = Dictionary::build(m, *normalize).with_context(|| format!("dictionary {}", full.display()))?;
                (d, json!({ "path": path }), None)
            }
            DictionarySource::Generate(spec) => {
                let (d, meta) = generate::<f64>(spec)?;
                let params = serde_json::to_value(spec)?["params"].clone();
                (d, params, Some((meta.canonical_q, meta.canonical_qstar)))
            }
            DictionarySource::Identity { n } => {
                if *n == 0 {
                    bail!("identity dictionary needs n >= 1");
                }
                (Dictionary::build(Matrix::identity(*n), false)?, json!({ "n": n }), None)
            }
            DictionarySource::Gaussian { rows, cols, seed } => (
                gaussian_dictionary(*rows, *cols, *seed)?,
                json!({ "rows": rows, "cols": cols, "seed": seed }),
                None,
            ),
            DictionarySource::Inline { rows, normalize } => {
                (Dictionary::build(Matrix::from_rows(rows)?, *normalize)?, json!({}), None)
            }
        };
        let (canonical_q, canonical_qstar) = canonical.unwrap_or((None, None));
        let sidecar = Sidecar {
            construction: self.label(),
            params,
            mu: d.mutual_coherence(),
            spark: d.spark(tol).finite(),
            kernel_dim: d.kernel_basis(tol).cols(),
            canonical_q,
            canonical_qstar,
        };
        Ok((d, sidecar))
    }
}

/// Tolerance overrides; unset fields keep their defaults.
#[derive(Clone, Copy, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TolOverrides {
    pub rank_tol: Option<f64>,
    pub tie_tol: Option<f64>,
    pub cert_tol: Option<f64>,
}

impl TolOverrides {
    /// `self` wins over `under` field by field.
    pub fn over(self, under: TolOverrides) -> TolOverrides {
        TolOverrides {
            rank_tol: self.rank_tol.or(under.rank_tol),
            tie_tol: self.tie_tol.or(under.tie_tol),
            cert_tol: self.cert_tol.or(under.cert_tol),
        }
    }

    pub fn resolve(self) -> Result<Tolerances> {
        let d = Tolerances::default();
        Ok(Tolerances::new(
            self.rank_tol.unwrap_or(d.rank_tol),
            self.tie_tol.unwrap_or(d.tie_tol),
            self.cert_tol.unwrap_or(d.cert_tol),
        )?)
    }
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    #[serde(default)]
    pub dictionary: Option<DictionarySource>,
    pub task: Task,
    #[serde(default)]
    pub seed: Option<u64>,
    #[serde(default)]
    pub output: Option<PathBuf>,
    #[serde(default)]
    pub jobs: Option<usize>,
    #[serde(default)]
    pub tolerances: TolOverrides,
}

impl Scenario {
    pub fn parse(text: &str, origin: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| {
            let line_text = text.lines().nth(e.line().saturating_sub(1)).unwrap_or("").trim_end();
            anyhow::anyhow!("{origin}:{}:{}: {e}\n  | {line_text}", e.line(), e.column())
        })
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        Self::parse(&text, &path.display().to_string())
    }
}
