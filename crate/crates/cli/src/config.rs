//! Experiment configuration: one self-contained JSON document per run.
//!
//! ```json
//! {
//!   "experiment": "sweep",
//!   "model": { "kind": "classical-ising", "n": 3,
//!              "couplings": [[0, 1, 1.0], [1, 2, -0.5]], "fields": [0.2, 0.0, -0.1] },
//!   "eps": 0.25,
//!   "seeds": { "start": 0, "count": 5 },
//!   "format": "csv"
//! }
//! ```
//!
//! Centers, bandwidths and temperatures are in normalized units: the model's
//! spectrum is mapped affinely into `[1/8, 7/8]` before filtering.

use std::fmt;
use std::path::{Path, PathBuf};

use eigenfilter::hamiltonians::{build_model, IsingParams, ModelSpec};
use eigenfilter::quantum::HermitianOperator;
use serde::de::{self, Deserializer};
use serde::Deserialize;

use crate::error::{CliError, CliResult};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentKind {
    Filter,
    Sweep,
    Naive,
    Jordan,
    Qma,
    Thermal,
    Bounds,
}

impl ExperimentKind {
    pub const ALL: [ExperimentKind; 7] = [
        ExperimentKind::Filter,
        ExperimentKind::Sweep,
        ExperimentKind::Naive,
        ExperimentKind::Jordan,
        ExperimentKind::Qma,
        ExperimentKind::Thermal,
        ExperimentKind::Bounds,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ExperimentKind::Filter => "filter",
            ExperimentKind::Sweep => "sweep",
            ExperimentKind::Naive => "naive",
            ExperimentKind::Jordan => "jordan",
            ExperimentKind::Qma => "qma",
            ExperimentKind::Thermal => "thermal",
            ExperimentKind::Bounds => "bounds",
        }
    }
}

impl fmt::Display for ExperimentKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum OutputFormat {
    #[default]
    Csv,
    #[serde(alias = "json-lines")]
    #[value(alias = "json-lines")]
    Jsonl,
}

#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum ModelConfig {
    /// `couplings` entries are `[i, j, J_ij]` with `i < j`.
    ClassicalIsing {
        n: usize,
        #[serde(default)]
        couplings: Vec<(usize, usize, f64)>,
        fields: Vec<f64>,
    },
    TransverseIsing {
        n: usize,
        coupling: f64,
        field: f64,
    },
    RandomTwoLocal {
        n: usize,
        seed: u64,
    },
    /// Diagonal Hamiltonian with the given energies; the length must be a
    /// power of two.
    Diagonal {
        energies: Vec<f64>,
    },
}

impl ModelConfig {
    pub fn build(&self) -> CliResult<HermitianOperator> {
        let spec = match self {
            ModelConfig::ClassicalIsing {
                n,
                couplings,
                fields,
            } => ModelSpec::ClassicalIsing(IsingParams::new(
                *n,
                couplings.iter().map(|&(i, j, v)| ((i, j), v)),
                fields.clone(),
            )?),
            ModelConfig::TransverseIsing { n, coupling, field } => ModelSpec::TransverseIsing {
                n: *n,
                coupling: *coupling,
                field: *field,
            },
            ModelConfig::RandomTwoLocal { n, seed } => {
                ModelSpec::RandomTwoLocal { n: *n, seed: *seed }
            }
            ModelConfig::Diagonal { energies } => {
                return Ok(HermitianOperator::from_real_diagonal(energies, "diagonal")?)
            }
        };
        Ok(build_model(&spec)?)
    }
}

/// A center list: one value, several values, or `"auto"` for the
/// experiment's default grid.
#[derive(Clone, Debug, PartialEq)]
pub enum Centers {
    Auto,
    Values(Vec<f64>),
}

impl<'de> Deserialize<'de> for Centers {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            One(f64),
            Many(Vec<f64>),
            Word(String),
        }
        match Raw::deserialize(d)? {
            Raw::One(x) => Ok(Centers::Values(vec![x])),
            Raw::Many(v) => Ok(Centers::Values(v)),
            Raw::Word(w) if w == "auto" => Ok(Centers::Auto),
            Raw::Word(w) => Err(de::Error::custom(format!(
                "expected a number, a list of numbers or \"auto\", found \"{w}\""
            ))),
        }
    }
}

/// Seeds as an explicit list or a half-open range `start .. start + count`.
#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(untagged)]
pub enum Seeds {
    List(Vec<u64>),
    Range { start: u64, count: u64 },
}

impl Seeds {
    pub fn expand(&self, offset: u64) -> Vec<u64> {
        match self {
            Seeds::List(v) => v.iter().map(|s| s.wrapping_add(offset)).collect(),
            Seeds::Range { start, count } => (0..*count)
                .map(|i| start.wrapping_add(i).wrapping_add(offset))
                .collect(),
        }
    }
}

impl Default for Seeds {
    fn default() -> Self {
        Seeds::List(vec![0])
    }
}

#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(untagged)]
pub enum VerifierConfig {
    Fixture(VerifierFixture),
    Matrix(MatrixVerifier),
}

/// Matrix file in the verifier text format; a relative path is resolved
/// against the config file's directory.
#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MatrixVerifier {
    pub matrix_file: PathBuf,
    pub witness_qubits: usize,
    pub scratchpad_qubits: usize,
    pub completeness: f64,
    pub soundness: f64,
}

#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(tag = "fixture", rename_all = "kebab-case", deny_unknown_fields)]
pub enum VerifierFixture {
    Identity,
    Rotation { theta: f64 },
}

#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    /// Optional; must match the subcommand when present.
    pub experiment: Option<ExperimentKind>,
    pub model: Option<ModelConfig>,
    pub mu: Option<Centers>,
    pub eps: Option<f64>,
    /// Overrides the automatic choice of phase bits (also the naive demo's
    /// readout length).
    pub bits: Option<usize>,
    pub repetitions: Option<usize>,
    #[serde(default)]
    pub seeds: Seeds,
    pub max_retries: Option<usize>,
    pub output: Option<PathBuf>,
    pub format: Option<OutputFormat>,
    /// `naive`: acceptance threshold on the measured phase.
    pub threshold: Option<f64>,
    /// `jordan`: random projector pair dimension and ranks.
    pub dim: Option<usize>,
    pub rank_q: Option<usize>,
    pub rank_r: Option<usize>,
    /// `qma`, optionally `jordan`.
    pub verifier: Option<VerifierConfig>,
    /// `thermal`.
    pub temperature: Option<f64>,
    pub dos_seed: Option<u64>,
    pub dos_step: Option<f64>,
    /// `bounds`: inclusive phase-bit range and grid size per `k`.
    pub bits_range: Option<(usize, usize)>,
    pub grid_points: Option<usize>,
    pub lower_samples: Option<usize>,

    /// Directory of the config file, for relative paths.
    #[serde(skip)]
    pub base_dir: PathBuf,
    #[serde(skip)]
    source: String,
}

/// Reports a parse error at the line of the offending key when the failing
/// field is known; serde positions value errors just past the value.
fn config_parse_error(text: &str, e: serde_path_to_error::Error<serde_json::Error>) -> CliError {
    let inner = e.inner();
    let reason = inner.to_string();
    let reason = reason
        .rsplit_once(" at line ")
        .map_or(reason.as_str(), |(head, _)| head)
        .to_owned();
    let key = e.path().iter().rev().find_map(|seg| match seg {
        serde_path_to_error::Segment::Map { key } => Some(key.clone()),
        _ => None,
    });
    let line = key.as_ref().and_then(|k| {
        let needle = format!("\"{k}\"");
        text.lines()
            .take(inner.line())
            .enumerate()
            .filter(|(_, l)| l.contains(&needle))
            .map(|(i, _)| i + 1)
            .last()
    });
    match (e.path().to_string().as_str(), line) {
        (".", _) | (_, None) => CliError::config(format!(
            "line {}, column {}: {reason}",
            inner.line(),
            inner.column()
        )),
        (path, Some(line)) => CliError::config(format!("`{path}` (line {line}): {reason}")),
    }
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> CliResult<Self> {
        let de = &mut serde_json::Deserializer::from_str(text);
        let mut config: ExperimentConfig =
            serde_path_to_error::deserialize(de).map_err(|e| config_parse_error(text, e))?;
        config.source = text.to_owned();
        Ok(config)
    }

    pub fn load(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::config(format!("cannot read {}: {e}", path.display())))?;
        let mut config = Self::from_json(&text)
            .map_err(|e| CliError::config(format!("{}: {}", path.display(), e.message())))?;
        config.base_dir = path.parent().map(Path::to_path_buf).unwrap_or_default();
        Ok(config)
    }

    /// `field (line L)` when the key appears in the source text.
    pub fn locate(&self, field: &str) -> String {
        let needle = format!("\"{field}\"");
        match self.source.lines().position(|l| l.contains(&needle)) {
            Some(i) => format!("`{field}` (line {})", i + 1),
            None => format!("`{field}`"),
        }
    }

    pub fn require<T: Clone>(
        &self,
        value: &Option<T>,
        field: &str,
        kind: ExperimentKind,
    ) -> CliResult<T> {
        value.clone().ok_or_else(|| {
            CliError::config(format!("missing field `{field}` required by `{kind}`"))
        })
    }

    pub fn invalid(&self, field: &str, why: impl fmt::Display) -> CliError {
        CliError::config(format!("{}: {why}", self.locate(field)))
    }

    pub fn check_kind(&self, kind: ExperimentKind) -> CliResult<()> {
        match self.experiment {
            Some(k) if k != kind => Err(self.invalid(
                "experiment",
                format!("config is for `{k}` but the subcommand is `{kind}`"),
            )),
            _ => Ok(()),
        }
    }

    pub fn model(&self, kind: ExperimentKind) -> CliResult<HermitianOperator> {
        let model = self.require(&self.model, "model", kind)?;
        model
            .build()
            .map_err(|e| self.invalid("model", e.message()))
    }
}
