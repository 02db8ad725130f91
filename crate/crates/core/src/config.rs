//! JSON scenario configuration.
//!
//! Complex numbers are written either as a plain number or as a two-element
//! `[re, im]` array; matrices are row-major nested arrays. Unknown keys are
//! rejected.
//!
//! ```json
//! {
//!   "name": "conservative",
//!   "hamiltonian": { "kind": "constant", "matrix": [[1, 0], [0, -1]] },
//!   "initial_state": [1, 0],
//!   "initial_observable": [[0, 1], [1, 0]],
//!   "t_final": 1.0
//! }
//! ```

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::algebra::{ComplexMatrix, HermitianMatrix, StateVector, C64};
use crate::error::Error;
use crate::path::{HamiltonianPath, Method, PathKind, Polynomial, Sign};
use crate::scenario::{random_hermitian, random_state, rng_from_seed, Scenario, DEFAULT_STEPS};

/// A configuration problem located by its JSON path.
#[derive(Debug, Clone, PartialEq)]
pub struct ConfigError {
    pub path: String,
    pub message: String,
}

impl ConfigError {
    fn new(path: impl Into<String>, message: impl Into<String>) -> Self {
        Self {
            path: path.into(),
            message: message.into(),
        }
    }
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.path.is_empty() || self.path == "." {
            write!(f, "{}", self.message)
        } else {
            write!(f, "{}: {}", self.path, self.message)
        }
    }
}

impl std::error::Error for ConfigError {}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ComplexEntry {
    Pair([f64; 2]),
    Real(f64),
}

impl ComplexEntry {
    fn value(self) -> C64 {
        match self {
            ComplexEntry::Pair([re, im]) => C64::new(re, im),
            ComplexEntry::Real(re) => C64::new(re, 0.0),
        }
    }

    fn from_value(z: C64) -> Self {
        ComplexEntry::Pair([z.re, z.im])
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum RandomTag {
    #[serde(rename = "random")]
    Random,
}

/// Explicit entries or `"random"` (drawn from the scenario seed).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum StateSpec {
    Random(RandomTag),
    Entries(Vec<ComplexEntry>),
}

/// Explicit rows or `"random"` (a seeded random Hermitian matrix).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum MatrixSpec {
    Random(RandomTag),
    Rows(Vec<Vec<ComplexEntry>>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TermConfig {
    pub coefficients: Vec<f64>,
    pub matrix: Vec<Vec<ComplexEntry>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum HamiltonianConfig {
    Constant {
        matrix: Vec<Vec<ComplexEntry>>,
    },
    Commuting {
        coefficients: Vec<f64>,
        matrix: Vec<Vec<ComplexEntry>>,
    },
    PauliSum {
        terms: Vec<TermConfig>,
    },
    Sampled {
        times: Vec<f64>,
        matrices: Vec<Vec<Vec<ComplexEntry>>>,
    },
    /// Constant Hamiltonian drawn from the scenario seed.
    RandomHermitian {
        dim: usize,
    },
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub csv: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub json: Option<String>,
}

fn default_name() -> String {
    "scenario".to_string()
}

fn default_sign() -> i32 {
    1
}

fn default_steps() -> usize {
    DEFAULT_STEPS
}

fn default_method() -> String {
    Method::default().name().to_string()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    #[serde(default = "default_name")]
    pub name: String,
    pub hamiltonian: HamiltonianConfig,
    #[serde(default = "default_sign")]
    pub sign: i32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub initial_state: Option<StateSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub initial_observable: Option<MatrixSpec>,
    pub t_final: f64,
    #[serde(default = "default_steps")]
    pub steps: usize,
    #[serde(default = "default_method")]
    pub method: String,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub outputs: OutputConfig,
}

/// Parses and validates a configuration document.
pub fn parse_config(text: &str) -> Result<ScenarioConfig, ConfigError> {
    let de = &mut serde_json::Deserializer::from_str(text);
    let config: ScenarioConfig = serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        let inner = e.into_inner();
        ConfigError::new(path, inner.to_string())
    })?;
    config.to_scenario()?;
    Ok(config)
}

fn matrix_from_rows(rows: &[Vec<ComplexEntry>], path: &str) -> Result<ComplexMatrix, ConfigError> {
    let rows: Vec<Vec<C64>> = rows
        .iter()
        .map(|r| r.iter().map(|z| z.value()).collect())
        .collect();
    ComplexMatrix::from_rows(&rows).map_err(|e| ConfigError::new(path, e.to_string()))
}

fn hermitian_from_rows(rows: &[Vec<ComplexEntry>], path: &str) -> Result<HermitianMatrix, ConfigError> {
    HermitianMatrix::new(matrix_from_rows(rows, path)?).map_err(|e| ConfigError::new(path, e.to_string()))
}

fn polynomial(coefficients: &[f64], path: &str) -> Result<Polynomial, ConfigError> {
    Polynomial::new(coefficients.to_vec()).map_err(|e| ConfigError::new(path, e.to_string()))
}

fn rows_of(m: &ComplexMatrix) -> Vec<Vec<ComplexEntry>> {
    m.to_rows()
        .into_iter()
        .map(|r| r.into_iter().map(ComplexEntry::from_value).collect())
        .collect()
}

impl ScenarioConfig {
    /// Resolves the document into a validated scenario. Random ingredients
    /// are drawn from `seed` in the order Hamiltonian, state, observable.
    pub fn to_scenario(&self) -> Result<Scenario, ConfigError> {
        let mut rng = rng_from_seed(self.seed);
        let sign = Sign::from_i32(self.sign)
            .ok_or_else(|| ConfigError::new("sign", format!("must be 1 or -1, got {}", self.sign)))?;
        let method: Method = self
            .method
            .parse()
            .map_err(|e: String| ConfigError::new("method", e))?;

        let kind = match &self.hamiltonian {
            HamiltonianConfig::Constant { matrix } => {
                PathKind::Constant(hermitian_from_rows(matrix, "hamiltonian.matrix")?)
            }
            HamiltonianConfig::Commuting {
                coefficients,
                matrix,
            } => PathKind::Commuting {
                coefficient: polynomial(coefficients, "hamiltonian.coefficients")?,
                generator: hermitian_from_rows(matrix, "hamiltonian.matrix")?,
            },
            HamiltonianConfig::PauliSum { terms } => PathKind::PauliSum(
                terms
                    .iter()
                    .enumerate()
                    .map(|(k, term)| {
                        Ok((
                            polynomial(&term.coefficients, &format!("hamiltonian.terms[{k}].coefficients"))?,
                            hermitian_from_rows(&term.matrix, &format!("hamiltonian.terms[{k}].matrix"))?,
                        ))
                    })
                    .collect::<Result<Vec<_>, ConfigError>>()?,
            ),
            HamiltonianConfig::Sampled { times, matrices } => PathKind::Sampled {
                times: times.clone(),
                values: matrices
                    .iter()
                    .enumerate()
                    .map(|(k, m)| hermitian_from_rows(m, &format!("hamiltonian.matrices[{k}]")))
                    .collect::<Result<Vec<_>, _>>()?,
            },
            HamiltonianConfig::RandomHermitian { dim } => {
                if !(1..=64).contains(dim) {
                    return Err(ConfigError::new("hamiltonian.dim", format!("must be in 1..=64, got {dim}")));
                }
                PathKind::Constant(random_hermitian(*dim, &mut rng))
            }
        };
        let path = HamiltonianPath::new(kind, sign).map_err(|e| ConfigError::new("hamiltonian", e.to_string()))?;
        let n = path.dim();

        let initial_state = match &self.initial_state {
            None => None,
            Some(StateSpec::Random(_)) => Some(random_state(n, &mut rng)),
            Some(StateSpec::Entries(entries)) => Some(
                StateVector::new(entries.iter().map(|z| z.value()).collect())
                    .map_err(|e| ConfigError::new("initial_state", e.to_string()))?,
            ),
        };
        let initial_observable = match &self.initial_observable {
            None => None,
            Some(MatrixSpec::Random(_)) => Some(random_hermitian(n, &mut rng).into_matrix()),
            Some(MatrixSpec::Rows(rows)) => Some(matrix_from_rows(rows, "initial_observable")?),
        };

        let scenario = Scenario {
            name: self.name.clone(),
            path,
            initial_state,
            initial_observable,
            t_final: self.t_final,
            steps: self.steps,
            method,
            seed: self.seed,
        };
        scenario.validate().map_err(|e| {
            let field = match e.root() {
                Error::DimensionMismatch { .. } | Error::ZeroState if self.initial_state.is_some() => {
                    "initial_state"
                }
                Error::DimensionMismatch { .. } => "initial_observable",
                Error::OutsideDomain { .. } => "t_final",
                Error::InvalidScenario(msg) if msg.starts_with("steps") => "steps",
                Error::InvalidScenario(msg) if msg.starts_with("t_final") => "t_final",
                _ => "",
            };
            ConfigError::new(field, e.to_string())
        })?;
        Ok(scenario)
    }

    /// Canonical configuration for an existing scenario (random ingredients
    /// are written out explicitly).
    pub fn from_scenario(s: &Scenario) -> Self {
        let hamiltonian = match s.path.kind() {
            PathKind::Constant(h) => HamiltonianConfig::Constant {
                matrix: rows_of(h.matrix()),
            },
            PathKind::Commuting {
                coefficient,
                generator,
            } => HamiltonianConfig::Commuting {
                coefficients: coefficient.coefficients().to_vec(),
                matrix: rows_of(generator.matrix()),
            },
            PathKind::PauliSum(terms) => HamiltonianConfig::PauliSum {
                terms: terms
                    .iter()
                    .map(|(f, p)| TermConfig {
                        coefficients: f.coefficients().to_vec(),
                        matrix: rows_of(p.matrix()),
                    })
                    .collect(),
            },
            PathKind::Sampled { times, values } => HamiltonianConfig::Sampled {
                times: times.clone(),
                matrices: values.iter().map(|v| rows_of(v.matrix())).collect(),
            },
        };
        Self {
            name: s.name.clone(),
            hamiltonian,
            sign: s.path.sign().as_i32(),
            initial_state: s
                .initial_state
                .as_ref()
                .map(|y| StateSpec::Entries(y.entries().into_iter().map(ComplexEntry::from_value).collect())),
            initial_observable: s.initial_observable.as_ref().map(|a| MatrixSpec::Rows(rows_of(a))),
            t_final: s.t_final,
            steps: s.steps,
            method: s.method.name().to_string(),
            seed: s.seed,
            outputs: OutputConfig::default(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }
}
