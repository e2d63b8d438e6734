//! Versioned JSON interchange: the problem file read by every command and
//! the report file written by explore/solve/crosscheck. Exact quantities
//! are strings in canonical rational form, so the exact sections of two
//! reports can be compared byte for byte; float sections carry their
//! tolerance explicitly.

use mfpop_core::kacmoody::{CartanData, WeightPairings};
use mfpop_core::population::{CheckResult, CheckStatus, GraphExport};
use mfpop_core::rat::{format_rational, parse_rational};
use mfpop_core::tuplegen::ProblemData;
use num_rational::BigRational;
use serde::{Deserialize, Serialize};

pub const PROBLEM_SCHEMA: &str = "mfpop.problem.v1";
pub const REPORT_SCHEMA: &str = "mfpop.report.v1";

/// Input parsing and input validation fail differently at the CLI: parse
/// problems exit 2, domain violations exit 1.
#[derive(Debug)]
pub enum FileError {
    Parse(String),
    Domain(String),
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
pub struct ProblemFile {
    #[serde(default)]
    pub schema: Option<String>,
    pub cartan: Vec<Vec<i64>>,
    pub symmetrizer: Vec<i64>,
    /// Marked points, canonical rationals.
    pub points: Vec<String>,
    /// Coroot pairings of each weight.
    pub weights: Vec<Vec<i64>>,
    /// Optional Gram matrix of the weights, canonical rationals.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gram: Option<Vec<Vec<String>>>,
}

impl ProblemFile {
    pub fn from_problem(p: &ProblemData) -> Self {
        ProblemFile {
            schema: Some(PROBLEM_SCHEMA.to_string()),
            cartan: p.cartan().matrix().to_vec(),
            symmetrizer: p.cartan().symmetrizer_vec().to_vec(),
            points: p.points().iter().map(format_rational).collect(),
            weights: p.weights().iter().map(|w| w.0.clone()).collect(),
            gram: p.gram().map(|g| {
                g.iter()
                    .map(|row| row.iter().map(format_rational).collect())
                    .collect()
            }),
        }
    }

    /// Builds validated problem data; parse failures and domain failures
    /// are distinguished for the exit-code contract.
    pub fn to_problem(&self) -> Result<ProblemData, FileError> {
        if let Some(schema) = &self.schema {
            if schema != PROBLEM_SCHEMA {
                return Err(FileError::Parse(format!(
                    "unsupported schema {schema:?}, expected {PROBLEM_SCHEMA:?}"
                )));
            }
        }
        let points: Vec<BigRational> = self
            .points
            .iter()
            .map(|s| parse_rational(s).map_err(FileError::Parse))
            .collect::<Result<_, _>>()?;
        let gram: Option<Vec<Vec<BigRational>>> = match &self.gram {
            None => None,
            Some(rows) => Some(
                rows.iter()
                    .map(|row| {
                        row.iter()
                            .map(|s| parse_rational(s).map_err(FileError::Parse))
                            .collect::<Result<Vec<_>, _>>()
                    })
                    .collect::<Result<_, _>>()?,
            ),
        };
        let cartan = CartanData::validate(self.cartan.clone(), self.symmetrizer.clone())
            .map_err(|e| FileError::Domain(e.to_string()))?;
        let weights = self
            .weights
            .iter()
            .map(|w| WeightPairings(w.clone()))
            .collect();
        ProblemData::build(cartan, points, weights, gram)
            .map_err(|e| FileError::Domain(e.to_string()))
    }

    /// Canonical echo: rationals reduced, schema pinned.
    pub fn canonicalize(&self) -> Result<Self, FileError> {
        let p = self.to_problem()?;
        Ok(ProblemFile::from_problem(&p))
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ReportFile {
    pub schema: String,
    pub tool_version: String,
    pub problem: ProblemFile,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub population: Option<PopulationSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub verification: Option<Vec<CheckJson>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub solver: Option<SolverSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub crosscheck: Option<CrosscheckSection>,
}

impl ReportFile {
    pub fn new(problem: ProblemFile) -> Self {
        ReportFile {
            schema: REPORT_SCHEMA.to_string(),
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            problem,
            seed: None,
            population: None,
            verification: None,
            solver: None,
            crosscheck: None,
        }
    }

    pub fn to_json(&self) -> String {
        let mut out = serde_json::to_string_pretty(self).expect("report serialization");
        out.push('\n');
        out
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PopulationSection {
    pub depth: usize,
    pub max_component_degree: usize,
    pub c_samples: Vec<String>,
    pub node_count: usize,
    pub charge: i64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mu: Option<Vec<String>>,
    pub degree_vectors: Vec<Vec<usize>>,
    pub minimal_degree_vectors: Vec<Vec<usize>>,
    pub graph: GraphExport,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CheckJson {
    pub name: String,
    pub status: String,
    pub details: String,
}

impl CheckJson {
    pub fn from_check(check: &CheckResult) -> Self {
        CheckJson {
            name: check.name.clone(),
            status: match check.status {
                CheckStatus::Pass => "pass".to_string(),
                CheckStatus::Fail => "fail".to_string(),
                CheckStatus::Inconclusive => "inconclusive".to_string(),
            },
            details: check.details.clone(),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SolverSection {
    pub tol: f64,
    pub max_iter: usize,
    pub starts: usize,
    pub runs: Vec<SolveRunJson>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SolveRunJson {
    pub k: Vec<usize>,
    pub charge: i64,
    pub stats: StatsJson,
    pub points: Vec<PointJson>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct StatsJson {
    pub starts: usize,
    pub converged: usize,
    pub diverged: usize,
    pub discarded_nongeneric: usize,
    pub deduplicated: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PointJson {
    /// Coordinates grouped by direction, complex numbers as [re, im].
    pub coords: Vec<Vec<[f64; 2]>>,
    pub residual: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CrosscheckSection {
    pub match_tol: f64,
    pub runs: Vec<CrossRunJson>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CrossRunJson {
    pub k: Vec<usize>,
    pub charge: i64,
    pub in_root_orbit: bool,
    pub matched: usize,
    pub unmatched: usize,
    pub points: Vec<CrossPointJson>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CrossPointJson {
    #[serde(flatten)]
    pub point: PointJson,
    pub matched: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub node: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub direction: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub c: Option<[f64; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fit_residual: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub descent_steps: Option<usize>,
}
