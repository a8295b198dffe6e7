//! Scenario configuration, result records and the scripted studies.
//!
//! A run takes an [`ExperimentConfig`], produces a [`ResultRecord`] whose
//! pass/fail flags are derived from certified bounds only, and optionally
//! writes it atomically to disk. Records carry a SHA-256 digest of the
//! canonical JSON of their inputs so reruns can be matched up.

mod cli;
mod ellipse;
mod studies;

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::time::Instant;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::{Error, Result};

pub use cli::cli_main;
pub use ellipse::EllipseOutcome;

pub const DEFAULT_SEED: u64 = 0x5eed;

/// The scenario and its parameters, tagged by `"scenario"` in JSON.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "scenario", rename_all = "kebab-case")]
pub enum Scenario {
    /// ε→π regularization of the identity on `euclidean(n)`.
    Identity { n: usize, kmax: usize },
    /// Strictness of the tensor-radius lower bound on `l1(m) ⊕₂ euclidean(m)`.
    Radius { m: usize },
    /// Random complex maps `linf(2) -> l1(2)` against their real counterparts.
    HfpComplex { trials: usize },
    /// The explicit failure on the non-strictly convex pair `linf(2)`, `l1(2)`.
    HfpNonstrict,
    /// Ellipse between `T(K)` and `L` in the plane.
    Ellipse {
        /// Vertices of `K`, closed under negation.
        k_vertices: Vec<Vec<f64>>,
        /// Functionals `f` with `L = {x : |f(x)| <= 1}`.
        l_facets: Vec<Vec<f64>>,
        /// Row-major 2×2 matrix.
        t: Vec<Vec<f64>>,
    },
}

impl Scenario {
    pub fn name(&self) -> &'static str {
        match self {
            Scenario::Identity { .. } => "identity",
            Scenario::Radius { .. } => "radius",
            Scenario::HfpComplex { .. } => "hfp-complex",
            Scenario::HfpNonstrict => "hfp-nonstrict",
            Scenario::Ellipse { .. } => "ellipse",
        }
    }

    /// Tolerance used when the config leaves it unset.
    pub fn default_tolerance(&self) -> f64 {
        match self {
            Scenario::HfpComplex { .. } => 5e-3,
            _ => 1e-5,
        }
    }
}

fn default_seed() -> u64 {
    DEFAULT_SEED
}

/// A complete, serializable description of one run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    #[serde(flatten)]
    pub scenario: Scenario,
    #[serde(default = "default_seed")]
    pub seed: u64,
    /// Absolute tolerance for the scenario's assertions (relative for ratios).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tolerance: Option<f64>,
    /// Net resolution for nets over curved or circled balls.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub net_delta: Option<f64>,
    /// Where to write the record. Not part of the input digest.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
}

impl ExperimentConfig {
    pub fn new(scenario: Scenario) -> Self {
        ExperimentConfig { scenario, seed: DEFAULT_SEED, tolerance: None, net_delta: None, output: None }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let c: ExperimentConfig = serde_json::from_str(text)?;
        c.validate()?;
        Ok(c)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn tolerance(&self) -> f64 {
        self.tolerance.unwrap_or_else(|| self.scenario.default_tolerance())
    }

    pub fn validate(&self) -> Result<()> {
        if let Some(t) = self.tolerance {
            if !(t > 0.0 && t.is_finite()) {
                return Err(Error::arg(format!("tolerance must be positive, got {t}")));
            }
        }
        if let Some(d) = self.net_delta {
            if !(d > 0.0 && d < 1.0) {
                return Err(Error::arg(format!("net_delta must lie in (0, 1), got {d}")));
            }
        }
        match &self.scenario {
            Scenario::Identity { n, kmax } => {
                if *n == 0 || *kmax == 0 {
                    return Err(Error::arg("identity needs n >= 1 and kmax >= 1"));
                }
            }
            Scenario::Radius { m } if *m == 0 => return Err(Error::arg("radius needs m >= 1")),
            Scenario::HfpComplex { trials } if *trials == 0 => {
                return Err(Error::arg("hfp-complex needs at least one trial"))
            }
            Scenario::Ellipse { k_vertices, l_facets, t } => {
                ellipse::check_inputs(k_vertices, l_facets, t)?;
            }
            _ => {}
        }
        Ok(())
    }

    /// SHA-256 of the canonical JSON of the inputs, as lowercase hex.
    pub fn digest(&self) -> Result<String> {
        let mut inputs = self.clone();
        inputs.output = None;
        let value = canonicalize(serde_json::to_value(&inputs)?);
        let bytes = serde_json::to_vec(&value)?;
        Ok(Sha256::digest(&bytes).iter().map(|b| format!("{b:02x}")).collect())
    }
}

/// Recursively sorts object keys so the serialization is independent of
/// field order.
fn canonicalize(v: serde_json::Value) -> serde_json::Value {
    use serde_json::Value;
    match v {
        Value::Object(map) => {
            let sorted: BTreeMap<String, Value> = map.into_iter().map(|(k, v)| (k, canonicalize(v))).collect();
            Value::Object(sorted.into_iter().collect())
        }
        Value::Array(a) => Value::Array(a.into_iter().map(canonicalize).collect()),
        other => other,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Bounds {
    pub lower: f64,
    pub upper: f64,
}

impl From<&crate::NormEstimate> for Bounds {
    fn from(e: &crate::NormEstimate) -> Self {
        Bounds { lower: e.lower, upper: e.upper }
    }
}

/// Values, certified bounds and flags produced by a scenario.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Outputs {
    pub values: BTreeMap<String, f64>,
    pub bounds: BTreeMap<String, Bounds>,
    /// Assertions; the run passes when all of them hold.
    pub checks: BTreeMap<String, bool>,
    /// Findings that are reported but not asserted.
    pub flags: BTreeMap<String, bool>,
    pub notes: Vec<String>,
    #[serde(default)]
    pub data: serde_json::Value,
}

impl Outputs {
    pub(crate) fn value(&mut self, key: &str, v: f64) {
        self.values.insert(key.to_string(), v);
    }

    pub(crate) fn bound(&mut self, key: &str, b: impl Into<Bounds>) {
        self.bounds.insert(key.to_string(), b.into());
    }

    pub(crate) fn check(&mut self, key: &str, ok: bool) {
        self.checks.insert(key.to_string(), ok);
    }

    pub(crate) fn flag(&mut self, key: &str, on: bool) {
        self.flags.insert(key.to_string(), on);
    }

    pub fn passed(&self) -> bool {
        self.checks.values().all(|&c| c)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultRecord {
    pub scenario: String,
    pub inputs_digest: String,
    pub config: ExperimentConfig,
    pub outputs: Outputs,
    pub passed: bool,
    pub wall_time_s: f64,
    pub tool_version: String,
}

impl ResultRecord {
    /// Names of the checks that failed.
    pub fn failures(&self) -> Vec<&str> {
        self.outputs.checks.iter().filter(|(_, &ok)| !ok).map(|(k, _)| k.as_str()).collect()
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

/// Writes `contents` to a temporary sibling of `path` and renames it into
/// place, so readers never observe a partial file.
pub fn write_atomic(path: &Path, contents: &[u8]) -> Result<()> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
    std::fs::create_dir_all(dir)?;
    let name = path
        .file_name()
        .ok_or_else(|| Error::arg(format!("output path {} has no file name", path.display())))?;
    let tmp = dir.join(format!(".{}.{}.tmp", name.to_string_lossy(), std::process::id()));
    std::fs::write(&tmp, contents)?;
    std::fs::rename(&tmp, path).inspect_err(|_| {
        let _ = std::fs::remove_file(&tmp);
    })?;
    Ok(())
}

/// Runs a scenario and writes the record to `config.output` when set.
pub fn run(config: &ExperimentConfig) -> Result<ResultRecord> {
    config.validate()?;
    let start = Instant::now();
    let tol = config.tolerance();
    let outputs = match &config.scenario {
        Scenario::Identity { n, kmax } => studies::identity(*n, *kmax, config.seed, tol)?,
        Scenario::Radius { m } => studies::radius(*m, tol)?,
        Scenario::HfpComplex { trials } => {
            studies::hfp_complex(*trials, config.seed, tol, config.net_delta.unwrap_or(1e-2))?
        }
        Scenario::HfpNonstrict => studies::hfp_nonstrict(tol)?,
        Scenario::Ellipse { k_vertices, l_facets, t } => {
            let t = ellipse::matrix(t)?;
            ellipse::sandwich(k_vertices, l_facets, &t, tol)?
        }
    };
    let record = ResultRecord {
        scenario: config.scenario.name().to_string(),
        inputs_digest: config.digest()?,
        config: config.clone(),
        passed: outputs.passed(),
        outputs,
        wall_time_s: start.elapsed().as_secs_f64(),
        tool_version: env!("CARGO_PKG_VERSION").to_string(),
    };
    if let Some(path) = &config.output {
        write_atomic(path, record.to_json()?.as_bytes())?;
    }
    Ok(record)
}

/// ε→π report for the identity on `euclidean(n)` up to `kmax`.
pub fn run_identity_regularization(n: usize, kmax: usize) -> Result<ResultRecord> {
    run(&ExperimentConfig::new(Scenario::Identity { n, kmax }))
}

/// Certified lower bounds for `d_X · γ₂*(id_X)` on `X = l1(m) ⊕₂ euclidean(m)`.
pub fn run_tensor_radius_strictness(m: usize) -> Result<ResultRecord> {
    run(&ExperimentConfig::new(Scenario::Radius { m }))
}

pub fn run_hfp_complex(trials: usize, seed: u64) -> Result<ResultRecord> {
    run(&ExperimentConfig::new(Scenario::HfpComplex { trials }).with_seed(seed))
}

pub fn run_hfp_nonstrict() -> Result<ResultRecord> {
    run(&ExperimentConfig::new(Scenario::HfpNonstrict))
}

/// Searches for an ellipse `E` with `T(K) ⊆ E ⊆ L`.
///
/// Fails with [`Error::NotContained`] unless `T(K) ⊆ L`.
pub fn run_ellipse_sandwich(k_vertices: &[Vec<f64>], l_facets: &[Vec<f64>], t: &DMatrix<f64>) -> Result<ResultRecord> {
    let rows = (0..t.nrows()).map(|i| t.row(i).iter().copied().collect()).collect();
    run(&ExperimentConfig::new(Scenario::Ellipse {
        k_vertices: k_vertices.to_vec(),
        l_facets: l_facets.to_vec(),
        t: rows,
    }))
}

#[cfg(test)]
mod tests;
