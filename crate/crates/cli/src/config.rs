//! JSON experiment configuration. Complex numbers are `[re, im]` arrays.

use std::path::{Path, PathBuf};

use num_complex::Complex64;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use serde_json::Value;
use singular_nls::coeffs::{admissible_existence, CoefficientPair};
use singular_nls::grid::{read_snapshot, BoundaryCondition, Domain, Field, Grid};
use singular_nls::solver::{Profile, ProblemSpec, SolverConfig};

use crate::error::{CliError, Context};

fn default_name() -> String {
    "experiment".into()
}

fn default_samples() -> usize {
    singular_nls::energy::DEFAULT_SAMPLES
}

fn default_out() -> PathBuf {
    PathBuf::from("out")
}

fn yes() -> bool {
    true
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default = "default_name")]
    pub name: String,
    pub problem: ProblemConfig,
    #[serde(default)]
    pub solver: SolverConfig,
    pub analysis: AnalysisConfig,
    #[serde(default)]
    pub outputs: OutputConfig,
    #[serde(default)]
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemConfig {
    pub a: Complex64,
    pub b: Complex64,
    pub m: f64,
    #[serde(default)]
    pub c: Complex64,
    pub domain: Domain,
    pub h: f64,
    pub bc: BoundaryCondition,
    pub forcing: ForcingSpec,
}

/// An analytic profile, or `{"file": "path"}` pointing at a field snapshot
/// on the same grid. Relative paths resolve against the config file.
#[derive(Debug, Clone, PartialEq)]
pub enum ForcingSpec {
    Analytic(Profile),
    File(PathBuf),
}

impl Serialize for ForcingSpec {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            ForcingSpec::Analytic(p) => p.serialize(s),
            ForcingSpec::File(path) => {
                #[derive(Serialize)]
                struct F<'a> {
                    file: &'a Path,
                }
                F { file: path }.serialize(s)
            }
        }
    }
}

impl<'de> Deserialize<'de> for ForcingSpec {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        use serde::de::Error;
        let v = Value::deserialize(d)?;
        if let Some(obj) = v.as_object() {
            if obj.contains_key("file") {
                if obj.len() != 1 {
                    return Err(D::Error::custom("a file forcing takes only the \"file\" key"));
                }
                let path = obj["file"].as_str().ok_or_else(|| D::Error::custom("\"file\" must be a string"))?;
                return Ok(ForcingSpec::File(PathBuf::from(path)));
            }
        }
        Profile::deserialize(v).map(ForcingSpec::Analytic).map_err(D::Error::custom)
    }
}

/// A fixed trace constant, or `"calibrate"` to estimate it on B(0, rho1).
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CEffSource {
    Fixed(f64),
    Calibrate,
}

impl Default for CEffSource {
    fn default() -> Self {
        CEffSource::Fixed(1.0)
    }
}

impl Serialize for CEffSource {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            CEffSource::Fixed(x) => s.serialize_f64(*x),
            CEffSource::Calibrate => s.serialize_str("calibrate"),
        }
    }
}

impl<'de> Deserialize<'de> for CEffSource {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        use serde::de::Error;
        match Value::deserialize(d)? {
            Value::Number(n) => n.as_f64().map(CEffSource::Fixed).ok_or_else(|| D::Error::custom("bad number")),
            Value::String(s) if s == "calibrate" => Ok(CEffSource::Calibrate),
            other => Err(D::Error::custom(format!("c_eff must be a number or \"calibrate\", got {other}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AnalysisConfig {
    pub x0: Vec<Vec<f64>>,
    pub rho0: f64,
    pub rho1: f64,
    #[serde(default = "default_samples")]
    pub rho_samples: usize,
    #[serde(default)]
    pub c_eff: CEffSource,
    /// Support threshold; defaults to max(10·eps_min^m, 100·newton_tol).
    #[serde(default)]
    pub threshold: Option<f64>,
    /// Also check supp u ⊂ K(ε) for this ε.
    #[serde(default)]
    pub covering_eps: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    #[serde(default = "default_out")]
    pub dir: PathBuf,
    /// Write the solution snapshot.
    #[serde(default = "yes")]
    pub field: bool,
}

impl Default for OutputConfig {
    fn default() -> Self {
        OutputConfig { dir: default_out(), field: true }
    }
}

pub fn read_input(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| CliError::ConfigInvalid(format!("cannot read {}: {e}", path.display())))
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = read_input(path)?;
        Self::from_json(&text).map_err(|source| CliError::Json { path: path.into(), source })
    }

    /// Canonical serialization, used for the input hash.
    pub fn canonical_json(&self) -> String {
        serde_json::to_string(self).expect("config serializes")
    }

    pub fn pair(&self) -> Result<CoefficientPair, CliError> {
        let p = &self.problem;
        CoefficientPair::with_potential(p.a, p.b, p.c, p.m).context("coefficients")
    }

    pub fn grid(&self) -> Result<Grid, CliError> {
        Grid::new(self.problem.domain.clone(), self.problem.h).context("grid")
    }

    pub fn forcing_path(&self, base: &Path) -> Option<PathBuf> {
        match &self.problem.forcing {
            ForcingSpec::File(p) => Some(base.join(p)),
            ForcingSpec::Analytic(_) => None,
        }
    }

    /// Every check that does not need the solution. `base` is the
    /// directory relative file paths resolve against.
    pub fn validate(&self, base: &Path) -> Result<(), CliError> {
        let bad = |msg: String| Err(CliError::ConfigInvalid(msg));
        let pair = self.pair()?;
        if !admissible_existence(&pair) {
            return bad(format!(
                "coefficients a = {}, b = {} violate condition (ab): no lambda makes both \
                 Re a + lambda Im a and Re b + lambda Im b positive",
                pair.a, pair.b
            ));
        }
        if pair.has_potential() {
            return bad(format!("potential c = {} is not supported by the localization pipeline", pair.c));
        }
        self.solver.validate().context("solver")?;
        let grid = self.grid()?;
        if self.problem.bc == BoundaryCondition::None {
            return bad("bc must be dirichlet or neumann".into());
        }
        if let ForcingSpec::Analytic(p) = &self.problem.forcing {
            p.validate().context("forcing")?;
        }
        if let Some(path) = self.forcing_path(base) {
            if !path.is_file() {
                return bad(format!("forcing file {} does not exist", path.display()));
            }
        }
        let a = &self.analysis;
        if !(a.rho0 > 0.0 && a.rho0 < a.rho1 && a.rho1.is_finite()) {
            return bad(format!("need 0 < rho0 < rho1, got rho0 = {}, rho1 = {}", a.rho0, a.rho1));
        }
        if a.x0.is_empty() {
            return bad("analysis.x0 lists no centres".into());
        }
        for x in &a.x0 {
            if x.len() != grid.axes() || !x.iter().all(|v| v.is_finite()) {
                return bad(format!("centre {x:?} needs {} finite coordinates", grid.axes()));
            }
        }
        if a.rho_samples < 2 {
            return bad("rho_samples must be at least 2".into());
        }
        if let CEffSource::Fixed(c) = a.c_eff {
            if !(c > 0.0 && c.is_finite()) {
                return bad(format!("c_eff must be positive, got {c}"));
            }
        }
        if let Some(t) = a.threshold {
            if !(t > 0.0 && t.is_finite()) {
                return bad(format!("threshold must be positive, got {t}"));
            }
        }
        if let Some(e) = a.covering_eps {
            if !(e > 0.0 && e.is_finite()) {
                return bad(format!("covering_eps must be positive, got {e}"));
            }
        }
        Ok(())
    }

    pub fn forcing(&self, base: &Path) -> Result<Field, CliError> {
        let grid = self.grid()?;
        let bc = self.problem.bc;
        match &self.problem.forcing {
            ForcingSpec::Analytic(p) => p.sample(&grid, bc).context("forcing"),
            ForcingSpec::File(rel) => {
                let path = base.join(rel);
                let text = read_input(&path)?;
                let f = read_snapshot(&text).context(format!("forcing file {}", path.display()))?;
                if f.grid != grid {
                    return Err(CliError::ConfigInvalid(format!(
                        "forcing file {} lives on a different grid",
                        path.display()
                    )));
                }
                Ok(Field { bc, ..f })
            }
        }
    }

    pub fn problem_spec(&self, base: &Path) -> Result<ProblemSpec, CliError> {
        ProblemSpec::new(self.pair()?, self.problem.bc, self.forcing(base)?).context("problem")
    }
}
