use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::time::Instant;

use num_complex::Complex64;
use serde::Serialize;
use sha2::{Digest, Sha256};
use singular_nls::calibrate::{default_family, trace_constant_estimate, TraceEstimate};
use singular_nls::coeffs::{coercivity_constants, uniqueness_case, CoercivityCertificate, UniquenessCase};
use singular_nls::energy::{
    compute_profile, profile_csv, sample_radii, tol_id_for, verify_identities, verify_inequality,
};
use singular_nls::grid::{write_snapshot, Field};
use singular_nls::localization::{
    default_threshold, localization_verdict, support_containment, CoveringReport, Verdict, VerdictOptions,
};
use singular_nls::solver::{
    continuation_solve, AprioriReport, Branch, ContinuationStep, ProblemSpec, SolveResult, SolverConfig,
};

use crate::config::{CEffSource, ExperimentConfig};
use crate::error::{io_err, CliError, Context, EXIT_OK, EXIT_VIOLATION};

pub const MANIFEST: &str = "manifest.json";
pub const TIMINGS: &str = "timings.json";
pub const VERDICT: &str = "verdict.json";
pub const FIELD: &str = "field.snap";

pub fn sha256_hex(bytes: &[u8]) -> String {
    format!("{:x}", Sha256::digest(bytes))
}

#[derive(Debug, Clone, Serialize)]
pub struct SolveSummary {
    pub converged: bool,
    pub residual_norm: f64,
    pub forcing_norm: f64,
    pub eps_final: f64,
    pub newton_iterations_total: usize,
    pub existence_admissible: bool,
    pub uniqueness: Option<UniquenessCase>,
    pub branch: Branch,
    pub apriori: AprioriReport,
    pub history: Vec<ContinuationStep>,
}

impl From<&SolveResult> for SolveSummary {
    fn from(r: &SolveResult) -> Self {
        SolveSummary {
            converged: r.converged,
            residual_norm: r.residual_norm,
            forcing_norm: r.forcing_norm,
            eps_final: r.eps_final,
            newton_iterations_total: r.newton_iterations_total,
            existence_admissible: r.existence_admissible,
            uniqueness: r.uniqueness,
            branch: r.branch.clone(),
            apriori: r.apriori,
            history: r.history.clone(),
        }
    }
}

pub fn solve(spec: &ProblemSpec, cfg: &SolverConfig) -> Result<SolveResult, CliError> {
    continuation_solve(spec, cfg).context("solve")
}

#[derive(Debug, Clone, Serialize)]
pub struct CentreAnalysis {
    pub x0: Vec<f64>,
    pub profile_csv: String,
    pub identity_max_re: f64,
    pub identity_max_im: f64,
    pub tol_id: f64,
    pub identities_ok: bool,
    pub min_margin: f64,
    pub margin_ok: bool,
    #[serde(skip)]
    pub csv: String,
}

/// Energy profile, identity residuals and margin at one centre.
pub fn analyze_centre(
    u: &Field,
    f: &Field,
    pair: &singular_nls::coeffs::CoefficientPair,
    cert: &CoercivityCertificate,
    x0: &[f64],
    rho1: f64,
    samples: usize,
    file: String,
) -> Result<CentreAnalysis, CliError> {
    let ctx = || format!("profile at {x0:?}");
    let rho = sample_radii(u.grid.h(), rho1, samples).context(ctx())?;
    let profile = compute_profile(u, f, x0, &rho, pair.m).context(ctx())?;
    let ids = verify_identities(&profile, pair);
    let margins = verify_inequality(&profile, cert, true);
    let tol = tol_id_for(u).context(ctx())?;
    Ok(CentreAnalysis {
        x0: x0.to_vec(),
        profile_csv: file,
        identity_max_re: ids.max_re,
        identity_max_im: ids.max_im,
        tol_id: tol,
        identities_ok: ids.max() <= tol,
        min_margin: margins.min_margin,
        margin_ok: margins.holds(tol),
        csv: profile_csv(&profile, &ids, &margins),
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct CEffReport {
    pub source: &'static str,
    pub value: f64,
    pub estimate: Option<TraceEstimate>,
}

pub fn resolve_c_eff(cfg: &ExperimentConfig) -> Result<CEffReport, CliError> {
    match cfg.analysis.c_eff {
        CEffSource::Fixed(value) => Ok(CEffReport { source: "fixed", value, estimate: None }),
        CEffSource::Calibrate => {
            let rho = cfg.analysis.rho1;
            let n = cfg.problem.domain.dimension;
            let est = trace_constant_estimate(cfg.problem.m, n, rho, &default_family(rho)).context("calibrate")?;
            Ok(CEffReport { source: "calibrate", value: est.c_eff, estimate: Some(est) })
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct CentreReport {
    #[serde(flatten)]
    pub analysis: CentreAnalysis,
    pub verdict: Verdict,
}

#[derive(Debug, Clone, Serialize)]
pub struct RunReport {
    pub name: String,
    pub a: Complex64,
    pub b: Complex64,
    pub m: f64,
    pub uniqueness: Option<UniquenessCase>,
    pub certificate: CoercivityCertificate,
    pub solve: SolveSummary,
    pub c_eff: CEffReport,
    pub threshold: f64,
    pub centres: Vec<CentreReport>,
    pub covering: Option<CoveringReport>,
    /// No centre has hypothesis_ok without observed_ok.
    pub sound: bool,
}

impl RunReport {
    pub fn exit_code(&self) -> u8 {
        if self.sound {
            EXIT_OK
        } else {
            EXIT_VIOLATION
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Manifest {
    pub name: String,
    pub seed: u64,
    pub input_sha256: String,
    pub versions: BTreeMap<&'static str, &'static str>,
    /// File name to sha256, excluding this manifest and the timings file.
    pub artifacts: BTreeMap<String, String>,
    pub timings: &'static str,
    pub exit_code: u8,
}

#[derive(Debug, Clone, Serialize)]
pub struct Timings {
    pub solve_s: f64,
    pub analysis_s: f64,
    pub total_s: f64,
}

/// Result of one pipeline run: the report and every artifact, not yet on disk.
#[derive(Debug, Clone)]
pub struct RunOutput {
    pub report: RunReport,
    pub files: BTreeMap<String, String>,
    pub manifest: Manifest,
    pub timings: Timings,
}

impl RunOutput {
    pub fn exit_code(&self) -> u8 {
        self.report.exit_code()
    }

    pub fn write(&self, dir: &Path) -> Result<(), CliError> {
        std::fs::create_dir_all(dir).map_err(io_err(dir))?;
        let mut all: Vec<(String, String)> = self.files.clone().into_iter().collect();
        all.push((MANIFEST.into(), to_json(&self.manifest)));
        all.push((TIMINGS.into(), to_json(&self.timings)));
        for (name, body) in all {
            let path = dir.join(&name);
            std::fs::write(&path, body).map_err(io_err(&path))?;
        }
        Ok(())
    }
}

pub fn to_json<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("report serializes");
    s.push('\n');
    s
}

/// admissibility → constants → solve → profile → verdict.
pub fn run_experiment(cfg: &ExperimentConfig, base: &Path) -> Result<RunOutput, CliError> {
    let start = Instant::now();
    cfg.validate(base)?;
    let pair = cfg.pair()?;
    let cert = coercivity_constants(&pair).context("coercivity constants")?;
    let spec = cfg.problem_spec(base)?;
    let c_eff = resolve_c_eff(cfg)?;

    let t_solve = Instant::now();
    let res = solve(&spec, &cfg.solver)?;
    let solve_s = t_solve.elapsed().as_secs_f64();

    let t_analysis = Instant::now();
    let a = &cfg.analysis;
    let threshold = a.threshold.unwrap_or_else(|| default_threshold(&cfg.solver, pair.m));
    let opts = VerdictOptions { c_eff: c_eff.value, samples: a.rho_samples, threshold: Some(threshold), ..Default::default() };
    let mut files = BTreeMap::new();
    let mut centres = Vec::new();
    for (i, x0) in a.x0.iter().enumerate() {
        let name = format!("profile_{i}.csv");
        let analysis = analyze_centre(&res.u, &spec.forcing, &pair, &cert, x0, a.rho1, a.rho_samples, name.clone())?;
        let verdict = localization_verdict(&res, &spec, &cfg.solver, &cert, x0, a.rho0, a.rho1, &opts)
            .context(format!("verdict at {x0:?}"))?;
        files.insert(name, analysis.csv.clone());
        centres.push(CentreReport { analysis, verdict });
    }
    let covering = match a.covering_eps {
        Some(eps) => Some(support_containment(&res.u, &spec.forcing, eps, threshold).context("covering")?),
        None => None,
    };
    let analysis_s = t_analysis.elapsed().as_secs_f64();

    let sound = centres.iter().all(|c| c.verdict.sound());
    let report = RunReport {
        name: cfg.name.clone(),
        a: pair.a,
        b: pair.b,
        m: pair.m,
        uniqueness: uniqueness_case(&pair),
        certificate: cert,
        solve: SolveSummary::from(&res),
        c_eff,
        threshold,
        centres,
        covering,
        sound,
    };
    files.insert(VERDICT.into(), to_json(&report));
    if cfg.outputs.field {
        files.insert(FIELD.into(), write_snapshot(&res.u));
    }
    let mut input = cfg.canonical_json().into_bytes();
    if let Some(path) = cfg.forcing_path(base) {
        input.extend(std::fs::read(&path).map_err(io_err(&path))?);
    }
    let manifest = Manifest {
        name: cfg.name.clone(),
        seed: cfg.seed,
        input_sha256: sha256_hex(&input),
        versions: BTreeMap::from([
            ("singular-nls", singular_nls::VERSION),
            ("singular-nls-cli", env!("CARGO_PKG_VERSION")),
        ]),
        artifacts: files.iter().map(|(k, v)| (k.clone(), sha256_hex(v.as_bytes()))).collect(),
        timings: TIMINGS,
        exit_code: report.exit_code(),
    };
    Ok(RunOutput {
        report,
        files,
        manifest,
        timings: Timings { solve_s, analysis_s, total_s: start.elapsed().as_secs_f64() },
    })
}

/// Run several configs concurrently. With more than one config each run
/// writes to `out/<name>`; names must be distinct.
pub fn run_batch(
    configs: &[(ExperimentConfig, PathBuf)],
    out: &Path,
) -> Result<Vec<(String, Result<u8, CliError>)>, CliError> {
    use rayon::prelude::*;
    let mut names: Vec<&str> = configs.iter().map(|(c, _)| c.name.as_str()).collect();
    names.sort_unstable();
    if let Some(w) = names.windows(2).find(|w| w[0] == w[1]) {
        return Err(CliError::ConfigInvalid(format!("two configs share the name {:?}", w[0])));
    }
    let single = configs.len() == 1;
    Ok(configs
        .par_iter()
        .map(|(cfg, base)| {
            let dir = if single { out.to_path_buf() } else { out.join(&cfg.name) };
            let status = run_experiment(cfg, base).and_then(|o| o.write(&dir).map(|_| o.exit_code()));
            (cfg.name.clone(), status)
        })
        .collect())
}
