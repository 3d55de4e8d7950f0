use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use num_complex::Complex64;
use serde::Serialize;
use singular_nls::calibrate::{default_family, trace_constant_estimate};
use singular_nls::coeffs::{
    admissible_existence, admissible_uniqueness, atlas_classify, atlas_csv, coercivity_constants, feasible_interval,
    in_admissible_set, uniqueness_case, CoefficientPair, LambdaInterval, PlaneSampling, UniquenessCase,
};
use singular_nls::exponents::{exponent_set, rho_max, thresholds, RhoMaxInput, ThresholdInput, TauExponents};
use singular_nls::grid::{read_snapshot, write_snapshot};
use singular_nls_cli::config::read_input;
use singular_nls_cli::error::{io_err, Context};
use singular_nls_cli::experiment::{analyze_centre, solve, to_json, SolveSummary, FIELD, VERDICT};
use singular_nls_cli::{run_batch, CliError, ExperimentConfig, EXIT_INVALID, EXIT_OK, EXIT_VIOLATION};

#[derive(Parser)]
#[command(name = "snls", version, about = "Singular sublinear Schrödinger laboratory")]
struct Cli {
    /// Output directory; overrides `outputs.dir` in configs.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Overrides the config seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args, Clone)]
struct PairArgs {
    /// a as `re` or `re,im`.
    #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
    a: Complex64,
    #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
    b: Complex64,
    #[arg(long, default_value_t = 0.5)]
    m: f64,
}

#[derive(Subcommand)]
enum Cmd {
    /// Membership in the admissible set, condition (ab) and uniqueness.
    Admissible(PairArgs),
    /// Coercivity certificate (lambda, L, M).
    Constants(PairArgs),
    /// Exponents for (m, N), optionally at tau.
    Exponents {
        #[arg(long)]
        m: f64,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        tau: Option<f64>,
    },
    /// Localization radius.
    Rhomax {
        #[arg(long)]
        m: f64,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        rho0: f64,
        #[arg(long)]
        e0: f64,
        #[arg(long)]
        b0: f64,
        #[arg(long = "L")]
        l: f64,
        #[arg(long = "M")]
        mm: f64,
        #[arg(long, default_value_t = 1.0)]
        c_eff: f64,
    },
    /// Energy and forcing thresholds of the vanishing criterion.
    Thresholds {
        #[arg(long)]
        m: f64,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        rho0: f64,
        #[arg(long)]
        rho1: f64,
        #[arg(long = "L")]
        l: f64,
        #[arg(long = "M")]
        mm: f64,
        #[arg(long)]
        b1: f64,
        #[arg(long, default_value_t = 1.0)]
        c_eff: f64,
    },
    /// Solve the problem of a config; writes field.snap and solve.json.
    Solve { config: PathBuf },
    /// Energy profiles of a stored field at the config's centres.
    Analyze {
        config: PathBuf,
        #[arg(long)]
        field: PathBuf,
    },
    /// Solve and print the localization verdicts.
    Localize { config: PathBuf },
    /// Classify a grid of b values for fixed a.
    Atlas {
        #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
        a: Complex64,
        #[arg(long, default_value_t = 0.5)]
        m: f64,
        #[arg(long, value_parser = parse_range, allow_hyphen_values = true, default_value = "-2,2")]
        re: (f64, f64),
        #[arg(long, value_parser = parse_range, allow_hyphen_values = true, default_value = "-2,2")]
        im: (f64, f64),
        #[arg(long, default_value_t = 101)]
        n_re: usize,
        #[arg(long, default_value_t = 101)]
        n_im: usize,
    },
    /// Lower bound for the interpolation-trace constant.
    Calibrate {
        #[arg(long)]
        m: f64,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 1.0)]
        rho: f64,
    },
    /// Full pipeline for one or more configs, run concurrently.
    Run {
        #[arg(required = true)]
        configs: Vec<PathBuf>,
    },
}

fn parse_pair_of(s: &str) -> Result<(f64, Option<f64>), String> {
    let mut it = s.split(',').map(|t| t.trim().parse::<f64>().map_err(|e| format!("{t:?}: {e}")));
    let first = it.next().ok_or("empty value")??;
    let second = it.next().transpose()?;
    if it.next().is_some() {
        return Err(format!("expected at most two numbers, got {s:?}"));
    }
    Ok((first, second))
}

fn parse_complex(s: &str) -> Result<Complex64, String> {
    let (re, im) = parse_pair_of(s)?;
    Ok(Complex64::new(re, im.unwrap_or(0.0)))
}

fn parse_range(s: &str) -> Result<(f64, f64), String> {
    match parse_pair_of(s)? {
        (lo, Some(hi)) => Ok((lo, hi)),
        _ => Err(format!("expected lo,hi, got {s:?}")),
    }
}

#[derive(Serialize)]
struct AdmissibleReport {
    a_in_set: bool,
    b_in_set: bool,
    existence: bool,
    uniqueness: bool,
    uniqueness_case: Option<UniquenessCase>,
    lambda_interval: LambdaInterval,
}

#[derive(Serialize)]
struct ExponentReport {
    #[serde(flatten)]
    set: singular_nls::exponents::ExponentSet,
    tau_lower: f64,
    tau: Option<TauExponents>,
}

struct Ctx {
    out: Option<PathBuf>,
    seed: Option<u64>,
}

impl Ctx {
    fn load(&self, path: &Path) -> Result<(ExperimentConfig, PathBuf), CliError> {
        let mut cfg = ExperimentConfig::load(path)?;
        if let Some(s) = self.seed {
            cfg.seed = s;
        }
        let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
        cfg.validate(&base)?;
        Ok((cfg, base))
    }

    fn out_dir(&self, cfg: Option<&ExperimentConfig>) -> PathBuf {
        self.out.clone().or_else(|| cfg.map(|c| c.outputs.dir.clone())).unwrap_or_else(|| PathBuf::from("out"))
    }

    /// Print to stdout and, when --out is given, also write `<name>`.
    fn emit(&self, name: &str, body: &str) -> Result<(), CliError> {
        print!("{body}");
        if let Some(dir) = &self.out {
            write_file(dir, name, body)?;
        }
        Ok(())
    }
}

fn write_file(dir: &Path, name: &str, body: &str) -> Result<(), CliError> {
    std::fs::create_dir_all(dir).map_err(io_err(dir))?;
    let path = dir.join(name);
    std::fs::write(&path, body).map_err(io_err(&path))
}

fn pair_of(p: &PairArgs) -> Result<CoefficientPair, CliError> {
    CoefficientPair::new(p.a, p.b, p.m).context("coefficients")
}

fn execute(cmd: Cmd, ctx: &Ctx) -> Result<u8, CliError> {
    match cmd {
        Cmd::Admissible(p) => {
            let pair = pair_of(&p)?;
            let iv = feasible_interval(&pair);
            let report = AdmissibleReport {
                a_in_set: in_admissible_set(pair.a, 0.0),
                b_in_set: in_admissible_set(pair.b, 0.0),
                existence: admissible_existence(&pair),
                uniqueness: admissible_uniqueness(&pair),
                uniqueness_case: uniqueness_case(&pair),
                lambda_interval: iv,
            };
            ctx.emit("admissible.json", &to_json(&report))?;
        }
        Cmd::Constants(p) => {
            let cert = coercivity_constants(&pair_of(&p)?).context("coercivity constants")?;
            ctx.emit("constants.json", &to_json(&cert))?;
        }
        Cmd::Exponents { m, n, tau } => {
            let set = exponent_set(m, n).context("exponents")?;
            let tau = tau.map(|t| set.tau_exponents(t)).transpose().context("exponents")?;
            ctx.emit("exponents.json", &to_json(&ExponentReport { set, tau_lower: set.tau_lower(), tau }))?;
        }
        Cmd::Rhomax { m, n, rho0, e0, b0, l, mm, c_eff } => {
            let set = exponent_set(m, n).context("exponents")?;
            let bound = rho_max(&set, &RhoMaxInput { rho0, e0, b0, l, m: mm, c_eff }).context("rho_max")?;
            ctx.emit("rhomax.json", &to_json(&bound))?;
        }
        Cmd::Thresholds { m, n, rho0, rho1, l, mm, b1, c_eff } => {
            let set = exponent_set(m, n).context("exponents")?;
            let thr = thresholds(&set, &ThresholdInput { rho0, rho1, l, m: mm, b1, c_eff }).context("thresholds")?;
            ctx.emit("thresholds.json", &to_json(&thr))?;
        }
        Cmd::Solve { config } => {
            let (cfg, base) = ctx.load(&config)?;
            let res = solve(&cfg.problem_spec(&base)?, &cfg.solver)?;
            let dir = ctx.out_dir(Some(&cfg));
            write_file(&dir, FIELD, &write_snapshot(&res.u))?;
            let body = to_json(&SolveSummary::from(&res));
            write_file(&dir, "solve.json", &body)?;
            print!("{body}");
        }
        Cmd::Analyze { config, field } => {
            let (cfg, base) = ctx.load(&config)?;
            let text = read_input(&field)?;
            let u = read_snapshot(&text).context(format!("field {}", field.display()))?;
            let f = cfg.forcing(&base)?;
            if u.grid != f.grid {
                return Err(CliError::ConfigInvalid(format!("{} does not match the config grid", field.display())));
            }
            let pair = cfg.pair()?;
            let cert = coercivity_constants(&pair).context("coercivity constants")?;
            let dir = ctx.out_dir(Some(&cfg));
            let mut rows = Vec::new();
            for (i, x0) in cfg.analysis.x0.iter().enumerate() {
                let name = format!("profile_{i}.csv");
                let a = analyze_centre(&u, &f, &pair, &cert, x0, cfg.analysis.rho1, cfg.analysis.rho_samples, name.clone())?;
                write_file(&dir, &name, &a.csv)?;
                rows.push(a);
            }
            let body = to_json(&rows);
            write_file(&dir, "analysis.json", &body)?;
            print!("{body}");
            if rows.iter().any(|r| !r.identities_ok || !r.margin_ok) {
                return Ok(EXIT_VIOLATION);
            }
        }
        Cmd::Localize { config } => {
            let (cfg, base) = ctx.load(&config)?;
            let out = singular_nls_cli::run_experiment(&cfg, &base)?;
            let verdicts: Vec<_> = out.report.centres.iter().map(|c| &c.verdict).collect();
            let body = to_json(&verdicts);
            write_file(&ctx.out_dir(Some(&cfg)), VERDICT, &to_json(&out.report))?;
            print!("{body}");
            return Ok(out.exit_code());
        }
        Cmd::Atlas { a, m, re, im, n_re, n_im } => {
            let cells = atlas_classify(a, m, &PlaneSampling { re, im, n_re, n_im }).context("atlas")?;
            let dir = ctx.out_dir(None);
            write_file(&dir, "atlas.csv", &atlas_csv(&cells))?;
            println!("{} cells written to {}", cells.len(), dir.join("atlas.csv").display());
        }
        Cmd::Calibrate { m, n, rho } => {
            let est = trace_constant_estimate(m, n, rho, &default_family(rho)).context("calibrate")?;
            ctx.emit("calibrate.json", &to_json(&est))?;
        }
        Cmd::Run { configs } => {
            let loaded = configs.iter().map(|p| ctx.load(p)).collect::<Result<Vec<_>, _>>()?;
            let out = ctx.out_dir(loaded.first().map(|(c, _)| c).filter(|_| loaded.len() == 1));
            let mut worst = EXIT_OK;
            for (name, status) in run_batch(&loaded, &out)? {
                match status {
                    Ok(code) => {
                        println!("{name}: {}", if code == EXIT_OK { "ok" } else { "SOUNDNESS VIOLATION" });
                        worst = worst.max(code);
                    }
                    Err(e) => {
                        eprintln!("{name}: error: {e}");
                        worst = worst.max(e.exit_code());
                    }
                }
            }
            return Ok(worst);
        }
    }
    Ok(EXIT_OK)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: --threads: {e}");
            return ExitCode::from(EXIT_INVALID);
        }
    }
    let ctx = Ctx { out: cli.out, seed: cli.seed };
    match execute(cli.cmd, &ctx) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
