//! Acceptance criteria 1–10. Runs as a plain binary so every criterion
//! prints one PASS/FAIL line; exits nonzero if any criterion fails.

use std::path::Path;
use std::time::{Duration, Instant};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use singular_nls::coeffs::{admissible_existence, coercivity_constants, feasible_interval, CoefficientPair};
use singular_nls::energy::{compute_profile, sample_limit, sample_radii, tol_id_for, verify_identities, verify_inequality};
use singular_nls::exponents::{exponent_set, ode_compare, rho_max, thresholds, young_bound, RhoMaxInput, ThresholdInput};
use singular_nls::grid::{BoundaryCondition, Domain, Field, Grid};
use singular_nls::localization::{localization_verdict, VerdictOptions};
use singular_nls::solver::{continuation_solve, manufactured_forcing, Profile, ProblemSpec, SolveResult, SolverConfig};
use singular_nls_cli::{run_batch, run_experiment, ExperimentConfig};

const SEED: u64 = 20240611;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn within(elapsed: Duration, limit_s: f64) -> bool {
    elapsed.as_secs_f64() < limit_s
}

fn interval(lo: f64, hi: f64, h: f64) -> Grid {
    Grid::new(Domain::interval(lo, hi).unwrap(), h).unwrap()
}

fn solve(pair: CoefficientPair, f: &Field) -> singular_nls::Result<SolveResult> {
    let spec = ProblemSpec::new(pair, f.bc, f.clone())?;
    continuation_solve(&spec, &SolverConfig::default())
}

fn exponent_identities() -> Outcome {
    let t = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let mut worst = 0.0f64;
    let mut failures = 0;
    for _ in 0..1000 {
        let m = rng.gen_range(0.01..0.99);
        let n = rng.gen_range(1..=5);
        let s = exponent_set(m, n).unwrap();
        let tau = s.tau_lower() + (1.0 - s.tau_lower()) * rng.gen_range(1e-9..=1.0);
        let e = s.tau_exponents(tau).unwrap();
        let checks = [
            (2.0 * s.delta * s.theta, s.nu - 1.0),
            (s.theta * (0.5 + tau * (1.0 - s.theta) * s.ell), (e.gamma + 1.0) / 2.0),
            (s.p, 1.0 / s.gamma_one()),
        ];
        for (a, b) in checks {
            let rel = (a - b).abs() / 1f64.max(a.abs()).max(b.abs());
            worst = worst.max(rel);
            if rel > 1e-12 {
                failures += 1;
            }
        }
        if !(e.eta > 0.0) {
            failures += 1;
        }
    }
    let el = t.elapsed();
    outcome(failures == 0 && within(el, 1.0), format!("1000 draws, worst relative error {worst:.1e}, {el:.2?}"))
}

fn random_coord(rng: &mut ChaCha8Rng) -> f64 {
    const SPECIAL: [f64; 6] = [-2.0, -1.0, 0.0, 0.5, 1.0, 3.0];
    if rng.gen_bool(0.3) {
        SPECIAL[rng.gen_range(0..SPECIAL.len())]
    } else {
        rng.gen_range(-10.0..10.0)
    }
}

fn lambda_interval() -> Outcome {
    let t = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(SEED + 2);
    let mut disagree = 0;
    let mut admissible = 0;
    for _ in 0..100_000 {
        let a = c(random_coord(&mut rng), random_coord(&mut rng));
        let b = c(random_coord(&mut rng), random_coord(&mut rng));
        let pair = CoefficientPair::new(a, b, 0.5).unwrap();
        let exists = admissible_existence(&pair);
        admissible += exists as usize;
        if coercivity_constants(&pair).is_ok() != exists {
            disagree += 1;
        }
    }
    let inf = f64::INFINITY;
    // Positivity of Re z + λ Im z: λ > -Re/Im for Im > 0, λ < -Re/Im for
    // Im < 0, all λ for real positive z, none for z on the excluded ray.
    let curated: [(Complex64, Complex64, Option<(f64, f64)>); 12] = [
        (c(1.0, -1.0), c(-1.0, 2.0), Some((0.5, 1.0))),
        (c(1.0, 0.0), c(1.0, 0.0), Some((-inf, inf))),
        (c(0.0, 1.0), c(1.0, 0.0), Some((0.0, inf))),
        (c(0.0, -1.0), c(1.0, 0.0), Some((-inf, 0.0))),
        (c(2.0, 1.0), c(1.0, -1.0), Some((-2.0, 1.0))),
        (c(-1.0, 1.0), c(3.0, 1.0), Some((1.0, inf))),
        (c(1.0, 2.0), c(1.0, -2.0), Some((-0.5, 0.5))),
        (c(-2.0, 4.0), c(1.0, 1.0), Some((0.5, inf))),
        (c(-1.0, 1.0), c(-1.0, -1.0), None),
        (c(-1.0, 0.0), c(1.0, 0.0), None),
        (c(0.0, 0.0), c(1.0, 0.0), None),
        (c(0.0, 3.0), c(0.0, -2.0), None),
    ];
    let mut curated_bad = Vec::new();
    for (a, b, expect) in curated {
        let pair = CoefficientPair::new(a, b, 0.5).unwrap();
        let iv = feasible_interval(&pair);
        let cert = coercivity_constants(&pair);
        let ok = match expect {
            Some((lo, hi)) => {
                iv.lo == lo && iv.hi == hi && cert.map(|c| c.interval.lo == lo && c.interval.hi == hi).unwrap_or(false)
            }
            None => iv.is_empty() && cert.is_err(),
        };
        if !ok {
            curated_bad.push(format!("({a}, {b})"));
        }
    }
    let el = t.elapsed();
    outcome(
        disagree == 0 && curated_bad.is_empty() && within(el, 10.0),
        format!(
            "1e5 pairs ({admissible} admissible), {disagree} disagreements; 12 curated, mismatches {curated_bad:?}; {el:.2?}"
        ),
    )
}

fn manufactured_pair() -> CoefficientPair {
    CoefficientPair::new(c(1.0, 1.0), c(1.0, 0.0), 0.5).unwrap()
}

fn manufactured_exact() -> Profile {
    Profile::bump(vec![0.0], 0.5, 3.0, c(1.0, 0.0))
}

fn analytic_case(h: f64) -> (CoefficientPair, Field, SolveResult) {
    let pair = CoefficientPair::new(c(0.0, 0.0), c(1.0, 0.0), 0.5).unwrap();
    let f = Field::from_fn(interval(-1.0, 1.0, h), BoundaryCondition::Dirichlet, |_| c(1.0, 0.0)).unwrap();
    let res = solve(pair, &f).unwrap();
    (pair, f, res)
}

fn manufactured_case(h: f64) -> (CoefficientPair, Field, SolveResult) {
    let pair = manufactured_pair();
    let f = manufactured_forcing(&manufactured_exact(), &pair, &interval(-1.0, 1.0, h), BoundaryCondition::Dirichlet).unwrap();
    let res = solve(pair, &f).unwrap();
    (pair, f, res)
}

fn solver_convergence() -> Outcome {
    let t = Instant::now();
    let (_, _, res) = analytic_case(1e-3);
    let u0 = res.u.values[res.u.grid.len() / 2];
    let analytic_ok = res.converged && (u0.re - 0.351946).abs() <= 1e-3;
    let mut errs = Vec::new();
    let mut converged = true;
    for h in [0.01, 0.005, 0.0025] {
        let (_, _, res) = manufactured_case(h);
        converged &= res.converged;
        let exact = manufactured_exact().sample(&res.u.grid, BoundaryCondition::Dirichlet).unwrap();
        let diff = res.u.values.iter().zip(&exact.values).map(|(p, q)| p - q).collect();
        errs.push(Field::new(res.u.grid.clone(), diff, BoundaryCondition::Dirichlet).unwrap().l2_norm_sq().sqrt());
    }
    let orders: Vec<f64> = errs.windows(2).map(|w| (w[0] / w[1]).log2()).collect();
    let el = t.elapsed();
    outcome(
        analytic_ok && converged && orders.iter().all(|&p| p >= 1.8) && within(el, 60.0),
        format!(
            "u(0) = {:.6}, manufactured L2 errors {}, orders {orders:.3?}; {el:.2?}",
            u0.re,
            errs.iter().map(|e| format!("{e:.2e}")).collect::<Vec<_>>().join(" ")
        ),
    )
}

fn identity_profile(u: &Field, f: &Field, m: f64) -> singular_nls::energy::EnergyProfile {
    let rho = sample_radii(u.grid.h(), 0.99, 64).unwrap();
    compute_profile(u, f, &[0.0], &rho, m).unwrap()
}

fn energy_identities() -> Outcome {
    let mut parts = Vec::new();
    let mut pass = true;
    for (name, case) in [("analytic", analytic_case as fn(f64) -> _), ("manufactured", manufactured_case)] {
        let mut maxima = Vec::new();
        for h in [1e-2, 1e-3] {
            let (pair, f, res) = case(h);
            let r = verify_identities(&identity_profile(&res.u, &f, pair.m), &pair).max();
            let tol = tol_id_for(&res.u).unwrap();
            pass &= r <= tol;
            maxima.push((r, tol));
        }
        let order = (maxima[0].0 / maxima[1].0).log10();
        pass &= order >= 0.9;
        parts.push(format!(
            "{name}: residual {:.1e} (tol {:.1e}) -> {:.1e} (tol {:.1e}), order {order:.2}",
            maxima[0].0, maxima[0].1, maxima[1].0, maxima[1].1
        ));
    }
    outcome(pass, parts.join("; "))
}

fn coercive_inequality() -> Outcome {
    let h = 0.01;
    let pairs = [
        (c(1.0, 0.0), c(1.0, 0.0), 0.5),
        (c(1.0, 1.0), c(1.0, 0.0), 0.5),
        (c(0.0, 1.0), c(1.0, 0.0), 0.5),
        (c(2.0, -1.0), c(0.5, 0.5), 0.5),
        (c(1.0, -1.0), c(-1.0, 2.0), 0.5),
        (c(3.0, 0.0), c(0.2, 0.0), 0.3),
        (c(0.5, 0.0), c(2.0, 0.0), 0.7),
        (c(1.0, 2.0), c(1.0, -2.0), 0.5),
        (c(-1.0, 1.0), c(3.0, 1.0), 0.5),
        (c(0.0, 2.0), c(1.0, 0.0), 0.2),
        (c(1.0, 0.0), c(0.0, 1.0), 0.5),
        (c(0.3, 2.0), c(0.7, -0.1), 0.8),
    ];
    let forcings = [
        (Profile::bump(vec![0.1], 0.4, 2.0, c(3.0, 1.0)), BoundaryCondition::Dirichlet),
        (Profile::Gaussian { center: vec![0.0], rate: 8.0, amplitude: c(1.0, -2.0) }, BoundaryCondition::Neumann),
        (
            Profile::Annulus { center: vec![0.0], mid: 0.5, half_width: 0.2, power: 2.0, amplitude: c(2.0, 0.5) },
            BoundaryCondition::Dirichlet,
        ),
    ];
    let mut runs = 0;
    let mut skipped = 0;
    let mut violations = Vec::new();
    let mut worst = f64::INFINITY;
    for (a, b, m) in pairs {
        let pair = CoefficientPair::new(a, b, m).unwrap();
        let cert = coercivity_constants(&pair).unwrap();
        for (p, bc) in &forcings {
            let g = interval(-1.0, 1.0, h);
            let f = p.sample(&g, *bc).unwrap();
            let res = match solve(pair, &f) {
                Ok(r) if r.converged => r,
                _ => {
                    skipped += 1;
                    continue;
                }
            };
            runs += 1;
            let tol = tol_id_for(&res.u).unwrap();
            for x0 in [0.0, 0.3] {
                let hi = (sample_limit(&res.u, &[x0]) - 2.0 * h).min(0.95);
                let rho = sample_radii(h, hi, 48).unwrap();
                let prof = compute_profile(&res.u, &f, &[x0], &rho, m).unwrap();
                let margin = verify_inequality(&prof, &cert, true);
                worst = worst.min(margin.min_margin / tol);
                if !margin.holds(tol) {
                    violations.push(format!("({a}, {b}) {bc:?} x0={x0}: {:.2e}", margin.min_margin));
                }
            }
        }
    }

    // Negative control: u(1 + x²) for a real pair with a large constant forcing.
    let g = interval(-1.0, 1.0, 1e-3);
    let pair = CoefficientPair::new(c(1.0, 0.0), c(1.0, 0.0), 0.5).unwrap();
    let cert = coercivity_constants(&pair).unwrap();
    let f = Field::from_fn(g.clone(), BoundaryCondition::Dirichlet, |_| c(10.0, 0.0)).unwrap();
    let spec = ProblemSpec::new(pair, BoundaryCondition::Dirichlet, f.clone()).unwrap();
    let cfg = SolverConfig::default();
    let res = continuation_solve(&spec, &cfg).unwrap();
    let corrupted: Vec<Complex64> =
        res.u.values.iter().enumerate().map(|(k, z)| z * (1.0 + g.node(k)[0].powi(2))).collect();
    let bad = SolveResult { u: Field::new(g, corrupted, BoundaryCondition::Dirichlet).unwrap(), ..res.clone() };
    let opts = VerdictOptions::default();
    let good_v = localization_verdict(&res, &spec, &cfg, &cert, &[0.0], 0.3, 0.99, &opts).unwrap();
    let bad_v = localization_verdict(&bad, &spec, &cfg, &cert, &[0.0], 0.3, 0.99, &opts).unwrap();
    let control_ok = good_v.details.margin_ok
        && !bad_v.details.margin_ok
        && bad_v.details.min_margin < -bad_v.details.tol_id
        && !bad_v.hypothesis_ok;

    outcome(
        runs >= 36 && violations.is_empty() && control_ok,
        format!(
            "{runs} converged runs ({skipped} skipped), worst margin/tol_id {worst:.2e}, violations {violations:?}; \
             control margin {:.2e} vs -tol_id {:.2e}, hypothesis_ok {}",
            bad_v.details.min_margin, -bad_v.details.tol_id, bad_v.hypothesis_ok
        ),
    )
}

fn rho_max_properties() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED + 6);
    let mut fails = Vec::new();
    for i in 0..1000 {
        let s = exponent_set(rng.gen_range(0.05..0.95), rng.gen_range(1..=3)).unwrap();
        let base = RhoMaxInput {
            rho0: rng.gen_range(0.1..3.0),
            e0: 10f64.powf(rng.gen_range(-12.0..-2.0)),
            b0: 10f64.powf(rng.gen_range(-6.0..1.0)),
            l: rng.gen_range(0.05..3.0),
            m: rng.gen_range(1.0..4.0),
            c_eff: 10f64.powf(rng.gen_range(-3.0..1.0)),
        };
        let f = rng.gen_range(1.0..3.0);
        let r = |inp: RhoMaxInput| rho_max(&s, &inp).unwrap().rho_max;
        let r0 = r(base);
        let slack = 1e-12 * base.rho0;
        if r(RhoMaxInput { e0: 0.0, ..base }) != base.rho0 {
            fails.push(format!("#{i} E0=0"));
        }
        if r(RhoMaxInput { m: 1e6, e0: base.e0.max(1e-6), c_eff: 1.0, l: 1.0, ..base }) != 0.0 {
            fails.push(format!("#{i} M=1e6"));
        }
        let mono = r(RhoMaxInput { e0: base.e0 * f, ..base }) <= r0 + slack
            && r(RhoMaxInput { m: base.m * f, ..base }) <= r0 + slack
            && r(RhoMaxInput { c_eff: base.c_eff * f, ..base }) <= r0 + slack
            && r(RhoMaxInput { l: base.l * f, ..base }) >= r0 - slack
            && (0.0..=base.rho0).contains(&r0);
        if !mono {
            fails.push(format!("#{i} monotonicity"));
        }
    }
    let s = exponent_set(0.5, 1).unwrap();
    let curated = rho_max(&s, &RhoMaxInput { rho0: 1.0, e0: 1.0, b0: 1.0, l: 1.0, m: 1.0, c_eff: 1.0 }).unwrap().rho_max;
    outcome(
        fails.is_empty() && curated == 0.0,
        format!("1000 random inputs, failures {:?}; curated rho_max = {curated}", &fails[..fails.len().min(5)]),
    )
}

/// E' = (E^{1-γ} - G)/K integrated from rho1 down to rho0 in v = E^γ,
/// where v' = γ/K·(1 - G·v^{-(1-γ)/γ}). Implicit Euler: each step solves
/// v - dr·γ/K·G·v^{-q} = v_prev - dr·γ/K, whose left side is increasing.
fn backward_energy(k: f64, gamma: f64, rho0: f64, rho1: f64, e1: f64, g: &dyn Fn(f64) -> f64, step: f64) -> (Vec<f64>, Vec<f64>) {
    let n = ((rho1 - rho0) / step).round() as usize;
    let dr = (rho1 - rho0) / n as f64;
    let q = (1.0 - gamma) / gamma;
    let c = dr * gamma / k;
    let mut rho = vec![rho1];
    let mut e = vec![e1];
    let mut v = e1.powf(gamma);
    for i in 1..=n {
        let r = if i == n { rho0 } else { rho1 - i as f64 * dr };
        let gr = g(r);
        let target = v - c;
        v = if gr <= 0.0 {
            target.max(0.0)
        } else {
            let phi = |x: f64| x - c * gr * x.powf(-q);
            let (mut lo, mut hi) = (0.0, target.max(f64::MIN_POSITIVE));
            while phi(hi) < target {
                hi *= 2.0;
            }
            for _ in 0..2000 {
                let mid = 0.5 * (lo + hi);
                if mid <= lo || mid >= hi {
                    break;
                }
                if phi(mid) > target {
                    hi = mid;
                } else {
                    lo = mid;
                }
            }
            lo
        };
        rho.push(r);
        e.push(v.powf(1.0 / gamma));
    }
    rho.reverse();
    e.reverse();
    (rho, e)
}

fn ode_comparison() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED + 7);
    let mut parts = Vec::new();
    let mut pass = true;
    for _ in 0..5 {
        let m = rng.gen_range(0.1..0.9);
        let n = rng.gen_range(1..=3);
        let rho0 = rng.gen_range(0.2..1.0);
        let rho1 = rho0 + rng.gen_range(0.1..1.0);
        let s = exponent_set(m, n).unwrap();
        let thr = thresholds(&s, &ThresholdInput { rho0, rho1, l: 1.0, m: 1.0, b1: rng.gen_range(0.1..2.0), c_eff: 1.0 })
            .unwrap();
        let scale = rng.gen_range(0.0..1.0);
        let g = move |r: f64| scale * 0.5 * thr.comparison(r).powf(1.0 - thr.gamma);
        let (rho, e) = backward_energy(thr.k, thr.gamma, rho0, rho1, thr.e_star / 2.0, &g, 1e-4);
        let gs: Vec<f64> = rho.iter().map(|&r| g(r)).collect();
        let below = ode_compare(&thr, &rho, &e, &gs);
        let ok = below == Ok(true) && e[0] <= 1e-10;
        pass &= ok;
        let worst = rho.iter().zip(&e).skip(1).map(|(&r, &y)| y / thr.comparison(r)).fold(0.0, f64::max);
        parts.push(format!(
            "(m={m:.2}, N={n}, {rho0:.2}, {rho1:.2}): max E/H {worst:.3}, E(rho0) {:.1e} {}",
            e[0],
            if ok { "ok" } else { "fail" }
        ));
    }
    outcome(pass, parts.join("; "))
}

fn young_fuzz() -> Outcome {
    let t = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(SEED + 9);
    let mut fails = 0;
    for _ in 0..1_000_000 {
        let x = if rng.gen_bool(0.05) { 0.0 } else { 10f64.powf(rng.gen_range(-3.0..3.0)) };
        let y = if rng.gen_bool(0.05) { 0.0 } else { 10f64.powf(rng.gen_range(-3.0..3.0)) };
        let lambda = rng.gen_range(1.01..10.0);
        let eps = 10f64.powf(rng.gen_range(-2.0..2.0));
        let (lhs, rhs) = young_bound(x, y, lambda, eps).unwrap();
        if !(lhs <= rhs * (1.0 + 1e-12)) {
            fails += 1;
        }
    }
    let el = t.elapsed();
    outcome(fails == 0 && within(el, 1.0), format!("1e6 tuples, {fails} failures, {el:.2?}"))
}

fn scenario_config(i: usize, rng: &mut ChaCha8Rng) -> ExperimentConfig {
    let radial = i % 2 == 1;
    let amp = 10f64.powf(rng.gen_range(-1.0..1.0));
    let json = if radial {
        let mid = rng.gen_range(1.0..1.4);
        let hw = rng.gen_range(0.1..0.2);
        serde_json::json!({
            "name": format!("radial_{i}"),
            "problem": {
                "a": [1.0, rng.gen_range(0.0..1.0)], "b": [1.0, 0.0], "m": 0.5,
                "domain": {"kind": "radial", "bounds": [[0.0, 2.0]], "dimension": 3},
                "h": 0.01, "bc": "dirichlet",
                "forcing": {"kind": "annulus", "center": [0.0], "mid": mid, "half_width": hw, "power": 2.0, "amplitude": [amp, 0.0]}
            },
            "analysis": {"x0": [[0.0]], "rho0": 0.5, "rho1": 0.8, "covering_eps": 0.3},
            "seed": SEED
        })
    } else {
        let centre = rng.gen_range(-0.25..0.25);
        let radius = rng.gen_range(0.1..0.25);
        serde_json::json!({
            "name": format!("line_{i}"),
            "problem": {
                "a": [rng.gen_range(0.0..1.0), 1.0], "b": [1.0, 0.0], "m": 0.5,
                "domain": {"kind": "interval", "bounds": [[-2.0, 2.0]], "dimension": 1},
                "h": 0.01, "bc": "dirichlet",
                "forcing": {"kind": "bump", "center": [centre], "radius": radius, "power": 2.0, "amplitude": [amp, 0.0]}
            },
            "analysis": {"x0": [[1.2], [-1.2]], "rho0": 0.3, "rho1": 0.7, "covering_eps": 0.3},
            "seed": SEED
        })
    };
    serde_json::from_value(json).unwrap()
}

fn scenario_suite() -> Vec<ExperimentConfig> {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED + 8);
    (0..20).map(|i| scenario_config(i, &mut rng)).collect()
}

fn localization_soundness() -> Outcome {
    let t = Instant::now();
    let mut hyp = 0;
    let mut violations = Vec::new();
    let mut leaks = Vec::new();
    let mut worst_leak = 0.0f64;
    for cfg in scenario_suite() {
        let out = match run_experiment(&cfg, Path::new(".")) {
            Ok(o) => o,
            Err(e) => {
                violations.push(format!("{}: {e}", cfg.name));
                continue;
            }
        };
        for centre in &out.report.centres {
            hyp += centre.verdict.hypothesis_ok as usize;
            if !centre.verdict.sound() {
                violations.push(format!("{} at {:?}", cfg.name, centre.verdict.predicted_zero_ball.x0));
            }
        }
        let cov = out.report.covering.as_ref().unwrap();
        worst_leak = worst_leak.max(cov.max_abs_outside / cov.threshold);
        if !cov.contained {
            leaks.push(format!("{}: {:.1e}", cfg.name, cov.max_abs_outside));
        }
    }
    let el = t.elapsed();
    outcome(
        hyp > 0 && violations.is_empty() && leaks.is_empty() && within(el, 600.0),
        format!(
            "20 runs, {hyp} centres with hypothesis_ok, violations {violations:?}; \
             max |u| outside K(0.3) / threshold = {worst_leak:.2e}, leaks {leaks:?}; {el:.2?}"
        ),
    )
}

fn read_tree(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut out = Vec::new();
    let mut stack = vec![dir.to_path_buf()];
    while let Some(d) = stack.pop() {
        for entry in std::fs::read_dir(&d).unwrap() {
            let p = entry.unwrap().path();
            if p.is_dir() {
                stack.push(p);
            } else if p.file_name().unwrap() != "timings.json" {
                out.push((p.strip_prefix(dir).unwrap().display().to_string(), std::fs::read(&p).unwrap()));
            }
        }
    }
    out.sort();
    out
}

fn determinism() -> Outcome {
    let repo = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs");
    let mut configs: Vec<(ExperimentConfig, std::path::PathBuf)> = ["bump_1d.json", "annulus_radial.json", "zero_forcing.json"]
        .iter()
        .map(|f| (ExperimentConfig::load(&repo.join(f)).unwrap(), repo.clone()))
        .collect();
    configs.extend(scenario_suite().into_iter().map(|c| (c, repo.clone())));
    let trees: Vec<_> = (0..2)
        .map(|_| {
            let dir = tempfile::tempdir().unwrap();
            let status = run_batch(&configs, dir.path()).unwrap();
            assert!(status.iter().all(|(_, s)| s.is_ok()));
            read_tree(dir.path())
        })
        .collect();
    let files = trees[0].len();
    let same = trees[0] == trees[1];
    outcome(same && files > 0, format!("{} configs, {files} artifacts per run, identical: {same}", configs.len()))
}

fn main() {
    // Ignore libtest flags such as --nocapture passed by `cargo test`.
    let filter: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let criteria: [(&str, fn() -> Outcome); 10] = [
        ("exponent identities", exponent_identities),
        ("lambda interval vs condition (ab)", lambda_interval),
        ("solver convergence", solver_convergence),
        ("energy identities", energy_identities),
        ("coercive inequality", coercive_inequality),
        ("rho_max properties", rho_max_properties),
        ("ODE comparison", ode_comparison),
        ("localization soundness", localization_soundness),
        ("Young fuzz", young_fuzz),
        ("determinism", determinism),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        if !filter.is_empty() && !filter.iter().any(|f| name.contains(f.as_str())) {
            continue;
        }
        let o = run();
        failed += !o.pass as usize;
        println!("{} criterion {:>2} {name}: {}", if o.pass { "PASS" } else { "FAIL" }, i + 1, o.detail);
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
}
