//! Numerical supports, ε-dilations, the forcing-decay hypothesis and the
//! predicted-versus-observed vanishing verdict.

use rayon::prelude::*;
use serde::{Serialize, Serializer};

use crate::coeffs::{admissible_uniqueness, CoercivityCertificate};
use crate::energy::{compute_profile, sample_radii, tol_id_for, verify_inequality, DEFAULT_SAMPLES};
use crate::error::{Error, Result};
use crate::exponents::{exponent_set, thresholds, ThresholdInput, Thresholds};
use crate::grid::{ball_integral, BoundaryCondition, DomainKind, Field, Grid};
use crate::solver::{ProblemSpec, SolveResult, SolverConfig};

/// Relative slack on distance comparisons between grid nodes.
const DIST_RTOL: f64 = 1e-9;
pub const DECAY_SAMPLES: usize = 256;

fn finite_or_null<S: Serializer>(x: &f64, s: S) -> std::result::Result<S::Ok, S::Error> {
    if x.is_finite() {
        s.serialize_f64(*x)
    } else {
        s.serialize_none()
    }
}

/// max(10·eps_min^m, 100·newton_tol).
pub fn default_threshold(cfg: &SolverConfig, m: f64) -> f64 {
    (10.0 * cfg.eps_min.powf(m)).max(100.0 * cfg.newton_tol)
}

/// Nodes where |u| exceeds the threshold.
#[derive(Debug, Clone, PartialEq)]
pub struct SupportReport {
    pub threshold: f64,
    pub grid: Grid,
    pub mask: Vec<bool>,
}

impl SupportReport {
    pub fn is_empty(&self) -> bool {
        !self.mask.iter().any(|&b| b)
    }

    pub fn cells(&self) -> Vec<usize> {
        self.mask.iter().enumerate().filter(|(_, &b)| b).map(|(k, _)| k).collect()
    }

    /// sup |x - x0| over support nodes, 0 when empty.
    pub fn outer_radius(&self, x0: &[f64]) -> f64 {
        self.cells().into_iter().map(|k| self.grid.distance(x0, k)).fold(0.0, f64::max)
    }

    /// Distance from x0 to the nearest support node; when the support is
    /// empty, the farthest node distance (the whole grid vanishes).
    pub fn inner_vanishing_radius(&self, x0: &[f64]) -> f64 {
        if self.is_empty() {
            return self.grid.max_distance(x0);
        }
        self.cells().into_iter().map(|k| self.grid.distance(x0, k)).fold(f64::INFINITY, f64::min)
    }

    pub fn radii(&self, x0: &[f64]) -> SupportRadii {
        SupportRadii {
            threshold: self.threshold,
            support_cells: self.cells().len(),
            outer_radius: self.outer_radius(x0),
            inner_vanishing_radius: self.inner_vanishing_radius(x0),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SupportRadii {
    pub threshold: f64,
    pub support_cells: usize,
    pub outer_radius: f64,
    pub inner_vanishing_radius: f64,
}

pub fn measure_support(u: &Field, threshold: f64) -> Result<SupportReport> {
    if !(threshold > 0.0 && threshold.is_finite()) {
        return Err(Error::InvalidArgument(format!("threshold must be positive, got {threshold}")));
    }
    Ok(SupportReport {
        threshold,
        grid: u.grid.clone(),
        mask: u.values.iter().map(|z| z.norm() > threshold).collect(),
    })
}

/// All nodes within distance `eps` of a node of `k`.
pub fn dilate(grid: &Grid, k: &[bool], eps: f64) -> Result<Vec<bool>> {
    if !(eps >= 0.0 && eps.is_finite()) {
        return Err(Error::InvalidArgument(format!("dilation radius must be nonnegative, got {eps}")));
    }
    if k.len() != grid.len() {
        return Err(Error::ShapeMismatch(format!("mask has {} entries, grid {}", k.len(), grid.len())));
    }
    let reach = eps * (1.0 + DIST_RTOL);
    let steps = (reach / grid.h()).floor() as usize;
    let shape = grid.shape();
    let mut out = k.to_vec();
    for idx in (0..grid.len()).filter(|&i| k[i]) {
        let p = grid.node(idx);
        let (i, j) = grid.split_index(idx);
        let ys = if grid.axes() == 2 { j.saturating_sub(steps)..(j + steps + 1).min(shape[1]) } else { 0..1 };
        for jj in ys {
            for ii in i.saturating_sub(steps)..(i + steps + 1).min(shape[0]) {
                let q = grid.index(ii, jj);
                if !out[q] && grid.distance(&p[..grid.axes()], q) <= reach {
                    out[q] = true;
                }
            }
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DecayCheck {
    pub ok: bool,
    /// max over samples of ‖F‖²_{L²(B(x0,ρ))} / (ε⋆ (ρ-ρ0)₊^p), with 0/0 = 0.
    #[serde(serialize_with = "finite_or_null")]
    pub worst_ratio: f64,
    #[serde(serialize_with = "finite_or_null")]
    pub worst_rho: f64,
}

/// Check ‖F‖²_{L²(B(x0,ρ))} ≤ ε⋆((ρ-ρ0)₊)^p at `samples` radii in (0, rho1).
pub fn forcing_decay_check(
    f: &Field,
    x0: &[f64],
    rho0: f64,
    rho1: f64,
    eps_star: f64,
    p: f64,
    samples: usize,
) -> Result<DecayCheck> {
    if !(rho0 > 0.0 && rho0 < rho1 && rho1.is_finite()) {
        return Err(Error::InvalidArgument(format!("need 0 < rho0 < rho1, got {rho0}, {rho1}")));
    }
    if !(eps_star > 0.0) {
        return Err(Error::InvalidArgument(format!("eps_star must be positive, got {eps_star}")));
    }
    let dens: Vec<f64> = f.values.iter().map(|z| z.norm_sqr()).collect();
    let radii: Vec<f64> = (1..samples.max(2)).map(|i| rho1 * i as f64 / samples.max(2) as f64).collect();
    let ratios: Vec<(f64, f64)> = radii
        .par_iter()
        .map(|&r| {
            let lhs = ball_integral(&f.grid, &dens, x0, r)?;
            let rhs = eps_star * (r - rho0).max(0.0).powf(p);
            let ratio = if lhs == 0.0 {
                0.0
            } else if rhs == 0.0 {
                f64::INFINITY
            } else {
                lhs / rhs
            };
            Ok((ratio, r))
        })
        .collect::<Result<_>>()?;
    let (worst_ratio, worst_rho) = ratios.into_iter().fold((0.0, f64::NAN), |acc, x| if x.0 > acc.0 { x } else { acc });
    Ok(DecayCheck { ok: worst_ratio <= 1.0, worst_ratio, worst_rho })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ZeroBall {
    pub x0: Vec<f64>,
    pub rho0: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerdictDetails {
    pub solver_converged: bool,
    pub min_margin: f64,
    pub tol_id: f64,
    pub margin_ok: bool,
    #[serde(rename = "E_rho1")]
    pub e_rho1: f64,
    #[serde(rename = "b_rho1")]
    pub b_rho1: f64,
    pub thresholds: Thresholds,
    pub energy_ok: bool,
    pub decay: DecayCheck,
    pub support: SupportRadii,
    pub coercivity_l: f64,
    pub coercivity_m: f64,
    pub failed_clauses: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Verdict {
    pub hypothesis_ok: bool,
    pub predicted_zero_ball: ZeroBall,
    pub observed_ok: bool,
    /// The uniqueness premise fails for this pair; the prediction concerns
    /// the computed branch only.
    pub conditional_on_uniqueness: bool,
    /// Trace constant the thresholds were computed with.
    pub c_eff: f64,
    pub details: VerdictDetails,
}

impl Verdict {
    /// The implication hypothesis ⇒ observation holds for this run.
    pub fn sound(&self) -> bool {
        !self.hypothesis_ok || self.observed_ok
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VerdictOptions {
    pub c_eff: f64,
    pub samples: usize,
    pub decay_samples: usize,
    /// Support threshold; `None` uses [`default_threshold`].
    pub threshold: Option<f64>,
}

impl Default for VerdictOptions {
    fn default() -> Self {
        VerdictOptions { c_eff: 1.0, samples: DEFAULT_SAMPLES, decay_samples: DECAY_SAMPLES, threshold: None }
    }
}

/// Compare the predicted vanishing of u on B(x0, rho0) with the computed
/// solution.
pub fn localization_verdict(
    solve: &SolveResult,
    spec: &ProblemSpec,
    solver_cfg: &SolverConfig,
    cert: &CoercivityCertificate,
    x0: &[f64],
    rho0: f64,
    rho1: f64,
    opts: &VerdictOptions,
) -> Result<Verdict> {
    let u = &solve.u;
    let f = &spec.forcing;
    let grid = &u.grid;
    let m = spec.pair.m;
    let set = exponent_set(m, grid.domain().dimension)?;
    let rho = sample_radii(grid.h(), rho1, opts.samples)?;
    let profile = compute_profile(u, f, x0, &rho, m)?;
    let margins = verify_inequality(&profile, cert, true);
    let tol = tol_id_for(u)?;
    let last = profile.len() - 1;
    let (e1, b1) = (profile.e[last], profile.bmass[last]);
    let thr = thresholds(
        &set,
        &ThresholdInput { rho0, rho1, l: cert.l, m: cert.m, b1, c_eff: opts.c_eff },
    )?;
    let decay = forcing_decay_check(f, x0, rho0, rho1, thr.eps_star, thr.p, opts.decay_samples)?;
    let threshold = opts.threshold.unwrap_or_else(|| default_threshold(solver_cfg, m));
    let support = measure_support(u, threshold)?.radii(x0);

    let margin_ok = margins.holds(tol);
    let energy_ok = e1 < thr.e_star;
    let mut failed = Vec::new();
    if !solve.converged {
        failed.push("solver did not converge".to_string());
    }
    if !margin_ok {
        failed.push(format!("coercive inequality: min margin {:e} below -tol_id {:e}", margins.min_margin, tol));
    }
    if !energy_ok {
        failed.push(format!("energy smallness: E(rho1) = {e1:e} not below E_star = {:e}", thr.e_star));
    }
    if !decay.ok {
        failed.push(format!("forcing decay: worst ratio {:e} at rho = {}", decay.worst_ratio, decay.worst_rho));
    }
    let hypothesis_ok = failed.is_empty();
    let observed_ok = support.inner_vanishing_radius >= rho0 - 2.0 * grid.h();
    Ok(Verdict {
        hypothesis_ok,
        predicted_zero_ball: ZeroBall { x0: x0.to_vec(), rho0 },
        observed_ok,
        conditional_on_uniqueness: !admissible_uniqueness(&spec.pair),
        c_eff: opts.c_eff,
        details: VerdictDetails {
            solver_converged: solve.converged,
            min_margin: margins.min_margin,
            tol_id: tol,
            margin_ok,
            e_rho1: e1,
            b_rho1: b1,
            thresholds: thr,
            energy_ok,
            decay,
            support,
            coercivity_l: cert.l,
            coercivity_m: cert.m,
            failed_clauses: failed,
        },
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CentreCheck {
    pub x0: Vec<f64>,
    pub max_abs: f64,
    pub vanishes: bool,
}

/// Observed support containment supp u ⊂ K(ε), K = supp F.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CoveringReport {
    pub eps: f64,
    pub threshold: f64,
    /// Ball centres spaced about ε apart outside K(2ε); each ball B(x, ε) is checked.
    pub centres: Vec<CentreCheck>,
    pub all_centres_vanish: bool,
    /// max |u| over nodes outside K(ε).
    pub max_abs_outside: f64,
    pub contained: bool,
}

pub fn support_containment(u: &Field, f: &Field, eps: f64, threshold: f64) -> Result<CoveringReport> {
    if !u.same_grid(f) {
        return Err(Error::ShapeMismatch("u and F live on different grids".into()));
    }
    if !(eps > 0.0) {
        return Err(Error::InvalidArgument(format!("eps must be positive, got {eps}")));
    }
    let grid = &u.grid;
    let k: Vec<bool> = f.values.iter().map(|z| z.norm() > 0.0).collect();
    let k1 = dilate(grid, &k, eps)?;
    let k2 = dilate(grid, &k, 2.0 * eps)?;
    let max_abs_outside = (0..grid.len()).filter(|&i| !k1[i]).map(|i| u.values[i].norm()).fold(0.0, f64::max);

    let step = ((eps / grid.h()).round() as usize).max(1);
    let shape = grid.shape();
    let on_lattice = |i: usize, n: usize| i % step == 0 || i + 1 == n;
    let neumann = u.bc == BoundaryCondition::Neumann;
    let candidates: Vec<usize> = (0..grid.len())
        .filter(|&idx| {
            let (i, j) = grid.split_index(idx);
            let lattice = on_lattice(i, shape[0]) && (grid.axes() == 1 || on_lattice(j, shape[1]));
            let centred = grid.domain().kind != DomainKind::Radial || i == 0;
            let p = grid.node(idx);
            let inside = !neumann || grid.domain().distance_to_boundary(&p[..grid.axes()]) >= 2.0 * eps;
            lattice && centred && inside && !k2[idx]
        })
        .collect();
    let reach = eps * (1.0 + DIST_RTOL);
    let centres: Vec<CentreCheck> = candidates
        .par_iter()
        .map(|&c| {
            let p = grid.node(c);
            let x0 = p[..grid.axes()].to_vec();
            let max_abs = (0..grid.len())
                .filter(|&q| grid.distance(&x0, q) <= reach)
                .map(|q| u.values[q].norm())
                .fold(0.0, f64::max);
            CentreCheck { x0, max_abs, vanishes: max_abs <= threshold }
        })
        .collect();
    Ok(CoveringReport {
        eps,
        threshold,
        all_centres_vanish: centres.iter().all(|c| c.vanishes),
        centres,
        max_abs_outside,
        contained: max_abs_outside <= threshold,
    })
}
