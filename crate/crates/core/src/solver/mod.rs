//! Regularization-continuation Newton solver for
//! `-Δu + aφ(u) + bu + c|x|²u = F`.
//!
//! The singular term is replaced by `φ_ε(u) = (|u|²+ε²)^{(m-1)/2} u` and ε is
//! driven from `eps_start` down to `eps_min`, each stage warm-started from
//! the previous one. Unknowns are interleaved `(Re u_k, Im u_k)` so the real
//! Jacobian is banded.

mod banded;
mod forcing;

pub use banded::{backward_error, BandLu, BandMatrix};
pub use forcing::{complex_pair, manufactured_forcing, phi, Profile};

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::coeffs::{
    admissible_existence, coercivity_constants, uniqueness_case, CoefficientPair, UniquenessCase,
};
use crate::error::{Error, Result};
use crate::grid::{BoundaryCondition, Domain, DomainKind, Field, Grid};

pub const LINEAR_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct ProblemSpec {
    pub pair: CoefficientPair,
    pub bc: BoundaryCondition,
    /// Forcing; its grid is the computational grid.
    pub forcing: Field,
}

impl ProblemSpec {
    pub fn new(pair: CoefficientPair, bc: BoundaryCondition, forcing: Field) -> Result<Self> {
        let spec = ProblemSpec { pair, bc, forcing };
        spec.validate()?;
        Ok(spec)
    }

    pub fn grid(&self) -> &Grid {
        &self.forcing.grid
    }

    pub fn domain(&self) -> &Domain {
        self.forcing.grid.domain()
    }

    pub fn validate(&self) -> Result<()> {
        self.pair.validate()?;
        if self.bc == BoundaryCondition::None {
            return Err(Error::InvalidArgument("boundary condition must be dirichlet or neumann".into()));
        }
        if let Some(k) = self.forcing.values.iter().position(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFiniteValue(k));
        }
        let shape = self.grid().shape();
        for axis in 0..self.grid().axes() {
            if shape[axis] < 3 {
                return Err(Error::GridTooCoarse { axis, nodes: shape[axis] });
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SolverConfig {
    pub eps_start: f64,
    pub eps_min: f64,
    pub eps_factor: f64,
    pub newton_tol: f64,
    pub max_newton: usize,
    pub max_halvings: usize,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            eps_start: 1e-2,
            eps_min: 1e-10,
            eps_factor: 0.5,
            newton_tol: 1e-10,
            max_newton: 50,
            max_halvings: 20,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        let pos = |name: &str, v: f64| {
            if v.is_finite() && v > 0.0 {
                Ok(())
            } else {
                Err(Error::InvalidArgument(format!("{name} must be positive, got {v}")))
            }
        };
        pos("eps_start", self.eps_start)?;
        pos("eps_min", self.eps_min)?;
        pos("newton_tol", self.newton_tol)?;
        if self.eps_min >= self.eps_start {
            return Err(Error::InvalidArgument("eps_min must be below eps_start".into()));
        }
        if !(self.eps_factor > 0.0 && self.eps_factor < 1.0) {
            return Err(Error::InvalidArgument(format!("eps_factor must lie in (0,1), got {}", self.eps_factor)));
        }
        if self.max_newton == 0 {
            return Err(Error::InvalidArgument("max_newton must be at least 1".into()));
        }
        Ok(())
    }

    /// The ε schedule, ending exactly at `eps_min`.
    pub fn schedule(&self) -> Vec<f64> {
        let mut out = vec![self.eps_start];
        let mut eps = self.eps_start;
        while eps > self.eps_min {
            eps = (eps * self.eps_factor).max(self.eps_min);
            out.push(eps);
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ContinuationStep {
    pub eps: f64,
    pub iterations: usize,
    pub residual: f64,
    pub converged: bool,
}

/// Discrete analogue of the a-priori estimate; reported, never enforced.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AprioriReport {
    /// (‖u‖²_{H¹,h} + ‖u‖^{m+1}_{m+1,h}) / ‖F‖²; absent when F = 0.
    pub ratio: Option<f64>,
    /// max(1, 2/L)·M²/(2L) from the coercivity certificate; absent when (ab) fails.
    pub bound: Option<f64>,
    pub holds: Option<bool>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Branch {
    /// Uniqueness holds, so the solution found is the solution.
    Unique,
    /// Uniqueness is not guaranteed; this is the branch reached by
    /// continuation from u = 0.
    ContinuedFromZero,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveResult {
    pub u: Field,
    pub residual_norm: f64,
    pub forcing_norm: f64,
    pub eps_final: f64,
    pub newton_iterations_total: usize,
    pub converged: bool,
    pub history: Vec<ContinuationStep>,
    pub existence_admissible: bool,
    pub uniqueness: Option<UniquenessCase>,
    pub branch: Branch,
    pub apriori: AprioriReport,
}

#[derive(Debug, Clone, Copy)]
struct AxisStencil {
    left: usize,
    right: usize,
    /// weight of ((u_r - u_c) - (u_c - u_l))
    second: f64,
    /// weight of (u_r - u_l)
    first: f64,
}

/// The discrete operator: Laplacian stencils plus pinned rows.
struct Operator {
    stencils: Vec<Vec<AxisStencil>>,
    pinned: Vec<bool>,
    weights: Vec<f64>,
    radius_sq: Vec<f64>,
    node_offset: usize,
}

impl Operator {
    fn build(grid: &Grid, bc: BoundaryCondition) -> Self {
        let h = grid.h();
        let h2 = h * h;
        let shape = grid.shape();
        let kind = grid.domain().kind;
        let dim = grid.domain().dimension as f64;
        let pinned: Vec<bool> = (0..grid.len())
            .map(|k| bc == BoundaryCondition::Dirichlet && grid.is_boundary(k))
            .collect();
        let stencils = (0..grid.len())
            .map(|k| {
                let (i, j) = grid.split_index(k);
                (0..grid.axes())
                    .map(|axis| {
                        let n = shape[axis];
                        let pos = if axis == 0 { i } else { j };
                        let at = |p: usize| if axis == 0 { grid.index(p, j) } else { grid.index(i, p) };
                        // ghost reflection at an edge: the missing neighbour mirrors the present one
                        let l = if pos == 0 { at(1) } else { at(pos - 1) };
                        let r = if pos + 1 == n { at(n - 2) } else { at(pos + 1) };
                        if kind == DomainKind::Radial {
                            if pos == 0 {
                                AxisStencil { left: l, right: r, second: dim / h2, first: 0.0 }
                            } else {
                                let rad = grid.coord(0, pos);
                                AxisStencil { left: l, right: r, second: 1.0 / h2, first: (dim - 1.0) / (2.0 * h * rad) }
                            }
                        } else {
                            AxisStencil { left: l, right: r, second: 1.0 / h2, first: 0.0 }
                        }
                    })
                    .collect()
            })
            .collect();
        Operator {
            stencils,
            pinned,
            weights: grid.cell_measures(),
            radius_sq: (0..grid.len()).map(|k| grid.radius_sq(k)).collect(),
            node_offset: if grid.axes() == 2 { shape[0] } else { 1 },
        }
    }

    fn neg_laplacian(&self, u: &[Complex64], k: usize) -> Complex64 {
        let c = u[k];
        self.stencils[k]
            .iter()
            .map(|s| {
                let (ul, ur) = (u[s.left], u[s.right]);
                -(((ur - c) - (c - ul)) * s.second + (ur - ul) * s.first)
            })
            .sum()
    }

    fn residual(&self, pair: &CoefficientPair, f: &[Complex64], u: &[Complex64], eps: f64) -> Vec<Complex64> {
        (0..u.len())
            .into_par_iter()
            .map(|k| {
                if self.pinned[k] {
                    return u[k];
                }
                let z = u[k];
                let g = (z.norm_sqr() + eps * eps).powf(0.5 * (pair.m - 1.0));
                self.neg_laplacian(u, k) + pair.a * (z * g) + pair.b * z + pair.c * self.radius_sq[k] * z - f[k]
            })
            .collect()
    }

    /// Weighted L² norm over unpinned nodes.
    fn norm(&self, r: &[Complex64]) -> f64 {
        r.iter()
            .zip(&self.weights)
            .zip(&self.pinned)
            .filter(|(_, &p)| !p)
            .map(|((z, w), _)| w * z.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    fn jacobian(&self, pair: &CoefficientPair, u: &[Complex64], eps: f64) -> BandMatrix {
        let n = u.len();
        let band = 2 * self.node_offset + 1;
        let mut jac = BandMatrix::zeros(2 * n, band, band);
        let (a, b, c) = (pair.a, pair.b, pair.c);
        for k in 0..n {
            let (rr, ri) = (2 * k, 2 * k + 1);
            if self.pinned[k] {
                jac.add(rr, rr, 1.0);
                jac.add(ri, ri, 1.0);
                continue;
            }
            for s in &self.stencils[k] {
                let entries = [
                    (s.right, -(s.second + s.first)),
                    (s.left, -(s.second - s.first)),
                    (k, 2.0 * s.second),
                ];
                for (node, w) in entries {
                    jac.add(rr, 2 * node, w);
                    jac.add(ri, 2 * node + 1, w);
                }
            }
            let (p, q) = (u[k].re, u[k].im);
            let sq = p * p + q * q + eps * eps;
            let g = sq.powf(0.5 * (pair.m - 1.0));
            let gp = 0.5 * (pair.m - 1.0) * sq.powf(0.5 * (pair.m - 3.0));
            // real derivative of φ_ε at (p, q)
            let d = [[g + 2.0 * p * p * gp, 2.0 * p * q * gp], [2.0 * p * q * gp, g + 2.0 * q * q * gp]];
            let lin = b + c * self.radius_sq[k];
            let blk = [
                [a.re * d[0][0] - a.im * d[1][0] + lin.re, a.re * d[0][1] - a.im * d[1][1] - lin.im],
                [a.im * d[0][0] + a.re * d[1][0] + lin.im, a.im * d[0][1] + a.re * d[1][1] + lin.re],
            ];
            jac.add(rr, rr, blk[0][0]);
            jac.add(rr, ri, blk[0][1]);
            jac.add(ri, rr, blk[1][0]);
            jac.add(ri, ri, blk[1][1]);
        }
        jac
    }
}

fn all_finite(v: &[Complex64]) -> bool {
    v.iter().all(|z| z.re.is_finite() && z.im.is_finite())
}

struct StageOutcome {
    iterations: usize,
    residual: f64,
    converged: bool,
}

fn newton_stage(
    op: &Operator,
    spec: &ProblemSpec,
    cfg: &SolverConfig,
    u: &mut Vec<Complex64>,
    eps: f64,
    target: f64,
) -> Result<StageOutcome> {
    let f = &spec.forcing.values;
    let mut r = op.residual(&spec.pair, f, u, eps);
    if !all_finite(&r) {
        return Err(Error::NonFiniteEncountered { eps });
    }
    let mut norm = op.norm(&r);
    let mut iterations = 0;
    while norm > target {
        if iterations == cfg.max_newton {
            return Ok(StageOutcome { iterations, residual: norm, converged: false });
        }
        let jac = op.jacobian(&spec.pair, u, eps);
        let rhs: Vec<f64> = r.iter().flat_map(|z| [-z.re, -z.im]).collect();
        let du = banded::solve(&jac, &rhs, LINEAR_TOL)?;
        let mut t = 1.0;
        let mut halvings = 0;
        loop {
            let trial: Vec<Complex64> = u
                .iter()
                .enumerate()
                .map(|(k, z)| z + Complex64::new(du[2 * k], du[2 * k + 1]) * t)
                .collect();
            let rt = op.residual(&spec.pair, f, &trial, eps);
            if !all_finite(&rt) {
                return Err(Error::NonFiniteEncountered { eps });
            }
            let nt = op.norm(&rt);
            if nt < norm {
                *u = trial;
                r = rt;
                norm = nt;
                break;
            }
            if halvings == cfg.max_halvings {
                return Err(Error::NewtonDiverged { eps, residual: norm });
            }
            halvings += 1;
            t *= 0.5;
        }
        iterations += 1;
    }
    Ok(StageOutcome { iterations, residual: norm, converged: true })
}

/// Solve by ε-continuation from u = 0.
///
/// Pairs failing condition (ab) are still solved; `existence_admissible`
/// records the failed gate.
pub fn continuation_solve(spec: &ProblemSpec, cfg: &SolverConfig) -> Result<SolveResult> {
    spec.validate()?;
    cfg.validate()?;
    let grid = spec.grid();
    let op = Operator::build(grid, spec.bc);
    let forcing_norm = spec.forcing.l2_norm_sq().sqrt();
    let target = cfg.newton_tol * (1.0 + forcing_norm);
    let mut u = vec![Complex64::new(0.0, 0.0); grid.len()];
    let mut history = Vec::new();
    let mut total = 0;
    for eps in cfg.schedule() {
        let out = newton_stage(&op, spec, cfg, &mut u, eps, target)?;
        total += out.iterations;
        history.push(ContinuationStep { eps, iterations: out.iterations, residual: out.residual, converged: out.converged });
    }
    let last = *history.last().expect("schedule is never empty");
    let field = Field::new(grid.clone(), u, spec.bc)?;
    let apriori = apriori_report(&field, &spec.pair, forcing_norm)?;
    let uniqueness = uniqueness_case(&spec.pair);
    Ok(SolveResult {
        u: field,
        residual_norm: last.residual,
        forcing_norm,
        eps_final: last.eps,
        newton_iterations_total: total,
        converged: last.converged,
        history,
        existence_admissible: admissible_existence(&spec.pair),
        uniqueness,
        branch: if uniqueness.is_some() { Branch::Unique } else { Branch::ContinuedFromZero },
        apriori,
    })
}

fn apriori_report(u: &Field, pair: &CoefficientPair, forcing_norm: f64) -> Result<AprioriReport> {
    let ratio = if forcing_norm > 0.0 {
        Some((u.h1_norm_sq()? + u.lq_integral(pair.m + 1.0)) / (forcing_norm * forcing_norm))
    } else {
        None
    };
    let bound = coercivity_constants(pair)
        .ok()
        .map(|cert| (2.0 / cert.l).max(1.0) * cert.m * cert.m / (2.0 * cert.l));
    let holds = match (ratio, bound) {
        (Some(r), Some(b)) => Some(r <= b),
        _ => None,
    };
    Ok(AprioriReport { ratio, bound, holds })
}

/// Discrete residual of the unregularized equation (φ, not φ_ε) for a
/// given field, as a weighted L² norm over unpinned nodes.
pub fn residual_norm(spec: &ProblemSpec, u: &Field) -> Result<f64> {
    if !u.same_grid(&spec.forcing) {
        return Err(Error::ShapeMismatch("field and forcing live on different grids".into()));
    }
    let op = Operator::build(spec.grid(), spec.bc);
    let r: Vec<Complex64> = (0..u.values.len())
        .map(|k| {
            if op.pinned[k] {
                return u.values[k];
            }
            let z = u.values[k];
            op.neg_laplacian(&u.values, k) + spec.pair.a * phi(z, spec.pair.m) + spec.pair.b * z
                + spec.pair.c * op.radius_sq[k] * z
                - spec.forcing.values[k]
        })
        .collect();
    Ok(op.norm(&r))
}
