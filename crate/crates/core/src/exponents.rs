//! Exponents and closed-form bounds of the energy method.
//!
//! Everything here is a pure function of (m, N) and a handful of scalar
//! energies. The unspecified dimensional constant of the interpolation-trace
//! inequality enters as a single effective constant `c_eff`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::minimize::{grid_then_golden, linspace};

/// Offset from the open left endpoint (m+1)/2 of the τ-range.
pub const TAU_GRID_OFFSET: f64 = 1e-6;
/// Number of τ samples before golden-section polish.
pub const TAU_GRID_POINTS: usize = 1024;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ExponentSet {
    pub m: f64,
    #[serde(rename = "N")]
    pub n: usize,
    pub k: f64,
    pub nu: f64,
    pub theta: f64,
    pub ell: f64,
    pub delta: f64,
    pub p: f64,
}

pub fn exponent_set(m: f64, n: usize) -> Result<ExponentSet> {
    if !(m > 0.0 && m < 1.0) {
        return Err(Error::InvalidExponent(m));
    }
    if n < 1 {
        return Err(Error::InvalidDimension(n));
    }
    let nf = n as f64;
    let k = 2.0 * (1.0 + m) + nf * (1.0 - m);
    let theta = ((1.0 + m) + nf * (1.0 - m)) / k;
    Ok(ExponentSet {
        m,
        n,
        k,
        nu: k / (m + 1.0),
        theta,
        ell: 1.0 / (theta * (1.0 + m)),
        delta: k / (2.0 * (1.0 + m)),
        p: (2.0 * (1.0 + m) + nf * (1.0 - m)) / (1.0 - m),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TauExponents {
    pub tau: f64,
    pub gamma: f64,
    pub mu: f64,
    pub eta: f64,
}

impl ExponentSet {
    /// Open left endpoint (m+1)/2 of the admissible τ-range.
    pub fn tau_lower(&self) -> f64 {
        0.5 * (self.m + 1.0)
    }

    pub fn tau_exponents(&self, tau: f64) -> Result<TauExponents> {
        let lower = self.tau_lower();
        if !(tau > lower && tau <= 1.0) {
            return Err(Error::TauOutOfRange { tau, lower });
        }
        let gamma = (2.0 * tau - (1.0 + self.m)) / self.k;
        Ok(TauExponents {
            tau,
            gamma,
            mu: 2.0 * (1.0 - tau) / self.k,
            eta: (1.0 - self.m) / (1.0 + self.m) - gamma,
        })
    }

    /// γ(1) = (1-m)/k = 1/p.
    pub fn gamma_one(&self) -> f64 {
        (1.0 - self.m) / self.k
    }
}

pub fn tau_exponents(set: &ExponentSet, tau: f64) -> Result<TauExponents> {
    set.tau_exponents(tau)
}

/// max{b^μ, b^η} with 0⁰ = 1.
fn mass_factor(b: f64, mu: f64, eta: f64) -> f64 {
    b.powf(mu).max(b.powf(eta))
}

/// Scalar inputs of the localization radius.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RhoMaxInput {
    pub rho0: f64,
    #[serde(rename = "E0")]
    pub e0: f64,
    pub b0: f64,
    #[serde(rename = "L")]
    pub l: f64,
    #[serde(rename = "M")]
    pub m: f64,
    pub c_eff: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LocalizationBound {
    pub rho0: f64,
    #[serde(rename = "E0")]
    pub e0: f64,
    pub b0: f64,
    #[serde(rename = "L")]
    pub l: f64,
    #[serde(rename = "M")]
    pub m: f64,
    pub c_eff: f64,
    pub rho_max: f64,
    pub tau_star: f64,
    /// min over τ of E0^γ max{b0^μ, b0^η} / (2τ - (1+m)).
    pub tau_min_value: f64,
}

fn check_positive(name: &str, x: f64) -> Result<()> {
    if x > 0.0 && x.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!("{name} must be positive and finite, got {x}")))
    }
}

fn check_nonnegative(name: &str, x: f64) -> Result<()> {
    if x >= 0.0 && x.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!("{name} must be nonnegative and finite, got {x}")))
    }
}

/// The τ-objective E0^γ(τ) max{b0^μ(τ), b0^η(τ)} / (2τ - (1+m)).
pub fn tau_objective(set: &ExponentSet, e0: f64, b0: f64, tau: f64) -> f64 {
    match set.tau_exponents(tau) {
        Ok(t) => {
            if e0 == 0.0 {
                return 0.0;
            }
            e0.powf(t.gamma) * mass_factor(b0, t.mu, t.eta) / (2.0 * tau - (1.0 + set.m))
        }
        Err(_) => f64::INFINITY,
    }
}

/// Inner radius on which the solution must vanish.
pub fn rho_max(set: &ExponentSet, input: &RhoMaxInput) -> Result<LocalizationBound> {
    check_positive("rho0", input.rho0)?;
    check_nonnegative("E0", input.e0)?;
    check_nonnegative("b0", input.b0)?;
    check_positive("L", input.l)?;
    check_positive("M", input.m)?;
    check_positive("C_eff", input.c_eff)?;

    let bound = |rho_max, tau_star, tau_min_value| LocalizationBound {
        rho0: input.rho0,
        e0: input.e0,
        b0: input.b0,
        l: input.l,
        m: input.m,
        c_eff: input.c_eff,
        rho_max,
        tau_star,
        tau_min_value,
    };
    if input.e0 == 0.0 {
        return Ok(bound(input.rho0, 1.0, 0.0));
    }

    let taus = linspace(set.tau_lower() + TAU_GRID_OFFSET, 1.0, TAU_GRID_POINTS);
    let best = grid_then_golden(|t| tau_objective(set, input.e0, input.b0, t), &taus, &[1.0])
        .ok_or_else(|| Error::InvalidArgument("tau objective is nowhere finite".into()))?;

    let l1 = (1.0f64).max(1.0 / input.l);
    let prefactor = input.c_eff
        * input.m
        * input.m
        * l1
        * l1
        * input.rho0.powf(set.nu - 1.0).max(1.0);
    let rho_nu = (input.rho0.powf(set.nu) - prefactor * best.value).max(0.0);
    Ok(bound(rho_nu.powf(1.0 / set.nu), best.x, best.value))
}

/// Inputs of [`thresholds`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThresholdInput {
    pub rho0: f64,
    pub rho1: f64,
    #[serde(rename = "L")]
    pub l: f64,
    #[serde(rename = "M")]
    pub m: f64,
    /// L^{m+1} mass on B(x0, rho1).
    pub b1: f64,
    pub c_eff: f64,
}

/// Energy and forcing thresholds of the vanishing criterion with forcing.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Thresholds {
    pub rho0: f64,
    pub rho1: f64,
    #[serde(rename = "K")]
    pub k: f64,
    #[serde(rename = "E_star")]
    pub e_star: f64,
    pub eps_star: f64,
    pub gamma: f64,
    pub p: f64,
}

impl Thresholds {
    /// Comparison profile H(ρ) = (γ/(2K) (ρ - ρ0)₊)^{1/γ}.
    pub fn comparison(&self, rho: f64) -> f64 {
        (self.gamma / (2.0 * self.k) * (rho - self.rho0).max(0.0)).powf(1.0 / self.gamma)
    }
}

pub fn thresholds(set: &ExponentSet, input: &ThresholdInput) -> Result<Thresholds> {
    check_positive("rho0", input.rho0)?;
    check_positive("L", input.l)?;
    check_positive("M", input.m)?;
    check_positive("C_eff", input.c_eff)?;
    check_nonnegative("b1", input.b1)?;
    if !(input.rho1 > input.rho0) || !input.rho1.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "need 0 < rho0 < rho1, got rho0 = {}, rho1 = {}",
            input.rho0, input.rho1
        )));
    }
    let l1 = (1.0f64).max(1.0 / input.l);
    let t1 = set.tau_exponents(1.0)?;
    let gamma = t1.gamma;
    let k1 = input.c_eff
        * l1
        * l1
        * input.m
        * input.m
        * input.rho1.powf(set.nu - 1.0).max(1.0)
        * mass_factor(input.b1, t1.mu, t1.eta);
    let k = k1 * input.rho0.powf(-(set.nu - 1.0));
    let p = set.p;
    let p_conj = p / (p - 1.0);
    let ratio = gamma / (2.0 * k);
    let e_star = (ratio * (input.rho1 - input.rho0)).powf(1.0 / gamma);
    let two_l1m = 2.0 * l1 * input.m;
    let eps_star = ratio.powf(p) / (2.0f64.powf(p_conj) * two_l1m * two_l1m);
    Ok(Thresholds { rho0: input.rho0, rho1: input.rho1, k, e_star, eps_star, gamma, p })
}

/// Both sides of Young's inequality x y ≤ ε^{λ'} x^{λ'}/λ' + ε^{-λ} y^λ/λ.
pub fn young_bound(x: f64, y: f64, lambda: f64, eps: f64) -> Result<(f64, f64)> {
    check_nonnegative("x", x)?;
    check_nonnegative("y", y)?;
    check_positive("eps", eps)?;
    if !(lambda > 1.0) {
        return Err(Error::InvalidArgument(format!("lambda must exceed 1, got {lambda}")));
    }
    let conj = lambda / (lambda - 1.0);
    let rhs = (eps * x).powf(conj) / conj + eps.powf(-lambda) * y.powf(lambda) / lambda;
    Ok((x * y, rhs))
}

/// Relative slack for the pointwise comparisons in [`ode_compare`].
pub const COMPARE_RTOL: f64 = 1e-12;

/// Pointwise comparison of a sampled energy curve with H on [rho0, rho1].
///
/// `rho` must be increasing and end at rho1. The preconditions are
/// E(rho1) ≤ E⋆ and G ≤ H^{1-γ}/2 at every sample; the first failing sample
/// is reported as an error. Returns whether E ≤ H at every sample.
pub fn ode_compare(thr: &Thresholds, rho: &[f64], energy: &[f64], forcing: &[f64]) -> Result<bool> {
    if rho.is_empty() || rho.len() != energy.len() || rho.len() != forcing.len() {
        return Err(Error::ShapeMismatch("rho, E and G samples must have equal nonzero length".into()));
    }
    let last = rho.len() - 1;
    if energy[last] > thr.e_star * (1.0 + COMPARE_RTOL) {
        return Err(Error::PreconditionViolated {
            index: last,
            rho: rho[last],
            reason: format!("E(rho1) = {:e} exceeds E_star = {:e}", energy[last], thr.e_star),
        });
    }
    for (i, (&r, &g)) in rho.iter().zip(forcing).enumerate() {
        let cap = 0.5 * thr.comparison(r).powf(1.0 - thr.gamma);
        if g > cap * (1.0 + COMPARE_RTOL) {
            return Err(Error::PreconditionViolated {
                index: i,
                rho: r,
                reason: format!("G = {g:e} exceeds H^(1-gamma)/2 = {cap:e}"),
            });
        }
    }
    Ok(rho
        .iter()
        .zip(energy)
        .all(|(&r, &e)| e >= 0.0 && e <= thr.comparison(r) * (1.0 + COMPARE_RTOL)))
}
