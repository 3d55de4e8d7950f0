//! Sampling lower bound for the interpolation-trace constant
//!
//! ```text
//! ‖u‖_{L²(S(0,ρ))} ≤ C (‖∇u‖_{L²(B)} + ρ^{-δ}‖u‖_{L^{m+1}(B)})^θ ‖u‖_{L^{m+1}(B)}^{1-θ}
//! ```
//!
//! over radial profiles on B = B(0, ρ).

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exponents::exponent_set;
use crate::grid::unit_sphere_area;
use crate::minimize::linspace;

pub const SIMPSON_INTERVALS: usize = 2048;
pub const SAFETY_FACTOR: f64 = 4.0;

fn one() -> f64 {
    1.0
}

/// Radial test profiles u(r), scaled by `scale`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum RadialProfile {
    /// (1 - r/(2ρ))^q
    PowerBump {
        q: f64,
        #[serde(default = "one")]
        scale: f64,
    },
    /// exp(-s r²)
    Gaussian {
        s: f64,
        #[serde(default = "one")]
        scale: f64,
    },
    Constant {
        #[serde(default = "one")]
        scale: f64,
    },
}

impl RadialProfile {
    /// u(r) and u'(r) on a ball of radius `rho`.
    pub fn eval(&self, r: f64, rho: f64) -> (f64, f64) {
        match *self {
            RadialProfile::PowerBump { q, scale } => {
                let t = 1.0 - r / (2.0 * rho);
                (scale * t.powf(q), -scale * q / (2.0 * rho) * t.powf(q - 1.0))
            }
            RadialProfile::Gaussian { s, scale } => {
                let e = (-s * r * r).exp();
                (scale * e, -2.0 * s * r * scale * e)
            }
            RadialProfile::Constant { scale } => (scale, 0.0),
        }
    }

    fn validate(&self) -> Result<()> {
        let ok = match *self {
            RadialProfile::PowerBump { q, scale } => q.is_finite() && q > 0.0 && scale.is_finite() && scale != 0.0,
            RadialProfile::Gaussian { s, scale } => s.is_finite() && s >= 0.0 && scale.is_finite() && scale != 0.0,
            RadialProfile::Constant { scale } => scale.is_finite() && scale != 0.0,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidArgument(format!("degenerate profile {self:?}")))
        }
    }
}

/// Power bumps q = 1..8, Gaussians with sρ² on a log grid in [1e-2, 1e2],
/// and the constant profile.
pub fn default_family(rho: f64) -> Vec<RadialProfile> {
    let mut out: Vec<RadialProfile> =
        (1..=8).map(|q| RadialProfile::PowerBump { q: q as f64, scale: 1.0 }).collect();
    for e in linspace(-2.0, 2.0, 17) {
        out.push(RadialProfile::Gaussian { s: 10f64.powf(e) / (rho * rho), scale: 1.0 });
    }
    out.push(RadialProfile::Constant { scale: 1.0 });
    out
}

fn simpson<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, n: usize) -> f64 {
    let n = n + n % 2;
    let h = (b - a) / n as f64;
    let mut s = f(a) + f(b);
    for i in 1..n {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        s += w * f(a + i as f64 * h);
    }
    s * h / 3.0
}

/// The ratio LHS/RHS for one profile.
pub fn trace_ratio(m: f64, n: usize, rho: f64, profile: &RadialProfile) -> Result<f64> {
    let set = exponent_set(m, n)?;
    if !(rho > 0.0 && rho.is_finite()) {
        return Err(Error::InvalidArgument(format!("rho must be positive, got {rho}")));
    }
    profile.validate()?;
    let omega = unit_sphere_area(n);
    let nm1 = n as i32 - 1;
    let grad = (omega * simpson(|r| profile.eval(r, rho).1.powi(2) * r.powi(nm1), 0.0, rho, SIMPSON_INTERVALS)).sqrt();
    let mass = omega * simpson(|r| profile.eval(r, rho).0.abs().powf(m + 1.0) * r.powi(nm1), 0.0, rho, SIMPSON_INTERVALS);
    let lq = mass.powf(1.0 / (m + 1.0));
    let trace = (omega * rho.powi(nm1)).sqrt() * profile.eval(rho, rho).0.abs();
    if trace == 0.0 {
        return Err(Error::InvalidArgument(format!("{profile:?} vanishes on the sphere")));
    }
    let rhs = (grad + rho.powf(-set.delta) * lq).powf(set.theta) * lq.powf(1.0 - set.theta);
    Ok(trace / rhs)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TraceEstimate {
    pub m: f64,
    #[serde(rename = "N")]
    pub n: usize,
    pub rho: f64,
    #[serde(rename = "C_lower")]
    pub c_lower: f64,
    pub family_size: usize,
    pub argmax: RadialProfile,
    /// 4·C_lower.
    #[serde(rename = "C_eff")]
    pub c_eff: f64,
}

pub fn trace_constant_estimate(m: f64, n: usize, rho: f64, family: &[RadialProfile]) -> Result<TraceEstimate> {
    if family.is_empty() {
        return Err(Error::EmptyFamily);
    }
    let ratios: Vec<f64> = family.par_iter().map(|p| trace_ratio(m, n, rho, p)).collect::<Result<_>>()?;
    let (best, c_lower) = ratios
        .iter()
        .enumerate()
        .fold((0, f64::NEG_INFINITY), |acc, (i, &r)| if r > acc.1 { (i, r) } else { acc });
    Ok(TraceEstimate {
        m,
        n,
        rho,
        c_lower,
        family_size: family.len(),
        argmax: family[best],
        c_eff: SAFETY_FACTOR * c_lower,
    })
}
