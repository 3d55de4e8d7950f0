//! Ball energies around a centre `x0` and the two energy identities.
//!
//! With `w(ρ) = ∫_{S(x0,ρ)} u ∇ū·n` the identities read
//!
//! ```text
//! E + Re(a)·b + Re(b)·a + Re(c)·c_mass = Re∫Fū + Re w
//!     Im(a)·b + Im(b)·a + Im(c)·c_mass = Im∫Fū − Im w
//! ```
//!
//! where `b = ∫|u|^{m+1}`, `a = ∫|u|²` and `c_mass = ∫|x|²|u|²` over the ball.

use std::fmt::Write as _;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::coeffs::{CoefficientPair, CoercivityCertificate};
use crate::error::{Error, Result};
use crate::grid::{ball_weights, discrete_gradient, sphere_flux, BoundaryCondition, Field};

pub const DEFAULT_SAMPLES: usize = 64;
const TOL_ID_FACTOR: f64 = 50.0;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EnergyProfile {
    pub x0: Vec<f64>,
    pub m: f64,
    pub rho: Vec<f64>,
    #[serde(rename = "E")]
    pub e: Vec<f64>,
    pub bmass: Vec<f64>,
    pub amass: Vec<f64>,
    pub cmass: Vec<f64>,
    #[serde(rename = "J")]
    pub j: Vec<f64>,
    pub w_re: Vec<f64>,
    pub w_im: Vec<f64>,
    #[serde(rename = "Fu_re")]
    pub fu_re: Vec<f64>,
    #[serde(rename = "Fu_im")]
    pub fu_im: Vec<f64>,
    #[serde(rename = "Eprime")]
    pub eprime: Vec<f64>,
}

impl EnergyProfile {
    pub fn len(&self) -> usize {
        self.rho.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rho.is_empty()
    }

    /// I(ρ) = |w(ρ)|.
    pub fn flux_modulus(&self) -> Vec<f64> {
        self.w_re.iter().zip(&self.w_im).map(|(a, b)| a.hypot(*b)).collect()
    }
}

/// Largest admissible sample radius: the distance to Γ for Neumann fields,
/// the farthest node otherwise.
pub fn sample_limit(u: &Field, x0: &[f64]) -> f64 {
    match u.bc {
        BoundaryCondition::Neumann => u.grid.domain().distance_to_boundary(x0),
        _ => u.grid.max_distance(x0),
    }
}

/// `count` evenly spaced radii from 2h to `rho_hi`.
pub fn sample_radii(h: f64, rho_hi: f64, count: usize) -> Result<Vec<f64>> {
    let lo = 2.0 * h;
    if !(rho_hi > lo) || count < 2 {
        return Err(Error::InvalidArgument(format!(
            "need at least two radii in [{lo}, {rho_hi}]"
        )));
    }
    Ok(crate::minimize::linspace(lo, rho_hi, count))
}

/// Derivative on a possibly non-uniform increasing grid: three-point
/// centred inside, one-sided at the ends.
fn derivative(x: &[f64], y: &[f64]) -> Vec<f64> {
    let n = x.len();
    if n < 2 {
        return vec![0.0; n];
    }
    (0..n)
        .map(|i| {
            if i == 0 {
                (y[1] - y[0]) / (x[1] - x[0])
            } else if i + 1 == n {
                (y[n - 1] - y[n - 2]) / (x[n - 1] - x[n - 2])
            } else {
                let (h0, h1) = (x[i] - x[i - 1], x[i + 1] - x[i]);
                (y[i + 1] * h0 * h0 - y[i - 1] * h1 * h1 + y[i] * (h1 * h1 - h0 * h0))
                    / (h0 * h1 * (h0 + h1))
            }
        })
        .collect()
}

/// Sample every ball quantity at the radii `rho`.
pub fn compute_profile(u: &Field, f: &Field, x0: &[f64], rho: &[f64], m: f64) -> Result<EnergyProfile> {
    if !u.same_grid(f) {
        return Err(Error::ShapeMismatch("u and F live on different grids".into()));
    }
    let grid = &u.grid;
    let h = grid.h();
    if rho.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::InvalidArgument("sample radii must be strictly increasing".into()));
    }
    if let Some(&r) = rho.iter().find(|&&r| !(r >= 2.0 * h * (1.0 - 1e-12))) {
        return Err(Error::RadiusTooSmall { rho: r, min: 2.0 * h });
    }
    if u.bc == BoundaryCondition::Neumann {
        let limit = sample_limit(u, x0);
        if let Some(&r) = rho.iter().find(|&&r| r >= limit) {
            return Err(Error::InvalidArgument(format!(
                "radius {r} reaches the boundary (distance {limit}) of a Neumann field"
            )));
        }
    }
    let grad = discrete_gradient(u)?;
    let grad_sq = grad.norm_sq_density();
    let bdens: Vec<f64> = u.values.iter().map(|z| z.norm().powf(m + 1.0)).collect();
    let adens: Vec<f64> = u.values.iter().map(|z| z.norm_sqr()).collect();
    let cdens: Vec<f64> = (0..grid.len()).map(|k| grid.radius_sq(k) * adens[k]).collect();
    let jdens: Vec<f64> = u.values.iter().zip(&f.values).map(|(a, b)| a.norm() * b.norm()).collect();
    let fudens: Vec<Complex64> = u.values.iter().zip(&f.values).map(|(a, b)| b * a.conj()).collect();

    let rows: Vec<[f64; 9]> = rho
        .par_iter()
        .map(|&r| {
            let bw = ball_weights(grid, x0, r)?;
            let w = match sphere_flux(u, &grad, x0, r) {
                Ok(w) => w,
                Err(Error::SphereOutsideGrid { .. }) if u.bc != BoundaryCondition::Neumann => {
                    Complex64::new(0.0, 0.0)
                }
                Err(e) => return Err(e),
            };
            let fu = bw.integrate_complex(&fudens);
            Ok([
                bw.integrate(&grad_sq),
                bw.integrate(&bdens),
                bw.integrate(&adens),
                bw.integrate(&cdens),
                bw.integrate(&jdens),
                w.re,
                w.im,
                fu.re,
                fu.im,
            ])
        })
        .collect::<Result<_>>()?;
    let col = |i: usize| rows.iter().map(|r| r[i]).collect::<Vec<f64>>();
    let e = col(0);
    Ok(EnergyProfile {
        x0: x0.to_vec(),
        m,
        rho: rho.to_vec(),
        eprime: derivative(rho, &e),
        e,
        bmass: col(1),
        amass: col(2),
        cmass: col(3),
        j: col(4),
        w_re: col(5),
        w_im: col(6),
        fu_re: col(7),
        fu_im: col(8),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IdentityResiduals {
    pub residual_re: Vec<f64>,
    pub residual_im: Vec<f64>,
    pub max_re: f64,
    pub max_im: f64,
}

impl IdentityResiduals {
    pub fn max(&self) -> f64 {
        self.max_re.max(self.max_im)
    }
}

fn max_abs(v: &[f64]) -> f64 {
    v.iter().map(|x| x.abs()).fold(0.0, f64::max)
}

pub fn verify_identities(profile: &EnergyProfile, pair: &CoefficientPair) -> IdentityResiduals {
    let (a, b, c) = (pair.a, pair.b, pair.c);
    let n = profile.len();
    let residual_re: Vec<f64> = (0..n)
        .map(|i| {
            profile.e[i] + a.re * profile.bmass[i] + b.re * profile.amass[i] + c.re * profile.cmass[i]
                - profile.fu_re[i]
                - profile.w_re[i]
        })
        .collect();
    let residual_im: Vec<f64> = (0..n)
        .map(|i| {
            a.im * profile.bmass[i] + b.im * profile.amass[i] + c.im * profile.cmass[i] - profile.fu_im[i]
                + profile.w_im[i]
        })
        .collect();
    IdentityResiduals { max_re: max_abs(&residual_re), max_im: max_abs(&residual_im), residual_re, residual_im }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MarginCurve {
    pub margin: Vec<f64>,
    pub min_margin: f64,
    pub with_forcing: bool,
}

impl MarginCurve {
    pub fn holds(&self, tol: f64) -> bool {
        self.min_margin >= -tol
    }
}

/// margin(ρ) = M(I + [J]) − (E + L·b + [L·a]).
pub fn verify_inequality(profile: &EnergyProfile, cert: &CoercivityCertificate, with_forcing: bool) -> MarginCurve {
    let flux = profile.flux_modulus();
    let margin: Vec<f64> = (0..profile.len())
        .map(|i| {
            let (rhs, lhs) = if with_forcing {
                (flux[i] + profile.j[i], profile.e[i] + cert.l * (profile.bmass[i] + profile.amass[i]))
            } else {
                (flux[i], profile.e[i] + cert.l * profile.bmass[i])
            };
            cert.m * rhs - lhs
        })
        .collect();
    let min_margin = margin.iter().copied().fold(f64::INFINITY, f64::min);
    MarginCurve { min_margin: if margin.is_empty() { 0.0 } else { min_margin }, margin, with_forcing }
}

/// tol_id(h) = 50·h·(1 + ‖u‖²_{H¹,h}).
pub fn tol_id(h: f64, h1_norm_sq: f64) -> f64 {
    TOL_ID_FACTOR * h * (1.0 + h1_norm_sq)
}

pub fn tol_id_for(u: &Field) -> Result<f64> {
    Ok(tol_id(u.grid.h(), u.h1_norm_sq()?))
}

/// CSV with columns rho,E,b,a,J,w_re,w_im,Fu_re,Fu_im,Eprime,residual_re,residual_im,margin.
pub fn profile_csv(profile: &EnergyProfile, residuals: &IdentityResiduals, margins: &MarginCurve) -> String {
    let mut s = String::from("rho,E,b,a,J,w_re,w_im,Fu_re,Fu_im,Eprime,residual_re,residual_im,margin\n");
    for i in 0..profile.len() {
        let row = [
            profile.rho[i],
            profile.e[i],
            profile.bmass[i],
            profile.amass[i],
            profile.j[i],
            profile.w_re[i],
            profile.w_im[i],
            profile.fu_re[i],
            profile.fu_im[i],
            profile.eprime[i],
            residuals.residual_re[i],
            residuals.residual_im[i],
            margins.margin[i],
        ];
        let cells: Vec<String> = row.iter().map(|v| format!("{v:.17e}")).collect();
        let _ = writeln!(s, "{}", cells.join(","));
    }
    s
}
