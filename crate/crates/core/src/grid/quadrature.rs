use num_complex::Complex64;

use super::{radial_shell, DomainKind, Field, GradientField, Grid};
use crate::error::{Error, Result};

/// Subsamples per axis for cells straddling a circle.
const COVERAGE_SUBSAMPLES: usize = 4;
const MIN_ANGULAR_SAMPLES: usize = 64;

/// Quadrature weights of Ω ∩ B(x0, ρ): node index and cell measure times
/// coverage fraction.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct BallWeights {
    pub entries: Vec<(usize, f64)>,
}

impl BallWeights {
    pub fn integrate(&self, density: &[f64]) -> f64 {
        self.entries.iter().map(|&(k, w)| w * density[k]).sum()
    }

    pub fn integrate_complex(&self, density: &[Complex64]) -> Complex64 {
        self.entries.iter().map(|&(k, w)| density[k] * w).sum()
    }

    pub fn measure(&self) -> f64 {
        self.entries.iter().map(|&(_, w)| w).sum()
    }
}

fn index_window(grid: &Grid, axis: usize, lo: f64, hi: f64) -> std::ops::Range<usize> {
    let (start, _) = grid.domain().bounds[axis];
    let n = grid.shape()[axis];
    let h = grid.h();
    let first = ((lo - start) / h - 1.0).floor().max(0.0) as usize;
    let last = ((hi - start) / h + 2.0).ceil().max(0.0) as usize;
    first.min(n)..last.min(n)
}

/// Quadrature weights for the ball B(x0, ρ) intersected with the domain.
pub fn ball_weights(grid: &Grid, x0: &[f64], rho: f64) -> Result<BallWeights> {
    grid.check_point(x0)?;
    if !(rho >= 0.0) {
        return Err(Error::InvalidArgument(format!("ball radius must be nonnegative, got {rho}")));
    }
    let mut entries = Vec::new();
    match grid.domain().kind {
        DomainKind::Interval => {
            let (lo, hi) = (x0[0] - rho, x0[0] + rho);
            for i in index_window(grid, 0, lo, hi) {
                let (a, b) = grid.cell(0, i);
                let len = b.min(hi) - a.max(lo);
                if len > 0.0 {
                    entries.push((i, len));
                }
            }
        }
        DomainKind::Radial => {
            let n = grid.domain().dimension;
            for i in index_window(grid, 0, 0.0, rho) {
                let (a, b) = grid.cell(0, i);
                let w = radial_shell(n, a, b.min(rho));
                if w > 0.0 {
                    entries.push((i, w));
                }
            }
        }
        DomainKind::Rectangle => {
            let r2 = rho * rho;
            for j in index_window(grid, 1, x0[1] - rho, x0[1] + rho) {
                let (c, d) = grid.cell(1, j);
                for i in index_window(grid, 0, x0[0] - rho, x0[0] + rho) {
                    let (a, b) = grid.cell(0, i);
                    let near_x = (a - x0[0]).max(x0[0] - b).max(0.0);
                    let near_y = (c - x0[1]).max(x0[1] - d).max(0.0);
                    if near_x * near_x + near_y * near_y >= r2 {
                        continue;
                    }
                    let far_x = (a - x0[0]).abs().max((b - x0[0]).abs());
                    let far_y = (c - x0[1]).abs().max((d - x0[1]).abs());
                    let area = (b - a) * (d - c);
                    let fraction = if far_x * far_x + far_y * far_y <= r2 {
                        1.0
                    } else {
                        let s = COVERAGE_SUBSAMPLES;
                        let mut inside = 0usize;
                        for sj in 0..s {
                            let y = c + (d - c) * (sj as f64 + 0.5) / s as f64;
                            for si in 0..s {
                                let x = a + (b - a) * (si as f64 + 0.5) / s as f64;
                                if (x - x0[0]).powi(2) + (y - x0[1]).powi(2) < r2 {
                                    inside += 1;
                                }
                            }
                        }
                        inside as f64 / (s * s) as f64
                    };
                    if fraction > 0.0 {
                        entries.push((grid.index(i, j), area * fraction));
                    }
                }
            }
        }
    }
    Ok(BallWeights { entries })
}

/// ∫_{Ω ∩ B(x0, ρ)} density.
pub fn ball_integral(grid: &Grid, density: &[f64], x0: &[f64], rho: f64) -> Result<f64> {
    if density.len() != grid.len() {
        return Err(Error::ShapeMismatch(format!(
            "density has {} values, grid has {} nodes",
            density.len(),
            grid.len()
        )));
    }
    Ok(ball_weights(grid, x0, rho)?.integrate(density))
}

fn lerp_axis(grid: &Grid, axis: usize, x: f64) -> (usize, f64) {
    let (lo, _) = grid.domain().bounds[axis];
    let n = grid.shape()[axis];
    let s = (x - lo) / grid.h();
    let i = (s.floor().max(0.0) as usize).min(n - 2);
    (i, (s - i as f64).clamp(0.0, 1.0))
}

fn interp_1d(grid: &Grid, values: &[Complex64], x: f64) -> Complex64 {
    let (i, t) = lerp_axis(grid, 0, x);
    values[i] * (1.0 - t) + values[i + 1] * t
}

fn interp_2d(grid: &Grid, values: &[Complex64], x: f64, y: f64) -> Complex64 {
    let (i, s) = lerp_axis(grid, 0, x);
    let (j, t) = lerp_axis(grid, 1, y);
    let v = |a, b| values[grid.index(a, b)];
    v(i, j) * ((1.0 - s) * (1.0 - t))
        + v(i + 1, j) * (s * (1.0 - t))
        + v(i, j + 1) * ((1.0 - s) * t)
        + v(i + 1, j + 1) * (s * t)
}

/// w(ρ) = ∫_{Ω ∩ S(x0, ρ)} u ∇ū · (x - x0)/|x - x0| dσ.
///
/// Points of the sphere outside the domain contribute nothing (zero
/// extension). Radii below 2h are rejected.
pub fn sphere_flux(u: &Field, grad: &GradientField, x0: &[f64], rho: f64) -> Result<Complex64> {
    let grid = &u.grid;
    grid.check_point(x0)?;
    if grad.grid != *grid {
        return Err(Error::ShapeMismatch("gradient and field live on different grids".into()));
    }
    let min = 2.0 * grid.h();
    if !(rho >= min * (1.0 - 1e-12)) {
        return Err(Error::RadiusTooSmall { rho, min });
    }
    let outside = || Error::SphereOutsideGrid { x0: x0.to_vec(), rho };
    let domain = grid.domain();
    match domain.kind {
        DomainKind::Interval => {
            let mut total = Complex64::new(0.0, 0.0);
            let mut hit = false;
            for sign in [1.0, -1.0] {
                let x = x0[0] + sign * rho;
                if domain.contains(&[x]) {
                    hit = true;
                    let uu = interp_1d(grid, &u.values, x);
                    let gg = interp_1d(grid, &grad.components[0], x);
                    total += uu * gg.conj() * sign;
                }
            }
            if hit {
                Ok(total)
            } else {
                Err(outside())
            }
        }
        DomainKind::Radial => {
            if rho > domain.bounds[0].1 {
                return Err(outside());
            }
            let n = domain.dimension;
            let area = super::unit_sphere_area(n) * rho.powi(n as i32 - 1);
            let uu = interp_1d(grid, &u.values, rho);
            let gg = interp_1d(grid, &grad.components[0], rho);
            Ok(uu * gg.conj() * area)
        }
        DomainKind::Rectangle => {
            let samples = MIN_ANGULAR_SAMPLES.max((2.0 * std::f64::consts::PI * rho / grid.h()).ceil() as usize);
            let dtheta = 2.0 * std::f64::consts::PI / samples as f64;
            let mut total = Complex64::new(0.0, 0.0);
            let mut hit = false;
            for k in 0..samples {
                let (s, c) = (k as f64 * dtheta).sin_cos();
                let (x, y) = (x0[0] + rho * c, x0[1] + rho * s);
                if !domain.contains(&[x, y]) {
                    continue;
                }
                hit = true;
                let uu = interp_2d(grid, &u.values, x, y);
                let gn = interp_2d(grid, &grad.components[0], x, y) * c
                    + interp_2d(grid, &grad.components[1], x, y) * s;
                total += uu * gn.conj();
            }
            if hit {
                Ok(total * (rho * dtheta))
            } else {
                Err(outside())
            }
        }
    }
}
