//! Closed-form radial profiles used as forcings and manufactured solutions.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::coeffs::CoefficientPair;
use crate::error::{Error, Result};
use crate::grid::{BoundaryCondition, DomainKind, Field, Grid};

/// A closed-form function of r = |x - center|, scaled by a complex amplitude.
///
/// * `Bump`: `A·((R² - r²)₊)^q`
/// * `Gaussian`: `A·exp(-s r²)`
/// * `Annulus`: `A·((w² - (r - r_mid)²)₊)^q`, a bump on a spherical shell
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Profile {
    Zero,
    Bump {
        #[serde(default)]
        center: Vec<f64>,
        radius: f64,
        power: f64,
        #[serde(with = "complex_pair")]
        amplitude: Complex64,
    },
    Gaussian {
        #[serde(default)]
        center: Vec<f64>,
        rate: f64,
        #[serde(with = "complex_pair")]
        amplitude: Complex64,
    },
    Annulus {
        #[serde(default)]
        center: Vec<f64>,
        mid: f64,
        half_width: f64,
        power: f64,
        #[serde(with = "complex_pair")]
        amplitude: Complex64,
    },
}

/// Serde adapter writing complex numbers as `[re, im]`.
pub mod complex_pair {
    use num_complex::Complex64;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(z: &Complex64, s: S) -> Result<S::Ok, S::Error> {
        [z.re, z.im].serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Complex64, D::Error> {
        let [re, im] = <[f64; 2]>::deserialize(d)?;
        Ok(Complex64::new(re, im))
    }
}

fn finite_positive(name: &str, v: f64) -> Result<()> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!("{name} must be positive and finite, got {v}")))
    }
}

impl Profile {
    pub fn bump(center: Vec<f64>, radius: f64, power: f64, amplitude: Complex64) -> Self {
        Profile::Bump { center, radius, power, amplitude }
    }

    pub fn validate(&self) -> Result<()> {
        let (center, amp) = match self {
            Profile::Zero => return Ok(()),
            Profile::Bump { center, radius, power, amplitude } => {
                finite_positive("radius", *radius)?;
                finite_positive("power", *power)?;
                (center, amplitude)
            }
            Profile::Gaussian { center, rate, amplitude } => {
                finite_positive("rate", *rate)?;
                (center, amplitude)
            }
            Profile::Annulus { center, mid, half_width, power, amplitude } => {
                finite_positive("half_width", *half_width)?;
                finite_positive("power", *power)?;
                if !mid.is_finite() || *mid < 0.0 {
                    return Err(Error::InvalidArgument(format!("annulus mid radius {mid} invalid")));
                }
                (center, amplitude)
            }
        };
        if !amp.re.is_finite() || !amp.im.is_finite() || center.iter().any(|c| !c.is_finite()) {
            return Err(Error::InvalidArgument("non-finite profile parameter".into()));
        }
        Ok(())
    }

    fn center(&self) -> &[f64] {
        match self {
            Profile::Zero => &[],
            Profile::Bump { center, .. }
            | Profile::Gaussian { center, .. }
            | Profile::Annulus { center, .. } => center,
        }
    }

    fn radius_at(&self, grid: &Grid, p: [f64; 2]) -> f64 {
        let c = self.center();
        let at = |i: usize| c.get(i).copied().unwrap_or(0.0);
        match grid.domain().kind {
            DomainKind::Radial => p[0],
            DomainKind::Interval => (p[0] - at(0)).abs(),
            DomainKind::Rectangle => ((p[0] - at(0)).powi(2) + (p[1] - at(1)).powi(2)).sqrt(),
        }
    }

    /// Value and Laplacian (in ambient dimension `n`) at distance `r`.
    pub fn value_and_laplacian(&self, r: f64, n: usize) -> (Complex64, Complex64) {
        let nf = n as f64;
        let zero = Complex64::new(0.0, 0.0);
        match *self {
            Profile::Zero => (zero, zero),
            Profile::Bump { radius, power: q, amplitude, .. } => {
                let s = radius * radius - r * r;
                if s <= 0.0 {
                    return (zero, zero);
                }
                let v = s.powf(q);
                let lap = if q == 1.0 {
                    -2.0 * nf
                } else {
                    4.0 * q * (q - 1.0) * r * r * s.powf(q - 2.0) - 2.0 * nf * q * s.powf(q - 1.0)
                };
                (amplitude * v, amplitude * lap)
            }
            Profile::Gaussian { rate, amplitude, .. } => {
                let e = (-rate * r * r).exp();
                (amplitude * e, amplitude * (e * (4.0 * rate * rate * r * r - 2.0 * nf * rate)))
            }
            Profile::Annulus { mid, half_width: w, power: q, amplitude, .. } => {
                let t = r - mid;
                let s = w * w - t * t;
                if s <= 0.0 {
                    return (zero, zero);
                }
                // f(r) = s^q, f' = -2qt s^{q-1}, f'' = 4q(q-1)t² s^{q-2} - 2q s^{q-1}
                let f1 = -2.0 * q * t * s.powf(q - 1.0);
                let f2 = if q == 1.0 {
                    -2.0
                } else {
                    4.0 * q * (q - 1.0) * t * t * s.powf(q - 2.0) - 2.0 * q * s.powf(q - 1.0)
                };
                let radial = if r > 0.0 { (nf - 1.0) / r * f1 } else { 0.0 };
                (amplitude * s.powf(q), amplitude * (f2 + radial))
            }
        }
    }

    /// Sample the profile at every node.
    pub fn sample(&self, grid: &Grid, bc: BoundaryCondition) -> Result<Field> {
        self.validate()?;
        let n = grid.domain().dimension;
        Field::from_fn(grid.clone(), bc, |p| self.value_and_laplacian(self.radius_at(grid, p), n).0)
    }
}

/// φ(z) = |z|^{m-1} z with φ(0) = 0.
pub fn phi(z: Complex64, m: f64) -> Complex64 {
    let r = z.norm();
    if r == 0.0 {
        Complex64::new(0.0, 0.0)
    } else {
        z * r.powf(m - 1.0)
    }
}

/// Nodewise `-Δu + aφ(u) + bu + c|x|²u` for a closed-form `u`.
pub fn manufactured_forcing(
    u_exact: &Profile,
    pair: &CoefficientPair,
    grid: &Grid,
    bc: BoundaryCondition,
) -> Result<Field> {
    u_exact.validate()?;
    pair.validate()?;
    let n = grid.domain().dimension;
    let values = (0..grid.len())
        .map(|k| {
            let p = grid.node(k);
            let (u, lap) = u_exact.value_and_laplacian(u_exact.radius_at(grid, p), n);
            -lap + pair.a * phi(u, pair.m) + pair.b * u + pair.c * grid.radius_sq(k) * u
        })
        .collect();
    Field::new(grid.clone(), values, bc)
}
