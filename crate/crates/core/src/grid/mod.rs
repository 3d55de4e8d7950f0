//! Uniform node-centred grids over intervals, rectangles and radial domains.
//!
//! Node `i` on an axis sits at `lo + i*h` and owns the cell
//! `[x_i - h/2, x_i + h/2]` clipped to the domain, so boundary nodes carry
//! half cells. Radial grids start at r = 0 and weight cells by the sphere
//! area `ω_N r^{N-1}`.

mod quadrature;
mod snapshot;

pub use quadrature::{ball_integral, ball_weights, sphere_flux, BallWeights};
pub use snapshot::{read_snapshot, write_snapshot};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DomainKind {
    Interval,
    Rectangle,
    Radial,
}

impl DomainKind {
    pub fn as_str(self) -> &'static str {
        match self {
            DomainKind::Interval => "interval",
            DomainKind::Rectangle => "rectangle",
            DomainKind::Radial => "radial",
        }
    }
}

/// Computational domain. `bounds` holds one closed interval per grid axis;
/// `dimension` is the ambient dimension N (the Laplacian's dimension for
/// radial domains).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Domain {
    pub kind: DomainKind,
    pub bounds: Vec<(f64, f64)>,
    pub dimension: usize,
}

fn check_bounds(lo: f64, hi: f64) -> Result<()> {
    if lo.is_finite() && hi.is_finite() && lo < hi {
        Ok(())
    } else {
        Err(Error::InvalidDomain(format!("empty or non-finite interval [{lo}, {hi}]")))
    }
}

impl Domain {
    pub fn interval(lo: f64, hi: f64) -> Result<Self> {
        check_bounds(lo, hi)?;
        Ok(Domain { kind: DomainKind::Interval, bounds: vec![(lo, hi)], dimension: 1 })
    }

    pub fn rectangle(x: (f64, f64), y: (f64, f64)) -> Result<Self> {
        check_bounds(x.0, x.1)?;
        check_bounds(y.0, y.1)?;
        Ok(Domain { kind: DomainKind::Rectangle, bounds: vec![x, y], dimension: 2 })
    }

    pub fn radial(radius: f64, dimension: usize) -> Result<Self> {
        check_bounds(0.0, radius)?;
        if dimension < 1 {
            return Err(Error::InvalidDimension(dimension));
        }
        Ok(Domain { kind: DomainKind::Radial, bounds: vec![(0.0, radius)], dimension })
    }

    pub fn validate(&self) -> Result<()> {
        let rebuilt = match self.kind {
            DomainKind::Interval if self.bounds.len() == 1 => {
                Domain::interval(self.bounds[0].0, self.bounds[0].1)?
            }
            DomainKind::Rectangle if self.bounds.len() == 2 => {
                Domain::rectangle(self.bounds[0], self.bounds[1])?
            }
            DomainKind::Radial if self.bounds.len() == 1 && self.bounds[0].0 == 0.0 => {
                Domain::radial(self.bounds[0].1, self.dimension)?
            }
            _ => return Err(Error::InvalidDomain(format!("inconsistent domain {self:?}"))),
        };
        if rebuilt == *self {
            Ok(())
        } else {
            Err(Error::InvalidDomain(format!("inconsistent domain {self:?}")))
        }
    }

    /// Number of grid axes (1 for intervals and radial domains).
    pub fn axes(&self) -> usize {
        self.bounds.len()
    }

    /// Closed-domain membership of a point given in grid coordinates.
    pub fn contains(&self, p: &[f64]) -> bool {
        self.bounds.iter().zip(p).all(|(&(lo, hi), &x)| x >= lo && x <= hi)
    }

    /// Distance from an interior point to the boundary Γ.
    pub fn distance_to_boundary(&self, p: &[f64]) -> f64 {
        match self.kind {
            DomainKind::Radial => self.bounds[0].1 - p[0].abs(),
            _ => self
                .bounds
                .iter()
                .zip(p)
                .map(|(&(lo, hi), &x)| (x - lo).min(hi - x))
                .fold(f64::INFINITY, f64::min),
        }
    }
}

/// Surface area ω_N of the unit sphere in ℝ^N (ω_1 = 2 counts two points).
pub fn unit_sphere_area(n: usize) -> f64 {
    use std::f64::consts::PI;
    match n {
        0 => 0.0,
        1 => 2.0,
        2 => 2.0 * PI,
        _ => 2.0 * PI * unit_sphere_area(n - 2) / (n as f64 - 2.0),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum BoundaryCondition {
    Dirichlet,
    Neumann,
    #[default]
    None,
}

impl BoundaryCondition {
    pub fn as_str(self) -> &'static str {
        match self {
            BoundaryCondition::Dirichlet => "dirichlet",
            BoundaryCondition::Neumann => "neumann",
            BoundaryCondition::None => "none",
        }
    }
}

/// A uniform grid with equal spacing on every axis.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    domain: Domain,
    h: f64,
    shape: [usize; 2],
}

const SPACING_RTOL: f64 = 1e-9;

fn cell_count(len: f64, h: f64) -> Result<usize> {
    let cells = (len / h).round();
    if cells < 1.0 || ((cells * h - len).abs() > SPACING_RTOL * len) {
        return Err(Error::InvalidDomain(format!(
            "spacing h = {h} does not divide axis length {len}"
        )));
    }
    Ok(cells as usize)
}

impl Grid {
    /// Build the grid; every axis length must be an integer multiple of `h`.
    pub fn new(domain: Domain, h: f64) -> Result<Self> {
        domain.validate()?;
        if !(h > 0.0 && h.is_finite()) {
            return Err(Error::InvalidArgument(format!("grid spacing must be positive, got {h}")));
        }
        let (lo, hi) = domain.bounds[0];
        let cx = cell_count(hi - lo, h)?;
        let h = (hi - lo) / cx as f64;
        let shape = if domain.axes() == 2 {
            let (ylo, yhi) = domain.bounds[1];
            [cx + 1, cell_count(yhi - ylo, h)? + 1]
        } else {
            [cx + 1, 1]
        };
        Ok(Grid { domain, h, shape })
    }

    pub fn domain(&self) -> &Domain {
        &self.domain
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    /// Nodes per axis; the second entry is 1 on one-axis grids.
    pub fn shape(&self) -> [usize; 2] {
        self.shape
    }

    pub fn axes(&self) -> usize {
        self.domain.axes()
    }

    pub fn len(&self) -> usize {
        self.shape[0] * self.shape[1]
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn index(&self, i: usize, j: usize) -> usize {
        i + self.shape[0] * j
    }

    pub fn split_index(&self, idx: usize) -> (usize, usize) {
        (idx % self.shape[0], idx / self.shape[0])
    }

    pub fn coord(&self, axis: usize, i: usize) -> f64 {
        let (lo, hi) = self.domain.bounds[axis];
        if i + 1 == self.shape[axis] {
            hi
        } else {
            lo + i as f64 * self.h
        }
    }

    /// Grid coordinates of node `idx` (second entry 0 on one-axis grids).
    pub fn node(&self, idx: usize) -> [f64; 2] {
        let (i, j) = self.split_index(idx);
        if self.axes() == 2 {
            [self.coord(0, i), self.coord(1, j)]
        } else {
            [self.coord(0, i), 0.0]
        }
    }

    /// |x|² of the node in ambient coordinates.
    pub fn radius_sq(&self, idx: usize) -> f64 {
        let p = self.node(idx);
        p[0] * p[0] + p[1] * p[1]
    }

    /// Cell of node `i` along `axis`, clipped to the domain.
    pub fn cell(&self, axis: usize, i: usize) -> (f64, f64) {
        let (lo, hi) = self.domain.bounds[axis];
        let x = self.coord(axis, i);
        ((x - 0.5 * self.h).max(lo), (x + 0.5 * self.h).min(hi))
    }

    /// Measure of the cell owned by node `idx` (with the radial weight).
    pub fn cell_measure(&self, idx: usize) -> f64 {
        let (i, j) = self.split_index(idx);
        let (a, b) = self.cell(0, i);
        match self.domain.kind {
            DomainKind::Interval => b - a,
            DomainKind::Rectangle => {
                let (c, d) = self.cell(1, j);
                (b - a) * (d - c)
            }
            DomainKind::Radial => radial_shell(self.domain.dimension, a, b),
        }
    }

    pub fn cell_measures(&self) -> Vec<f64> {
        (0..self.len()).map(|i| self.cell_measure(i)).collect()
    }

    /// Whether node `idx` lies on the outer boundary Γ (r = R for radial grids).
    pub fn is_boundary(&self, idx: usize) -> bool {
        let (i, j) = self.split_index(idx);
        match self.domain.kind {
            DomainKind::Interval => i == 0 || i + 1 == self.shape[0],
            DomainKind::Radial => i + 1 == self.shape[0],
            DomainKind::Rectangle => {
                i == 0 || j == 0 || i + 1 == self.shape[0] || j + 1 == self.shape[1]
            }
        }
    }

    /// Largest distance from `x0` to any node.
    pub fn max_distance(&self, x0: &[f64]) -> f64 {
        (0..self.len()).map(|k| self.distance(x0, k)).fold(0.0, f64::max)
    }

    /// Distance from `x0` (grid coordinates) to node `idx`.
    pub fn distance(&self, x0: &[f64], idx: usize) -> f64 {
        let p = self.node(idx);
        match self.axes() {
            1 => (p[0] - x0[0]).abs(),
            _ => ((p[0] - x0[0]).powi(2) + (p[1] - x0[1]).powi(2)).sqrt(),
        }
    }

    pub(crate) fn check_point(&self, x0: &[f64]) -> Result<()> {
        if x0.len() != self.axes() || !x0.iter().all(|x| x.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "centre {x0:?} must have {} finite coordinate(s)",
                self.axes()
            )));
        }
        if self.domain.kind == DomainKind::Radial && x0[0] != 0.0 {
            return Err(Error::InvalidArgument("radial grids only support centre x0 = 0".into()));
        }
        Ok(())
    }
}

/// ω_N ∫_a^b r^{N-1} dr.
pub(crate) fn radial_shell(n: usize, a: f64, b: f64) -> f64 {
    if b <= a {
        return 0.0;
    }
    let nf = n as f64;
    unit_sphere_area(n) * (b.powf(nf) - a.powf(nf)) / nf
}

/// A complex grid function (u or F) with its boundary condition tag.
#[derive(Debug, Clone, PartialEq)]
pub struct Field {
    pub grid: Grid,
    pub values: Vec<Complex64>,
    pub bc: BoundaryCondition,
}

impl Field {
    pub fn new(grid: Grid, values: Vec<Complex64>, bc: BoundaryCondition) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::ShapeMismatch(format!(
                "{} values for a grid with {} nodes",
                values.len(),
                grid.len()
            )));
        }
        if let Some(k) = values.iter().position(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFiniteValue(k));
        }
        Ok(Field { grid, values, bc })
    }

    pub fn zeros(grid: Grid, bc: BoundaryCondition) -> Self {
        let n = grid.len();
        Field { grid, values: vec![Complex64::new(0.0, 0.0); n], bc }
    }

    /// Sample `f` at every node (grid coordinates).
    pub fn from_fn<F>(grid: Grid, bc: BoundaryCondition, f: F) -> Result<Self>
    where
        F: Fn([f64; 2]) -> Complex64,
    {
        let values = (0..grid.len()).map(|k| f(grid.node(k))).collect();
        Field::new(grid, values, bc)
    }

    pub fn same_grid(&self, other: &Field) -> bool {
        self.grid == other.grid
    }

    /// Discrete ‖·‖²_{L²} with cell-measure weights.
    pub fn l2_norm_sq(&self) -> f64 {
        weighted_norm_sq(&self.grid, &self.values)
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// ∫|u|^q with cell-measure weights.
    pub fn lq_integral(&self, q: f64) -> f64 {
        self.values
            .iter()
            .enumerate()
            .map(|(k, z)| self.grid.cell_measure(k) * z.norm().powf(q))
            .sum()
    }

    /// Discrete ‖u‖²_{H¹} = ‖∇_h u‖² + ‖u‖².
    pub fn h1_norm_sq(&self) -> Result<f64> {
        let g = discrete_gradient(self)?;
        Ok(g.norm_sq_density().iter().zip(self.grid.cell_measures()).map(|(d, w)| d * w).sum::<f64>()
            + self.l2_norm_sq())
    }
}

pub(crate) fn weighted_norm_sq(grid: &Grid, values: &[Complex64]) -> f64 {
    values.iter().enumerate().map(|(k, z)| grid.cell_measure(k) * z.norm_sqr()).sum()
}

/// Per-axis derivatives of a field (∂/∂r on radial grids).
#[derive(Debug, Clone, PartialEq)]
pub struct GradientField {
    pub grid: Grid,
    pub components: Vec<Vec<Complex64>>,
}

impl GradientField {
    /// |∇u|² at every node.
    pub fn norm_sq_density(&self) -> Vec<f64> {
        (0..self.grid.len())
            .map(|k| self.components.iter().map(|c| c[k].norm_sqr()).sum())
            .collect()
    }
}

/// Second-order differences: centred inside, one-sided at the ends.
pub fn discrete_gradient(u: &Field) -> Result<GradientField> {
    let grid = &u.grid;
    let shape = grid.shape();
    for axis in 0..grid.axes() {
        if shape[axis] < 3 {
            return Err(Error::GridTooCoarse { axis, nodes: shape[axis] });
        }
    }
    let h = grid.h();
    let components = (0..grid.axes())
        .map(|axis| {
            let n = shape[axis];
            (0..grid.len())
                .map(|k| {
                    let (i, j) = grid.split_index(k);
                    let pos = if axis == 0 { i } else { j };
                    let at = |p: usize| {
                        if axis == 0 {
                            u.values[grid.index(p, j)]
                        } else {
                            u.values[grid.index(i, p)]
                        }
                    };
                    if pos == 0 {
                        (-3.0 * at(0) + 4.0 * at(1) - at(2)) / (2.0 * h)
                    } else if pos + 1 == n {
                        (3.0 * at(n - 1) - 4.0 * at(n - 2) + at(n - 3)) / (2.0 * h)
                    } else {
                        (at(pos + 1) - at(pos - 1)) / (2.0 * h)
                    }
                })
                .collect()
        })
        .collect();
    Ok(GradientField { grid: grid.clone(), components })
}
