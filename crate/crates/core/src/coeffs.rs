//! Coefficient admissibility, coercivity constants and the coefficient-plane atlas.
//!
//! The admissible set 𝔸 is ℂ with the closed ray {Re z ≤ 0, Im z = 0} removed.
//! Existence needs both coefficients in 𝔸 plus the sign coupling (ab) between
//! their real and imaginary parts; uniqueness is the separate pair of cases
//! checked by [`admissible_uniqueness`].

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::minimize::{grid_then_golden, linspace};

/// The coefficients (a, b, c) and exponent m of
/// `-Δu + a|u|^{m-1}u + bu + c|x|²u = F`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CoefficientPair {
    pub a: Complex64,
    pub b: Complex64,
    pub m: f64,
    #[serde(default)]
    pub c: Complex64,
}

impl CoefficientPair {
    pub fn new(a: Complex64, b: Complex64, m: f64) -> Result<Self> {
        Self::with_potential(a, b, Complex64::new(0.0, 0.0), m)
    }

    pub fn with_potential(a: Complex64, b: Complex64, c: Complex64, m: f64) -> Result<Self> {
        if !(m > 0.0 && m < 1.0) {
            return Err(Error::InvalidExponent(m));
        }
        for (name, z) in [("a", a), ("b", b), ("c", c)] {
            if !z.re.is_finite() || !z.im.is_finite() {
                return Err(Error::NonFiniteCoefficient(name));
            }
        }
        Ok(Self { a, b, m, c })
    }

    /// Re-check the invariants, e.g. after deserialization.
    pub fn validate(&self) -> Result<()> {
        Self::with_potential(self.a, self.b, self.c, self.m).map(|_| ())
    }

    pub fn has_potential(&self) -> bool {
        self.c != Complex64::new(0.0, 0.0)
    }

    /// The localization results are stated for c = 0; callers that rely on
    /// them must reject a harmonic potential explicitly.
    pub fn require_no_potential(&self) -> Result<()> {
        if self.has_potential() {
            Err(Error::InvalidArgument(format!(
                "harmonic potential c = {} is not covered by the localization results",
                self.c
            )))
        } else {
            Ok(())
        }
    }
}

/// Membership in 𝔸, with the excluded ray widened by `tol`.
pub fn in_admissible_set(z: Complex64, tol: f64) -> bool {
    !(z.re <= tol && z.im.abs() <= tol)
}

/// Existence condition (ab) with an exact boundary for 𝔸.
pub fn admissible_existence(pair: &CoefficientPair) -> bool {
    admissible_existence_with_tol(pair, 0.0)
}

pub fn admissible_existence_with_tol(pair: &CoefficientPair, tol_set: f64) -> bool {
    let (a, b) = (pair.a, pair.b);
    if !in_admissible_set(a, tol_set) || !in_admissible_set(b, tol_set) {
        return false;
    }
    let prod = a.im * b.im;
    if prod >= 0.0 {
        true
    } else {
        b.re > (b.im / a.im) * a.re
    }
}

/// Which branch of the uniqueness assumption holds, if any.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum UniquenessCase {
    /// a ≠ 0, Re a ≥ 0 and Re(a b̄) ≥ 0.
    NonzeroA,
    /// b ≠ 0, Re b ≥ 0 and a = k b with k ≥ 0.
    Proportional,
}

pub fn uniqueness_case(pair: &CoefficientPair) -> Option<UniquenessCase> {
    let (a, b) = (pair.a, pair.b);
    let zero = Complex64::new(0.0, 0.0);
    let a_bbar = a * b.conj();
    if a != zero && a.re >= 0.0 && a_bbar.re >= 0.0 {
        return Some(UniquenessCase::NonzeroA);
    }
    // a = k b, k ≥ 0  <=>  a b̄ is a nonnegative real (or a = 0)
    if b != zero && b.re >= 0.0 && (a == zero || (a_bbar.im == 0.0 && a_bbar.re >= 0.0)) {
        return Some(UniquenessCase::Proportional);
    }
    None
}

pub fn admissible_uniqueness(pair: &CoefficientPair) -> bool {
    uniqueness_case(pair).is_some()
}

/// An open interval of ℝ; `lo`/`hi` may be infinite. Empty when `lo >= hi`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LambdaInterval {
    pub lo: f64,
    pub hi: f64,
}

impl LambdaInterval {
    pub const EMPTY: LambdaInterval = LambdaInterval { lo: 0.0, hi: 0.0 };

    pub fn is_empty(&self) -> bool {
        !(self.lo < self.hi)
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lo < x && x < self.hi
    }

    fn intersect(self, other: LambdaInterval) -> LambdaInterval {
        LambdaInterval { lo: self.lo.max(other.lo), hi: self.hi.min(other.hi) }
    }
}

impl Serialize for LambdaInterval {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let bound = |x: f64| if x.is_finite() { Some(x) } else { None };
        let mut st = s.serialize_struct("LambdaInterval", 3)?;
        st.serialize_field("lo", &bound(self.lo))?;
        st.serialize_field("hi", &bound(self.hi))?;
        st.serialize_field("empty", &self.is_empty())?;
        st.end()
    }
}

/// {λ : Re z + λ Im z > 0}.
fn positivity_half_line(z: Complex64) -> LambdaInterval {
    if z.im > 0.0 {
        LambdaInterval { lo: -z.re / z.im, hi: f64::INFINITY }
    } else if z.im < 0.0 {
        LambdaInterval { lo: f64::NEG_INFINITY, hi: -z.re / z.im }
    } else if z.re > 0.0 {
        LambdaInterval { lo: f64::NEG_INFINITY, hi: f64::INFINITY }
    } else {
        LambdaInterval::EMPTY
    }
}

/// Feasible weights λ making both Re a + λ Im a and Re b + λ Im b positive.
pub fn feasible_interval(pair: &CoefficientPair) -> LambdaInterval {
    let iv = positivity_half_line(pair.a).intersect(positivity_half_line(pair.b));
    if iv.is_empty() {
        LambdaInterval::EMPTY
    } else {
        iv
    }
}

/// Witness for the coercive estimate `E + L·b + L·a ≤ M (I + J)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CoercivityCertificate {
    pub lambda: f64,
    #[serde(rename = "L")]
    pub l: f64,
    #[serde(rename = "M")]
    pub m: f64,
    pub interval: LambdaInterval,
    /// M² · max{1, 1/L²} at the chosen λ.
    pub objective: f64,
}

fn combined(pair: &CoefficientPair, lambda: f64) -> (f64, f64) {
    (pair.a.re + lambda * pair.a.im, pair.b.re + lambda * pair.b.im)
}

/// L(λ) = min(Re a + λ Im a, Re b + λ Im b).
pub fn coercivity_floor(pair: &CoefficientPair, lambda: f64) -> f64 {
    let (ca, cb) = combined(pair, lambda);
    ca.min(cb)
}

/// M(λ)² · max{1, 1/L(λ)²}, infinite outside the feasible interval.
pub fn coercivity_objective(pair: &CoefficientPair, lambda: f64) -> f64 {
    let l = coercivity_floor(pair, lambda);
    if !(l > 0.0) {
        return f64::INFINITY;
    }
    let m = 1.0 + lambda.abs();
    m * m * (1.0f64).max(1.0 / (l * l))
}

const LAMBDA_GRID: usize = 4001;

/// Construct L and M by combining the real identity with λ times the
/// imaginary one, choosing λ to minimize M² max{1, 1/L²}.
pub fn coercivity_constants(pair: &CoefficientPair) -> Result<CoercivityCertificate> {
    let interval = feasible_interval(pair);
    if interval.is_empty() {
        return Err(Error::EmptyInterval);
    }
    let f = |x: f64| coercivity_objective(pair, x);

    // kinks of the piecewise objective
    let (a, b) = (pair.a, pair.b);
    let mut kinks = vec![0.0];
    if a.im != b.im {
        kinks.push((b.re - a.re) / (a.im - b.im));
    }
    if a.im != 0.0 {
        kinks.push((1.0 - a.re) / a.im);
    }
    if b.im != 0.0 {
        kinks.push((1.0 - b.re) / b.im);
    }
    kinks.retain(|&x| x.is_finite() && interval.contains(x));

    let seed = match (interval.lo.is_finite(), interval.hi.is_finite()) {
        (true, true) => 0.5 * (interval.lo + interval.hi),
        (true, false) => interval.lo + 1.0f64.max(interval.lo.abs()),
        (false, true) => interval.hi - 1.0f64.max(interval.hi.abs()),
        (false, false) => 0.0,
    };
    let mut running_min = f(seed);
    for &k in &kinks {
        running_min = running_min.min(f(k));
    }

    // Beyond every kink and past the origin the objective is (1+|λ|)² times a
    // constant, hence increasing: expand until it exceeds twice the running min.
    let extreme_hi = kinks.iter().copied().fold(seed.max(0.0), f64::max);
    let extreme_lo = kinks.iter().copied().fold(seed.min(0.0), f64::min);
    let mut expand = |start: f64, dir: f64| -> f64 {
        let mut step = 1.0f64.max(start.abs());
        loop {
            let x = start + dir * step;
            let v = f(x);
            running_min = running_min.min(v);
            if v > 2.0 * running_min {
                return x;
            }
            step *= 2.0;
        }
    };
    let hi = if interval.hi.is_finite() { interval.hi } else { expand(extreme_hi, 1.0) };
    let lo = if interval.lo.is_finite() { interval.lo } else { expand(extreme_lo, -1.0) };

    let pts = linspace(lo, hi, LAMBDA_GRID);
    let best = grid_then_golden(f, &pts, &kinks).ok_or(Error::EmptyInterval)?;
    let lambda = best.x;
    Ok(CoercivityCertificate {
        lambda,
        l: coercivity_floor(pair, lambda),
        m: 1.0 + lambda.abs(),
        interval,
        objective: best.value,
    })
}

/// Region label for the coefficient atlas. The numeric code has bit 0 for
/// existence and bit 1 for uniqueness.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum AtlasLabel {
    Neither,
    ExistenceOnly,
    UniquenessOnly,
    Both,
}

impl AtlasLabel {
    pub fn from_flags(existence: bool, uniqueness: bool) -> Self {
        match (existence, uniqueness) {
            (false, false) => AtlasLabel::Neither,
            (true, false) => AtlasLabel::ExistenceOnly,
            (false, true) => AtlasLabel::UniquenessOnly,
            (true, true) => AtlasLabel::Both,
        }
    }

    pub fn code(self) -> u8 {
        match self {
            AtlasLabel::Neither => 0,
            AtlasLabel::ExistenceOnly => 1,
            AtlasLabel::UniquenessOnly => 2,
            AtlasLabel::Both => 3,
        }
    }
}

/// Rectangular sampling of the b-plane, endpoints included.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PlaneSampling {
    pub re: (f64, f64),
    pub im: (f64, f64),
    pub n_re: usize,
    pub n_im: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AtlasCell {
    pub re_b: f64,
    pub im_b: f64,
    pub label: AtlasLabel,
}

/// Classify every sampled b for a fixed a. Row-major in Im b, then Re b.
pub fn atlas_classify(a: Complex64, m: f64, grid: &PlaneSampling) -> Result<Vec<AtlasCell>> {
    if grid.n_re == 0 || grid.n_im == 0 {
        return Err(Error::InvalidArgument("atlas grid must be nonempty".into()));
    }
    let res = linspace(grid.re.0, grid.re.1, grid.n_re);
    let ims = linspace(grid.im.0, grid.im.1, grid.n_im);
    let mut out = Vec::with_capacity(res.len() * ims.len());
    for &im_b in &ims {
        for &re_b in &res {
            let pair = CoefficientPair::new(a, Complex64::new(re_b, im_b), m)?;
            let label =
                AtlasLabel::from_flags(admissible_existence(&pair), admissible_uniqueness(&pair));
            out.push(AtlasCell { re_b, im_b, label });
        }
    }
    Ok(out)
}

/// CSV with columns `re_b,im_b,label`.
pub fn atlas_csv(cells: &[AtlasCell]) -> String {
    let mut s = String::from("re_b,im_b,label\n");
    for c in cells {
        s.push_str(&format!("{:.17e},{:.17e},{}\n", c.re_b, c.im_b, c.label.code()));
    }
    s
}
