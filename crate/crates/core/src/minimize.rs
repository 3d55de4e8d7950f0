//! One-dimensional minimization: dense grid scan followed by golden-section polish.

const INV_PHI: f64 = 0.618_033_988_749_894_9;

/// Minimizer found by [`golden_section`] or [`grid_then_golden`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Minimum {
    pub x: f64,
    pub value: f64,
}

/// Golden-section search on `[lo, hi]` for a unimodal `f`.
///
/// Stops when the bracket is narrower than `tol * (1 + |x|)` or after
/// `max_iter` reductions.
pub fn golden_section<F>(f: F, mut lo: f64, mut hi: f64, tol: f64, max_iter: usize) -> Minimum
where
    F: Fn(f64) -> f64,
{
    let mut x1 = hi - INV_PHI * (hi - lo);
    let mut x2 = lo + INV_PHI * (hi - lo);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    for _ in 0..max_iter {
        if (hi - lo).abs() <= tol * (1.0 + x1.abs().max(x2.abs())) {
            break;
        }
        if f1 <= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - INV_PHI * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + INV_PHI * (hi - lo);
            f2 = f(x2);
        }
    }
    if f1 <= f2 {
        Minimum { x: x1, value: f1 }
    } else {
        Minimum { x: x2, value: f2 }
    }
}

/// Scan `points` (sorted ascending), then polish the best sample by
/// golden-section search between its neighbours. Extra `candidates` (kinks
/// of a piecewise objective, say) are evaluated too and win on ties.
pub fn grid_then_golden<F>(f: F, points: &[f64], candidates: &[f64]) -> Option<Minimum>
where
    F: Fn(f64) -> f64,
{
    let mut best: Option<(usize, f64)> = None;
    for (i, &x) in points.iter().enumerate() {
        let v = f(x);
        if !v.is_finite() {
            continue;
        }
        if best.map_or(true, |(_, bv)| v < bv) {
            best = Some((i, v));
        }
    }
    let (i, v) = best?;
    let lo = points[i.saturating_sub(1)];
    let hi = points[(i + 1).min(points.len() - 1)];
    let mut result = Minimum { x: points[i], value: v };
    if hi > lo {
        let polished = golden_section(&f, lo, hi, 1e-13, 200);
        if polished.value.is_finite() && polished.value < result.value {
            result = polished;
        }
    }
    for &x in candidates {
        if x < points[0] || x > points[points.len() - 1] {
            continue;
        }
        let v = f(x);
        if v.is_finite() && v <= result.value {
            result = Minimum { x, value: v };
        }
    }
    Some(result)
}

/// `n` evenly spaced points covering `[lo, hi]`, endpoints included.
pub fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![lo],
        _ => (0..n)
            .map(|i| {
                if i == n - 1 {
                    hi
                } else {
                    lo + (hi - lo) * i as f64 / (n - 1) as f64
                }
            })
            .collect(),
    }
}
