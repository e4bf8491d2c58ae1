//! The width/τ system `x + y = a`, `x⁻² + y⁻² = b`.
//!
//! On a circle where both the projection width and `τ_{K*}` are constant,
//! the support values `x = h(θ)` and `y = h(−θ)` satisfy this system. Clearing
//! denominators gives the quartic `b·x²(a − x)² − (x − a)² − x² = 0`, so `h`
//! takes at most four values there.
//!
//! Real roots are isolated by recursion on the derivative: between
//! consecutive critical points a polynomial is monotone, so each sign change
//! brackets exactly one root, which bisection then pins to full precision.

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct QuarticSystemSolution {
    pub a: f64,
    pub b: f64,
    /// `(x, a − x)` pairs, sorted by `x`.
    pub pairs: Vec<(f64, f64)>,
    /// `|x⁻² + y⁻² − b|` per pair.
    pub residuals: Vec<f64>,
}

/// Cells used by the sign-change fallback scan of `(0, a)`.
pub const FALLBACK_CELLS: usize = 10_000;

/// Horner evaluation; `coeffs` in ascending degree.
pub fn eval_poly(coeffs: &[f64], x: f64) -> f64 {
    coeffs.iter().rev().fold(0.0, |acc, &c| acc * x + c)
}

/// Running error bound for Horner evaluation at `x`.
fn eval_error_bound(coeffs: &[f64], x: f64) -> f64 {
    let ax = x.abs();
    let magnitude = coeffs.iter().rev().fold(0.0, |acc, &c| acc * ax + c.abs());
    4.0 * (coeffs.len() as f64) * f64::EPSILON * magnitude
}

fn derivative(coeffs: &[f64]) -> Vec<f64> {
    coeffs
        .iter()
        .enumerate()
        .skip(1)
        .map(|(i, &c)| i as f64 * c)
        .collect()
}

fn bisect(coeffs: &[f64], mut lo: f64, mut hi: f64) -> f64 {
    let mut flo = eval_poly(coeffs, lo);
    for _ in 0..2100 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let fm = eval_poly(coeffs, mid);
        if fm == 0.0 {
            return mid;
        }
        if (fm < 0.0) == (flo < 0.0) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    let fhi = eval_poly(coeffs, hi);
    if flo.abs() <= fhi.abs() {
        lo
    } else {
        hi
    }
}

/// Real roots with multiplicity, ascending; `coeffs` ascending with a
/// non-zero leading entry.
fn real_roots(coeffs: &[f64]) -> Vec<f64> {
    let degree = coeffs.len() - 1;
    let lead = coeffs[degree];
    if degree == 0 {
        return Vec::new();
    }
    if degree == 1 {
        return vec![-coeffs[0] / lead];
    }

    let critical = real_roots(&derivative(coeffs));
    // group equal critical points, keeping their multiplicity
    let mut groups: Vec<(f64, usize)> = Vec::new();
    for c in critical {
        match groups.last_mut() {
            Some((x, m)) if c == *x => *m += 1,
            _ => groups.push((c, 1)),
        }
    }

    let bound = 1.0
        + coeffs[..degree]
            .iter()
            .map(|c| (c / lead).abs())
            .fold(0.0, f64::max);
    // breakpoints: (x, value, is_root)
    let mut points: Vec<(f64, f64, bool)> = Vec::with_capacity(groups.len() + 2);
    points.push((-bound, eval_poly(coeffs, -bound), false));
    let mut roots = Vec::with_capacity(degree);
    for &(c, mult) in &groups {
        let v = eval_poly(coeffs, c);
        let is_root = v.abs() <= eval_error_bound(coeffs, c);
        if is_root {
            roots.extend(std::iter::repeat_n(c, mult + 1));
        }
        points.push((c, v, is_root));
    }
    points.push((bound, eval_poly(coeffs, bound), false));

    for w in points.windows(2) {
        let (x0, v0, z0) = w[0];
        let (x1, v1, z1) = w[1];
        if z0 || z1 || x1 <= x0 {
            continue;
        }
        if (v0 < 0.0) != (v1 < 0.0) {
            roots.push(bisect(coeffs, x0, x1));
        }
    }
    roots.sort_by(f64::total_cmp);
    roots.truncate(degree);
    roots
}

/// Real roots of `c4·x⁴ + c3·x³ + c2·x² + c1·x + c0`, ascending, double roots
/// repeated.
pub fn real_quartic_roots(c4: f64, c3: f64, c2: f64, c1: f64, c0: f64) -> Result<Vec<f64>> {
    if c4 == 0.0 || !c4.is_finite() {
        return Err(Error::DegenerateQuartic);
    }
    Ok(real_roots(&[c0, c1, c2, c3, c4]))
}

/// Ascending coefficients of `b·x²(a − x)² − (x − a)² − x²`.
pub fn width_tau_quartic(a: f64, b: f64) -> [f64; 5] {
    [-a * a, 2.0 * a, a * a * b - 2.0, -2.0 * a * b, b]
}

/// All pairs `(x, y)` in `(0, a)²` with `x + y = a` and `x⁻² + y⁻² = b`.
pub fn solve_width_tau_system(a: f64, b: f64) -> Result<QuarticSystemSolution> {
    if !(a > 0.0 && a.is_finite()) || !(b > 0.0 && b.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "width/tau system needs positive a and b, got a={a}, b={b}"
        )));
    }
    let coeffs = width_tau_quartic(a, b);
    let mut xs: Vec<f64> =
        real_quartic_roots(coeffs[4], coeffs[3], coeffs[2], coeffs[1], coeffs[0])?
            .into_iter()
            .filter(|&x| x > 0.0 && x < a)
            .collect();

    // sign-change scan over (0, a) catches roots the isolation missed
    let spacing = 1e-7 * a;
    let cell = a / FALLBACK_CELLS as f64;
    let mut prev = (cell * 0.5, eval_poly(&coeffs, cell * 0.5));
    for i in 1..FALLBACK_CELLS {
        let x = cell * (i as f64 + 0.5);
        let v = eval_poly(&coeffs, x);
        if (v < 0.0) != (prev.1 < 0.0) {
            let root = bisect(&coeffs, prev.0, x);
            if xs.iter().all(|r| (r - root).abs() > spacing) {
                xs.push(root);
            }
        }
        prev = (x, v);
    }

    xs.sort_by(f64::total_cmp);
    xs.dedup_by(|later, earlier| (*later - *earlier).abs() <= spacing);

    let tol = 1e-8 * b.max(1.0);
    let mut pairs = Vec::new();
    let mut residuals = Vec::new();
    for x in xs {
        let y = a - x;
        let r = (1.0 / (x * x) + 1.0 / (y * y) - b).abs();
        if r <= tol {
            pairs.push((x, y));
            residuals.push(r);
        }
    }
    Ok(QuarticSystemSolution {
        a,
        b,
        pairs,
        residuals,
    })
}
