//! Orthonormal real spherical harmonics, used by support-series bodies.
//!
//! Coefficient layout is degree-major, order-minor: index `l² + l + m` for
//! `m = −l..=l`. `m > 0` terms carry `cos(mφ)`, `m < 0` carry `sin(|m|φ)`.
//! No Condon–Shortley phase.

use std::f64::consts::PI;

use crate::geom::UnitVector3;

/// Highest degree accepted by [`SupportSeries`](crate::body::SupportSeries).
pub const MAX_DEGREE: usize = 64;

pub fn coefficient_count(lmax: usize) -> usize {
    (lmax + 1) * (lmax + 1)
}

#[inline]
pub fn index(l: usize, m: i64) -> usize {
    ((l * l + l) as i64 + m) as usize
}

/// Evaluates `Σ c_lm Y_lm(u)`.
pub fn evaluate(lmax: usize, coeffs: &[f64], u: &UnitVector3) -> f64 {
    debug_assert_eq!(coeffs.len(), coefficient_count(lmax));
    let norm00 = (0.25 / PI).sqrt();
    if lmax == 0 {
        return coeffs[0] * norm00;
    }

    let z = u.z().clamp(-1.0, 1.0);
    let s = (u.x() * u.x() + u.y() * u.y()).sqrt();
    // cos(mφ), sin(mφ) from the in-plane unit direction
    let (c1, s1) = if s > 0.0 {
        (u.x() / s, u.y() / s)
    } else {
        (1.0, 0.0)
    };

    let mut total = 0.0;
    // normalised associated Legendre values along the diagonal
    let mut pmm = norm00;
    let mut cos_m = 1.0;
    let mut sin_m = 0.0;
    for m in 0..=lmax {
        if m > 0 {
            let mf = m as f64;
            pmm *= ((2.0 * mf + 1.0) / (2.0 * mf)).sqrt() * s;
            let next_cos = cos_m * c1 - sin_m * s1;
            sin_m = sin_m * c1 + cos_m * s1;
            cos_m = next_cos;
        }
        let azimuth = |p: f64, l: usize| -> f64 {
            if m == 0 {
                coeffs[index(l, 0)] * p
            } else {
                let k = std::f64::consts::SQRT_2 * p;
                k * (coeffs[index(l, m as i64)] * cos_m + coeffs[index(l, -(m as i64))] * sin_m)
            }
        };

        total += azimuth(pmm, m);
        if m == lmax {
            break;
        }
        let mf = m as f64;
        let mut p_prev = pmm;
        let mut p_curr = (2.0 * mf + 3.0).sqrt() * z * pmm;
        total += azimuth(p_curr, m + 1);
        for l in (m + 2)..=lmax {
            let lf = l as f64;
            let a = ((4.0 * lf * lf - 1.0) / (lf * lf - mf * mf)).sqrt();
            let lm1 = lf - 1.0;
            let b = ((lm1 * lm1 - mf * mf) / (4.0 * lm1 * lm1 - 1.0)).sqrt();
            let p_next = a * (z * p_curr - b * p_prev);
            p_prev = p_curr;
            p_curr = p_next;
            total += azimuth(p_curr, l);
        }
    }
    total
}

/// Coefficient of `Y_l0` that reproduces `P_l(u_z)` (Legendre polynomial).
pub fn legendre_zonal_coefficient(l: usize) -> f64 {
    (4.0 * PI / (2 * l + 1) as f64).sqrt()
}
