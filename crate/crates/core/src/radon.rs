//! Forward spherical Radon (Funk) transform and dual-section areas.
//!
//! `(Rf)(ξ) = (1/2π) ∮_{ξ⊥ ∩ S²} f`, evaluated with the uniform trapezoidal
//! rule on the great circle of [`frame_for`]`(ξ)`. The `1/2π` normalisation
//! makes constants fixed points. Quadrature nodes come in exact antipodal
//! pairs, so odd functions transform to zero up to rounding of `f` itself.

use std::f64::consts::TAU;
use std::io::Write;

use rayon::prelude::*;

use crate::body::ConvexBody;
use crate::congruence::circle_samples;
use crate::error::{invalid, Result};
use crate::geom::{frame_for, SphereGrid, UnitVector3};

pub const DEFAULT_QUADRATURE: usize = 512;
const MIN_QUADRATURE: usize = 64;

/// Values of a function on the directions of a grid, in grid order.
#[derive(Debug, Clone)]
pub struct SphericalFunctionSamples {
    grid: SphereGrid,
    values: Vec<f64>,
}

impl SphericalFunctionSamples {
    pub fn sample(f: impl Fn(&UnitVector3) -> f64, grid: &SphereGrid) -> Self {
        SphericalFunctionSamples {
            values: grid.iter().map(f).collect(),
            grid: grid.clone(),
        }
    }

    pub fn new(grid: SphereGrid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(invalid(format!(
                "{} values for a grid of {} directions",
                values.len(),
                grid.len()
            )));
        }
        Ok(SphericalFunctionSamples { grid, values })
    }

    pub fn grid(&self) -> &SphereGrid {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Replaces each value by the mean over its antipodal pair, so that
    /// paired entries become bit-identical.
    pub fn symmetrize_even(&self) -> Result<Self> {
        if !self.grid.is_antipodal() {
            return Err(invalid("even symmetrization needs an antipodal grid"));
        }
        let values = (0..self.values.len())
            .map(|i| {
                let j = self.grid.antipode(i).expect("antipodal grid");
                let (lo, hi) = if i < j { (i, j) } else { (j, i) };
                0.5 * (self.values[lo] + self.values[hi])
            })
            .collect();
        Ok(SphericalFunctionSamples {
            grid: self.grid.clone(),
            values,
        })
    }
}

#[derive(Debug, Clone)]
pub struct RadonResult {
    pub grid: SphereGrid,
    pub values: Vec<f64>,
    pub quadrature_points: usize,
}

impl RadonResult {
    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// CSV table with columns `pole_x,pole_y,pole_z,value`.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["pole_x", "pole_y", "pole_z", "value"])?;
        for (u, v) in self.grid.iter().zip(&self.values) {
            w.write_record(&[
                u.x().to_string(),
                u.y().to_string(),
                u.z().to_string(),
                v.to_string(),
            ])?;
        }
        w.flush()?;
        Ok(())
    }
}

fn check_quadrature(n: usize) -> Result<()> {
    if n < MIN_QUADRATURE || !n.is_multiple_of(2) {
        return Err(invalid(format!(
            "quadrature needs an even number of points, at least {MIN_QUADRATURE}; got {n}"
        )));
    }
    Ok(())
}

/// Mean of `f` over the great circle orthogonal to `pole`.
pub fn circle_mean(
    f: &(impl Fn(&UnitVector3) -> f64 + ?Sized),
    pole: UnitVector3,
    n: usize,
) -> f64 {
    let pts = circle_samples(&frame_for(pole), n);
    let half = n / 2;
    // pair node j with its antipode j + n/2 before summing
    let sum: f64 = (0..half).map(|j| f(&pts[j]) + f(&pts[j + half])).sum();
    sum / n as f64
}

pub fn radon_transform(
    f: impl Fn(&UnitVector3) -> f64 + Sync,
    grid: &SphereGrid,
    n_quad: usize,
) -> Result<RadonResult> {
    check_quadrature(n_quad)?;
    let values = grid
        .directions()
        .par_iter()
        .map(|&pole| circle_mean(&f, pole, n_quad))
        .collect();
    Ok(RadonResult {
        grid: grid.clone(),
        values,
        quadrature_points: n_quad,
    })
}

/// Fallible variant for integrands such as `τ_{K*}` that can fail.
fn try_radon(
    f: impl Fn(&UnitVector3) -> Result<f64> + Sync,
    grid: &SphereGrid,
    n_quad: usize,
) -> Result<Vec<f64>> {
    grid.directions()
        .par_iter()
        .map(|&pole| {
            let pts = circle_samples(&frame_for(pole), n_quad);
            let half = n_quad / 2;
            let mut sum = 0.0;
            for j in 0..half {
                sum += f(&pts[j])? + f(&pts[j + half])?;
            }
            Ok(sum / n_quad as f64)
        })
        .collect()
}

/// Area of the central section `K* ∩ ξ⊥` of the polar body,
/// `½ ∫₀^{2π} ρ²_{K*}(θ) dθ`, by the trapezoidal rule with `n` nodes.
pub fn dual_section_area(k: &ConvexBody, pole: UnitVector3, n: usize) -> Result<f64> {
    check_quadrature(n)?;
    let mut sum = 0.0;
    for u in circle_samples(&frame_for(pole), n) {
        let r = k.dual_radial(&u)?;
        sum += r * r;
    }
    Ok(0.5 * (TAU / n as f64) * sum)
}

/// `(max_ξ |R(τ_{K*} − τ_{L*})(ξ)|, max_ξ |τ_{K*}(ξ) − τ_{L*}(ξ)|)` over an
/// antipodal grid.
pub fn tau_difference_check(
    k: &ConvexBody,
    l: &ConvexBody,
    grid: &SphereGrid,
    n_quad: usize,
) -> Result<(f64, f64)> {
    check_quadrature(n_quad)?;
    if !grid.is_antipodal() {
        return Err(invalid("tau difference check needs an antipodal grid"));
    }
    let diff = |u: &UnitVector3| -> Result<f64> { Ok(k.tau_dual(u)? - l.tau_dual(u)?) };
    let radon = try_radon(diff, grid, n_quad)?;
    let max_radon = radon.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let mut max_tau = 0.0f64;
    for u in grid.iter() {
        max_tau = max_tau.max(diff(u)?.abs());
    }
    Ok((max_radon, max_tau))
}

/// Built-in test integrands for the CLI.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TestFunction {
    /// `f ≡ 1`; `Rf = f`.
    Constant,
    /// `f(u) = u_z`, odd; `Rf = 0`.
    OddZ,
    /// `f(u) = u_z² − 1/3`, degree-2 zonal; `Rf = −f/2`.
    Legendre2,
}

impl TestFunction {
    pub fn eval(&self, u: &UnitVector3) -> f64 {
        match self {
            TestFunction::Constant => 1.0,
            TestFunction::OddZ => u.z(),
            TestFunction::Legendre2 => u.z() * u.z() - 1.0 / 3.0,
        }
    }

    /// Exact transform value at `pole`.
    pub fn expected_transform(&self, pole: &UnitVector3) -> f64 {
        match self {
            TestFunction::Constant => 1.0,
            TestFunction::OddZ => 0.0,
            TestFunction::Legendre2 => -0.5 * self.eval(pole),
        }
    }
}

/// Eigenvalue of the normalised Funk transform on degree-`l` harmonics,
/// `P_l(0)`.
pub fn funk_eigenvalue(l: usize) -> f64 {
    if l % 2 == 1 {
        return 0.0;
    }
    // P_l(0) = (−1)^{l/2} (l−1)!! / l!!
    let mut v = 1.0;
    let mut k = 1;
    while k < l {
        v *= -(k as f64) / (k + 1) as f64;
        k += 2;
    }
    v
}
