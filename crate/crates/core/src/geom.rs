//! Sphere geometry kernel: unit vectors, axis rotations, great-circle charts
//! and Fibonacci direction grids.
//!
//! Rotations are parameterised by a fraction `r` of π, so `r = 1` is a half
//! turn and `r = 0.5` a quarter turn. Internally everything is radians.

use std::f64::consts::PI;
use std::fmt;
use std::ops::Neg;

use nalgebra::Vector3;

use crate::error::{invalid, Result};

pub type Vec3 = Vector3<f64>;

/// Maximum norm deviation accepted when building a [`UnitVector3`] from raw
/// components.
pub const UNIT_TOLERANCE: f64 = 1e-9;

/// A direction on S². Always renormalised on construction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UnitVector3(Vec3);

impl UnitVector3 {
    pub const X: UnitVector3 = UnitVector3(Vector3::new(1.0, 0.0, 0.0));
    pub const Y: UnitVector3 = UnitVector3(Vector3::new(0.0, 1.0, 0.0));
    pub const Z: UnitVector3 = UnitVector3(Vector3::new(0.0, 0.0, 1.0));

    /// Accepts components whose norm is within [`UNIT_TOLERANCE`] of one.
    pub fn new(x: f64, y: f64, z: f64) -> Result<Self> {
        Self::from_vec(Vec3::new(x, y, z))
    }

    pub fn from_vec(v: Vec3) -> Result<Self> {
        let norm = v.norm();
        if !norm.is_finite() || (norm - 1.0).abs() > UNIT_TOLERANCE {
            return Err(invalid(format!(
                "expected a unit vector, got norm {norm} for ({}, {}, {})",
                v.x, v.y, v.z
            )));
        }
        Ok(UnitVector3(v / norm))
    }

    /// Normalises any finite non-zero vector.
    pub fn normalize(v: Vec3) -> Result<Self> {
        let norm = v.norm();
        if !norm.is_finite() || norm < 1e-300 {
            return Err(invalid("cannot normalize a zero or non-finite vector"));
        }
        Ok(UnitVector3(v / norm))
    }

    /// Skips the norm check. The caller guarantees `|v| = 1` to rounding.
    pub(crate) fn new_unchecked(v: Vec3) -> Self {
        UnitVector3(v)
    }

    #[inline]
    pub fn as_vec(&self) -> &Vec3 {
        &self.0
    }

    #[inline]
    pub fn x(&self) -> f64 {
        self.0.x
    }

    #[inline]
    pub fn y(&self) -> f64 {
        self.0.y
    }

    #[inline]
    pub fn z(&self) -> f64 {
        self.0.z
    }

    pub fn to_array(&self) -> [f64; 3] {
        [self.0.x, self.0.y, self.0.z]
    }

    #[inline]
    pub fn dot(&self, v: &Vec3) -> f64 {
        self.0.dot(v)
    }

    /// Angle between two directions, accurate near 0 and π.
    pub fn angle_to(&self, other: &UnitVector3) -> f64 {
        let cross = self.0.cross(&other.0).norm();
        let dot = self.0.dot(&other.0);
        cross.atan2(dot)
    }
}

impl Neg for UnitVector3 {
    type Output = UnitVector3;

    fn neg(self) -> UnitVector3 {
        UnitVector3(-self.0)
    }
}

impl fmt::Display for UnitVector3 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({:.6}, {:.6}, {:.6})", self.0.x, self.0.y, self.0.z)
    }
}

/// Rotation by `fraction · π` about `axis`, counterclockwise when viewed
/// from the tip of the axis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AxisRotation {
    axis: UnitVector3,
    fraction: f64,
}

impl AxisRotation {
    pub fn new(axis: UnitVector3, fraction: f64) -> Result<Self> {
        if !fraction.is_finite() {
            return Err(invalid(format!(
                "rotation fraction must be finite, got {fraction}"
            )));
        }
        Ok(AxisRotation {
            axis,
            fraction: canonical_fraction(fraction),
        })
    }

    pub fn axis(&self) -> UnitVector3 {
        self.axis
    }

    /// In `[0, 2)`.
    pub fn fraction(&self) -> f64 {
        self.fraction
    }

    pub fn angle(&self) -> f64 {
        self.fraction * PI
    }

    pub fn inverse(&self) -> AxisRotation {
        AxisRotation {
            axis: self.axis,
            fraction: canonical_fraction(-self.fraction),
        }
    }

    pub fn apply(&self, x: &Vec3) -> Vec3 {
        rodrigues(&self.axis, self.fraction * PI, x)
    }

    pub fn apply_unit(&self, u: &UnitVector3) -> UnitVector3 {
        UnitVector3(self.apply(u.as_vec()))
    }
}

/// Maps any finite fraction into `[0, 2)`.
pub fn canonical_fraction(r: f64) -> f64 {
    let c = r.rem_euclid(2.0);
    // rem_euclid can round up to exactly 2.0 for tiny negative inputs
    if c >= 2.0 {
        0.0
    } else {
        c
    }
}

/// Rodrigues' formula: `x cos φ + (ξ × x) sin φ + ξ (ξ·x)(1 − cos φ)` with
/// `φ = fraction · π`.
pub fn rotate(axis: &UnitVector3, fraction: f64, x: &Vec3) -> Result<Vec3> {
    if !fraction.is_finite() {
        return Err(invalid(format!(
            "rotation fraction must be finite, got {fraction}"
        )));
    }
    Ok(rodrigues(axis, fraction * PI, x))
}

#[inline]
fn rodrigues(axis: &UnitVector3, angle: f64, x: &Vec3) -> Vec3 {
    let k = axis.as_vec();
    let (s, c) = angle.sin_cos();
    x * c + k.cross(x) * s + k * (k.dot(x) * (1.0 - c))
}

/// Orthonormal chart `(e1, e2)` of the great circle orthogonal to `pole`,
/// with `e1 × e2 = pole`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GreatCircleFrame {
    pole: UnitVector3,
    e1: UnitVector3,
    e2: UnitVector3,
}

impl GreatCircleFrame {
    pub fn pole(&self) -> UnitVector3 {
        self.pole
    }

    pub fn e1(&self) -> UnitVector3 {
        self.e1
    }

    pub fn e2(&self) -> UnitVector3 {
        self.e2
    }

    /// `cos t · e1 + sin t · e2`.
    #[inline]
    pub fn point(&self, t: f64) -> UnitVector3 {
        let (s, c) = t.sin_cos();
        UnitVector3(self.e1.0 * c + self.e2.0 * s)
    }

    /// In-plane coordinates of `v` in the `(e1, e2)` basis.
    #[inline]
    pub fn coords(&self, v: &Vec3) -> [f64; 2] {
        [self.e1.dot(v), self.e2.dot(v)]
    }
}

/// Deterministic chart: cross the pole with the standard basis vector on
/// which it has the smallest absolute component (ties go to the lower index).
pub fn frame_for(pole: UnitVector3) -> GreatCircleFrame {
    let p = pole.as_vec();
    let comps = [p.x.abs(), p.y.abs(), p.z.abs()];
    let mut idx = 0;
    for i in 1..3 {
        if comps[i] < comps[idx] {
            idx = i;
        }
    }
    let mut a = Vec3::zeros();
    a[idx] = 1.0;
    let e1 = a.cross(p).normalize();
    let e2 = p.cross(&e1);
    // e2 is unit up to rounding; renormalise to hold the 1e-12 invariant
    let e2 = e2 / e2.norm();
    GreatCircleFrame {
        pole,
        e1: UnitVector3(e1),
        e2: UnitVector3(e2),
    }
}

pub fn circle_point(frame: &GreatCircleFrame, t: f64) -> UnitVector3 {
    frame.point(t)
}

/// Angular tolerance under which two grid directions count as duplicates.
pub const GRID_DUPLICATE_TOLERANCE: f64 = 1e-9;

/// A finite set of sphere directions. Antipodal grids also record, for
/// every index, the index of its antipode.
#[derive(Debug, Clone)]
pub struct SphereGrid {
    directions: Vec<UnitVector3>,
    antipodes: Option<Vec<usize>>,
}

impl SphereGrid {
    /// Builds a grid from arbitrary directions. With `antipodal` set, every
    /// direction must have its antipode present.
    pub fn new(directions: Vec<UnitVector3>, antipodal: bool) -> Result<Self> {
        if directions.is_empty() {
            return Err(invalid("sphere grid must not be empty"));
        }
        for i in 0..directions.len() {
            for j in (i + 1)..directions.len() {
                if directions[i].angle_to(&directions[j]) < GRID_DUPLICATE_TOLERANCE {
                    return Err(invalid(format!(
                        "duplicate grid directions at indices {i} and {j}"
                    )));
                }
            }
        }
        let antipodes = if antipodal {
            let mut map = Vec::with_capacity(directions.len());
            for (i, d) in directions.iter().enumerate() {
                let neg = -*d;
                let j = directions
                    .iter()
                    .position(|e| e.angle_to(&neg) < GRID_DUPLICATE_TOLERANCE)
                    .ok_or_else(|| invalid(format!("grid direction {i} has no antipode")))?;
                map.push(j);
            }
            Some(map)
        } else {
            None
        };
        Ok(SphereGrid {
            directions,
            antipodes,
        })
    }

    pub fn directions(&self) -> &[UnitVector3] {
        &self.directions
    }

    pub fn len(&self) -> usize {
        self.directions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.directions.is_empty()
    }

    pub fn is_antipodal(&self) -> bool {
        self.antipodes.is_some()
    }

    /// Index of the antipode of direction `i`, for antipodal grids.
    pub fn antipode(&self, i: usize) -> Option<usize> {
        self.antipodes.as_ref().map(|m| m[i])
    }

    pub fn iter(&self) -> impl Iterator<Item = &UnitVector3> {
        self.directions.iter()
    }
}

/// Fibonacci spiral lattice with `n` points; with `antipodal` the antipodes
/// are appended after the base points (duplicates dropped).
pub fn fibonacci_grid(n: usize, antipodal: bool) -> Result<SphereGrid> {
    if n < 2 {
        return Err(invalid(format!("fibonacci grid needs n >= 2, got {n}")));
    }
    let golden_angle = PI * (3.0 - 5f64.sqrt());
    let base: Vec<UnitVector3> = (0..n)
        .map(|i| {
            let z = 1.0 - (2 * i + 1) as f64 / n as f64;
            let rho = (1.0 - z * z).max(0.0).sqrt();
            let phi = golden_angle * i as f64;
            let v = Vec3::new(rho * phi.cos(), rho * phi.sin(), z);
            UnitVector3(v / v.norm())
        })
        .collect();
    if !antipodal {
        return Ok(SphereGrid {
            directions: base,
            antipodes: None,
        });
    }

    // The antipode of base point i can only coincide with base point
    // n − 1 − i (the one at height −z_i), so the scan is linear.
    let mut directions = base.clone();
    let mut antipodes = vec![usize::MAX; n];
    for (i, d) in base.iter().enumerate() {
        let neg = -*d;
        let mirror = n - 1 - i;
        if base[mirror].angle_to(&neg) < GRID_DUPLICATE_TOLERANCE {
            antipodes[i] = mirror;
        } else {
            antipodes[i] = directions.len();
            antipodes.push(i);
            directions.push(neg);
        }
    }
    Ok(SphereGrid {
        directions,
        antipodes: Some(antipodes),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: &Vec3, b: &Vec3, tol: f64) -> bool {
        (a - b).norm() <= tol
    }

    #[test]
    fn quarter_turn_about_z() {
        let out = rotate(&UnitVector3::Z, 0.5, &Vec3::new(1.0, 0.0, 0.0)).unwrap();
        assert!(close(&out, &Vec3::new(0.0, 1.0, 0.0), 1e-12));
    }

    #[test]
    fn half_turn_fixes_axis_component() {
        let out = rotate(&UnitVector3::Z, 1.0, &Vec3::new(1.0, 2.0, 5.0)).unwrap();
        assert!(close(&out, &Vec3::new(-1.0, -2.0, 5.0), 1e-12));
    }

    #[test]
    fn cube_diagonal_permutes_axes() {
        let axis = UnitVector3::normalize(Vec3::new(1.0, 1.0, 1.0)).unwrap();
        let out = rotate(&axis, 2.0 / 3.0, &Vec3::new(1.0, 0.0, 0.0)).unwrap();
        assert!(close(&out, &Vec3::new(0.0, 1.0, 0.0), 1e-12));
    }

    #[test]
    fn non_unit_axis_rejected() {
        assert!(UnitVector3::new(1.0, 1.0, 0.0).is_err());
        assert!(UnitVector3::new(1.0 + 1e-8, 0.0, 0.0).is_err());
        assert!(UnitVector3::new(1.0 + 1e-10, 0.0, 0.0).is_ok());
        assert!(rotate(&UnitVector3::Z, f64::NAN, &Vec3::zeros()).is_err());
    }

    #[test]
    fn fraction_is_canonical() {
        let q = AxisRotation::new(UnitVector3::Z, -0.5).unwrap();
        assert_eq!(q.fraction(), 1.5);
        let q = AxisRotation::new(UnitVector3::Z, 4.25).unwrap();
        assert_eq!(q.fraction(), 0.25);
        assert_eq!(canonical_fraction(-1e-300), 0.0);
        assert_eq!(q.inverse().fraction(), 1.75);
    }

    #[test]
    fn frame_rule_for_z_pole() {
        let f = frame_for(UnitVector3::Z);
        assert!(close(f.e1().as_vec(), &Vec3::new(0.0, -1.0, 0.0), 1e-15));
        assert!(close(f.e2().as_vec(), &Vec3::new(1.0, 0.0, 0.0), 1e-15));
    }

    #[test]
    fn frame_rule_for_x_pole() {
        let f = frame_for(UnitVector3::X);
        assert!(close(f.e1().as_vec(), &Vec3::new(0.0, 0.0, -1.0), 1e-15));
        assert!(close(f.e2().as_vec(), &Vec3::new(0.0, 1.0, 0.0), 1e-15));
    }

    #[test]
    fn circle_points_at_quadrants() {
        let f = frame_for(UnitVector3::Z);
        assert!(close(
            circle_point(&f, 0.0).as_vec(),
            f.e1().as_vec(),
            1e-15
        ));
        assert!(close(
            circle_point(&f, PI).as_vec(),
            &-f.e1().as_vec(),
            1e-15
        ));
        assert!(close(
            circle_point(&f, PI / 2.0).as_vec(),
            f.e2().as_vec(),
            1e-15
        ));
    }

    #[test]
    fn fibonacci_sizes() {
        assert_eq!(fibonacci_grid(2, false).unwrap().len(), 2);
        assert!(fibonacci_grid(1, false).is_err());
        assert!(fibonacci_grid(0, true).is_err());
        let g = fibonacci_grid(406, true).unwrap();
        assert_eq!(g.len(), 812);
        assert!(g.is_antipodal());
    }

    #[test]
    fn antipodal_grid_contains_every_antipode() {
        let g = fibonacci_grid(100, true).unwrap();
        for (i, d) in g.iter().enumerate() {
            let j = g.antipode(i).unwrap();
            assert!((g.directions()[j].as_vec() + d.as_vec()).norm() < 1e-12);
        }
    }

    #[test]
    fn duplicate_directions_rejected() {
        let d = vec![UnitVector3::Z, UnitVector3::Z];
        assert!(SphereGrid::new(d, false).is_err());
        let d = vec![UnitVector3::Z, UnitVector3::X];
        assert!(SphereGrid::new(d, true).is_err());
    }

    #[test]
    fn fibonacci_nearest_neighbor_spacing() {
        // brute-force O(n²) nearest-neighbour scan of the fixed lattice
        let n = 1000;
        let g = fibonacci_grid(n, false).unwrap();
        let c = (4.0 * PI / n as f64).sqrt();
        let dirs = g.directions();
        for (i, d) in dirs.iter().enumerate() {
            let nn = dirs
                .iter()
                .enumerate()
                .filter(|(j, _)| *j != i)
                .map(|(_, e)| d.angle_to(e))
                .fold(f64::INFINITY, f64::min);
            assert!(nn >= 0.5 * c && nn <= 2.0 * c, "point {i}: nn {nn}, c {c}");
        }
    }
}
