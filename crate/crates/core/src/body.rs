//! Convex bodies as support-function oracles.
//!
//! A [`ConvexBody`] never stores a boundary mesh. Everything downstream
//! (width, the polar dual's radial function, τ) is a function of the support
//! function `h` alone, so the body only has to answer `h(θ)`. Polytopes are
//! kept as their vertex list; the hull is implicit in `max_i v_i·θ`.

use std::sync::OnceLock;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::geom::{
    fibonacci_grid, frame_for, AxisRotation, GreatCircleFrame, SphereGrid, UnitVector3, Vec3,
};
use crate::harmonics;

/// Relative origin-interior margin: δ₀ = this × max support on the
/// validation grid.
pub const RELATIVE_MARGIN: f64 = 1e-6;

/// Base size of the default validation lattice (antipodal, so 4000 points).
pub const VALIDATION_GRID_SIZE: usize = 2000;

const CONVEXITY_CIRCLES: usize = 20;
const CONVEXITY_SAMPLES: usize = 128;
const CONVEXITY_STEP: f64 = 1e-3;
const CONVEXITY_TOLERANCE: f64 = 1e-6;
const CONVEXITY_SEED: u64 = 0x5eed_c0de;

pub fn default_validation_grid() -> &'static SphereGrid {
    static GRID: OnceLock<SphereGrid> = OnceLock::new();
    GRID.get_or_init(|| fibonacci_grid(VALIDATION_GRID_SIZE, true).expect("n >= 2"))
}

/// Support function given as a real spherical-harmonic expansion.
#[derive(Debug, Clone, PartialEq)]
pub struct SupportSeries {
    lmax: usize,
    coeffs: Vec<f64>,
}

impl SupportSeries {
    pub fn new(lmax: usize, coeffs: Vec<f64>) -> Result<Self> {
        if lmax > harmonics::MAX_DEGREE {
            return Err(invalid(format!(
                "support series degree {lmax} exceeds {}",
                harmonics::MAX_DEGREE
            )));
        }
        let want = harmonics::coefficient_count(lmax);
        if coeffs.len() != want {
            return Err(invalid(format!(
                "support series of degree {lmax} needs {want} coefficients, got {}",
                coeffs.len()
            )));
        }
        if coeffs.iter().any(|c| !c.is_finite()) {
            return Err(invalid("support series coefficients must be finite"));
        }
        Ok(SupportSeries { lmax, coeffs })
    }

    /// Constant support `radius`: the centred ball.
    pub fn ball(radius: f64) -> Self {
        SupportSeries {
            lmax: 0,
            coeffs: vec![radius * harmonics::legendre_zonal_coefficient(0)],
        }
    }

    /// `h(u) = 1 + eps · P₃(u_z)`. The odd term cancels in the width, so
    /// the body has constant width 1 whenever it is convex.
    pub fn constant_width_cubic(eps: f64) -> Self {
        let mut coeffs = vec![0.0; harmonics::coefficient_count(3)];
        coeffs[harmonics::index(0, 0)] = harmonics::legendre_zonal_coefficient(0);
        coeffs[harmonics::index(3, 0)] = eps * harmonics::legendre_zonal_coefficient(3);
        SupportSeries { lmax: 3, coeffs }
    }

    pub fn lmax(&self) -> usize {
        self.lmax
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    #[inline]
    pub fn evaluate(&self, u: &UnitVector3) -> f64 {
        harmonics::evaluate(self.lmax, &self.coeffs, u)
    }
}

#[derive(Debug, Clone)]
enum Shape {
    Polytope(Vec<Vec3>),
    Series(SupportSeries),
    Reflected(Box<ConvexBody>),
    Rotated(Box<ConvexBody>, AxisRotation),
}

/// A convex body containing the origin in its interior.
#[derive(Debug, Clone)]
pub struct ConvexBody {
    shape: Shape,
    margin: f64,
}

/// Serialized body description (the on-disk JSON format).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum BodySpec {
    Polytope {
        vertices: Vec<[f64; 3]>,
    },
    SupportSeries {
        lmax: usize,
        coeffs: Vec<f64>,
    },
    Reflected {
        of: Box<BodySpec>,
    },
    Rotated {
        of: Box<BodySpec>,
        axis: [f64; 3],
        fraction: f64,
    },
}

impl ConvexBody {
    /// Convex hull of `vertices`. Needs at least four non-coplanar points
    /// and the origin strictly inside.
    pub fn polytope(vertices: Vec<Vec3>) -> Result<Self> {
        if vertices.len() < 4 {
            return Err(invalid(format!(
                "polytope needs at least 4 vertices, got {}",
                vertices.len()
            )));
        }
        if vertices.iter().any(|v| !v.iter().all(|c| c.is_finite())) {
            return Err(invalid("polytope vertices must be finite"));
        }
        if !spans_space(&vertices) {
            return Err(invalid("polytope vertices are coplanar"));
        }
        Self::validated(Shape::Polytope(vertices))
    }

    pub fn support_series(series: SupportSeries) -> Result<Self> {
        let body = Self::validated(Shape::Series(series))?;
        body.check_circle_convexity()?;
        Ok(body)
    }

    pub fn ball(radius: f64) -> Result<Self> {
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(invalid(format!(
                "ball radius must be positive, got {radius}"
            )));
        }
        Self::support_series(SupportSeries::ball(radius))
    }

    fn validated(shape: Shape) -> Result<Self> {
        let mut body = ConvexBody { shape, margin: 0.0 };
        let grid = default_validation_grid();
        let max = grid
            .iter()
            .map(|u| body.support(u))
            .fold(f64::NEG_INFINITY, f64::max);
        let margin = RELATIVE_MARGIN * max;
        if !(margin > 0.0) {
            return Err(Error::OriginNotInterior {
                direction: grid.directions()[0],
                support: max,
                margin: 0.0,
            });
        }
        for u in grid.iter() {
            let h = body.support(u);
            if !(h >= margin) {
                return Err(Error::OriginNotInterior {
                    direction: *u,
                    support: h,
                    margin,
                });
            }
        }
        body.margin = margin;
        Ok(body)
    }

    /// Sampled check that `h + h'' ≥ 0` along fixed pseudo-random great
    /// circles (central differences).
    fn check_circle_convexity(&self) -> Result<()> {
        let mut rng = ChaCha8Rng::seed_from_u64(CONVEXITY_SEED);
        let scale = self.margin / RELATIVE_MARGIN;
        for _ in 0..CONVEXITY_CIRCLES {
            let pole = random_direction(&mut rng);
            let frame = frame_for(pole);
            for k in 0..CONVEXITY_SAMPLES {
                let t = std::f64::consts::TAU * k as f64 / CONVEXITY_SAMPLES as f64;
                let h0 = self.support(&frame.point(t));
                let hp = self.support(&frame.point(t + CONVEXITY_STEP));
                let hm = self.support(&frame.point(t - CONVEXITY_STEP));
                let curvature = h0 + (hp - 2.0 * h0 + hm) / (CONVEXITY_STEP * CONVEXITY_STEP);
                if curvature < -CONVEXITY_TOLERANCE * scale {
                    return Err(invalid(format!(
                        "support series is not convex: h + h'' = {curvature:e} on the circle of pole {pole}"
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn from_spec(spec: &BodySpec) -> Result<Self> {
        match spec {
            BodySpec::Polytope { vertices } => Self::polytope(
                vertices
                    .iter()
                    .map(|v| Vec3::new(v[0], v[1], v[2]))
                    .collect(),
            ),
            BodySpec::SupportSeries { lmax, coeffs } => {
                Self::support_series(SupportSeries::new(*lmax, coeffs.clone())?)
            }
            BodySpec::Reflected { of } => Ok(Self::from_spec(of)?.reflect()),
            BodySpec::Rotated { of, axis, fraction } => {
                let axis = UnitVector3::new(axis[0], axis[1], axis[2])?;
                Ok(Self::from_spec(of)?.rotated(AxisRotation::new(axis, *fraction)?))
            }
        }
    }

    pub fn to_spec(&self) -> BodySpec {
        match &self.shape {
            Shape::Polytope(vs) => BodySpec::Polytope {
                vertices: vs.iter().map(|v| [v.x, v.y, v.z]).collect(),
            },
            Shape::Series(s) => BodySpec::SupportSeries {
                lmax: s.lmax,
                coeffs: s.coeffs.clone(),
            },
            Shape::Reflected(inner) => BodySpec::Reflected {
                of: Box::new(inner.to_spec()),
            },
            Shape::Rotated(inner, q) => BodySpec::Rotated {
                of: Box::new(inner.to_spec()),
                axis: q.axis().to_array(),
                fraction: q.fraction(),
            },
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let spec: BodySpec = serde_json::from_str(text)?;
        Self::from_spec(&spec)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(&self.to_spec())?)
    }

    /// Origin-interior margin δ₀ established at construction.
    pub fn margin(&self) -> f64 {
        self.margin
    }

    /// `h_K(θ) = max{u·θ : u ∈ K}`.
    pub fn support(&self, theta: &UnitVector3) -> f64 {
        match &self.shape {
            Shape::Polytope(vs) => vs
                .iter()
                .map(|v| theta.dot(v))
                .fold(f64::NEG_INFINITY, f64::max),
            Shape::Series(s) => s.evaluate(theta),
            Shape::Reflected(inner) => inner.support(&-*theta),
            Shape::Rotated(inner, q) => inner.support(&q.inverse().apply_unit(theta)),
        }
    }

    /// `(h(θ) + h(−θ)) / 2`.
    pub fn width(&self, theta: &UnitVector3) -> f64 {
        0.5 * (self.support(theta) + self.support(&-*theta))
    }

    /// Radial function of the polar body, `ρ_{K*}(θ) = 1 / h_K(θ)`.
    pub fn dual_radial(&self, theta: &UnitVector3) -> Result<f64> {
        let h = self.support(theta);
        if !(h > self.margin) {
            return Err(Error::OriginNotInterior {
                direction: *theta,
                support: h,
                margin: self.margin,
            });
        }
        Ok(1.0 / h)
    }

    /// `τ_{K*}(θ) = (ρ²_{K*}(θ) + ρ²_{K*}(−θ)) / 2`. Even in θ.
    pub fn tau_dual(&self, theta: &UnitVector3) -> Result<f64> {
        let p = self.dual_radial(theta)?;
        let m = self.dual_radial(&-*theta)?;
        Ok(0.5 * (p * p + m * m))
    }

    /// The point reflection `−K`.
    pub fn reflect(&self) -> ConvexBody {
        ConvexBody {
            shape: Shape::Reflected(Box::new(self.clone())),
            margin: self.margin,
        }
    }

    /// The rotated body `QK`, with `h_{QK}(θ) = h_K(Q⁻¹θ)`.
    pub fn rotated(&self, q: AxisRotation) -> ConvexBody {
        ConvexBody {
            shape: Shape::Rotated(Box::new(self.clone()), q),
            margin: self.margin,
        }
    }

    /// Vertex list for polytope-backed bodies, with wrappers applied.
    pub fn vertices(&self) -> Option<Vec<Vec3>> {
        match &self.shape {
            Shape::Polytope(vs) => Some(vs.clone()),
            Shape::Series(_) => None,
            Shape::Reflected(inner) => inner
                .vertices()
                .map(|vs| vs.into_iter().map(|v| -v).collect()),
            Shape::Rotated(inner, q) => inner
                .vertices()
                .map(|vs| vs.iter().map(|v| q.apply(v)).collect()),
        }
    }
}

pub fn support(body: &ConvexBody, theta: &UnitVector3) -> f64 {
    body.support(theta)
}

pub fn width(body: &ConvexBody, theta: &UnitVector3) -> f64 {
    body.width(theta)
}

pub fn dual_radial(body: &ConvexBody, theta: &UnitVector3) -> Result<f64> {
    body.dual_radial(theta)
}

pub fn tau_dual(body: &ConvexBody, theta: &UnitVector3) -> Result<f64> {
    body.tau_dual(theta)
}

pub fn reflect(body: &ConvexBody) -> ConvexBody {
    body.reflect()
}

pub fn rotated(body: &ConvexBody, q: AxisRotation) -> ConvexBody {
    body.rotated(q)
}

/// True iff `min_{u ∈ grid} h(u) ≥ margin`.
pub fn validate_origin_interior(body: &ConvexBody, grid: &SphereGrid, margin: f64) -> bool {
    grid.iter().all(|u| body.support(u) >= margin)
}

pub(crate) fn random_direction(rng: &mut ChaCha8Rng) -> UnitVector3 {
    loop {
        let v = Vec3::new(
            rng.random_range(-1.0..=1.0),
            rng.random_range(-1.0..=1.0),
            rng.random_range(-1.0..=1.0),
        );
        let n = v.norm();
        if n > 1e-3 && n <= 1.0 {
            return UnitVector3::new_unchecked(v / n);
        }
    }
}

fn spans_space(points: &[Vec3]) -> bool {
    let scale = points
        .iter()
        .map(|p| p.norm())
        .fold(0.0, f64::max)
        .max(1e-300);
    let p0 = points[0];
    let Some(p1) = points
        .iter()
        .max_by(|a, b| (*a - p0).norm().total_cmp(&(*b - p0).norm()))
    else {
        return false;
    };
    let d1 = p1 - p0;
    if d1.norm() <= 1e-12 * scale {
        return false;
    }
    let Some(p2) = points.iter().max_by(|a, b| {
        d1.cross(&(*a - p0))
            .norm()
            .total_cmp(&d1.cross(&(*b - p0)).norm())
    }) else {
        return false;
    };
    let normal = d1.cross(&(p2 - p0));
    if normal.norm() <= 1e-12 * scale * scale {
        return false;
    }
    let normal = normal.normalize();
    points
        .iter()
        .any(|p| normal.dot(&(p - p0)).abs() > 1e-12 * scale)
}

/// Convex polygon in the `(e1, e2)` coordinates of a great-circle frame,
/// counterclockwise, strictly convex, origin strictly inside.
#[derive(Debug, Clone, PartialEq)]
pub struct Polygon2 {
    vertices: Vec<[f64; 2]>,
}

const POLYGON_AREA_FLOOR: f64 = 1e-12;

fn cross2(o: [f64; 2], a: [f64; 2], b: [f64; 2]) -> f64 {
    (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])
}

fn det2(a: [f64; 2], b: [f64; 2]) -> f64 {
    a[0] * b[1] - a[1] * b[0]
}

impl Polygon2 {
    /// Validates an already-ordered vertex list.
    pub fn new(vertices: Vec<[f64; 2]>) -> Result<Self> {
        let n = vertices.len();
        if n < 3 {
            return Err(Error::DegenerateProjection(0.0));
        }
        for i in 0..n {
            let turn = cross2(vertices[i], vertices[(i + 1) % n], vertices[(i + 2) % n]);
            if turn <= 0.0 {
                return Err(invalid(format!(
                    "polygon is not strictly convex at vertex {}",
                    (i + 1) % n
                )));
            }
        }
        let poly = Polygon2 { vertices };
        let area = poly.area();
        if area < POLYGON_AREA_FLOOR {
            return Err(Error::DegenerateProjection(area));
        }
        for i in 0..n {
            // origin strictly left of every directed edge
            if cross2(poly.vertices[i], poly.vertices[(i + 1) % n], [0.0, 0.0]) <= 0.0 {
                return Err(invalid("origin is not interior to the polygon"));
            }
        }
        Ok(poly)
    }

    /// Convex hull of arbitrary points (monotone chain, collinear points
    /// dropped).
    pub fn hull(points: &[[f64; 2]]) -> Result<Self> {
        let mut pts: Vec<[f64; 2]> = points.to_vec();
        pts.sort_by(|a, b| a[0].total_cmp(&b[0]).then(a[1].total_cmp(&b[1])));
        pts.dedup();
        if pts.len() < 3 {
            return Err(Error::DegenerateProjection(0.0));
        }
        let mut hull: Vec<[f64; 2]> = Vec::with_capacity(2 * pts.len());
        for pass in 0..2 {
            let start = hull.len();
            let iter: Box<dyn Iterator<Item = &[f64; 2]>> = if pass == 0 {
                Box::new(pts.iter())
            } else {
                Box::new(pts.iter().rev())
            };
            for &p in iter {
                while hull.len() >= start + 2
                    && cross2(hull[hull.len() - 2], hull[hull.len() - 1], p) <= 0.0
                {
                    hull.pop();
                }
                hull.push(p);
            }
            hull.pop();
        }
        let area = shoelace(&hull);
        if hull.len() < 3 || area < POLYGON_AREA_FLOOR {
            return Err(Error::DegenerateProjection(area));
        }
        Self::new(hull)
    }

    pub fn vertices(&self) -> &[[f64; 2]] {
        &self.vertices
    }

    pub fn area(&self) -> f64 {
        shoelace(&self.vertices)
    }

    /// 2D support function at direction angle `t`.
    pub fn support(&self, t: f64) -> f64 {
        let (s, c) = t.sin_cos();
        self.vertices
            .iter()
            .map(|v| v[0] * c + v[1] * s)
            .fold(f64::NEG_INFINITY, f64::max)
    }

    /// Vertices of the polar polygon `{x : v·x ≤ 1 for every vertex v}`.
    /// Vertex `i` is where the lines `v_i·x = 1` and `v_{i+1}·x = 1` meet,
    /// so the output is counterclockwise too.
    pub fn polar_vertices(&self) -> Vec<[f64; 2]> {
        let n = self.vertices.len();
        (0..n)
            .map(|i| {
                let a = self.vertices[i];
                let b = self.vertices[(i + 1) % n];
                let det = det2(a, b);
                [(b[1] - a[1]) / det, (a[0] - b[0]) / det]
            })
            .collect()
    }
}

fn shoelace(vs: &[[f64; 2]]) -> f64 {
    let n = vs.len();
    0.5 * (0..n).map(|i| det2(vs[i], vs[(i + 1) % n])).sum::<f64>()
}

/// Orthogonal projection of a polytope-backed body onto `frame`'s plane.
pub fn projection_polygon(body: &ConvexBody, frame: &GreatCircleFrame) -> Result<Polygon2> {
    let vs = body
        .vertices()
        .ok_or_else(|| invalid("projection polygons need a polytope-backed body"))?;
    let pts: Vec<[f64; 2]> = vs.iter().map(|v| frame.coords(v)).collect();
    Polygon2::hull(&pts)
}

/// Radial function at angle `t` of the polar polygon of `poly`, by
/// intersecting the ray with the polar polygon's edges.
pub fn polar_polygon_radial(poly: &Polygon2, t: f64) -> f64 {
    let polar = poly.polar_vertices();
    let (s, c) = t.sin_cos();
    let d = [c, s];
    let n = polar.len();
    let mut best = f64::INFINITY;
    for i in 0..n {
        let p = polar[i];
        let q = polar[(i + 1) % n];
        let e = [q[0] - p[0], q[1] - p[1]];
        let denom = det2(d, e);
        if denom.abs() < 1e-300 {
            continue;
        }
        let lambda = det2(p, e) / denom;
        let along = det2(p, d) / denom;
        if lambda > 0.0 && (-1e-12..=1.0 + 1e-12).contains(&along) {
            best = best.min(lambda);
        }
    }
    best
}

/// Radial function `ρ_K(θ) = max{λ : λθ ∈ K}` of a polytope, by clipping
/// the ray against every facet halfspace. Facets come from brute-force
/// enumeration of vertex triples, so this is only meant for small inputs.
pub fn polytope_radial(body: &ConvexBody, theta: &UnitVector3) -> Result<f64> {
    let vs = body
        .vertices()
        .ok_or_else(|| invalid("primal radial function is only available for polytopes"))?;
    let scale = vs.iter().map(|v| v.norm()).fold(0.0, f64::max);
    let eps = 1e-10 * scale;
    let mut best = f64::INFINITY;
    let n = vs.len();
    for i in 0..n {
        for j in (i + 1)..n {
            for k in (j + 1)..n {
                let normal = (vs[j] - vs[i]).cross(&(vs[k] - vs[i]));
                let len = normal.norm();
                if len <= eps * scale {
                    continue;
                }
                let mut normal = normal / len;
                let mut offset = normal.dot(&vs[i]);
                let (mut above, mut below) = (false, false);
                for v in &vs {
                    let side = normal.dot(v) - offset;
                    above |= side > eps;
                    below |= side < -eps;
                }
                if above && below {
                    continue;
                }
                if above {
                    normal = -normal;
                    offset = -offset;
                }
                let rate = theta.dot(&normal);
                if rate > 0.0 {
                    best = best.min(offset / rate);
                }
            }
        }
    }
    if !best.is_finite() {
        return Err(invalid("ray does not leave the polytope"));
    }
    Ok(best)
}
