//! Seeded body generators shared by the CLI and the tests.
//!
//! All randomness comes from `ChaCha8Rng::seed_from_u64`, which is stable
//! across platforms and releases, so a seed pins a body bit for bit.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::body::{default_validation_grid, validate_origin_interior, ConvexBody, SupportSeries};
use crate::error::{invalid, Error, Result};
use crate::geom::Vec3;

pub const MAX_ATTEMPTS: usize = 100;

/// Required support margin of generated polytopes, relative to the radius.
pub const POLYTOPE_MARGIN: f64 = 0.02;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// The cube `[−1, 1]³`.
pub fn cube() -> ConvexBody {
    let mut vs = Vec::with_capacity(8);
    for x in [-1.0, 1.0] {
        for y in [-1.0, 1.0] {
            for z in [-1.0, 1.0] {
                vs.push(Vec3::new(x, y, z));
            }
        }
    }
    ConvexBody::polytope(vs).expect("cube is a valid body")
}

/// `m` points uniform in the ball of `radius`, translated so their centroid
/// is the origin. Draws are rejected until the origin clears
/// [`POLYTOPE_MARGIN`]` · radius` on the validation grid.
pub fn random_polytope(m: usize, radius: f64, seed: u64) -> Result<ConvexBody> {
    if m < 4 {
        return Err(invalid(format!(
            "random polytope needs at least 4 vertices, got {m}"
        )));
    }
    if !(radius > 0.0 && radius.is_finite()) {
        return Err(invalid(format!("radius must be positive, got {radius}")));
    }
    let mut rng = rng(seed);
    for _ in 0..MAX_ATTEMPTS {
        let mut pts: Vec<Vec3> = (0..m).map(|_| uniform_in_ball(&mut rng, radius)).collect();
        let centroid = pts.iter().fold(Vec3::zeros(), |acc, p| acc + p) / m as f64;
        for p in pts.iter_mut() {
            *p -= centroid;
        }
        let Ok(body) = ConvexBody::polytope(pts) else {
            continue;
        };
        if validate_origin_interior(&body, default_validation_grid(), POLYTOPE_MARGIN * radius) {
            return Ok(body);
        }
    }
    Err(Error::Generation(MAX_ATTEMPTS))
}

fn uniform_in_ball(rng: &mut ChaCha8Rng, radius: f64) -> Vec3 {
    loop {
        let v = Vec3::new(
            rng.random_range(-1.0..=1.0),
            rng.random_range(-1.0..=1.0),
            rng.random_range(-1.0..=1.0),
        );
        if v.norm_squared() <= 1.0 {
            return v * radius;
        }
    }
}

/// Body with support `1 + eps · P₃(u_z)`: constant width, not centrally
/// symmetric.
pub fn cw_harmonic(eps: f64) -> Result<ConvexBody> {
    if !eps.is_finite() {
        return Err(invalid("eps must be finite"));
    }
    ConvexBody::support_series(SupportSeries::constant_width_cubic(eps))
}
