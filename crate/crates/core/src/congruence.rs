//! Rotation matching of projection profiles.
//!
//! The projection `K_{|ξ⊥}` is represented by its support function sampled
//! uniformly on the great circle `ξ⊥ ∩ S²`. Two projections are related by a
//! planar rotation of angle α exactly when one profile is a cyclic shift of
//! the other by α, so matching is a circular sup-norm scan over shifts.
//!
//! Orientation: a reported angle α means `a(t) ≈ b(t + α)`, i.e. profile `b`
//! rotated counterclockwise (in the frame's `(e1, e2)` orientation) by α lands
//! on `a`. For `L = R_{ξ,r} K` profiled at pole ξ, `profile(K)` vs
//! `profile(L)` therefore reports `α = rπ`.

use std::f64::consts::{PI, TAU};

use crate::body::ConvexBody;
use crate::error::{invalid, Error, Result};
use crate::geom::{frame_for, GreatCircleFrame, UnitVector3};

/// Default number of samples per great circle.
pub const DEFAULT_CIRCLE_SAMPLES: usize = 512;
/// Default match tolerance, relative to the larger profile maximum.
pub const DEFAULT_MATCH_TOL: f64 = 1e-8;

const GOLDEN_ITERATIONS: usize = 60;

/// Support function of a body sampled at `n` equally spaced points of a
/// great circle. `values[j]` sits at angle `2πj/n`.
#[derive(Debug, Clone, PartialEq)]
pub struct CircularProfile {
    frame: GreatCircleFrame,
    values: Vec<f64>,
}

impl CircularProfile {
    pub fn frame(&self) -> &GreatCircleFrame {
        &self.frame
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn max(&self) -> f64 {
        self.values
            .iter()
            .copied()
            .fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// Angle of sample `j`.
    pub fn angle(&self, j: usize) -> f64 {
        TAU * j as f64 / self.values.len() as f64
    }
}

/// Circle sample points with exact antipodal pairing: point `j + n/2` is the
/// negation of point `j`.
pub(crate) fn circle_samples(frame: &GreatCircleFrame, n: usize) -> Vec<UnitVector3> {
    let half = n / 2;
    let first: Vec<UnitVector3> = (0..half)
        .map(|j| frame.point(TAU * j as f64 / n as f64))
        .collect();
    let mut all = first.clone();
    all.extend(first.into_iter().map(|u| -u));
    all
}

pub(crate) fn check_sample_count(n: usize) -> Result<()> {
    if n < 16 || !n.is_multiple_of(2) {
        return Err(invalid(format!(
            "circle sample count must be even and at least 16, got {n}"
        )));
    }
    Ok(())
}

/// Samples `h_body` on the great circle of `frame`.
pub fn profile(body: &ConvexBody, frame: &GreatCircleFrame, n: usize) -> Result<CircularProfile> {
    check_sample_count(n)?;
    let values = circle_samples(frame, n)
        .iter()
        .map(|u| {
            let h = body.support(u);
            if h >= body.margin() {
                Ok(h)
            } else {
                Err(Error::OriginNotInterior {
                    direction: *u,
                    support: h,
                    margin: body.margin(),
                })
            }
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(CircularProfile {
        frame: *frame,
        values,
    })
}

fn check_aligned(a: &CircularProfile, b: &CircularProfile) -> Result<()> {
    if a.len() != b.len() {
        return Err(invalid(format!(
            "profiles have different sample counts ({} vs {})",
            a.len(),
            b.len()
        )));
    }
    if a.frame != b.frame {
        return Err(invalid("profiles are sampled in different frames"));
    }
    Ok(())
}

#[inline]
fn shifted_residual(a: &[f64], b: &[f64], shift: usize) -> f64 {
    let n = a.len();
    let mut worst = 0.0f64;
    for j in 0..n {
        let k = j + shift;
        let k = if k >= n { k - n } else { k };
        worst = worst.max((a[j] - b[k]).abs());
    }
    worst
}

/// `max_j |a[j] − b[(j + shift) mod n]|`.
pub fn residual_at(a: &CircularProfile, b: &CircularProfile, shift: i64) -> Result<f64> {
    check_aligned(a, b)?;
    let n = a.len() as i64;
    Ok(shifted_residual(
        &a.values,
        &b.values,
        shift.rem_euclid(n) as usize,
    ))
}

/// Witness that `b` rotated by `angle` matches `a`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RotationMatch {
    /// In `[0, 2π)`, counterclockwise in the frame.
    pub angle: f64,
    /// `angle / π`, in `[0, 2)`.
    pub fraction: f64,
    /// `min(fraction, 2 − fraction)`, in `[0, 1]`.
    pub folded_fraction: f64,
    /// Sup-norm profile mismatch at the match, in body units.
    pub residual: f64,
}

impl RotationMatch {
    fn new(angle: f64, residual: f64) -> Self {
        let angle = canonical_angle(angle);
        let fraction = angle / PI;
        RotationMatch {
            angle,
            fraction,
            folded_fraction: fraction.min(2.0 - fraction),
            residual,
        }
    }
}

/// Maps an angle into `[0, 2π)`.
pub fn canonical_angle(angle: f64) -> f64 {
    let a = angle.rem_euclid(TAU);
    if a >= TAU {
        0.0
    } else {
        a
    }
}

/// Circular distance between two angles, in `[0, π]`.
pub fn angular_distance(a: f64, b: f64) -> f64 {
    let d = canonical_angle(a - b);
    d.min(TAU - d)
}

fn all_residuals(a: &[f64], b: &[f64]) -> Vec<f64> {
    (0..a.len()).map(|s| shifted_residual(a, b, s)).collect()
}

/// Vertex offset of the parabola through `(−1, left)`, `(0, mid)`,
/// `(1, right)`, clamped to half a sample.
fn parabolic_offset(left: f64, mid: f64, right: f64) -> f64 {
    let curvature = left - 2.0 * mid + right;
    if curvature <= 0.0 {
        return 0.0;
    }
    (0.5 * (left - right) / curvature).clamp(-0.5, 0.5)
}

/// Merges matches whose sample positions are less than one sample apart,
/// keeping the lower residual. Input positions are in sample units.
fn merge_positions(mut found: Vec<(f64, f64)>, n: usize) -> Vec<(f64, f64)> {
    let nf = n as f64;
    for f in found.iter_mut() {
        f.0 = f.0.rem_euclid(nf);
    }
    found.sort_by(|x, y| x.0.total_cmp(&y.0));
    let mut merged: Vec<(f64, f64)> = Vec::with_capacity(found.len());
    for cand in found {
        match merged.last_mut() {
            Some(last) if cand.0 - last.0 < 1.0 - 1e-9 => {
                if cand.1 < last.1 {
                    *last = cand;
                }
            }
            _ => merged.push(cand),
        }
    }
    // wrap-around between the last and first entries
    if merged.len() >= 2 {
        let first = merged[0];
        let last = merged[merged.len() - 1];
        if first.0 + nf - last.0 < 1.0 - 1e-9 {
            if last.1 < first.1 {
                merged[0] = last;
            }
            merged.pop();
            merged.sort_by(|x, y| x.0.total_cmp(&y.0));
        }
    }
    merged
}

fn to_matches(positions: Vec<(f64, f64)>, n: usize) -> Vec<RotationMatch> {
    let mut out: Vec<RotationMatch> = positions
        .into_iter()
        .map(|(pos, res)| RotationMatch::new(TAU * pos / n as f64, res))
        .collect();
    out.sort_by(|x, y| x.angle.total_cmp(&y.angle));
    out
}

/// All rotation angles carrying `b` onto `a` within `tol · scale`, where
/// scale is the larger profile maximum. Candidate shifts are refined by a
/// parabolic fit of the residual over the neighbouring shifts. When every
/// shift matches, all `n` shifts are returned unrefined.
pub fn match_rotations(
    a: &CircularProfile,
    b: &CircularProfile,
    tol: f64,
) -> Result<Vec<RotationMatch>> {
    check_aligned(a, b)?;
    check_tolerance(tol)?;
    let n = a.len();
    let threshold = tol * a.max().max(b.max());
    let residuals = all_residuals(&a.values, &b.values);
    if residuals.iter().all(|&r| r <= threshold) {
        return Ok(residuals
            .iter()
            .enumerate()
            .map(|(s, &r)| RotationMatch::new(TAU * s as f64 / n as f64, r))
            .collect());
    }
    let found: Vec<(f64, f64)> = (0..n)
        .filter(|&s| residuals[s] <= threshold)
        .map(|s| {
            let left = residuals[(s + n - 1) % n];
            let right = residuals[(s + 1) % n];
            let pos = s as f64 + parabolic_offset(left, residuals[s], right);
            (pos, residuals[s])
        })
        .collect();
    Ok(to_matches(merge_positions(found, n), n))
}

fn check_tolerance(tol: f64) -> Result<()> {
    if !(tol > 0.0 && tol.is_finite()) {
        return Err(invalid(format!("tolerance must be positive, got {tol}")));
    }
    Ok(())
}

/// Classification of a direction by the rotations relating the two
/// projections orthogonal to it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum DirectionTag {
    /// Equal projections (angle 0).
    F0,
    /// Projections related by the half turn (angle π).
    F1,
    /// Matched only at angles other than 0 and π.
    Fr,
    /// Both projections are the same disk: every shift matches.
    Disk,
    NoMatch,
}

impl DirectionTag {
    pub fn as_str(&self) -> &'static str {
        match self {
            DirectionTag::F0 => "F0",
            DirectionTag::F1 => "F1",
            DirectionTag::Fr => "Fr",
            DirectionTag::Disk => "Disk",
            DirectionTag::NoMatch => "NoMatch",
        }
    }
}

impl std::fmt::Display for DirectionTag {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DirectionClass {
    pub tag: DirectionTag,
    pub matches: Vec<RotationMatch>,
    /// Smallest residual over the matches, or over all tested angles when
    /// there is no match.
    pub best_residual: f64,
    /// Angle at which `best_residual` was attained.
    pub best_angle: f64,
    /// Bucket width used for the F0/F1 tags.
    pub angular_tolerance: f64,
}

impl DirectionClass {
    /// Whether the projections may coincide without rotation.
    pub fn permits_identity(&self) -> bool {
        self.tag == DirectionTag::Disk
            || self
                .matches
                .iter()
                .any(|m| angular_distance(m.angle, 0.0) <= self.angular_tolerance)
    }

    /// Whether the projections may be related by the half turn.
    pub fn permits_half_turn(&self) -> bool {
        self.tag == DirectionTag::Disk
            || self
                .matches
                .iter()
                .any(|m| angular_distance(m.angle, PI) <= self.angular_tolerance)
    }
}

/// Sampling and tolerance settings for direction classification.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MatchParams {
    pub circle_samples: usize,
    pub match_tol: f64,
}

impl Default for MatchParams {
    fn default() -> Self {
        MatchParams {
            circle_samples: DEFAULT_CIRCLE_SAMPLES,
            match_tol: DEFAULT_MATCH_TOL,
        }
    }
}

impl MatchParams {
    pub fn validate(&self) -> Result<()> {
        check_sample_count(self.circle_samples)?;
        check_tolerance(self.match_tol)
    }

    /// Width of the F0/F1 angle buckets: 1.5 samples.
    pub fn angular_tolerance(&self) -> f64 {
        1.5 * TAU / self.circle_samples as f64
    }
}

/// Sup-norm mismatch between the samples of `a` and `h_L` evaluated on the
/// same circle rotated by `alpha`.
fn resampled_residual(a: &CircularProfile, l: &ConvexBody, alpha: f64) -> f64 {
    let n = a.len();
    let mut worst = 0.0f64;
    for (j, &aj) in a.values.iter().enumerate() {
        let t = TAU * j as f64 / n as f64 + alpha;
        worst = worst.max((aj - l.support(&a.frame.point(t))).abs());
    }
    worst
}

/// Golden-section search for the minimum of `f` on `[center − half,
/// center + half]`, returning the best point evaluated (the centre
/// included).
fn golden_minimize(
    f: impl Fn(f64) -> f64,
    center: f64,
    center_value: f64,
    half: f64,
) -> (f64, f64) {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let (mut lo, mut hi) = (center - half, center + half);
    let mut best = (center, center_value);
    let mut x1 = hi - inv_phi * (hi - lo);
    let mut x2 = lo + inv_phi * (hi - lo);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    for _ in 0..GOLDEN_ITERATIONS {
        for (x, fx) in [(x1, f1), (x2, f2)] {
            if fx < best.1 {
                best = (x, fx);
            }
        }
        if f1 <= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - inv_phi * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + inv_phi * (hi - lo);
            f2 = f(x2);
        }
    }
    for (x, fx) in [(x1, f1), (x2, f2)] {
        if fx < best.1 {
            best = (x, fx);
        }
    }
    best
}

/// Classifies `pole` for the pair `(K, L)`.
///
/// Sample shifts whose residual is within the tolerance plus a Lipschitz
/// allowance of half a sample become candidates; each candidate angle is
/// then refined against `L`'s support resampled on the rotated circle, and
/// kept when the refined residual is within `match_tol · scale`. This lets
/// rotations that fall between samples match at tight tolerances.
pub fn classify_direction(
    k: &ConvexBody,
    l: &ConvexBody,
    pole: UnitVector3,
    params: &MatchParams,
) -> Result<DirectionClass> {
    params.validate()?;
    let n = params.circle_samples;
    let frame = frame_for(pole);
    let a = profile(k, &frame, n)?;
    let b = profile(l, &frame, n)?;
    let step = TAU / n as f64;
    let scale = a.max().max(b.max());
    let threshold = params.match_tol * scale;
    let angular_tolerance = params.angular_tolerance();
    let residuals = all_residuals(&a.values, &b.values);

    let (best_shift, best_discrete) = residuals
        .iter()
        .copied()
        .enumerate()
        .min_by(|x, y| x.1.total_cmp(&y.1))
        .expect("profiles are non-empty");

    if residuals.iter().all(|&r| r <= threshold) {
        let matches = residuals
            .iter()
            .enumerate()
            .map(|(s, &r)| RotationMatch::new(step * s as f64, r))
            .collect();
        return Ok(DirectionClass {
            tag: DirectionTag::Disk,
            matches,
            best_residual: best_discrete,
            best_angle: step * best_shift as f64,
            angular_tolerance,
        });
    }

    // |d h_L/dt| is bounded by the projection's circumradius, which is the
    // maximum of its support function.
    let slack = 1.01 * b.max() * PI / n as f64;
    let refine = |s: usize| {
        golden_minimize(
            |alpha| resampled_residual(&a, l, alpha),
            step * s as f64,
            residuals[s],
            step,
        )
    };
    let accepted: Vec<(f64, f64)> = (0..n)
        .filter(|&s| residuals[s] <= threshold + slack)
        .map(refine)
        .filter(|&(_, r)| r <= threshold)
        .map(|(alpha, r)| (alpha / step, r))
        .collect();
    let matches = to_matches(merge_positions(accepted, n), n);

    let (best_angle, best_residual) = match matches
        .iter()
        .min_by(|x, y| x.residual.total_cmp(&y.residual))
    {
        Some(m) => (m.angle, m.residual),
        None => {
            let (alpha, r) = refine(best_shift);
            (canonical_angle(alpha), r)
        }
    };

    let near = |target: f64| {
        matches
            .iter()
            .any(|m| angular_distance(m.angle, target) <= angular_tolerance)
    };
    let tag = if matches.is_empty() {
        DirectionTag::NoMatch
    } else if near(0.0) {
        DirectionTag::F0
    } else if near(PI) {
        DirectionTag::F1
    } else {
        DirectionTag::Fr
    };
    Ok(DirectionClass {
        tag,
        matches,
        best_residual,
        best_angle,
        angular_tolerance,
    })
}
