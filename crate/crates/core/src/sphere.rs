//! Whole-sphere decomposition of a body pair into F₀ / F₁ / F_r / Σ / Λ.
//!
//! Every grid pole is classified by [`classify_direction`], and additionally
//! tested for membership in
//! - Σ: the projection of `K` has constant width on the pole's circle,
//! - Λ: `τ_{K*}` is constant on the pole's circle.
//!
//! Coverage flags record whether `F₀ ∪ F₁ ∪ Σ` and `F₀ ∪ F₁ ∪ Λ` exhaust the
//! grid. The verdict states which branch (`K = L` or `K = −L`) the grid
//! supports.

use rayon::prelude::*;

use crate::body::ConvexBody;
use crate::congruence::{
    check_sample_count, classify_direction, profile, CircularProfile, DirectionClass, DirectionTag,
    MatchParams,
};
use crate::error::{invalid, Error, Result};
use crate::geom::{frame_for, GreatCircleFrame, SphereGrid, UnitVector3};

/// Default relative spread tolerance for the Σ and Λ tests.
pub const DEFAULT_SPREAD_TOL: f64 = 1e-7;

/// Base size of the default decomposition lattice (812 directions).
pub const DEFAULT_GRID_BASE: usize = 406;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnalysisParams {
    pub matching: MatchParams,
    pub spread_tol: f64,
}

impl Default for AnalysisParams {
    fn default() -> Self {
        AnalysisParams {
            matching: MatchParams::default(),
            spread_tol: DEFAULT_SPREAD_TOL,
        }
    }
}

impl AnalysisParams {
    pub fn validate(&self) -> Result<()> {
        self.matching.validate()?;
        if !(self.spread_tol > 0.0 && self.spread_tol.is_finite()) {
            return Err(invalid(format!(
                "spread tolerance must be positive, got {}",
                self.spread_tol
            )));
        }
        Ok(())
    }
}

/// `(max − min) / mean`.
fn relative_spread(values: &[f64]) -> f64 {
    let (mut lo, mut hi, mut sum) = (f64::INFINITY, f64::NEG_INFINITY, 0.0);
    for &v in values {
        lo = lo.min(v);
        hi = hi.max(v);
        sum += v;
    }
    let mean = sum / values.len() as f64;
    (hi - lo) / mean
}

fn mean(values: &[f64]) -> f64 {
    values.iter().sum::<f64>() / values.len() as f64
}

/// Widths along the circle, from a profile's antipodal sample pairs.
fn circle_widths(p: &CircularProfile) -> Vec<f64> {
    let v = p.values();
    let half = v.len() / 2;
    (0..v.len())
        .map(|j| {
            let k = if j < half { j + half } else { j - half };
            0.5 * (v[j] + v[k])
        })
        .collect()
}

/// `τ_{K*}` along the circle, from a profile's antipodal sample pairs.
fn circle_taus(p: &CircularProfile) -> Vec<f64> {
    let v = p.values();
    let half = v.len() / 2;
    (0..v.len())
        .map(|j| {
            let k = if j < half { j + half } else { j - half };
            let (r1, r2) = (1.0 / v[j], 1.0 / v[k]);
            0.5 * (r1 * r1 + r2 * r2)
        })
        .collect()
}

/// Whether the projection of `k` onto `frame`'s plane has constant width,
/// with the relative spread of the sampled widths.
pub fn constant_width_test(
    k: &ConvexBody,
    frame: &GreatCircleFrame,
    n: usize,
    tol: f64,
) -> Result<(bool, f64)> {
    check_sample_count(n)?;
    let spread = relative_spread(&circle_widths(&profile(k, frame, n)?));
    Ok((spread <= tol, spread))
}

/// Whether `τ_{K*}` is constant on `frame`'s circle, with the relative
/// spread of the sampled values.
pub fn constant_tau_test(
    k: &ConvexBody,
    frame: &GreatCircleFrame,
    n: usize,
    tol: f64,
) -> Result<(bool, f64)> {
    check_sample_count(n)?;
    let spread = relative_spread(&circle_taus(&profile(k, frame, n)?));
    Ok((spread <= tol, spread))
}

#[derive(Debug, Clone, PartialEq)]
pub struct DirectionRecord {
    pub pole: UnitVector3,
    pub class: DirectionClass,
    pub width_spread: f64,
    pub tau_spread: f64,
    /// Mean width of `K`'s projection along the circle.
    pub mean_width: f64,
    pub in_sigma: bool,
    pub in_lambda: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Verdict {
    /// Every direction admits the identity: `K = L`.
    Equal,
    /// Every direction admits the half turn: `K = −L`.
    ReflectedEqual,
    /// Every direction matches, but neither branch holds on the whole grid.
    /// Lists the directions that break the better-supported branch.
    MixedEvidence(Vec<UnitVector3>),
    /// Directions with no rotation match at all.
    Violation(Vec<UnitVector3>),
}

impl Verdict {
    pub fn name(&self) -> &'static str {
        match self {
            Verdict::Equal => "Equal",
            Verdict::ReflectedEqual => "ReflectedEqual",
            Verdict::MixedEvidence(_) => "MixedEvidence",
            Verdict::Violation(_) => "Violation",
        }
    }

    pub fn poles(&self) -> &[UnitVector3] {
        match self {
            Verdict::MixedEvidence(p) | Verdict::Violation(p) => p,
            _ => &[],
        }
    }

    pub fn is_consistent(&self) -> bool {
        matches!(self, Verdict::Equal | Verdict::ReflectedEqual)
    }
}

#[derive(Debug, Clone)]
pub struct DecompositionReport {
    pub grid: SphereGrid,
    pub directions: Vec<DirectionRecord>,
    /// `F₀ ∪ F₁ ∪ Σ` covers the grid (disks count towards F₀).
    pub coverage_gol: bool,
    /// `F₀ ∪ F₁ ∪ Λ` covers the grid.
    pub coverage_mod_gol: bool,
    /// Shared projection width over Σ, when Σ has at least two grid poles.
    pub common_width: Option<f64>,
    pub verdict: Verdict,
}

fn analyse_direction(
    k: &ConvexBody,
    l: &ConvexBody,
    pole: UnitVector3,
    params: &AnalysisParams,
) -> Result<DirectionRecord> {
    let class = classify_direction(k, l, pole, &params.matching)?;
    let p = profile(k, &frame_for(pole), params.matching.circle_samples)?;
    let widths = circle_widths(&p);
    let width_spread = relative_spread(&widths);
    let tau_spread = relative_spread(&circle_taus(&p));
    Ok(DirectionRecord {
        pole,
        class,
        width_spread,
        tau_spread,
        mean_width: mean(&widths),
        in_sigma: width_spread <= params.spread_tol,
        in_lambda: tau_spread <= params.spread_tol,
    })
}

fn in_f0_f1(tag: DirectionTag) -> bool {
    matches!(
        tag,
        DirectionTag::F0 | DirectionTag::F1 | DirectionTag::Disk
    )
}

fn verdict_of(records: &[DirectionRecord]) -> Verdict {
    let no_match: Vec<UnitVector3> = records
        .iter()
        .filter(|r| r.class.tag == DirectionTag::NoMatch)
        .map(|r| r.pole)
        .collect();
    if !no_match.is_empty() {
        return Verdict::Violation(no_match);
    }
    if records.iter().all(|r| r.class.permits_identity()) {
        return Verdict::Equal;
    }
    if records.iter().all(|r| r.class.permits_half_turn()) {
        return Verdict::ReflectedEqual;
    }
    let not_identity = records
        .iter()
        .filter(|r| !r.class.permits_identity())
        .count();
    let not_half_turn = records
        .iter()
        .filter(|r| !r.class.permits_half_turn())
        .count();
    let conflicting = records
        .iter()
        .filter(|r| {
            if not_identity <= not_half_turn {
                !r.class.permits_identity()
            } else {
                !r.class.permits_half_turn()
            }
        })
        .map(|r| r.pole)
        .collect();
    Verdict::MixedEvidence(conflicting)
}

/// Classifies every pole of an antipodal grid and assembles the report.
/// Poles are processed in parallel and reported in grid order.
pub fn decompose_sphere(
    k: &ConvexBody,
    l: &ConvexBody,
    grid: &SphereGrid,
    params: &AnalysisParams,
) -> Result<DecompositionReport> {
    params.validate()?;
    if !grid.is_antipodal() {
        return Err(invalid("sphere decomposition needs an antipodal grid"));
    }
    let directions = grid
        .directions()
        .par_iter()
        .map(|&pole| analyse_direction(k, l, pole, params))
        .collect::<Result<Vec<_>>>()?;

    let coverage_gol = directions
        .iter()
        .all(|r| in_f0_f1(r.class.tag) || r.in_sigma);
    let coverage_mod_gol = directions
        .iter()
        .all(|r| in_f0_f1(r.class.tag) || r.in_lambda);
    let sigma_widths: Vec<f64> = directions
        .iter()
        .filter(|r| r.in_sigma)
        .map(|r| r.mean_width)
        .collect();
    let common_width = (sigma_widths.len() >= 2).then(|| mean(&sigma_widths));
    let verdict = verdict_of(&directions);

    Ok(DecompositionReport {
        grid: grid.clone(),
        directions,
        coverage_gol,
        coverage_mod_gol,
        common_width,
        verdict,
    })
}

/// Decides which branch of the dichotomy the pair satisfies. Fails with
/// [`Error::HypothesisViolated`] when some projection pair is not
/// rotation-congruent at all.
pub fn verify_theorem(
    k: &ConvexBody,
    l: &ConvexBody,
    grid: &SphereGrid,
    params: &AnalysisParams,
) -> Result<Verdict> {
    match decompose_sphere(k, l, grid, params)?.verdict {
        Verdict::Violation(poles) => Err(Error::HypothesisViolated(poles)),
        v => Ok(v),
    }
}

/// Largest gap of the orbit `{k·rπ mod 2π : 0 ≤ k < n}` on the circle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OrbitReport {
    pub fraction: f64,
    pub steps: usize,
    /// Radians, in `(0, 2π]`.
    pub covering_radius: f64,
}

pub fn orbit_covering_radius(r: f64, n: usize) -> Result<OrbitReport> {
    if n < 1 {
        return Err(invalid("orbit needs at least one step"));
    }
    if !r.is_finite() {
        return Err(invalid(format!("orbit fraction must be finite, got {r}")));
    }
    // positions in turns, so that dyadic fractions stay exact
    let half = 0.5 * r;
    let mut turns: Vec<f64> = (0..n)
        .map(|k| {
            let t = (k as f64 * half).rem_euclid(1.0);
            if t >= 1.0 {
                0.0
            } else {
                t
            }
        })
        .collect();
    turns.sort_by(f64::total_cmp);
    let mut gap = 1.0 - turns[turns.len() - 1] + turns[0];
    for w in turns.windows(2) {
        gap = gap.max(w[1] - w[0]);
    }
    Ok(OrbitReport {
        fraction: r,
        steps: n,
        covering_radius: std::f64::consts::TAU * gap,
    })
}
