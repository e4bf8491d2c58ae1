//! Acceptance suite. Runs without the libtest harness so that every
//! criterion prints its PASS/FAIL line; exits non-zero if any fails.

use std::f64::consts::{FRAC_PI_2, PI, SQRT_2, TAU};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use projcong::algebra::{eval_poly, solve_width_tau_system, width_tau_quartic};
use projcong::body::{polar_polygon_radial, projection_polygon};
use projcong::congruence::{angular_distance, classify_direction};
use projcong::fixtures::{cube, cw_harmonic, random_polytope};
use projcong::geom::{circle_point, fibonacci_grid, frame_for};
use projcong::radon::{dual_section_area, radon_transform, tau_difference_check, TestFunction};
use projcong::sphere::{
    constant_width_test, decompose_sphere, orbit_covering_radius, verify_theorem,
};
use projcong::{
    AnalysisParams, AxisRotation, ConvexBody, Error, MatchParams, SphereGrid, UnitVector3, Vec3,
    Verdict,
};

const SEED: u64 = 7;
const GRID_BASE: usize = 406;
const SAMPLES: usize = 512;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn grid() -> SphereGrid {
    fibonacci_grid(GRID_BASE, true).unwrap()
}

fn body_k() -> ConvexBody {
    random_polytope(30, 1.0, SEED).unwrap()
}

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn identity_verdict() -> Outcome {
    let k = body_k();
    let grid = grid();
    assert_eq!(grid.len(), 812);
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(1)
        .build()
        .unwrap();
    let start = Instant::now();
    let rep = pool
        .install(|| decompose_sphere(&k, &k, &grid, &AnalysisParams::default()))
        .map_err(|e| e.to_string())?;
    let elapsed = start.elapsed();
    let worst = rep
        .directions
        .iter()
        .map(|r| r.class.best_residual)
        .fold(0.0f64, f64::max);
    check(
        rep.verdict == Verdict::Equal && worst < 1e-10 && elapsed < Duration::from_secs(10),
        format!(
            "verdict {}, max best residual {worst:.1e}, {:.2} s on one thread",
            rep.verdict.name(),
            elapsed.as_secs_f64()
        ),
    )
}

fn reflection_verdict() -> Outcome {
    let k = body_k();
    let l = k.reflect();
    let rep =
        decompose_sphere(&k, &l, &grid(), &AnalysisParams::default()).map_err(|e| e.to_string())?;
    let tol = 1.5 * TAU / SAMPLES as f64;
    let missing = rep
        .directions
        .iter()
        .filter(|r| {
            !r.class
                .matches
                .iter()
                .any(|m| angular_distance(m.angle, PI) <= tol)
        })
        .count();
    check(
        rep.verdict == Verdict::ReflectedEqual && missing == 0,
        format!(
            "verdict {}, {missing} direction(s) without a match near π",
            rep.verdict.name()
        ),
    )
}

fn violation_detected() -> Outcome {
    let k = body_k();
    let l = k.rotated(AxisRotation::new(UnitVector3::Z, 0.37).unwrap());
    let params = AnalysisParams::default();
    let grid = grid();
    let violated = matches!(
        verify_theorem(&k, &l, &grid, &params),
        Err(Error::HypothesisViolated(_))
    );
    let rep = decompose_sphere(&k, &l, &grid, &params).map_err(|e| e.to_string())?;
    let worst = rep
        .directions
        .iter()
        .map(|r| r.class.best_residual)
        .fold(0.0f64, f64::max);

    let mut pole_errors = Vec::new();
    for pole in [UnitVector3::Z, -UnitVector3::Z] {
        let class =
            classify_direction(&k, &l, pole, &params.matching).map_err(|e| e.to_string())?;
        let err = class
            .matches
            .iter()
            .map(|m| (m.folded_fraction - 0.37).abs())
            .fold(f64::INFINITY, f64::min);
        pole_errors.push(err);
    }
    let pole_ok = pole_errors.iter().all(|&e| e <= 2.0 / SAMPLES as f64);
    check(
        violated && worst > 1e-3 && pole_ok,
        format!(
            "hypothesis violated: {violated}, max best residual {worst:.3e}, fraction error at ±z {:.1e} / {:.1e}",
            pole_errors[0], pole_errors[1]
        ),
    )
}

fn duality_oracle() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let mut worst = 0.0f64;
    for i in 0..50u64 {
        let k = random_polytope(20 + (i as usize % 3) * 5, 1.0, 100 + i / 10).unwrap();
        let pole = loop {
            let v = Vec3::new(
                rng.random_range(-1.0..=1.0),
                rng.random_range(-1.0..=1.0),
                rng.random_range(-1.0..=1.0),
            );
            if let Ok(u) = UnitVector3::normalize(v) {
                break u;
            }
        };
        let frame = frame_for(pole);
        let poly = projection_polygon(&k, &frame).map_err(|e| e.to_string())?;
        for j in 0..256 {
            let t = TAU * j as f64 / 256.0;
            let rho = k
                .dual_radial(&circle_point(&frame, t))
                .map_err(|e| e.to_string())?;
            worst = worst.max((polar_polygon_radial(&poly, t) - rho).abs());
        }
    }
    check(
        worst < 1e-9,
        format!("max |polar polygon radial − dual radial| {worst:.1e}"),
    )
}

fn radon_checks() -> Outcome {
    let grid = grid();
    let err = |f: TestFunction, n: usize| -> Result<f64, String> {
        let r = radon_transform(|u| f.eval(u), &grid, n).map_err(|e| e.to_string())?;
        Ok(grid
            .iter()
            .zip(&r.values)
            .map(|(u, v)| (v - f.expected_transform(u)).abs())
            .fold(0.0f64, f64::max))
    };
    let constant = err(TestFunction::Constant, 512)?;
    let odd = err(TestFunction::OddZ, 512)?;
    let zonal = err(TestFunction::Legendre2, 2048)?;
    let area = dual_section_area(&cube(), UnitVector3::Z, 1 << 16).map_err(|e| e.to_string())?;
    check(
        constant < 1e-14 && odd < 1e-12 && zonal < 1e-6 && (area - 2.0).abs() < 1e-6,
        format!(
            "constant {constant:.1e}, u_z {odd:.1e}, zonal {zonal:.1e}, cube dual section {area:.9}"
        ),
    )
}

fn tau_equality() -> Outcome {
    let k = body_k();
    let grid = grid();
    let mut worst = (0.0f64, 0.0f64);
    for l in [k.clone(), k.reflect()] {
        let (radon, tau) = tau_difference_check(&k, &l, &grid, 512).map_err(|e| e.to_string())?;
        worst = (worst.0.max(radon), worst.1.max(tau));
    }
    check(
        worst.0 < 1e-12 && worst.1 < 1e-12,
        format!(
            "max Radon residual {:.1e}, max τ difference {:.1e}",
            worst.0, worst.1
        ),
    )
}

fn quartic_oracle() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let mut worst = 0.0f64;
    let mut misses = 0;
    for _ in 0..1000 {
        let xs: f64 = rng.random_range(0.1..5.0);
        let ys: f64 = rng.random_range(0.1..5.0);
        let s = solve_width_tau_system(xs + ys, 1.0 / (xs * xs) + 1.0 / (ys * ys))
            .map_err(|e| e.to_string())?;
        let err = s
            .pairs
            .iter()
            .map(|&(x, y)| (x - xs).abs().max((y - ys).abs()))
            .fold(f64::INFINITY, f64::min);
        if err > 1e-8 {
            misses += 1;
        }
        worst = worst.max(err);
    }

    let empty = solve_width_tau_system(2.0, 1.0).map_err(|e| e.to_string())?;
    let p = width_tau_quartic(2.0, 1.0);
    let n = 1_000_000;
    let negative = (1..n).all(|i| eval_poly(&p, 2.0 * i as f64 / n as f64) < 0.0);
    check(
        misses == 0 && empty.pairs.is_empty() && negative,
        format!(
            "{misses}/1000 planted pairs missed, worst error {worst:.1e}; a=2,b=1: {} pair(s), sign scan negative: {negative}",
            empty.pairs.len()
        ),
    )
}

fn constant_width_fixture() -> Outcome {
    let k = cw_harmonic(0.05).map_err(|e| e.to_string())?;
    let mut worst = 0.0f64;
    for pole in grid().iter() {
        let (_, spread) =
            constant_width_test(&k, &frame_for(*pole), SAMPLES, 1e-7).map_err(|e| e.to_string())?;
        worst = worst.max(spread);
    }
    let (cube_ok, cube_spread) =
        constant_width_test(&cube(), &frame_for(UnitVector3::Z), SAMPLES, 1e-7)
            .map_err(|e| e.to_string())?;
    check(
        worst < 1e-10 && !cube_ok && cube_spread > 0.3,
        format!("cw-harmonic max spread {worst:.1e}, cube spread at z {cube_spread:.4}"),
    )
}

fn orbit_density() -> Outcome {
    let half = (4..=64)
        .chain([1000])
        .all(|n| orbit_covering_radius(0.5, n).unwrap().covering_radius == FRAC_PI_2);
    let irrational = orbit_covering_radius(SQRT_2 - 1.0, 10_000)
        .unwrap()
        .covering_radius;
    let third = [3, 10, 100, 10_000]
        .iter()
        .map(|&n| (orbit_covering_radius(2.0 / 3.0, n).unwrap().covering_radius - TAU / 3.0).abs())
        .fold(0.0f64, f64::max);
    check(
        half && irrational < 0.005 && third < 1e-12,
        format!(
            "r=1/2 exact π/2: {half}, r=√2−1 gap {irrational:.2e}, r=2/3 deviation {third:.1e}"
        ),
    )
}

fn coverage() -> Outcome {
    let k = body_k();
    let ball = ConvexBody::ball(1.0).unwrap();
    let cw = cw_harmonic(0.05).unwrap();
    let pairs = [
        ("(K,K)", k.clone(), k.clone()),
        ("(K,−K)", k.clone(), k.reflect()),
        ("(ball,ball)", ball.clone(), ball),
        ("(cw,cw)", cw.clone(), cw),
    ];
    let grid = grid();
    let mut failed = Vec::new();
    for (name, a, b) in &pairs {
        let rep =
            decompose_sphere(a, b, &grid, &AnalysisParams::default()).map_err(|e| e.to_string())?;
        if !(rep.coverage_gol && rep.coverage_mod_gol) {
            failed.push(*name);
        }
    }
    check(
        failed.is_empty(),
        format!("pairs without full coverage: {failed:?}"),
    )
}

fn main() -> ExitCode {
    // keep default matching parameters in sync with the criteria
    assert_eq!(MatchParams::default().circle_samples, SAMPLES);

    let criteria: [Criterion; 10] = [
        ("identity verdict", identity_verdict),
        ("reflection verdict", reflection_verdict),
        ("hypothesis violation", violation_detected),
        ("duality oracle", duality_oracle),
        ("radon checks", radon_checks),
        ("tau equality", tau_equality),
        ("quartic oracle", quartic_oracle),
        ("constant width", constant_width_fixture),
        ("orbit density", orbit_density),
        ("coverage", coverage),
    ];
    let mut failures = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        match f() {
            Ok(detail) => println!("criterion {:>2} PASS  {name}: {detail}", i + 1),
            Err(detail) => {
                failures += 1;
                println!("criterion {:>2} FAIL  {name}: {detail}", i + 1);
            }
        }
    }
    println!(
        "acceptance: {} passed, {failures} failed",
        criteria.len() - failures
    );
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
