//! Subprocess tests of the `projcong` binary: exit codes, artifacts and
//! determinism.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use tempfile::TempDir;

use projcong::geom::frame_for;
use projcong::sphere::constant_width_test;
use projcong::{ConvexBody, UnitVector3, Vec3};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_projcong"))
        .args(args)
        .env_remove("PROJCONG_THREADS")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

struct Fixture {
    dir: TempDir,
}

impl Fixture {
    fn new() -> Self {
        Fixture {
            dir: tempfile::tempdir().unwrap(),
        }
    }

    fn path(&self, name: &str) -> PathBuf {
        self.dir.path().join(name)
    }

    fn gen(&self, name: &str, args: &[&str]) -> PathBuf {
        let out = self.path(name);
        let mut full = vec!["gen"];
        full.extend_from_slice(args);
        full.extend_from_slice(&["--output", path_str(&out)]);
        let o = run(&full);
        assert!(
            o.status.success(),
            "gen failed: {}",
            String::from_utf8_lossy(&o.stderr)
        );
        out
    }

    fn polytope(&self) -> PathBuf {
        self.gen("k.json", &["polytope", "--vertices", "30", "--seed", "7"])
    }
}

fn classify(k: &Path, l: &Path, extra: &[&str]) -> Output {
    let mut args = vec![
        "classify",
        "--body-k",
        path_str(k),
        "--body-l",
        path_str(l),
        "--grid",
        "100",
        "--circle-samples",
        "128",
    ];
    args.extend_from_slice(extra);
    run(&args)
}

#[test]
fn gen_ball_is_constant_support() {
    let fx = Fixture::new();
    let p = fx.gen("ball.json", &["ball", "--radius", "2"]);
    let text = std::fs::read_to_string(&p).unwrap();
    let v: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(v["type"], "support_series");
    assert_eq!(v["lmax"], 0);
    let body = ConvexBody::from_json(&text).unwrap();
    for u in [
        UnitVector3::X,
        -UnitVector3::Z,
        UnitVector3::normalize(Vec3::new(1.0, 2.0, 3.0)).unwrap(),
    ] {
        assert!((body.support(&u) - 2.0).abs() < 1e-14);
    }
}

#[test]
fn gen_polytope_is_deterministic() {
    let fx = Fixture::new();
    let a = fx.gen("a.json", &["polytope", "--vertices", "30", "--seed", "7"]);
    let b = fx.gen("b.json", &["polytope", "--vertices", "30", "--seed", "7"]);
    assert_eq!(std::fs::read(a).unwrap(), std::fs::read(b).unwrap());
}

#[test]
fn gen_cw_harmonic_has_constant_width() {
    let fx = Fixture::new();
    let p = fx.gen("cw.json", &["cw-harmonic", "--eps", "0.05"]);
    let body = ConvexBody::from_json(&std::fs::read_to_string(p).unwrap()).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..50 {
        let v = Vec3::new(
            rng.random_range(-1.0..1.0),
            rng.random_range(-1.0..1.0),
            rng.random_range(-1.0..1.0),
        );
        let Ok(pole) = UnitVector3::normalize(v) else {
            continue;
        };
        assert!(
            constant_width_test(&body, &frame_for(pole), 256, 1e-7)
                .unwrap()
                .0
        );
    }
}

#[test]
fn gen_wrappers_round_trip() {
    let fx = Fixture::new();
    let k = fx.polytope();
    let r = fx.gen("r.json", &["reflected", "--of", path_str(&k)]);
    let q = fx.gen(
        "q.json",
        &[
            "rotated",
            "--of",
            path_str(&k),
            "--axis",
            "0,0,1",
            "--fraction",
            "0.37",
        ],
    );
    let kb = ConvexBody::from_json(&std::fs::read_to_string(&k).unwrap()).unwrap();
    let rb = ConvexBody::from_json(&std::fs::read_to_string(&r).unwrap()).unwrap();
    let qb = ConvexBody::from_json(&std::fs::read_to_string(&q).unwrap()).unwrap();
    assert_eq!(rb.support(&UnitVector3::X), kb.support(&-UnitVector3::X));
    assert_eq!(qb.support(&UnitVector3::Z), kb.support(&UnitVector3::Z));
}

#[test]
fn gen_without_output_fails() {
    let o = run(&["gen", "ball"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn classify_identity_exits_zero() {
    let fx = Fixture::new();
    let k = fx.polytope();
    let out = fx.path("rep.json");
    let o = classify(&k, &k, &["--output", path_str(&out)]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("verdict: Equal"));
    let v: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out).unwrap()).unwrap();
    assert_eq!(v["schema_version"], 1);
    assert_eq!(v["verdict"], "Equal");
    assert_eq!(v["coverage_gol"], true);
    assert_eq!(v["coverage_mod_gol"], true);
    assert_eq!(v["directions"].as_array().unwrap().len(), 100);
    let d = &v["directions"][0];
    for key in [
        "pole_x",
        "pole_y",
        "pole_z",
        "tag",
        "best_angle",
        "best_residual",
        "width_spread",
        "tau_spread",
        "in_sigma",
        "in_lambda",
    ] {
        assert!(d.get(key).is_some(), "missing {key}");
    }
}

#[test]
fn classify_reflection_exits_zero() {
    let fx = Fixture::new();
    let k = fx.polytope();
    let l = fx.gen("l.json", &["reflected", "--of", path_str(&k)]);
    let o = classify(&k, &l, &[]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("verdict: ReflectedEqual"));
}

#[test]
fn classify_rotation_exits_two() {
    let fx = Fixture::new();
    let k = fx.polytope();
    let l = fx.gen(
        "l.json",
        &[
            "rotated",
            "--of",
            path_str(&k),
            "--axis",
            "0,0,1",
            "--fraction",
            "0.37",
        ],
    );
    let out = fx.path("rep.json");
    let o = classify(&k, &l, &["--output", path_str(&out)]);
    assert_eq!(o.status.code(), Some(2));
    let v: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out).unwrap()).unwrap();
    assert_eq!(v["verdict"], "Violation");
    assert!(!v["verdict_poles"].as_array().unwrap().is_empty());
}

#[test]
fn classify_reports_are_byte_identical() {
    let fx = Fixture::new();
    let k = fx.polytope();
    let l = fx.gen("l.json", &["reflected", "--of", path_str(&k)]);
    for format in ["json", "csv"] {
        let a = fx.path(&format!("a.{format}"));
        let b = fx.path(&format!("b.{format}"));
        classify(
            &k,
            &l,
            &["--output", path_str(&a), "--format", format, "--seed", "5"],
        );
        classify(
            &k,
            &l,
            &["--output", path_str(&b), "--format", format, "--seed", "5"],
        );
        assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    }
    let csv = std::fs::read_to_string(fx.path("a.csv")).unwrap();
    assert_eq!(
        csv.lines().next().unwrap(),
        "pole_x,pole_y,pole_z,tag,best_angle,best_residual,width_spread,tau_spread,in_sigma,in_lambda"
    );
    assert_eq!(csv.lines().count(), 101);
}

#[test]
fn classify_input_errors_exit_one() {
    let fx = Fixture::new();
    let k = fx.polytope();
    let missing = fx.path("missing.json");
    let o = classify(&k, &missing, &[]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("missing.json"));

    let bad = fx.path("bad.json");
    std::fs::write(
        &bad,
        r#"{"type":"polytope","vertices":[[1,0,0],[2,0,0],[1,1,0],[1,0,1]]}"#,
    )
    .unwrap();
    assert_eq!(classify(&k, &bad, &[]).status.code(), Some(1));

    assert_eq!(
        classify(&k, &k, &["--match-tol", "0"]).status.code(),
        Some(1)
    );
    assert_eq!(
        classify(&k, &k, &["--circle-samples", "15"]).status.code(),
        Some(1)
    );
    assert_eq!(
        run(&[
            "classify",
            "--body-k",
            path_str(&k),
            "--body-l",
            path_str(&k),
            "--grid",
            "40"
        ])
        .status
        .code(),
        Some(1)
    );
    assert_eq!(
        run(&["classify", "--body-k", path_str(&k)]).status.code(),
        Some(1)
    );
}

#[test]
fn thread_cap_is_honoured_and_validated() {
    let fx = Fixture::new();
    let k = fx.polytope();
    let args = [
        "classify",
        "--body-k",
        path_str(&k),
        "--body-l",
        path_str(&k),
        "--grid",
        "60",
        "--circle-samples",
        "64",
    ];
    let ok = Command::new(env!("CARGO_BIN_EXE_projcong"))
        .args(args)
        .env("PROJCONG_THREADS", "1")
        .output()
        .unwrap();
    assert_eq!(ok.status.code(), Some(0));
    let bad = Command::new(env!("CARGO_BIN_EXE_projcong"))
        .args(args)
        .env("PROJCONG_THREADS", "0")
        .output()
        .unwrap();
    assert_eq!(bad.status.code(), Some(1));
}

#[test]
fn quartic_command() {
    let fx = Fixture::new();
    let out = fx.path("q.json");
    let o = run(&[
        "quartic",
        "--a",
        "2",
        "--b",
        "2",
        "--output",
        path_str(&out),
    ]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out).unwrap()).unwrap();
    let pairs = v["pairs"].as_array().unwrap();
    assert_eq!(pairs.len(), 1);
    assert!((pairs[0][0].as_f64().unwrap() - 1.0).abs() < 1e-7);
    assert!((pairs[0][1].as_f64().unwrap() - 1.0).abs() < 1e-7);
    assert_eq!(
        run(&["quartic", "--a", "-1", "--b", "2"]).status.code(),
        Some(1)
    );
}

#[test]
fn orbit_command() {
    let fx = Fixture::new();
    let out = fx.path("o.json");
    let o = run(&[
        "orbit",
        "--r",
        "0.5",
        "--n",
        "100",
        "--output",
        path_str(&out),
    ]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out).unwrap()).unwrap();
    assert_eq!(
        v["covering_radius"].as_f64().unwrap(),
        std::f64::consts::FRAC_PI_2
    );
    assert_eq!(
        run(&["orbit", "--r", "0.5", "--n", "0"]).status.code(),
        Some(1)
    );
}

#[test]
fn radon_legendre2_matches_eigenvalue() {
    let fx = Fixture::new();
    let out = fx.path("radon.csv");
    let o = run(&[
        "radon",
        "--f",
        "legendre2",
        "--grid",
        "812",
        "--output",
        path_str(&out),
    ]);
    assert_eq!(o.status.code(), Some(0));
    let mut rdr = csv::Reader::from_path(&out).unwrap();
    assert_eq!(
        rdr.headers().unwrap(),
        vec!["pole_x", "pole_y", "pole_z", "value"]
    );
    let mut rows = 0;
    for rec in rdr.records() {
        let rec = rec.unwrap();
        let z: f64 = rec[2].parse().unwrap();
        let value: f64 = rec[3].parse().unwrap();
        assert!((value + 0.5 * (z * z - 1.0 / 3.0)).abs() < 1e-6);
        rows += 1;
    }
    assert_eq!(rows, 812);
    assert_eq!(run(&["radon", "--nquad", "63"]).status.code(), Some(1));
}

#[test]
fn radon_tau_check_for_reflected_pair() {
    let fx = Fixture::new();
    let k = fx.polytope();
    let l = fx.gen("l.json", &["reflected", "--of", path_str(&k)]);
    let out = fx.path("tau.json");
    let o = run(&[
        "radon",
        "--grid",
        "100",
        "--body-k",
        path_str(&k),
        "--body-l",
        path_str(&l),
        "--output",
        path_str(&out),
    ]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out).unwrap()).unwrap();
    assert!(v["max_tau_diff"].as_f64().unwrap() < 1e-12);
    assert!(v["max_radon_residual"].as_f64().unwrap() < 1e-12);
}

#[test]
fn help_exits_zero() {
    assert_eq!(run(&["--help"]).status.code(), Some(0));
    assert_eq!(run(&["frobnicate"]).status.code(), Some(1));
}
