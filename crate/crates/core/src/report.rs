//! JSON and CSV serialization of decomposition reports.

use std::io::Write;

use serde::Serialize;

use crate::error::Result;
use crate::sphere::{DecompositionReport, DirectionRecord};

pub const SCHEMA_VERSION: u32 = 1;

/// One CSV line per grid pole; the same record appears in JSON reports.
#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct DirectionRow {
    pub pole_x: f64,
    pub pole_y: f64,
    pub pole_z: f64,
    pub tag: &'static str,
    pub best_angle: f64,
    pub best_residual: f64,
    pub width_spread: f64,
    pub tau_spread: f64,
    pub in_sigma: bool,
    pub in_lambda: bool,
}

impl From<&DirectionRecord> for DirectionRow {
    fn from(r: &DirectionRecord) -> Self {
        DirectionRow {
            pole_x: r.pole.x(),
            pole_y: r.pole.y(),
            pole_z: r.pole.z(),
            tag: r.class.tag.as_str(),
            best_angle: r.class.best_angle,
            best_residual: r.class.best_residual,
            width_spread: r.width_spread,
            tau_spread: r.tau_spread,
            in_sigma: r.in_sigma,
            in_lambda: r.in_lambda,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct JsonReport {
    pub schema_version: u32,
    pub verdict: &'static str,
    /// Poles behind a `Violation` or `MixedEvidence` verdict.
    pub verdict_poles: Vec<[f64; 3]>,
    pub coverage_gol: bool,
    pub coverage_mod_gol: bool,
    pub common_width: Option<f64>,
    pub directions: Vec<DirectionRow>,
}

impl From<&DecompositionReport> for JsonReport {
    fn from(rep: &DecompositionReport) -> Self {
        JsonReport {
            schema_version: SCHEMA_VERSION,
            verdict: rep.verdict.name(),
            verdict_poles: rep.verdict.poles().iter().map(|p| p.to_array()).collect(),
            coverage_gol: rep.coverage_gol,
            coverage_mod_gol: rep.coverage_mod_gol,
            common_width: rep.common_width,
            directions: rep.directions.iter().map(DirectionRow::from).collect(),
        }
    }
}

pub fn write_json<W: Write>(rep: &DecompositionReport, mut out: W) -> Result<()> {
    serde_json::to_writer_pretty(&mut out, &JsonReport::from(rep))?;
    out.write_all(b"\n")?;
    Ok(())
}

pub fn write_csv<W: Write>(rep: &DecompositionReport, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for r in &rep.directions {
        w.serialize(DirectionRow::from(r))?;
    }
    w.flush()?;
    Ok(())
}

/// Multi-line plain-text summary for terminals.
pub fn summary(rep: &DecompositionReport) -> String {
    let count =
        |f: &dyn Fn(&DirectionRecord) -> bool| rep.directions.iter().filter(|r| f(r)).count();
    let tags = ["F0", "F1", "Fr", "Disk", "NoMatch"]
        .iter()
        .map(|t| format!("{t}={}", count(&|r| r.class.tag.as_str() == *t)))
        .collect::<Vec<_>>()
        .join(" ");
    let worst = rep
        .directions
        .iter()
        .map(|r| r.class.best_residual)
        .fold(0.0f64, f64::max);
    let mut s = format!("verdict: {}\n", rep.verdict.name());
    if !rep.verdict.poles().is_empty() {
        s += &format!("  poles flagged: {}\n", rep.verdict.poles().len());
    }
    s += &format!("directions: {} ({tags})\n", rep.directions.len());
    s += &format!(
        "sigma: {}  lambda: {}\n",
        count(&|r| r.in_sigma),
        count(&|r| r.in_lambda)
    );
    s += &format!(
        "coverage F0+F1+Sigma: {}  F0+F1+Lambda: {}\n",
        rep.coverage_gol, rep.coverage_mod_gol
    );
    match rep.common_width {
        Some(w) => s += &format!("common width: {w:.12}\n"),
        None => s += "common width: none\n",
    }
    s += &format!("largest best residual: {worst:.3e}\n");
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::body::ConvexBody;
    use crate::congruence::MatchParams;
    use crate::geom::fibonacci_grid;
    use crate::sphere::{decompose_sphere, AnalysisParams};

    fn ball_report() -> DecompositionReport {
        let ball = ConvexBody::ball(1.0).unwrap();
        let params = AnalysisParams {
            matching: MatchParams {
                circle_samples: 32,
                match_tol: 1e-8,
            },
            spread_tol: 1e-7,
        };
        decompose_sphere(&ball, &ball, &fibonacci_grid(4, true).unwrap(), &params).unwrap()
    }

    #[test]
    fn json_schema() {
        let mut buf = Vec::new();
        write_json(&ball_report(), &mut buf).unwrap();
        let v: serde_json::Value = serde_json::from_slice(&buf).unwrap();
        assert_eq!(v["schema_version"], 1);
        assert_eq!(v["verdict"], "Equal");
        assert_eq!(v["coverage_gol"], true);
        assert_eq!(v["directions"].as_array().unwrap().len(), 8);
        assert_eq!(v["directions"][0]["tag"], "Disk");
    }

    #[test]
    fn csv_header_and_rows() {
        let mut buf = Vec::new();
        write_csv(&ball_report(), &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(
            lines.next().unwrap(),
            "pole_x,pole_y,pole_z,tag,best_angle,best_residual,width_spread,tau_spread,in_sigma,in_lambda"
        );
        assert_eq!(lines.count(), 8);
    }

    #[test]
    fn summary_mentions_verdict() {
        assert!(summary(&ball_report()).starts_with("verdict: Equal"));
    }
}
