//! Shared experiment plumbing: output directory management, check recording,
//! and the summary document every subcommand writes.
//!
//! Each experiment funnels its artifacts through a [`Reporter`]: CSV tables and
//! JSON documents land in the output directory, named checks print one
//! `check <name>: pass|FAIL` line each, and `finish` writes `summary.json`
//! capturing parameters, results, output names, checks, and warnings. A failed
//! check turns into a numerical-assertion failure (exit code 2) only after all
//! artifacts are on disk, so a red run still leaves its evidence behind.

pub mod ode;
pub mod report;
pub mod wave;

use crate::cli::IoArgs;
use crate::config::{ExperimentConfig, Tolerances};
use crate::csv::CsvTable;
use crate::{Failure, RunResult};
use serde::Serialize;
use serde_json::Value;
use std::path::{Path, PathBuf};

/// One recorded pass/fail assertion with its human-readable evidence.
#[derive(Debug, Clone, Serialize)]
pub struct CheckRecord {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

/// Collects everything an experiment produces and writes the summary last.
pub struct Reporter {
    out: PathBuf,
    outputs: Vec<String>,
    checks: Vec<CheckRecord>,
    warnings: Vec<String>,
}

impl Reporter {
    pub fn new(out: &Path) -> RunResult<Self> {
        std::fs::create_dir_all(out).map_err(|e| {
            Failure::Usage(format!(
                "cannot create output directory {}: {e}",
                out.display()
            ))
        })?;
        Ok(Self {
            out: out.to_path_buf(),
            outputs: Vec::new(),
            checks: Vec::new(),
            warnings: Vec::new(),
        })
    }

    pub fn out_dir(&self) -> &Path {
        &self.out
    }

    pub fn write_csv(&mut self, name: &str, table: &CsvTable) -> RunResult<()> {
        table.write_to(&self.out.join(name))?;
        self.outputs.push(name.to_string());
        Ok(())
    }

    pub fn write_json<T: Serialize>(&mut self, name: &str, value: &T) -> RunResult<()> {
        let text = to_pretty_json(value)
            .map_err(|e| Failure::Usage(format!("cannot serialize {name}: {e}")))?;
        let path = self.out.join(name);
        std::fs::write(&path, text)
            .map_err(|e| Failure::Usage(format!("cannot write {}: {e}", path.display())))?;
        self.outputs.push(name.to_string());
        Ok(())
    }

    /// Records a named assertion and echoes its verdict to stdout.
    pub fn check(&mut self, name: &str, passed: bool, detail: String) {
        let verdict = if passed { "pass" } else { "FAIL" };
        println!("check {name}: {verdict} ({detail})");
        self.checks.push(CheckRecord {
            name: name.to_string(),
            passed,
            detail,
        });
    }

    /// Records a non-fatal observation; never affects the exit code.
    pub fn warn(&mut self, message: String) {
        println!("warning: {message}");
        self.warnings.push(message);
    }

    /// Writes `summary.json` and converts failed checks into exit code 2.
    pub fn finish(self, experiment: &str, params: Value, results: Value) -> RunResult<()> {
        let failed: Vec<String> = self
            .checks
            .iter()
            .filter(|c| !c.passed)
            .map(|c| c.name.clone())
            .collect();
        let summary = serde_json::json!({
            "experiment": experiment,
            "params": params,
            "results": results,
            "outputs": self.outputs,
            "checks": self.checks,
            "warnings": self.warnings,
        });
        let text = to_pretty_json(&summary)
            .map_err(|e| Failure::Usage(format!("cannot serialize summary: {e}")))?;
        let path = self.out.join("summary.json");
        std::fs::write(&path, text)
            .map_err(|e| Failure::Usage(format!("cannot write {}: {e}", path.display())))?;
        println!("wrote {}", path.display());
        if failed.is_empty() {
            Ok(())
        } else {
            Err(Failure::Numerical(format!(
                "failed checks: {}",
                failed.join(", ")
            )))
        }
    }
}

fn to_pretty_json<T: Serialize>(value: &T) -> Result<String, serde_json::Error> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    Ok(text)
}

/// Configuration, tolerances, and reporter resolved from the common flags.
pub struct Setup {
    pub cfg: ExperimentConfig,
    pub tol: Tolerances,
    pub rep: Reporter,
    pub seed: u64,
    pub deterministic: bool,
}

/// Loads the optional config file, validates it against the experiment id,
/// and resolves the output directory and seed (flags win over config).
pub fn setup(io: &IoArgs, experiment: &str) -> RunResult<Setup> {
    let cfg = match &io.config {
        Some(path) => ExperimentConfig::load(path)?,
        None => ExperimentConfig::default(),
    };
    cfg.expect_experiment(experiment)?;
    let tol = cfg.tolerances.clone().unwrap_or_default();
    tol.validate()?;
    let out = io
        .out
        .clone()
        .or_else(|| cfg.out.clone())
        .unwrap_or_else(|| PathBuf::from("out"));
    let seed = io.seed.or(cfg.seed).unwrap_or(42);
    let deterministic = io.deterministic || cfg.deterministic.unwrap_or(false);
    let rep = Reporter::new(&out)?;
    Ok(Setup {
        cfg,
        tol,
        rep,
        seed,
        deterministic,
    })
}

/// Relative deviation |value - expected| / |expected|.
pub fn rel_err(value: f64, expected: f64) -> f64 {
    (value - expected).abs() / expected.abs()
}

/// Least-squares slope of y against x; NaN with fewer than two points.
pub fn least_squares_slope(xs: &[f64], ys: &[f64]) -> f64 {
    debug_assert_eq!(xs.len(), ys.len());
    if xs.len() < 2 {
        return f64::NAN;
    }
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let cov: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let var: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    cov / var
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn slope_of_exact_line_is_recovered() {
        let xs = [1.0, 2.0, 3.0, 4.0];
        let ys: Vec<f64> = xs.iter().map(|x| 2.5 * x - 1.0).collect();
        assert!((least_squares_slope(&xs, &ys) - 2.5).abs() < 1e-12);
    }

    #[test]
    fn reporter_failed_check_surfaces_as_numerical_failure() {
        let dir = tempfile::tempdir().expect("tempdir");
        let mut rep = Reporter::new(dir.path()).expect("reporter");
        rep.check("good", true, "fine".into());
        rep.check("bad", false, "broke".into());
        let err = rep
            .finish("demo", serde_json::json!({}), serde_json::json!({}))
            .expect_err("must fail");
        assert_eq!(err.exit_code(), 2);
        assert!(err.message().contains("bad"));
        let summary: serde_json::Value = serde_json::from_str(
            &std::fs::read_to_string(dir.path().join("summary.json")).expect("summary"),
        )
        .expect("json");
        assert_eq!(summary["checks"][1]["passed"], serde_json::json!(false));
    }

    #[test]
    fn reporter_lists_outputs_in_summary() {
        let dir = tempfile::tempdir().expect("tempdir");
        let mut rep = Reporter::new(dir.path()).expect("reporter");
        let table = CsvTable::new(vec!["a"]).expect("table");
        rep.write_csv("t.csv", &table).expect("csv");
        rep.write_json("d.json", &serde_json::json!({"k": 1}))
            .expect("json");
        rep.finish("demo", serde_json::json!({}), serde_json::json!({}))
            .expect("clean finish");
        let summary: serde_json::Value = serde_json::from_str(
            &std::fs::read_to_string(dir.path().join("summary.json")).expect("summary"),
        )
        .expect("json");
        assert_eq!(summary["outputs"], serde_json::json!(["t.csv", "d.json"]));
        assert!(dir.path().join("t.csv").exists());
    }
}
