//! Experiment configuration: one JSON document per run. Unknown keys are
//! rejected with a diagnostic naming the key; inline flags override config
//! fields; built-in defaults fill the rest.

use crate::{Failure, RunResult};
use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};

/// Assertion tolerances with the documented defaults, overridable per field
/// from the config so a single check can be tightened or relaxed.
#[derive(Debug, Clone, Deserialize, Serialize, PartialEq)]
#[serde(deny_unknown_fields, default)]
pub struct Tolerances {
    /// Accepted band for the observed L2 convergence rate.
    pub rate_min: f64,
    pub rate_max: f64,
    /// Ceiling on the final-level L2 error in convergence studies.
    pub final_error: f64,
    /// Band for the refined load-to-solution isometry ratio.
    pub ratio_low: f64,
    pub ratio_high: f64,
    /// Relative tolerance for closed-form value comparisons.
    pub value_rel: f64,
    /// Multiplicative slack on upper-bound inequalities (1.05 = 5%).
    pub slack: f64,
    /// Multiplicative slack on the two-sided extension band (1.02 = 2%).
    pub extension_slack: f64,
    /// Lower-bound slack for the Friedrichs inequality (0.95 = 5%).
    pub friedrichs_slack: f64,
    /// Relative spread allowed while beta_h stabilizes across mesh sizes.
    pub infsup_spread: f64,
    /// Floor for beta_h in the moderate regime mu T^2 <= 100.
    pub beta_floor: f64,
    /// Ceiling for the interior-residual dual norm of a smooth interpolant.
    pub interior_residual: f64,
    /// Ceiling for the relative L2(Q) error in the worked wave example.
    pub example_l2_rel: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            rate_min: 1.8,
            rate_max: 2.2,
            final_error: 1e-4,
            ratio_low: 0.98,
            ratio_high: 1.02,
            value_rel: 0.01,
            slack: 1.05,
            extension_slack: 1.02,
            friedrichs_slack: 0.95,
            infsup_spread: 0.05,
            beta_floor: 0.25,
            interior_residual: 1e-2,
            example_l2_rel: 0.02,
        }
    }
}

impl Tolerances {
    pub fn validate(&self) -> RunResult<()> {
        let fields = [
            ("rate_min", self.rate_min),
            ("rate_max", self.rate_max),
            ("final_error", self.final_error),
            ("ratio_low", self.ratio_low),
            ("ratio_high", self.ratio_high),
            ("value_rel", self.value_rel),
            ("slack", self.slack),
            ("extension_slack", self.extension_slack),
            ("friedrichs_slack", self.friedrichs_slack),
            ("infsup_spread", self.infsup_spread),
            ("beta_floor", self.beta_floor),
            ("interior_residual", self.interior_residual),
            ("example_l2_rel", self.example_l2_rel),
        ];
        for (name, v) in fields {
            if !(v > 0.0) || !v.is_finite() {
                return Err(Failure::Usage(format!(
                    "tolerance `{name}` must be positive and finite, got {v}"
                )));
            }
        }
        for (lo_name, lo, hi_name, hi) in [
            ("rate_min", self.rate_min, "rate_max", self.rate_max),
            ("ratio_low", self.ratio_low, "ratio_high", self.ratio_high),
        ] {
            if lo >= hi {
                return Err(Failure::Usage(format!(
                    "tolerance `{lo_name}` = {lo} must be below `{hi_name}` = {hi}"
                )));
            }
        }
        Ok(())
    }
}

/// One experiment configuration document. Every field is optional; inline
/// flags take precedence, then these values, then built-in defaults.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    /// Experiment id, e.g. "ode-convergence"; must match the invoked
    /// subcommand when present.
    pub experiment: Option<String>,
    pub mu: Option<f64>,
    #[serde(rename = "T")]
    pub t_final: Option<f64>,
    #[serde(rename = "L")]
    pub length: Option<f64>,
    pub nt: Option<usize>,
    pub nx: Option<usize>,
    /// Mesh sizes for refinement studies; >= 2 each, strictly increasing.
    pub mesh_sizes: Option<Vec<usize>>,
    /// Mode indices for the resonant-growth table.
    pub modes: Option<Vec<usize>>,
    /// Temporal element counts for the fixed-ratio diagnostic.
    pub levels: Option<Vec<usize>>,
    pub rhs: Option<String>,
    pub refine: Option<usize>,
    pub cases: Option<usize>,
    pub ratio: Option<f64>,
    pub which: Option<String>,
    pub out: Option<PathBuf>,
    pub deterministic: Option<bool>,
    pub seed: Option<u64>,
    pub tolerances: Option<Tolerances>,
}

/// All experiment ids accepted in the `experiment` field.
pub const EXPERIMENT_IDS: &[&str] = &[
    "ode-solve",
    "ode-dualnorm",
    "ode-infsup",
    "ode-isometry",
    "ode-equivalence",
    "ode-convergence",
    "wave-solve",
    "wave-infsup-decay",
    "wave-theorem1",
    "wave-stability-sweep",
    "wave-cfl-demo",
    "wave-example-sine",
];

impl ExperimentConfig {
    pub fn load(path: &Path) -> RunResult<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Failure::Usage(format!("cannot read config {}: {e}", path.display())))?;
        let cfg: Self = serde_json::from_str(&text).map_err(|e| {
            Failure::Usage(format!("invalid config {}: {e}", path.display()))
        })?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> RunResult<()> {
        if let Some(id) = &self.experiment {
            if !EXPERIMENT_IDS.contains(&id.as_str()) {
                return Err(Failure::Usage(format!(
                    "unknown experiment `{id}`; expected one of {}",
                    EXPERIMENT_IDS.join(", ")
                )));
            }
        }
        for (name, sizes) in [("mesh_sizes", &self.mesh_sizes), ("levels", &self.levels)] {
            if let Some(sizes) = sizes {
                validate_sizes(name, sizes)?;
            }
        }
        if let Some(modes) = &self.modes {
            if modes.is_empty() {
                return Err(Failure::Usage("`modes` must not be empty".into()));
            }
            for w in modes.windows(2) {
                if w[1] <= w[0] {
                    return Err(Failure::Usage(format!(
                        "`modes` must be strictly increasing: {} then {}",
                        w[0], w[1]
                    )));
                }
            }
            if modes[0] == 0 {
                return Err(Failure::Usage("mode indices start at 1".into()));
            }
        }
        for (name, v) in [
            ("mu", self.mu),
            ("T", self.t_final),
            ("L", self.length),
            ("ratio", self.ratio),
        ] {
            if let Some(v) = v {
                if !(v > 0.0) || !v.is_finite() {
                    return Err(Failure::Usage(format!(
                        "`{name}` must be positive and finite, got {v}"
                    )));
                }
            }
        }
        for (name, v) in [("nt", self.nt), ("nx", self.nx)] {
            if let Some(v) = v {
                ensure_mesh_size(name, v)?;
            }
        }
        if self.refine == Some(0) {
            return Err(Failure::Usage("`refine` must be at least 1".into()));
        }
        if self.cases == Some(0) {
            return Err(Failure::Usage("`cases` must be at least 1".into()));
        }
        if let Some(tol) = &self.tolerances {
            tol.validate()?;
        }
        Ok(())
    }

    /// Usage error when this config names a different experiment than the
    /// invoked subcommand.
    pub fn expect_experiment(&self, id: &str) -> RunResult<()> {
        match &self.experiment {
            Some(named) if named != id => Err(Failure::Usage(format!(
                "config names experiment `{named}` but `{id}` was invoked"
            ))),
            _ => Ok(()),
        }
    }
}

pub fn ensure_mesh_size(name: &str, n: usize) -> RunResult<()> {
    if n < 2 {
        return Err(Failure::Usage(format!(
            "`{name}` must be at least 2, got {n}"
        )));
    }
    Ok(())
}

/// Mesh-size lists must be nonempty, each entry >= 2, strictly increasing.
pub fn validate_sizes(name: &str, sizes: &[usize]) -> RunResult<()> {
    if sizes.is_empty() {
        return Err(Failure::Usage(format!("`{name}` must not be empty")));
    }
    for &n in sizes {
        ensure_mesh_size(name, n)?;
    }
    for w in sizes.windows(2) {
        if w[1] <= w[0] {
            return Err(Failure::Usage(format!(
                "`{name}` must be strictly increasing: {} then {}",
                w[0], w[1]
            )));
        }
    }
    Ok(())
}

/// First present value wins: inline flag, then config field, then default.
pub fn pick<T: Clone>(flag: Option<T>, config: Option<T>, default: T) -> T {
    flag.or(config).unwrap_or(default)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    fn load_str(text: &str) -> RunResult<ExperimentConfig> {
        let mut file = tempfile::NamedTempFile::new().unwrap();
        file.write_all(text.as_bytes()).unwrap();
        ExperimentConfig::load(file.path())
    }

    #[test]
    fn full_document_round_trips() {
        let cfg = load_str(
            r#"{
                "experiment": "ode-convergence",
                "mu": 9.869604401089358,
                "T": 1.0,
                "mesh_sizes": [16, 32, 64, 128],
                "rhs": "const:1.0",
                "out": "results",
                "deterministic": true,
                "seed": 7,
                "tolerances": { "rate_min": 1.9 }
            }"#,
        )
        .unwrap();
        assert_eq!(cfg.mesh_sizes.as_deref(), Some(&[16, 32, 64, 128][..]));
        assert_eq!(cfg.seed, Some(7));
        let tol = cfg.tolerances.unwrap();
        assert_eq!(tol.rate_min, 1.9);
        assert_eq!(tol.rate_max, 2.2);
    }

    #[test]
    fn unknown_keys_are_rejected_by_name() {
        let e = load_str(r#"{ "mesh_size": [16] }"#).unwrap_err();
        assert_eq!(e.exit_code(), 1);
        assert!(e.message().contains("mesh_size"), "{e}");
        let e = load_str(r#"{ "tolerances": { "rate_mim": 1.9 } }"#).unwrap_err();
        assert!(e.message().contains("rate_mim"), "{e}");
    }

    #[test]
    fn size_lists_must_be_increasing_and_at_least_two() {
        assert!(load_str(r#"{ "mesh_sizes": [16, 16] }"#).is_err());
        assert!(load_str(r#"{ "mesh_sizes": [32, 16] }"#).is_err());
        assert!(load_str(r#"{ "mesh_sizes": [1, 16] }"#).is_err());
        assert!(load_str(r#"{ "mesh_sizes": [] }"#).is_err());
        assert!(load_str(r#"{ "mesh_sizes": [2, 3] }"#).is_ok());
    }

    #[test]
    fn tolerances_must_be_positive_and_ordered() {
        assert!(load_str(r#"{ "tolerances": { "slack": 0.0 } }"#).is_err());
        assert!(load_str(r#"{ "tolerances": { "final_error": -1e-4 } }"#).is_err());
        assert!(
            load_str(r#"{ "tolerances": { "rate_min": 2.3 } }"#).is_err(),
            "rate_min above rate_max"
        );
    }

    #[test]
    fn experiment_names_are_checked() {
        assert!(load_str(r#"{ "experiment": "ode-conv" }"#).is_err());
        let cfg = load_str(r#"{ "experiment": "ode-convergence" }"#).unwrap();
        assert!(cfg.expect_experiment("ode-convergence").is_ok());
        assert!(cfg.expect_experiment("ode-solve").is_err());
    }

    #[test]
    fn pick_prefers_flag_then_config_then_default() {
        assert_eq!(pick(Some(1), Some(2), 3), 1);
        assert_eq!(pick(None, Some(2), 3), 2);
        assert_eq!(pick::<i32>(None, None, 3), 3);
    }
}
