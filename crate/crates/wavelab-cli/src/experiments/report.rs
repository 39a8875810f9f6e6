//! Merging experiment summaries into one document.

use crate::cli::{ReportCommand, ReportMergeArgs};
use crate::{Failure, RunResult};
use serde_json::{json, Value};
use std::path::PathBuf;

pub fn run(cmd: &ReportCommand) -> RunResult<()> {
    match cmd {
        ReportCommand::Merge(args) => merge(args),
    }
}

/// Reads each summary, indexes it by its path, and aggregates failed checks
/// so one glance at `merged.json` tells whether the whole campaign is green.
fn merge(args: &ReportMergeArgs) -> RunResult<()> {
    let out = args.out.clone().unwrap_or_else(|| PathBuf::from("out"));
    std::fs::create_dir_all(&out).map_err(|e| {
        Failure::Usage(format!(
            "cannot create output directory {}: {e}",
            out.display()
        ))
    })?;

    let mut reports = serde_json::Map::new();
    let mut failed_checks: Vec<String> = Vec::new();
    for path in &args.inputs {
        let key = path.display().to_string();
        if reports.contains_key(&key) {
            return Err(Failure::Usage(format!("duplicate input {key}")));
        }
        let text = std::fs::read_to_string(path)
            .map_err(|e| Failure::Usage(format!("cannot read {key}: {e}")))?;
        let doc: Value = serde_json::from_str(&text)
            .map_err(|e| Failure::Usage(format!("{key} is not valid JSON: {e}")))?;
        if let Some(checks) = doc.get("checks").and_then(Value::as_array) {
            for check in checks {
                if check.get("passed") == Some(&Value::Bool(false)) {
                    let name = check
                        .get("name")
                        .and_then(Value::as_str)
                        .unwrap_or("<unnamed>");
                    failed_checks.push(format!("{key}: {name}"));
                }
            }
        }
        reports.insert(key, doc);
    }

    let merged = json!({
        "num_reports": reports.len(),
        "failed_checks": failed_checks,
        "reports": Value::Object(reports),
    });
    let mut text = serde_json::to_string_pretty(&merged)
        .map_err(|e| Failure::Usage(format!("cannot serialize merged report: {e}")))?;
    text.push('\n');
    let path = out.join("merged.json");
    std::fs::write(&path, text)
        .map_err(|e| Failure::Usage(format!("cannot write {}: {e}", path.display())))?;
    println!("wrote {}", path.display());
    Ok(())
}
