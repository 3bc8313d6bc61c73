//! CSV tables and JSON metadata sidecars.

use std::path::{Path, PathBuf};
use std::process::Command;

use serde_json::json;

use crate::config::ScenarioConfig;
use crate::error::{SimError, SimResult};
use crate::experiments::ExperimentResult;

/// Render the result table as CSV bytes. Numbers use the shortest
/// round-trip representation, so equal results give equal bytes.
pub fn csv_bytes(r: &ExperimentResult) -> SimResult<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let out_err = |e: csv::Error| SimError::Output(e.to_string());
    w.write_record(r.columns()).map_err(out_err)?;
    for row in &r.rows {
        w.write_record(row.iter().map(|x| x.to_string())).map_err(out_err)?;
    }
    w.into_inner().map_err(|e| SimError::Output(e.to_string()))
}

/// `git describe` of the source tree, or `"unknown"`.
pub fn git_describe() -> String {
    Command::new("git")
        .args(["-C", env!("CARGO_MANIFEST_DIR"), "describe", "--always", "--dirty", "--tags"])
        .output()
        .ok()
        .filter(|o| o.status.success())
        .and_then(|o| String::from_utf8(o.stdout).ok())
        .map(|s| s.trim().to_string())
        .filter(|s| !s.is_empty())
        .unwrap_or_else(|| "unknown".to_string())
}

pub fn sidecar(r: &ExperimentResult, cfg: &ScenarioConfig, csv_name: &str) -> serde_json::Value {
    json!({
        "experiment": r.name,
        "csv": csv_name,
        "columns": r.columns(),
        "seed": r.metadata.seed,
        "trials": r.metadata.trials,
        "config_hash": r.metadata.config_hash,
        "config": cfg,
        "git_describe": git_describe(),
        "runtime_seconds": r.metadata.runtime_seconds,
        "summary": r.summary,
    })
}

/// Write `<name>.csv` and `<name>.json` into `dir`, creating it if needed.
pub fn write_result(r: &ExperimentResult, cfg: &ScenarioConfig, dir: &Path) -> SimResult<(PathBuf, PathBuf)> {
    std::fs::create_dir_all(dir).map_err(|e| SimError::io(dir, e))?;
    let csv_path = dir.join(format!("{}.csv", r.name));
    let json_path = dir.join(format!("{}.json", r.name));
    std::fs::write(&csv_path, csv_bytes(r)?).map_err(|e| SimError::io(&csv_path, e))?;
    let text = serde_json::to_string_pretty(&sidecar(r, cfg, &format!("{}.csv", r.name)))
        .map_err(|e| SimError::Output(e.to_string()))?;
    std::fs::write(&json_path, text + "\n").map_err(|e| SimError::io(&json_path, e))?;
    Ok((csv_path, json_path))
}
