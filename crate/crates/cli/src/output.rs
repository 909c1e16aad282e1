//! Report files: `<command>-n<N>.json` and `<command>-n<N>.csv` in the output directory.
//!
//! CSV columns, in order: `command,member,param,axis,axis_value,value,verdict`.

use std::fs;
use std::path::{Path, PathBuf};

use serde_json::json;

use crate::config::ExperimentConfig;
use crate::failure::Failure;
use crate::run::{Outcome, Row};

pub const TOOL: &str = "sobolab";

pub fn stem(command: &str, cfg: &ExperimentConfig) -> String {
    format!("{command}-n{}", cfg.group.nodes_per_axis)
}

pub fn rows_csv(rows: &[Row]) -> Result<Vec<u8>, Failure> {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::CRLF).from_writer(Vec::new());
    for r in rows {
        w.serialize(r).map_err(|e| Failure::io(format!("csv: {e}")))?;
    }
    if rows.is_empty() {
        w.write_record(["command", "member", "param", "axis", "axis_value", "value", "verdict"])
            .map_err(|e| Failure::io(format!("csv: {e}")))?;
    }
    w.into_inner().map_err(|e| Failure::io(format!("csv: {e}")))
}

pub fn report_json(command: &str, cfg: &ExperimentConfig, outcome: &Outcome) -> String {
    let doc = json!({
        "tool": TOOL,
        "version": env!("CARGO_PKG_VERSION"),
        "command": command,
        "config": cfg,
        "summary": outcome.summary,
        "report": outcome.report,
    });
    serde_json::to_string_pretty(&doc).expect("report serializes") + "\n"
}

/// Writes both files and returns their paths.
pub fn write(dir: &Path, command: &str, cfg: &ExperimentConfig, outcome: &Outcome) -> Result<(PathBuf, PathBuf), Failure> {
    fs::create_dir_all(dir).map_err(|e| Failure::io(format!("cannot create {}: {e}", dir.display())))?;
    let stem = stem(command, cfg);
    let json_path = dir.join(format!("{stem}.json"));
    let csv_path = dir.join(format!("{stem}.csv"));
    fs::write(&json_path, report_json(command, cfg, outcome))
        .map_err(|e| Failure::io(format!("cannot write {}: {e}", json_path.display())))?;
    fs::write(&csv_path, rows_csv(&outcome.rows)?)
        .map_err(|e| Failure::io(format!("cannot write {}: {e}", csv_path.display())))?;
    Ok((json_path, csv_path))
}
