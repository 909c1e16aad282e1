//! Console table over written reports.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use serde_json::Value;

use crate::failure::Failure;

#[derive(Debug, Clone, PartialEq)]
pub struct Entry {
    pub file: String,
    pub command: String,
    pub family: String,
    pub nodes: u64,
    pub params: String,
    pub envelope: Option<[f64; 3]>,
    pub value: Option<f64>,
    pub verdict: String,
    /// Reports sharing everything but the resolution.
    pub key: String,
}

/// Report files under each path; directories are scanned one level deep.
pub fn collect(paths: &[PathBuf]) -> Result<Vec<PathBuf>, Failure> {
    let mut out = Vec::new();
    for p in paths {
        if p.is_dir() {
            let rd = fs::read_dir(p).map_err(|e| Failure::io(format!("cannot read {}: {e}", p.display())))?;
            for entry in rd.flatten() {
                let path = entry.path();
                if path.extension().is_some_and(|e| e == "json") {
                    out.push(path);
                }
            }
        } else if p.exists() {
            out.push(p.clone());
        } else {
            return Err(Failure::io(format!("{} does not exist", p.display())));
        }
    }
    out.sort();
    Ok(out)
}

pub fn parse(path: &Path) -> Result<Entry, Failure> {
    let text = fs::read_to_string(path).map_err(|e| Failure::io(format!("cannot read {}: {e}", path.display())))?;
    let doc: Value = serde_json::from_str(&text).map_err(|e| {
        let line = text.lines().nth(e.line().saturating_sub(1)).unwrap_or("");
        Failure::io(format!("{}:{}:{}: {e}\n  | {line}", path.display(), e.line(), e.column()))
    })?;
    let malformed = |what: &str| Failure::io(format!("{}: not a report ({what} missing)", path.display()));
    let command = doc["command"].as_str().ok_or_else(|| malformed("command"))?.to_string();
    let config = doc.get("config").ok_or_else(|| malformed("config"))?;
    let summary = doc.get("summary").ok_or_else(|| malformed("summary"))?;
    let env = &summary["envelope"];
    let envelope = match (env["min"].as_f64(), env["median"].as_f64(), env["max"].as_f64()) {
        (Some(a), Some(b), Some(c)) => Some([a, b, c]),
        _ => None,
    };
    let mut keyed = config.clone();
    if let Some(g) = keyed.get_mut("group").and_then(Value::as_object_mut) {
        g.remove("nodes_per_axis");
    }
    if let Some(o) = keyed.as_object_mut() {
        o.remove("output");
    }
    Ok(Entry {
        file: path.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default(),
        key: format!("{command}|{keyed}"),
        command,
        family: config["group"]["family"].as_str().unwrap_or("?").to_string(),
        nodes: config["group"]["nodes_per_axis"].as_u64().unwrap_or(0),
        params: summary["params"].as_str().unwrap_or("").to_string(),
        envelope,
        value: summary["value"].as_f64(),
        verdict: summary["verdict"].as_str().unwrap_or("?").to_string(),
    })
}

/// `max/min` of the summary values over the resolutions of each experiment.
pub fn stability(entries: &[Entry]) -> Vec<Option<f64>> {
    let mut groups: BTreeMap<&str, Vec<(u64, f64)>> = BTreeMap::new();
    for e in entries {
        if let Some(v) = e.value {
            groups.entry(&e.key).or_default().push((e.nodes, v));
        }
    }
    entries
        .iter()
        .map(|e| {
            let g = groups.get(e.key.as_str())?;
            let mut ns: Vec<u64> = g.iter().map(|x| x.0).collect();
            ns.sort_unstable();
            ns.dedup();
            if ns.len() < 2 {
                return None;
            }
            let lo = g.iter().map(|x| x.1.abs()).fold(f64::INFINITY, f64::min);
            let hi = g.iter().map(|x| x.1.abs()).fold(0.0, f64::max);
            Some(hi / lo)
        })
        .collect()
}

fn num(v: Option<f64>) -> String {
    v.map_or_else(|| "-".to_string(), |x| format!("{x:.4}"))
}

pub fn table(entries: &[Entry]) -> String {
    if entries.is_empty() {
        return "no reports\n".to_string();
    }
    let stab = stability(entries);
    let header = ["file", "command", "family", "N", "params", "min", "median", "max", "verdict", "stability"];
    let mut cells: Vec<Vec<String>> = vec![header.iter().map(|s| s.to_string()).collect()];
    for (e, s) in entries.iter().zip(&stab) {
        let env = e.envelope;
        cells.push(vec![
            e.file.clone(),
            e.command.clone(),
            e.family.clone(),
            e.nodes.to_string(),
            e.params.clone(),
            num(env.map(|x| x[0])),
            num(env.map(|x| x[1]).or(e.value)),
            num(env.map(|x| x[2])),
            e.verdict.clone(),
            num(*s),
        ]);
    }
    let widths: Vec<usize> =
        (0..header.len()).map(|c| cells.iter().map(|r| r[c].chars().count()).max().unwrap_or(0)).collect();
    let mut out = String::new();
    for row in &cells {
        let line: Vec<String> = row.iter().zip(&widths).map(|(c, w)| format!("{c:<w$}")).collect();
        out.push_str(line.join("  ").trim_end());
        out.push('\n');
    }
    out
}
