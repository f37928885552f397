use std::path::Path;

use anyhow::{Context, Result};
use serde::Serialize;
use serde_json::Value;

use crate::commands::Outcome;
use crate::scenario::Loaded;

/// Report envelope. Nothing here depends on wall-clock time or thread count,
/// so equal inputs give byte-identical files.
#[derive(Serialize)]
struct Report<'a> {
    tool: &'static str,
    version: &'static str,
    subcommand: &'a str,
    scenario: &'a str,
    scenario_sha256: &'a str,
    seed: u64,
    status: &'static str,
    violations: &'a [String],
    result: &'a Value,
}

pub fn write(dir: &Path, name: &str, loaded: &Loaded, seed: u64, outcome: &Outcome) -> Result<&'static str> {
    std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    let status = if outcome.violations.is_empty() { "ok" } else { "violation" };
    let report = Report {
        tool: "twisted",
        version: env!("CARGO_PKG_VERSION"),
        subcommand: name,
        scenario: &loaded.scenario.name,
        scenario_sha256: &loaded.sha256,
        seed,
        status,
        violations: &outcome.violations,
        result: &outcome.result,
    };
    let mut json = serde_json::to_string_pretty(&report)?;
    json.push('\n');
    let path = dir.join(format!("{name}.json"));
    std::fs::write(&path, json).with_context(|| format!("writing {}", path.display()))?;
    for t in &outcome.tables {
        let file = match &t.suffix {
            Some(s) => format!("{name}-{s}.csv"),
            None => format!("{name}.csv"),
        };
        let path = dir.join(file);
        let mut w = csv::Writer::from_path(&path).with_context(|| format!("writing {}", path.display()))?;
        w.write_record(&t.header)?;
        for row in &t.rows {
            w.write_record(row)?;
        }
        w.flush()?;
    }
    Ok(status)
}
