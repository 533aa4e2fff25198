// Copyright 2026 The spinloc Authors
// SPDX-License-Identifier: Apache-2.0

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::config::ExperimentConfig;
use crate::error::{Error, Result};

/// A CSV table with a fixed column order.
#[derive(Clone, Debug, PartialEq)]
pub struct Table {
    /// File stem.
    pub name: String,
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
}

/// Results that can be written by [`emit_results`].
pub trait Report: Serialize {
    fn tables(&self) -> Vec<Table>;

    fn warnings(&self) -> Vec<String> {
        Vec::new()
    }
}

/// Shortest round-trip scientific form; `inf`, `-inf` and `nan` spelled out.
pub fn num(v: f64) -> String {
    if v.is_nan() {
        "nan".into()
    } else if v.is_infinite() {
        if v > 0.0 { "inf" } else { "-inf" }.into()
    } else {
        format!("{v:e}")
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OutputFormat {
    /// One CSV file per table.
    #[default]
    Csv,
    /// CSV tables plus the full report as `report.json`.
    CsvJson,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub name: String,
    pub config_hash: String,
    pub seed: u64,
    pub realizations: usize,
    pub stream_layout: String,
    pub version: String,
    pub wall_time_s: f64,
    pub files: Vec<String>,
    pub warnings: Vec<String>,
}

fn io(e: impl std::fmt::Display, path: &Path) -> Error {
    Error::Io(std::io::Error::other(format!("{}: {e}", path.display())))
}

/// Writes a table as CSV.
pub fn write_csv(table: &Table, path: &Path) -> Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(|e| io(e, path))?;
    w.write_record(&table.header).map_err(|e| io(e, path))?;
    for row in &table.rows {
        w.write_record(row).map_err(|e| io(e, path))?;
    }
    w.flush()?;
    Ok(())
}

/// Writes the tables, the resolved config and a JSON manifest into `dir`.
pub fn emit_results<R: Report>(
    report: &R,
    cfg: &ExperimentConfig,
    dir: &Path,
    format: OutputFormat,
    wall_time_s: f64,
) -> Result<Manifest> {
    fs::create_dir_all(dir)?;
    let mut files = Vec::new();
    for t in report.tables() {
        let file = format!("{}.csv", t.name);
        write_csv(&t, &dir.join(&file))?;
        files.push(file);
    }
    if format == OutputFormat::CsvJson {
        let body = serde_json::to_string_pretty(report).map_err(|e| Error::Numerical(e.to_string()))?;
        fs::write(dir.join("report.json"), body)?;
        files.push("report.json".into());
    }
    fs::write(dir.join("config.toml"), cfg.to_toml_string()?)?;
    files.push("config.toml".into());
    let manifest = Manifest {
        name: cfg.name.clone(),
        config_hash: cfg.hash(),
        seed: cfg.seed,
        realizations: cfg.realizations,
        stream_layout: "ChaCha20(seed), stream = (realization << 8) | family".into(),
        version: env!("CARGO_PKG_VERSION").into(),
        wall_time_s,
        files,
        warnings: report.warnings(),
    };
    let body = serde_json::to_string_pretty(&manifest).map_err(|e| Error::Numerical(e.to_string()))?;
    fs::write(dir.join("manifest.json"), body)?;
    Ok(manifest)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn number_format_round_trips() {
        for v in [0.1, 1e-300, 123456.789, -2.5e-7] {
            assert_eq!(num(v).parse::<f64>().unwrap(), v);
        }
        assert_eq!(num(f64::INFINITY), "inf");
    }
}
