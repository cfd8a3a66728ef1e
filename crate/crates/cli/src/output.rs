//! Reading inputs and writing stamped outputs.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use anyhow::Context;
use serde_json::{json, Map, Value};

use twc::grid::sidecar_path;
use twc::{GridFunction, WongCoeffMatrix};

use crate::config::RunConfig;

fn stamp(cfg: &RunConfig) -> anyhow::Result<(Value, Value)> {
    Ok((
        json!({ "name": "twc", "version": twc::VERSION }),
        serde_json::to_value(cfg)?,
    ))
}

/// Adds `tool` and `config` to a JSON object.
pub fn stamped(doc: Value, cfg: &RunConfig) -> anyhow::Result<Value> {
    let mut map = match doc {
        Value::Object(m) => m,
        other => {
            let mut m = Map::new();
            m.insert("result".into(), other);
            m
        }
    };
    let (tool, config) = stamp(cfg)?;
    map.insert("tool".into(), tool);
    map.insert("config".into(), config);
    Ok(Value::Object(map))
}

/// Writes a stamped JSON document to `path`, or stdout when `None`.
pub fn write_json(path: Option<&Path>, doc: Value, cfg: &RunConfig) -> anyhow::Result<()> {
    let text = serde_json::to_string_pretty(&stamped(doc, cfg)?)? + "\n";
    match path {
        Some(p) => std::fs::write(p, text).with_context(|| format!("writing {}", p.display()))?,
        None => std::io::stdout().write_all(text.as_bytes())?,
    }
    Ok(())
}

pub fn read_json(path: &Path) -> anyhow::Result<Value> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))
}

pub fn read_matrix(path: &Path) -> anyhow::Result<WongCoeffMatrix> {
    WongCoeffMatrix::from_json(&read_json(path)?).with_context(|| format!("decoding {}", path.display()))
}

pub fn is_json(path: &Path) -> bool {
    path.extension().is_some_and(|e| e.eq_ignore_ascii_case("json"))
}

pub fn read_grid(path: &Path) -> anyhow::Result<GridFunction> {
    GridFunction::load(path).with_context(|| format!("reading {}", path.display()))
}

/// Binary samples plus a JSON sidecar holding the grid header and the stamp.
pub fn write_grid(path: &Path, g: &GridFunction, cfg: &RunConfig) -> anyhow::Result<()> {
    g.save(path).with_context(|| format!("writing {}", path.display()))?;
    let header = stamped(serde_json::to_value(g.spec())?, cfg)?;
    std::fs::write(sidecar_path(path), serde_json::to_string_pretty(&header)? + "\n")?;
    Ok(())
}

/// 17 significant digits, enough to round-trip any double.
pub fn fmt_f64(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        x.to_string()
    }
}

pub fn fmt_opt(x: Option<f64>) -> String {
    x.map(fmt_f64).unwrap_or_default()
}

/// CSV with two `#` comment lines (tool version, run config) above the header.
pub fn write_csv(path: &Path, header: &[&str], rows: &[Vec<String>], cfg: &RunConfig) -> anyhow::Result<()> {
    let mut file = BufWriter::new(File::create(path).with_context(|| format!("writing {}", path.display()))?);
    let (_, config) = stamp(cfg)?;
    writeln!(file, "# twc {}", twc::VERSION)?;
    writeln!(file, "# config {}", serde_json::to_string(&config)?)?;
    let mut w = csv::Writer::from_writer(file);
    w.write_record(header)?;
    for row in rows {
        w.write_record(row)?;
    }
    w.flush()?;
    Ok(())
}
