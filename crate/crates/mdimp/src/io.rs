//! CSV files for datasets and results, written atomically.
//!
//! Dataset columns: `<X>_star` (empty field = NA) and `R_<X>` (0/1) for each partially
//! observed variable, and `<O>` for each fully observed one. Floats are written in Rust's
//! shortest round-trip form, so files are lossless and byte-stable.

use std::io::Write;
use std::path::Path;

use mdimp_core::graph::NodeId;
use mdimp_core::simulate::{Dataset, Provenance, SimulateError, Variable};
use mdimp_core::stats::EstimateTable;
use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum IoError {
    #[error("{path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("{path}: {source}")]
    Csv { path: String, source: csv::Error },
    #[error("{path}, row {row}, column {column}: {message}")]
    Cell {
        path: String,
        row: usize,
        column: String,
        message: String,
    },
    #[error("{path}: {message}")]
    Header { path: String, message: String },
    #[error("{path}: {source}")]
    Dataset { path: String, source: SimulateError },
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> IoError + '_ {
    move |source| IoError::Io {
        path: path.display().to_string(),
        source,
    }
}

/// Writes through a temporary file in the same directory and renames it into place.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), IoError> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    std::fs::create_dir_all(dir).map_err(io_err(path))?;
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(io_err(path))?;
    tmp.write_all(bytes).map_err(io_err(path))?;
    tmp.as_file().sync_all().map_err(io_err(path))?;
    tmp.persist(path).map_err(|e| io_err(path)(e.error))?;
    Ok(())
}

fn csv_bytes(header: &[String], rows: impl Iterator<Item = Vec<String>>) -> Vec<u8> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).expect("in-memory write");
    for row in rows {
        w.write_record(&row).expect("in-memory write");
    }
    w.into_inner().expect("in-memory flush")
}

pub fn dataset_csv(d: &Dataset) -> Vec<u8> {
    let mut header = Vec::new();
    for v in d.variables() {
        if v.indicator.is_some() {
            header.push(format!("{}_star", v.name));
            header.push(format!("R_{}", v.name));
        } else {
            header.push(v.name.to_string());
        }
    }
    let rows = (0..d.n_rows()).map(|row| {
        let mut rec = Vec::with_capacity(header.len());
        for v in d.variables() {
            rec.push(v.proxy[row].map_or(String::new(), |x| x.to_string()));
            if let Some(r) = &v.indicator {
                rec.push(if r[row] { "1" } else { "0" }.to_string());
            }
        }
        rec
    });
    csv_bytes(&header, rows)
}

pub fn write_dataset(path: &Path, d: &Dataset) -> Result<(), IoError> {
    write_atomic(path, &dataset_csv(d))
}

/// Reads a dataset written by [`write_dataset`]; each `<X>_star` column needs a matching `R_<X>`.
pub fn read_dataset(path: &Path) -> Result<Dataset, IoError> {
    let shown = path.display().to_string();
    let csv_err = |source| IoError::Csv {
        path: shown.clone(),
        source,
    };
    let mut reader = csv::Reader::from_path(path).map_err(csv_err)?;
    let header: Vec<String> = reader
        .headers()
        .map_err(csv_err)?
        .iter()
        .map(str::to_string)
        .collect();
    let header_err = |message: String| IoError::Header {
        path: shown.clone(),
        message,
    };

    // (name, value column, indicator column)
    let mut layout: Vec<(String, usize, Option<usize>)> = Vec::new();
    let mut used = vec![false; header.len()];
    for (j, h) in header.iter().enumerate() {
        if let Some(name) = h.strip_suffix("_star") {
            let r = header
                .iter()
                .position(|c| *c == format!("R_{name}"))
                .ok_or_else(|| header_err(format!("`{h}` has no `R_{name}` column")))?;
            used[j] = true;
            used[r] = true;
            layout.push((name.to_string(), j, Some(r)));
        }
    }
    for (j, h) in header.iter().enumerate() {
        if !used[j] {
            layout.push((h.clone(), j, None));
        }
    }
    layout.sort_by_key(|l| l.1);

    let mut proxies: Vec<Vec<Option<f64>>> = vec![Vec::new(); layout.len()];
    let mut indicators: Vec<Vec<bool>> = vec![Vec::new(); layout.len()];
    for (row, rec) in reader.records().enumerate() {
        let rec = rec.map_err(csv_err)?;
        for (k, (_, col, rcol)) in layout.iter().enumerate() {
            let cell = |c: usize| rec.get(c).unwrap_or("").trim();
            let bad = |c: usize, message: String| IoError::Cell {
                path: shown.clone(),
                row: row + 1,
                column: header[c].clone(),
                message,
            };
            let raw = cell(*col);
            let value = if raw.is_empty() {
                None
            } else {
                Some(raw.parse::<f64>().map_err(|e| bad(*col, e.to_string()))?)
            };
            proxies[k].push(value);
            if let Some(rc) = rcol {
                indicators[k].push(match cell(*rc) {
                    "1" => true,
                    "0" => false,
                    other => {
                        return Err(bad(*rc, format!("indicator must be 0 or 1, got `{other}`")))
                    }
                });
            }
        }
    }
    let variables = layout
        .into_iter()
        .zip(proxies.into_iter().zip(indicators))
        .map(|((name, _, rcol), (proxy, ind))| {
            let name = NodeId::new(name).map_err(|_| header_err("empty column name".into()))?;
            Ok(Variable {
                name,
                proxy,
                indicator: rcol.map(|_| ind),
            })
        })
        .collect::<Result<Vec<_>, IoError>>()?;
    Dataset::new(variables).map_err(|source| IoError::Dataset {
        path: shown,
        source,
    })
}

/// Complete columns (truth samples, completed datasets, plug-in draws).
pub fn columns_csv(names: &[NodeId], columns: &[Vec<f64>]) -> Vec<u8> {
    let header: Vec<String> = names.iter().map(|n| n.to_string()).collect();
    let n = columns.first().map_or(0, Vec::len);
    csv_bytes(
        &header,
        (0..n).map(|row| columns.iter().map(|c| c[row].to_string()).collect()),
    )
}

/// Wide table: statistic, truth, then `<method>_estimate` and `<method>_bias` per method.
pub fn table_csv(t: &EstimateTable) -> Vec<u8> {
    let mut header = vec!["statistic".to_string(), "truth".to_string()];
    for m in t.methods() {
        header.push(format!("{}_estimate", m.id()));
        header.push(format!("{}_bias", m.id()));
    }
    let rows = t.statistics().iter().enumerate().map(|(s, stat)| {
        let mut rec = vec![stat.to_string(), t.truth(s).to_string()];
        for m in 0..t.methods().len() {
            let c = t.cell(s, m);
            rec.push(c.estimate.to_string());
            rec.push(c.bias.to_string());
        }
        rec
    });
    csv_bytes(&header, rows)
}

/// Aligned markdown table of biases at two decimals.
pub fn table_markdown(t: &EstimateTable) -> String {
    let mut head = vec!["Statistic".to_string(), "Truth".to_string()];
    head.extend(t.methods().iter().map(|m| m.label().to_string()));
    let body: Vec<Vec<String>> = t
        .statistics()
        .iter()
        .enumerate()
        .map(|(s, stat)| {
            let mut row = vec![stat.to_string(), format!("{:.2}", t.truth(s))];
            row.extend((0..t.methods().len()).map(|m| format!("{:.2}", t.cell(s, m).bias)));
            row
        })
        .collect();
    let width: Vec<usize> = (0..head.len())
        .map(|j| {
            body.iter()
                .map(|r| r[j].chars().count())
                .chain([head[j].chars().count(), 3])
                .max()
                .unwrap_or(3)
        })
        .collect();
    let line = |cells: &[String]| {
        let padded: Vec<String> = cells
            .iter()
            .enumerate()
            .map(|(j, c)| {
                if j == 0 {
                    format!("{c:<w$}", w = width[j])
                } else {
                    format!("{c:>w$}", w = width[j])
                }
            })
            .collect();
        format!("| {} |\n", padded.join(" | "))
    };
    let mut out = line(&head);
    let rule: Vec<String> = width
        .iter()
        .enumerate()
        .map(|(j, w)| {
            if j == 0 {
                format!(":{}", "-".repeat(w - 1))
            } else {
                format!("{}:", "-".repeat(w - 1))
            }
        })
        .collect();
    out.push_str(&format!("| {} |\n", rule.join(" | ")));
    for row in &body {
        out.push_str(&line(row));
    }
    out
}

#[derive(Serialize)]
struct ProvenanceDoc<'a> {
    tool_version: &'a str,
    example: Option<u32>,
    n: usize,
    seed: Option<u64>,
    spec_hash: Option<&'a str>,
}

pub fn provenance_toml(p: &Provenance, example: Option<u32>, n: usize) -> String {
    toml::to_string(&ProvenanceDoc {
        tool_version: env!("CARGO_PKG_VERSION"),
        example,
        n,
        seed: p.seed,
        spec_hash: p.spec_hash.as_deref(),
    })
    .expect("provenance always serializes")
}
