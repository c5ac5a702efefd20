//! File formats: trace CSV, plot data CSV, comparison table, and atomic
//! writes.

use std::fmt::Write as _;
use std::io::Write;
use std::path::Path;

use tempfile::NamedTempFile;

use crate::error::{Error, Result};
use crate::hilbert::Vector;
use crate::schemes::{CompareRow, Residuals, Trace};

/// 17 significant digits, enough to round-trip any f64.
pub fn float(v: f64) -> String {
    format!("{v:.16e}")
}

fn push_floats(line: &mut String, values: impl IntoIterator<Item = f64>) {
    for v in values {
        line.push(',');
        line.push_str(&float(v));
    }
}

fn push_vector(line: &mut String, v: Option<&Vector>, dim: usize) {
    match v {
        Some(v) => push_floats(line, v.as_slice().iter().copied()),
        None => line.push_str(&",".repeat(dim)),
    }
}

fn coordinate_header(prefix: &str, dim: usize) -> impl Iterator<Item = String> + '_ {
    (1..=dim).map(move |i| format!("{prefix}_{i}"))
}

pub fn trace_header(dim: usize) -> Vec<String> {
    let mut cols = vec!["n".to_string()];
    for prefix in ["x", "u", "y"] {
        cols.extend(coordinate_header(prefix, dim));
    }
    cols.extend(["alpha_n", "beta_n", "r_n"].map(String::from));
    cols.extend(Residuals::NAMES.map(String::from));
    cols.push("dist_q".into());
    cols
}

/// One row per record; coordinates are left empty in thin mode.
pub fn trace_csv(trace: &Trace) -> String {
    let mut out = trace_header(trace.dim).join(",");
    out.push('\n');
    for rec in &trace.records {
        let mut line = rec.n.to_string();
        push_vector(&mut line, rec.x.as_ref(), trace.dim);
        push_vector(&mut line, rec.u.as_ref(), trace.dim);
        push_vector(&mut line, rec.y.as_ref(), trace.dim);
        push_floats(&mut line, [rec.alpha, rec.beta, rec.r]);
        push_floats(&mut line, rec.residuals.as_array());
        line.push(',');
        if let Some(d) = rec.dist_q {
            line.push_str(&float(d));
        }
        out.push_str(&line);
        out.push('\n');
    }
    out
}

/// Compact series for external plotting.
pub fn plotdata_csv(trace: &Trace) -> String {
    let mut out = String::from("n,res_x_Su,res_y_x,res_x_u,res_u_Su,dist_q\n");
    for rec in &trace.records {
        let mut line = rec.n.to_string();
        push_floats(&mut line, rec.residuals.as_array());
        line.push(',');
        if let Some(d) = rec.dist_q {
            line.push_str(&float(d));
        }
        let _ = writeln!(out, "{line}");
    }
    out
}

fn quote(field: &str) -> String {
    if field.contains([',', '"', '\n']) {
        format!("\"{}\"", field.replace('"', "\"\""))
    } else {
        field.to_string()
    }
}

pub fn compare_csv(rows: &[CompareRow], dim: usize) -> String {
    let mut header = vec!["scheme", "status", "iterations"]
        .into_iter()
        .map(String::from)
        .collect::<Vec<_>>();
    header.extend(Residuals::NAMES.map(String::from));
    header.push("final_distance".into());
    header.extend(coordinate_header("x", dim));
    header.push("error".into());
    let mut out = header.join(",");
    out.push('\n');
    for row in rows {
        let status = row.status.map_or_else(|| "Error".to_string(), |s| format!("{s:?}"));
        let mut line = format!("{},{},{}", row.scheme.name(), status, row.iterations);
        match &row.final_residuals {
            Some(res) => push_floats(&mut line, res.as_array()),
            None => line.push_str(",,,,"),
        }
        line.push(',');
        if let Some(d) = row.final_distance {
            line.push_str(&float(d));
        }
        push_vector(&mut line, row.final_point.as_ref(), dim);
        line.push(',');
        if let Some(err) = &row.error {
            line.push_str(&quote(err));
        }
        out.push_str(&line);
        out.push('\n');
    }
    out
}

pub fn to_json<T: serde::Serialize>(value: &T) -> String {
    let mut text = serde_json::to_string_pretty(value).expect("in-memory values serialize");
    text.push('\n');
    text
}

/// Writes through a temporary file in the same directory, then renames.
pub fn write_atomic(path: &Path, contents: &str) -> Result<()> {
    let io = |e: std::io::Error| Error::InvalidParameter(format!("cannot write {}: {e}", path.display()));
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
    std::fs::create_dir_all(dir).map_err(io)?;
    let mut tmp = NamedTempFile::new_in(dir).map_err(io)?;
    tmp.write_all(contents.as_bytes()).map_err(io)?;
    tmp.persist(path).map_err(|e| io(e.error))?;
    Ok(())
}
