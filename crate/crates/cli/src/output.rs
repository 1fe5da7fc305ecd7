//! CSV, JSON and OBJ writers.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::error::CliError;

/// Decimal with 17 significant digits.
pub fn float(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.16e}")
    } else {
        v.to_string()
    }
}

pub fn csv_row(values: &[f64]) -> String {
    values.iter().map(|v| float(*v)).collect::<Vec<_>>().join(",")
}

pub fn write_text(path: &Path, text: &str) -> Result<(), CliError> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    }
    fs::write(path, text).map_err(|e| CliError::io(path, e))
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), CliError> {
    let mut text = serde_json::to_string_pretty(value).map_err(CliError::numerical)?;
    text.push('\n');
    write_text(path, &text)
}

/// `explicit` if given, otherwise `dir/default_name`.
pub fn target(explicit: Option<&PathBuf>, dir: &Path, default_name: &str) -> PathBuf {
    explicit.cloned().unwrap_or_else(|| dir.join(default_name))
}

/// Wavefront OBJ of a row-major `rows × cols` vertex grid with quad faces.
/// `wrap` closes the grid in both directions.
pub fn obj_grid(vertices: &[[f64; 3]], rows: usize, cols: usize, wrap: bool) -> String {
    let mut out = String::new();
    for v in vertices {
        let _ = writeln!(out, "v {} {} {}", float(v[0]), float(v[1]), float(v[2]));
    }
    let (ri, ci) = if wrap { (rows, cols) } else { (rows - 1, cols - 1) };
    let idx = |i: usize, j: usize| (i % rows) * cols + (j % cols) + 1;
    for i in 0..ri {
        for j in 0..ci {
            let _ = writeln!(
                out,
                "f {} {} {} {}",
                idx(i, j),
                idx(i + 1, j),
                idx(i + 1, j + 1),
                idx(i, j + 1)
            );
        }
    }
    out
}
