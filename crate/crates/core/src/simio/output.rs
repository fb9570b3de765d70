//! Snapshot and diagnostics CSV writers.
//!
//! Snapshot files start with a `# t = ...` metadata line followed by the
//! header `cell_id,x,y,area,c,v` and one row per cell in mesh order. All
//! floats use 17 significant digits.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use crate::diagnostics::{DiagnosticsRecord, CSV_HEADER};
use crate::format::{fmt_float, FileError};
use crate::state::SimState;
use crate::TriMesh;

pub const SNAPSHOT_HEADER: &str = "cell_id,x,y,area,c,v";

pub fn format_snapshot(mesh: &TriMesh, state: &SimState<f64>) -> String {
    let mut s = String::with_capacity(mesh.n_cells() * 120);
    let _ = writeln!(s, "# t = {}", fmt_float(state.t));
    let _ = writeln!(s, "{SNAPSHOT_HEADER}");
    for i in 0..mesh.n_cells() {
        let p = mesh.centroid(i);
        let _ = writeln!(
            s,
            "{i},{},{},{},{},{}",
            fmt_float(p[0]),
            fmt_float(p[1]),
            fmt_float(mesh.cell_area(i)),
            fmt_float(state.c[i]),
            fmt_float(state.v[i])
        );
    }
    s
}

pub fn write_snapshot(mesh: &TriMesh, state: &SimState<f64>, path: &Path) -> Result<(), FileError> {
    fs::write(path, format_snapshot(mesh, state)).map_err(|e| FileError::io(path, e))
}

/// File name for the `index`-th snapshot, carrying the actual time reached.
pub fn snapshot_file_name(index: usize, t: f64) -> String {
    format!("snapshot_{index:02}_t{t:.6}.csv")
}

/// Reads back `(t, c, v)` from a snapshot file.
pub fn read_snapshot(path: &Path) -> Result<(f64, Vec<f64>, Vec<f64>), FileError> {
    let text = fs::read_to_string(path).map_err(|e| FileError::io(path, e))?;
    let mut lines = text.lines().enumerate();
    let t = match lines.next() {
        Some((_, l)) if l.starts_with("# t = ") => l["# t = ".len()..]
            .trim()
            .parse::<f64>()
            .map_err(|e| FileError::parse(path, 1, format!("bad time: {e}")))?,
        _ => return Err(FileError::parse(path, 1, "missing '# t = ' metadata line")),
    };
    match lines.next() {
        Some((_, l)) if l == SNAPSHOT_HEADER => {}
        _ => return Err(FileError::parse(path, 2, "unexpected header")),
    }
    let (mut c, mut v) = (Vec::new(), Vec::new());
    for (i, l) in lines {
        let cols: Vec<&str> = l.split(',').collect();
        if cols.len() != 6 {
            return Err(FileError::parse(path, i + 1, "expected 6 columns"));
        }
        let num = |k: usize| {
            cols[k]
                .parse::<f64>()
                .map_err(|e| FileError::parse(path, i + 1, e.to_string()))
        };
        c.push(num(4)?);
        v.push(num(5)?);
    }
    Ok((t, c, v))
}

pub fn format_diagnostics_row(r: &DiagnosticsRecord<f64>) -> String {
    r.values()
        .iter()
        .enumerate()
        .map(|(k, &x)| {
            if k == 9 {
                format!("{}", r.zero_set_violations)
            } else {
                fmt_float(x)
            }
        })
        .collect::<Vec<_>>()
        .join(",")
}

pub fn format_diagnostics<'a>(
    records: impl IntoIterator<Item = &'a DiagnosticsRecord<f64>>,
) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "{CSV_HEADER}");
    for r in records {
        let _ = writeln!(s, "{}", format_diagnostics_row(r));
    }
    s
}

pub fn write_text(path: &Path, text: &str) -> Result<(), FileError> {
    if let Some(dir) = path.parent() {
        if !dir.as_os_str().is_empty() {
            fs::create_dir_all(dir).map_err(|e| FileError::io(dir, e))?;
        }
    }
    fs::write(path, text).map_err(|e| FileError::io(path, e))
}

pub fn ensure_dir(dir: &Path) -> Result<PathBuf, FileError> {
    fs::create_dir_all(dir).map_err(|e| FileError::io(dir, e))?;
    Ok(dir.to_path_buf())
}
