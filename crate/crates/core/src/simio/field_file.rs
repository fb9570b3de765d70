//! Per-cell field files: one float per line in mesh cell order. Lines that
//! are blank or start with `#` are skipped.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::format::{fmt_float, FileError};

pub fn parse_field(text: &str, path: &Path) -> Result<Vec<f64>, FileError> {
    text.lines()
        .enumerate()
        .filter(|(_, l)| {
            let t = l.trim();
            !t.is_empty() && !t.starts_with('#')
        })
        .map(|(i, l)| {
            l.trim().parse::<f64>().map_err(|e| {
                FileError::parse(path, i + 1, format!("bad value {:?}: {e}", l.trim()))
            })
        })
        .collect()
}

pub fn load_field(path: &Path) -> Result<Vec<f64>, FileError> {
    let text = fs::read_to_string(path).map_err(|e| FileError::io(path, e))?;
    parse_field(&text, path)
}

pub fn format_field(values: &[f64]) -> String {
    let mut s = String::with_capacity(values.len() * 24);
    for &x in values {
        let _ = writeln!(s, "{}", fmt_float(x));
    }
    s
}

pub fn save_field(values: &[f64], path: &Path) -> Result<(), FileError> {
    fs::write(path, format_field(values)).map_err(|e| FileError::io(path, e))
}
