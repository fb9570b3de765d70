//! Plain-text mesh files.
//!
//! ```text
//! nv nc
//! x y        (nv lines)
//! i j k      (nc lines, 0-based, counterclockwise)
//! ```
//! Coordinates are written with 17 significant digits so a write/read cycle
//! reproduces every `f64` exactly.

use std::fs;
use std::io::{self, Write};
use std::path::Path;

use super::TriMesh;
use crate::format::{fmt_float, FileError};
use crate::scalar::Scalar;

pub fn write_mesh<T: Scalar, W: Write>(mesh: &TriMesh<T>, mut out: W) -> io::Result<()> {
    writeln!(out, "{} {}", mesh.n_vertices(), mesh.n_cells())?;
    for p in mesh.vertices() {
        writeln!(
            out,
            "{} {}",
            fmt_float(p[0].to_f64_lossy()),
            fmt_float(p[1].to_f64_lossy())
        )?;
    }
    for c in mesh.cells() {
        writeln!(out, "{} {} {}", c[0], c[1], c[2])?;
    }
    Ok(())
}

pub fn save_mesh<T: Scalar>(mesh: &TriMesh<T>, path: &Path) -> Result<(), FileError> {
    let mut buf = Vec::new();
    write_mesh(mesh, &mut buf).expect("write to Vec");
    fs::write(path, buf).map_err(|e| FileError::io(path, e))
}

/// Parses mesh text; `path` is only used to label errors.
pub fn parse_mesh<T: Scalar>(text: &str, path: &Path) -> Result<TriMesh<T>, FileError> {
    let mut lines = text
        .lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty());
    let (hl, header) = lines
        .next()
        .ok_or_else(|| FileError::parse(path, 1, "empty mesh file"))?;
    let counts = parse_tokens::<usize>(header, hl + 1, 2, path)?;
    let (nv, nc) = (counts[0], counts[1]);

    let mut vertices = Vec::with_capacity(nv);
    for k in 0..nv {
        let (ln, l) = lines.next().ok_or_else(|| {
            FileError::parse(path, hl + 2 + k, format!("expected {nv} vertex lines"))
        })?;
        let xy = parse_tokens::<f64>(l, ln + 1, 2, path)?;
        vertices.push([T::lit(xy[0]), T::lit(xy[1])]);
    }
    let mut cells = Vec::with_capacity(nc);
    for k in 0..nc {
        let (ln, l) = lines.next().ok_or_else(|| {
            FileError::parse(path, hl + 2 + nv + k, format!("expected {nc} cell lines"))
        })?;
        let ijk = parse_tokens::<usize>(l, ln + 1, 3, path)?;
        cells.push([ijk[0], ijk[1], ijk[2]]);
    }
    if let Some((ln, _)) = lines.next() {
        return Err(FileError::parse(
            path,
            ln + 1,
            "trailing content after cell list",
        ));
    }
    TriMesh::build_connectivity(vertices, cells).map_err(|source| FileError::Mesh {
        path: path.into(),
        source,
    })
}

pub fn load_mesh<T: Scalar>(path: &Path) -> Result<TriMesh<T>, FileError> {
    let text = fs::read_to_string(path).map_err(|e| FileError::io(path, e))?;
    parse_mesh(&text, path)
}

fn parse_tokens<N: std::str::FromStr>(
    line: &str,
    lineno: usize,
    want: usize,
    path: &Path,
) -> Result<Vec<N>, FileError>
where
    N::Err: std::fmt::Display,
{
    let toks: Vec<&str> = line.split_whitespace().collect();
    if toks.len() != want {
        return Err(FileError::parse(
            path,
            lineno,
            format!("expected {want} fields, found {}", toks.len()),
        ));
    }
    toks.iter()
        .map(|t| {
            t.parse::<N>()
                .map_err(|e| FileError::parse(path, lineno, format!("bad number {t:?}: {e}")))
        })
        .collect()
}
