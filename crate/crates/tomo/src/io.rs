//! On-disk formats for fields, iteration histories, and run summaries.
//!
//! Fields are CSV with header `x,z,value`, one node per row in index order
//! (x fastest). Traveltime tables use 17-significant-digit scientific
//! notation; everything else uses the shortest decimal form that parses back
//! to the identical bits, so a written field re-read is bitwise equal.

use crate::descent::{IterationRecord, StopReason};
use crate::error::{Error, Result};
use crate::fem::Mesh;
use crate::grid::Grid;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

const FIELD_HEADER: &str = "x,z,value";

fn create(path: &Path) -> Result<BufWriter<std::fs::File>> {
    Ok(BufWriter::new(std::fs::File::create(path).map_err(|e| Error::file(path, e))?))
}

fn open(path: &Path) -> Result<BufReader<std::fs::File>> {
    Ok(BufReader::new(std::fs::File::open(path).map_err(|e| Error::file(path, e))?))
}

fn write_rows(
    path: &Path,
    rows: impl Iterator<Item = ((f64, f64), f64)>,
    scientific: bool,
) -> Result<()> {
    let mut out = create(path)?;
    writeln!(out, "{FIELD_HEADER}")?;
    for ((x, z), v) in rows {
        if scientific {
            writeln!(out, "{x},{z},{v:.16e}")?;
        } else {
            writeln!(out, "{x},{z},{v}")?;
        }
    }
    Ok(out.flush()?)
}

/// Writes a per-node field on the difference grid in scientific notation
/// (used for traveltimes, where fixed-width columns ease diffing).
pub fn write_grid_field(path: &Path, grid: &Grid, values: &[f64]) -> Result<()> {
    assert_eq!(values.len(), grid.nx * grid.nz);
    write_rows(path, (0..values.len()).map(|n| (grid.coords(n), values[n])), true)
}

/// Writes a per-node field on the element mesh in shortest round-trip form.
pub fn write_mesh_field(path: &Path, mesh: &Mesh, values: &[f64]) -> Result<()> {
    assert_eq!(values.len(), mesh.nx * mesh.nz);
    write_rows(path, (0..values.len()).map(|n| (mesh.coords(n), values[n])), false)
}

/// Writes a per-node field on the difference grid in shortest round-trip
/// form (used for slowness iterates).
pub fn write_grid_field_shortest(path: &Path, grid: &Grid, values: &[f64]) -> Result<()> {
    assert_eq!(values.len(), grid.nx * grid.nz);
    write_rows(path, (0..values.len()).map(|n| (grid.coords(n), values[n])), false)
}

/// Writes a generic numeric table under a comma-joined header.
pub fn write_table(
    path: &Path,
    header: &str,
    rows: impl Iterator<Item = Vec<f64>>,
) -> Result<()> {
    let width = header.split(',').count();
    let mut out = create(path)?;
    writeln!(out, "{header}")?;
    for row in rows {
        assert_eq!(row.len(), width, "row width must match the header");
        let cells: Vec<String> = row.iter().map(f64::to_string).collect();
        writeln!(out, "{}", cells.join(","))?;
    }
    Ok(out.flush()?)
}

/// Reads any field written by this module: `((x, z), value)` per row, file order.
pub fn read_field(path: &Path) -> Result<Vec<((f64, f64), f64)>> {
    let reader = open(path)?;
    let mut lines = reader.lines();
    let bad = |line: usize, what: &str| {
        Error::Config(format!("{}:{line}: {what}", path.display()))
    };
    match lines.next().transpose()? {
        Some(h) if h.trim() == FIELD_HEADER => {}
        _ => return Err(bad(1, "expected header `x,z,value`")),
    }
    let mut rows = Vec::new();
    for (k, line) in lines.enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let mut parts = line.split(',');
        let mut field = |name: &str| -> Result<f64> {
            parts
                .next()
                .ok_or_else(|| bad(k + 2, &format!("missing {name} column")))?
                .trim()
                .parse()
                .map_err(|_| bad(k + 2, &format!("{name} is not a number")))
        };
        let x = field("x")?;
        let z = field("z")?;
        let v = field("value")?;
        rows.push(((x, z), v));
    }
    Ok(rows)
}

/// Reads a field and checks its nodes against the mesh before returning the
/// values in node order.
pub fn read_mesh_field(path: &Path, mesh: &Mesh) -> Result<Vec<f64>> {
    let rows = read_field(path)?;
    if rows.len() != mesh.nx * mesh.nz {
        return Err(Error::Incompatible(format!(
            "{}: {} rows but the mesh has {} nodes",
            path.display(),
            rows.len(),
            mesh.nx * mesh.nz
        )));
    }
    for (n, &((x, z), _)) in rows.iter().enumerate() {
        let (mx, mz) = mesh.coords(n);
        if (x - mx).abs() > 1e-9 || (z - mz).abs() > 1e-9 {
            return Err(Error::Incompatible(format!(
                "{}: row {n} is at ({x}, {z}) but the mesh node is at ({mx}, {mz})",
                path.display()
            )));
        }
    }
    Ok(rows.into_iter().map(|(_, v)| v).collect())
}

pub fn write_history(path: &Path, history: &[IterationRecord]) -> Result<()> {
    let mut out = create(path)?;
    writeln!(out, "k,objective,misfit,regularizer,alpha,stationarity")?;
    for r in history {
        writeln!(
            out,
            "{},{},{},{},{},{}",
            r.k, r.objective, r.misfit, r.regularizer, r.alpha, r.stationarity
        )?;
    }
    Ok(out.flush()?)
}

/// A stop reason as recorded in summaries.
pub fn stop_reason_label(stop: StopReason) -> &'static str {
    match stop {
        StopReason::Converged => "converged",
        StopReason::Stall => "stall",
        StopReason::IterationCap => "iteration_cap",
    }
}

pub fn write_json(path: &Path, value: &serde_json::Value) -> Result<()> {
    let mut out = create(path)?;
    serde_json::to_writer_pretty(&mut out, value)?;
    writeln!(out)?;
    Ok(out.flush()?)
}

pub fn read_json(path: &Path) -> Result<serde_json::Value> {
    Ok(serde_json::from_reader(open(path)?)?)
}
