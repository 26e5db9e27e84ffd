//! CSV and legacy-VTK writers.
//!
//! Snapshot files are named `snapshot_NNNNN.csv` with one line per cell;
//! `snapshots.csv` maps each index to its time. Velocities in snapshots are
//! face values averaged to cell centers. Every float is written with 17
//! significant digits.

use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use crate::diagnostics::{fmt_f64, DiagnosticsRecord, DIAGNOSTICS_COLUMNS};
use crate::error::{Error, Result};
use crate::grid::Grid;
use crate::pressure::{pi_delta_unchecked, PressureParams};
use crate::solver::State;

pub const SNAPSHOT_COLUMNS_1D: [&str; 6] = ["x", "rho", "Z", "rhostar", "u", "pi"];
pub const SNAPSHOT_COLUMNS_2D: [&str; 8] = ["x", "y", "rho", "Z", "rhostar", "u", "v", "pi"];
pub const SNAPSHOT_INDEX_COLUMNS: [&str; 3] = ["index", "time", "file"];

pub fn snapshot_columns(grid: &Grid) -> &'static [&'static str] {
    if grid.is_2d() {
        &SNAPSHOT_COLUMNS_2D
    } else {
        &SNAPSHOT_COLUMNS_1D
    }
}

pub fn snapshot_name(index: usize) -> String {
    format!("snapshot_{index:05}.csv")
}

/// Cell-centered velocity components.
pub fn cell_velocity(grid: &Grid, state: &State) -> (Vec<f64>, Vec<f64>) {
    let mut uc = vec![0.0; grid.n_cells()];
    let mut vc = vec![0.0; grid.n_cells()];
    for j in 0..grid.ny {
        for i in 0..grid.nx {
            let c = grid.cell(i, j);
            uc[c] = 0.5 * (state.u[grid.uface(i, j)] + state.u[grid.uface(i + 1, j)]);
            if grid.is_2d() {
                vc[c] = 0.5 * (state.v[grid.vface(i, j)] + state.v[grid.vface(i, j + 1)]);
            }
        }
    }
    (uc, vc)
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    File::create(path).map(BufWriter::new).map_err(|e| Error::io(path, e))
}

fn finish(path: &Path, mut w: BufWriter<File>) -> Result<()> {
    w.flush().map_err(|e| Error::io(path, e))
}

/// Writes one field snapshot and returns its path.
pub fn write_snapshot(dir: &Path, index: usize, grid: &Grid, state: &State, params: &PressureParams) -> Result<PathBuf> {
    let path = dir.join(snapshot_name(index));
    let mut w = create(&path)?;
    let (uc, vc) = cell_velocity(grid, state);
    let io = |e| Error::io(&path, e);
    writeln!(w, "{}", snapshot_columns(grid).join(",")).map_err(io)?;
    for c in 0..grid.n_cells() {
        let [x, y] = grid.cell_center(c);
        let pi = pi_delta_unchecked(state.z[c], params);
        let line = if grid.is_2d() {
            [x, y, state.rho[c], state.z[c], state.rhostar[c], uc[c], vc[c], pi].map(fmt_f64).join(",")
        } else {
            [x, state.rho[c], state.z[c], state.rhostar[c], uc[c], pi].map(fmt_f64).join(",")
        };
        writeln!(w, "{line}").map_err(io)?;
    }
    finish(&path, w)?;
    Ok(path)
}

/// Legacy-VTK structured grid with cell data, for 2D runs.
pub fn write_vtk(dir: &Path, index: usize, grid: &Grid, state: &State, params: &PressureParams) -> Result<PathBuf> {
    let path = dir.join(format!("snapshot_{index:05}.vtk"));
    let mut w = create(&path)?;
    let (uc, vc) = cell_velocity(grid, state);
    let io = |e| Error::io(&path, e);
    let (nx, ny) = (grid.nx, grid.ny);
    let mut text = String::new();
    text.push_str("# vtk DataFile Version 3.0\n");
    text.push_str(&format!("congest snapshot {index} t={}\n", fmt_f64(state.t)));
    text.push_str("ASCII\nDATASET STRUCTURED_GRID\n");
    text.push_str(&format!("DIMENSIONS {} {} 1\n", nx + 1, ny + 1));
    text.push_str(&format!("POINTS {} double\n", (nx + 1) * (ny + 1)));
    for j in 0..=ny {
        for i in 0..=nx {
            text.push_str(&format!("{} {} 0\n", fmt_f64(i as f64 * grid.dx), fmt_f64(j as f64 * grid.dy)));
        }
    }
    text.push_str(&format!("CELL_DATA {}\n", grid.n_cells()));
    let pi: Vec<f64> = state.z.iter().map(|&z| pi_delta_unchecked(z, params)).collect();
    for (name, field) in [("rho", &state.rho), ("Z", &state.z), ("rhostar", &state.rhostar), ("pi", &pi)] {
        text.push_str(&format!("SCALARS {name} double 1\nLOOKUP_TABLE default\n"));
        for x in field.iter() {
            text.push_str(&fmt_f64(*x));
            text.push('\n');
        }
    }
    text.push_str("VECTORS velocity double\n");
    for c in 0..grid.n_cells() {
        text.push_str(&format!("{} {} 0\n", fmt_f64(uc[c]), fmt_f64(vc[c])));
    }
    w.write_all(text.as_bytes()).map_err(io)?;
    finish(&path, w)?;
    Ok(path)
}

/// Appends rows to a headered CSV, flushing after every row so a run that
/// aborts leaves a readable file.
pub struct CsvAppender {
    path: PathBuf,
    out: BufWriter<File>,
}

impl CsvAppender {
    pub fn create(path: PathBuf, header: &[&str]) -> Result<CsvAppender> {
        let mut out = create(&path)?;
        writeln!(out, "{}", header.join(",")).map_err(|e| Error::io(&path, e))?;
        Ok(CsvAppender { path, out })
    }

    pub fn row(&mut self, cells: &[String]) -> Result<()> {
        writeln!(self.out, "{}", cells.join(",")).map_err(|e| Error::io(&self.path, e))?;
        self.out.flush().map_err(|e| Error::io(&self.path, e))
    }
}

pub fn diagnostics_writer(dir: &Path) -> Result<CsvAppender> {
    CsvAppender::create(dir.join("diagnostics.csv"), &DIAGNOSTICS_COLUMNS)
}

pub fn write_record(w: &mut CsvAppender, r: &DiagnosticsRecord) -> Result<()> {
    w.row(&r.cells())
}

pub fn write_text(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).map_err(|e| Error::io(path, e))
}

pub fn create_dir(path: &Path) -> Result<()> {
    fs::create_dir_all(path).map_err(|e| Error::io(path, e))
}

/// Exclusive ownership of an output directory, released on drop.
#[derive(Debug)]
pub struct DirLock {
    path: PathBuf,
}

pub const LOCK_FILE: &str = ".congest.lock";

impl DirLock {
    pub fn acquire(dir: &Path) -> Result<DirLock> {
        create_dir(dir)?;
        let path = dir.join(LOCK_FILE);
        fs::OpenOptions::new()
            .write(true)
            .create_new(true)
            .open(&path)
            .map_err(|e| {
                if e.kind() == std::io::ErrorKind::AlreadyExists {
                    Error::io(
                        &path,
                        std::io::Error::new(e.kind(), "output directory is locked by another run"),
                    )
                } else {
                    Error::io(&path, e)
                }
            })?;
        Ok(DirLock { path })
    }
}

impl Drop for DirLock {
    fn drop(&mut self) {
        let _ = fs::remove_file(&self.path);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn snapshot_layout() {
        let dir = tempfile::tempdir().unwrap();
        let g = Grid::new_1d(1.0, 4).unwrap();
        let s = State {
            rho: vec![0.5; 4],
            z: vec![0.25; 4],
            rhostar: vec![2.0; 4],
            u: vec![1.0, 1.0, 3.0, 1.0, 1.0],
            v: vec![],
            t: 0.0,
        };
        let p = write_snapshot(dir.path(), 3, &g, &s, &PressureParams::default()).unwrap();
        assert!(p.ends_with("snapshot_00003.csv"));
        let text = std::fs::read_to_string(p).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "x,rho,Z,rhostar,u,pi");
        assert_eq!(lines.len(), 5);
        let u: f64 = lines[2].split(',').nth(4).unwrap().parse().unwrap();
        assert_eq!(u, 2.0);
    }

    #[test]
    fn lock_is_exclusive_and_released() {
        let dir = tempfile::tempdir().unwrap();
        let a = DirLock::acquire(dir.path()).unwrap();
        assert!(DirLock::acquire(dir.path()).is_err());
        drop(a);
        assert!(DirLock::acquire(dir.path()).is_ok());
    }
}
