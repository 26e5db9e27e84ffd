//! Scenario description: grid, horizon, pressure law, initial and boundary
//! data, forcing, solver controls, and output options.

mod config;
mod presets;
mod profile;

pub use config::{parse_scenario, serialize_scenario, KNOWN_KEYS};
pub use presets::{preset, PRESET_NAMES};
pub use profile::Profile;

use std::collections::BTreeMap;

use crate::boundary::{self, BoundaryData, BoundaryPartition, ExtensionField};
use crate::error::{Error, Result};
use crate::grid::{Grid, Side};
use crate::pressure::PressureParams;
use crate::solver::StepConfig;

#[derive(Debug, Clone, PartialEq)]
pub struct GridSpec {
    pub dim: usize,
    pub lx: f64,
    pub ly: f64,
    pub nx: usize,
    pub ny: usize,
}

impl GridSpec {
    pub fn build(&self) -> Result<Grid> {
        match self.dim {
            1 => Grid::new_1d(self.lx, self.nx),
            2 => Grid::new_2d(self.lx, self.ly, self.nx, self.ny),
            d => Err(Error::InvalidParams(format!("dimension must be 1 or 2, got {d}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TimeSpec {
    pub horizon: f64,
    /// Forces a fixed step, bypassing the CFL selection.
    pub dt_override: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct InitialSpec {
    pub rho: Profile,
    pub rhostar: Profile,
    pub ux: Profile,
    pub uy: Profile,
}

/// Trace on a sub-interval of a side.
#[derive(Debug, Clone, PartialEq)]
pub struct Gate {
    pub from: f64,
    pub to: f64,
    pub ux: f64,
    pub uy: f64,
    pub rho: f64,
    pub rhostar: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SideTrace {
    pub ux: f64,
    pub uy: f64,
    pub rho: f64,
    pub rhostar: f64,
    pub gate: Option<Gate>,
}

impl Default for SideTrace {
    fn default() -> Self {
        SideTrace {
            ux: 0.0,
            uy: 0.0,
            rho: 0.0,
            rhostar: 1.0,
            gate: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoundarySpec {
    pub sides: BTreeMap<&'static str, SideTrace>,
    /// Optional analytic `u_∞` (x and y components).
    pub u_inf: Option<(Profile, Profile)>,
}

impl BoundarySpec {
    pub fn side(&self, side: Side) -> SideTrace {
        self.sides.get(side.name()).cloned().unwrap_or_default()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ForcingSpec {
    pub wx: Profile,
    pub wy: Profile,
    /// Time-dependent forcing is not supported; `true` is rejected by
    /// validation.
    pub time_dependent: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OutputSpec {
    pub name: String,
    pub interval: f64,
    pub dir: Option<String>,
    pub vtk: bool,
    pub theta: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioSpec {
    pub grid: GridSpec,
    pub time: TimeSpec,
    pub pressure: PressureParams,
    pub initial: InitialSpec,
    pub boundary: BoundarySpec,
    pub forcing: ForcingSpec,
    pub solver: StepConfig,
    pub output: OutputSpec,
}

impl ScenarioSpec {
    /// Same scenario with the cell count per axis replaced (aspect kept in 2D).
    pub fn with_cells(mut self, nx: usize) -> ScenarioSpec {
        if self.grid.dim == 2 {
            let ratio = self.grid.ny as f64 / self.grid.nx as f64;
            self.grid.ny = ((nx as f64 * ratio).round() as usize).max(4);
        }
        self.grid.nx = nx;
        self
    }

    pub fn with_eps_delta(mut self, epsilon: f64, delta: f64) -> ScenarioSpec {
        self.pressure = self.pressure.with_eps_delta(epsilon, delta);
        self
    }

    /// Samples the boundary traces on every boundary face of `grid`.
    pub fn boundary_data(&self, grid: &Grid) -> BoundaryData {
        let faces = grid.boundary_faces();
        let mut u_b = Vec::with_capacity(faces.len());
        let mut rho_b = Vec::with_capacity(faces.len());
        let mut rhostar_b = Vec::with_capacity(faces.len());
        for f in &faces {
            let trace = self.boundary.side(f.side);
            let along = if f.side.is_x() { f.center[1] } else { f.center[0] };
            let (ux, uy, rho, rhostar) = match &trace.gate {
                Some(g) if grid.is_2d() && along >= g.from && along <= g.to => (g.ux, g.uy, g.rho, g.rhostar),
                _ => (trace.ux, trace.uy, trace.rho, trace.rhostar),
            };
            let uy = if grid.is_2d() { uy } else { 0.0 };
            u_b.push([ux, uy]);
            rho_b.push(rho);
            rhostar_b.push(rhostar);
        }
        let w = (0..grid.n_cells())
            .map(|c| {
                let [x, y] = self.point(grid, grid.cell_center(c));
                let wy = if grid.is_2d() { self.forcing.wy.eval(x, y, grid.lx) } else { 0.0 };
                [self.forcing.wx.eval(x, y, grid.lx), wy]
            })
            .collect();
        BoundaryData { u_b, rho_b, rhostar_b, w }
    }

    fn point(&self, grid: &Grid, p: [f64; 2]) -> [f64; 2] {
        if grid.is_2d() {
            p
        } else {
            [p[0], f64::NAN]
        }
    }

    /// Samples a profile at cell centers.
    pub fn sample_cells(&self, grid: &Grid, prof: &Profile) -> Vec<f64> {
        (0..grid.n_cells())
            .map(|c| {
                let [x, y] = self.point(grid, grid.cell_center(c));
                prof.eval(x, y, grid.lx)
            })
            .collect()
    }

    /// Samples x- and y-components at their faces.
    pub fn sample_faces(&self, grid: &Grid, px: &Profile, py: &Profile) -> (Vec<f64>, Vec<f64>) {
        let mut u = vec![0.0; grid.n_u()];
        for j in 0..grid.ny {
            for i in 0..=grid.nx {
                let [x, y] = self.point(grid, grid.uface_center(i, j));
                u[grid.uface(i, j)] = px.eval(x, y, grid.lx);
            }
        }
        let mut v = vec![0.0; grid.n_v()];
        if grid.is_2d() {
            for j in 0..=grid.ny {
                for i in 0..grid.nx {
                    let [x, y] = grid.vface_center(i, j);
                    v[grid.vface(i, j)] = py.eval(x, y, grid.lx);
                }
            }
        }
        (u, v)
    }
}

/// A scenario sampled onto its grid.
#[derive(Debug, Clone)]
pub struct Problem {
    pub spec: ScenarioSpec,
    pub grid: Grid,
    pub boundary: BoundaryData,
    pub partition: BoundaryPartition,
    pub extension: ExtensionField,
    pub rho0: Vec<f64>,
    pub rhostar0: Vec<f64>,
    pub u0: Vec<f64>,
    pub v0: Vec<f64>,
    /// Forcing averaged onto u- and v-faces.
    pub w_u: Vec<f64>,
    pub w_v: Vec<f64>,
}

impl Problem {
    /// Samples every field and builds (or verifies) the extension.
    pub fn new(spec: &ScenarioSpec) -> Result<Problem> {
        let grid = spec.grid.build()?;
        let boundary = spec.boundary_data(&grid);
        let partition = boundary::classify_boundary(&grid, &boundary.u_b);
        let extension = match &spec.boundary.u_inf {
            Some((px, py)) => {
                let (u, v) = spec.sample_faces(&grid, px, py);
                boundary::verify_supplied_extension(&grid, &boundary.u_b, u, v)?
            }
            None => boundary::build_extension(&grid, &boundary.u_b)?,
        };
        let rho0 = spec.sample_cells(&grid, &spec.initial.rho);
        let rhostar0 = spec.sample_cells(&grid, &spec.initial.rhostar);
        let (mut u0, mut v0) = spec.sample_faces(&grid, &spec.initial.ux, &spec.initial.uy);
        for (f, ub) in partition.faces.iter().zip(&boundary.u_b) {
            if f.side.is_x() {
                u0[f.face] = ub[0];
            } else {
                v0[f.face] = ub[1];
            }
        }
        let (w_u, w_v) = face_average_forcing(&grid, &boundary.w);
        Ok(Problem {
            spec: spec.clone(),
            grid,
            boundary,
            partition,
            extension,
            rho0,
            rhostar0,
            u0,
            v0,
            w_u,
            w_v,
        })
    }

    pub fn params(&self) -> &PressureParams {
        &self.spec.pressure
    }

    pub fn config(&self) -> &StepConfig {
        &self.spec.solver
    }

    /// `Z_B = ρ_B / ρ*_B` per boundary face.
    pub fn z_b(&self) -> Vec<f64> {
        self.boundary.z_b()
    }
}

fn face_average_forcing(grid: &Grid, w: &[[f64; 2]]) -> (Vec<f64>, Vec<f64>) {
    let mut wu = vec![0.0; grid.n_u()];
    for j in 0..grid.ny {
        for i in 0..=grid.nx {
            let l = if i > 0 { Some(w[grid.cell(i - 1, j)][0]) } else { None };
            let r = if i < grid.nx { Some(w[grid.cell(i, j)][0]) } else { None };
            wu[grid.uface(i, j)] = match (l, r) {
                (Some(a), Some(b)) => 0.5 * (a + b),
                (Some(a), None) | (None, Some(a)) => a,
                (None, None) => 0.0,
            };
        }
    }
    let mut wv = vec![0.0; grid.n_v()];
    if grid.is_2d() {
        for j in 0..=grid.ny {
            for i in 0..grid.nx {
                let b = if j > 0 { Some(w[grid.cell(i, j - 1)][1]) } else { None };
                let t = if j < grid.ny { Some(w[grid.cell(i, j)][1]) } else { None };
                wv[grid.vface(i, j)] = match (b, t) {
                    (Some(a), Some(c)) => 0.5 * (a + c),
                    (Some(a), None) | (None, Some(a)) => a,
                    (None, None) => 0.0,
                };
            }
        }
    }
    (wu, wv)
}
