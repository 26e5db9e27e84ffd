//! Discrete energy budget relative to the extension `u_∞`.
//!
//! Spatial integrals use the midpoint rule on the staggered grid (cells
//! for scalars, faces for velocities, nodes for shear); time integrals are
//! accumulated with the trapezoid rule over accepted steps.

use crate::boundary::{divergence, WallTangents};
use crate::grid::Grid;
use crate::pressure::{h_delta_unchecked, pi_delta_unchecked, PressureParams};
use crate::scenario::Problem;
use crate::solver::{face_density, State};

/// Instantaneous integrands of every term of the budget.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct EnergyIntegrands {
    pub kinetic: f64,
    pub potential: f64,
    pub dissipation: f64,
    pub pressure_work: f64,
    pub convective: f64,
    pub viscous_cross: f64,
    pub boundary_h: f64,
    pub forcing: f64,
}

/// Energy terms at one instant; the dissipative and work terms are
/// accumulated from 0 to `time`.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct EnergyReport {
    pub kinetic: f64,
    pub potential: f64,
    pub dissipation: f64,
    pub pressure_work: f64,
    pub convective_work: f64,
    pub viscous_cross: f64,
    pub boundary_h_flux: f64,
    pub forcing_work: f64,
    /// Initial kinetic plus potential energy.
    pub initial: f64,
    pub residual: f64,
}

impl EnergyReport {
    pub fn lhs(&self) -> f64 {
        self.kinetic + self.potential + self.dissipation + self.pressure_work
    }

    pub fn rhs(&self) -> f64 {
        self.initial - self.convective_work - self.viscous_cross + self.boundary_h_flux + self.forcing_work
    }
}

/// `∫ S(∇a):∇b` with wall tangential values supplied per argument
/// (`None` means zero on every wall).
pub fn stress_pairing(
    grid: &Grid,
    mu: f64,
    lambda: f64,
    a: (&[f64], &[f64], Option<&WallTangents>),
    b: (&[f64], &[f64], Option<&WallTangents>),
) -> f64 {
    let (nx, ny, dx, dy) = (grid.nx, grid.ny, grid.dx, grid.dy);
    let vol = grid.cell_volume();
    if !grid.is_2d() {
        let mut acc = 0.0;
        for i in 0..nx {
            acc += (a.0[i + 1] - a.0[i]) * (b.0[i + 1] - b.0[i]);
        }
        return (2.0 * mu + lambda) * acc / (dx * dx) * vol;
    }
    let mut cells = 0.0;
    for j in 0..ny {
        for i in 0..nx {
            let d = |f: (&[f64], &[f64], Option<&WallTangents>)| {
                (
                    (f.0[grid.uface(i + 1, j)] - f.0[grid.uface(i, j)]) / dx,
                    (f.1[grid.vface(i, j + 1)] - f.1[grid.vface(i, j)]) / dy,
                )
            };
            let (ax, ay) = d(a);
            let (bx, by) = d(b);
            cells += 2.0 * mu * (ax * bx + ay * by) + lambda * (ax + ay) * (bx + by);
        }
    }
    let shear = |f: (&[f64], &[f64], Option<&WallTangents>), i: usize, j: usize| {
        let wall = |side: fn(&WallTangents) -> &Vec<f64>, k: usize| f.2.map_or(0.0, |t| side(t)[k]);
        let duy = if j == 0 {
            (f.0[grid.uface(i, 0)] - wall(|t| &t.bottom, i)) / (0.5 * dy)
        } else if j == ny {
            (wall(|t| &t.top, i) - f.0[grid.uface(i, ny - 1)]) / (0.5 * dy)
        } else {
            (f.0[grid.uface(i, j)] - f.0[grid.uface(i, j - 1)]) / dy
        };
        let dvx = if i == 0 {
            (f.1[grid.vface(0, j)] - wall(|t| &t.left, j)) / (0.5 * dx)
        } else if i == nx {
            (wall(|t| &t.right, j) - f.1[grid.vface(nx - 1, j)]) / (0.5 * dx)
        } else {
            (f.1[grid.vface(i, j)] - f.1[grid.vface(i - 1, j)]) / dx
        };
        duy + dvx
    };
    let mut nodes = 0.0;
    for j in 0..=ny {
        for i in 0..=nx {
            let wx = if i == 0 || i == nx { 0.5 } else { 1.0 };
            let wy = if j == 0 || j == ny { 0.5 } else { 1.0 };
            nodes += wx * wy * shear(a, i, j) * shear(b, i, j);
        }
    }
    (cells + mu * nodes) * vol
}

/// Control-volume weight of u-face `i` (half at the domain ends).
fn uface_weight(grid: &Grid, i: usize) -> f64 {
    if i == 0 || i == grid.nx {
        0.5
    } else {
        1.0
    }
}

fn vface_weight(grid: &Grid, j: usize) -> f64 {
    if j == 0 || j == grid.ny {
        0.5
    } else {
        1.0
    }
}

/// Evaluates all instantaneous integrands at `state`.
pub fn energy_integrands(problem: &Problem, state: &State) -> EnergyIntegrands {
    let g = &problem.grid;
    let p: &PressureParams = problem.params();
    let cfg = problem.config();
    let ext = &problem.extension;
    let vol = g.cell_volume();
    let (ru, rv) = face_density(g, &state.rho);

    let mut kinetic = 0.0;
    let mut forcing = 0.0;
    let mut convective = 0.0;
    for j in 0..g.ny {
        for i in 0..=g.nx {
            let f = g.uface(i, j);
            let w = state.u[f] - ext.u[f];
            let wt = uface_weight(g, i) * vol;
            kinetic += 0.5 * ru[f] * w * w * wt;
            forcing += ru[f] * (problem.w_u[f] - state.u[f]) * w * wt;
            if i > 0 && i < g.nx {
                let dudx = (ext.u[g.uface(i + 1, j)] - ext.u[g.uface(i - 1, j)]) / (2.0 * g.dx);
                let mut adv = state.u[f] * dudx;
                if g.is_2d() {
                    let jm = j.saturating_sub(1);
                    let jp = (j + 1).min(g.ny - 1);
                    let dudy = if jp > jm {
                        (ext.u[g.uface(i, jp)] - ext.u[g.uface(i, jm)]) / ((jp - jm) as f64 * g.dy)
                    } else {
                        0.0
                    };
                    let vbar = 0.25
                        * (state.v[g.vface(i - 1, j)]
                            + state.v[g.vface(i, j)]
                            + state.v[g.vface(i - 1, j + 1)]
                            + state.v[g.vface(i, j + 1)]);
                    adv += vbar * dudy;
                }
                convective += ru[f] * adv * w * wt;
            }
        }
    }
    if g.is_2d() {
        for j in 0..=g.ny {
            for i in 0..g.nx {
                let f = g.vface(i, j);
                let w = state.v[f] - ext.v[f];
                let wt = vface_weight(g, j) * vol;
                kinetic += 0.5 * rv[f] * w * w * wt;
                forcing += rv[f] * (problem.w_v[f] - state.v[f]) * w * wt;
                if j > 0 && j < g.ny {
                    let dvdy = (ext.v[g.vface(i, j + 1)] - ext.v[g.vface(i, j - 1)]) / (2.0 * g.dy);
                    let im = i.saturating_sub(1);
                    let ip = (i + 1).min(g.nx - 1);
                    let dvdx = if ip > im {
                        (ext.v[g.vface(ip, j)] - ext.v[g.vface(im, j)]) / ((ip - im) as f64 * g.dx)
                    } else {
                        0.0
                    };
                    let ubar = 0.25
                        * (state.u[g.uface(i, j - 1)]
                            + state.u[g.uface(i + 1, j - 1)]
                            + state.u[g.uface(i, j)]
                            + state.u[g.uface(i + 1, j)]);
                    convective += rv[f] * (ubar * dvdx + state.v[f] * dvdy) * w * wt;
                }
            }
        }
    }

    let div_inf = divergence(g, &ext.u, &ext.v);
    let mut potential = 0.0;
    let mut pressure_work = 0.0;
    for (&z, &d) in state.z.iter().zip(&div_inf) {
        potential += h_delta_unchecked(z, p) * vol;
        pressure_work += pi_delta_unchecked(z, p) * d * vol;
    }

    let wu: Vec<f64> = state.u.iter().zip(&ext.u).map(|(a, b)| a - b).collect();
    let wv: Vec<f64> = state.v.iter().zip(&ext.v).map(|(a, b)| a - b).collect();
    let dissipation = stress_pairing(g, cfg.mu, cfg.lambda, (&wu, &wv, None), (&wu, &wv, None));
    let viscous_cross =
        stress_pairing(g, cfg.mu, cfg.lambda, (&ext.u, &ext.v, Some(&ext.tangents)), (&wu, &wv, None));

    let z_b = problem.z_b();
    let boundary_h = problem
        .partition
        .inflow
        .iter()
        .map(|&k| -problem.partition.faces[k].area * h_delta_unchecked(z_b[k], p) * problem.partition.normal_velocity[k])
        .sum();

    EnergyIntegrands {
        kinetic,
        potential,
        dissipation,
        pressure_work,
        convective,
        viscous_cross,
        boundary_h,
        forcing,
    }
}

/// Trapezoid accumulation of the budget over accepted steps.
#[derive(Debug, Clone)]
pub struct EnergyBudget {
    last: EnergyIntegrands,
    report: EnergyReport,
}

impl EnergyBudget {
    pub fn new(problem: &Problem, state: &State) -> EnergyBudget {
        let e = energy_integrands(problem, state);
        let report = EnergyReport {
            kinetic: e.kinetic,
            potential: e.potential,
            initial: e.kinetic + e.potential,
            ..EnergyReport::default()
        };
        EnergyBudget { last: e, report }
    }

    /// Accounts for one step of length `dt` ending in `next`.
    pub fn advance(&mut self, problem: &Problem, next: &State, dt: f64) {
        let e = energy_integrands(problem, next);
        let trap = |a: f64, b: f64| 0.5 * dt * (a + b);
        let r = &mut self.report;
        r.kinetic = e.kinetic;
        r.potential = e.potential;
        r.dissipation += trap(self.last.dissipation, e.dissipation);
        r.pressure_work += trap(self.last.pressure_work, e.pressure_work);
        r.convective_work += trap(self.last.convective, e.convective);
        r.viscous_cross += trap(self.last.viscous_cross, e.viscous_cross);
        r.boundary_h_flux += trap(self.last.boundary_h, e.boundary_h);
        r.forcing_work += trap(self.last.forcing, e.forcing);
        r.residual = r.lhs() - r.rhs();
        self.last = e;
    }

    pub fn report(&self) -> EnergyReport {
        self.report
    }
}
