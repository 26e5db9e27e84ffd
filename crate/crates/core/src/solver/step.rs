use crate::error::{Error, Result};
use crate::scenario::Problem;

use super::imex::{imex_pressure_solve, ImexProblem};
use super::momentum::{face_density, momentum_step, MomentumInput};
use super::transport::{advect_conservative, advect_nonconservative_rhostar, mass_fluxes, BoundaryFlux};
use super::{compute_dt, eta_diffusion_step, Mode, State};
use crate::pressure::pi_delta_unchecked;

/// A state with `Z` above `1 + Z_OVERSHOOT_TOL` aborts the run.
pub const Z_OVERSHOOT_TOL: f64 = 0.1;
const MAX_HALVINGS: usize = 10;

/// Bookkeeping of one accepted step.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct StepInfo {
    pub dt: f64,
    pub halvings: usize,
    pub newton_iterations: usize,
    pub cg_iterations: usize,
    pub rho_flux: BoundaryFlux,
    pub z_flux: BoundaryFlux,
}

fn retryable(e: &Error) -> bool {
    matches!(e, Error::Newton { .. } | Error::Cfl { .. } | Error::LinearSolve(_))
}

/// Advances `state` by one step no longer than `dt_cap`.
///
/// The step size comes from the CFL rule (or the scenario's fixed
/// override). In IMEX mode a Newton failure or a CFL violation of the
/// updated velocity halves the step, at most ten times; with a fixed step
/// any failure aborts.
pub fn step(state: &State, problem: &Problem, dt_cap: f64) -> Result<(State, StepInfo)> {
    let cfg = problem.config();
    let (mut dt, adaptive) = match problem.spec.time.dt_override {
        Some(fixed) => (fixed.min(dt_cap), false),
        None => (compute_dt(state, cfg, &problem.grid, problem.params(), dt_cap)?, true),
    };
    let mut halvings = 0;
    loop {
        match try_step(state, problem, dt) {
            Ok((next, mut info)) => {
                info.halvings = halvings;
                check_invariants(&next)?;
                return Ok((next, info));
            }
            Err(e) if adaptive && retryable(&e) && halvings < MAX_HALVINGS => {
                halvings += 1;
                dt *= 0.5;
            }
            Err(Error::Newton { residual, .. }) => return Err(Error::Newton { halvings, residual }),
            Err(e) => return Err(e),
        }
    }
}

fn check_invariants(s: &State) -> Result<()> {
    if let Some(field) = s.non_finite_field() {
        return Err(Error::NonFinite { field });
    }
    let max_z = s.max_z();
    if max_z > 1.0 + Z_OVERSHOOT_TOL {
        return Err(Error::Invariant(format!("max Z = {max_z:.6} exceeds 1 + {Z_OVERSHOOT_TOL}")));
    }
    if let Some(c) = s.rho.iter().position(|&r| r < -1e-12) {
        return Err(Error::Invariant(format!("negative density {:.3e} at cell {c}", s.rho[c])));
    }
    if let Some(c) = s.rhostar.iter().position(|&r| !(r > 0.0)) {
        return Err(Error::Invariant(format!("nonpositive rhostar at cell {c}")));
    }
    Ok(())
}

fn try_step(state: &State, problem: &Problem, dt: f64) -> Result<(State, StepInfo)> {
    let g = &problem.grid;
    let part = &problem.partition;
    let cfg = problem.config();
    let params = problem.params();
    let z_b = problem.z_b();
    let bd = &problem.boundary;
    let ext = &problem.extension;
    let rho_fluxes = mass_fluxes(g, &state.rho, &state.u, &state.v, &bd.rho_b, part);
    let mut info = StepInfo { dt, ..StepInfo::default() };

    let momentum_input = |rho_u: &'_ [f64], rho_v: &'_ [f64], pressure: Option<&'_ [f64]>| -> Result<super::MomentumOutput> {
        momentum_step(&MomentumInput {
            grid: g,
            rho_u,
            rho_v,
            fluxes: &rho_fluxes,
            u: &state.u,
            v: &state.v,
            u_inf: &ext.u,
            v_inf: &ext.v,
            tangents: &ext.tangents,
            w_u: &problem.w_u,
            w_v: &problem.w_v,
            mu: cfg.mu,
            lambda: cfg.lambda,
            dt,
            pressure,
        })
    };

    let (u, v, rho, z, rhostar) = match cfg.mode {
        Mode::Imex => {
            let (ru, rv) = face_density(g, &state.rho);
            let pred = momentum_input(&ru, &rv, None)?;
            info.cg_iterations = pred.cg_iterations;
            let solved = imex_pressure_solve(
                &ImexProblem {
                    grid: g,
                    part,
                    z_old: &state.z,
                    z_b: &z_b,
                    u_star: &pred.u,
                    v_star: &pred.v,
                    coeff_u: &pred.coeff_u,
                    coeff_v: &pred.coeff_v,
                    params,
                    dt,
                },
                cfg.newton_tol,
                cfg.newton_max_iters,
            )?;
            info.newton_iterations = solved.iterations;
            let (rho, fr) = advect_conservative(g, &state.rho, &solved.u, &solved.v, &bd.rho_b, part, dt)?;
            let (z, fz) = advect_conservative(g, &state.z, &solved.u, &solved.v, &z_b, part, dt)?;
            let rhostar = advect_nonconservative_rhostar(g, &state.rhostar, &solved.u, &solved.v, &bd.rhostar_b, part, dt)?;
            info.rho_flux = fr;
            info.z_flux = fz;
            (solved.u, solved.v, rho, z, rhostar)
        }
        Mode::Explicit => {
            let (rho, fr) = advect_conservative(g, &state.rho, &state.u, &state.v, &bd.rho_b, part, dt)?;
            let (z, fz) = advect_conservative(g, &state.z, &state.u, &state.v, &z_b, part, dt)?;
            let rhostar = advect_nonconservative_rhostar(g, &state.rhostar, &state.u, &state.v, &bd.rhostar_b, part, dt)?;
            info.rho_flux = fr;
            info.z_flux = fz;
            let pi: Vec<f64> = z.iter().map(|&x| pi_delta_unchecked(x, params)).collect();
            let (ru, rv) = face_density(g, &rho);
            let out = momentum_input(&ru, &rv, Some(&pi))?;
            info.cg_iterations = out.cg_iterations;
            (out.u, out.v, rho, z, rhostar)
        }
    };
    let (rho, z) = if cfg.eta > 0.0 {
        (eta_diffusion_step(g, &rho, cfg.eta, dt)?, eta_diffusion_step(g, &z, cfg.eta, dt)?)
    } else {
        (rho, z)
    };
    Ok((
        State {
            rho,
            z,
            rhostar,
            u,
            v,
            t: state.t + dt,
        },
        info,
    ))
}
