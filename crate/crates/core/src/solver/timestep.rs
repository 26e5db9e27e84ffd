use crate::error::{Error, Result};
use crate::grid::Grid;
use crate::pressure::{sound_speed, PressureParams};

use super::{Mode, State, StepConfig};

/// Largest per-cell signal rate `Σ_axis (max |u| + c) / h`; the sound
/// speed `c` enters only in explicit mode.
pub fn max_signal_rate(state: &State, grid: &Grid, mode: Mode, params: &PressureParams) -> Result<f64> {
    if let Some(field) = state.non_finite_field() {
        return Err(Error::NonFinite { field });
    }
    let mut worst: f64 = 0.0;
    for j in 0..grid.ny {
        for i in 0..grid.nx {
            let c = grid.cell(i, j);
            let sound = match mode {
                Mode::Explicit => sound_speed(state.rho[c], state.z[c], params),
                Mode::Imex => 0.0,
            };
            let ux = state.u[grid.uface(i, j)].abs().max(state.u[grid.uface(i + 1, j)].abs());
            let mut rate = (ux + sound) / grid.dx;
            if grid.is_2d() {
                let vy = state.v[grid.vface(i, j)].abs().max(state.v[grid.vface(i, j + 1)].abs());
                rate += (vy + sound) / grid.dy;
            }
            worst = worst.max(rate);
        }
    }
    if !worst.is_finite() {
        return Err(Error::NonFinite { field: "sound speed" });
    }
    Ok(worst)
}

/// CFL step, capped by `dt_cap` (the output interval or the time left to
/// the next output). Returns `dt_cap` when nothing moves.
pub fn compute_dt(state: &State, cfg: &StepConfig, grid: &Grid, params: &PressureParams, dt_cap: f64) -> Result<f64> {
    let rate = max_signal_rate(state, grid, cfg.mode, params)?;
    if rate == 0.0 {
        return Ok(dt_cap);
    }
    Ok((cfg.cfl / rate).min(dt_cap))
}
