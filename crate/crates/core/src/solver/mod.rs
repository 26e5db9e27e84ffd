//! Time stepping for `(ρ, Z, ρ*, u)` on the staggered grid.
//!
//! Continuity fields use donor-cell upwind fluxes; `ρ*` is carried by the
//! non-conservative upwind transport; the momentum equation is solved with
//! semi-implicit upwind convection, backward-Euler viscosity and an
//! implicit relaxation term. In [`Mode::Imex`] the pressure gradient and
//! the mass flux of `Z` are coupled and solved by Newton's method on `Z`.

mod diffusion;
mod imex;
mod momentum;
mod step;
mod timestep;
mod transport;

pub use diffusion::eta_diffusion_step;
pub use imex::{imex_pressure_solve, ImexOutcome, ImexProblem};
pub use momentum::{face_density, momentum_step, pressure_gradient, viscous_apply, MomentumInput, MomentumOutput, VACUUM_RHO};
pub use step::{step, StepInfo, Z_OVERSHOOT_TOL};
pub use timestep::{compute_dt, max_signal_rate};
pub use transport::{advect_conservative, advect_nonconservative_rhostar, mass_fluxes, BoundaryFlux, MassFluxes};

use crate::error::{Error, Result};
use crate::scenario::Problem;

/// Pressure treatment.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    /// Pressure gradient from the transported `Z`, with a sound-speed CFL.
    Explicit,
    /// Pressure and mass flux of `Z` solved together; no acoustic CFL.
    Imex,
}

impl Mode {
    pub fn parse(s: &str) -> Option<Mode> {
        match s.trim() {
            "explicit" => Some(Mode::Explicit),
            "imex" => Some(Mode::Imex),
            _ => None,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Mode::Explicit => "explicit",
            Mode::Imex => "imex",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StepConfig {
    pub mode: Mode,
    pub cfl: f64,
    /// Max-norm tolerance on the Newton residual of the `Z` equation.
    pub newton_tol: f64,
    pub newton_max_iters: usize,
    /// Artificial diffusion of the continuity fields.
    pub eta: f64,
    /// Shear viscosity `μ`.
    pub mu: f64,
    /// Bulk coefficient `λ`.
    pub lambda: f64,
}

impl Default for StepConfig {
    fn default() -> Self {
        StepConfig {
            mode: Mode::Imex,
            cfl: 0.4,
            newton_tol: 1e-10,
            newton_max_iters: 50,
            eta: 0.0,
            mu: 0.05,
            lambda: 0.0,
        }
    }
}

impl StepConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidParams(m));
        if !(self.cfl > 0.0 && self.cfl < 1.0) {
            return bad(format!("cfl must lie in (0, 1), got {}", self.cfl));
        }
        if !(self.mu > 0.0) {
            return bad(format!("viscosity must be positive, got {}", self.mu));
        }
        if !(self.lambda >= 0.0) {
            return bad(format!("bulk viscosity must be nonnegative, got {}", self.lambda));
        }
        if !(self.eta >= 0.0) {
            return bad(format!("eta must be nonnegative, got {}", self.eta));
        }
        if !(self.newton_tol > 0.0) || self.newton_max_iters == 0 {
            return bad("Newton tolerance and iteration cap must be positive".into());
        }
        Ok(())
    }
}

/// Cell fields `ρ, Z, ρ*`, face velocities `u` (x-faces) and `v` (y-faces;
/// empty in 1D), and the current time.
#[derive(Debug, Clone, PartialEq)]
pub struct State {
    pub rho: Vec<f64>,
    pub z: Vec<f64>,
    pub rhostar: Vec<f64>,
    pub u: Vec<f64>,
    pub v: Vec<f64>,
    pub t: f64,
}

impl State {
    /// First non-finite field, if any.
    pub fn non_finite_field(&self) -> Option<&'static str> {
        let bad = |x: &[f64]| x.iter().any(|v| !v.is_finite());
        if bad(&self.rho) {
            Some("rho")
        } else if bad(&self.z) {
            Some("Z")
        } else if bad(&self.rhostar) {
            Some("rhostar")
        } else if bad(&self.u) {
            Some("u")
        } else if bad(&self.v) {
            Some("v")
        } else {
            None
        }
    }

    pub fn max_z(&self) -> f64 {
        self.z.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }
}

/// Samples the initial state and sets `Z₀ = ρ₀ / ρ*₀` pointwise.
pub fn init_state(problem: &Problem) -> Result<State> {
    let mut z = Vec::with_capacity(problem.rho0.len());
    for (c, (r, s)) in problem.rho0.iter().zip(&problem.rhostar0).enumerate() {
        if !(*s > 0.0) {
            return Err(Error::hypothesis("Ass2", format!("rhostar_0 = {s} is not positive at cell {c}")));
        }
        let zc = r / s;
        if zc >= 1.0 {
            return Err(Error::hypothesis(
                "Ass2",
                format!("Z_0 = {zc} >= 1 at cell {c}: initial potential energy is infinite"),
            ));
        }
        z.push(zc);
    }
    Ok(State {
        rho: problem.rho0.clone(),
        z,
        rhostar: problem.rhostar0.clone(),
        u: problem.u0.clone(),
        v: problem.v0.clone(),
        t: 0.0,
    })
}
