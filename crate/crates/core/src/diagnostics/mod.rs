//! Certified quantities monitored along a run.

pub mod complementarity;
pub mod constraints;
pub mod energy;
pub mod ledger;
pub mod recovery;
pub mod renormalized;

pub use complementarity::{complementarity_scan, plateau, window_weights, ComplementarityScan, DEFAULT_THETA};
pub use constraints::{constraint_monitor, ConstraintReport};
pub use energy::{energy_integrands, stress_pairing, EnergyBudget, EnergyIntegrands, EnergyReport};
pub use ledger::{compensated_total, CompensatedSum, LedgerEntry, MassLedger};
pub use recovery::{recovery_check, RECOVERY_Z_FLOOR};
pub use renormalized::{RenormalizedResidual, Window};

use crate::error::Result;
use crate::scenario::Problem;
use crate::solver::{State, StepInfo};

/// One row of `diagnostics.csv`.
#[derive(Debug, Clone, PartialEq)]
pub struct DiagnosticsRecord {
    pub time: f64,
    pub steps: usize,
    /// Smallest and largest accepted step since the previous row.
    pub dt_min: f64,
    pub dt_max: f64,
    pub newton_iterations: usize,
    pub halvings: usize,
    pub cg_iterations: usize,
    pub energy: EnergyReport,
    pub rho: LedgerEntry,
    pub z: LedgerEntry,
    pub constraints: ConstraintReport,
    pub scan: ComplementarityScan,
    pub pi_one_minus_z_time: f64,
    pub congested_divu_l2_time: f64,
    pub pi_mass: f64,
    pub pi_z_mass: f64,
    pub recovery_max: f64,
    pub recovery_l1: f64,
    pub renormalized_residual: f64,
}

/// Column names of `diagnostics.csv`, in order.
pub const DIAGNOSTICS_COLUMNS: [&str; 41] = [
    "time",
    "steps",
    "dt_min",
    "dt_max",
    "newton_iterations",
    "halvings",
    "cg_iterations",
    "kinetic",
    "potential",
    "dissipation",
    "pressure_work",
    "convective_work",
    "viscous_cross",
    "boundary_H_flux",
    "forcing_work",
    "energy_residual",
    "rho_total",
    "rho_inflow",
    "rho_outflow",
    "rho_defect",
    "rho_closure",
    "Z_total",
    "Z_inflow",
    "Z_outflow",
    "Z_defect",
    "Z_closure",
    "max_Z",
    "min_rho",
    "min_rhostar_minus_rho",
    "comparison_defect",
    "inward_outflow_events",
    "pi_one_minus_Z",
    "pi_one_minus_Z_time",
    "congested_fraction",
    "congested_divu_l2",
    "congested_divu_l2_time",
    "pi_mass",
    "pi_Z_mass",
    "recovery_max",
    "recovery_l1",
    "renormalized_residual",
];

/// Full-precision float formatting shared by every CSV writer.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

impl DiagnosticsRecord {
    /// Cells of the row, aligned with [`DIAGNOSTICS_COLUMNS`].
    pub fn cells(&self) -> Vec<String> {
        let f = fmt_f64;
        let e = &self.energy;
        let c = &self.constraints;
        let s = &self.scan;
        vec![
            f(self.time),
            self.steps.to_string(),
            f(self.dt_min),
            f(self.dt_max),
            self.newton_iterations.to_string(),
            self.halvings.to_string(),
            self.cg_iterations.to_string(),
            f(e.kinetic),
            f(e.potential),
            f(e.dissipation),
            f(e.pressure_work),
            f(e.convective_work),
            f(e.viscous_cross),
            f(e.boundary_h_flux),
            f(e.forcing_work),
            f(e.residual),
            f(self.rho.total),
            f(self.rho.inflow),
            f(self.rho.outflow),
            f(self.rho.defect),
            f(self.rho.closure),
            f(self.z.total),
            f(self.z.inflow),
            f(self.z.outflow),
            f(self.z.defect),
            f(self.z.closure),
            f(c.max_z),
            f(c.min_rho),
            f(c.min_rhostar_minus_rho),
            f(c.comparison_defect),
            c.inward_outflow_events.to_string(),
            f(s.pi_one_minus_z),
            f(self.pi_one_minus_z_time),
            f(s.congested_fraction),
            f(s.congested_divu_l2),
            f(self.congested_divu_l2_time),
            f(self.pi_mass),
            f(self.pi_z_mass),
            f(self.recovery_max),
            f(self.recovery_l1),
            f(self.renormalized_residual),
        ]
    }
}

/// Whole-run scalars, updated after every accepted step.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct RunSummary {
    pub steps: usize,
    pub max_z: f64,
    /// `max_t (residual)₊` of the energy inequality.
    pub energy_residual_positive: f64,
    pub max_rho_closure: f64,
    pub max_z_closure: f64,
    pub max_comparison_defect: f64,
    pub max_recovery: f64,
    pub max_congested_fraction: f64,
    pub pi_one_minus_z_time: f64,
    pub congested_divu_l2_time: f64,
    /// Space-time measure of the congested set.
    pub congested_measure_time: f64,
    pub final_pi_one_minus_z: f64,
    pub final_congested_fraction: f64,
    pub final_congested_divu_l2: f64,
    pub pi_mass: f64,
    pub pi_z_mass: f64,
}

impl RunSummary {
    /// Root-mean-square of `div u` over the space-time congested set.
    pub fn congested_divu_rms(&self) -> f64 {
        if self.congested_measure_time > 0.0 {
            self.congested_divu_l2_time / self.congested_measure_time.sqrt()
        } else {
            0.0
        }
    }
}

/// Accumulates every diagnostic over the accepted steps of one run.
#[derive(Debug, Clone)]
pub struct Monitor {
    energy: EnergyBudget,
    rho: MassLedger,
    z: MassLedger,
    renorm: RenormalizedResidual,
    psi: Vec<f64>,
    theta: f64,
    c_lower: f64,
    c_upper: f64,
    scan: ComplementarityScan,
    pi_one_minus_z_time: f64,
    divu2_time: f64,
    congested_time: f64,
    pi_mass: f64,
    pi_z_mass: f64,
    inward_events: usize,
    steps: usize,
    newton: usize,
    halvings: usize,
    cg: usize,
    dt_range: Option<(f64, f64)>,
    summary: RunSummary,
}

impl Monitor {
    /// `c_lower`, `c_upper` are the proportionality constants of the data.
    pub fn new(problem: &Problem, state: &State, c_lower: f64, c_upper: f64, theta: f64) -> Result<Monitor> {
        let g = &problem.grid;
        let vol = g.cell_volume();
        let psi = window_weights(g);
        let scan = complementarity_scan(g, state, problem.params(), theta, &psi);
        let mut m = Monitor {
            energy: EnergyBudget::new(problem, state),
            rho: MassLedger::new(compensated_total(&state.rho, vol)),
            z: MassLedger::new(compensated_total(&state.z, vol)),
            renorm: RenormalizedResidual::new(g, Window::centered(g))?,
            psi,
            theta,
            c_lower,
            c_upper,
            scan,
            pi_one_minus_z_time: 0.0,
            divu2_time: 0.0,
            congested_time: 0.0,
            pi_mass: 0.0,
            pi_z_mass: 0.0,
            inward_events: 0,
            steps: 0,
            newton: 0,
            halvings: 0,
            cg: 0,
            dt_range: None,
            summary: RunSummary::default(),
        };
        m.refresh_summary(problem, state);
        Ok(m)
    }

    /// Accounts for the accepted step `prev → next`.
    pub fn observe(&mut self, problem: &Problem, prev: &State, next: &State, info: &StepInfo) {
        let g = &problem.grid;
        let dt = info.dt;
        self.energy.advance(problem, next, dt);
        self.rho.advance(&info.rho_flux, dt);
        self.z.advance(&info.z_flux, dt);
        self.renorm.advance(g, prev, next, dt);
        let scan = complementarity_scan(g, next, problem.params(), self.theta, &self.psi);
        let trap = |a: f64, b: f64| 0.5 * dt * (a + b);
        self.pi_one_minus_z_time += trap(self.scan.pi_one_minus_z, scan.pi_one_minus_z);
        self.divu2_time += trap(self.scan.congested_divu_l2.powi(2), scan.congested_divu_l2.powi(2));
        self.congested_time += trap(self.scan.congested_fraction, scan.congested_fraction) * g.measure();
        self.pi_mass += trap(self.scan.pi_window, scan.pi_window);
        self.pi_z_mass += trap(self.scan.pi_z_window, scan.pi_z_window);
        self.scan = scan;
        self.inward_events += info.rho_flux.inward_outflow;
        self.steps += 1;
        self.newton += info.newton_iterations;
        self.halvings += info.halvings;
        self.cg += info.cg_iterations;
        self.dt_range = Some(match self.dt_range {
            None => (dt, dt),
            Some((lo, hi)) => (lo.min(dt), hi.max(dt)),
        });
        self.refresh_summary(problem, next);
    }

    fn refresh_summary(&mut self, problem: &Problem, state: &State) {
        let vol = problem.grid.cell_volume();
        let e = self.energy.report();
        let rho = self.rho.entry(compensated_total(&state.rho, vol));
        let z = self.z.entry(compensated_total(&state.z, vol));
        let c = constraint_monitor(state, self.c_lower, self.c_upper, self.inward_events);
        let (rec, _) = recovery_check(&problem.grid, state);
        let s = &mut self.summary;
        s.steps = self.steps;
        s.max_z = if self.steps == 0 { c.max_z } else { s.max_z.max(c.max_z) };
        s.energy_residual_positive = s.energy_residual_positive.max(e.residual.max(0.0));
        s.max_rho_closure = s.max_rho_closure.max(rho.closure);
        s.max_z_closure = s.max_z_closure.max(z.closure);
        s.max_comparison_defect = s.max_comparison_defect.max(c.comparison_defect);
        s.max_recovery = s.max_recovery.max(rec);
        s.max_congested_fraction = s.max_congested_fraction.max(self.scan.congested_fraction);
        s.pi_one_minus_z_time = self.pi_one_minus_z_time;
        s.congested_divu_l2_time = self.divu2_time.sqrt();
        s.congested_measure_time = self.congested_time;
        s.final_pi_one_minus_z = self.scan.pi_one_minus_z;
        s.final_congested_fraction = self.scan.congested_fraction;
        s.final_congested_divu_l2 = self.scan.congested_divu_l2;
        s.pi_mass = self.pi_mass;
        s.pi_z_mass = self.pi_z_mass;
    }

    /// Builds the row for `state` and restarts the per-row step range.
    pub fn record(&mut self, problem: &Problem, state: &State) -> DiagnosticsRecord {
        let vol = problem.grid.cell_volume();
        let (recovery_max, recovery_l1) = recovery_check(&problem.grid, state);
        let (dt_min, dt_max) = self.dt_range.take().unwrap_or((0.0, 0.0));
        DiagnosticsRecord {
            time: state.t,
            steps: self.steps,
            dt_min,
            dt_max,
            newton_iterations: self.newton,
            halvings: self.halvings,
            cg_iterations: self.cg,
            energy: self.energy.report(),
            rho: self.rho.entry(compensated_total(&state.rho, vol)),
            z: self.z.entry(compensated_total(&state.z, vol)),
            constraints: constraint_monitor(state, self.c_lower, self.c_upper, self.inward_events),
            scan: self.scan,
            pi_one_minus_z_time: self.pi_one_minus_z_time,
            congested_divu_l2_time: self.divu2_time.sqrt(),
            pi_mass: self.pi_mass,
            pi_z_mass: self.pi_z_mass,
            recovery_max,
            recovery_l1,
            renormalized_residual: self.renorm.normalized(),
        }
    }

    pub fn summary(&self) -> RunSummary {
        self.summary
    }
}
