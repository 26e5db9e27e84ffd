//! Executable checks of the data hypotheses.
//!
//! [`validate_problem_data`] never stops at the first problem: every check
//! is evaluated and recorded so the report can be printed as a whole. Only
//! the stiff-limit admissibility check is advisory; all others are
//! mandatory for a run to proceed.

use std::fmt;

use crate::boundary::{build_extension, classify_boundary, net_boundary_flux, verify_supplied_extension};
use crate::error::{Error, Result};
use crate::pressure::{beta_reading, eval_h_eps};
use crate::scenario::ScenarioSpec;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Pass,
    Fail,
    /// An advisory check that did not hold.
    Flag,
}

impl Status {
    pub fn label(self) -> &'static str {
        match self {
            Status::Pass => "pass",
            Status::Fail => "FAIL",
            Status::Flag => "flag",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    /// Hypothesis tag, e.g. `Ass2`.
    pub hypothesis: &'static str,
    pub status: Status,
    pub detail: String,
}

/// Which of the two admissibility alternatives for the stiff limit holds.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Admissibility {
    PositiveFlux,
    Smallness,
    NoGuarantee,
}

impl Admissibility {
    pub fn label(self) -> &'static str {
        match self {
            Admissibility::PositiveFlux => "K > 0",
            Admissibility::Smallness => "smallness",
            Admissibility::NoGuarantee => "no guarantee",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ValidationReport {
    pub checks: Vec<Check>,
    /// Net boundary flux `∫ u_B·n`.
    pub net_flux: f64,
    /// Lower and upper proportionality constants, `c_* ρ ≤ Z ≤ c^* ρ`.
    pub c_lower: f64,
    pub c_upper: f64,
    /// `∫Z₀ + T ∫_{Γin} Z_B |u_B·n|`, compared against `|Ω|`.
    pub smallness_lhs: f64,
    pub domain_measure: f64,
    pub admissibility: Admissibility,
    pub beta_reading: &'static str,
    /// Name of the extension used, and its achieved trace error.
    pub extension: Option<(&'static str, f64)>,
}

impl ValidationReport {
    /// True when every mandatory check passed.
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.status != Status::Fail)
    }

    pub fn first_failure(&self) -> Option<&Check> {
        self.checks.iter().find(|c| c.status == Status::Fail)
    }

    /// Converts the first failure into a [`Error::Hypothesis`].
    pub fn into_result(self) -> Result<ValidationReport> {
        match self.first_failure() {
            Some(c) => Err(Error::Hypothesis {
                hypothesis: c.hypothesis.to_string(),
                detail: c.detail.clone(),
            }),
            None => Ok(self),
        }
    }

    pub fn no_guarantee(&self) -> bool {
        self.admissibility == Admissibility::NoGuarantee
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.checks {
            writeln!(f, "[{}] {:<10} {}", c.status.label(), c.hypothesis, c.detail)?;
        }
        writeln!(f, "net boundary flux K = {:.6e}", self.net_flux)?;
        writeln!(f, "proportionality constants c_* = {:.6e}, c^* = {:.6e}", self.c_lower, self.c_upper)?;
        writeln!(
            f,
            "smallness: int Z0 + T int_in Z_B |u_B.n| = {:.6e} vs |Omega| = {:.6e}",
            self.smallness_lhs, self.domain_measure
        )?;
        writeln!(f, "beta bound enforced: {}", self.beta_reading)?;
        if let Some((name, err)) = self.extension {
            writeln!(f, "extension: {name} (trace error {err:.3e})")?;
        }
        match self.admissibility {
            Admissibility::NoGuarantee => write!(f, "stiff limit: no guarantee (outside theorem hypotheses)"),
            a => write!(f, "stiff limit: admissible ({})", a.label()),
        }
    }
}

/// Evaluates every data hypothesis of `spec` over its horizon.
pub fn validate_problem_data(spec: &ScenarioSpec) -> ValidationReport {
    let mut checks = Vec::new();
    let mut push = |hypothesis: &'static str, ok: bool, detail: String| {
        checks.push(Check {
            hypothesis,
            status: if ok { Status::Pass } else { Status::Fail },
            detail,
        })
    };
    let dim = spec.grid.dim;
    let (reading, _) = beta_reading(dim);
    let mut report = ValidationReport {
        checks: Vec::new(),
        net_flux: f64::NAN,
        c_lower: f64::NAN,
        c_upper: f64::NAN,
        smallness_lhs: f64::NAN,
        domain_measure: f64::NAN,
        admissibility: Admissibility::NoGuarantee,
        beta_reading: reading,
        extension: None,
    };

    match spec.pressure.validate(dim) {
        Ok(()) => push("params", true, "pressure parameters admissible".into()),
        Err(e) => push("params", false, e.to_string()),
    }
    match spec.solver.validate() {
        Ok(()) => push("params", true, "step configuration admissible".into()),
        Err(e) => push("params", false, e.to_string()),
    }
    let horizon_ok = spec.time.horizon > 0.0 && spec.time.horizon.is_finite();
    push("params", horizon_ok, format!("horizon T = {}", spec.time.horizon));
    if let Some(dt) = spec.time.dt_override {
        push("params", dt > 0.0 && dt.is_finite(), format!("dt override = {dt}"));
    }
    push(
        "As1",
        !spec.forcing.time_dependent,
        if spec.forcing.time_dependent {
            "time-dependent forcing w(t, x) is not supported; w must depend on x only".into()
        } else {
            "forcing w = w(x)".into()
        },
    );

    let grid = match spec.grid.build() {
        Ok(g) => g,
        Err(e) => {
            push("grid", false, e.to_string());
            report.checks = checks;
            return report;
        }
    };
    let bd = spec.boundary_data(&grid);
    if let Some(c) = bd.w.iter().position(|w| !(w[0].is_finite() && w[1].is_finite())) {
        push("As1", false, format!("forcing is not finite at cell {c}"));
    }
    let part = classify_boundary(&grid, &bd.u_b);
    let k = net_boundary_flux(&grid, &bd.u_b);
    report.net_flux = k;
    push(
        "Ass1",
        k >= 0.0,
        if k >= 0.0 {
            format!("net boundary flux K = {k:.6e} >= 0")
        } else {
            format!("negative net boundary flux K = {k:.6e}")
        },
    );

    let rho0 = spec.sample_cells(&grid, &spec.initial.rho);
    let rs0 = spec.sample_cells(&grid, &spec.initial.rhostar);
    let vol = grid.cell_volume();
    let mut gap = f64::INFINITY;
    let mut gap_cell = 0;
    let mut min_rho = f64::INFINITY;
    let mut rho_cell = 0;
    for c in 0..grid.n_cells() {
        if rs0[c] - rho0[c] < gap {
            gap = rs0[c] - rho0[c];
            gap_cell = c;
        }
        if rho0[c] < min_rho {
            min_rho = rho0[c];
            rho_cell = c;
        }
    }
    let at = |c: usize| {
        let [x, y] = grid.cell_center(c);
        if grid.is_2d() {
            format!("cell {c} (x = {x:.4}, y = {y:.4})")
        } else {
            format!("cell {c} (x = {x:.4})")
        }
    };
    if !(min_rho > 0.0) {
        push("Ass2", false, format!("initial density {min_rho} is not positive at {}", at(rho_cell)));
    } else if !(gap > 0.0) {
        push("Ass2", false, format!("zero initial congestion gap: rhostar_0 - rho_0 = {gap} at {}", at(gap_cell)));
    } else {
        push("Ass2", true, format!("0 < rho_0 < rhostar_0, min gap {gap:.6e}"));
    }

    let mut b_gap = f64::INFINITY;
    let mut b_face = None;
    let mut b_min_rho = f64::INFINITY;
    for &kf in &part.inflow {
        b_min_rho = b_min_rho.min(bd.rho_b[kf]);
        if bd.rhostar_b[kf] - bd.rho_b[kf] < b_gap {
            b_gap = bd.rhostar_b[kf] - bd.rho_b[kf];
            b_face = Some(kf);
        }
    }
    match b_face {
        None => push("Ass3", true, "no inflow faces".into()),
        Some(kf) => {
            let f = &part.faces[kf];
            let place = format!("{} face {}", f.side.name(), f.along);
            if !(b_min_rho > 0.0) {
                push("Ass3", false, format!("inflow density trace is not positive (min {b_min_rho}) on {place}"));
            } else if !(b_gap > 0.0) {
                push("Ass3", false, format!("zero boundary congestion gap rhostar_B - rho_B = {b_gap} on {place}"));
            } else {
                push("Ass3", true, format!("0 < rho_B < rhostar_B on inflow, min gap {b_gap:.6e}"));
            }
        }
    }

    let z0: Vec<f64> = rho0.iter().zip(&rs0).map(|(r, s)| r / s).collect();
    let max_z0 = z0.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let energy: Option<f64> = z0.iter().map(|&z| eval_h_eps(z, &spec.pressure).ok()).sum::<Option<f64>>().map(|h| h * vol);
    match energy {
        Some(e) if e.is_finite() && max_z0 < 1.0 => {
            push("energy", true, format!("int H_eps(Z_0) = {e:.6e} finite, max Z_0 = {max_z0:.6}"))
        }
        _ => push("energy", false, format!("initial potential energy is infinite (max Z_0 = {max_z0})")),
    }

    // c_* and c^* bound Z/ρ = 1/ρ* over the initial and inflow data.
    let mut c_lo = f64::INFINITY;
    let mut c_hi: f64 = 0.0;
    for &s in &rs0 {
        c_lo = c_lo.min(1.0 / s);
        c_hi = c_hi.max(1.0 / s);
    }
    for &kf in &part.inflow {
        c_lo = c_lo.min(1.0 / bd.rhostar_b[kf]);
        c_hi = c_hi.max(1.0 / bd.rhostar_b[kf]);
    }
    report.c_lower = c_lo;
    report.c_upper = c_hi;
    push(
        "data_Z",
        c_lo > 0.0 && c_hi.is_finite(),
        format!("c_* rho_0 <= Z_0 <= c^* rho_0 with c_* = {c_lo:.6e}, c^* = {c_hi:.6e}"),
    );

    let extension = match &spec.boundary.u_inf {
        Some((px, py)) => {
            let (u, v) = spec.sample_faces(&grid, px, py);
            verify_supplied_extension(&grid, &bd.u_b, u, v)
        }
        None => build_extension(&grid, &bd.u_b),
    };
    match extension {
        Ok(ext) => {
            report.extension = Some((ext.source.name(), ext.trace_error));
            push("extension", true, format!("{} extension, trace error {:.3e}", ext.source.name(), ext.trace_error));
        }
        Err(e) if k >= 0.0 => push("extension", false, e.to_string()),
        Err(_) => {}
    }

    let z_b = bd.z_b();
    let inflow_z: f64 = part
        .inflow
        .iter()
        .map(|&kf| part.faces[kf].area * z_b[kf] * part.normal_velocity[kf].abs())
        .sum();
    let lhs = z0.iter().sum::<f64>() * vol + spec.time.horizon * inflow_z;
    report.smallness_lhs = lhs;
    report.domain_measure = grid.measure();
    report.admissibility = if k > 0.0 {
        Admissibility::PositiveFlux
    } else if lhs < grid.measure() {
        Admissibility::Smallness
    } else {
        Admissibility::NoGuarantee
    };
    checks.push(Check {
        hypothesis: "TM3",
        status: if report.admissibility == Admissibility::NoGuarantee {
            Status::Flag
        } else {
            Status::Pass
        },
        detail: match report.admissibility {
            Admissibility::PositiveFlux => format!("K = {k:.6e} > 0"),
            Admissibility::Smallness => format!("smallness holds: {lhs:.6e} < |Omega| = {:.6e}", grid.measure()),
            Admissibility::NoGuarantee => format!(
                "no guarantee: K = {k:.3e} and {lhs:.6e} >= |Omega| = {:.6e}",
                grid.measure()
            ),
        },
    });
    report.checks = checks;
    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scenario::{preset, Profile, PRESET_NAMES};

    #[test]
    fn every_preset_validates() {
        for name in PRESET_NAMES {
            let r = validate_problem_data(&preset(name).unwrap());
            assert!(r.passed(), "{name}:\n{r}");
        }
    }

    #[test]
    fn negative_flux_rejected() {
        let mut spec = preset("corridor-evac").unwrap();
        spec.boundary.sides.get_mut("right").unwrap().ux = 0.0;
        let r = validate_problem_data(&spec);
        let f = r.first_failure().unwrap();
        assert_eq!(f.hypothesis, "Ass1");
        assert!(f.detail.contains("negative net boundary flux"));
    }

    #[test]
    fn zero_gap_rejected() {
        let mut spec = preset("equilibrium").unwrap();
        spec.initial.rho = Profile::Const(1.0);
        let f = validate_problem_data(&spec).into_result().unwrap_err();
        assert!(f.to_string().contains("zero initial congestion gap"), "{f}");
    }

    #[test]
    fn corridor_smallness_depends_on_horizon() {
        let mut spec = preset("corridor-evac").unwrap();
        spec.initial.rhostar = Profile::Const(1.0);
        spec.time.horizon = 0.9;
        let r = validate_problem_data(&spec);
        assert_eq!(r.admissibility, Admissibility::Smallness);
        assert!((r.smallness_lhs - 0.95).abs() < 1e-12);
        spec.time.horizon = 1.0;
        assert_eq!(validate_problem_data(&spec).admissibility, Admissibility::NoGuarantee);
    }

    #[test]
    fn shrinking_horizon_never_breaks_smallness() {
        let mut spec = preset("closed-end").unwrap();
        let mut last = false;
        for t in [40.0, 20.0, 15.0, 10.0, 2.0, 0.5] {
            spec.time.horizon = t;
            let ok = !validate_problem_data(&spec).no_guarantee();
            assert!(ok || !last);
            last = ok;
        }
        assert!(last);
    }

    #[test]
    fn two_gate_has_positive_flux() {
        let r = validate_problem_data(&preset("two-gate-2d").unwrap());
        assert_eq!(r.admissibility, Admissibility::PositiveFlux);
        assert!((r.net_flux - 0.125).abs() < 1e-12, "{}", r.net_flux);
    }

    #[test]
    fn time_dependent_forcing_rejected() {
        let mut spec = preset("equilibrium").unwrap();
        spec.forcing.time_dependent = true;
        assert_eq!(validate_problem_data(&spec).first_failure().unwrap().hypothesis, "As1");
    }
}
