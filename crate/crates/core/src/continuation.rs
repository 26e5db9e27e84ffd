//! ε-continuation toward the hard-congestion limit.
//!
//! Members run in parallel on the same grid and horizon; the report is
//! assembled in plan order, so results do not depend on scheduling.

use std::path::Path;

use rayon::prelude::*;

use crate::diagnostics::{fmt_f64, RunSummary};
use crate::error::{Error, Result};
use crate::grid::Grid;
use crate::io::{self, CsvAppender};
use crate::pressure::{eval_pi_eps, PressureParams};
use crate::run::{run_in_memory, run_to_dir, RunOutcome};
use crate::scenario::ScenarioSpec;
use crate::solver::State;
use crate::validate::{validate_problem_data, Admissibility};

/// How `δ` follows `ε` along a plan.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DeltaRule {
    /// `δ = c · ε`.
    Proportional(f64),
    /// `δ` held fixed.
    Fixed(f64),
}

impl Default for DeltaRule {
    fn default() -> Self {
        DeltaRule::Proportional(1.0)
    }
}

impl DeltaRule {
    pub fn delta(self, epsilon: f64) -> f64 {
        match self {
            DeltaRule::Proportional(c) => c * epsilon,
            DeltaRule::Fixed(d) => d,
        }
    }
}

#[derive(Debug, Clone)]
pub struct ContinuationPlan {
    pub scenario: ScenarioSpec,
    pub epsilons: Vec<f64>,
    pub delta_rule: DeltaRule,
}

impl ContinuationPlan {
    pub fn new(scenario: ScenarioSpec, epsilons: Vec<f64>) -> ContinuationPlan {
        ContinuationPlan {
            scenario,
            epsilons,
            delta_rule: DeltaRule::default(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.epsilons.is_empty() {
            return Err(Error::Plan("no epsilon values".into()));
        }
        if let Some(w) = self.epsilons.windows(2).find(|w| !(w[1] < w[0])) {
            return Err(Error::Plan(format!(
                "epsilons must be strictly decreasing, got {} then {}",
                w[0], w[1]
            )));
        }
        for &eps in &self.epsilons {
            self.member_params(eps)
                .validate(self.scenario.grid.dim)
                .map_err(|e| Error::Plan(format!("epsilon = {eps}: {e}")))?;
        }
        Ok(())
    }

    fn member_params(&self, eps: f64) -> PressureParams {
        self.scenario.pressure.with_eps_delta(eps, self.delta_rule.delta(eps))
    }

    pub fn member_spec(&self, k: usize) -> ScenarioSpec {
        let eps = self.epsilons[k];
        let mut spec = self.scenario.clone();
        spec.pressure = self.member_params(eps);
        spec.output.name = member_dir_name(k, eps);
        spec.output.dir = None;
        spec
    }
}

pub fn member_dir_name(k: usize, eps: f64) -> String {
    format!("member_{k:02}_eps_{eps:e}")
}

/// Per-ε results.
#[derive(Debug, Clone)]
pub struct MemberReport {
    pub epsilon: f64,
    pub delta: f64,
    pub summary: RunSummary,
    /// `max |Zπ_ε − π_ε + εZ^α(1−Z)^{1−β}| / π_ε` over untruncated cells.
    pub identity_defect: f64,
    pub final_state: State,
    pub grid: Grid,
}

/// Differences between consecutive members at the final time.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CauchyRow {
    pub eps_a: f64,
    pub eps_b: f64,
    pub z_l1: f64,
    pub z_linf: f64,
    pub rho_l1: f64,
    pub rho_linf: f64,
    pub u_l1: f64,
    pub u_linf: f64,
}

#[derive(Debug, Clone)]
pub struct LimitReport {
    pub members: Vec<MemberReport>,
    pub cauchy: Vec<CauchyRow>,
    pub admissibility: Admissibility,
}

impl LimitReport {
    pub fn no_guarantee(&self) -> bool {
        self.admissibility == Admissibility::NoGuarantee
    }
}

/// Relative defect of the algebraic identity behind `π₁ = π`, over cells
/// where the untruncated law applies.
pub fn pi_epsilon_identity_check(state: &State, p: &PressureParams) -> f64 {
    let mut worst: f64 = 0.0;
    for &z in &state.z {
        if !(z > 0.0) || z > 1.0 - p.delta {
            continue;
        }
        let Ok(pi) = eval_pi_eps(z, p) else { continue };
        let tail = p.epsilon * z.powf(p.alpha) * (1.0 - z).powf(1.0 - p.beta);
        let d = (z * pi - pi + tail).abs();
        if pi > 0.0 {
            worst = worst.max(d / pi);
        }
    }
    worst
}

fn diffs(a: &[f64], b: &[f64], weight: f64) -> (f64, f64) {
    let mut l1 = 0.0;
    let mut linf: f64 = 0.0;
    for (x, y) in a.iter().zip(b) {
        let d = (x - y).abs();
        l1 += d;
        linf = linf.max(d);
    }
    (l1 * weight, linf)
}

/// L¹ and L∞ differences of the final `Z`, `ρ` and `u` of consecutive
/// members.
pub fn cauchy_table(members: &[MemberReport]) -> Result<Vec<CauchyRow>> {
    if members.len() < 2 {
        return Err(Error::Plan("a Cauchy table needs at least two members".into()));
    }
    let mut rows = Vec::new();
    for w in members.windows(2) {
        let (a, b) = (&w[0], &w[1]);
        if !a.grid.same_shape(&b.grid) {
            return Err(Error::GridMismatch(format!(
                "members eps = {} and eps = {} use different grids",
                a.epsilon, b.epsilon
            )));
        }
        let vol = a.grid.cell_volume();
        let (z_l1, z_linf) = diffs(&a.final_state.z, &b.final_state.z, vol);
        let (rho_l1, rho_linf) = diffs(&a.final_state.rho, &b.final_state.rho, vol);
        let (ux1, uxi) = diffs(&a.final_state.u, &b.final_state.u, vol);
        let (vy1, vyi) = diffs(&a.final_state.v, &b.final_state.v, vol);
        rows.push(CauchyRow {
            eps_a: a.epsilon,
            eps_b: b.epsilon,
            z_l1,
            z_linf,
            rho_l1,
            rho_linf,
            u_l1: ux1 + vy1,
            u_linf: uxi.max(vyi),
        });
    }
    Ok(rows)
}

pub const CONTINUATION_COLUMNS: [&str; 15] = [
    "epsilon",
    "delta",
    "pi_one_minus_Z_final",
    "pi_one_minus_Z_time",
    "congested_fraction_final",
    "congested_fraction_max",
    "congested_divu_l2_final",
    "congested_divu_l2_time",
    "congested_divu_rms",
    "pi_mass",
    "pi_Z_mass",
    "max_Z",
    "identity_defect",
    "steps",
    "admissibility",
];

pub const CAUCHY_COLUMNS: [&str; 8] = ["eps_a", "eps_b", "Z_l1", "Z_linf", "rho_l1", "rho_linf", "u_l1", "u_linf"];

fn member_report(plan: &ContinuationPlan, k: usize, out: RunOutcome) -> MemberReport {
    let eps = plan.epsilons[k];
    let params = *out.problem.params();
    MemberReport {
        epsilon: eps,
        delta: plan.delta_rule.delta(eps),
        summary: out.summary,
        identity_defect: pi_epsilon_identity_check(&out.final_state, &params),
        final_state: out.final_state,
        grid: out.problem.grid,
    }
}

fn write_reports(dir: &Path, members: &[MemberReport], cauchy: &[CauchyRow], adm: Admissibility) -> Result<()> {
    let mut w = CsvAppender::create(dir.join("continuation.csv"), &CONTINUATION_COLUMNS)?;
    for m in members {
        let s = &m.summary;
        let mut cells: Vec<String> = [
            m.epsilon,
            m.delta,
            s.final_pi_one_minus_z,
            s.pi_one_minus_z_time,
            s.final_congested_fraction,
            s.max_congested_fraction,
            s.final_congested_divu_l2,
            s.congested_divu_l2_time,
            s.congested_divu_rms(),
            s.pi_mass,
            s.pi_z_mass,
            s.max_z,
            m.identity_defect,
        ]
        .map(fmt_f64)
        .to_vec();
        cells.push(s.steps.to_string());
        cells.push(adm.label().to_string());
        w.row(&cells)?;
    }
    let mut c = CsvAppender::create(dir.join("cauchy.csv"), &CAUCHY_COLUMNS)?;
    for r in cauchy {
        c.row(&[r.eps_a, r.eps_b, r.z_l1, r.z_linf, r.rho_l1, r.rho_linf, r.u_l1, r.u_linf].map(fmt_f64))?;
    }
    Ok(())
}

/// Runs every member (in parallel) and assembles the report. With
/// `out_dir`, each member writes its own run directory below it and the
/// report files `continuation.csv` and `cauchy.csv` are written there;
/// if a member fails, the completed members are still reported.
pub fn run_continuation(plan: &ContinuationPlan, out_dir: Option<&Path>) -> Result<LimitReport> {
    plan.validate()?;
    let admissibility = validate_problem_data(&plan.scenario).admissibility;
    let _lock = out_dir.map(io::DirLock::acquire).transpose()?;
    let results: Vec<Result<RunOutcome>> = (0..plan.epsilons.len())
        .into_par_iter()
        .map(|k| {
            let spec = plan.member_spec(k);
            match out_dir {
                Some(dir) => run_to_dir(&spec, &dir.join(&spec.output.name)),
                None => run_in_memory(&spec),
            }
        })
        .collect();
    let mut members = Vec::new();
    let mut failure = None;
    for (k, r) in results.into_iter().enumerate() {
        match r {
            Ok(out) => members.push(member_report(plan, k, out)),
            Err(e) => {
                if failure.is_none() {
                    failure = Some(e);
                }
            }
        }
    }
    let cauchy = if members.len() >= 2 { cauchy_table(&members)? } else { Vec::new() };
    if let Some(dir) = out_dir {
        write_reports(dir, &members, &cauchy, admissibility)?;
    }
    if let Some(e) = failure {
        return Err(e);
    }
    Ok(LimitReport {
        members,
        cauchy,
        admissibility,
    })
}
