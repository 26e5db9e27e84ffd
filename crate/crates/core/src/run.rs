//! Run orchestration: validation, time loop with exact output times,
//! diagnostics, and the on-disk artifacts of a run.

use std::path::{Path, PathBuf};

use crate::diagnostics::{DiagnosticsRecord, Monitor, RunSummary};
use crate::error::{Error, Result};
use crate::io::{self, DirLock};
use crate::scenario::{serialize_scenario, Problem, ScenarioSpec};
use crate::solver::{init_state, step, State};
use crate::validate::{validate_problem_data, ValidationReport};

/// Environment variable overriding the root of relative output directories.
pub const OUTPUT_ROOT_ENV: &str = "CONGEST_OUTPUT_ROOT";
const DEFAULT_OUTPUT_ROOT: &str = "output";

/// Output times `k · interval` for `k = 0 ..= floor(T / interval)`.
pub fn output_times(horizon: f64, interval: f64) -> Vec<f64> {
    let n = (horizon / interval * (1.0 + 1e-12)).floor() as usize;
    (0..=n).map(|k| if k == n && (k as f64 * interval - horizon).abs() <= 1e-12 * horizon { horizon } else { k as f64 * interval }).collect()
}

/// Output directory of a scenario: `[output] dir` if set, else its name,
/// resolved against `CONGEST_OUTPUT_ROOT` (default `output`) when relative.
pub fn output_dir(spec: &ScenarioSpec) -> PathBuf {
    let rel = PathBuf::from(spec.output.dir.clone().unwrap_or_else(|| spec.output.name.clone()));
    if rel.is_absolute() {
        return rel;
    }
    let root = std::env::var_os(OUTPUT_ROOT_ENV).map(PathBuf::from).unwrap_or_else(|| PathBuf::from(DEFAULT_OUTPUT_ROOT));
    root.join(rel)
}

/// A validated scenario being advanced in time.
pub struct Simulation {
    pub problem: Problem,
    pub state: State,
    pub report: ValidationReport,
    pub monitor: Monitor,
    times: Vec<f64>,
    next_output: usize,
}

/// What happened at an output time.
pub struct OutputEvent<'a> {
    pub index: usize,
    pub problem: &'a Problem,
    pub state: &'a State,
    pub record: &'a DiagnosticsRecord,
}

impl Simulation {
    /// Validates `spec`; any mandatory failure is returned as a
    /// [`Error::Hypothesis`] or parameter error.
    pub fn new(spec: &ScenarioSpec) -> Result<Simulation> {
        let report = validate_problem_data(spec).into_result()?;
        let problem = Problem::new(spec)?;
        let state = init_state(&problem)?;
        let monitor = Monitor::new(&problem, &state, report.c_lower, report.c_upper, spec.output.theta)?;
        let interval = if spec.output.interval > 0.0 { spec.output.interval } else { spec.time.horizon };
        Ok(Simulation {
            times: output_times(spec.time.horizon, interval),
            problem,
            state,
            report,
            monitor,
            next_output: 0,
        })
    }

    pub fn output_times(&self) -> &[f64] {
        &self.times
    }

    /// Runs to the horizon, calling `on_output` at every output time
    /// (including `t = 0`). Steps never cross an output time.
    pub fn run<F>(&mut self, on_output: F) -> Result<()>
    where
        F: FnMut(OutputEvent<'_>) -> Result<()>,
    {
        let horizon = self.problem.spec.time.horizon;
        self.run_until(horizon, on_output)
    }

    /// Like [`Simulation::run`] but stops at `t_stop` (capped at the
    /// horizon). Stopping between output times shortens the step that
    /// reaches `t_stop`, so the step sequence can differ from a single
    /// uninterrupted run.
    pub fn run_until<F>(&mut self, t_stop: f64, mut on_output: F) -> Result<()>
    where
        F: FnMut(OutputEvent<'_>) -> Result<()>,
    {
        let horizon = self.problem.spec.time.horizon;
        let t_stop = t_stop.min(horizon);
        loop {
            while self.next_output < self.times.len() && self.state.t >= self.times[self.next_output] {
                let record = self.monitor.record(&self.problem, &self.state);
                on_output(OutputEvent {
                    index: self.next_output,
                    problem: &self.problem,
                    state: &self.state,
                    record: &record,
                })?;
                self.next_output += 1;
            }
            if self.state.t >= t_stop {
                return Ok(());
            }
            let target = self.times.get(self.next_output).copied().unwrap_or(horizon).min(t_stop);
            let (mut next, info) = step(&self.state, &self.problem, target - self.state.t)?;
            if (target - next.t).abs() <= 1e-12 * horizon.max(1.0) {
                next.t = target;
            }
            self.monitor.observe(&self.problem, &self.state, &next, &info);
            self.state = next;
        }
    }

    pub fn summary(&self) -> RunSummary {
        self.monitor.summary()
    }
}

/// Result of a run kept in memory.
pub struct RunOutcome {
    pub records: Vec<DiagnosticsRecord>,
    pub summary: RunSummary,
    pub final_state: State,
    pub report: ValidationReport,
    pub problem: Problem,
}

/// Runs `spec` without touching the file system.
pub fn run_in_memory(spec: &ScenarioSpec) -> Result<RunOutcome> {
    let mut sim = Simulation::new(spec)?;
    let mut records = Vec::new();
    sim.run(|ev| {
        records.push(ev.record.clone());
        Ok(())
    })?;
    Ok(RunOutcome {
        records,
        summary: sim.summary(),
        final_state: sim.state,
        report: sim.report,
        problem: sim.problem,
    })
}

/// Runs `spec` writing snapshots, `diagnostics.csv`, the echoed scenario and
/// the validation report into `dir`, which is locked for the duration.
///
/// On a solver abort the last accepted state and the error are written to
/// `dir/dump` before the error is returned.
pub fn run_to_dir(spec: &ScenarioSpec, dir: &Path) -> Result<RunOutcome> {
    let report = validate_problem_data(spec);
    let _lock = DirLock::acquire(dir)?;
    io::write_text(&dir.join("validation.txt"), &format!("{report}\n"))?;
    let report = report.into_result()?;
    io::write_text(&dir.join("scenario.ini"), &serialize_scenario(spec))?;
    let mut sim = Simulation::new(spec)?;
    debug_assert_eq!(sim.report, report);
    let mut diag = io::diagnostics_writer(dir)?;
    let mut index = io::CsvAppender::create(dir.join("snapshots.csv"), &io::SNAPSHOT_INDEX_COLUMNS)?;
    let mut records = Vec::new();
    let vtk = spec.output.vtk && spec.grid.dim == 2;
    let result = sim.run(|ev| {
        let params = ev.problem.params();
        let path = io::write_snapshot(dir, ev.index, &ev.problem.grid, ev.state, params)?;
        if vtk {
            io::write_vtk(dir, ev.index, &ev.problem.grid, ev.state, params)?;
        }
        let name = path.file_name().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
        index.row(&[ev.index.to_string(), crate::diagnostics::fmt_f64(ev.state.t), name])?;
        io::write_record(&mut diag, ev.record)?;
        records.push(ev.record.clone());
        Ok(())
    });
    if let Err(e) = result {
        if !matches!(e, Error::Io { .. }) {
            let dump = dir.join("dump");
            io::create_dir(&dump)?;
            io::write_snapshot(&dump, 0, &sim.problem.grid, &sim.state, sim.problem.params())?;
            io::write_text(
                &dump.join("error.txt"),
                &format!("t = {}\nsteps = {}\n{e}\n", sim.state.t, sim.summary().steps),
            )?;
        }
        return Err(e);
    }
    Ok(RunOutcome {
        records,
        summary: sim.summary(),
        final_state: sim.state,
        report: sim.report,
        problem: sim.problem,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scenario::preset;

    #[test]
    fn output_times_hit_the_grid() {
        assert_eq!(output_times(1.0, 0.25), vec![0.0, 0.25, 0.5, 0.75, 1.0]);
        assert_eq!(output_times(1.0, 0.3).len(), 4);
        assert_eq!(output_times(1.0, 0.1).len(), 11);
        assert_eq!(*output_times(1.0, 0.1).last().unwrap(), 1.0);
    }

    #[test]
    fn equilibrium_rows_are_constant() {
        let out = run_in_memory(&preset("equilibrium").unwrap()).unwrap();
        assert_eq!(out.records.len(), 11);
        assert_eq!(out.summary.steps, 1000);
        let first = &out.records[0];
        for r in &out.records {
            assert_eq!(r.energy.potential, first.energy.potential);
            assert_eq!(r.energy.residual, 0.0);
            assert_eq!(r.rho.total, first.rho.total);
        }
        assert_eq!(out.records.last().unwrap().time, 1.0);
    }

    #[test]
    fn stopping_on_output_times_changes_nothing() {
        let spec = preset("closed-end").unwrap();
        let whole = run_in_memory(&spec).unwrap();
        let mut sim = Simulation::new(&spec).unwrap();
        for t in [0.5, 1.0, 1.5, 2.0, 3.0] {
            sim.run_until(t, |_| Ok(())).unwrap();
        }
        assert_eq!(sim.state, whole.final_state);
        assert_eq!(sim.summary().steps, whole.summary.steps);
    }

    #[test]
    fn files_and_lock() {
        let dir = tempfile::tempdir().unwrap();
        let mut spec = preset("proportional").unwrap();
        spec.time.horizon = 0.1;
        spec.output.interval = 0.05;
        let out = run_to_dir(&spec, dir.path()).unwrap();
        assert_eq!(out.records.len(), 3);
        for k in 0..3 {
            assert!(dir.path().join(io::snapshot_name(k)).exists());
        }
        let diag = std::fs::read_to_string(dir.path().join("diagnostics.csv")).unwrap();
        assert_eq!(diag.lines().count(), 4);
        assert!(!dir.path().join(io::LOCK_FILE).exists());
    }

    #[test]
    fn abort_leaves_a_dump() {
        let dir = tempfile::tempdir().unwrap();
        let mut spec = preset("corridor-evac").unwrap();
        spec.time.dt_override = Some(0.5);
        let e = run_to_dir(&spec, dir.path()).err().unwrap();
        assert_eq!(e.exit_code(), 3);
        assert!(dir.path().join("dump/error.txt").exists());
        assert!(dir.path().join("diagnostics.csv").exists());
    }
}
