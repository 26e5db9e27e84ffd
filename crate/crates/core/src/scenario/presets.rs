//! Built-in scenarios.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::pressure::PressureParams;
use crate::solver::StepConfig;

use super::{
    BoundarySpec, ForcingSpec, Gate, GridSpec, InitialSpec, OutputSpec, Profile, ScenarioSpec, SideTrace, TimeSpec,
};

pub const PRESET_NAMES: [&str; 5] = ["corridor-evac", "closed-end", "two-gate-2d", "equilibrium", "proportional"];

fn c(v: f64) -> Profile {
    Profile::Const(v)
}

fn side(ux: f64, rho: f64, rhostar: f64) -> SideTrace {
    SideTrace {
        ux,
        uy: 0.0,
        rho,
        rhostar,
        gate: None,
    }
}

fn grid_1d(nx: usize) -> GridSpec {
    GridSpec {
        dim: 1,
        lx: 1.0,
        ly: 1.0,
        nx,
        ny: 1,
    }
}

fn output(name: &str, interval: f64) -> OutputSpec {
    OutputSpec {
        name: name.to_string(),
        interval,
        dir: None,
        vtk: false,
        theta: 0.05,
    }
}

fn forcing(wx: f64) -> ForcingSpec {
    ForcingSpec {
        wx: c(wx),
        wy: c(0.0),
        time_dependent: false,
    }
}

fn pressure(eps: f64) -> PressureParams {
    PressureParams::default().with_eps_delta(eps, eps)
}

/// Returns the named built-in scenario.
pub fn preset(name: &str) -> Result<ScenarioSpec> {
    let spec = match name {
        // A crowd streams through a corridor at unit speed; a denser
        // packing limit sits in the middle.
        "corridor-evac" => ScenarioSpec {
            grid: grid_1d(200),
            time: TimeSpec { horizon: 1.0, dt_override: None },
            pressure: pressure(1e-2),
            initial: InitialSpec {
                rho: c(0.5),
                rhostar: Profile::Gauss { base: 1.0, amp: -0.3, cx: 0.5, cy: 0.5, width: 0.1 },
                ux: c(1.0),
                uy: c(0.0),
            },
            boundary: BoundarySpec {
                sides: BTreeMap::from([("left", side(1.0, 0.5, 1.0)), ("right", side(1.0, 0.0, 1.0))]),
                u_inf: None,
            },
            forcing: forcing(1.0),
            solver: StepConfig::default(),
            output: output("corridor-evac", 0.1),
        },
        // Slow inflow on the left and a narrow exit on the right with the
        // same throughput. The crowd starts jammed against the exit and is
        // pushed toward it.
        "closed-end" => ScenarioSpec {
            grid: grid_1d(200),
            time: TimeSpec { horizon: 2.0, dt_override: None },
            pressure: pressure(1e-2),
            initial: InitialSpec {
                rho: Profile::Tanh { x0: 0.75, width: 0.05, left: 0.4, right: 0.98 },
                rhostar: c(1.0),
                ux: c(0.1),
                uy: c(0.0),
            },
            boundary: BoundarySpec {
                sides: BTreeMap::from([("left", side(0.1, 0.3, 1.0)), ("right", side(0.1, 0.0, 1.0))]),
                u_inf: None,
            },
            forcing: forcing(1.5),
            solver: StepConfig::default(),
            output: output("closed-end", 0.1),
        },
        // A hall with an entrance gate on the left wall and a faster exit
        // gate on the right wall.
        "two-gate-2d" => ScenarioSpec {
            grid: GridSpec {
                dim: 2,
                lx: 2.0,
                ly: 1.0,
                nx: 64,
                ny: 32,
            },
            time: TimeSpec { horizon: 0.5, dt_override: None },
            pressure: pressure(1e-2),
            initial: InitialSpec {
                rho: Profile::Gauss { base: 0.3, amp: 0.3, cx: 1.4, cy: 0.5, width: 0.2 },
                rhostar: c(1.0),
                ux: c(0.0),
                uy: c(0.0),
            },
            boundary: BoundarySpec {
                sides: BTreeMap::from([
                    (
                        "left",
                        SideTrace {
                            gate: Some(Gate { from: 0.375, to: 0.625, ux: 0.5, uy: 0.0, rho: 0.4, rhostar: 1.0 }),
                            ..side(0.0, 0.0, 1.0)
                        },
                    ),
                    (
                        "right",
                        SideTrace {
                            gate: Some(Gate { from: 0.375, to: 0.625, ux: 1.0, uy: 0.0, rho: 0.0, rhostar: 1.0 }),
                            ..side(0.0, 0.0, 1.0)
                        },
                    ),
                    ("bottom", side(0.0, 0.0, 1.0)),
                    ("top", side(0.0, 0.0, 1.0)),
                ]),
                u_inf: None,
            },
            forcing: forcing(1.0),
            solver: StepConfig::default(),
            output: output("two-gate-2d", 0.05),
        },
        "equilibrium" => ScenarioSpec {
            grid: grid_1d(64),
            time: TimeSpec { horizon: 1.0, dt_override: Some(1e-3) },
            pressure: pressure(1e-2),
            initial: InitialSpec {
                rho: c(0.4),
                rhostar: c(1.0),
                ux: c(0.0),
                uy: c(0.0),
            },
            boundary: BoundarySpec {
                sides: BTreeMap::from([("left", side(0.0, 0.0, 1.0)), ("right", side(0.0, 0.0, 1.0))]),
                u_inf: None,
            },
            forcing: forcing(0.0),
            solver: StepConfig::default(),
            output: output("equilibrium", 0.1),
        },
        // Constant packing limit 2, so Z = ρ/2 everywhere and always.
        "proportional" => ScenarioSpec {
            grid: grid_1d(200),
            time: TimeSpec { horizon: 0.5, dt_override: None },
            pressure: pressure(1e-2),
            initial: InitialSpec {
                rho: Profile::Gauss { base: 0.6, amp: 0.4, cx: 0.5, cy: 0.5, width: 0.1 },
                rhostar: c(2.0),
                ux: c(1.0),
                uy: c(0.0),
            },
            boundary: BoundarySpec {
                sides: BTreeMap::from([("left", side(1.0, 0.8, 2.0)), ("right", side(1.2, 0.0, 2.0))]),
                u_inf: None,
            },
            forcing: forcing(1.0),
            solver: StepConfig::default(),
            output: output("proportional", 0.05),
        },
        other => {
            return Err(Error::InvalidParams(format!(
                "unknown preset '{other}'; available: {}",
                PRESET_NAMES.join(", ")
            )))
        }
    };
    Ok(spec)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scenario::{parse_scenario, serialize_scenario};

    #[test]
    fn every_preset_round_trips() {
        for name in PRESET_NAMES {
            let spec = preset(name).unwrap();
            let text = serialize_scenario(&spec);
            assert_eq!(parse_scenario(&text).unwrap(), spec, "{name}");
        }
    }

    #[test]
    fn unknown_preset() {
        assert!(preset("stadium").is_err());
    }
}
