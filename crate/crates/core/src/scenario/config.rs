//! Flat `[section]` / `key = value` scenario files.
//!
//! ```text
//! [grid]
//! dim = 1
//! lx = 1.0
//! nx = 200
//!
//! [time]
//! T = 1.0
//!
//! [initial]
//! rho = 0.5
//! rhostar = gauss(1.0, -0.3, 0.5, 0.5, 0.1)
//!
//! [boundary]
//! left.ux = 1.0
//! left.rho = 0.5
//! left.rhostar = 1.0
//! right.ux = 1.0
//! ```
//!
//! `#` starts a comment. Unknown keys are rejected with the nearest known
//! key as a suggestion.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::pressure::PressureParams;
use crate::solver::{Mode, StepConfig};

use super::{
    BoundarySpec, ForcingSpec, Gate, GridSpec, InitialSpec, OutputSpec, Profile, ScenarioSpec, SideTrace, TimeSpec,
};

const REQUIRED: [&str; 4] = ["grid", "time", "initial", "boundary"];
const SECTIONS: [&str; 8] = ["grid", "time", "pressure", "initial", "boundary", "forcing", "solver", "output"];
const SIDE_NAMES: [&str; 4] = ["left", "right", "bottom", "top"];
const SIDE_KEYS: [&str; 10] = [
    "ux",
    "uy",
    "rho",
    "rhostar",
    "gate_from",
    "gate_to",
    "gate_ux",
    "gate_uy",
    "gate_rho",
    "gate_rhostar",
];

/// Every accepted key, as `section.key`; boundary side keys appear once per
/// side.
pub const KNOWN_KEYS: &[(&str, &[&str])] = &[
    ("grid", &["dim", "lx", "ly", "nx", "ny"]),
    ("time", &["T", "dt_override"]),
    ("pressure", &["epsilon", "delta", "alpha", "beta", "gamma"]),
    ("initial", &["rho", "rhostar", "ux", "uy"]),
    ("boundary", &["u_inf_x", "u_inf_y"]),
    ("forcing", &["wx", "wy", "time_dependent"]),
    (
        "solver",
        &["mode", "cfl", "newton_tol", "newton_max_iters", "eta", "viscosity", "bulk_viscosity"],
    ),
    ("output", &["name", "interval", "dir", "vtk", "theta"]),
];

fn known_in(section: &str) -> Vec<String> {
    let mut keys: Vec<String> = KNOWN_KEYS
        .iter()
        .find(|(s, _)| *s == section)
        .map(|(_, k)| k.iter().map(|s| s.to_string()).collect())
        .unwrap_or_default();
    if section == "boundary" {
        for side in SIDE_NAMES {
            for k in SIDE_KEYS {
                keys.push(format!("{side}.{k}"));
            }
        }
    }
    keys
}

fn suggestion(word: &str, candidates: &[String]) -> Option<String> {
    candidates
        .iter()
        .map(|c| (strsim::levenshtein(word, c), c))
        .filter(|(d, c)| *d <= (c.len().max(word.len()) / 2).max(2))
        .min_by_key(|(d, _)| *d)
        .map(|(_, c)| c.clone())
}

#[derive(Debug)]
struct Entry {
    value: String,
    line: usize,
}

struct Section<'a> {
    name: &'a str,
    header_line: usize,
    entries: BTreeMap<String, Entry>,
    used: BTreeSet<String>,
}

impl<'a> Section<'a> {
    fn err(&self, line: usize, message: impl Into<String>) -> Error {
        Error::Parse {
            section: self.name.to_string(),
            line,
            message: message.into(),
        }
    }

    fn raw(&mut self, key: &str) -> Option<(String, usize)> {
        self.used.insert(key.to_string());
        self.entries.get(key).map(|e| (e.value.clone(), e.line))
    }

    fn f64_opt(&mut self, key: &str) -> Result<Option<f64>> {
        match self.raw(key) {
            None => Ok(None),
            Some((v, line)) => v
                .parse::<f64>()
                .map(Some)
                .map_err(|_| self.err(line, format!("'{key}' expects a number, got '{v}'"))),
        }
    }

    fn f64_or(&mut self, key: &str, default: f64) -> Result<f64> {
        Ok(self.f64_opt(key)?.unwrap_or(default))
    }

    fn f64_req(&mut self, key: &str) -> Result<f64> {
        let line = self.header_line;
        self.f64_opt(key)?
            .ok_or_else(|| self.err(line, format!("missing required key '{key}'")))
    }

    fn usize_opt(&mut self, key: &str) -> Result<Option<usize>> {
        match self.raw(key) {
            None => Ok(None),
            Some((v, line)) => v
                .parse::<usize>()
                .map(Some)
                .map_err(|_| self.err(line, format!("'{key}' expects a nonnegative integer, got '{v}'"))),
        }
    }

    fn bool_or(&mut self, key: &str, default: bool) -> Result<bool> {
        match self.raw(key) {
            None => Ok(default),
            Some((v, line)) => match v.as_str() {
                "true" => Ok(true),
                "false" => Ok(false),
                _ => Err(self.err(line, format!("'{key}' expects true or false, got '{v}'"))),
            },
        }
    }

    fn profile_opt(&mut self, key: &str) -> Result<Option<Profile>> {
        match self.raw(key) {
            None => Ok(None),
            Some((v, line)) => Profile::parse(&v).map(Some).map_err(|e| self.err(line, e.to_string())),
        }
    }

    fn string_opt(&mut self, key: &str) -> Option<String> {
        self.raw(key).map(|(v, _)| v)
    }

    fn reject_unknown(&self) -> Result<()> {
        let known = known_in(self.name);
        for (key, entry) in &self.entries {
            if !self.used.contains(key) {
                let hint = match suggestion(key, &known) {
                    Some(s) => format!("; did you mean '{s}'?"),
                    None => String::new(),
                };
                return Err(self.err(entry.line, format!("unknown key '{key}'{hint}")));
            }
        }
        Ok(())
    }
}

fn empty_section(name: &str) -> Section<'_> {
    Section {
        name,
        header_line: 0,
        entries: BTreeMap::new(),
        used: BTreeSet::new(),
    }
}

/// Parses a scenario file, applying defaults for optional sections and keys.
pub fn parse_scenario(text: &str) -> Result<ScenarioSpec> {
    let mut sections: BTreeMap<&'static str, Section<'static>> = BTreeMap::new();
    let mut current: Option<&'static str> = None;
    for (idx, raw_line) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw_line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        if let Some(rest) = line.strip_prefix('[') {
            let name = rest.strip_suffix(']').map(str::trim).ok_or_else(|| Error::Parse {
                section: rest.to_string(),
                line: line_no,
                message: "unterminated section header".into(),
            })?;
            let Some(&canon) = SECTIONS.iter().find(|s| **s == name) else {
                let cands: Vec<String> = SECTIONS.iter().map(|s| s.to_string()).collect();
                let hint = suggestion(name, &cands).map(|s| format!("; did you mean [{s}]?")).unwrap_or_default();
                return Err(Error::Parse {
                    section: name.to_string(),
                    line: line_no,
                    message: format!("unknown section{hint}"),
                });
            };
            if sections.contains_key(canon) {
                return Err(Error::Parse {
                    section: canon.to_string(),
                    line: line_no,
                    message: "section declared twice".into(),
                });
            }
            sections.insert(
                canon,
                Section {
                    name: canon,
                    header_line: line_no,
                    entries: BTreeMap::new(),
                    used: BTreeSet::new(),
                },
            );
            current = Some(canon);
            continue;
        }
        let Some(sec) = current else {
            return Err(Error::Parse {
                section: String::new(),
                line: line_no,
                message: "key outside of any section".into(),
            });
        };
        let (key, value) = line.split_once('=').ok_or_else(|| Error::Parse {
            section: sec.to_string(),
            line: line_no,
            message: format!("expected 'key = value', got '{line}'"),
        })?;
        let key = key.trim().to_string();
        let value = value.trim().trim_matches('"').to_string();
        let section = sections.get_mut(sec).expect("section registered on header");
        if section.entries.contains_key(&key) {
            return Err(section.err(line_no, format!("duplicate key '{key}'")));
        }
        section.entries.insert(key, Entry { value, line: line_no });
    }
    for req in REQUIRED {
        if !sections.contains_key(req) {
            return Err(Error::Parse {
                section: req.to_string(),
                line: 0,
                message: format!("missing required section [{req}]"),
            });
        }
    }
    let mut take = |name: &'static str| sections.remove(name).unwrap_or_else(|| empty_section(name));

    let mut g = take("grid");
    let dim = g.usize_opt("dim")?.unwrap_or(1);
    let lx = g.f64_req("lx")?;
    let ly = g.f64_or("ly", 1.0)?;
    let nx = g.usize_opt("nx")?.ok_or_else(|| g.err(g.header_line, "missing required key 'nx'"))?;
    let ny = g.usize_opt("ny")?.unwrap_or(1);
    g.reject_unknown()?;
    let grid = GridSpec { dim, lx, ly, nx, ny };

    let mut t = take("time");
    let horizon = t.f64_req("T")?;
    let dt_override = t.f64_opt("dt_override")?;
    t.reject_unknown()?;

    let mut p = take("pressure");
    let d = PressureParams::default();
    let pressure = PressureParams {
        epsilon: p.f64_or("epsilon", d.epsilon)?,
        delta: p.f64_or("delta", d.delta)?,
        alpha: p.f64_or("alpha", d.alpha)?,
        beta: p.f64_or("beta", d.beta)?,
        gamma: p.f64_or("gamma", d.gamma)?,
    };
    p.reject_unknown()?;

    let mut i = take("initial");
    let rho = i
        .profile_opt("rho")?
        .ok_or_else(|| i.err(i.header_line, "missing required key 'rho'"))?;
    let initial = InitialSpec {
        rho,
        rhostar: i.profile_opt("rhostar")?.unwrap_or(Profile::Const(1.0)),
        ux: i.profile_opt("ux")?.unwrap_or(Profile::Const(0.0)),
        uy: i.profile_opt("uy")?.unwrap_or(Profile::Const(0.0)),
    };
    i.reject_unknown()?;

    let mut b = take("boundary");
    let mut sides = BTreeMap::new();
    for side in SIDE_NAMES {
        let mentioned = b.entries.keys().any(|k| k.starts_with(&format!("{side}.")));
        if !mentioned {
            continue;
        }
        let key = |k: &str| format!("{side}.{k}");
        let def = SideTrace::default();
        let mut trace = SideTrace {
            ux: b.f64_or(&key("ux"), def.ux)?,
            uy: b.f64_or(&key("uy"), def.uy)?,
            rho: b.f64_or(&key("rho"), def.rho)?,
            rhostar: b.f64_or(&key("rhostar"), def.rhostar)?,
            gate: None,
        };
        let from = b.f64_opt(&key("gate_from"))?;
        let to = b.f64_opt(&key("gate_to"))?;
        let gate_fields = [
            b.f64_opt(&key("gate_ux"))?,
            b.f64_opt(&key("gate_uy"))?,
            b.f64_opt(&key("gate_rho"))?,
            b.f64_opt(&key("gate_rhostar"))?,
        ];
        match (from, to) {
            (Some(from), Some(to)) => {
                trace.gate = Some(Gate {
                    from,
                    to,
                    ux: gate_fields[0].unwrap_or(0.0),
                    uy: gate_fields[1].unwrap_or(0.0),
                    rho: gate_fields[2].unwrap_or(0.0),
                    rhostar: gate_fields[3].unwrap_or(1.0),
                });
            }
            (None, None) if gate_fields.iter().all(Option::is_none) => {}
            _ => {
                return Err(b.err(b.header_line, format!("gate on side '{side}' needs both gate_from and gate_to")));
            }
        }
        sides.insert(side, trace);
    }
    let u_inf = match (b.profile_opt("u_inf_x")?, b.profile_opt("u_inf_y")?) {
        (None, None) => None,
        (x, y) => Some((x.unwrap_or(Profile::Const(0.0)), y.unwrap_or(Profile::Const(0.0)))),
    };
    b.reject_unknown()?;
    let boundary = BoundarySpec { sides, u_inf };

    let mut f = take("forcing");
    let forcing = ForcingSpec {
        wx: f.profile_opt("wx")?.unwrap_or(Profile::Const(0.0)),
        wy: f.profile_opt("wy")?.unwrap_or(Profile::Const(0.0)),
        time_dependent: f.bool_or("time_dependent", false)?,
    };
    f.reject_unknown()?;

    let mut s = take("solver");
    let sd = StepConfig::default();
    let mode = match s.raw("mode") {
        None => sd.mode,
        Some((v, line)) => Mode::parse(&v).ok_or_else(|| s.err(line, format!("mode must be 'imex' or 'explicit', got '{v}'")))?,
    };
    let solver = StepConfig {
        mode,
        cfl: s.f64_or("cfl", sd.cfl)?,
        newton_tol: s.f64_or("newton_tol", sd.newton_tol)?,
        newton_max_iters: s.usize_opt("newton_max_iters")?.unwrap_or(sd.newton_max_iters),
        eta: s.f64_or("eta", sd.eta)?,
        mu: s.f64_or("viscosity", sd.mu)?,
        lambda: s.f64_or("bulk_viscosity", sd.lambda)?,
    };
    s.reject_unknown()?;

    let mut o = take("output");
    let output = OutputSpec {
        name: o.string_opt("name").unwrap_or_else(|| "run".to_string()),
        interval: o.f64_or("interval", horizon / 10.0)?,
        dir: o.string_opt("dir"),
        vtk: o.bool_or("vtk", false)?,
        theta: o.f64_or("theta", 0.05)?,
    };
    o.reject_unknown()?;

    Ok(ScenarioSpec {
        grid,
        time: TimeSpec { horizon, dt_override },
        pressure,
        initial,
        boundary,
        forcing,
        solver,
        output,
    })
}

/// Writes a spec back to config text; every float uses its shortest exact
/// representation so that parsing the output reproduces the scenario.
pub fn serialize_scenario(spec: &ScenarioSpec) -> String {
    let mut s = String::new();
    let g = &spec.grid;
    let _ = writeln!(s, "[grid]\ndim = {}\nlx = {:?}\nly = {:?}\nnx = {}\nny = {}\n", g.dim, g.lx, g.ly, g.nx, g.ny);
    let _ = writeln!(s, "[time]\nT = {:?}", spec.time.horizon);
    if let Some(dt) = spec.time.dt_override {
        let _ = writeln!(s, "dt_override = {dt:?}");
    }
    let p = &spec.pressure;
    let _ = writeln!(
        s,
        "\n[pressure]\nepsilon = {:?}\ndelta = {:?}\nalpha = {:?}\nbeta = {:?}\ngamma = {:?}\n",
        p.epsilon, p.delta, p.alpha, p.beta, p.gamma
    );
    let i = &spec.initial;
    let _ = writeln!(s, "[initial]\nrho = {}\nrhostar = {}\nux = {}\nuy = {}\n", i.rho, i.rhostar, i.ux, i.uy);
    let _ = writeln!(s, "[boundary]");
    for side in SIDE_NAMES {
        let Some(t) = spec.boundary.sides.get(side) else { continue };
        let _ = writeln!(
            s,
            "{side}.ux = {:?}\n{side}.uy = {:?}\n{side}.rho = {:?}\n{side}.rhostar = {:?}",
            t.ux, t.uy, t.rho, t.rhostar
        );
        if let Some(gt) = &t.gate {
            let _ = writeln!(
                s,
                "{side}.gate_from = {:?}\n{side}.gate_to = {:?}\n{side}.gate_ux = {:?}\n{side}.gate_uy = {:?}\n{side}.gate_rho = {:?}\n{side}.gate_rhostar = {:?}",
                gt.from, gt.to, gt.ux, gt.uy, gt.rho, gt.rhostar
            );
        }
    }
    if let Some((x, y)) = &spec.boundary.u_inf {
        let _ = writeln!(s, "u_inf_x = {x}\nu_inf_y = {y}");
    }
    let f = &spec.forcing;
    let _ = writeln!(s, "\n[forcing]\nwx = {}\nwy = {}\ntime_dependent = {}\n", f.wx, f.wy, f.time_dependent);
    let c = &spec.solver;
    let _ = writeln!(
        s,
        "[solver]\nmode = {}\ncfl = {:?}\nnewton_tol = {:?}\nnewton_max_iters = {}\neta = {:?}\nviscosity = {:?}\nbulk_viscosity = {:?}\n",
        c.mode.name(),
        c.cfl,
        c.newton_tol,
        c.newton_max_iters,
        c.eta,
        c.mu,
        c.lambda
    );
    let o = &spec.output;
    let _ = writeln!(s, "[output]\nname = {}\ninterval = {:?}", o.name, o.interval);
    if let Some(dir) = &o.dir {
        let _ = writeln!(s, "dir = {dir}");
    }
    let _ = writeln!(s, "vtk = {}\ntheta = {:?}", o.vtk, o.theta);
    s
}
