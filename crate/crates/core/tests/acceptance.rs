//! Acceptance suite: every criterion runs at its stated tolerance and prints
//! one `PASS`/`FAIL` line. The process exits non-zero if any criterion fails.

use std::collections::BTreeMap;
use std::path::Path;
use std::process::Command;

use congest_core::boundary::classify_boundary;
use congest_core::continuation::{run_continuation, ContinuationPlan};
use congest_core::grid::Grid;
use congest_core::pressure::{eval_h_delta, eval_h_eps, eval_pi_delta, eval_pi_eps, PressureParams};
use congest_core::run::run_in_memory;
use congest_core::scenario::{preset, serialize_scenario, Profile, ScenarioSpec, PRESET_NAMES};
use congest_core::solver::{advect_conservative, advect_nonconservative_rhostar, Mode};
use congest_core::Result;

type Criterion = fn() -> Result<(bool, String)>;

struct Outcome {
    id: &'static str,
    pass: bool,
    detail: String,
}

fn outcome(id: &'static str, result: Result<(bool, String)>) -> Outcome {
    match result {
        Ok((pass, detail)) => Outcome { id, pass, detail },
        Err(e) => Outcome {
            id,
            pass: false,
            detail: format!("error: {e}"),
        },
    }
}

fn main() {
    let criteria: [(&'static str, Criterion); 10] = [
        ("P1 pressure-law identities", p1_pressure_law),
        ("P2 comparison principle", p2_comparison),
        ("P3 mass ledgers", p3_mass_ledgers),
        ("P4 congestion constraint", p4_constraint),
        ("P5 energy inequality", p5_energy),
        ("P6 transport accuracy", p6_transport),
        ("P7 stiff-limit trends", p7_stiff_limit),
        ("P8 recovery", p8_recovery),
        ("P9 hypothesis gate", p9_gate),
        ("P10 determinism", p10_determinism),
    ];
    let results: Vec<Outcome> = criteria.iter().map(|(id, f)| outcome(id, f())).collect();
    println!();
    for r in &results {
        println!("{} {}: {}", if r.pass { "PASS" } else { "FAIL" }, r.id, r.detail);
    }
    let failed = results.iter().filter(|r| !r.pass).count();
    println!("\n{} of {} criteria passed", results.len() - failed, results.len());
    if failed > 0 {
        std::process::exit(1);
    }
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(f64::MIN_POSITIVE)
}

// Five-point central difference.
fn derivative(f: impl Fn(f64) -> f64, z: f64, h: f64) -> f64 {
    (f(z - 2.0 * h) - 8.0 * f(z - h) + 8.0 * f(z + h) - f(z + 2.0 * h)) / (12.0 * h)
}

fn p1_pressure_law() -> Result<(bool, String)> {
    let sets = [
        PressureParams::default(),
        PressureParams::default().with_eps_delta(1e-4, 1e-4),
        PressureParams { alpha: 1.5, beta: 2.5, ..PressureParams::default() }.with_eps_delta(1e-2, 0.05),
    ];
    let mut zero_ok = true;
    let mut monotone_ok = true;
    let mut worst_identity = 0.0f64;
    let mut worst_split = 0.0f64;
    for p in &sets {
        zero_ok &= eval_pi_eps(0.0, p)? == 0.0 && eval_pi_delta(0.0, p)? == 0.0;

        let samples: Vec<f64> = (0..1000).map(|k| k as f64 / 1000.0).collect();
        for w in samples.windows(2) {
            monotone_ok &= eval_pi_eps(w[1], p)? > eval_pi_eps(w[0], p)?;
            monotone_ok &= eval_pi_delta(w[1], p)? >= eval_pi_delta(w[0], p)?;
        }

        let split = 1.0 - p.delta;
        for k in 1..200 {
            let z = k as f64 / 200.0;
            let h = 1e-3 * z.min(1.0 - z);
            let h_eps = |s: f64| eval_h_eps(s, p).unwrap_or(f64::NAN);
            let lhs = z * derivative(h_eps, z, h) - h_eps(z);
            worst_identity = worst_identity.max(rel(lhs, eval_pi_eps(z, p)?));
            let gap = (z - split).abs();
            if gap > 1e-3 {
                let h = 1e-3 * z.min(1.0 - z).min(gap);
                let h_delta = |s: f64| eval_h_delta(s, p).unwrap_or(f64::NAN);
                let lhs = z * derivative(h_delta, z, h) - h_delta(z);
                worst_identity = worst_identity.max(rel(lhs, eval_pi_delta(z, p)?));
            }
        }

        // The branch above the split is affine, so two samples extrapolate
        // it back to the split point.
        let eta = 1e-3 * p.delta;
        let extrapolated = 2.0 * eval_pi_delta(split + eta, p)? - eval_pi_delta(split + 2.0 * eta, p)?;
        let below = eval_pi_eps(split, p)?;
        worst_split = worst_split.max(rel(extrapolated, below)).max(rel(eval_pi_delta(split, p)?, below));
    }
    let pass = zero_ok && monotone_ok && worst_identity <= 1e-6 && worst_split <= 1e-12;
    Ok((
        pass,
        format!(
            "pi(0) = 0: {zero_ok}; monotone on 1000 samples: {monotone_ok}; \
             potential identity rel. error {worst_identity:.2e} (tol 1e-6); \
             continuity at 1 - delta {worst_split:.2e} (tol 1e-12)"
        ),
    ))
}

fn p2_comparison() -> Result<(bool, String)> {
    let spec = preset("proportional")?;
    let out = run_in_memory(&spec)?;
    let scale = out.final_state.rho.iter().fold(f64::MIN_POSITIVE, |m, &r| m.max(r));
    let defect = out.summary.max_comparison_defect / scale;
    Ok((
        defect <= 1e-12,
        format!("max |Z - 0.5 rho| / max rho = {defect:.2e} over {} steps (tol 1e-12)", out.summary.steps),
    ))
}

fn p3_mass_ledgers() -> Result<(bool, String)> {
    let mut worst_closure = 0.0f64;
    let mut worst_sign = f64::NEG_INFINITY;
    let mut rows = 0;
    for name in PRESET_NAMES {
        let out = run_in_memory(&preset(name)?)?;
        for r in &out.records {
            for l in [&r.rho, &r.z] {
                worst_closure = worst_closure.max(l.closure);
                let scale = l.total.abs().max(l.inflow).max(l.outflow).max(f64::MIN_POSITIVE);
                worst_sign = worst_sign.max(l.defect / scale);
                rows += 1;
            }
        }
    }
    let pass = worst_closure <= 1e-12 && worst_sign <= 1e-12;
    Ok((
        pass,
        format!(
            "{rows} ledger rows on {} presets: max |defect + outflow| rel. {worst_closure:.2e} (tol 1e-12), \
             max defect rel. {worst_sign:.2e} (must be <= 0 within 1e-12)",
            PRESET_NAMES.len()
        ),
    ))
}

fn p4_constraint() -> Result<(bool, String)> {
    let mut pass = true;
    let mut parts = Vec::new();
    for name in PRESET_NAMES {
        let mut worst = f64::NEG_INFINITY;
        for eps in [1e-1, 1e-2, 1e-3, 1e-4] {
            let mut spec = preset(name)?.with_eps_delta(eps, eps);
            spec.solver.mode = Mode::Imex;
            spec = if spec.grid.dim == 2 {
                spec.grid.nx = 64;
                spec.grid.ny = 32;
                spec
            } else {
                spec.with_cells(200)
            };
            let out = run_in_memory(&spec)?;
            let at_outputs = out.records.iter().map(|r| r.constraints.max_z).fold(f64::NEG_INFINITY, f64::max);
            worst = worst.max(at_outputs).max(out.summary.max_z);
        }
        pass &= worst < 1.0;
        parts.push(format!("{name} {worst:.6}"));
    }
    Ok((pass, format!("max Z over eps in [1e-4, 1e-1]: {}", parts.join(", "))))
}

fn p5_energy() -> Result<(bool, String)> {
    let coarse = run_in_memory(&preset("corridor-evac")?.with_cells(200))?;
    let fine = run_in_memory(&preset("corridor-evac")?.with_cells(400))?;
    let (a, b) = (coarse.summary.energy_residual_positive, fine.summary.energy_residual_positive);
    let step_ratio = fine.summary.steps as f64 / coarse.summary.steps as f64;
    let halved = (1.9..=2.1).contains(&step_ratio);
    let shrinks = b * 1.5 <= a;

    let eq = run_in_memory(&preset("equilibrium")?)?;
    let eq_residual = eq.records.iter().map(|r| r.energy.residual.abs()).fold(0.0, f64::max);
    let eq_ok = eq.summary.steps >= 1000 && eq_residual <= 1e-12;
    Ok((
        halved && shrinks && eq_ok,
        format!(
            "corridor-evac positive residual {a:.3e} (200 cells, {} steps) -> {b:.3e} (400 cells, {} steps), \
             required factor 1.5; equilibrium |residual| {eq_residual:.1e} over {} steps (tol 1e-12)",
            coarse.summary.steps, fine.summary.steps, eq.summary.steps
        ),
    ))
}

type FieldOf = fn(&Advected) -> &[f64];

struct Advected {
    rho: Vec<f64>,
    z: Vec<f64>,
    rhostar: Vec<f64>,
}

// Smooth profiles entering through the left boundary under a compressive,
// positive velocity, up to t = 0.25 with Courant number 0.5.
fn advect_smooth(n: usize) -> Result<Advected> {
    use std::f64::consts::PI;
    let g = Grid::new_1d(1.0, n)?;
    let u: Vec<f64> = (0..=n).map(|i| 0.7 + 0.3 * (2.0 * PI * i as f64 / n as f64).sin()).collect();
    let part = classify_boundary(&g, &[[u[0], 0.0], [u[n], 0.0]]);
    let centers = |f: &dyn Fn(f64) -> f64| (0..n).map(|c| f((c as f64 + 0.5) / n as f64)).collect::<Vec<f64>>();
    let mut rho = centers(&|x| 0.5 + 0.2 * (2.0 * PI * x).sin());
    let mut z = centers(&|x| 0.3 + 0.1 * (2.0 * PI * x).cos());
    let mut rhostar = centers(&|x| 1.2 + 0.2 * (2.0 * PI * x).sin());
    let dt = 0.5 / n as f64;
    for _ in 0..n / 2 {
        rho = advect_conservative(&g, &rho, &u, &[], &[0.5, 0.0], &part, dt)?.0;
        z = advect_conservative(&g, &z, &u, &[], &[0.4, 0.0], &part, dt)?.0;
        rhostar = advect_nonconservative_rhostar(&g, &rhostar, &u, &[], &[1.2, 1.0], &part, dt)?;
    }
    Ok(Advected { rho, z, rhostar })
}

// L1 distance between a coarse field and the pairwise average of a field on
// the twice-refined grid.
fn restricted_l1(coarse: &[f64], fine: &[f64]) -> f64 {
    let h = 1.0 / coarse.len() as f64;
    coarse.iter().enumerate().map(|(c, &v)| (v - 0.5 * (fine[2 * c] + fine[2 * c + 1])).abs() * h).sum()
}

fn p6_transport() -> Result<(bool, String)> {
    let levels = [100, 200, 400, 800].map(advect_smooth);
    let levels: Vec<Advected> = levels.into_iter().collect::<Result<_>>()?;
    let mut pass = true;
    let mut parts = Vec::new();
    let fields: [(&str, FieldOf); 3] =
        [("rho", |a| &a.rho), ("Z", |a| &a.z), ("rhostar", |a| &a.rhostar)];
    for (name, get) in fields {
        let d: Vec<f64> = levels.windows(2).map(|w| restricted_l1(get(&w[0]), get(&w[1]))).collect();
        let orders: Vec<f64> = d.windows(2).map(|w| (w[0] / w[1]).log2()).collect();
        pass &= orders.iter().all(|&o| o >= 0.8);
        parts.push(format!("{name} {:.3}/{:.3}", orders[0], orders[1]));
    }

    // Constant packing limit under converging velocity, in 1D and 2D.
    let mut constant_ok = true;
    let g = Grid::new_1d(1.0, 40)?;
    let u: Vec<f64> = (0..=40).map(|i| 1.0 - 2.0 * i as f64 / 40.0).collect();
    let part = classify_boundary(&g, &[[u[0], 0.0], [u[40], 0.0]]);
    let mut rs = vec![1.3; 40];
    for _ in 0..100 {
        rs = advect_nonconservative_rhostar(&g, &rs, &u, &[], &[1.3, 1.3], &part, 0.01)?;
    }
    constant_ok &= rs.iter().all(|&v| v == 1.3);
    let g = Grid::new_2d(1.0, 1.0, 24, 24)?;
    let mut u = vec![0.0; g.n_u()];
    let mut v = vec![0.0; g.n_v()];
    for j in 0..24 {
        for i in 0..=24 {
            u[g.uface(i, j)] = 1.0 - 2.0 * i as f64 / 24.0;
        }
    }
    for j in 0..=24 {
        for i in 0..24 {
            v[g.vface(i, j)] = 1.0 - 2.0 * j as f64 / 24.0;
        }
    }
    let traces: Vec<[f64; 2]> = g
        .boundary_faces()
        .iter()
        .map(|f| if f.side.is_x() { [u[f.face], 0.0] } else { [0.0, v[f.face]] })
        .collect();
    let part = classify_boundary(&g, &traces);
    let mut rs = vec![1.3; g.n_cells()];
    let rs_b = vec![1.3; traces.len()];
    for _ in 0..50 {
        rs = advect_nonconservative_rhostar(&g, &rs, &u, &v, &rs_b, &part, 0.01)?;
    }
    constant_ok &= rs.iter().all(|&x| x == 1.3);

    Ok((
        pass && constant_ok,
        format!(
            "self-convergence orders over 100/200/400/800 cells: {} (tol 0.8); constant rhostar kept exactly: {constant_ok}",
            parts.join(", ")
        ),
    ))
}

fn p7_stiff_limit() -> Result<(bool, String)> {
    let plan = ContinuationPlan::new(preset("closed-end")?, vec![1e-1, 1e-2, 1e-3, 1e-4]);
    let report = run_continuation(&plan, None)?;
    let pi: Vec<f64> = report.members.iter().map(|m| m.summary.pi_one_minus_z_time).collect();
    let pi_ok = pi.windows(2).all(|w| w[1] < w[0]) && pi[3] <= 0.05 * pi[0];

    let congested: Vec<f64> = report
        .members
        .iter()
        .filter(|m| m.summary.max_congested_fraction > 0.05)
        .map(|m| m.summary.congested_divu_l2_time)
        .collect();
    let divu_ok = congested.windows(2).all(|w| w[1] <= w[0]);

    let cauchy: Vec<f64> = report.cauchy.iter().map(|c| c.z_l1).collect();
    let cauchy_ok = cauchy.windows(2).all(|w| w[1] < w[0]);

    let fmt = |xs: &[f64]| xs.iter().map(|x| format!("{x:.3e}")).collect::<Vec<_>>().join(" > ");
    Ok((
        pi_ok && divu_ok && cauchy_ok,
        format!(
            "int pi(1-Z) {} (last/first {:.3}, tol 0.05); congested div u L2 on {} members {}; \
             L1(Z) Cauchy {}",
            fmt(&pi),
            pi[3] / pi[0],
            congested.len(),
            fmt(&congested),
            fmt(&cauchy)
        ),
    ))
}

fn p8_recovery() -> Result<(bool, String)> {
    let base = run_in_memory(&preset("corridor-evac")?)?;
    let initial = base.records[0].recovery_max;
    let cells = [400usize, 800, 1600];
    let mut errors = Vec::new();
    for n in cells {
        errors.push(run_in_memory(&preset("corridor-evac")?.with_cells(n))?.summary.max_recovery);
    }
    let xs: Vec<f64> = cells.iter().map(|&n| (1.0 / n as f64).ln()).collect();
    let ys: Vec<f64> = errors.iter().map(|e| e.ln()).collect();
    let (mx, my) = (xs.iter().sum::<f64>() / 3.0, ys.iter().sum::<f64>() / 3.0);
    let order = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum::<f64>()
        / xs.iter().map(|x| (x - mx).powi(2)).sum::<f64>();
    let decreasing = errors.windows(2).all(|w| w[1] < w[0]);
    Ok((
        initial == 0.0 && decreasing && order >= 0.8,
        format!(
            "t = 0 defect {initial:e}; max over the run {:.3e} / {:.3e} / {:.3e} at 400/800/1600 cells, \
             fitted order {order:.3} (tol 0.8)",
            errors[0], errors[1], errors[2]
        ),
    ))
}

fn congest() -> Command {
    Command::new(env!("CARGO_BIN_EXE_congest"))
}

fn write_config(dir: &Path, name: &str, spec: &ScenarioSpec) -> String {
    let path = dir.join(format!("{name}.ini"));
    std::fs::write(&path, serialize_scenario(spec)).expect("writing a config to a temporary directory");
    path.to_string_lossy().into_owned()
}

fn p9_gate() -> Result<(bool, String)> {
    let dir = tempfile::tempdir().map_err(|e| congest_core::Error::io(Path::new("tempdir"), e))?;
    let run = |path: &str| {
        let out = congest().args(["validate", path]).output().expect("running the congest binary");
        let text = format!("{}{}", String::from_utf8_lossy(&out.stdout), String::from_utf8_lossy(&out.stderr));
        (out.status.code(), text)
    };

    let mut negative = preset("corridor-evac")?;
    if let Some(side) = negative.boundary.sides.get_mut("right") {
        side.ux = 0.0;
    }
    let (code_a, text_a) = run(&write_config(dir.path(), "negative-flux", &negative));
    let a_ok = code_a == Some(2) && text_a.contains("Ass1");

    let mut no_gap = preset("equilibrium")?;
    no_gap.initial.rho = Profile::Const(1.0);
    no_gap.initial.rhostar = Profile::Const(1.0);
    let (code_b, text_b) = run(&write_config(dir.path(), "no-gap", &no_gap));
    let b_ok = code_b == Some(2) && text_b.contains("Ass2");

    let mut long = preset("closed-end")?;
    long.time.horizon = 20.0;
    let (code_c, text_c) = run(&write_config(dir.path(), "closed-end-long", &long));
    let c_ok = code_c == Some(0) && text_c.contains("no guarantee");

    Ok((
        a_ok && b_ok && c_ok,
        format!(
            "negative flux exit {code_a:?} (want 2, Ass1); rho0 = rhostar0 exit {code_b:?} (want 2, Ass2); \
             closed-end T = 20 exit {code_c:?} flagged no guarantee: {}",
            text_c.contains("no guarantee")
        ),
    ))
}

fn csv_files(root: &Path) -> BTreeMap<String, Vec<u8>> {
    let mut out = BTreeMap::new();
    let mut stack = vec![root.to_path_buf()];
    while let Some(dir) = stack.pop() {
        for entry in std::fs::read_dir(&dir).into_iter().flatten().flatten() {
            let path = entry.path();
            if path.is_dir() {
                stack.push(path);
            } else if path.extension().is_some_and(|e| e == "csv") {
                let key = path.strip_prefix(root).unwrap_or(&path).to_string_lossy().into_owned();
                out.insert(key, std::fs::read(&path).unwrap_or_default());
            }
        }
    }
    out
}

fn p10_determinism() -> Result<(bool, String)> {
    let dir = tempfile::tempdir().map_err(|e| congest_core::Error::io(Path::new("tempdir"), e))?;
    let mut parts = Vec::new();
    let mut pass = true;
    let jobs: [(&str, Vec<&str>); 3] = [
        ("run closed-end", vec!["run", "closed-end"]),
        ("run two-gate-2d", vec!["run", "two-gate-2d"]),
        ("continuation closed-end", vec!["continuation", "closed-end", "--epsilons", "1e-1,1e-2,1e-3,1e-4"]),
    ];
    for (k, (label, args)) in jobs.iter().enumerate() {
        let mut outputs = Vec::new();
        for attempt in 0..2 {
            let out_dir = dir.path().join(format!("job{k}_{attempt}"));
            let status = congest().args(args).arg("--out").arg(&out_dir).output().expect("running the congest binary");
            pass &= status.status.success();
            outputs.push(csv_files(&out_dir));
        }
        let same = !outputs[0].is_empty() && outputs[0] == outputs[1];
        pass &= same;
        parts.push(format!("{label}: {} CSV files identical: {same}", outputs[0].len()));
    }
    Ok((pass, parts.join("; ")))
}
