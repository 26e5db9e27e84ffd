use crate::boundary::BoundaryPartition;
use crate::error::{Error, Result};
use crate::grid::Grid;
use crate::linalg::BandedMatrix;
use crate::pressure::{dpi_delta_unchecked, pi_delta_unchecked, PressureParams};

/// Converged coupled update.
#[derive(Debug, Clone)]
pub struct ImexOutcome {
    pub z: Vec<f64>,
    pub u: Vec<f64>,
    pub v: Vec<f64>,
    pub iterations: usize,
    pub residual: f64,
    /// Max-norm residual after each iteration, starting with the initial one.
    pub history: Vec<f64>,
}

/// Inputs of the coupled `(Z, u)` backward-Euler subsystem.
pub struct ImexProblem<'a> {
    pub grid: &'a Grid,
    pub part: &'a BoundaryPartition,
    pub z_old: &'a [f64],
    pub z_b: &'a [f64],
    /// Predicted velocities without the pressure gradient.
    pub u_star: &'a [f64],
    pub v_star: &'a [f64],
    /// Pressure-gradient coefficients per face (`0` where the velocity is
    /// fixed).
    pub coeff_u: &'a [f64],
    pub coeff_v: &'a [f64],
    pub params: &'a PressureParams,
    pub dt: f64,
}

/// Jacobian slope of the truncated law. Past the matching point the
/// polynomial branch starts flat, so the left slope at `1 - δ` is used as a
/// floor to keep Newton steps bounded; the residual itself is exact.
fn jacobian_slope(z: f64, p: &PressureParams) -> f64 {
    let a = 1.0 - p.delta;
    if p.delta > 0.0 && z > a {
        dpi_delta_unchecked(z, p).max(dpi_delta_unchecked(a, p))
    } else {
        dpi_delta_unchecked(z, p)
    }
}

#[inline]
fn upwind_old(vel: f64, left: f64, right: f64) -> f64 {
    if vel > 0.0 {
        left
    } else if vel < 0.0 {
        right
    } else {
        0.5 * (left + right)
    }
}

struct Eval {
    u: Vec<f64>,
    v: Vec<f64>,
    residual: Vec<f64>,
    norm: f64,
}

fn velocities(pb: &ImexProblem<'_>, pi: &[f64]) -> (Vec<f64>, Vec<f64>) {
    let g = pb.grid;
    let mut u = pb.u_star.to_vec();
    for j in 0..g.ny {
        for i in 1..g.nx {
            let f = g.uface(i, j);
            if pb.coeff_u[f] != 0.0 {
                u[f] -= pb.coeff_u[f] * (pi[g.cell(i, j)] - pi[g.cell(i - 1, j)]) / g.dx;
            }
        }
    }
    let mut v = pb.v_star.to_vec();
    if g.is_2d() {
        for j in 1..g.ny {
            for i in 0..g.nx {
                let f = g.vface(i, j);
                if pb.coeff_v[f] != 0.0 {
                    v[f] -= pb.coeff_v[f] * (pi[g.cell(i, j)] - pi[g.cell(i, j - 1)]) / g.dy;
                }
            }
        }
    }
    (u, v)
}

fn evaluate(pb: &ImexProblem<'_>, z: &[f64]) -> Eval {
    let g = pb.grid;
    let pi: Vec<f64> = z.iter().map(|&x| pi_delta_unchecked(x, pb.params)).collect();
    let (u, v) = velocities(pb, &pi);
    let fl = super::transport::mass_fluxes(g, pb.z_old, &u, &v, pb.z_b, pb.part);
    let k = pb.dt / g.cell_volume();
    let mut residual = vec![0.0; z.len()];
    let mut norm: f64 = 0.0;
    for j in 0..g.ny {
        for i in 0..g.nx {
            let c = g.cell(i, j);
            let mut div = fl.fu[g.uface(i + 1, j)] - fl.fu[g.uface(i, j)];
            if g.is_2d() {
                div += fl.fv[g.vface(i, j + 1)] - fl.fv[g.vface(i, j)];
            }
            let r = z[c] - pb.z_old[c] + k * div;
            residual[c] = r;
            norm = if r.is_finite() { norm.max(r.abs()) } else { f64::INFINITY };
        }
    }
    Eval { u, v, residual, norm }
}

/// Cell ordering giving the narrowest band: the shorter axis runs fastest.
struct Ordering {
    nx: usize,
    ny: usize,
    transpose: bool,
    bw: usize,
}

impl Ordering {
    fn new(g: &Grid) -> Ordering {
        if !g.is_2d() {
            return Ordering { nx: g.nx, ny: 1, transpose: false, bw: 1 };
        }
        let transpose = g.ny < g.nx;
        Ordering {
            nx: g.nx,
            ny: g.ny,
            transpose,
            bw: g.nx.min(g.ny),
        }
    }

    #[inline]
    fn index(&self, i: usize, j: usize) -> usize {
        if self.transpose {
            j + self.ny * i
        } else {
            i + self.nx * j
        }
    }
}

fn jacobian(pb: &ImexProblem<'_>, z: &[f64], ev: &Eval, ord: &Ordering) -> BandedMatrix {
    let g = pb.grid;
    let n = g.n_cells();
    let k = pb.dt / g.cell_volume();
    let mut jac = BandedMatrix::zeros(n, ord.bw);
    for r in 0..n {
        jac.add(r, r, 1.0);
    }
    let slope: Vec<f64> = z.iter().map(|&x| jacobian_slope(x, pb.params)).collect();
    let area_u = if g.is_2d() { g.dy } else { 1.0 };
    let mut couple = |l: (usize, usize), r: (usize, usize), w: f64| {
        // F = w · (π_R − π_L) enters R_L with + and R_R with −, and w < 0.
        let (cl, cr) = (g.cell(l.0, l.1), g.cell(r.0, r.1));
        let (pl, pr) = (ord.index(l.0, l.1), ord.index(r.0, r.1));
        let dl = -w * slope[cl];
        let dr = w * slope[cr];
        jac.add(pl, pl, k * dl);
        jac.add(pl, pr, k * dr);
        jac.add(pr, pl, -k * dl);
        jac.add(pr, pr, -k * dr);
    };
    for j in 0..g.ny {
        for i in 1..g.nx {
            let f = g.uface(i, j);
            let c = pb.coeff_u[f];
            if c == 0.0 {
                continue;
            }
            let s = upwind_old(ev.u[f], pb.z_old[g.cell(i - 1, j)], pb.z_old[g.cell(i, j)]);
            couple((i - 1, j), (i, j), -area_u * s * c / g.dx);
        }
    }
    if g.is_2d() {
        for j in 1..g.ny {
            for i in 0..g.nx {
                let f = g.vface(i, j);
                let c = pb.coeff_v[f];
                if c == 0.0 {
                    continue;
                }
                let s = upwind_old(ev.v[f], pb.z_old[g.cell(i, j - 1)], pb.z_old[g.cell(i, j)]);
                couple((i, j - 1), (i, j), -g.dx * s * c / g.dy);
            }
        }
    }
    jac
}

/// Newton iteration on `Z` for
/// `Z − Zⁿ + dt/vol · Σ_faces area · u_f(Z) · Zⁿ_up = 0`,
/// `u_f(Z) = u*_f − c_f ∇π_δ(Z)`.
///
/// The Jacobian freezes the upwind choice of each Newton iterate; a
/// backtracking line search keeps the max-norm residual decreasing and
/// `Z` nonnegative.
pub fn imex_pressure_solve(pb: &ImexProblem<'_>, tol: f64, max_iters: usize) -> Result<ImexOutcome> {
    let g = pb.grid;
    let ord = Ordering::new(g);
    let mut z = pb.z_old.to_vec();
    let mut ev = evaluate(pb, &z);
    let mut history = vec![ev.norm];
    let mut iterations = 0;
    while ev.norm >= tol {
        if iterations == max_iters {
            return Err(Error::Newton { halvings: 0, residual: ev.norm });
        }
        iterations += 1;
        let jac = jacobian(pb, &z, &ev, &ord);
        let mut rhs = vec![0.0; z.len()];
        for j in 0..g.ny {
            for i in 0..g.nx {
                rhs[ord.index(i, j)] = -ev.residual[g.cell(i, j)];
            }
        }
        let step = jac.solve(&rhs).map_err(|_| Error::Newton { halvings: 0, residual: ev.norm })?;
        let mut lambda = 1.0;
        let accepted = loop {
            let mut trial = z.clone();
            for j in 0..g.ny {
                for i in 0..g.nx {
                    let c = g.cell(i, j);
                    trial[c] = (z[c] + lambda * step[ord.index(i, j)]).max(0.0);
                }
            }
            let tev = evaluate(pb, &trial);
            if tev.norm <= (1.0 - 1e-4 * lambda) * ev.norm || tev.norm < tol {
                break Some((trial, tev));
            }
            lambda *= 0.5;
            if lambda < 1e-8 {
                break None;
            }
        };
        let Some((trial, tev)) = accepted else {
            return Err(Error::Newton { halvings: 0, residual: ev.norm });
        };
        z = trial;
        ev = tev;
        history.push(ev.norm);
    }
    Ok(ImexOutcome {
        z,
        u: ev.u,
        v: ev.v,
        iterations,
        residual: ev.norm,
        history,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::boundary::classify_boundary;

    fn closed(g: &Grid) -> BoundaryPartition {
        classify_boundary(g, &vec![[0.0, 0.0]; g.boundary_faces().len()])
    }

    #[test]
    fn uniform_state_needs_no_iteration() {
        let g = Grid::new_1d(1.0, 10).unwrap();
        let part = closed(&g);
        let z = vec![0.6; 10];
        let zeros = vec![0.0; 11];
        let coeff = vec![0.3; 11];
        let p = PressureParams::default();
        let pb = ImexProblem {
            grid: &g,
            part: &part,
            z_old: &z,
            z_b: &[0.0, 0.0],
            u_star: &zeros,
            v_star: &[],
            coeff_u: &coeff,
            coeff_v: &[],
            params: &p,
            dt: 0.01,
        };
        let out = imex_pressure_solve(&pb, 1e-12, 20).unwrap();
        assert_eq!(out.iterations, 0);
        assert_eq!(out.z, z);
    }

    #[test]
    fn compression_converges_quadratically() {
        let g = Grid::new_1d(1.0, 20).unwrap();
        let part = closed(&g);
        let z: Vec<f64> = (0..20).map(|c| 0.5 + 0.2 * ((c as f64) / 19.0)).collect();
        let mut us = vec![0.0; 21];
        for (i, u) in us.iter_mut().enumerate().take(20).skip(1) {
            *u = 0.5 * (1.0 - i as f64 / 20.0);
        }
        let mut coeff = vec![0.05; 21];
        coeff[0] = 0.0;
        coeff[20] = 0.0;
        let p = PressureParams::default();
        let pb = ImexProblem {
            grid: &g,
            part: &part,
            z_old: &z,
            z_b: &[0.0, 0.0],
            u_star: &us,
            v_star: &[],
            coeff_u: &coeff,
            coeff_v: &[],
            params: &p,
            dt: 0.02,
        };
        let out = imex_pressure_solve(&pb, 1e-13, 30).unwrap();
        assert!(out.iterations >= 2);
        let h = &out.history;
        // once in the asymptotic regime, r_{k+1} <= C r_k²
        let k = h.len() - 2;
        if h[k] < 1e-3 {
            assert!(h[k + 1] <= 10.0 * h[k] * h[k] + 1e-13, "{h:?}");
        }
        // mass balance in a closed box
        let before: f64 = z.iter().sum();
        let after: f64 = out.z.iter().sum();
        assert!((before - after).abs() < 1e-11);
    }
}
