use crate::boundary::WallTangents;
use crate::error::{Error, Result};
use crate::grid::Grid;
use crate::linalg;

use super::transport::MassFluxes;

/// Faces whose averaged density falls below this are treated as vacuum:
/// their velocity is pinned to `u_∞`.
pub const VACUUM_RHO: f64 = 1e-12;

/// Face densities: mean of the two adjacent cells, or the single adjacent
/// cell on the boundary.
pub fn face_density(grid: &Grid, rho: &[f64]) -> (Vec<f64>, Vec<f64>) {
    let (nx, ny) = (grid.nx, grid.ny);
    let mut ru = vec![0.0; grid.n_u()];
    for j in 0..ny {
        for i in 0..=nx {
            ru[grid.uface(i, j)] = match i {
                0 => rho[grid.cell(0, j)],
                _ if i == nx => rho[grid.cell(nx - 1, j)],
                _ => 0.5 * (rho[grid.cell(i - 1, j)] + rho[grid.cell(i, j)]),
            };
        }
    }
    let mut rv = vec![0.0; grid.n_v()];
    if grid.is_2d() {
        for j in 0..=ny {
            for i in 0..nx {
                rv[grid.vface(i, j)] = match j {
                    0 => rho[grid.cell(i, 0)],
                    _ if j == ny => rho[grid.cell(i, ny - 1)],
                    _ => 0.5 * (rho[grid.cell(i, j - 1)] + rho[grid.cell(i, j)]),
                };
            }
        }
    }
    (ru, rv)
}

/// Discrete gradient of a cell field on interior faces; boundary faces get 0.
pub fn pressure_gradient(grid: &Grid, p: &[f64]) -> (Vec<f64>, Vec<f64>) {
    let mut gu = vec![0.0; grid.n_u()];
    for j in 0..grid.ny {
        for i in 1..grid.nx {
            gu[grid.uface(i, j)] = (p[grid.cell(i, j)] - p[grid.cell(i - 1, j)]) / grid.dx;
        }
    }
    let mut gv = vec![0.0; grid.n_v()];
    if grid.is_2d() {
        for j in 1..grid.ny {
            for i in 0..grid.nx {
                gv[grid.vface(i, j)] = (p[grid.cell(i, j)] - p[grid.cell(i, j - 1)]) / grid.dy;
            }
        }
    }
    (gu, gv)
}

/// `−div S(u)` with `S = μ(∇u + ∇uᵀ) + λ div u I` at interior faces.
///
/// Cell stresses `σ_xx, σ_yy` live at cell centers and the shear stress at
/// grid nodes. Wall nodes use the tangential trace in `tangents` at half a
/// cell distance; pass `None` for homogeneous tangential data. Boundary
/// entries of `out_u`/`out_v` are set to zero.
#[allow(clippy::too_many_arguments)]
pub fn viscous_apply(
    grid: &Grid,
    mu: f64,
    lambda: f64,
    u: &[f64],
    v: &[f64],
    tangents: Option<&WallTangents>,
    out_u: &mut [f64],
    out_v: &mut [f64],
) {
    let (nx, ny, dx, dy) = (grid.nx, grid.ny, grid.dx, grid.dy);
    if !grid.is_2d() {
        let k = (2.0 * mu + lambda) / (dx * dx);
        out_u[0] = 0.0;
        out_u[nx] = 0.0;
        for i in 1..nx {
            out_u[i] = k * (2.0 * u[i] - u[i - 1] - u[i + 1]);
        }
        return;
    }

    let mut sxx = vec![0.0; grid.n_cells()];
    let mut syy = vec![0.0; grid.n_cells()];
    for j in 0..ny {
        for i in 0..nx {
            let ex = (u[grid.uface(i + 1, j)] - u[grid.uface(i, j)]) / dx;
            let ey = (v[grid.vface(i, j + 1)] - v[grid.vface(i, j)]) / dy;
            let c = grid.cell(i, j);
            sxx[c] = 2.0 * mu * ex + lambda * (ex + ey);
            syy[c] = 2.0 * mu * ey + lambda * (ex + ey);
        }
    }
    let node = |i: usize, j: usize| i + (nx + 1) * j;
    let wall = |side: fn(&WallTangents) -> &Vec<f64>, k: usize| tangents.map_or(0.0, |t| side(t)[k]);
    let mut sxy = vec![0.0; (nx + 1) * (ny + 1)];
    for j in 0..=ny {
        for i in 0..=nx {
            let duy = if j == 0 {
                (u[grid.uface(i, 0)] - wall(|t| &t.bottom, i)) / (0.5 * dy)
            } else if j == ny {
                (wall(|t| &t.top, i) - u[grid.uface(i, ny - 1)]) / (0.5 * dy)
            } else {
                (u[grid.uface(i, j)] - u[grid.uface(i, j - 1)]) / dy
            };
            let dvx = if i == 0 {
                (v[grid.vface(0, j)] - wall(|t| &t.left, j)) / (0.5 * dx)
            } else if i == nx {
                (wall(|t| &t.right, j) - v[grid.vface(nx - 1, j)]) / (0.5 * dx)
            } else {
                (v[grid.vface(i, j)] - v[grid.vface(i - 1, j)]) / dx
            };
            sxy[node(i, j)] = mu * (duy + dvx);
        }
    }
    for j in 0..ny {
        for i in 0..=nx {
            let f = grid.uface(i, j);
            out_u[f] = if i == 0 || i == nx {
                0.0
            } else {
                -((sxx[grid.cell(i, j)] - sxx[grid.cell(i - 1, j)]) / dx
                    + (sxy[node(i, j + 1)] - sxy[node(i, j)]) / dy)
            };
        }
    }
    for j in 0..=ny {
        for i in 0..nx {
            let f = grid.vface(i, j);
            out_v[f] = if j == 0 || j == ny {
                0.0
            } else {
                -((sxy[node(i + 1, j)] - sxy[node(i, j)]) / dx
                    + (syy[grid.cell(i, j)] - syy[grid.cell(i, j - 1)]) / dy)
            };
        }
    }
}

/// Inputs of the momentum predictor.
pub struct MomentumInput<'a> {
    pub grid: &'a Grid,
    /// Face densities used as inertia.
    pub rho_u: &'a [f64],
    pub rho_v: &'a [f64],
    /// Primal mass fluxes driving the convection.
    pub fluxes: &'a MassFluxes,
    /// Velocity at the start of the step; boundary entries hold `u_B`.
    pub u: &'a [f64],
    pub v: &'a [f64],
    pub u_inf: &'a [f64],
    pub v_inf: &'a [f64],
    pub tangents: &'a WallTangents,
    pub w_u: &'a [f64],
    pub w_v: &'a [f64],
    pub mu: f64,
    pub lambda: f64,
    pub dt: f64,
    /// Cell pressure to include explicitly, if any.
    pub pressure: Option<&'a [f64]>,
}

/// New face velocities plus, per face, the inverse of the lumped implicit
/// diagonal (`0` on boundary and vacuum faces), which is the coefficient
/// of the pressure gradient in a pressure correction.
#[derive(Debug, Clone)]
pub struct MomentumOutput {
    pub u: Vec<f64>,
    pub v: Vec<f64>,
    pub coeff_u: Vec<f64>,
    pub coeff_v: Vec<f64>,
    pub cg_iterations: usize,
}

/// Solves
/// `ρ_f (u − uⁿ)/dt + conv(u) − div S(u) = ρ_f (w − u) [− ∇π]`
/// on interior faces, with upwind convection whose diagonal is implicit
/// and whose neighbour values are taken from `uⁿ`.
pub fn momentum_step(inp: &MomentumInput<'_>) -> Result<MomentumOutput> {
    let g = inp.grid;
    let (nx, ny) = (g.nx, g.ny);
    let vol = g.cell_volume();
    let nu = g.n_u();
    let nv = g.n_v();
    let fu = &inp.fluxes.fu;
    let fv = &inp.fluxes.fv;
    let t = inp.tangents;

    // diagonal mass term, explicit right-hand side, free-unknown mask
    let mut diag = vec![1.0; nu + nv];
    let mut rhs = vec![0.0; nu + nv];
    let mut free = vec![false; nu + nv];
    let mut fixed = vec![0.0; nu + nv];
    let grad = inp.pressure.map(|p| pressure_gradient(g, p));

    for j in 0..ny {
        for i in 0..=nx {
            let f = g.uface(i, j);
            let rf = inp.rho_u[f];
            if i == 0 || i == nx {
                fixed[f] = inp.u[f];
                continue;
            }
            if rf < VACUUM_RHO {
                fixed[f] = inp.u_inf[f];
                continue;
            }
            let mut conv_diag = 0.0;
            let mut conv_src = 0.0;
            let gl = 0.5 * (fu[g.uface(i - 1, j)] + fu[f]);
            if gl > 0.0 {
                conv_diag += gl;
                conv_src += gl * inp.u[g.uface(i - 1, j)];
            }
            let gr = 0.5 * (fu[f] + fu[g.uface(i + 1, j)]);
            if gr < 0.0 {
                conv_diag -= gr;
                conv_src -= gr * inp.u[g.uface(i + 1, j)];
            }
            if g.is_2d() {
                let hb = 0.5 * (fv[g.vface(i - 1, j)] + fv[g.vface(i, j)]);
                if hb > 0.0 {
                    let nb = if j > 0 { inp.u[g.uface(i, j - 1)] } else { t.bottom[i] };
                    conv_diag += hb;
                    conv_src += hb * nb;
                }
                let ht = 0.5 * (fv[g.vface(i - 1, j + 1)] + fv[g.vface(i, j + 1)]);
                if ht < 0.0 {
                    let nb = if j + 1 < ny { inp.u[g.uface(i, j + 1)] } else { t.top[i] };
                    conv_diag -= ht;
                    conv_src -= ht * nb;
                }
            }
            free[f] = true;
            diag[f] = rf / inp.dt + rf + conv_diag / vol;
            rhs[f] = rf * inp.u[f] / inp.dt + rf * inp.w_u[f] + conv_src / vol;
            if let Some((gu, _)) = &grad {
                rhs[f] -= gu[f];
            }
        }
    }
    if g.is_2d() {
        for j in 0..=ny {
            for i in 0..nx {
                let f = g.vface(i, j);
                let k = nu + f;
                let rf = inp.rho_v[f];
                if j == 0 || j == ny {
                    fixed[k] = inp.v[f];
                    continue;
                }
                if rf < VACUUM_RHO {
                    fixed[k] = inp.v_inf[f];
                    continue;
                }
                let mut conv_diag = 0.0;
                let mut conv_src = 0.0;
                let hb = 0.5 * (fv[g.vface(i, j - 1)] + fv[f]);
                if hb > 0.0 {
                    conv_diag += hb;
                    conv_src += hb * inp.v[g.vface(i, j - 1)];
                }
                let ht = 0.5 * (fv[f] + fv[g.vface(i, j + 1)]);
                if ht < 0.0 {
                    conv_diag -= ht;
                    conv_src -= ht * inp.v[g.vface(i, j + 1)];
                }
                let gl = 0.5 * (fu[g.uface(i, j - 1)] + fu[g.uface(i, j)]);
                if gl > 0.0 {
                    let nb = if i > 0 { inp.v[g.vface(i - 1, j)] } else { t.left[j] };
                    conv_diag += gl;
                    conv_src += gl * nb;
                }
                let gr = 0.5 * (fu[g.uface(i + 1, j - 1)] + fu[g.uface(i + 1, j)]);
                if gr < 0.0 {
                    let nb = if i + 1 < nx { inp.v[g.vface(i + 1, j)] } else { t.right[j] };
                    conv_diag -= gr;
                    conv_src -= gr * nb;
                }
                free[k] = true;
                diag[k] = rf / inp.dt + rf + conv_diag / vol;
                rhs[k] = rf * inp.v[f] / inp.dt + rf * inp.w_v[f] + conv_src / vol;
                if let Some((_, gv)) = &grad {
                    rhs[k] -= gv[f];
                }
            }
        }
    }

    let coeff: Vec<f64> = (0..nu + nv).map(|k| if free[k] { 1.0 / diag[k] } else { 0.0 }).collect();
    let (sol, iterations) = if g.is_2d() {
        solve_2d(inp, &diag, rhs, &free, &fixed)?
    } else {
        (solve_1d(inp, &diag, &rhs, &free, &fixed)?, 0)
    };
    if sol.iter().any(|x| !x.is_finite()) {
        return Err(Error::NonFinite { field: "u" });
    }
    let (u, v) = sol.split_at(nu);
    Ok(MomentumOutput {
        u: u.to_vec(),
        v: v.to_vec(),
        coeff_u: coeff[..nu].to_vec(),
        coeff_v: coeff[nu..].to_vec(),
        cg_iterations: iterations,
    })
}

fn solve_1d(inp: &MomentumInput<'_>, diag: &[f64], rhs: &[f64], free: &[bool], fixed: &[f64]) -> Result<Vec<f64>> {
    let n = inp.grid.n_u();
    let k = (2.0 * inp.mu + inp.lambda) / (inp.grid.dx * inp.grid.dx);
    let mut lo = vec![0.0; n];
    let mut di = vec![1.0; n];
    let mut up = vec![0.0; n];
    let mut b = fixed.to_vec();
    for f in 0..n {
        if free[f] {
            lo[f] = -k;
            up[f] = -k;
            di[f] = diag[f] + 2.0 * k;
            b[f] = rhs[f];
        }
    }
    linalg::thomas(&lo, &di, &up, &b)
}

fn solve_2d(
    inp: &MomentumInput<'_>,
    diag: &[f64],
    mut rhs: Vec<f64>,
    free: &[bool],
    fixed: &[f64],
) -> Result<(Vec<f64>, usize)> {
    let g = inp.grid;
    let nu = g.n_u();
    let n = rhs.len();
    let (mu, lam) = (inp.mu, inp.lambda);

    // lift the known boundary, vacuum and wall-tangent values
    let mut lifted = vec![0.0; n];
    {
        let (ou, ov) = lifted.split_at_mut(nu);
        viscous_apply(g, mu, lam, &fixed[..nu], &fixed[nu..], Some(inp.tangents), ou, ov);
    }
    for k in 0..n {
        rhs[k] = if free[k] { rhs[k] - lifted[k] } else { 0.0 };
    }

    let apply = |x: &[f64], out: &mut [f64]| {
        {
            let (ou, ov) = out.split_at_mut(nu);
            viscous_apply(g, mu, lam, &x[..nu], &x[nu..], None, ou, ov);
        }
        for k in 0..n {
            out[k] = if free[k] { out[k] + diag[k] * x[k] } else { 0.0 };
        }
    };
    let vis_u = 2.0 * (2.0 * mu + lam) / (g.dx * g.dx) + 2.0 * mu / (g.dy * g.dy);
    let vis_v = 2.0 * mu / (g.dx * g.dx) + 2.0 * (2.0 * mu + lam) / (g.dy * g.dy);
    let pre: Vec<f64> = (0..n)
        .map(|k| {
            if !free[k] {
                1.0
            } else if k < nu {
                diag[k] + vis_u
            } else {
                diag[k] + vis_v
            }
        })
        .collect();
    let mut x0 = vec![0.0; n];
    for k in 0..n {
        if free[k] {
            x0[k] = if k < nu { inp.u[k] } else { inp.v[k - nu] };
        }
    }
    let sol = linalg::pcg(apply, &pre, &rhs, x0, 1e-12, 1e-14, 20 * n)?;
    let mut x = sol.x;
    for k in 0..n {
        if !free[k] {
            x[k] = fixed[k];
        }
    }
    Ok((x, sol.iterations))
}
