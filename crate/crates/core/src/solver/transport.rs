use crate::boundary::BoundaryPartition;
use crate::error::{Error, Result};
use crate::grid::Grid;

/// Upwind fluxes `area · u · X_up` on every face, signed along the axis.
#[derive(Debug, Clone, PartialEq)]
pub struct MassFluxes {
    pub fu: Vec<f64>,
    pub fv: Vec<f64>,
}

/// Boundary part of one conservative update, as rates (per unit time).
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct BoundaryFlux {
    /// `Σ_in area · (u·n) · X_B`; nonpositive.
    pub inflow: f64,
    /// `Σ_out area · (u·n) · X`; nonnegative unless an outflow face turns
    /// inward.
    pub outflow: f64,
    /// Outflow faces whose actual normal velocity pointed into the domain.
    pub inward_outflow: usize,
}

#[inline]
fn upwind(vel: f64, left: f64, right: f64) -> f64 {
    if vel > 0.0 {
        left
    } else if vel < 0.0 {
        right
    } else {
        0.5 * (left + right)
    }
}

/// Donor-cell fluxes of `field`. Inflow faces take the trace `x_b`,
/// outflow faces the adjacent cell value.
pub fn mass_fluxes(grid: &Grid, field: &[f64], u: &[f64], v: &[f64], x_b: &[f64], part: &BoundaryPartition) -> MassFluxes {
    let (nx, ny) = (grid.nx, grid.ny);
    let area_u = if grid.is_2d() { grid.dy } else { 1.0 };
    let mut fu = vec![0.0; grid.n_u()];
    for j in 0..ny {
        for i in 1..nx {
            let f = grid.uface(i, j);
            let x = upwind(u[f], field[grid.cell(i - 1, j)], field[grid.cell(i, j)]);
            fu[f] = area_u * u[f] * x;
        }
    }
    let mut fv = vec![0.0; grid.n_v()];
    if grid.is_2d() {
        for j in 1..ny {
            for i in 0..nx {
                let f = grid.vface(i, j);
                let x = upwind(v[f], field[grid.cell(i, j - 1)], field[grid.cell(i, j)]);
                fv[f] = grid.dx * v[f] * x;
            }
        }
    }
    for (k, bf) in part.faces.iter().enumerate() {
        let x = if part.is_inflow(k) { x_b[k] } else { field[bf.cell] };
        if bf.side.is_x() {
            fu[bf.face] = bf.area * u[bf.face] * x;
        } else {
            fv[bf.face] = bf.area * v[bf.face] * x;
        }
    }
    MassFluxes { fu, fv }
}

fn boundary_flux(field: &[f64], u: &[f64], v: &[f64], x_b: &[f64], part: &BoundaryPartition) -> BoundaryFlux {
    let mut out = BoundaryFlux::default();
    for (k, bf) in part.faces.iter().enumerate() {
        let vel = if bf.side.is_x() { u[bf.face] } else { v[bf.face] };
        let un = vel * bf.sign();
        if part.is_inflow(k) {
            out.inflow += bf.area * un * x_b[k];
        } else {
            if un < 0.0 {
                out.inward_outflow += 1;
            }
            out.outflow += bf.area * un * field[bf.cell];
        }
    }
    out
}

/// Largest `dt/vol · Σ area · (outgoing normal velocity)` over cells and
/// the cell where it occurs.
fn outflow_number(grid: &Grid, u: &[f64], v: &[f64], dt: f64) -> (f64, usize) {
    let vol = grid.cell_volume();
    let area_u = if grid.is_2d() { grid.dy } else { 1.0 };
    let mut worst = (0.0, 0);
    for j in 0..grid.ny {
        for i in 0..grid.nx {
            let mut out = area_u * ((-u[grid.uface(i, j)]).max(0.0) + u[grid.uface(i + 1, j)].max(0.0));
            if grid.is_2d() {
                out += grid.dx * ((-v[grid.vface(i, j)]).max(0.0) + v[grid.vface(i, j + 1)].max(0.0));
            }
            let num = dt * out / vol;
            if num > worst.0 {
                worst = (num, grid.cell(i, j));
            }
        }
    }
    worst
}

fn inflow_number(grid: &Grid, u: &[f64], v: &[f64], dt: f64) -> (f64, usize) {
    let vol = grid.cell_volume();
    let area_u = if grid.is_2d() { grid.dy } else { 1.0 };
    let mut worst = (0.0, 0);
    for j in 0..grid.ny {
        for i in 0..grid.nx {
            let mut inn = area_u * (u[grid.uface(i, j)].max(0.0) + (-u[grid.uface(i + 1, j)]).max(0.0));
            if grid.is_2d() {
                inn += grid.dx * (v[grid.vface(i, j)].max(0.0) + (-v[grid.vface(i, j + 1)]).max(0.0));
            }
            let num = dt * inn / vol;
            if num > worst.0 {
                worst = (num, grid.cell(i, j));
            }
        }
    }
    worst
}

const CFL_SLACK: f64 = 1e-12;

/// Conservative donor-cell update of `∂_t X + div(X u) = 0` over one step.
///
/// Returns the new field and the boundary flux rates used, so that
/// `Σ X_new vol = Σ X vol − dt (inflow + outflow)` up to round-off.
pub fn advect_conservative(
    grid: &Grid,
    field: &[f64],
    u: &[f64],
    v: &[f64],
    x_b: &[f64],
    part: &BoundaryPartition,
    dt: f64,
) -> Result<(Vec<f64>, BoundaryFlux)> {
    let (number, cell) = outflow_number(grid, u, v, dt);
    if number > 1.0 + CFL_SLACK {
        return Err(Error::Cfl { number, cell });
    }
    let fl = mass_fluxes(grid, field, u, v, x_b, part);
    Ok((apply_fluxes(grid, field, &fl, dt), boundary_flux(field, u, v, x_b, part)))
}

pub(crate) fn apply_fluxes(grid: &Grid, field: &[f64], fl: &MassFluxes, dt: f64) -> Vec<f64> {
    let k = dt / grid.cell_volume();
    let mut out = field.to_vec();
    for j in 0..grid.ny {
        for i in 0..grid.nx {
            let c = grid.cell(i, j);
            let mut div = fl.fu[grid.uface(i + 1, j)] - fl.fu[grid.uface(i, j)];
            if grid.is_2d() {
                div += fl.fv[grid.vface(i, j + 1)] - fl.fv[grid.vface(i, j)];
            }
            out[c] = field[c] - k * div;
        }
    }
    out
}

/// Upwind update of the transport equation `∂_t ρ* + u·∇ρ* = 0`.
///
/// Each face with inward normal velocity `a` contributes
/// `dt/vol · area · a · (ρ*_neighbour − ρ*_cell)`, so constants are kept
/// exactly and the update is a convex combination under the CFL bound.
pub fn advect_nonconservative_rhostar(
    grid: &Grid,
    rhostar: &[f64],
    u: &[f64],
    v: &[f64],
    rhostar_b: &[f64],
    part: &BoundaryPartition,
    dt: f64,
) -> Result<Vec<f64>> {
    let (number, cell) = inflow_number(grid, u, v, dt);
    if number > 1.0 + CFL_SLACK {
        return Err(Error::Cfl { number, cell });
    }
    let (nx, ny) = (grid.nx, grid.ny);
    let k = dt / grid.cell_volume();
    let area_u = if grid.is_2d() { grid.dy } else { 1.0 };
    let mut out = rhostar.to_vec();
    for j in 0..ny {
        for i in 0..nx {
            let c = grid.cell(i, j);
            let here = rhostar[c];
            let mut acc = 0.0;
            if i > 0 {
                let a = u[grid.uface(i, j)];
                if a > 0.0 {
                    acc += area_u * a * (rhostar[grid.cell(i - 1, j)] - here);
                }
            }
            if i + 1 < nx {
                let a = -u[grid.uface(i + 1, j)];
                if a > 0.0 {
                    acc += area_u * a * (rhostar[grid.cell(i + 1, j)] - here);
                }
            }
            if grid.is_2d() {
                if j > 0 {
                    let a = v[grid.vface(i, j)];
                    if a > 0.0 {
                        acc += grid.dx * a * (rhostar[grid.cell(i, j - 1)] - here);
                    }
                }
                if j + 1 < ny {
                    let a = -v[grid.vface(i, j + 1)];
                    if a > 0.0 {
                        acc += grid.dx * a * (rhostar[grid.cell(i, j + 1)] - here);
                    }
                }
            }
            out[c] = here + k * acc;
        }
    }
    for (kf, bf) in part.faces.iter().enumerate() {
        if !part.is_inflow(kf) {
            continue;
        }
        let vel = if bf.side.is_x() { u[bf.face] } else { v[bf.face] };
        let a = -vel * bf.sign();
        if a > 0.0 {
            out[bf.cell] += k * bf.area * a * (rhostar_b[kf] - rhostar[bf.cell]);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::boundary::classify_boundary;

    fn setup(n: usize, speed: f64) -> (Grid, BoundaryPartition, Vec<f64>) {
        let g = Grid::new_1d(1.0, n).unwrap();
        let part = classify_boundary(&g, &[[speed, 0.0], [speed, 0.0]]);
        (g, part, vec![speed; n + 1])
    }

    #[test]
    fn uniform_state_is_fixed() {
        let (g, part, u) = setup(10, 0.7);
        let x = vec![0.3; 10];
        let (out, _) = advect_conservative(&g, &x, &u, &[], &[0.3, 0.3], &part, 0.05).unwrap();
        assert!(out.iter().all(|&v| (v - 0.3).abs() < 1e-15));
    }

    #[test]
    fn telescoping_mass_balance() {
        let (g, part, mut u) = setup(16, 1.0);
        for (i, ui) in u.iter_mut().enumerate().take(16).skip(1) {
            *ui = 1.0 + 0.5 * (i as f64 * 0.7).sin();
        }
        let x: Vec<f64> = (0..16).map(|c| 0.2 + 0.1 * (c as f64).cos()).collect();
        let dt = 0.02;
        let (out, bf) = advect_conservative(&g, &x, &u, &[], &[0.4, 0.0], &part, dt).unwrap();
        let before: f64 = x.iter().sum::<f64>() * g.dx;
        let after: f64 = out.iter().sum::<f64>() * g.dx;
        assert!((after - before + dt * (bf.inflow + bf.outflow)).abs() < 1e-15);
        assert_eq!(bf.inflow, -0.4);
    }

    #[test]
    fn cfl_violation_is_reported() {
        let (g, part, u) = setup(10, 1.0);
        let err = advect_conservative(&g, &[0.1; 10], &u, &[], &[0.1, 0.1], &part, 0.2).unwrap_err();
        assert!(matches!(err, Error::Cfl { .. }));
    }

    #[test]
    fn rhostar_constant_kept_under_compression() {
        let g = Grid::new_1d(1.0, 12).unwrap();
        let u: Vec<f64> = (0..=12).map(|i| 1.0 - 2.0 * i as f64 / 12.0).collect();
        let part = classify_boundary(&g, &[[u[0], 0.0], [u[12], 0.0]]);
        let mut rs = vec![1.0; 12];
        for _ in 0..50 {
            rs = advect_nonconservative_rhostar(&g, &rs, &u, &[], &[1.0, 1.0], &part, 0.03).unwrap();
        }
        assert!(rs.iter().all(|&v| v == 1.0));
    }

    #[test]
    fn rhostar_min_max() {
        let (g, part, u) = setup(20, 1.0);
        let mut rs: Vec<f64> = (0..20).map(|c| 1.0 + c as f64 / 20.0).collect();
        for _ in 0..30 {
            rs = advect_nonconservative_rhostar(&g, &rs, &u, &[], &[1.5, 1.0], &part, 0.04).unwrap();
            assert!(rs.iter().all(|&v| (1.0..=1.95 + 1e-15).contains(&v)));
        }
    }
}
