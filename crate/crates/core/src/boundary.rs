//! Boundary traces, the inflow/outflow partition, and the extension of the
//! boundary velocity into the domain with nonnegative divergence.

use crate::error::{Error, Result};
use crate::grid::{BoundaryFace, Grid, Side};
use crate::linalg;

/// Normal velocities smaller than this are treated as exactly zero.
pub const ZERO_NORMAL_TOL: f64 = 1e-14;
/// Supplied extensions whose divergence dips below this are rejected.
pub const SUPPLIED_DIV_FLOOR: f64 = -1e-8;
const LAYER_CELLS: usize = 3;

/// Boundary traces, one entry per face of [`Grid::boundary_faces`], plus
/// the time-independent forcing velocity at cell centers.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryData {
    pub u_b: Vec<[f64; 2]>,
    pub rho_b: Vec<f64>,
    pub rhostar_b: Vec<f64>,
    pub w: Vec<[f64; 2]>,
}

impl BoundaryData {
    /// Congestion ratio trace `ρ_B / ρ*_B`, defined where `ρ*_B > 0`.
    pub fn z_b(&self) -> Vec<f64> {
        self.rho_b
            .iter()
            .zip(&self.rhostar_b)
            .map(|(r, s)| if *s > 0.0 { r / s } else { 0.0 })
            .collect()
    }

    /// `u_B · n` per boundary face.
    pub fn normal_velocity(&self, faces: &[BoundaryFace]) -> Vec<f64> {
        faces
            .iter()
            .zip(&self.u_b)
            .map(|(f, u)| {
                let n = f.normal();
                let un = u[0] * n[0] + u[1] * n[1];
                if un.abs() < ZERO_NORMAL_TOL {
                    0.0
                } else {
                    un
                }
            })
            .collect()
    }
}

/// Split of the boundary faces into `Γ_in` and `Γ_out`.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryPartition {
    pub faces: Vec<BoundaryFace>,
    /// `u_B · n` per face (after zero snapping).
    pub normal_velocity: Vec<f64>,
    pub inflow: Vec<usize>,
    pub outflow: Vec<usize>,
}

impl BoundaryPartition {
    pub fn is_inflow(&self, k: usize) -> bool {
        self.normal_velocity[k] < 0.0
    }
}

/// A face is inflow iff `u_B · n < 0`; zero normal velocity counts as outflow.
pub fn classify_boundary(grid: &Grid, u_b: &[[f64; 2]]) -> BoundaryPartition {
    let faces = grid.boundary_faces();
    assert_eq!(faces.len(), u_b.len(), "one trace per boundary face");
    let normal_velocity: Vec<f64> = faces
        .iter()
        .zip(u_b)
        .map(|(f, u)| {
            let n = f.normal();
            let un = u[0] * n[0] + u[1] * n[1];
            if un.abs() < ZERO_NORMAL_TOL {
                0.0
            } else {
                un
            }
        })
        .collect();
    let (inflow, outflow): (Vec<usize>, Vec<usize>) =
        (0..faces.len()).partition(|&k| normal_velocity[k] < 0.0);
    BoundaryPartition {
        faces,
        normal_velocity,
        inflow,
        outflow,
    }
}

/// Discrete surface integral `∫_∂Ω u_B · n dS`.
pub fn net_boundary_flux(grid: &Grid, u_b: &[[f64; 2]]) -> f64 {
    let part = classify_boundary(grid, u_b);
    part.faces
        .iter()
        .zip(&part.normal_velocity)
        .map(|(f, un)| un * f.area)
        .sum()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExtensionSource {
    /// Linear interpolation of the two end traces (1D).
    Linear,
    /// Potential flow with a divergence-free wall-layer correction (2D).
    PotentialWithLayer,
    /// Provided by the scenario and only verified here.
    Supplied,
}

impl ExtensionSource {
    pub fn name(self) -> &'static str {
        match self {
            ExtensionSource::Linear => "linear",
            ExtensionSource::PotentialWithLayer => "potential+layer",
            ExtensionSource::Supplied => "supplied",
        }
    }
}

/// Velocity field `u_∞` matching the boundary trace.
#[derive(Debug, Clone, PartialEq)]
pub struct ExtensionField {
    pub u: Vec<f64>,
    pub v: Vec<f64>,
    /// Tangential wall values at boundary nodes used by the viscous
    /// stencil; indexed like [`WallTangents`].
    pub tangents: WallTangents,
    pub source: ExtensionSource,
    /// Largest mismatch between the field's extrapolated wall value and the
    /// prescribed trace.
    pub trace_error: f64,
}

/// Tangential velocity prescribed at the nodes of each wall (2D only).
/// Bottom/top carry `nx + 1` entries (x-velocity at node `i`), left/right
/// carry `ny + 1` entries (y-velocity at node `j`).
#[derive(Debug, Clone, PartialEq, Default)]
pub struct WallTangents {
    pub bottom: Vec<f64>,
    pub top: Vec<f64>,
    pub left: Vec<f64>,
    pub right: Vec<f64>,
}

impl WallTangents {
    /// Node values from face-averaged traces. Corner nodes take the value
    /// of their single adjacent face.
    pub fn from_trace(grid: &Grid, u_b: &[[f64; 2]]) -> WallTangents {
        if !grid.is_2d() {
            return WallTangents::default();
        }
        let faces = grid.boundary_faces();
        let per_side = |side: Side, comp: usize, len: usize| -> Vec<f64> {
            let vals: Vec<f64> = faces
                .iter()
                .zip(u_b)
                .filter(|(f, _)| f.side == side)
                .map(|(_, u)| u[comp])
                .collect();
            (0..=len)
                .map(|k| {
                    if k == 0 {
                        vals[0]
                    } else if k == len {
                        vals[len - 1]
                    } else {
                        0.5 * (vals[k - 1] + vals[k])
                    }
                })
                .collect()
        };
        WallTangents {
            bottom: per_side(Side::Bottom, 0, grid.nx),
            top: per_side(Side::Top, 0, grid.nx),
            left: per_side(Side::Left, 1, grid.ny),
            right: per_side(Side::Right, 1, grid.ny),
        }
    }
}

/// Discrete divergence at cell centers.
pub fn divergence(grid: &Grid, u: &[f64], v: &[f64]) -> Vec<f64> {
    let mut div = vec![0.0; grid.n_cells()];
    for j in 0..grid.ny {
        for i in 0..grid.nx {
            let mut d = (u[grid.uface(i + 1, j)] - u[grid.uface(i, j)]) / grid.dx;
            if grid.is_2d() {
                d += (v[grid.vface(i, j + 1)] - v[grid.vface(i, j)]) / grid.dy;
            }
            div[grid.cell(i, j)] = d;
        }
    }
    div
}

/// Builds `u_∞`. Fails when the net flux is negative.
pub fn build_extension(grid: &Grid, u_b: &[[f64; 2]]) -> Result<ExtensionField> {
    let k = net_boundary_flux(grid, u_b);
    if k < 0.0 {
        return Err(Error::hypothesis(
            "Ass1",
            format!("negative net boundary flux K = {k:.6e}"),
        ));
    }
    if grid.is_2d() {
        build_extension_2d(grid, u_b, k)
    } else {
        let left = u_b[0][0];
        let right = u_b[1][0];
        let u = (0..=grid.nx)
            .map(|i| {
                if i == grid.nx {
                    right
                } else {
                    left + (right - left) * (i as f64 / grid.nx as f64)
                }
            })
            .collect();
        Ok(ExtensionField {
            u,
            v: Vec::new(),
            tangents: WallTangents::default(),
            source: ExtensionSource::Linear,
            trace_error: 0.0,
        })
    }
}

fn build_extension_2d(grid: &Grid, u_b: &[[f64; 2]], k: f64) -> Result<ExtensionField> {
    let (nx, ny, dx, dy) = (grid.nx, grid.ny, grid.dx, grid.dy);
    let source = k / grid.measure();
    let faces = grid.boundary_faces();

    // Boundary normal components go straight into the face arrays.
    let mut u = vec![0.0; grid.n_u()];
    let mut v = vec![0.0; grid.n_v()];
    for (f, ub) in faces.iter().zip(u_b) {
        if f.side.is_x() {
            u[f.face] = ub[0];
        } else {
            v[f.face] = ub[1];
        }
    }

    // Neumann Poisson problem: -div(grad φ) = -(source) - boundary terms.
    let mut rhs = vec![0.0; grid.n_cells()];
    for j in 0..ny {
        for i in 0..nx {
            let c = grid.cell(i, j);
            let mut known = 0.0;
            if i == 0 {
                known -= u[grid.uface(0, j)] / dx;
            }
            if i == nx - 1 {
                known += u[grid.uface(nx, j)] / dx;
            }
            if j == 0 {
                known -= v[grid.vface(i, 0)] / dy;
            }
            if j == ny - 1 {
                known += v[grid.vface(i, ny)] / dy;
            }
            rhs[c] = known - source;
        }
    }
    let mean = rhs.iter().sum::<f64>() / rhs.len() as f64;
    rhs.iter_mut().for_each(|r| *r -= mean);

    let apply = |phi: &[f64], out: &mut [f64]| {
        for j in 0..ny {
            for i in 0..nx {
                let c = grid.cell(i, j);
                let mut acc = 0.0;
                if i > 0 {
                    acc += (phi[c] - phi[c - 1]) / (dx * dx);
                }
                if i + 1 < nx {
                    acc += (phi[c] - phi[c + 1]) / (dx * dx);
                }
                if j > 0 {
                    acc += (phi[c] - phi[c - nx]) / (dy * dy);
                }
                if j + 1 < ny {
                    acc += (phi[c] - phi[c + nx]) / (dy * dy);
                }
                out[c] = acc;
            }
        }
    };
    let mut diag = vec![0.0; grid.n_cells()];
    for j in 0..ny {
        for i in 0..nx {
            let mut d = 0.0;
            if i > 0 {
                d += 1.0 / (dx * dx);
            }
            if i + 1 < nx {
                d += 1.0 / (dx * dx);
            }
            if j > 0 {
                d += 1.0 / (dy * dy);
            }
            if j + 1 < ny {
                d += 1.0 / (dy * dy);
            }
            diag[grid.cell(i, j)] = d;
        }
    }
    let sol = linalg::pcg(apply, &diag, &rhs, vec![0.0; grid.n_cells()], 1e-15, 1e-13, 20 * grid.n_cells())?;
    let phi = sol.x;
    for j in 0..ny {
        for i in 1..nx {
            u[grid.uface(i, j)] = (phi[grid.cell(i, j)] - phi[grid.cell(i - 1, j)]) / dx;
        }
    }
    for j in 1..ny {
        for i in 0..nx {
            v[grid.vface(i, j)] = (phi[grid.cell(i, j)] - phi[grid.cell(i, j - 1)]) / dy;
        }
    }

    let tangents = WallTangents::from_trace(grid, u_b);
    let mut trace_error = tangential_trace_error(grid, &u, &v, &tangents);
    for _ in 0..6 {
        if trace_error < 1e-12 {
            break;
        }
        apply_layer_correction(grid, &mut u, &mut v, &tangents);
        trace_error = tangential_trace_error(grid, &u, &v, &tangents);
    }
    Ok(ExtensionField {
        u,
        v,
        tangents,
        source: ExtensionSource::PotentialWithLayer,
        trace_error,
    })
}

/// Wall mismatches of the linearly extrapolated tangential velocity at the
/// interior wall nodes, as `(side, node, mismatch)`.
fn tangential_mismatch(grid: &Grid, u: &[f64], v: &[f64], t: &WallTangents) -> Vec<(Side, usize, f64)> {
    let (nx, ny) = (grid.nx, grid.ny);
    let mut out = Vec::new();
    for i in 1..nx {
        let e = 1.5 * u[grid.uface(i, 0)] - 0.5 * u[grid.uface(i, 1)];
        out.push((Side::Bottom, i, t.bottom[i] - e));
        let e = 1.5 * u[grid.uface(i, ny - 1)] - 0.5 * u[grid.uface(i, ny - 2)];
        out.push((Side::Top, i, t.top[i] - e));
    }
    for j in 1..ny {
        let e = 1.5 * v[grid.vface(0, j)] - 0.5 * v[grid.vface(1, j)];
        out.push((Side::Left, j, t.left[j] - e));
        let e = 1.5 * v[grid.vface(nx - 1, j)] - 0.5 * v[grid.vface(nx - 2, j)];
        out.push((Side::Right, j, t.right[j] - e));
    }
    out
}

fn tangential_trace_error(grid: &Grid, u: &[f64], v: &[f64], t: &WallTangents) -> f64 {
    tangential_mismatch(grid, u, v, t)
        .into_iter()
        .map(|(_, _, m)| m.abs())
        .fold(0.0, f64::max)
}

/// Adds the discrete curl of a node stream function supported in the
/// three cells next to each wall, away from the corners. The stream function vanishes on every
/// boundary node, so normal fluxes and the divergence are unchanged.
fn apply_layer_correction(grid: &Grid, u: &mut [f64], v: &mut [f64], t: &WallTangents) {
    let (nx, ny, dx, dy) = (grid.nx, grid.ny, grid.dx, grid.dy);
    let node = |k: usize, l: usize| k + (nx + 1) * l;
    let mut psi = vec![0.0; (nx + 1) * (ny + 1)];
    let depth_y = LAYER_CELLS.min(ny / 2);
    let depth_x = LAYER_CELLS.min(nx / 2);
    for (side, idx, m) in tangential_mismatch(grid, u, v, t) {
        // Nodes whose layer would reach into the perpendicular wall's layer
        // are left alone; data there may be incompatible at the corner.
        let len = if side.is_x() { ny } else { nx };
        let reach = if side.is_x() { depth_y } else { depth_x };
        if idx < reach || idx + reach > len {
            continue;
        }
        let bump = 2.0 * m / 3.0;
        match side {
            // u(i, j) = (ψ(i, j+1) - ψ(i, j)) / dy
            Side::Bottom => {
                for l in 1..depth_y {
                    psi[node(idx, l)] += bump * dy;
                }
            }
            Side::Top => {
                for l in 1..depth_y {
                    psi[node(idx, ny - l)] -= bump * dy;
                }
            }
            // v(i, j) = -(ψ(i+1, j) - ψ(i, j)) / dx
            Side::Left => {
                for k in 1..depth_x {
                    psi[node(k, idx)] -= bump * dx;
                }
            }
            Side::Right => {
                for k in 1..depth_x {
                    psi[node(nx - k, idx)] += bump * dx;
                }
            }
        }
    }
    for j in 0..ny {
        for i in 1..nx {
            u[grid.uface(i, j)] += (psi[node(i, j + 1)] - psi[node(i, j)]) / dy;
        }
    }
    for j in 1..ny {
        for i in 0..nx {
            v[grid.vface(i, j)] -= (psi[node(i + 1, j)] - psi[node(i, j)]) / dx;
        }
    }
}

/// Wraps a scenario-supplied `u_∞` after checking its trace and divergence.
pub fn verify_supplied_extension(grid: &Grid, u_b: &[[f64; 2]], u: Vec<f64>, v: Vec<f64>) -> Result<ExtensionField> {
    if u.len() != grid.n_u() || v.len() != grid.n_v() {
        return Err(Error::InvalidParams("supplied extension has the wrong shape".into()));
    }
    let div = divergence(grid, &u, &v);
    let (cell, min) = div
        .iter()
        .enumerate()
        .fold((0, f64::INFINITY), |acc, (c, d)| if *d < acc.1 { (c, *d) } else { acc });
    if min < SUPPLIED_DIV_FLOOR {
        return Err(Error::hypothesis(
            "Lextrem",
            format!("supplied extension has divergence {min:.3e} at cell {cell}"),
        ));
    }
    let faces = grid.boundary_faces();
    let mut trace_error: f64 = 0.0;
    for (f, ub) in faces.iter().zip(u_b) {
        let (have, want) = if f.side.is_x() { (u[f.face], ub[0]) } else { (v[f.face], ub[1]) };
        trace_error = trace_error.max((have - want).abs());
    }
    let tangents = WallTangents::from_trace(grid, u_b);
    if grid.is_2d() {
        trace_error = trace_error.max(tangential_trace_error(grid, &u, &v, &tangents));
    }
    Ok(ExtensionField {
        u,
        v,
        tangents,
        source: ExtensionSource::Supplied,
        trace_error,
    })
}

/// Minimum discrete divergence of `ext` over `region` (cell indices).
pub fn check_interior_divergence_floor(grid: &Grid, ext: &ExtensionField, region: &[usize]) -> f64 {
    let div = divergence(grid, &ext.u, &ext.v);
    region.iter().map(|&c| div[c]).fold(f64::INFINITY, f64::min)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn traces_1d(left: f64, right: f64) -> Vec<[f64; 2]> {
        vec![[left, 0.0], [right, 0.0]]
    }

    #[test]
    fn one_dimensional_classification() {
        let g = Grid::new_1d(1.0, 8).unwrap();
        let p = classify_boundary(&g, &traces_1d(1.0, 1.0));
        assert_eq!(p.inflow, vec![0]);
        assert_eq!(p.outflow, vec![1]);
        let p = classify_boundary(&g, &traces_1d(0.0, 0.0));
        assert!(p.inflow.is_empty());
        assert_eq!(p.outflow, vec![0, 1]);
        let p = classify_boundary(&g, &traces_1d(1e-15, -1e-15));
        assert!(p.inflow.is_empty());
    }

    #[test]
    fn net_flux_examples() {
        let g = Grid::new_1d(1.0, 8).unwrap();
        assert_eq!(net_boundary_flux(&g, &traces_1d(1.0, 1.0)), 0.0);
        assert_eq!(net_boundary_flux(&g, &traces_1d(0.5, 1.0)), 0.5);
        assert_eq!(net_boundary_flux(&g, &traces_1d(1.0, 0.0)), -1.0);
    }

    #[test]
    fn linear_extension_in_1d() {
        let g = Grid::new_1d(1.0, 10).unwrap();
        let ext = build_extension(&g, &traces_1d(1.0, 1.0)).unwrap();
        assert!(ext.u.iter().all(|&u| u == 1.0));
        let ext = build_extension(&g, &traces_1d(0.5, 1.0)).unwrap();
        for (i, u) in ext.u.iter().enumerate() {
            assert!((u - (0.5 + 0.5 * i as f64 / 10.0)).abs() < 1e-15);
        }
        assert_eq!(ext.u[10], 1.0);
        let div = divergence(&g, &ext.u, &ext.v);
        assert!(div.iter().all(|d| (d - 0.5).abs() < 1e-13));
        let all: Vec<usize> = (0..10).collect();
        assert!((check_interior_divergence_floor(&g, &ext, &all) - 0.5).abs() < 1e-13);
        assert!(build_extension(&g, &traces_1d(1.0, 0.0)).is_err());
    }

    #[test]
    fn supplied_extension_with_sink_reports_negative_floor() {
        let g = Grid::new_1d(1.0, 4).unwrap();
        let u = vec![1.0, 1.0, 0.999_999_999_99, 1.0, 1.0];
        let ext = verify_supplied_extension(&g, &traces_1d(1.0, 1.0), u, Vec::new()).unwrap();
        let floor = check_interior_divergence_floor(&g, &ext, &[0, 1, 2, 3]);
        assert!(floor < 0.0);
        let bad = vec![1.0, 1.0, 0.5, 1.0, 1.0];
        assert!(verify_supplied_extension(&g, &traces_1d(1.0, 1.0), bad, Vec::new()).is_err());
    }

    fn channel_traces(g: &Grid, uin: f64, uout: f64) -> Vec<[f64; 2]> {
        g.boundary_faces()
            .iter()
            .map(|f| match f.side {
                Side::Left => [uin, 0.0],
                Side::Right => [uout, 0.0],
                _ => [0.0, 0.0],
            })
            .collect()
    }

    #[test]
    fn channel_extension_in_2d() {
        let g = Grid::new_2d(2.0, 1.0, 24, 12).unwrap();
        let ub = channel_traces(&g, 0.5, 1.0);
        let k = net_boundary_flux(&g, &ub);
        assert!((k - 0.5).abs() < 1e-14);
        let ext = build_extension(&g, &ub).unwrap();
        let div = divergence(&g, &ext.u, &ext.v);
        let target = k / g.measure();
        for d in &div {
            assert!(*d >= -1e-12);
            assert!((d - target).abs() < 1e-9, "div {d} vs {target}");
        }
        // The full-height inflow is incompatible with the no-slip corners,
        // so only wall nodes away from the corners are matched.
        let depth = LAYER_CELLS;
        for (side, idx, m) in tangential_mismatch(&g, &ext.u, &ext.v, &ext.tangents) {
            let len = if side.is_x() { g.ny } else { g.nx };
            if idx >= depth && idx + depth <= len {
                assert!(m.abs() < 1e-10, "{side:?} node {idx}: mismatch {m}");
            }
        }
        assert!(ext.trace_error.is_finite());
        for f in g.boundary_faces() {
            if f.side.is_x() {
                let want = if f.side == Side::Left { 0.5 } else { 1.0 };
                assert_eq!(ext.u[f.face], want);
            } else {
                assert_eq!(ext.v[f.face], 0.0);
            }
        }
    }

    proptest! {
        #[test]
        fn partition_is_exact(vals in proptest::collection::vec(-2.0f64..2.0, 2 * 6 + 2 * 5)) {
            let g = Grid::new_2d(1.2, 1.0, 5, 6).unwrap();
            let ub: Vec<[f64; 2]> = vals.chunks(1).map(|c| [c[0], -c[0]]).collect();
            let p = classify_boundary(&g, &ub);
            let mut all: Vec<usize> = p.inflow.iter().chain(&p.outflow).copied().collect();
            all.sort_unstable();
            prop_assert_eq!(all, (0..ub.len()).collect::<Vec<_>>());
            for &k in &p.inflow { prop_assert!(p.normal_velocity[k] < 0.0); }
            for &k in &p.outflow { prop_assert!(p.normal_velocity[k] >= 0.0); }
        }

        #[test]
        fn flux_matches_volume_integral_of_divergence(a in -1.0f64..1.0, b in -1.0f64..1.0, c in 0.0f64..1.0) {
            let g = Grid::new_2d(1.5, 1.0, 10, 8).unwrap();
            let mut ub = channel_traces(&g, a.min(b), a.max(b) + c);
            for (f, u) in g.boundary_faces().iter().zip(ub.iter_mut()) {
                if f.side == Side::Top { u[1] = 0.1 * c; }
            }
            let k = net_boundary_flux(&g, &ub);
            let ext = build_extension(&g, &ub).unwrap();
            let vol: f64 = divergence(&g, &ext.u, &ext.v).iter().sum::<f64>() * g.cell_volume();
            prop_assert!((vol - k).abs() <= 1e-12 * k.abs().max(1.0));
        }
    }
}
