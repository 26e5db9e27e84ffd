use crate::boundary::divergence;
use crate::grid::Grid;
use crate::pressure::{pi_delta_unchecked, PressureParams};
use crate::solver::State;

/// Default congested-set threshold: cells with `Z ≥ 1 − θ`.
pub const DEFAULT_THETA: f64 = 0.05;

/// Instantaneous complementarity quantities.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct ComplementarityScan {
    /// `∫ π(Z)(1 − Z)`.
    pub pi_one_minus_z: f64,
    /// Fraction of cells with `Z ≥ 1 − θ`.
    pub congested_fraction: f64,
    /// `(∫_{Z ≥ 1−θ} (div u)²)^{1/2}`.
    pub congested_divu_l2: f64,
    /// `∫ ψ π(Z)` on the interior plateau window.
    pub pi_window: f64,
    /// `∫ ψ π(Z) Z`.
    pub pi_z_window: f64,
}

/// Plateau weight: 1 on the middle half, linear ramps to 0 over the outer
/// quarters.
pub fn plateau(s: f64) -> f64 {
    if s <= 0.0 || s >= 1.0 {
        0.0
    } else if s < 0.25 {
        4.0 * s
    } else if s > 0.75 {
        4.0 * (1.0 - s)
    } else {
        1.0
    }
}

/// Tensor-product plateau weight at each cell center.
pub fn window_weights(grid: &Grid) -> Vec<f64> {
    (0..grid.n_cells())
        .map(|c| {
            let [x, y] = grid.cell_center(c);
            let wy = if grid.is_2d() { plateau(y / grid.ly) } else { 1.0 };
            plateau(x / grid.lx) * wy
        })
        .collect()
}

pub fn complementarity_scan(grid: &Grid, state: &State, p: &PressureParams, theta: f64, psi: &[f64]) -> ComplementarityScan {
    let vol = grid.cell_volume();
    let div = divergence(grid, &state.u, &state.v);
    let mut r = ComplementarityScan::default();
    let mut congested = 0usize;
    let mut div2 = 0.0;
    for c in 0..grid.n_cells() {
        let z = state.z[c];
        let pi = pi_delta_unchecked(z, p);
        r.pi_one_minus_z += pi * (1.0 - z) * vol;
        r.pi_window += psi[c] * pi * vol;
        r.pi_z_window += psi[c] * pi * z * vol;
        if z >= 1.0 - theta {
            congested += 1;
            div2 += div[c] * div[c] * vol;
        }
    }
    r.congested_fraction = congested as f64 / grid.n_cells() as f64;
    r.congested_divu_l2 = div2.sqrt();
    r
}
