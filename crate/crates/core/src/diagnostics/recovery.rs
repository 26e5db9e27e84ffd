use crate::grid::Grid;
use crate::solver::State;

/// Cells with `Z` at or below this are excluded from the quotient.
pub const RECOVERY_Z_FLOOR: f64 = 1e-6;

/// Max and L¹ of `|ρ* − ρ/Z|` over cells with `Z > 10⁻⁶`.
///
/// Evaluated as `ρ* |Z − ρ/ρ*| / Z`, which is exactly zero on data
/// initialized with `Z = ρ/ρ*`.
pub fn recovery_check(grid: &Grid, state: &State) -> (f64, f64) {
    let mut max: f64 = 0.0;
    let mut l1 = 0.0;
    for c in 0..grid.n_cells() {
        if state.z[c] > RECOVERY_Z_FLOOR {
            let (rs, z) = (state.rhostar[c], state.z[c]);
            let d = rs * (z - state.rho[c] / rs).abs() / z;
            max = max.max(d);
            l1 += d;
        }
    }
    (max, l1 * grid.cell_volume())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn vacuum_cells_are_skipped() {
        let g = Grid::new_1d(1.0, 4).unwrap();
        let s = State {
            rho: vec![0.5, 0.0, 0.2, 0.3],
            z: vec![0.5, 0.0, 0.1, 0.3],
            rhostar: vec![1.0, 7.0, 2.0, 1.5],
            u: vec![0.0; 5],
            v: vec![],
            t: 0.0,
        };
        let (max, l1) = recovery_check(&g, &s);
        assert!((max - 0.5).abs() < 1e-15);
        assert!((l1 - 0.125).abs() < 1e-15);
    }
}
