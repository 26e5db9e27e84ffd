//! Weak residual of the renormalized continuity equation for `b(Z) = Z ln Z`.
//!
//! For a test window `φ(x)` the residual up to time `τ` is
//! `∫ b(Z(τ))φ − ∫ b(Z₀)φ + ∫₀^τ ∫ (div(b(Z)u) + (b′(Z)Z − b(Z)) div u) φ`,
//! with `b′(Z)Z − b(Z) = Z`. Time derivatives telescope exactly over the
//! accepted steps; each step uses the donor-cell flux of `b` at the start
//! of the step with the velocity that transported `Z`.

use crate::boundary::divergence;
use crate::error::{Error, Result};
use crate::grid::Grid;
use crate::solver::State;

fn b(z: f64) -> f64 {
    if z > 0.0 {
        z * z.ln()
    } else {
        0.0
    }
}

/// Tensor-product hat function over `[x0, x1]` (× `[y0, y1]` in 2D).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Window {
    pub x: (f64, f64),
    pub y: Option<(f64, f64)>,
}

fn hat(s: f64, (a, b): (f64, f64)) -> f64 {
    let m = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    (1.0 - (s - m).abs() / h).max(0.0)
}

impl Window {
    /// A centered window spanning the middle three quarters, kept clear of
    /// the boundary cells.
    pub fn centered(grid: &Grid) -> Window {
        let span = |l: f64, h: f64| ((l / 8.0).max(h), (7.0 * l / 8.0).min(l - h));
        Window {
            x: span(grid.lx, grid.dx),
            y: grid.is_2d().then(|| span(grid.ly, grid.dy)),
        }
    }

    /// Cell weights; rejects windows that reach a boundary cell.
    pub fn weights(&self, grid: &Grid) -> Result<Vec<f64>> {
        if !(self.x.0 < self.x.1) || self.y.is_some_and(|(a, b)| !(a < b)) {
            return Err(Error::InvalidParams(format!("empty window {self:?}")));
        }
        let mut w = vec![0.0; grid.n_cells()];
        for (c, wc) in w.iter_mut().enumerate() {
            let [x, y] = grid.cell_center(c);
            let mut v = hat(x, self.x);
            if let Some(wy) = self.y {
                v *= hat(y, wy);
            }
            let (i, j) = grid.cell_ij(c);
            let on_boundary = i == 0 || i + 1 == grid.nx || (grid.is_2d() && (j == 0 || j + 1 == grid.ny));
            if on_boundary && v != 0.0 {
                return Err(Error::InvalidParams(format!(
                    "renormalization window {self:?} touches the boundary"
                )));
            }
            *wc = v;
        }
        Ok(w)
    }
}

#[derive(Debug, Clone)]
pub struct RenormalizedResidual {
    weights: Vec<f64>,
    residual: f64,
    mass: f64,
}

impl RenormalizedResidual {
    pub fn new(grid: &Grid, window: Window) -> Result<RenormalizedResidual> {
        Ok(RenormalizedResidual {
            weights: window.weights(grid)?,
            residual: 0.0,
            mass: 0.0,
        })
    }

    /// Accounts for the step `prev → next` of length `dt`.
    pub fn advance(&mut self, grid: &Grid, prev: &State, next: &State, dt: f64) {
        let vol = grid.cell_volume();
        let bz: Vec<f64> = prev.z.iter().map(|&z| b(z)).collect();
        let div = divergence(grid, &next.u, &next.v);
        let up = |vel: f64, l: f64, r: f64| {
            if vel > 0.0 {
                l
            } else if vel < 0.0 {
                r
            } else {
                0.5 * (l + r)
            }
        };
        let mut acc = 0.0;
        let mut mass = 0.0;
        for c in 0..grid.n_cells() {
            let phi = self.weights[c];
            if phi == 0.0 {
                continue;
            }
            let (i, j) = grid.cell_ij(c);
            let fx = |k: usize| {
                let vel = next.u[grid.uface(k, j)];
                vel * up(vel, bz[grid.cell(k - 1, j)], bz[grid.cell(k, j)])
            };
            let mut flux_div = (fx(i + 1) - fx(i)) / grid.dx;
            if grid.is_2d() {
                let fy = |k: usize| {
                    let vel = next.v[grid.vface(i, k)];
                    vel * up(vel, bz[grid.cell(i, k - 1)], bz[grid.cell(i, k)])
                };
                flux_div += (fy(j + 1) - fy(j)) / grid.dy;
            }
            acc += phi * ((b(next.z[c]) - bz[c]) + dt * (flux_div + prev.z[c] * div[c]));
            mass += phi * dt;
        }
        self.residual += acc * vol;
        self.mass += mass * vol;
    }

    /// Residual normalized by the accumulated window mass `∫₀^τ ∫ φ`.
    pub fn normalized(&self) -> f64 {
        if self.mass > 0.0 {
            self.residual / self.mass
        } else {
            0.0
        }
    }
}
