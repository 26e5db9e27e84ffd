//! Uniform staggered (MAC) grids on intervals and axis-aligned rectangles.
//!
//! Scalars live at cell centers. The x-velocity lives on faces normal to
//! x, indexed `i + (nx + 1) * j` with `i = 0..=nx`; the y-velocity lives
//! on faces normal to y, indexed `i + nx * j` with `j = 0..=ny`. A 1D
//! grid is stored as `ny = 1`, `dy = 1` and carries no y-faces.

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    pub dim: usize,
    pub lx: f64,
    pub ly: f64,
    pub nx: usize,
    pub ny: usize,
    pub dx: f64,
    pub dy: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Side {
    Left,
    Right,
    Bottom,
    Top,
}

impl Side {
    pub const ALL: [Side; 4] = [Side::Left, Side::Right, Side::Bottom, Side::Top];

    /// Outward unit normal.
    pub fn normal(self) -> [f64; 2] {
        match self {
            Side::Left => [-1.0, 0.0],
            Side::Right => [1.0, 0.0],
            Side::Bottom => [0.0, -1.0],
            Side::Top => [0.0, 1.0],
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Side::Left => "left",
            Side::Right => "right",
            Side::Bottom => "bottom",
            Side::Top => "top",
        }
    }

    pub fn from_name(s: &str) -> Option<Side> {
        Side::ALL.into_iter().find(|side| side.name() == s)
    }

    /// True for sides whose normal is along x.
    pub fn is_x(self) -> bool {
        matches!(self, Side::Left | Side::Right)
    }
}

/// One boundary face of the mesh.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundaryFace {
    pub side: Side,
    /// Position along the side (j for left/right, i for bottom/top).
    pub along: usize,
    /// Adjacent interior cell.
    pub cell: usize,
    /// Index into the u-face array (left/right) or v-face array (bottom/top).
    pub face: usize,
    pub area: f64,
    /// Face midpoint.
    pub center: [f64; 2],
}

impl BoundaryFace {
    pub fn normal(&self) -> [f64; 2] {
        self.side.normal()
    }

    /// Signed outward sign along the face's own axis.
    pub fn sign(&self) -> f64 {
        match self.side {
            Side::Left | Side::Bottom => -1.0,
            Side::Right | Side::Top => 1.0,
        }
    }
}

impl Grid {
    pub fn new_1d(lx: f64, nx: usize) -> Result<Grid> {
        if nx < 4 {
            return Err(Error::InvalidParams(format!("need at least 4 cells, got {nx}")));
        }
        if !(lx > 0.0) {
            return Err(Error::InvalidParams(format!("length must be positive, got {lx}")));
        }
        Ok(Grid {
            dim: 1,
            lx,
            ly: 1.0,
            nx,
            ny: 1,
            dx: lx / nx as f64,
            dy: 1.0,
        })
    }

    pub fn new_2d(lx: f64, ly: f64, nx: usize, ny: usize) -> Result<Grid> {
        if nx < 4 || ny < 4 {
            return Err(Error::InvalidParams(format!(
                "need at least 4 cells per axis, got {nx}x{ny}"
            )));
        }
        if !(lx > 0.0 && ly > 0.0) {
            return Err(Error::InvalidParams("lengths must be positive".to_string()));
        }
        Ok(Grid {
            dim: 2,
            lx,
            ly,
            nx,
            ny,
            dx: lx / nx as f64,
            dy: ly / ny as f64,
        })
    }

    pub fn is_2d(&self) -> bool {
        self.dim == 2
    }

    pub fn n_cells(&self) -> usize {
        self.nx * self.ny
    }

    pub fn n_u(&self) -> usize {
        (self.nx + 1) * self.ny
    }

    pub fn n_v(&self) -> usize {
        if self.is_2d() {
            self.nx * (self.ny + 1)
        } else {
            0
        }
    }

    #[inline]
    pub fn cell(&self, i: usize, j: usize) -> usize {
        i + self.nx * j
    }

    #[inline]
    pub fn uface(&self, i: usize, j: usize) -> usize {
        i + (self.nx + 1) * j
    }

    #[inline]
    pub fn vface(&self, i: usize, j: usize) -> usize {
        i + self.nx * j
    }

    pub fn cell_ij(&self, c: usize) -> (usize, usize) {
        (c % self.nx, c / self.nx)
    }

    pub fn cell_volume(&self) -> f64 {
        self.dx * self.dy
    }

    pub fn measure(&self) -> f64 {
        self.lx * self.ly
    }

    pub fn cell_center(&self, c: usize) -> [f64; 2] {
        let (i, j) = self.cell_ij(c);
        let y = if self.is_2d() { (j as f64 + 0.5) * self.dy } else { 0.0 };
        [(i as f64 + 0.5) * self.dx, y]
    }

    pub fn uface_center(&self, i: usize, j: usize) -> [f64; 2] {
        let y = if self.is_2d() { (j as f64 + 0.5) * self.dy } else { 0.0 };
        [i as f64 * self.dx, y]
    }

    pub fn vface_center(&self, i: usize, j: usize) -> [f64; 2] {
        [(i as f64 + 0.5) * self.dx, j as f64 * self.dy]
    }

    /// All boundary faces, ordered left, right, bottom, top.
    pub fn boundary_faces(&self) -> Vec<BoundaryFace> {
        let mut out = Vec::new();
        let area_x = if self.is_2d() { self.dy } else { 1.0 };
        for j in 0..self.ny {
            out.push(BoundaryFace {
                side: Side::Left,
                along: j,
                cell: self.cell(0, j),
                face: self.uface(0, j),
                area: area_x,
                center: self.uface_center(0, j),
            });
        }
        for j in 0..self.ny {
            out.push(BoundaryFace {
                side: Side::Right,
                along: j,
                cell: self.cell(self.nx - 1, j),
                face: self.uface(self.nx, j),
                area: area_x,
                center: self.uface_center(self.nx, j),
            });
        }
        if self.is_2d() {
            for i in 0..self.nx {
                out.push(BoundaryFace {
                    side: Side::Bottom,
                    along: i,
                    cell: self.cell(i, 0),
                    face: self.vface(i, 0),
                    area: self.dx,
                    center: self.vface_center(i, 0),
                });
            }
            for i in 0..self.nx {
                out.push(BoundaryFace {
                    side: Side::Top,
                    along: i,
                    cell: self.cell(i, self.ny - 1),
                    face: self.vface(i, self.ny),
                    area: self.dx,
                    center: self.vface_center(i, self.ny),
                });
            }
        }
        out
    }

    /// True if the u-face is on the domain boundary.
    #[inline]
    pub fn u_is_boundary(&self, i: usize) -> bool {
        i == 0 || i == self.nx
    }

    #[inline]
    pub fn v_is_boundary(&self, j: usize) -> bool {
        j == 0 || j == self.ny
    }

    pub fn same_shape(&self, other: &Grid) -> bool {
        self.dim == other.dim && self.nx == other.nx && self.ny == other.ny && self.lx == other.lx && self.ly == other.ly
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spacing_is_exact_quotient() {
        let g = Grid::new_2d(2.0, 1.0, 64, 32).unwrap();
        assert_eq!(g.dx, 2.0 / 64.0);
        assert_eq!(g.dy, 1.0 / 32.0);
        assert_eq!(g.n_u(), 65 * 32);
        assert_eq!(g.n_v(), 64 * 33);
        assert_eq!(g.boundary_faces().len(), 2 * 32 + 2 * 64);
    }

    #[test]
    fn one_dimensional_layout() {
        let g = Grid::new_1d(1.0, 10).unwrap();
        assert_eq!(g.n_u(), 11);
        assert_eq!(g.n_v(), 0);
        let b = g.boundary_faces();
        assert_eq!(b.len(), 2);
        assert_eq!(b[0].face, 0);
        assert_eq!(b[1].face, 10);
        assert_eq!(b[1].cell, 9);
    }

    #[test]
    fn too_few_cells_rejected() {
        assert!(Grid::new_1d(1.0, 3).is_err());
        assert!(Grid::new_2d(1.0, 1.0, 8, 3).is_err());
    }
}
