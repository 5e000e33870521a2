use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Uniform rectangular sampling window centred on the optical axis.
///
/// Cells are stored row-major: cell `(ix, iy)` lives at index `iy * nx + ix`,
/// with `x` increasing along a row and `y` increasing from row to row.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    nx: usize,
    ny: usize,
    width_x: f64,
    width_y: f64,
}

impl Grid {
    pub fn new(nx: usize, ny: usize, width_x: f64, width_y: f64) -> Result<Self> {
        if nx < 2 || ny < 2 {
            return Err(Error::InvalidGrid(format!(
                "need at least 2 samples per axis, got {nx}x{ny}"
            )));
        }
        if !(width_x.is_finite() && width_x > 0.0 && width_y.is_finite() && width_y > 0.0) {
            return Err(Error::InvalidGrid(format!(
                "window extents must be finite and positive, got {width_x} x {width_y}"
            )));
        }
        Ok(Self {
            nx,
            ny,
            width_x,
            width_y,
        })
    }

    /// Square `n x n` grid spanning `[-width/2, width/2]` on both axes.
    pub fn square(n: usize, width: f64) -> Result<Self> {
        Self::new(n, n, width, width)
    }

    pub fn nx(&self) -> usize {
        self.nx
    }

    pub fn ny(&self) -> usize {
        self.ny
    }

    pub fn width_x(&self) -> f64 {
        self.width_x
    }

    pub fn width_y(&self) -> f64 {
        self.width_y
    }

    pub fn len(&self) -> usize {
        self.nx * self.ny
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn dx(&self) -> f64 {
        self.width_x / self.nx as f64
    }

    pub fn dy(&self) -> f64 {
        self.width_y / self.ny as f64
    }

    /// Area of one cell; the weight of the midpoint rule.
    pub fn cell_area(&self) -> f64 {
        self.dx() * self.dy()
    }

    pub fn x(&self, ix: usize) -> f64 {
        -0.5 * self.width_x + (ix as f64 + 0.5) * self.dx()
    }

    pub fn y(&self, iy: usize) -> f64 {
        -0.5 * self.width_y + (iy as f64 + 0.5) * self.dy()
    }

    pub fn index(&self, ix: usize, iy: usize) -> usize {
        iy * self.nx + ix
    }

    /// Cell-centre coordinates in storage order.
    pub fn centers(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        (0..self.ny).flat_map(move |iy| (0..self.nx).map(move |ix| (self.x(ix), self.y(iy))))
    }

    pub(crate) fn ensure_same(&self, other: &Grid) -> Result<()> {
        if self == other {
            Ok(())
        } else {
            Err(Error::GridMismatch(format!(
                "{}x{} over {}x{} vs {}x{} over {}x{}",
                self.nx,
                self.ny,
                self.width_x,
                self.width_y,
                other.nx,
                other.ny,
                other.width_x,
                other.width_y
            )))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cells_tile_the_window() {
        let g = Grid::new(16, 10, 3.0, 2.5).unwrap();
        let total = g.cell_area() * g.len() as f64;
        assert!((total - 7.5).abs() < 1e-12);
        assert!((g.x(0) + 1.5 - 0.5 * g.dx()).abs() < 1e-15);
        assert!((g.x(15) - 1.5 + 0.5 * g.dx()).abs() < 1e-15);
    }

    #[test]
    fn centres_are_symmetric() {
        let g = Grid::square(8, 4.0).unwrap();
        for ix in 0..8 {
            assert!((g.x(ix) + g.x(7 - ix)).abs() < 1e-15);
        }
    }

    #[test]
    fn rejects_bad_grids() {
        assert!(Grid::new(1, 4, 1.0, 1.0).is_err());
        assert!(Grid::new(4, 4, 0.0, 1.0).is_err());
        assert!(Grid::new(4, 4, 1.0, f64::NAN).is_err());
    }
}
