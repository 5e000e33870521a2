use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::modes::export::Greymap;
use crate::modes::Grid;

/// Named pixel partitions of the window.
///
/// Pixel labels: `half_x` 0 = `x < 0`, 1 = `x >= 0`; `half_y` likewise in `y`;
/// `quadrants` `2 * [y >= 0] + [x >= 0]`; `annulus` 0 = `rho < r1`,
/// 1 = `r1 <= rho < r2`, 2 = outside.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum LayoutPrimitive {
    HalfX,
    HalfY,
    Quadrants,
    Annulus { r1: f64, r2: f64 },
}

impl LayoutPrimitive {
    pub fn pixel_count(&self) -> usize {
        match self {
            LayoutPrimitive::HalfX | LayoutPrimitive::HalfY => 2,
            LayoutPrimitive::Quadrants => 4,
            LayoutPrimitive::Annulus { .. } => 3,
        }
    }

    fn label(&self, x: f64, y: f64) -> usize {
        match *self {
            LayoutPrimitive::HalfX => usize::from(x >= 0.0),
            LayoutPrimitive::HalfY => usize::from(y >= 0.0),
            LayoutPrimitive::Quadrants => 2 * usize::from(y >= 0.0) + usize::from(x >= 0.0),
            LayoutPrimitive::Annulus { r1, r2 } => {
                let rho = x.hypot(y);
                if rho < r1 {
                    0
                } else if rho < r2 {
                    1
                } else {
                    2
                }
            }
        }
    }
}

/// Disjoint cell-aligned pixels covering the grid, each with a real gain.
#[derive(Debug, Clone, PartialEq)]
pub struct PixelLayout {
    grid: Grid,
    pixel_of_cell: Vec<usize>,
    gains: Vec<f64>,
}

impl PixelLayout {
    /// Every cell must carry a label below `gains.len()`; gains must be finite.
    /// All-zero gains are accepted here and reported as degenerate by the
    /// measurement routines.
    pub fn new(grid: Grid, pixel_of_cell: Vec<usize>, gains: Vec<f64>) -> Result<Self> {
        if pixel_of_cell.len() != grid.len() {
            return Err(Error::DimensionMismatch {
                expected: grid.len(),
                got: pixel_of_cell.len(),
                context: "pixel labels per cell",
            });
        }
        if gains.is_empty() {
            return Err(Error::InvalidParameter {
                name: "gains",
                reason: "at least one pixel is required".into(),
            });
        }
        if let Some(bad) = pixel_of_cell.iter().find(|&&p| p >= gains.len()) {
            return Err(Error::InvalidParameter {
                name: "gains",
                reason: format!("pixel label {bad} has no gain ({} given)", gains.len()),
            });
        }
        if gains.iter().any(|g| !g.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "gains",
                reason: "non-finite gain".into(),
            });
        }
        Ok(Self {
            grid,
            pixel_of_cell,
            gains,
        })
    }

    pub fn from_primitive(grid: Grid, primitive: LayoutPrimitive, gains: Vec<f64>) -> Result<Self> {
        if let LayoutPrimitive::Annulus { r1, r2 } = primitive {
            if !(r1.is_finite() && r2.is_finite() && 0.0 < r1 && r1 < r2) {
                return Err(Error::InvalidParameter {
                    name: "annulus",
                    reason: format!("need 0 < r1 < r2, got r1 = {r1}, r2 = {r2}"),
                });
            }
        }
        if gains.len() != primitive.pixel_count() {
            return Err(Error::DimensionMismatch {
                expected: primitive.pixel_count(),
                got: gains.len(),
                context: "gains for layout primitive",
            });
        }
        let labels = grid.centers().map(|(x, y)| primitive.label(x, y)).collect();
        Self::new(grid, labels, gains)
    }

    pub fn half_x(grid: Grid, gains: [f64; 2]) -> Result<Self> {
        Self::from_primitive(grid, LayoutPrimitive::HalfX, gains.to_vec())
    }

    pub fn half_y(grid: Grid, gains: [f64; 2]) -> Result<Self> {
        Self::from_primitive(grid, LayoutPrimitive::HalfY, gains.to_vec())
    }

    pub fn quadrants(grid: Grid, gains: [f64; 4]) -> Result<Self> {
        Self::from_primitive(grid, LayoutPrimitive::Quadrants, gains.to_vec())
    }

    /// `kx x ky` array of equal rectangular pixels, labelled row-major.
    pub fn pixel_array(grid: Grid, kx: usize, ky: usize, gains: Vec<f64>) -> Result<Self> {
        if kx == 0 || ky == 0 || kx > grid.nx() || ky > grid.ny() {
            return Err(Error::InvalidParameter {
                name: "pixel_array",
                reason: format!("{kx}x{ky} pixels do not fit a {}x{} grid", grid.nx(), grid.ny()),
            });
        }
        let mut labels = Vec::with_capacity(grid.len());
        for iy in 0..grid.ny() {
            for ix in 0..grid.nx() {
                let px = ix * kx / grid.nx();
                let py = iy * ky / grid.ny();
                labels.push(py * kx + px);
            }
        }
        Self::new(grid, labels, gains)
    }

    /// Labels from a greymap whose raster rows follow the grid's storage rows.
    pub fn from_label_image(grid: Grid, image: &Greymap, gains: Vec<f64>) -> Result<Self> {
        if image.width != grid.nx() || image.height != grid.ny() {
            return Err(Error::DimensionMismatch {
                expected: grid.len(),
                got: image.width * image.height,
                context: "label image size",
            });
        }
        Self::new(grid, image.values.iter().map(|&v| v as usize).collect(), gains)
    }

    pub fn with_gains(&self, gains: Vec<f64>) -> Result<Self> {
        Self::new(self.grid, self.pixel_of_cell.clone(), gains)
    }

    /// All gains multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> Result<Self> {
        self.with_gains(self.gains.iter().map(|g| g * factor).collect())
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn gains(&self) -> &[f64] {
        &self.gains
    }

    pub fn pixel_of_cell(&self) -> &[usize] {
        &self.pixel_of_cell
    }

    pub fn n_pixels(&self) -> usize {
        self.gains.len()
    }

    /// Gain seen by each cell.
    pub fn cell_gains(&self) -> Vec<f64> {
        self.pixel_of_cell.iter().map(|&p| self.gains[p]).collect()
    }

    pub fn has_nonzero_gain(&self) -> bool {
        self.gains.iter().any(|&g| g != 0.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn half_planes_split_evenly() {
        let g = Grid::square(8, 2.0).unwrap();
        let l = PixelLayout::half_x(g, [1.0, -1.0]).unwrap();
        let right = l.pixel_of_cell().iter().filter(|&&p| p == 1).count();
        assert_eq!(right, 32);
        assert_eq!(l.pixel_of_cell()[g.index(0, 3)], 0);
        assert_eq!(l.pixel_of_cell()[g.index(7, 3)], 1);
    }

    #[test]
    fn quadrant_labels() {
        let g = Grid::square(4, 2.0).unwrap();
        let l = PixelLayout::quadrants(g, [1.0, 2.0, 3.0, 4.0]).unwrap();
        assert_eq!(l.pixel_of_cell()[g.index(0, 0)], 0);
        assert_eq!(l.pixel_of_cell()[g.index(3, 0)], 1);
        assert_eq!(l.pixel_of_cell()[g.index(0, 3)], 2);
        assert_eq!(l.pixel_of_cell()[g.index(3, 3)], 3);
    }

    #[test]
    fn annulus_rings() {
        let g = Grid::square(64, 8.0).unwrap();
        let l = PixelLayout::from_primitive(
            g,
            LayoutPrimitive::Annulus { r1: 1.0, r2: 2.0 },
            vec![1.0, -1.0, 0.0],
        )
        .unwrap();
        let c = g.index(32, 32);
        assert_eq!(l.pixel_of_cell()[c], 0);
        assert_eq!(l.pixel_of_cell()[0], 2);
        assert!(LayoutPrimitive::Annulus { r1: 2.0, r2: 1.0 }.pixel_count() == 3);
        assert!(PixelLayout::from_primitive(
            g,
            LayoutPrimitive::Annulus { r1: 2.0, r2: 1.0 },
            vec![0.0; 3]
        )
        .is_err());
    }

    #[test]
    fn wrong_gain_count_rejected() {
        let g = Grid::square(4, 1.0).unwrap();
        assert!(PixelLayout::from_primitive(g, LayoutPrimitive::Quadrants, vec![1.0]).is_err());
        assert!(PixelLayout::new(g, vec![0; 15], vec![1.0]).is_err());
        assert!(PixelLayout::new(g, vec![1; 16], vec![1.0]).is_err());
        assert!(PixelLayout::new(g, vec![0; 16], vec![f64::NAN]).is_err());
    }

    #[test]
    fn primitive_config_forms() {
        let p: LayoutPrimitive = serde_json::from_str("\"half_x\"").unwrap();
        assert_eq!(p, LayoutPrimitive::HalfX);
        let a: LayoutPrimitive = serde_json::from_str(r#"{"annulus": {"r1": 1, "r2": 2}}"#).unwrap();
        assert_eq!(a, LayoutPrimitive::Annulus { r1: 1.0, r2: 2.0 });
    }
}
