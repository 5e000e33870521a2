use num_complex::Complex64;

use super::grid::Grid;
use crate::error::{Error, Result};

/// A transverse field profile sampled at the cell centres of a [`Grid`].
#[derive(Debug, Clone, PartialEq)]
pub struct SampledMode {
    grid: Grid,
    amplitude: Vec<Complex64>,
}

impl SampledMode {
    /// Wraps raw samples without normalizing them.
    pub fn from_samples(grid: Grid, amplitude: Vec<Complex64>) -> Result<Self> {
        if amplitude.len() != grid.len() {
            return Err(Error::DimensionMismatch {
                expected: grid.len(),
                got: amplitude.len(),
                context: "mode samples",
            });
        }
        if amplitude.iter().any(|a| !(a.re.is_finite() && a.im.is_finite())) {
            return Err(Error::InvalidParameter {
                name: "amplitude",
                reason: "non-finite sample".into(),
            });
        }
        Ok(Self { grid, amplitude })
    }

    /// Samples `f(x, y)` at every cell centre. The result is not normalized.
    pub fn from_fn(grid: Grid, f: impl Fn(f64, f64) -> Complex64) -> Result<Self> {
        let amplitude = grid.centers().map(|(x, y)| f(x, y)).collect();
        Self::from_samples(grid, amplitude)
    }

    pub fn zeros(grid: Grid) -> Self {
        Self {
            grid,
            amplitude: vec![Complex64::new(0.0, 0.0); grid.len()],
        }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn amplitude(&self) -> &[Complex64] {
        &self.amplitude
    }

    pub(crate) fn amplitude_mut(&mut self) -> &mut [Complex64] {
        &mut self.amplitude
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitude.iter().map(|a| a.norm_sqr()).sum::<f64>() * self.grid.cell_area()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    /// Rescales to unit norm. Fails on an all-zero profile.
    pub fn normalize(mut self) -> Result<Self> {
        let n = self.norm();
        if n == 0.0 || !n.is_finite() {
            return Err(Error::InvalidParameter {
                name: "mode",
                reason: "cannot normalize a zero profile".into(),
            });
        }
        let inv = 1.0 / n;
        self.amplitude.iter_mut().for_each(|a| *a *= inv);
        Ok(self)
    }

    pub fn scale(mut self, factor: Complex64) -> Self {
        self.amplitude.iter_mut().for_each(|a| *a *= factor);
        self
    }

    /// `self += factor * other` on the shared grid.
    pub fn axpy(&mut self, factor: Complex64, other: &SampledMode) -> Result<()> {
        self.grid.ensure_same(&other.grid)?;
        for (a, b) in self.amplitude.iter_mut().zip(&other.amplitude) {
            *a += factor * b;
        }
        Ok(())
    }

    /// Linear combination `sum_k coeffs[k] * modes[k]`.
    pub fn combination(modes: &[SampledMode], coeffs: &[Complex64]) -> Result<Self> {
        let first = modes.first().ok_or(Error::InvalidParameter {
            name: "modes",
            reason: "empty combination".into(),
        })?;
        if modes.len() != coeffs.len() {
            return Err(Error::DimensionMismatch {
                expected: modes.len(),
                got: coeffs.len(),
                context: "combination coefficients",
            });
        }
        let mut out = SampledMode::zeros(first.grid);
        for (m, c) in modes.iter().zip(coeffs) {
            if *c != Complex64::new(0.0, 0.0) {
                out.axpy(*c, m)?;
            }
        }
        Ok(out)
    }

    /// Mirror image `x -> -x`.
    pub fn flip_x(&self) -> Self {
        let g = self.grid;
        let mut out = self.clone();
        for iy in 0..g.ny() {
            for ix in 0..g.nx() {
                out.amplitude[g.index(ix, iy)] = self.amplitude[g.index(g.nx() - 1 - ix, iy)];
            }
        }
        out
    }

    /// Mirror image `y -> -y`.
    pub fn flip_y(&self) -> Self {
        let g = self.grid;
        let mut out = self.clone();
        for iy in 0..g.ny() {
            for ix in 0..g.nx() {
                out.amplitude[g.index(ix, iy)] = self.amplitude[g.index(ix, g.ny() - 1 - iy)];
            }
        }
        out
    }

    /// Largest cellwise distance to `other`.
    pub fn max_abs_diff(&self, other: &SampledMode) -> Result<f64> {
        self.grid.ensure_same(&other.grid)?;
        Ok(self
            .amplitude
            .iter()
            .zip(&other.amplitude)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max))
    }
}

/// Discrete inner product `sum conj(u) v dA` (midpoint rule).
pub fn overlap(u: &SampledMode, v: &SampledMode) -> Result<Complex64> {
    u.grid.ensure_same(&v.grid)?;
    Ok(raw_overlap(&u.amplitude, &v.amplitude) * u.grid.cell_area())
}

pub(crate) fn raw_overlap(u: &[Complex64], v: &[Complex64]) -> Complex64 {
    u.iter().zip(v).map(|(a, b)| a.conj() * b).sum()
}
