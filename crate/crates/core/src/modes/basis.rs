use num_complex::Complex64;
use serde::Serialize;

use super::grid::Grid;
use super::mode::{overlap, SampledMode};
use crate::error::{Error, Result};

/// Relative drop tolerance for Gram-Schmidt: an input whose residual after
/// projection falls below `tol * |input|` is treated as linearly dependent.
pub const GRAM_SCHMIDT_TOL: f64 = 1e-10;

/// Orthonormality tolerance attached to bases produced by Gram-Schmidt.
pub const ORTHONORMALIZED_TOL: f64 = 1e-10;

/// Diagnostics carried alongside a basis.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct BasisMetadata {
    pub warnings: Vec<String>,
    /// Largest fraction of a mode's continuous-space norm that falls outside
    /// the sampling window (only known for analytically generated modes).
    pub truncation_residual: Option<f64>,
}

/// Ordered orthonormal set of modes on a common grid.
#[derive(Debug, Clone, PartialEq)]
pub struct ModeBasis {
    modes: Vec<SampledMode>,
    ortho_tol: f64,
    metadata: BasisMetadata,
}

impl ModeBasis {
    /// Validates that all modes share a grid and are orthonormal within `ortho_tol`.
    pub fn new(modes: Vec<SampledMode>, ortho_tol: f64) -> Result<Self> {
        let basis = Self {
            modes,
            ortho_tol,
            metadata: BasisMetadata::default(),
        };
        if let Some(first) = basis.modes.first() {
            for m in &basis.modes[1..] {
                first.grid().ensure_same(m.grid())?;
            }
        }
        let deviation = basis.max_orthonormality_deviation();
        if deviation > ortho_tol {
            return Err(Error::NotOrthonormal {
                deviation,
                tol: ortho_tol,
            });
        }
        Ok(basis)
    }

    pub fn empty() -> Self {
        Self {
            modes: Vec::new(),
            ortho_tol: ORTHONORMALIZED_TOL,
            metadata: BasisMetadata::default(),
        }
    }

    pub(crate) fn with_metadata(mut self, metadata: BasisMetadata) -> Self {
        self.metadata = metadata;
        self
    }

    pub fn modes(&self) -> &[SampledMode] {
        &self.modes
    }

    pub fn mode(&self, i: usize) -> &SampledMode {
        &self.modes[i]
    }

    pub fn len(&self) -> usize {
        self.modes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.modes.is_empty()
    }

    pub fn grid(&self) -> Option<&Grid> {
        self.modes.first().map(|m| m.grid())
    }

    pub fn ortho_tol(&self) -> f64 {
        self.ortho_tol
    }

    pub fn metadata(&self) -> &BasisMetadata {
        &self.metadata
    }

    pub fn into_modes(self) -> Vec<SampledMode> {
        self.modes
    }

    /// `max_{i,j} |<u_i, u_j> - delta_ij|`.
    pub fn max_orthonormality_deviation(&self) -> f64 {
        let mut worst = 0.0_f64;
        for (i, a) in self.modes.iter().enumerate() {
            for (j, b) in self.modes.iter().enumerate().skip(i) {
                let o = overlap(a, b).expect("grids checked at construction");
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((o - target).norm());
            }
        }
        worst
    }

    /// Expansion coefficients `<u_i, w>` of `w` in this basis.
    pub fn coefficients(&self, w: &SampledMode) -> Result<Vec<Complex64>> {
        self.modes.iter().map(|u| overlap(u, w)).collect()
    }

    /// `sum_i c_i u_i`.
    pub fn synthesize(&self, coeffs: &[Complex64]) -> Result<SampledMode> {
        SampledMode::combination(&self.modes, coeffs)
    }

    pub(crate) fn ensure_grid(&self, grid: &Grid) -> Result<()> {
        match self.grid() {
            Some(g) => g.ensure_same(grid),
            None => Ok(()),
        }
    }
}

/// Projects `candidate` off `out` (two passes of modified Gram-Schmidt) and
/// appends the normalized residual when it survives the relative drop test.
fn orthonormalize_into(out: &mut Vec<SampledMode>, candidate: &SampledMode, tol: f64) -> Result<bool> {
    let input_norm = candidate.norm();
    if input_norm == 0.0 {
        return Ok(false);
    }
    let mut v = candidate.clone();
    for _pass in 0..2 {
        for q in out.iter() {
            let c = overlap(q, &v)?;
            v.axpy(-c, q)?;
        }
    }
    let residual = v.norm();
    if residual < tol * input_norm {
        return Ok(false);
    }
    out.push(v.scale(Complex64::new(1.0 / residual, 0.0)));
    Ok(true)
}

/// Orthonormalizes `raw` in order, dropping numerically dependent inputs.
pub fn gram_schmidt(raw: &[SampledMode], tol: f64) -> Result<ModeBasis> {
    gram_schmidt_indexed(raw, tol).map(|(basis, _)| basis)
}

/// Like [`gram_schmidt`], also returning the indices of the inputs that
/// contributed a new direction.
pub fn gram_schmidt_indexed(raw: &[SampledMode], tol: f64) -> Result<(ModeBasis, Vec<usize>)> {
    if let Some(first) = raw.first() {
        for m in &raw[1..] {
            first.grid().ensure_same(m.grid())?;
        }
    }
    let mut out = Vec::with_capacity(raw.len());
    let mut kept = Vec::new();
    for (i, m) in raw.iter().enumerate() {
        if orthonormalize_into(&mut out, m, tol)? {
            kept.push(i);
        }
    }
    Ok((ModeBasis::new(out, ORTHONORMALIZED_TOL)?, kept))
}

/// Result of extending a partial basis from a pool.
#[derive(Debug, Clone)]
pub struct BasisCompletion {
    pub basis: ModeBasis,
    pub requested: usize,
    pub achieved: usize,
}

impl BasisCompletion {
    pub fn rank_deficient(&self) -> bool {
        self.achieved < self.requested
    }
}

/// Extends `partial` with pool members (in pool order) until the basis has
/// `|pool|` elements, or the pool runs out of independent directions.
pub fn complete_basis(partial: &ModeBasis, pool: &ModeBasis) -> Result<BasisCompletion> {
    let target = pool.len().max(partial.len());
    complete_basis_to(partial, pool, target)
}

/// [`complete_basis`] with an explicit target dimension.
pub fn complete_basis_to(
    partial: &ModeBasis,
    pool: &ModeBasis,
    target: usize,
) -> Result<BasisCompletion> {
    if let (Some(a), Some(b)) = (partial.grid(), pool.grid()) {
        a.ensure_same(b)?;
    }
    let mut out: Vec<SampledMode> = partial.modes().to_vec();
    for candidate in pool.modes() {
        if out.len() >= target {
            break;
        }
        orthonormalize_into(&mut out, candidate, GRAM_SCHMIDT_TOL)?;
    }
    let achieved = out.len();
    let tol = partial.ortho_tol().max(ORTHONORMALIZED_TOL);
    Ok(BasisCompletion {
        basis: ModeBasis::new(out, tol)?,
        requested: target,
        achieved,
    })
}
