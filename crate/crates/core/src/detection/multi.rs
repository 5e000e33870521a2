use super::layout::PixelLayout;
use super::mode::detection_mode;
use super::variance::{variance_direct, MeasurementReport};
use crate::error::{Error, Result};
use crate::linalg::c;
use crate::modes::{complete_basis, gram_schmidt_indexed, ModeBasis, SampledMode, GRAM_SCHMIDT_TOL};
use crate::state::{make_state, GaussianState, SqueezerSpec, RANK_TOL};

/// Squeezing plan for several simultaneous difference measurements.
#[derive(Debug, Clone)]
pub struct MultiMeasurementPlan {
    /// `{v0, orthonormalized flipped modes, completion from the pool}`.
    pub basis: ModeBasis,
    /// Coherent amplitude `sqrt(N0)` in `v0`, squeezed vacuum in every
    /// flipped-subspace mode, vacuum elsewhere.
    pub state: GaussianState,
    pub reports: Vec<MeasurementReport>,
    /// Number of independent flipped modes.
    pub rank: usize,
    /// Layouts whose flipped mode added a new direction.
    pub independent_layouts: Vec<usize>,
    pub dependent_layouts: bool,
    pub degree: usize,
}

/// Builds the basis and state that squeeze every flipped mode of `layouts`
/// at once, then reports each measurement.
pub fn multi_measurement_plan(
    v0: &SampledMode,
    n0: f64,
    layouts: &[PixelLayout],
    r: f64,
    pool: &ModeBasis,
) -> Result<MultiMeasurementPlan> {
    if layouts.is_empty() {
        return Err(Error::InvalidParameter {
            name: "layouts",
            reason: "at least one measurement is required".into(),
        });
    }
    if !(n0.is_finite() && n0 > 0.0) {
        return Err(Error::ZeroMeanField);
    }
    let v0 = v0.clone().normalize()?;
    let mut flipped = Vec::with_capacity(layouts.len());
    for (index, layout) in layouts.iter().enumerate() {
        let dm = detection_mode(&v0, layout)?;
        if !dm.is_difference {
            return Err(Error::NotDifference {
                index,
                overlap: dm.overlap_with_v0.norm(),
            });
        }
        flipped.push(dm.w1);
    }
    let (subspace, independent_layouts) = gram_schmidt_indexed(&flipped, GRAM_SCHMIDT_TOL)?;
    let rank = subspace.len();

    let mut partial_modes = vec![v0];
    partial_modes.extend(subspace.into_modes());
    let partial = ModeBasis::new(partial_modes, 1e-8)?;
    let basis = complete_basis(&partial, pool)?.basis;

    let squeezers: Vec<SqueezerSpec> = (1..=rank).map(|k| SqueezerSpec::new(k, r, 0.0)).collect();
    let state = make_state(basis.len(), &[(0, c(n0.sqrt(), 0.0))], &squeezers)?;
    let reports = layouts
        .iter()
        .map(|l| variance_direct(&state, &basis, l))
        .collect::<Result<Vec<_>>>()?;
    let degree = state.degree(RANK_TOL);
    Ok(MultiMeasurementPlan {
        basis,
        state,
        reports,
        rank,
        dependent_layouts: independent_layouts.len() < layouts.len(),
        independent_layouts,
        degree,
    })
}
