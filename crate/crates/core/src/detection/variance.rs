//! Mean and variance of a linear pixel measurement `N_sigma = sum_j sigma_j N(D_j)`
//! in the linearized-fluctuation regime.
//!
//! Two independent routes are provided. [`variance_direct`] works in the
//! caller's basis from the partial overlap coefficients `C_i` and the state's
//! normally and anomalously ordered correlators. [`variance_via_detection_mode`]
//! builds a basis containing the detection mode `w1`, rewrites the state in it
//! and reads off `f^2 N0 Var(X_w1)`. Agreement of the two is the main
//! regression check of the crate.

use num_complex::Complex64;
use serde::Serialize;

use super::layout::PixelLayout;
use super::mode::{detection_mode, DetectionMode};
use crate::error::{Error, Result};
use crate::linalg::{c, CMatrix};
use crate::modes::{
    complete_basis_to, overlap, ModeBasis, SampledMode, GRAM_SCHMIDT_TOL,
};
use crate::state::{check_dims, mean_field_mode, GaussianState};

/// Below this photon number the linearization is flagged as questionable.
pub const LINEARIZATION_MIN_N0: f64 = 100.0;

/// Relative tolerance for agreement of the two variance routes.
pub const DUAL_PATH_TOL: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq)]
pub struct MeasurementReport {
    /// Mean signal in photons per exposure.
    pub mean: f64,
    pub variance: f64,
    /// Coherent-state reference `f^2 N0`.
    pub shot_noise: f64,
    pub sql_ratio: f64,
    pub n0: f64,
    pub detection_mode: DetectionMode,
    pub linearization_valid: bool,
}

impl MeasurementReport {
    pub fn summary(&self) -> ReportSummary {
        ReportSummary {
            mean: self.mean,
            variance: self.variance,
            shot_noise: self.shot_noise,
            sql_ratio: self.sql_ratio,
            f: self.detection_mode.f,
            is_difference: self.detection_mode.is_difference,
            n0: self.n0,
            linearization_valid: self.linearization_valid,
        }
    }
}

/// Serializable scalar part of a [`MeasurementReport`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReportSummary {
    pub mean: f64,
    pub variance: f64,
    pub shot_noise: f64,
    pub sql_ratio: f64,
    pub f: f64,
    pub is_difference: bool,
    pub n0: f64,
    pub linearization_valid: bool,
}

fn check_layout(basis: &ModeBasis, layout: &PixelLayout) -> Result<()> {
    basis.ensure_grid(layout.grid())
}

/// `A_psi = sum_k <a_k> u_k` sampled on the grid.
fn mean_field(state: &GaussianState, basis: &ModeBasis) -> Result<SampledMode> {
    let coeffs: Vec<Complex64> = state.mean().iter().copied().collect();
    basis.synthesize(&coeffs)
}

/// Generalized overlap coefficients `C_i = sum_j sigma_j int_{D_j} conj(u_i) A_psi`.
pub fn overlap_coefficients(
    state: &GaussianState,
    basis: &ModeBasis,
    layout: &PixelLayout,
) -> Result<Vec<Complex64>> {
    check_dims(state, basis)?;
    check_layout(basis, layout)?;
    if state.n0() <= 0.0 {
        return Err(Error::ZeroMeanField);
    }
    let field = mean_field(state, basis)?;
    weighted_coefficients(basis, &field, layout)
}

fn weighted_coefficients(
    basis: &ModeBasis,
    field: &SampledMode,
    layout: &PixelLayout,
) -> Result<Vec<Complex64>> {
    let gains = layout.cell_gains();
    let weighted: Vec<Complex64> = field
        .amplitude()
        .iter()
        .zip(&gains)
        .map(|(a, s)| a * s)
        .collect();
    let da = field.grid().cell_area();
    Ok(basis
        .modes()
        .iter()
        .map(|u| {
            u.amplitude()
                .iter()
                .zip(&weighted)
                .map(|(x, y)| x.conj() * y)
                .sum::<Complex64>()
                * da
        })
        .collect())
}

fn build_report(
    mean: f64,
    variance: f64,
    n0: f64,
    detection_mode: DetectionMode,
) -> MeasurementReport {
    let shot_noise = detection_mode.f * detection_mode.f * n0;
    MeasurementReport {
        mean,
        variance,
        shot_noise,
        sql_ratio: variance / shot_noise,
        n0,
        detection_mode,
        linearization_valid: n0 >= LINEARIZATION_MIN_N0,
    }
}

/// Variance from the overlap coefficients in the caller's basis:
///
/// `Var = sum |C_i|^2 + 2 Re sum_ij [ conj(M_ij) C_i C_j + N_ij C_i conj(C_j) ]`
///
/// with `N_ij = <da_i^dag da_j>` and `M_ij = <da_i da_j>`. Modes outside the
/// basis are vacuum, so `sum |C_i|^2` over a complete basis is evaluated
/// directly as `sum_cells sigma^2 |A_psi|^2 dA`.
pub fn variance_direct(
    state: &GaussianState,
    basis: &ModeBasis,
    layout: &PixelLayout,
) -> Result<MeasurementReport> {
    check_dims(state, basis)?;
    check_layout(basis, layout)?;
    let (v0, n0) = mean_field_mode(state, basis)?;
    let dm = detection_mode(&v0, layout)?;

    let field = mean_field(state, basis)?;
    let coeffs = weighted_coefficients(basis, &field, layout)?;
    let gains = layout.cell_gains();
    let da = field.grid().cell_area();
    let (mut mean, mut shot) = (0.0, 0.0);
    for (a, s) in field.amplitude().iter().zip(&gains) {
        let intensity = a.norm_sqr();
        mean += s * intensity;
        shot += s * s * intensity;
    }
    mean *= da;
    shot *= da;

    let normal = state.normal_correlations();
    let anomalous = state.anomalous_correlations();
    let n = state.dim();
    let mut excess = c(0.0, 0.0);
    for i in 0..n {
        for j in 0..n {
            excess += anomalous[(i, j)].conj() * coeffs[i] * coeffs[j]
                + normal[(i, j)] * coeffs[i] * coeffs[j].conj();
        }
    }
    let variance = shot + 2.0 * excess.re;
    Ok(build_report(mean, variance, n0, dm))
}

/// The state rewritten in a basis built around the detection mode.
#[derive(Debug, Clone)]
pub struct DetectionFrame {
    /// Orthonormal basis containing `w1`; `w0` (the part of `v0` orthogonal
    /// to `w1`) precedes it when it exists.
    pub basis: ModeBasis,
    pub state: GaussianState,
    pub w1_index: usize,
    pub v0: SampledMode,
    pub n0: f64,
    pub detection: DetectionMode,
}

/// Builds `{w0, w1, ...}` spanning the caller's basis plus `w1`, and the
/// state expressed in it. A direction of `w1` outside the caller's span is
/// added as a vacuum mode.
pub fn detection_frame(
    state: &GaussianState,
    basis: &ModeBasis,
    layout: &PixelLayout,
) -> Result<DetectionFrame> {
    check_dims(state, basis)?;
    check_layout(basis, layout)?;
    let (v0, n0) = mean_field_mode(state, basis)?;
    let detection = detection_mode(&v0, layout)?;
    let w1 = detection.w1.clone();

    // Source basis extended by the out-of-span part of w1.
    let mut residual = w1.clone();
    for _pass in 0..2 {
        for u in basis.modes() {
            let proj = overlap(u, &residual)?;
            residual.axpy(-proj, u)?;
        }
    }
    let residual_norm = residual.norm();
    let (source, source_state) = if residual_norm > GRAM_SCHMIDT_TOL {
        let mut modes = basis.modes().to_vec();
        modes.push(residual.scale(c(1.0 / residual_norm, 0.0)));
        (
            ModeBasis::new(modes, basis.ortho_tol())?,
            state.extend_with_vacuum(1),
        )
    } else {
        (basis.clone(), state.clone())
    };

    let proj = overlap(&w1, &v0)?;
    let mut w0 = v0.clone();
    w0.axpy(-proj, &w1)?;
    let w0_norm = w0.norm();
    let (partial, w1_index) = if w0_norm > GRAM_SCHMIDT_TOL {
        let w0 = w0.scale(c(1.0 / w0_norm, 0.0));
        (ModeBasis::new(vec![w0, w1], basis.ortho_tol())?, 1)
    } else {
        (ModeBasis::new(vec![w1], basis.ortho_tol())?, 0)
    };

    let completion = complete_basis_to(&partial, &source, source.len())?;
    if completion.rank_deficient() {
        return Err(Error::BasisMismatch(format!(
            "could only build {} of {} detection-basis modes",
            completion.achieved, completion.requested
        )));
    }
    let frame_basis = completion.basis;
    let m = source.len();
    let mut u = CMatrix::zeros(m, m);
    for i in 0..m {
        for k in 0..m {
            u[(i, k)] = overlap(frame_basis.mode(i), source.mode(k))?;
        }
    }
    let frame_state = source_state.basis_change(&u)?;
    Ok(DetectionFrame {
        basis: frame_basis,
        state: frame_state,
        w1_index,
        v0,
        n0,
        detection,
    })
}

/// Variance as `f^2 N0 <(dc_1 + dc_1^dag)^2>` in the detection frame.
pub fn variance_via_detection_mode(
    state: &GaussianState,
    basis: &ModeBasis,
    layout: &PixelLayout,
) -> Result<MeasurementReport> {
    let frame = detection_frame(state, basis, layout)?;
    Ok(frame.report())
}

impl DetectionFrame {
    pub fn report(&self) -> MeasurementReport {
        let f = self.detection.f;
        let variance = f * f * self.n0 * self.state.x_variance(self.w1_index);
        let mean = self.n0 * f * self.detection.overlap_with_v0.re;
        build_report(mean, variance, self.n0, self.detection.clone())
    }
}

/// Outcome of comparing the two variance routes.
#[derive(Debug, Clone)]
pub struct DualPathCheck {
    pub direct: MeasurementReport,
    pub via_detection_mode: MeasurementReport,
    pub relative_discrepancy: f64,
    pub tolerance: f64,
}

impl DualPathCheck {
    pub fn agrees(&self) -> bool {
        self.relative_discrepancy <= self.tolerance
    }
}

pub fn dual_path_check(
    state: &GaussianState,
    basis: &ModeBasis,
    layout: &PixelLayout,
    tolerance: f64,
) -> Result<DualPathCheck> {
    let direct = variance_direct(state, basis, layout)?;
    let via_detection_mode = variance_via_detection_mode(state, basis, layout)?;
    let scale = direct.variance.abs().max(via_detection_mode.variance.abs());
    let relative_discrepancy = if scale > 0.0 {
        (direct.variance - via_detection_mode.variance).abs() / scale
    } else {
        0.0
    };
    Ok(DualPathCheck {
        direct,
        via_detection_mode,
        relative_discrepancy,
        tolerance,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::modes::{hermite_gauss_basis, Grid};
    use crate::state::{make_state, SqueezerSpec};

    fn grid() -> Grid {
        Grid::square(128, 8.0).unwrap()
    }

    #[test]
    fn coherent_difference_is_shot_noise() {
        let b = hermite_gauss_basis(1, 1.0, grid()).unwrap();
        let s = make_state(3, &[(0, c(100.0, 0.0))], &[]).unwrap();
        let l = PixelLayout::half_x(grid(), [1.0, -1.0]).unwrap();
        let r = variance_direct(&s, &b, &l).unwrap();
        assert!((r.variance / 1e4 - 1.0).abs() < 1e-12);
        assert!(r.mean.abs() < 1e-8);
        assert!((r.sql_ratio - 1.0).abs() < 1e-12);
    }

    #[test]
    fn half_gain_split_is_poissonian() {
        let b = hermite_gauss_basis(0, 1.0, grid()).unwrap();
        let s = make_state(1, &[(0, c(100.0, 0.0))], &[]).unwrap();
        let l = PixelLayout::half_x(grid(), [1.0, 0.0]).unwrap();
        for r in [variance_direct(&s, &b, &l).unwrap(), variance_via_detection_mode(&s, &b, &l).unwrap()] {
            assert!((r.mean - 5000.0).abs() < 1e-8);
            assert!((r.variance - 5000.0).abs() < 1e-8);
            assert!((r.detection_mode.f.powi(2) - 0.5).abs() < 1e-12);
        }
    }

    #[test]
    fn coefficients_in_detection_frame() {
        let b = hermite_gauss_basis(2, 1.0, grid()).unwrap();
        let s = make_state(6, &[(0, c(30.0, 0.0))], &[]).unwrap();
        let l = PixelLayout::half_x(grid(), [1.0, -1.0]).unwrap();
        let frame = detection_frame(&s, &b, &l).unwrap();
        let coeffs = overlap_coefficients(&frame.state, &frame.basis, &l).unwrap();
        for (i, ci) in coeffs.iter().enumerate() {
            let expected = if i == frame.w1_index { 30.0 } else { 0.0 };
            assert!((ci - c(expected, 0.0)).norm() < 1e-9, "{i}: {ci}");
        }
    }

    #[test]
    fn squeezed_flipped_mode_beats_shot_noise() {
        let b = hermite_gauss_basis(1, 1.0, grid()).unwrap();
        let s = make_state(3, &[(0, c(100.0, 0.0))], &[]).unwrap();
        let l = PixelLayout::half_x(grid(), [1.0, -1.0]).unwrap();
        let frame = detection_frame(&s, &b, &l).unwrap();
        let squeezed = frame
            .state
            .apply_squeezer(&SqueezerSpec::new(frame.w1_index, 1.0, 0.0))
            .unwrap();
        let r = variance_direct(&squeezed, &frame.basis, &l).unwrap();
        assert!((r.sql_ratio - (-2.0f64).exp()).abs() < 1e-10);
        let check = dual_path_check(&squeezed, &frame.basis, &l, DUAL_PATH_TOL).unwrap();
        assert!(check.agrees(), "{}", check.relative_discrepancy);
    }

    #[test]
    fn vacuum_is_rejected() {
        let b = hermite_gauss_basis(0, 1.0, grid()).unwrap();
        let l = PixelLayout::half_x(grid(), [1.0, -1.0]).unwrap();
        let s = GaussianState::vacuum(1);
        assert_eq!(variance_direct(&s, &b, &l).unwrap_err(), Error::ZeroMeanField);
        assert_eq!(overlap_coefficients(&s, &b, &l).unwrap_err(), Error::ZeroMeanField);
    }

    #[test]
    fn dimension_mismatch_is_rejected() {
        let b = hermite_gauss_basis(1, 1.0, grid()).unwrap();
        let l = PixelLayout::half_x(grid(), [1.0, -1.0]).unwrap();
        let s = make_state(2, &[(0, c(1.0, 0.0))], &[]).unwrap();
        assert!(matches!(variance_direct(&s, &b, &l), Err(Error::DimensionMismatch { .. })));
    }
}
