use num_complex::Complex64;

use super::layout::PixelLayout;
use crate::error::{Error, Result};
use crate::modes::{overlap, SampledMode};

/// `|<w1, v0>|` below which a measurement counts as a difference measurement.
pub const DIFFERENCE_TOL: f64 = 1e-9;

/// `f` below this fraction of the largest |gain| is treated as zero.
pub const DEGENERATE_F_TOL: f64 = 1e-12;

/// The mode whose in-phase quadrature carries all the noise of a linear
/// pixel measurement.
#[derive(Debug, Clone, PartialEq)]
pub struct DetectionMode {
    /// `sigma_i v0 / f` on pixel `i`.
    pub w1: SampledMode,
    /// `f^2 = sum_j sigma_j^2 int_{D_j} |v0|^2`.
    pub f: f64,
    /// True when the measurement mean vanishes, i.e. `w1` is orthogonal to `v0`.
    pub is_difference: bool,
    /// `<w1, v0>`, equal to the mean measurement per photon divided by `f`.
    pub overlap_with_v0: Complex64,
}

/// `int_{D_j} |v0|^2` for every pixel.
pub fn pixel_integrals(v0: &SampledMode, layout: &PixelLayout) -> Result<Vec<f64>> {
    v0.grid().ensure_same(layout.grid())?;
    let mut out = vec![0.0; layout.n_pixels()];
    for (a, &p) in v0.amplitude().iter().zip(layout.pixel_of_cell()) {
        out[p] += a.norm_sqr();
    }
    let da = v0.grid().cell_area();
    out.iter_mut().for_each(|x| *x *= da);
    Ok(out)
}

pub fn detection_mode(v0: &SampledMode, layout: &PixelLayout) -> Result<DetectionMode> {
    detection_mode_with_tol(v0, layout, DIFFERENCE_TOL)
}

/// Builds `w1` and `f`. The difference test is `|<w1, v0>| <= difference_tol`,
/// which is invariant under a global rescaling of the gains.
pub fn detection_mode_with_tol(
    v0: &SampledMode,
    layout: &PixelLayout,
    difference_tol: f64,
) -> Result<DetectionMode> {
    let integrals = pixel_integrals(v0, layout)?;
    let gains = layout.gains();
    let f2: f64 = gains.iter().zip(&integrals).map(|(s, i)| s * s * i).sum();
    let f = f2.sqrt();
    let max_gain = gains.iter().fold(0.0_f64, |m, g| m.max(g.abs()));
    if max_gain == 0.0 || f <= DEGENERATE_F_TOL * max_gain {
        return Err(Error::Degenerate(
            "gains vanish on the support of the mean-field mode (f = 0)".into(),
        ));
    }

    let cell_gains = layout.cell_gains();
    let samples = v0
        .amplitude()
        .iter()
        .zip(&cell_gains)
        .map(|(a, s)| a * (s / f))
        .collect();
    let w1 = SampledMode::from_samples(*v0.grid(), samples)?;
    let overlap_with_v0 = overlap(&w1, v0)?;
    Ok(DetectionMode {
        w1,
        f,
        is_difference: overlap_with_v0.norm() <= difference_tol,
        overlap_with_v0,
    })
}
