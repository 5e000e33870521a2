//! Eigenbasis structure of a two-zone (+1 / -1) measurement whose mean does
//! not vanish.
//!
//! With `i+`, `i-` the fractions of `|v0|^2` on the two zones, `w0` is `v0`
//! rescaled by `sqrt(i-/i+)` on `D+` and `sqrt(i+/i-)` on `D-`; `v1` is the
//! flipped mode of `w0`; and `w1 = alpha v0 + beta v1` with
//! `alpha = i+ - i-`, `beta = 2 sqrt(i+ i-)`.

use num_complex::Complex64;

use super::layout::PixelLayout;
use super::mode::{detection_mode, pixel_integrals};
use crate::error::{Error, Result};
use crate::modes::{overlap, ModeBasis, SampledMode};
use crate::state::GaussianState;

/// Tolerance on the pointwise identity `w1 = alpha v0 + beta v1` and on
/// matching the eigenbasis modes.
pub const TWO_ZONE_TOL: f64 = 1e-8;

#[derive(Debug, Clone)]
pub struct TwoZoneDecomposition {
    pub i_plus: f64,
    pub i_minus: f64,
    pub alpha: f64,
    pub beta: f64,
    pub v0: SampledMode,
    pub v1: SampledMode,
    pub w0: SampledMode,
    pub w1: SampledMode,
    /// `f^2 = i+ + i-`.
    pub f_squared: f64,
    /// `max |w1 - (alpha v0 + beta v1)|` over cells.
    pub reconstruction_error: f64,
    /// `<w1, v0>` computed by quadrature (equals `alpha` for real `v0`).
    pub overlap_w1_v0: Complex64,
}

fn zone_signs(layout: &PixelLayout) -> Result<(usize, usize)> {
    let g = layout.gains();
    match g {
        [a, b] if *a == 1.0 && *b == -1.0 => Ok((0, 1)),
        [a, b] if *a == -1.0 && *b == 1.0 => Ok((1, 0)),
        _ => Err(Error::InvalidParameter {
            name: "layout",
            reason: format!("two-zone decomposition needs two pixels with gains +1 and -1, got {g:?}"),
        }),
    }
}

/// `v0` is renormalized first, so `i+ + i- = f^2 = 1`.
pub fn two_zone_decomposition(v0: &SampledMode, layout: &PixelLayout) -> Result<TwoZoneDecomposition> {
    let (plus, minus) = zone_signs(layout)?;
    let v0 = &v0.clone().normalize()?;
    let integrals = pixel_integrals(v0, layout)?;
    let (i_plus, i_minus) = (integrals[plus], integrals[minus]);
    if i_plus <= 0.0 || i_minus <= 0.0 {
        return Err(Error::Degenerate(format!(
            "one zone receives no light (i+ = {i_plus}, i- = {i_minus}); w0 is undefined"
        )));
    }
    let alpha = i_plus - i_minus;
    let beta = 2.0 * (i_plus * i_minus).sqrt();
    let f_squared = i_plus + i_minus;

    let dm = detection_mode(v0, layout)?;
    let w1 = dm.w1;
    let up = (i_minus / i_plus).sqrt();
    let down = (i_plus / i_minus).sqrt();
    let labels = layout.pixel_of_cell();
    let mut w0 = v0.clone();
    let mut v1 = v0.clone();
    for ((a, b), (&p, src)) in w0
        .amplitude_mut()
        .iter_mut()
        .zip(v1.amplitude_mut().iter_mut())
        .zip(labels.iter().zip(v0.amplitude()))
    {
        if p == plus {
            *a = src * up;
            *b = src * up;
        } else {
            *a = src * down;
            *b = -src * down;
        }
    }
    let reconstruction_error = w1
        .amplitude()
        .iter()
        .zip(v0.amplitude().iter().zip(v1.amplitude()))
        .map(|(w, (a, b))| (w - (a * alpha + b * beta)).norm())
        .fold(0.0, f64::max);
    let overlap_w1_v0 = overlap(&w1, v0)?;
    Ok(TwoZoneDecomposition {
        i_plus,
        i_minus,
        alpha,
        beta,
        v0: v0.clone(),
        v1,
        w0,
        w1,
        f_squared,
        reconstruction_error,
        overlap_w1_v0,
    })
}

/// `f^2 N0 [alpha^2 Var(X0) + beta^2 Var(X1) + 2 alpha beta Cov(X0, X1)]` for a
/// state written in an eigenbasis whose first two modes are `v0` and `v1`.
pub fn two_zone_variance_decomposition(
    state: &GaussianState,
    basis: &ModeBasis,
    decomp: &TwoZoneDecomposition,
) -> Result<f64> {
    if basis.len() < 2 || state.dim() != basis.len() {
        return Err(Error::BasisMismatch(format!(
            "need a state and basis of equal size >= 2, got {} and {}",
            state.dim(),
            basis.len()
        )));
    }
    for (k, mode) in [&decomp.v0, &decomp.v1].into_iter().enumerate() {
        let o = overlap(basis.mode(k), mode)?;
        if (o - Complex64::new(1.0, 0.0)).norm() > TWO_ZONE_TOL {
            return Err(Error::BasisMismatch(format!(
                "basis mode {k} does not match the decomposition (overlap {o})"
            )));
        }
    }
    let n0 = state.n0();
    let m0 = state.mean()[0];
    let off_axis = (n0 - m0.norm_sqr()).max(0.0).sqrt();
    if m0.re <= 0.0 || m0.im.abs() > TWO_ZONE_TOL * m0.re || off_axis > TWO_ZONE_TOL * m0.re {
        return Err(Error::BasisMismatch(
            "state is not in eigenbasis form (mean must be real, positive and confined to mode 0)"
                .into(),
        ));
    }
    let (a, b) = (decomp.alpha, decomp.beta);
    let quad = a * a * state.x_variance(0) + b * b * state.x_variance(1) + 2.0 * a * b * state.x_covariance(0, 1);
    Ok(decomp.f_squared * n0 * quad)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::modes::Grid;

    fn displaced(grid: Grid, d: f64) -> SampledMode {
        SampledMode::from_fn(grid, |x, y| {
            Complex64::new((-((x - d) * (x - d) + y * y)).exp(), 0.0)
        })
        .unwrap()
        .normalize()
        .unwrap()
    }

    #[test]
    fn balanced_split() {
        let g = Grid::square(64, 8.0).unwrap();
        let v0 = displaced(g, 0.0);
        let d = two_zone_decomposition(&v0, &PixelLayout::half_x(g, [-1.0, 1.0]).unwrap()).unwrap();
        assert!(d.alpha.abs() < 1e-12);
        assert!((d.beta - 1.0).abs() < 1e-12);
        assert!(d.w1.max_abs_diff(&d.v1).unwrap() < 1e-12);
    }

    #[test]
    fn invariants_for_displaced_beam() {
        let g = Grid::square(128, 8.0).unwrap();
        let v0 = displaced(g, 0.37);
        let d = two_zone_decomposition(&v0, &PixelLayout::half_x(g, [-1.0, 1.0]).unwrap()).unwrap();
        assert!((d.alpha.powi(2) + d.beta.powi(2) - 1.0).abs() < 1e-10);
        assert!(overlap(&d.w0, &d.w1).unwrap().norm() < 1e-12);
        assert!(overlap(&d.v0, &d.v1).unwrap().norm() < 1e-12);
        assert!((d.w0.norm() - 1.0).abs() < 1e-12);
        assert!(d.reconstruction_error < 1e-12);
        assert!((d.overlap_w1_v0.re - d.alpha).abs() < 1e-12);
    }

    #[test]
    fn three_to_one_split() {
        // Pixel masks that put exactly 3/4 of |v0|^2 on the + zone.
        let g = Grid::square(4, 4.0).unwrap();
        let v0 = SampledMode::from_fn(g, |_, _| Complex64::new(1.0, 0.0))
            .unwrap()
            .normalize()
            .unwrap();
        let labels: Vec<usize> = (0..16).map(|i| usize::from(i >= 12)).collect();
        let l = PixelLayout::new(g, labels, vec![1.0, -1.0]).unwrap();
        let d = two_zone_decomposition(&v0, &l).unwrap();
        assert!((d.i_plus - 0.75).abs() < 1e-15);
        assert!((d.alpha - 0.5).abs() < 1e-12);
        assert!((d.beta - 0.75f64.sqrt()).abs() < 1e-12);
        assert!((d.overlap_w1_v0.re - 0.5).abs() < 1e-12);
    }

    #[test]
    fn empty_zone_is_degenerate() {
        let g = Grid::square(16, 8.0).unwrap();
        let v0 = SampledMode::from_fn(g, |x, _| Complex64::new(if x < 0.0 { 1.0 } else { 0.0 }, 0.0))
            .unwrap()
            .normalize()
            .unwrap();
        let l = PixelLayout::half_x(g, [1.0, -1.0]).unwrap();
        assert!(matches!(two_zone_decomposition(&v0, &l), Err(Error::Degenerate(_))));
        let wrong = PixelLayout::half_x(g, [1.0, 1.0]).unwrap();
        assert!(two_zone_decomposition(&v0, &wrong).is_err());
    }
}
