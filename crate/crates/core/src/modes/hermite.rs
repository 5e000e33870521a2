use num_complex::Complex64;

use super::basis::{BasisMetadata, ModeBasis};
use super::grid::Grid;
use super::mode::SampledMode;
use crate::error::{Error, Result};

/// Orthonormality tolerance attached to generated Hermite-Gauss bases.
pub const HERMITE_ORTHO_TOL: f64 = 1e-6;

/// Smallest window-to-waist ratio that keeps the sampled modes orthonormal.
pub const MIN_WINDOW_OVER_WAIST: f64 = 6.0;

/// Normalized Hermite functions `psi_0..=psi_max` at `t`, via the three-term
/// recurrence (stable far beyond the orders used here).
pub fn hermite_functions(max_order: usize, t: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(max_order + 1);
    let psi0 = std::f64::consts::PI.powf(-0.25) * (-0.5 * t * t).exp();
    out.push(psi0);
    if max_order >= 1 {
        out.push(std::f64::consts::SQRT_2 * t * psi0);
    }
    for k in 1..max_order {
        let kf = k as f64;
        let next = (2.0 / (kf + 1.0)).sqrt() * t * out[k] - (kf / (kf + 1.0)).sqrt() * out[k - 1];
        out.push(next);
    }
    out
}

/// `(m, n)` index pairs with `m + n <= max_order`, ordered by `(m + n, m)`.
/// `m` counts nodes along x, `n` along y.
pub fn hermite_gauss_orders(max_order: usize) -> Vec<(usize, usize)> {
    (0..=max_order)
        .flat_map(|order| (0..=order).map(move |m| (m, order - m)))
        .collect()
}

/// All waist-plane Hermite-Gauss modes `HG_mn` with `m + n <= max_order`,
/// each renormalized on the grid.
pub fn hermite_gauss_basis(max_order: usize, waist: f64, grid: Grid) -> Result<ModeBasis> {
    if !(waist.is_finite() && waist > 0.0) {
        return Err(Error::InvalidParameter {
            name: "waist",
            reason: format!("must be finite and positive, got {waist}"),
        });
    }
    let mut metadata = BasisMetadata::default();
    let ratio = (grid.width_x() / waist).min(grid.width_y() / waist);
    if ratio < MIN_WINDOW_OVER_WAIST {
        metadata.warnings.push(format!(
            "window is only {ratio:.2} waists wide (need >= {MIN_WINDOW_OVER_WAIST}); orthonormality degrades"
        ));
    }

    let scale = std::f64::consts::SQRT_2 / waist;
    let hx: Vec<Vec<f64>> = (0..grid.nx())
        .map(|ix| hermite_functions(max_order, scale * grid.x(ix)))
        .collect();
    let hy: Vec<Vec<f64>> = (0..grid.ny())
        .map(|iy| hermite_functions(max_order, scale * grid.y(iy)))
        .collect();
    // Continuous-space norm of psi_m(s x) psi_n(s y) is 1 / s^2.
    let analytic_norm_sqr = 1.0 / (scale * scale);

    let mut modes = Vec::new();
    let mut worst_residual = 0.0_f64;
    for (m, n) in hermite_gauss_orders(max_order) {
        let mut samples = Vec::with_capacity(grid.len());
        for row in &hy {
            for col in &hx {
                samples.push(Complex64::new(col[m] * row[n], 0.0));
            }
        }
        let raw = SampledMode::from_samples(grid, samples)?;
        let in_window = raw.norm_sqr() / analytic_norm_sqr;
        worst_residual = worst_residual.max((1.0 - in_window).max(0.0));
        modes.push(raw.normalize()?);
    }
    metadata.truncation_residual = Some(worst_residual);

    let tol = HERMITE_ORTHO_TOL;
    let basis = if metadata.warnings.is_empty() {
        ModeBasis::new(modes, tol)?
    } else {
        // Undersized windows are reported, not rejected.
        let loose = ModeBasis::new(modes.clone(), f64::INFINITY)?;
        let deviation = loose.max_orthonormality_deviation();
        metadata
            .warnings
            .push(format!("max orthonormality deviation {deviation:.3e}"));
        ModeBasis::new(modes, deviation.max(tol))?
    };
    Ok(basis.with_metadata(metadata))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::modes::mode::overlap;

    #[test]
    fn ordering_by_total_then_x_order() {
        assert_eq!(
            hermite_gauss_orders(2),
            vec![(0, 0), (0, 1), (1, 0), (0, 2), (1, 1), (2, 0)]
        );
    }

    #[test]
    fn recurrence_matches_closed_forms() {
        let t: f64 = 0.7;
        let h = hermite_functions(3, t);
        let c = std::f64::consts::PI.powf(-0.25) * (-0.5 * t * t).exp();
        assert!((h[2] - c * (2.0 * t * t - 1.0) / 2f64.sqrt()).abs() < 1e-14);
        assert!((h[3] - c * (2.0 * t * t * t - 3.0 * t) / 3f64.sqrt()).abs() < 1e-14);
    }

    #[test]
    fn single_mode_is_normalized() {
        let b = hermite_gauss_basis(0, 1.0, Grid::square(64, 8.0).unwrap()).unwrap();
        assert_eq!(b.len(), 1);
        assert!((b.mode(0).norm() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn hg10_is_odd_in_x() {
        let b = hermite_gauss_basis(1, 1.0, Grid::square(64, 8.0).unwrap()).unwrap();
        let hg10 = b.mode(2);
        let o = overlap(hg10, &hg10.flip_x()).unwrap();
        assert!((o.re + 1.0).abs() < 1e-12);
        let hg01 = b.mode(1);
        assert!((overlap(hg01, &hg01.flip_x()).unwrap().re - 1.0).abs() < 1e-12);
    }

    #[test]
    fn small_window_warns() {
        let b = hermite_gauss_basis(1, 1.0, Grid::square(64, 4.0).unwrap()).unwrap();
        assert!(!b.metadata().warnings.is_empty());
        assert!(b.metadata().truncation_residual.unwrap() > 1e-6);
    }

    #[test]
    fn bad_waist_rejected() {
        let g = Grid::square(8, 1.0).unwrap();
        assert!(hermite_gauss_basis(1, 0.0, g).is_err());
        assert!(hermite_gauss_basis(1, f64::NAN, g).is_err());
    }
}
